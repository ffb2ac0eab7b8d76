"""
Loop product, BV operator and bracket on the loop homology of a PD model.

The loop homology ℍ_p is the dual of Hochschild chain homology in degree
p + m. The product is the dual of the homology map induced by Φ, and Δ is
the dual of the homology map induced by Connes' B.
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, List, Mapping, Optional, Tuple

from .cdga import PDModel, ensure_valid, mu_A, split_pair, theta_inverse
from .exactlin import (
    DegreeMap,
    GradedSpace,
    HomologyData,
    Vector,
    add_to,
    add_term,
    dual_map,
    rank,
    sign,
    solve,
)
from .exceptions import ChainIdentityError, InconsistentModelError, RangeError
from .hochschild import (
    Cochain,
    HHAlgebra,
    HochschildComplex,
    build_chain_complex,
    gerstenhaber_bracket,
    hh_algebra,
    suspended_degree,
    unit_cochain,
    word_label,
)
from .report import Report

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


def loop_label(p: int, i: int) -> str:
    return f"L{p}#{i}"


def _level(label: str) -> int:
    inside = label[label.index("[") + 1 : -1]
    return inside.count("|") + 1 if inside else 0


@dataclass(frozen=True)
class PhiMap:
    """Φ on every stored word, as sparse combinations of word pairs"""

    complex: HochschildComplex
    degree: int
    images: Mapping[str, Mapping[Pair, Fraction]] = field(default_factory=dict)

    def image(self, label: str) -> Dict[Pair, Fraction]:
        return dict(self.images[label])

    def apply(self, vec: Mapping[str, Fraction]) -> Dict[Pair, Fraction]:
        result: Dict[Pair, Fraction] = {}
        for label, coeff in vec.items():
            for pair, value in self.images[label].items():
                total = result.get(pair, 0) + coeff * value
                if total:
                    result[pair] = total
                else:
                    result.pop(pair, None)
        return result


def _phi_image(h: HochschildComplex, mu: DegreeMap, label: str) -> Dict[Pair, Fraction]:
    a = h.algebra
    w = h.words[label]
    result: Dict[Pair, Fraction] = {}
    prefix = [0]
    for x in w.letters:
        prefix.append(prefix[-1] + a.degree(x) - 1)
    for pair, coeff in mu.image(w.head).items():
        left, right = split_pair(pair)
        for i in range(len(w.letters) + 1):
            key = (word_label(left, w.letters[:i]), word_label(right, w.letters[i:]))
            value = result.get(key, 0) + sign(a.degree(right) * prefix[i]) * coeff
            if value:
                result[key] = value
            else:
                result.pop(key, None)
    return result


def _tensor_boundary(h: HochschildComplex, terms: Mapping[Pair, Fraction]) -> Dict[Pair, Fraction]:
    """(∂⊗1 + 1⊗∂)(u⊗v) = ∂u⊗v + (-1)^{|u|} u⊗∂v"""
    result: Dict[Pair, Fraction] = {}

    def put(key: Pair, value: Fraction) -> None:
        total = result.get(key, 0) + value
        if total:
            result[key] = total
        else:
            result.pop(key, None)

    for (u, v), coeff in terms.items():
        for t, c in h.boundary.image(u).items():
            put((t, v), coeff * c)
        s = sign(h.words[u].degree)
        for t, c in h.boundary.image(v).items():
            put((u, t), s * coeff * c)
    return result


def phi(h: HochschildComplex, mu: DegreeMap) -> PhiMap:
    """
    Φ(a0[a1|...|ak]) = Σ_i Σ (-1)^{|a0''|·Σ_{j≤i}|s aj|} a0'[a1|...|ai] ⊗ a0''[a(i+1)|...|ak].

    The graded chain-map identity (∂⊗1 + 1⊗∂)Φ = (-1)^m Φ∂ is checked on
    every word whose tensor pieces stay within the stored range.
    """
    if mu.source != h.algebra.space:
        raise ValueError("μ_A and the Hochschild complex come from different models")
    m = mu.degree
    images = {label: _phi_image(h, mu, label) for label in h.words}
    result = PhiMap(h, m, images)
    for n in range(0, h.truncation - m + 1):
        for label in h.space.basis(n):
            lhs = _tensor_boundary(h, images[label])
            rhs = result.apply(h.boundary.image(label))
            for key, value in rhs.items():
                total = lhs.get(key, 0) - sign(m) * value
                if total:
                    lhs[key] = total
                else:
                    lhs.pop(key, None)
            if lhs:
                raise ChainIdentityError("Φ is a chain map", label)
    logger.info("built Φ on %d words of %s", len(images), h.algebra.name)
    return result


def phi_filtration_report(phimap: PhiMap, report: Optional[Report] = None) -> Report:
    """Φ(F_p) ⊆ ⊕_{k+l=p} F_k⊗F_l, with equality of levels term by term"""
    report = report or Report("Φ filtration")
    h = phimap.complex
    for label, image in phimap.images.items():
        level = h.filtration(label)
        report.expect(
            "Φ respects word length filtration",
            all(_level(u) + _level(v) == level for u, v in image),
            label,
        )
    return report


@dataclass(frozen=True)
class LoopAlgebra:
    """Product, Δ and bracket tables on ℍ_p for -m ≤ p ≤ N - m"""

    model: PDModel
    truncation: int
    space: GradedSpace
    product: Mapping[Pair, Vector]
    unit: Vector
    delta: DegreeMap
    bracket: Mapping[Pair, Vector]
    classes: Mapping[int, HomologyData]
    hochschild: HochschildComplex
    phi: PhiMap

    @property
    def dimension(self) -> int:
        return self.model.dimension

    @property
    def lo(self) -> int:
        return -self.model.dimension

    @property
    def hi(self) -> int:
        return self.truncation - self.model.dimension

    def degree(self, label: str) -> int:
        return self.space.degree_of(label)

    def in_range(self, p: int) -> bool:
        return self.lo <= p <= self.hi

    def delta_defined(self, p: int) -> bool:
        return self.lo <= p <= self.hi - 1

    def bracket_defined(self, p: int, q: int) -> bool:
        return self.delta_defined(p) and self.delta_defined(q) and self.in_range(p + q + 1) and p + q >= self.lo

    def basis(self, p: int) -> Tuple[str, ...]:
        return self.space.basis(p)

    def multiply(self, x: Mapping[str, Fraction], y: Mapping[str, Fraction]) -> Vector:
        result: Vector = {}
        for a, u in x.items():
            for b, v in y.items():
                try:
                    entry = self.product[(a, b)]
                except KeyError:
                    raise RangeError(f"product {a}•{b} lies outside the stored range") from None
                add_to(result, entry, u * v)
        return result

    def apply_delta(self, x: Mapping[str, Fraction]) -> Vector:
        return self.delta.apply(x)


def _homogeneous_degree(la: LoopAlgebra, x: Mapping[str, Fraction]) -> Optional[int]:
    degrees = {la.degree(label) for label in x}
    if len(degrees) > 1:
        raise ValueError("bracket arguments must be homogeneous")
    return degrees.pop() if degrees else None


def bv_bracket(la: LoopAlgebra, x: Mapping[str, Fraction], y: Mapping[str, Fraction]) -> Vector:
    """{x, y} = (-1)^{|x|}(Δ(x•y) - Δ(x)•y - (-1)^{|x|} x•Δ(y))"""
    p = _homogeneous_degree(la, x)
    q = _homogeneous_degree(la, y)
    if p is None or q is None:
        return {}
    if not la.bracket_defined(p, q):
        raise RangeError(f"bracket of degrees {p} and {q} lies outside the stored range")
    result = la.apply_delta(la.multiply(x, y))
    add_to(result, la.multiply(la.apply_delta(x), y), -1)
    add_to(result, la.multiply(x, la.apply_delta(y)), -sign(p))
    return {k: sign(p) * v for k, v in result.items()}


def loop_algebra(p: PDModel, N: int) -> LoopAlgebra:
    """
    BV algebra tables on ℍ_* from the Hochschild chains of p through degree N.

    Raises:
        RangeError: N < m, so ℍ_0 (the unit) is not covered
    """
    ensure_valid(p)
    m = p.dimension
    if N < m:
        raise RangeError(f"degree bound {N} is below the dimension {m}; the unit needs N ≥ m", N)
    h = build_chain_complex(p, N)
    mu = mu_A(p)
    phimap = phi(h, mu)
    classes = {n: h.homology(n) for n in range(0, N + 1)}

    bases = {n - m: [loop_label(n - m, k) for k in range(classes[n].dimension)] for n in range(0, N + 1)}
    space = GradedSpace(bases, lo=-m, hi=N - m)

    # [Φ(c_k)] for every class representative, as coordinates on pairs of classes
    product: Dict[Pair, Vector] = {}
    for pa in range(-m, N - m + 1):
        for pb in range(max(-m, -m - pa), min(N - m, N - m - pa) + 1):
            for x in bases[pa]:
                for y in bases[pb]:
                    product[(x, y)] = {}
    for n in range(0, N + 1):
        for k, rep in enumerate(classes[n].representatives):
            target = loop_label(n - m, k)
            for (u, v), coeff in phimap.apply(rep).items():
                wu = h.words.get(u)
                wv = h.words.get(v)
                if wu is None or wv is None or wu.degree > N or wv.degree > N:
                    continue
                i, j = wu.degree, wv.degree
                s = sign(m * (j - m) + i * j)
                for a, va in classes[i].project_label(u).items():
                    for b, vb in classes[j].project_label(v).items():
                        add_term(product[(loop_label(i - m, a), loop_label(j - m, b))], target, s * coeff * va * vb)

    unit = _solve_unit(space, product, m, N)

    homology_space = GradedSpace(
        {n: [f"c{n}#{k}" for k in range(classes[n].dimension)] for n in range(0, N + 1)}, lo=0, hi=N
    )
    hb_columns = {}
    for n in range(1, N + 1):
        block = {}
        for k, rep in enumerate(classes[n].representatives):
            coords = classes[n - 1].coordinates(h.connes.apply(rep))
            block[f"c{n}#{k}"] = {f"c{n - 1}#{r}": c for r, c in enumerate(coords) if c}
        hb_columns[n] = block
    induced_b = DegreeMap(homology_space, homology_space, -1, hb_columns)
    dual_b = dual_map(induced_b)

    def regrade(label: str) -> str:
        n, k = label[1:].split("#")
        return loop_label(int(n) - m, int(k))

    delta_columns = {}
    for degree, block in dual_b.columns.items():
        delta_columns[-degree - m] = {
            regrade(label): {regrade(t): v for t, v in image.items()} for label, image in block.items()
        }
    delta = DegreeMap(space, space, 1, delta_columns)

    la = LoopAlgebra(p, N, space, product, unit, delta, {}, classes, h, phimap)
    bracket: Dict[Pair, Vector] = {}
    for pa in space.degrees():
        for pb in space.degrees():
            if not la.bracket_defined(pa, pb):
                continue
            for x in bases[pa]:
                for y in bases[pb]:
                    bracket[(x, y)] = bv_bracket(la, {x: Fraction(1)}, {y: Fraction(1)})
    la = replace(la, bracket=bracket)
    logger.info("loop algebra of %s through degree %d: total dimension %d", p.name, N, len(space.labels))
    return la


def _solve_unit(space: GradedSpace, product: Mapping[Pair, Vector], m: int, N: int) -> Vector:
    candidates = space.basis(0)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for z in space.labels:
        for out in space.basis(space.degree_of(z)):
            rows.append([product[(u, z)].get(out, Fraction(0)) for u in candidates])
            rhs.append(Fraction(1) if out == z else Fraction(0))
            rows.append([product[(z, u)].get(out, Fraction(0)) for u in candidates])
            rhs.append(Fraction(1) if out == z else Fraction(0))
    coeffs = solve(rows, rhs) if candidates else None
    if coeffs is None:
        raise InconsistentModelError("the loop product has no unit in ℍ_0")
    return {u: c for u, c in zip(candidates, coeffs) if c}


def _basis_vector(label: str) -> Vector:
    return {label: Fraction(1)}


def _equal(u: Mapping[str, Fraction], v: Mapping[str, Fraction], coeff: object = 1) -> bool:
    diff = dict(u)
    add_to(diff, v, -Fraction(coeff))
    return not diff


def verify_bv(la: LoopAlgebra) -> Report:
    """Exhaustive BV axioms over all in-range basis tuples"""
    report = Report(f"BV axioms for {la.model.name} through degree {la.truncation}")
    degrees = list(la.space.degrees())
    labels = {p: la.basis(p) for p in degrees}

    def mul(x: str, y: str) -> Vector:
        return la.product[(x, y)]

    def br(x: Mapping[str, Fraction], y: Mapping[str, Fraction]) -> Vector:
        result: Vector = {}
        for a, u in x.items():
            for b, v in y.items():
                add_to(result, la.bracket[(a, b)], u * v)
        return result

    for z in la.space.labels:
        report.expect("unit", _equal(la.multiply(la.unit, _basis_vector(z)), _basis_vector(z)), z)
        report.expect("unit", _equal(la.multiply(_basis_vector(z), la.unit), _basis_vector(z)), z)
    if la.delta_defined(0):
        report.expect("Δ(unit) = 0", not la.apply_delta(la.unit), "unit")

    for p in degrees:
        for q in degrees:
            if not la.in_range(p + q):
                continue
            for x, y in cartesian(labels[p], labels[q]):
                report.expect(
                    "graded commutativity", _equal(mul(x, y), mul(y, x), sign(p * q)), f"({x}, {y})"
                )

    for p in degrees:
        for q in degrees:
            for r in degrees:
                if not (la.in_range(p + q) and la.in_range(q + r) and la.in_range(p + q + r)):
                    continue
                for x, y, z in cartesian(labels[p], labels[q], labels[r]):
                    left = la.multiply(mul(x, y), _basis_vector(z))
                    right = la.multiply(_basis_vector(x), mul(y, z))
                    report.expect("associativity", _equal(left, right), f"({x}, {y}, {z})")

    for p in degrees:
        if p + 1 <= la.hi - 1:
            for x in labels[p]:
                report.expect("Δ∘Δ = 0", not la.apply_delta(la.apply_delta(_basis_vector(x))), x)

    for p in degrees:
        for q in degrees:
            if not la.bracket_defined(p, q):
                continue
            for x, y in cartesian(labels[p], labels[q]):
                report.expect(
                    "bracket antisymmetry",
                    _equal(la.bracket[(x, y)], la.bracket[(y, x)], -sign((p - 1) * (q - 1))),
                    f"({x}, {y})",
                )

    for q in degrees:
        if la.bracket_defined(0, q):
            for y in labels[q]:
                report.expect("unit is central for the bracket", not br(la.unit, _basis_vector(y)), y)

    for p in degrees:
        for q in degrees:
            for r in degrees:
                needed = [(q, r), (p, q + r + 1), (p, q), (p + q + 1, r), (p, r), (q, p + r + 1)]
                if all(la.bracket_defined(*pair) for pair in needed):
                    for x, y, z in cartesian(labels[p], labels[q], labels[r]):
                        lhs = br(_basis_vector(x), la.bracket[(y, z)])
                        rhs = br(la.bracket[(x, y)], _basis_vector(z))
                        add_to(rhs, br(_basis_vector(y), la.bracket[(x, z)]), sign((p - 1) * (q - 1)))
                        report.expect("Jacobi identity", _equal(lhs, rhs), f"({x}, {y}, {z})")
                if (
                    la.in_range(q + r)
                    and la.bracket_defined(p, q + r)
                    and la.bracket_defined(p, q)
                    and la.bracket_defined(p, r)
                ):
                    for x, y, z in cartesian(labels[p], labels[q], labels[r]):
                        lhs = br(_basis_vector(x), mul(y, z))
                        rhs = la.multiply(la.bracket[(x, y)], _basis_vector(z))
                        add_to(rhs, la.multiply(_basis_vector(y), la.bracket[(x, z)]), sign((p - 1) * q))
                        report.expect("Poisson rule", _equal(lhs, rhs), f"({x}, {y}, {z})")
    if report.passed:
        logger.info("%s: all %d checks passed", report.title, len(report.checks))
    else:
        logger.warning("%s: %d failures, first %s", report.title, len(report.failures), report.first_failure)
    return report


def transport_class(la: LoopAlgebra, label: str, inverse: Mapping[str, Vector]) -> Cochain:
    """
    Cochain attached to a basis class of ℍ_p.

    The class is the functional α on chains of degree p + m; its cochain is
    w ↦ Σ_{a0} (-1)^{|a0||w|} α(a0[w]) θ^{-1}(a0^∨).
    """
    a = la.model.algebra
    p = la.degree(label)
    n = p + la.dimension
    index = la.basis(p).index(label)
    functional = la.classes[n].projection[index]
    values: Dict[Tuple[str, ...], Vector] = {}
    for word, value in functional.items():
        w = la.hochschild.words[word]
        s = sign(a.degree(w.head) * suspended_degree(a, w.letters))
        target = values.setdefault(w.letters, {})
        add_to(target, inverse.get(w.head, {}), s * value)
    return Cochain(a, -p, values)


def _transported(la: LoopAlgebra, hh: HHAlgebra, report: Report) -> Tuple[Dict[str, Cochain], Dict[str, Vector]]:
    """Cochains of the basis classes and their HH coordinates; non-cocycles are reported"""
    inverse = theta_inverse(la.model)
    cochains: Dict[str, Cochain] = {}
    images: Dict[str, Vector] = {}
    for label in la.space.labels:
        f = transport_class(la, label, inverse)
        cochains[label] = f
        if report.expect("transported class is a cocycle", hh.cochains.coboundary(f).is_zero(), label):
            images[label] = hh.coordinates(f)
    return cochains, images


def _carry(images: Mapping[str, Vector], x: Mapping[str, Fraction]) -> Vector:
    result: Vector = {}
    for z, c in x.items():
        add_to(result, images[z], c)
    return result


def transport_to_hh(
    p: PDModel, N: int, la: Optional[LoopAlgebra] = None, hh: Optional[HHAlgebra] = None
) -> Report:
    """
    Compare the loop product with the cup product on HH^*(A;A).

    Each basis class of ℍ_p is carried to HH^{-p} through θ; the report
    checks that the carried classes are cocycles forming a basis, that the
    unit goes to the unit, and that the product tables agree entrywise.
    """
    la = la or loop_algebra(p, N)
    hh = hh or hh_algebra(p, N - p.dimension)
    report = Report(f"loop product vs cup product for {p.name} through degree {N}")
    _, images = _transported(la, hh, report)
    if not report.passed:
        return report

    for q in la.space.degrees():
        source = la.basis(q)
        target = hh.labels.get(-q, ())
        matrix = [[images[x].get(t, Fraction(0)) for x in source] for t in target]
        report.expect(
            "transport is an isomorphism",
            len(source) == len(target) and (not source or rank(matrix) == len(source)),
            f"degree {q}",
        )

    report.expect(
        "unit maps to the unit cochain",
        _equal(_carry(images, la.unit), hh.coordinates(unit_cochain(p.algebra))),
        "unit",
    )

    for (x, y), value in la.product.items():
        rhs: Vector = {}
        for r, u in images[x].items():
            for s, v in images[y].items():
                add_to(rhs, hh.products[(r, s)], u * v)
        report.expect("loop product matches cup product", _equal(_carry(images, value), rhs), f"({x}, {y})")
    return report


def bracket_transport_report(
    p: PDModel, N: int, la: Optional[LoopAlgebra] = None, hh: Optional[HHAlgebra] = None
) -> Report:
    """
    Compare the BV bracket with the Gerstenhaber bracket on HH^*(A;A).

    With the Koszul conventions of θ and Φ the carried bracket is
    (-1)^{m+1} times the Gerstenhaber bracket of the carried classes.
    """
    la = la or loop_algebra(p, N)
    hh = hh or hh_algebra(p, N - p.dimension)
    m = p.dimension
    convention = sign(m + 1)
    report = Report(f"BV bracket vs Gerstenhaber bracket for {p.name} through degree {N}")
    cochains, images = _transported(la, hh, report)
    if not report.passed:
        return report
    check = f"bracket is (-1)^(m+1) = {convention:+d} times the Gerstenhaber bracket"
    report.ran(check)
    for (x, y), value in la.bracket.items():
        g = gerstenhaber_bracket(cochains[x], cochains[y])
        rhs = {} if g.is_zero() else hh.coordinates(g)
        report.expect(check, _equal(_carry(images, value), rhs, convention), f"({x}, {y})", f"m = {m}")
    return report
