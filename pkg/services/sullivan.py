"""
Sullivan models, the free loop model (⋀V ⊗ ⋀V̄, d̄) and its Hodge splitting.

Monomials are tuples of generator names in the canonical generator order
(degree, then name); even generators may repeat, odd ones may not.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as cartesian
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .cdga import Cdga, PDModel, Violation, ensure_valid, mu_A, validate
from .exactlin import (
    Complex,
    DegreeMap,
    GradedSpace,
    HomologyData,
    Vector,
    add_term,
    add_to,
    betti_numbers,
    homology,
    inverse,
    matmul,
    rank,
    sign,
)
from .exceptions import ChainIdentityError
from .hochschild import HochschildComplex, Word, build_chain_complex, filtration_report, word_label
from .report import Report
from .stringtop import LoopAlgebra, loop_algebra, loop_label, phi, phi_filtration_report

logger = logging.getLogger(__name__)

Monomial = Tuple[str, ...]
Polynomial = Dict[Monomial, Fraction]

BAR = "̄"
FORBIDDEN = frozenset("·*^[]|⊗#" + BAR)


def bar(name: str) -> str:
    """Name of the barred (shifted) copy of a generator"""
    return name + BAR


class FreeAlgebra:
    """Free graded-commutative algebra on named generators"""

    def __init__(self, generators: Iterable[Tuple[str, int]]):
        ordered = sorted(generators, key=lambda g: (g[1], g[0]))
        self.generators: Tuple[Tuple[str, int], ...] = tuple(ordered)
        self.degrees: Dict[str, int] = dict(ordered)
        self.position: Dict[str, int] = {name: i for i, (name, _) in enumerate(ordered)}

    def degree(self, monomial: Monomial) -> int:
        return sum(self.degrees[g] for g in monomial)

    def normalize(self, factors: Sequence[str]) -> Optional[Tuple[int, Monomial]]:
        """Sort factors into canonical order; None when an odd generator repeats"""
        keys = [self.position[g] for g in factors]
        odd = [self.degrees[g] % 2 == 1 for g in factors]
        swaps = 0
        for i in range(len(keys)):
            if not odd[i]:
                continue
            for j in range(i + 1, len(keys)):
                if odd[j] and keys[i] > keys[j]:
                    swaps += 1
        ordered = tuple(sorted(factors, key=lambda g: self.position[g]))
        for x, y in zip(ordered, ordered[1:]):
            if x == y and self.degrees[x] % 2:
                return None
        return sign(swaps), ordered

    def multiply_monomials(self, left: Monomial, right: Monomial) -> Optional[Tuple[int, Monomial]]:
        return self.normalize(left + right)

    def multiply(self, p: Mapping[Monomial, Fraction], q: Mapping[Monomial, Fraction]) -> Polynomial:
        result: Polynomial = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                found = self.multiply_monomials(m1, m2)
                if found is None:
                    continue
                s, mono = found
                total = result.get(mono, 0) + s * c1 * c2
                if total:
                    result[mono] = total
                else:
                    result.pop(mono, None)
        return result

    def polynomial(self, factors: Sequence[str], coeff: object = 1) -> Polynomial:
        found = self.normalize(factors)
        if found is None or not coeff:
            return {}
        s, mono = found
        return {mono: Fraction(coeff) * s}

    def derivation(self, images: Mapping[str, Polynomial], degree: int) -> Callable[[Mapping[Monomial, Fraction]], Polynomial]:
        """Extend generator images to a derivation of the given degree"""

        def apply(p: Mapping[Monomial, Fraction]) -> Polynomial:
            result: Polynomial = {}
            for mono, coeff in p.items():
                before = 0
                for i, g in enumerate(mono):
                    image = images.get(g)
                    if image:
                        term = self.multiply(self.multiply({mono[:i]: Fraction(1)}, image), {mono[i + 1 :]: Fraction(1)})
                        s = sign(degree * before) * coeff
                        for m, c in term.items():
                            total = result.get(m, 0) + s * c
                            if total:
                                result[m] = total
                            else:
                                result.pop(m, None)
                    before += self.degrees[g]
            return result

        return apply

    def monomials(self, degree: int) -> List[Monomial]:
        """All monomials of the given degree, in canonical order"""
        found: List[Monomial] = []

        def walk(index: int, remaining: int, prefix: Monomial) -> None:
            if remaining == 0:
                found.append(prefix)
                return
            if index == len(self.generators):
                return
            name, d = self.generators[index]
            top = 1 if d % 2 else remaining // d
            for exponent in range(0, min(top, remaining // d) + 1):
                walk(index + 1, remaining - exponent * d, prefix + (name,) * exponent)

        if degree >= 0:
            walk(0, degree, ())
        return found

    @staticmethod
    def label(monomial: Monomial) -> str:
        if not monomial:
            return "1"
        parts = []
        i = 0
        while i < len(monomial):
            j = i
            while j < len(monomial) and monomial[j] == monomial[i]:
                j += 1
            parts.append(monomial[i] if j - i == 1 else f"{monomial[i]}^{j - i}")
            i = j
        return "·".join(parts)

    def parse(self, label: str) -> Tuple[int, Monomial]:
        """Monomial label such as "x^2·y" (also "x^2*y" or "x^2 y") to (sign, monomial)"""
        text = label.replace("*", " ").replace("·", " ").strip()
        if text in ("", "1"):
            return 1, ()
        factors: List[str] = []
        for token in text.split():
            name, _, power = token.partition("^")
            if name not in self.degrees:
                raise KeyError(f"unknown generator {name!r} in {label!r}")
            factors.extend([name] * (int(power) if power else 1))
        found = self.normalize(factors)
        if found is None:
            return 0, ()
        return found

    def label_polynomial(self, p: Mapping[Monomial, Fraction]) -> Vector:
        return {self.label(m): c for m, c in p.items() if c}


@dataclass(frozen=True)
class SullivanModel:
    """(⋀V, d) with d given on generators"""

    name: str
    generators: Tuple[Tuple[str, int], ...]
    differential: Mapping[str, Polynomial] = field(default_factory=dict)

    @cached_property
    def algebra(self) -> FreeAlgebra:
        return FreeAlgebra(self.generators)

    @cached_property
    def violations(self) -> List[Violation]:
        return validate(self)

    def d(self, p: Mapping[Monomial, Fraction]) -> Polynomial:
        return self.algebra.derivation(self.differential, 1)(p)


@validate.register
def _(s: SullivanModel) -> List[Violation]:
    found: List[Violation] = []
    names = [name for name, _ in s.generators]
    for name, degree in s.generators:
        if not name or any(ch in FORBIDDEN or ch.isspace() for ch in name) or name == "1":
            found.append(Violation("label-syntax", (name,), "generator names may not contain ·*^[]|⊗# or spaces"))
        if degree < 2:
            found.append(
                Violation("1-connected", (name,), f"1-connected input required: generator {name!r} has degree {degree}")
            )
    if len(set(names)) != len(names):
        found.append(Violation("unique-generators", tuple(sorted({n for n in names if names.count(n) > 1})), ""))
    if found:
        return found
    degrees = dict(s.generators)
    for name, poly in s.differential.items():
        if name not in degrees:
            found.append(Violation("unknown-label", (name,), "differential of an unknown generator"))
            continue
        for mono, coeff in poly.items():
            unknown = [g for g in mono if g not in degrees]
            if unknown:
                found.append(Violation("unknown-label", (name,), f"d({name}) mentions {unknown[0]!r}"))
                break
            if coeff and sum(degrees[g] for g in mono) != degrees[name] + 1:
                found.append(Violation("differential-degree", (name,), f"d({name}) must have degree {degrees[name] + 1}"))
                break
    if found:
        return found
    for name, _ in s.algebra.generators:
        if s.d(s.d({(name,): Fraction(1)})):
            found.append(Violation("d∘d = 0", (name,), f"d(d({name})) ≠ 0"))
    return found


def polynomial_from_labels(algebra: FreeAlgebra, terms: Mapping[str, Fraction]) -> Polynomial:
    result: Polynomial = {}
    for label, coeff in terms.items():
        s, mono = algebra.parse(label)
        if s:
            total = result.get(mono, 0) + s * Fraction(coeff)
            if total:
                result[mono] = total
            else:
                result.pop(mono, None)
    return result


@dataclass(frozen=True)
class FreeLoopSullivanModel:
    """(⋀V ⊗ ⋀V̄, d̄) through degree N + 1 with the derivation S"""

    base: SullivanModel
    truncation: int
    algebra: FreeAlgebra = field(compare=False)
    complex: Complex = field(compare=False)
    monomials: Mapping[str, Monomial] = field(default_factory=dict, compare=False)
    weights: Mapping[str, int] = field(default_factory=dict, compare=False)
    s_images: Mapping[str, Polynomial] = field(default_factory=dict, compare=False)
    dbar_images: Mapping[str, Polynomial] = field(default_factory=dict, compare=False)

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    @property
    def dbar(self) -> DegreeMap:
        return self.complex.differential

    def weight(self, label: str) -> int:
        return self.weights[label]

    def to_vector(self, p: Mapping[Monomial, Fraction]) -> Vector:
        return self.algebra.label_polynomial(p)

    def to_polynomial(self, vec: Mapping[str, Fraction]) -> Polynomial:
        return {self.monomials[label]: c for label, c in vec.items()}

    def apply_s(self, p: Mapping[Monomial, Fraction]) -> Polynomial:
        return self.algebra.derivation(self.s_images, -1)(p)

    def apply_dbar(self, p: Mapping[Monomial, Fraction]) -> Polynomial:
        return self.algebra.derivation(self.dbar_images, 1)(p)

    @cached_property
    def s_map(self) -> DegreeMap:
        return s_operator(self)


def build_free_loop_model(s: SullivanModel, N: int) -> FreeLoopSullivanModel:
    """
    Monomial bases of ⋀V ⊗ ⋀V̄ through degree N + 1 and d̄ through degree N.

    d̄(v) = dv and d̄(v̄) = -S(dv); d̄∘d̄ = 0 is checked on construction.

    Raises:
        ModelValidationError: d∘d ≠ 0 on a generator (witness included)
    """
    ensure_valid(s)
    generators = list(s.generators) + [(bar(name), degree - 1) for name, degree in s.generators]
    algebra = FreeAlgebra(generators)
    s_images: Dict[str, Polynomial] = {name: {(bar(name),): Fraction(1)} for name, _ in s.generators}
    S = algebra.derivation(s_images, -1)
    dbar_images: Dict[str, Polynomial] = {}
    for name, _ in s.generators:
        image: Polynomial = {}
        for mono, coeff in s.differential.get(name, {}).items():
            for m, c in algebra.polynomial(mono, coeff).items():
                image[m] = image.get(m, 0) + c
        image = {m: c for m, c in image.items() if c}
        dbar_images[name] = image
        dbar_images[bar(name)] = {m: -c for m, c in S(image).items()}

    monomials: Dict[str, Monomial] = {}
    weights: Dict[str, int] = {}
    bases: Dict[int, List[str]] = {}
    barred = {bar(name) for name, _ in s.generators}
    for n in range(0, N + 2):
        found = []
        for mono in algebra.monomials(n):
            weight = sum(1 for g in mono if g in barred)
            found.append((weight, tuple(algebra.position[g] for g in mono), mono))
        found.sort()
        labels = []
        for weight, _, mono in found:
            label = algebra.label(mono)
            monomials[label] = mono
            weights[label] = weight
            labels.append(label)
        bases[n] = labels
    space = GradedSpace(bases, lo=0, hi=N + 1)
    D = algebra.derivation(dbar_images, 1)
    dbar = DegreeMap.from_function(
        space, space, 1, lambda label: algebra.label_polynomial(D({monomials[label]: Fraction(1)})), range(0, N + 1)
    )
    complex_ = Complex(space, dbar, (0, N))
    logger.info("built free loop model of %s through degree %d (%d monomials)", s.name, N, len(monomials))
    return FreeLoopSullivanModel(s, N, algebra, complex_, monomials, weights, s_images, dbar_images)


def s_operator(f: FreeLoopSullivanModel) -> DegreeMap:
    """
    The degree -1 derivation S with S(v) = v̄ and S(v̄) = 0.

    S∘S = 0 and S d̄ + d̄ S = 0 are checked on the stored range.
    """
    columns = {
        n: {
            label: f.to_vector(f.apply_s({f.monomials[label]: Fraction(1)}))
            for label in f.space.basis(n)
        }
        for n in range(0, f.truncation + 2)
    }
    s_map = DegreeMap(f.space, f.space, -1, columns)
    witness = (s_map @ s_map).nonzero_witness()
    if witness is not None:
        raise ChainIdentityError("S∘S = 0", witness)
    witness = (s_map @ f.dbar).mismatch(f.dbar @ s_map, -1)
    if witness is not None:
        raise ChainIdentityError("S d̄ + d̄ S = 0", witness)
    return s_map


@dataclass(frozen=True)
class HodgeTable:
    """dim H^n(G^p) for n ≤ N, with the homology of the whole model for comparison"""

    max_degree: int
    dims: Mapping[Tuple[int, int], int]
    totals: Mapping[int, int]
    classes: Mapping[Tuple[int, int], HomologyData] = field(default_factory=dict, compare=False)
    weight_complexes: Mapping[int, Complex] = field(default_factory=dict, compare=False)

    @property
    def weights(self) -> List[int]:
        return sorted({p for _, p in self.dims})

    def dim(self, n: int, p: int) -> int:
        return self.dims.get((n, p), 0)

    def row(self, n: int) -> Dict[int, int]:
        return {p: self.dim(n, p) for p in self.weights}

    def row_sums(self) -> Dict[int, int]:
        return {n: sum(self.row(n).values()) for n in range(0, self.max_degree + 1)}

    @property
    def consistent(self) -> bool:
        return self.row_sums() == dict(self.totals)


def hodge_table(f: FreeLoopSullivanModel, N: Optional[int] = None) -> HodgeTable:
    """
    Homology of each weight piece G^p = ⋀V ⊗ ⋀^p V̄.

    Raises:
        ChainIdentityError: d̄ does not preserve the weight of some monomial
    """
    N = f.truncation if N is None else min(N, f.truncation)
    weights = sorted(set(f.weights.values()))
    dims: Dict[Tuple[int, int], int] = {}
    classes: Dict[Tuple[int, int], HomologyData] = {}
    pieces: Dict[int, Complex] = {}
    for p in weights:
        bases = {n: [l for l in f.space.basis(n) if f.weights[l] == p] for n in f.space.degrees()}
        space = GradedSpace(bases, lo=0, hi=f.truncation + 1)
        columns = {}
        for n in range(0, f.truncation + 1):
            block = {}
            for label in bases[n]:
                image = f.dbar.image(label)
                for t in image:
                    if f.weights[t] != p:
                        raise ChainIdentityError("d̄ preserves Hodge weight", label)
                block[label] = image
            columns[n] = block
        piece = Complex(space, DegreeMap(space, space, 1, columns), (0, f.truncation))
        pieces[p] = piece
        for n in range(0, N + 1):
            data = homology(piece, n)
            classes[(n, p)] = data
            if data.dimension:
                dims[(n, p)] = data.dimension
    totals = betti_numbers(f.complex, range(0, N + 1))
    return HodgeTable(N, dims, totals, classes, pieces)


def truncated_algebra(s: SullivanModel, bound: int) -> Tuple[Cdga, Dict[str, Monomial]]:
    """⋀V with everything above ``bound`` set to zero, as a finite CDGA"""
    algebra = s.algebra
    monomials: Dict[str, Monomial] = {}
    bases: Dict[int, List[str]] = {}
    for n in range(0, bound + 1):
        labels = []
        for mono in algebra.monomials(n):
            label = algebra.label(mono)
            monomials[label] = mono
            labels.append(label)
        bases[n] = labels
    space = GradedSpace(bases, lo=0, hi=bound)
    product: Dict[Tuple[str, str], Vector] = {}
    d_table: Dict[str, Vector] = {}
    for a, ma in monomials.items():
        if not ma:
            continue
        for b, mb in monomials.items():
            if not mb or algebra.degree(ma) + algebra.degree(mb) > bound:
                continue
            value = algebra.label_polynomial(algebra.multiply({ma: Fraction(1)}, {mb: Fraction(1)}))
            if value:
                product[(a, b)] = value
        if algebra.degree(ma) < bound:
            value = algebra.label_polynomial(s.d({ma: Fraction(1)}))
            if value:
                d_table[a] = value
    return Cdga(space, "1", product, d_table, f"{s.name}≤{bound}"), monomials


def _comparison(s: SullivanModel, N: int, free: FreeLoopSullivanModel) -> Tuple[DegreeMap, HochschildComplex]:
    ensure_valid(s)
    truncated, monomials = truncated_algebra(s, N + 2)
    h = build_chain_complex(truncated, N)
    columns: Dict[int, Dict[str, Vector]] = {}
    for n in range(0, N + 2):
        block = {}
        for label in h.space.basis(n):
            w = h.words[label]
            value: Polynomial = {monomials[w.head]: Fraction(1)}
            for letter in w.letters:
                value = free.algebra.multiply(value, free.apply_s({monomials[letter]: Fraction(1)}))
            coeff = Fraction(1, factorial(len(w.letters)))
            block[label] = {k: v * coeff for k, v in free.to_vector(value).items()}
        columns[n] = block
    fmap = DegreeMap(h.space, free.space, 0, columns)
    witness = (fmap @ h.boundary).mismatch(free.dbar @ fmap)
    if witness is not None:
        raise ChainIdentityError("f∘∂ = d̄∘f", witness)
    witness = (fmap @ h.connes).mismatch(free.s_map @ fmap)
    if witness is not None:
        raise ChainIdentityError("f∘B = S∘f", witness)
    return fmap, h


def f_map(s: SullivanModel, N: int, free: Optional[FreeLoopSullivanModel] = None) -> DegreeMap:
    """
    f(a[a1|...|an]) = (1/n!) a S(a1)...S(an) from Hochschild chains of ⋀V^{≤N+2}.

    f∘∂ = d̄∘f and f∘B = S∘f are checked on the stored range.
    """
    fmap, _ = _comparison(s, N, free or build_free_loop_model(s, N))
    return fmap


def f_map_report(s: SullivanModel, N: int, report: Optional[Report] = None) -> Report:
    """Chain identities of f and bijectivity of H(f) in degrees ≤ N - 1"""
    report = report or Report(f"comparison map f for {s.name} through degree {N}")
    free = build_free_loop_model(s, N)
    try:
        fmap, h = _comparison(s, N, free)
    except ChainIdentityError as exc:
        report.fail(exc.identity, exc.witness, exc.detail)
        return report
    report.ran("f∘∂ = d̄∘f")
    report.ran("f∘B = S∘f")
    for n in range(0, N):
        source = h.homology(n)
        target = homology(free.complex, n)
        matrix = [target.coordinates(fmap.apply(rep)) for rep in source.representatives]
        ok = source.dimension == target.dimension and (
            source.dimension == 0 or rank(matrix) == source.dimension
        )
        report.expect("H(f) is an isomorphism", ok, f"degree {n}", f"{source.dimension} vs {target.dimension}")
    return report


def hodge_shift_report(f: FreeLoopSullivanModel, N: Optional[int] = None, pd: Optional[PDModel] = None) -> Report:
    """
    Weight shift of S and the word-length avatars on the Hochschild side.

    (i) S(G^p) ⊆ G^(p+1) on monomials; (ii) S sends classes of H^n_[p] to
    cycles of G^(p+1); (iii) with a PD model, ∂ and B and Φ respect word
    length as required.
    """
    N = f.truncation if N is None else min(N, f.truncation)
    report = Report(f"Hodge weight shift for {f.base.name} through degree {N}")
    s_map = f.s_map
    for n in range(0, N + 2):
        for label in f.space.basis(n):
            p = f.weights[label]
            report.expect(
                "S raises Hodge weight by one", all(f.weights[t] == p + 1 for t in s_map.image(label)), label
            )
    table = hodge_table(f, N)
    for (n, p), data in table.classes.items():
        if n == 0:
            continue
        for i, rep in enumerate(data.representatives):
            image = s_map.apply(rep)
            witness = f"H^{n}_[{p}]#{i}"
            report.expect("induced S lands in weight p + 1", all(f.weights[t] == p + 1 for t in image), witness)
            report.expect("induced S sends cycles to cycles", not f.dbar.apply(image), witness)
    if pd is not None:
        h = build_chain_complex(pd, N)
        filtration_report(h, report)
        phi_filtration_report(phi(h, mu_A(pd)), report)
    return report


def formality_images(
    s: SullivanModel, pd: PDModel, bound: int, assignments: Optional[Mapping[str, str]] = None
) -> Tuple[Cdga, Dict[str, Vector]]:
    """
    ψ: ⋀V^{≤bound} → A sending each generator to a basis element of A or to 0.

    ``assignments`` names the image of each generator; without it a
    generator goes to the basis element with its own name and degree.

    Raises:
        ChainIdentityError: ψ does not commute with the differentials
    """
    a = pd.algebra
    if assignments is None:
        assignments = {g: g for g, k in s.generators if g in a.space and a.degree(g) == k}
    truncated, monomials = truncated_algebra(s, bound)
    images: Dict[str, Vector] = {}
    for label, mono in monomials.items():
        value: Vector = {a.unit: Fraction(1)}
        for g in mono:
            target = assignments.get(g)
            value = a.multiply(value, {target: Fraction(1)}) if target is not None else {}
        images[label] = value
    for label in monomials:
        diff = a.d(images[label])
        for t, c in truncated.d_basis(label).items():
            add_to(diff, images[t], -c)
        if diff:
            raise ChainIdentityError("ψ∘d = d∘ψ", label)
    return truncated, images


def _word_image(images: Mapping[str, Vector], w: Word) -> Vector:
    """ψ(a0)[ψ(a1)|...|ψ(ak)] expanded on basis words"""
    result: Vector = {}
    factors = [images[w.head]] + [images[x] for x in w.letters]
    for terms in cartesian(*(list(f.items()) for f in factors)):
        coeff = Fraction(1)
        for _, c in terms:
            coeff *= c
        add_term(result, word_label(terms[0][0], [k for k, _ in terms[1:]]), coeff)
    return result


def product_filtration_report(
    pd: PDModel,
    s: SullivanModel,
    N: int,
    assignments: Optional[Mapping[str, str]] = None,
    la: Optional[LoopAlgebra] = None,
) -> Report:
    """
    Hodge weights of loop products: ℍ^[r] • ℍ^[s] ⊆ ℍ^[≤ r+s].

    A class of HH_n(A) gets its weights by pulling it back along ψ and
    pushing it through f into the weight pieces of the free loop model.
    Loop classes dual to a weight-adapted basis are then multiplied and
    their products decomposed the same way, in degrees n ≤ N - 1.
    """
    report = Report(f"loop product vs Hodge weights for {pd.name} through degree {N}")
    m = pd.dimension
    la = la or loop_algebra(pd, N)
    free = build_free_loop_model(s, N)
    table = hodge_table(free, N)
    fmap, h = _comparison(s, N, free)
    _, images = formality_images(s, pd, N + 2, assignments)
    report.ran("ψ∘d = d∘ψ")

    # per degree: weight of each adapted coordinate, HH_n(A) → adapted coordinates, and back
    weights: Dict[int, List[int]] = {}
    forward: Dict[int, List[List[Fraction]]] = {}
    backward: Dict[int, List[List[Fraction]]] = {}
    for n in range(0, N):
        source = h.homology(n)
        target = la.classes[n]
        pieces = [(p, table.classes[(n, p)]) for p in sorted({p for q, p in table.classes if q == n})]
        weights[n] = [p for p, data in pieces for _ in range(data.dimension)]
        if not source.dimension and not target.dimension:
            continue
        psi = [[Fraction(0)] * source.dimension for _ in range(target.dimension)]
        adapted = [[Fraction(0)] * source.dimension for _ in weights[n]]
        for i, rep in enumerate(source.representatives):
            image: Vector = {}
            for label, c in rep.items():
                add_to(image, _word_image(images, h.words[label]), c)
            for j, value in enumerate(target.coordinates(image)):
                psi[j][i] = value
            pushed = fmap.apply(rep)
            row = 0
            for p, data in pieces:
                component = {k: v for k, v in pushed.items() if free.weights[k] == p}
                for value in data.coordinates(component):
                    adapted[row][i] = value
                    row += 1
        ok = source.dimension == target.dimension == len(weights[n]) and rank(psi) == source.dimension
        if not report.expect("ψ is a quasi-isomorphism", ok, f"degree {n}"):
            return report
        forward[n] = matmul(adapted, inverse(psi))
        backward[n] = inverse(forward[n])

    def loop_class(n: int, t: int) -> Vector:
        return {loop_label(n - m, j): value for j, value in enumerate(forward[n][t]) if value}

    def adapted_coordinates(n: int, x: Mapping[str, Fraction]) -> List[Fraction]:
        row = [x.get(loop_label(n - m, j), Fraction(0)) for j in range(len(backward[n]))]
        return [sum((row[j] * backward[n][j][t] for j in range(len(row))), Fraction(0)) for t in range(len(row))]

    check = "product weight is at most the sum of the weights"
    report.ran(check)
    for n1 in forward:
        for n2 in forward:
            n3 = n1 + n2 - m
            if n3 not in forward:
                continue
            for t1, r in enumerate(weights[n1]):
                for t2, q in enumerate(weights[n2]):
                    value = la.multiply(loop_class(n1, t1), loop_class(n2, t2))
                    coords = adapted_coordinates(n3, value)
                    above = [weights[n3][t] for t, c in enumerate(coords) if c and weights[n3][t] > r + q]
                    report.expect(
                        check,
                        not above,
                        f"(H_{n1}[{r}]#{t1}, H_{n2}[{q}]#{t2})",
                        f"weights {sorted(set(above))} above {r + q}",
                    )
    return report
