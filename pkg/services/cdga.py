"""
Finite-dimensional CDGAs with Poincaré duality.

Provides validation, the duality map θ(a) = ∫(a·−), the diagonal
bimodule map μ_A and tensor products of models.
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, singledispatch
from typing import Dict, List, Mapping, Optional, Tuple

from .exactlin import (
    Complex,
    DegreeMap,
    GradedSpace,
    Vector,
    add_to,
    add_term,
    betti_numbers,
    dual_map,
    rank,
    sign,
    solve,
)
from .exceptions import ChainIdentityError, InconsistentModelError, ModelValidationError, NotPoincareDualityError

logger = logging.getLogger(__name__)

RESERVED_CHARACTERS = frozenset("[]|⊗#")
TENSOR = "⊗"


@dataclass(frozen=True)
class Violation:
    """A violated axiom with the basis tuple that witnesses it"""

    axiom: str
    witness: Tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.axiom} violated at ({', '.join(self.witness)})"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True)
class Cdga:
    """
    Commutative DGA given by structure constants.

    ``product`` holds μ(a, b) for non-unit pairs (missing entries are zero);
    ``d_table`` holds d(a) for basis elements with a nonzero differential.
    """

    space: GradedSpace
    unit: str
    product: Mapping[Tuple[str, str], Vector] = field(default_factory=dict)
    d_table: Mapping[str, Vector] = field(default_factory=dict)
    name: str = "A"

    def degree(self, label: str) -> int:
        return self.space.degree_of(label)

    @property
    def top(self) -> int:
        return self.space.hi

    @cached_property
    def reduced_basis(self) -> Tuple[str, ...]:
        """Basis of the positive-degree part, in canonical order"""
        return tuple(label for label in self.space.labels if self.space.degree_of(label) > 0)

    def mul_basis(self, a: str, b: str) -> Vector:
        if a == self.unit:
            return {b: Fraction(1)}
        if b == self.unit:
            return {a: Fraction(1)}
        return self.product.get((a, b), {})

    def multiply(self, u: Mapping[str, Fraction], v: Mapping[str, Fraction]) -> Vector:
        result: Vector = {}
        for a, x in u.items():
            for b, y in v.items():
                add_to(result, self.mul_basis(a, b), x * y)
        return result

    def d_basis(self, a: str) -> Vector:
        return self.d_table.get(a, {})

    def d(self, u: Mapping[str, Fraction]) -> Vector:
        result: Vector = {}
        for a, x in u.items():
            add_to(result, self.d_basis(a), x)
        return result

    @property
    def has_differential(self) -> bool:
        return any(self.d_table.values())

    @cached_property
    def differential(self) -> DegreeMap:
        return DegreeMap.from_function(
            self.space, self.space, 1, self.d_basis, self.space.degrees()
        )

    @cached_property
    def complex(self) -> Complex:
        return Complex(self.space, self.differential)


@dataclass(frozen=True)
class PDModel:
    """Poincaré duality model: a CDGA with an orientation on its top degree"""

    algebra: Cdga
    dimension: int
    orientation: Mapping[str, Fraction] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.algebra.name

    def integrate(self, u: Mapping[str, Fraction]) -> Fraction:
        return sum((x * self.orientation.get(a, 0) for a, x in u.items()), Fraction(0))

    def pairing(self, a: str, b: str) -> Fraction:
        return self.integrate(self.algebra.mul_basis(a, b))

    @cached_property
    def violations(self) -> List[Violation]:
        return validate(self)


def _structure_violations(c: Cdga) -> List[Violation]:
    found: List[Violation] = []
    for label in c.space.labels:
        if not label or any(ch in RESERVED_CHARACTERS or ch.isspace() for ch in label):
            found.append(Violation("label-syntax", (label,), "labels may not contain []|⊗# or spaces"))
    for n in c.space.bases:
        if n < 0:
            found.append(Violation("nonnegative-degrees", c.space.basis(n), f"degree {n} is negative"))
    if c.unit not in c.space or c.space.degree_of(c.unit) != 0:
        found.append(Violation("connectedness", (c.unit,), "the unit must be a basis element of degree 0"))
    elif c.space.basis(0) != (c.unit,):
        found.append(Violation("connectedness", c.space.basis(0), "degree 0 must be spanned by the unit"))
    for label in c.space.basis(1):
        found.append(
            Violation("1-connected", (label,), f"1-connected input required: {label!r} has degree 1")
        )
    for (a, b), value in c.product.items():
        unknown = [x for x in (a, b, *value) if x not in c.space]
        if unknown:
            found.append(Violation("unknown-label", (a, b), f"product mentions {unknown[0]!r}"))
            continue
        expected = c.degree(a) + c.degree(b)
        for t in value:
            if value[t] and c.degree(t) != expected:
                found.append(
                    Violation(
                        "product-degree",
                        (a, b),
                        f"{a}·{b} has a component {t!r} of degree {c.degree(t)}, expected {expected}",
                    )
                )
                break
    for a, value in c.d_table.items():
        unknown = [x for x in (a, *value) if x not in c.space]
        if unknown:
            found.append(Violation("unknown-label", (a,), f"differential mentions {unknown[0]!r}"))
            continue
        for t in value:
            if value[t] and c.degree(t) != c.degree(a) + 1:
                found.append(
                    Violation("differential-degree", (a,), f"d({a}) has a component {t!r} of wrong degree")
                )
                break
    return found


def _algebra_violations(c: Cdga) -> List[Violation]:
    found: List[Violation] = []
    labels = c.space.labels
    positive = c.reduced_basis

    for (a, b), value in c.product.items():
        if c.unit in (a, b):
            expected = {b: Fraction(1)} if a == c.unit else {a: Fraction(1)}
            if {k: v for k, v in value.items() if v} != expected:
                found.append(Violation("unit", (a, b), "the unit must act as the identity"))

    for i, a in enumerate(positive):
        for b in positive[i:]:
            ab = c.mul_basis(a, b)
            ba = c.mul_basis(b, a)
            diff = dict(ab)
            add_to(diff, ba, -sign(c.degree(a) * c.degree(b)))
            if diff:
                found.append(Violation("graded-commutativity", (a, b), f"{a}·{b} ≠ ±{b}·{a}"))

    for a in positive:
        for b in positive:
            if c.degree(a) + c.degree(b) > c.top:
                continue
            ab = c.mul_basis(a, b)
            for x in positive:
                if c.degree(a) + c.degree(b) + c.degree(x) > c.top:
                    continue
                left = c.multiply(ab, {x: Fraction(1)})
                right = c.multiply({a: Fraction(1)}, c.mul_basis(b, x))
                add_to(left, right, -1)
                if left:
                    found.append(Violation("associativity", (a, b, x), "(ab)c ≠ a(bc)"))

    for a in labels:
        for b in labels:
            left = c.d(c.mul_basis(a, b))
            add_to(left, c.multiply(c.d_basis(a), {b: Fraction(1)}), -1)
            add_to(left, c.multiply({a: Fraction(1)}, c.d_basis(b)), -sign(c.degree(a)))
            if left:
                found.append(Violation("leibniz", (a, b), "d(ab) ≠ d(a)b ± a d(b)"))

    for a in labels:
        if c.d(c.d_basis(a)):
            found.append(Violation("d∘d = 0", (a,), f"d(d({a})) ≠ 0"))
    return found


@singledispatch
def validate(model) -> List[Violation]:
    """
    Every violated axiom of a model, with witnesses.

    Violations are data: an empty list means the model is valid.
    """
    raise TypeError(f"cannot validate {type(model).__name__}")


@validate.register
def _(c: Cdga) -> List[Violation]:
    structural = _structure_violations(c)
    if structural:
        return structural
    return _algebra_violations(c)


@validate.register
def _(p: PDModel) -> List[Violation]:
    found = validate(p.algebra)
    if found and any(v.axiom in {"unknown-label", "label-syntax", "connectedness"} for v in found):
        return found
    a = p.algebra
    m = p.dimension
    if a.top > m:
        found.append(
            Violation("top-degree", a.space.basis(a.top), f"algebra is nonzero above dimension {m}")
        )
    for label, value in p.orientation.items():
        if label not in a.space or a.degree(label) != m:
            found.append(Violation("orientation-degree", (label,), f"orientation lives on degree {m}"))
    for label in a.space.basis(m - 1):
        if p.integrate(a.d_basis(label)):
            found.append(Violation("orientation-closed", (label,), f"∫d({label}) ≠ 0"))
    for k in range(0, m + 1):
        left = a.space.basis(k)
        right = a.space.basis(m - k)
        if len(left) != len(right):
            found.append(
                Violation("poincare-duality", (str(k),), f"dim A^{k} = {len(left)} but dim A^{m - k} = {len(right)}")
            )
            continue
        if not left:
            continue
        gram = [[p.pairing(x, y) for y in right] for x in left]
        if rank(gram) != len(left):
            found.append(Violation("poincare-duality", (str(k),), f"pairing A^{k} ⊗ A^{m - k} is degenerate"))
    return found


def ensure_valid(model) -> None:
    """Raise unless the model passes validation"""
    violations = model.violations if isinstance(model, PDModel) else validate(model)
    if not violations:
        return
    first = violations[0]
    if first.axiom == "poincare-duality":
        raise NotPoincareDualityError(int(first.witness[0]), violations)
    raise ModelValidationError(violations)


def pair_label(a: str, b: str) -> str:
    return f"{a}{TENSOR}{b}"


def split_pair(label: str) -> Tuple[str, str]:
    a, b = label.split(TENSOR, 1)
    return a, b


def tensor_square_space(space: GradedSpace) -> GradedSpace:
    bases: Dict[int, List[str]] = {}
    for n in range(2 * space.lo, 2 * space.hi + 1):
        labels = []
        for i in space.degrees():
            for a in space.basis(i):
                for b in space.basis(n - i):
                    labels.append(pair_label(a, b))
        bases[n] = labels
    return GradedSpace(bases, lo=2 * space.lo, hi=2 * space.hi)


def tensor_differential(a: Cdga, vec: Mapping[str, Fraction]) -> Vector:
    """(d⊗1 + 1⊗d) on A⊗A with the Koszul sign on the second factor"""
    result: Vector = {}
    for label, coeff in vec.items():
        x, y = split_pair(label)
        for t, value in a.d_basis(x).items():
            add_term(result, pair_label(t, y), coeff * value)
        s = sign(a.degree(x))
        for t, value in a.d_basis(y).items():
            add_term(result, pair_label(x, t), s * coeff * value)
    return result


def theta(p: PDModel) -> DegreeMap:
    """
    θ: A → A^∨ of degree -m, θ(a) = ∫(a·−).

    Raises:
        NotPoincareDualityError: the pairing is degenerate in some degree
    """
    ensure_valid(p)
    a = p.algebra
    m = p.dimension
    dual = a.space.dual_space()
    columns = {}
    for k in a.space.degrees():
        block = {}
        for x in a.space.basis(k):
            block[x] = {y: p.pairing(x, y) for y in a.space.basis(m - k) if p.pairing(x, y)}
        columns[k] = block
    result = DegreeMap(a.space, dual, -m, columns)
    for k in a.space.degrees():
        if a.space.dim(k) and rank(result.block(k)) != a.space.dim(k):
            raise NotPoincareDualityError(k)
    if a.has_differential:
        # θ∘d = (-1)^m d_{A^∨}∘θ with d_{A^∨} = -d^∨
        dual_d = dual_map(a.differential).scaled(-1)
        witness = (result @ a.differential).mismatch(dual_d @ result, sign(m))
        if witness is not None:
            raise ChainIdentityError("θ is a chain map", witness)
    return result


def theta_inverse(p: PDModel) -> Dict[str, Vector]:
    """θ^{-1} on the dual basis: functional label b^∨ ↦ element of A^{m-|b|}"""
    a = p.algebra
    m = p.dimension
    inverse: Dict[str, Vector] = {}
    for k in a.space.degrees():
        sources = a.space.basis(m - k)
        targets = a.space.basis(k)
        if not sources:
            continue
        # θ(x) for x ∈ A^{m-k} is a functional on A^k; invert that block
        matrix = [[p.pairing(x, b) for x in sources] for b in targets]
        for j, b in enumerate(targets):
            rhs = [Fraction(1) if i == j else Fraction(0) for i in range(len(targets))]
            coeffs = solve(matrix, rhs)
            if coeffs is None:
                raise NotPoincareDualityError(k)
            inverse[b] = {x: c for x, c in zip(sources, coeffs) if c}
    return inverse


def mu_A(p: PDModel) -> DegreeMap:
    """
    The diagonal bimodule map μ_A: A → A⊗A of degree m.

    Solved per degree from (θ⊗θ)∘μ_A = μ^∨∘θ, i.e. for μ_A(a) = Σ a'⊗a'':
    Σ (-1)^{m|a'| + (|a''|+m)|b|} ∫(a'b)∫(a''c) = ∫(abc) for all b, c.
    """
    ensure_valid(p)
    a = p.algebra
    m = p.dimension
    target = tensor_square_space(a.space)
    columns: Dict[int, Dict[str, Vector]] = {}
    for k in a.space.degrees():
        sources = a.space.basis(k)
        if not sources:
            columns[k] = {}
            continue
        unknowns = [split_pair(t) for t in target.basis(k + m)]
        equations = [split_pair(t) for t in target.basis(m - k)]
        matrix = []
        for b, c in equations:
            row = []
            for x, y in unknowns:
                value = p.pairing(x, b) * p.pairing(y, c)
                if value:
                    value *= sign(m * a.degree(x) + (a.degree(y) + m) * a.degree(b))
                row.append(value)
            matrix.append(row)
        block = {}
        for x in sources:
            rhs = [p.integrate(a.multiply(a.mul_basis(x, b), {c: Fraction(1)})) for b, c in equations]
            coeffs = solve(matrix, rhs) if matrix else []
            if coeffs is None:
                raise InconsistentModelError(f"μ_A cannot be solved for {x!r} in {p.name}")
            block[x] = {pair_label(u, v): coeff for (u, v), coeff in zip(unknowns, coeffs) if coeff}
        columns[k] = block
    result = DegreeMap(a.space, target, m, columns)
    _check_mu(p, result)
    logger.info("solved μ_A for %s (dimension %d)", p.name, m)
    return result


def _act(a: Cdga, left: str, vec: Mapping[str, Fraction], right: str) -> Vector:
    """left·(u⊗v)·right = (left u)⊗(v right)"""
    result: Vector = {}
    for label, coeff in vec.items():
        u, v = split_pair(label)
        for s, x in a.mul_basis(left, u).items():
            for t, y in a.mul_basis(v, right).items():
                add_term(result, pair_label(s, t), coeff * x * y)
    return result


def _check_mu(p: PDModel, mu: DegreeMap) -> None:
    a = p.algebra
    m = p.dimension
    labels = a.space.labels
    for left in labels:
        for x in labels:
            lx = a.mul_basis(left, x)
            for right in labels:
                lhs = mu.apply(a.multiply(lx, {right: Fraction(1)}))
                rhs = _act(a, left, mu.image(x), right)
                add_to(lhs, rhs, -sign(m * a.degree(left)))
                if lhs:
                    raise ChainIdentityError("μ_A bimodule identity", f"({left}, {x}, {right})")
    if a.has_differential:
        for x in labels:
            lhs = tensor_differential(a, mu.image(x))
            add_to(lhs, mu.apply(a.d_basis(x)), -sign(m))
            if lhs:
                raise ChainIdentityError("μ_A is a chain map", x)


def multiplication(a: Cdga, vec: Mapping[str, Fraction]) -> Vector:
    """μ: A⊗A → A applied to a tensor vector"""
    result: Vector = {}
    for label, coeff in vec.items():
        u, v = split_pair(label)
        add_to(result, a.mul_basis(u, v), coeff)
    return result


def _combine(p: Cdga, q: Cdga, x: str, y: str) -> str:
    if x == p.unit:
        return q.unit if y == q.unit else y
    if y == q.unit:
        return x
    return f"{x}·{y}"


def tensor(p: PDModel, q: PDModel, name: Optional[str] = None) -> PDModel:
    """
    Tensor product of two PD models.

    (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb' and ∫(a⊗b) = ∫a·∫b.
    """
    ensure_valid(p)
    ensure_valid(q)
    a, b = p.algebra, q.algebra
    shared = (set(a.space.labels) & set(b.space.labels)) - {a.unit}
    if shared or a.unit != b.unit:
        raise ValueError(f"tensor factors must use distinct labels and a common unit (shared: {sorted(shared)})")

    pieces: Dict[str, Tuple[str, str]] = {}
    bases: Dict[int, List[str]] = {}
    for n in range(0, a.top + b.top + 1):
        labels = []
        for i in a.space.degrees():
            for x in a.space.basis(i):
                for y in b.space.basis(n - i):
                    label = _combine(a, b, x, y)
                    pieces[label] = (x, y)
                    labels.append(label)
        bases[n] = labels
    space = GradedSpace(bases, lo=0, hi=a.top + b.top)
    combined = {v: k for k, v in pieces.items()}

    def join(u: Mapping[str, Fraction], v: Mapping[str, Fraction], coeff: Fraction) -> Vector:
        out: Vector = {}
        for s, x in u.items():
            for t, y in v.items():
                add_term(out, combined[(s, t)], coeff * x * y)
        return out

    product: Dict[Tuple[str, str], Vector] = {}
    for left, (x, y) in pieces.items():
        for right, (x2, y2) in pieces.items():
            if a.unit in (left, right):
                continue
            value = join(a.mul_basis(x, x2), b.mul_basis(y, y2), Fraction(sign(b.degree(y) * a.degree(x2))))
            if value:
                product[(left, right)] = value

    d_table: Dict[str, Vector] = {}
    for label, (x, y) in pieces.items():
        value = join(a.d_basis(x), {y: Fraction(1)}, Fraction(1))
        add_to(value, join({x: Fraction(1)}, b.d_basis(y), Fraction(sign(a.degree(x)))))
        if value:
            d_table[label] = value

    orientation = {}
    for x, u in p.orientation.items():
        for y, v in q.orientation.items():
            if u * v:
                orientation[combined[(x, y)]] = u * v
    algebra = Cdga(space, a.unit, product, d_table, name or f"{a.name}x{b.name}")
    return PDModel(algebra, p.dimension + q.dimension, orientation)


def flip_orientation(p: PDModel) -> PDModel:
    """The same model with ∫ replaced by -∫"""
    return replace(p, orientation={label: -value for label, value in p.orientation.items()})


def cohomology_dimensions(p: PDModel) -> Dict[int, int]:
    """dim H^n(A, d) for 0 ≤ n ≤ m"""
    a = p.algebra
    if not a.has_differential:
        return {n: a.space.dim(n) for n in range(0, p.dimension + 1)}
    return betti_numbers(a.complex, range(0, p.dimension + 1))
