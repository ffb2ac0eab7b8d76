"""
Normalized Hochschild chains and cochains of a CDGA.

Chains are words ``a0[a1|...|ak]`` with letters in the positive-degree
part; the degree of a word is |a0| + Σ(|ai| - 1). Cochains are sparse
maps from letter tuples to A. Both differentials come from the same
expansion of the two-sided bar differential, so they share one source of
signs.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .cdga import Cdga, PDModel, ensure_valid
from .exactlin import (
    Complex,
    DegreeMap,
    GradedSpace,
    HomologyData,
    Vector,
    add_term,
    homology,
    sign,
)
from .exceptions import ChainIdentityError, RangeError
from .report import Report

logger = logging.getLogger(__name__)

Letters = Tuple[str, ...]
BarTerm = Tuple[Fraction, str, Letters, str]


def word_label(head: str, letters: Iterable[str]) -> str:
    return f"{head}[{'|'.join(letters)}]"


def cochain_label(letters: Iterable[str], value: str) -> str:
    return f"[{'|'.join(letters)}]->{value}"


@dataclass(frozen=True)
class Word:
    """Basis chain a0[a1|...|ak]"""

    head: str
    letters: Letters
    degree: int

    @property
    def label(self) -> str:
        return word_label(self.head, self.letters)

    @property
    def level(self) -> int:
        return len(self.letters)


def filtration_level(w: Word) -> int:
    """Word length: w lies in F_p exactly when p ≥ level"""
    return w.level


def suspended_degree(a: Cdga, letters: Iterable[str]) -> int:
    return sum(a.degree(x) - 1 for x in letters)


def letter_sequences(a: Cdga, bound: int) -> Dict[int, List[Letters]]:
    """Letter tuples from Ā grouped by suspended degree, up to ``bound``"""
    letters = a.reduced_basis
    sequences: Dict[int, List[Letters]] = {0: [()]}
    for total in range(1, bound + 1):
        found: List[Letters] = []
        for x in letters:
            s = a.degree(x) - 1
            if s <= total:
                found.extend((x,) + rest for rest in sequences.get(total - s, []))
        sequences[total] = found
    return sequences


def bar_terms(a: Cdga, letters: Letters) -> List[BarTerm]:
    """
    Terms of the two-sided bar differential applied to 1[letters]1.

    Each term (c, p, w, q) stands for c·p[w]q.
    """
    unit = a.unit
    terms: List[BarTerm] = []
    eps = 0
    for i, x in enumerate(letters):
        for t, c in a.d_basis(x).items():
            terms.append((-sign(eps) * c, unit, letters[:i] + (t,) + letters[i + 1 :], unit))
        eps += a.degree(x) - 1
    if not letters:
        return terms
    terms.append((Fraction(1), letters[0], letters[1:], unit))
    eps = a.degree(letters[0]) - 1
    for i in range(1, len(letters)):
        for t, c in a.mul_basis(letters[i - 1], letters[i]).items():
            terms.append((sign(eps) * c, unit, letters[: i - 1] + (t,) + letters[i + 1 :], unit))
        eps += a.degree(letters[i]) - 1
    last = suspended_degree(a, letters[:-1])
    terms.append((Fraction(-sign(last)), unit, letters[:-1], letters[-1]))
    return terms


def chain_boundary(a: Cdga, head: str, letters: Letters) -> Vector:
    """
    ∂(a0[w]) = d(a0)[w] + (-1)^{|a0|} Σ c·ι(a0 ⊗ p[w']q),
    with ι(a0 ⊗ p[w']q) = (-1)^{|q|(|a0|+|p|+|w'|)} (q a0 p)[w'].
    """
    result: Vector = {}
    for t, c in a.d_basis(head).items():
        add_term(result, word_label(t, letters), c)
    h = a.degree(head)
    for coeff, p, rest, q in bar_terms(a, letters):
        inner = a.mul_basis(head, p)
        if not inner:
            continue
        s = sign(h) * sign(a.degree(q) * (h + a.degree(p) + suspended_degree(a, rest)))
        for t, value in a.multiply({q: Fraction(1)}, inner).items():
            add_term(result, word_label(t, rest), s * coeff * value)
    return result


@dataclass(frozen=True)
class HochschildComplex:
    """Hochschild chain complex truncated to words of degree ≤ N + 1"""

    algebra: Cdga
    truncation: int
    complex: Complex
    words: Mapping[str, Word] = field(default_factory=dict)

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    @property
    def boundary(self) -> DegreeMap:
        return self.complex.differential

    def word(self, label: str) -> Word:
        return self.words[label]

    def filtration(self, label: str) -> int:
        return self.words[label].level

    def homology(self, n: int) -> HomologyData:
        if n < 0 or n > self.truncation:
            raise RangeError(f"Hochschild homology is stored for 0 ≤ n ≤ {self.truncation}", n)
        return homology(self.complex, n)

    def betti(self) -> Dict[int, int]:
        return {n: self.homology(n).dimension for n in range(0, self.truncation + 1)}

    @cached_property
    def connes(self) -> DegreeMap:
        return connes_B(self)


def _algebra_of(model) -> Cdga:
    if isinstance(model, PDModel):
        ensure_valid(model)
        return model.algebra
    ensure_valid(model)
    return model


def build_chain_complex(a, N: int) -> HochschildComplex:
    """
    Words of degree ≤ N + 1 with ∂ defined through degree N.

    ∂∘∂ = 0 is checked while the complex is built.
    """
    if N < 0:
        raise RangeError("the degree bound must be nonnegative", N)
    algebra = _algebra_of(a)
    sequences = letter_sequences(algebra, N + 1)
    order = {label: i for i, label in enumerate(algebra.space.labels)}
    words: Dict[str, Word] = {}
    bases: Dict[int, List[str]] = {}
    for n in range(0, N + 2):
        found: List[Word] = []
        for head in algebra.space.labels:
            h = algebra.degree(head)
            if h > n:
                continue
            for letters in sequences.get(n - h, []):
                found.append(Word(head, letters, n))
        found.sort(key=lambda w: (w.level, order[w.head], tuple(order[x] for x in w.letters)))
        for w in found:
            words[w.label] = w
        bases[n] = [w.label for w in found]
    space = GradedSpace(bases, lo=0, hi=N + 1)
    columns = {
        n: {label: chain_boundary(algebra, words[label].head, words[label].letters) for label in bases[n]}
        for n in range(0, N + 1)
    }
    boundary = DegreeMap(space, space, 1, columns)
    complex_ = Complex(space, boundary, (0, N))
    logger.info(
        "built Hochschild chains of %s through degree %d (%d words)", algebra.name, N, len(words)
    )
    return HochschildComplex(algebra, N, complex_, words)


def _connes_image(h: HochschildComplex, w: Word) -> Vector:
    a = h.algebra
    if a.degree(w.head) == 0:
        return {}
    cycle = (w.head,) + w.letters
    shifts = [a.degree(x) - 1 for x in cycle]
    total = sum(shifts)
    result: Vector = {}
    before = 0
    for i in range(len(cycle)):
        rotated = cycle[i:] + cycle[:i]
        add_term(result, word_label(a.unit, rotated), sign(before * (total - before)))
        before += shifts[i]
    return result


def connes_B(h: HochschildComplex) -> DegreeMap:
    """
    Connes' boundary, degree -1.

    B(a0[a1|...|an]) = Σ_i (-1)^{ε̄_i} 1[ai|...|an|a0|...|a(i-1)] when |a0| > 0.
    B∘B = 0 and B∂ + ∂B = 0 are checked on the stored range.
    """
    columns = {
        n: {label: _connes_image(h, h.words[label]) for label in h.space.basis(n)}
        for n in range(0, h.truncation + 2)
    }
    b = DegreeMap(h.space, h.space, -1, columns)
    witness = (b @ b).nonzero_witness()
    if witness is not None:
        raise ChainIdentityError("B∘B = 0", witness)
    witness = (b @ h.boundary).mismatch(h.boundary @ b, -1)
    if witness is not None:
        raise ChainIdentityError("B∂ + ∂B = 0", witness)
    return b


def filtration_report(h: HochschildComplex, report: Optional[Report] = None) -> Report:
    """∂(F_p) ⊆ F_p and B(F_p) ⊆ F_(p+1) on every stored word"""
    report = report or Report(f"filtration of Hochschild chains of {h.algebra.name}")
    b = h.connes
    for n in range(0, h.truncation + 1):
        for label in h.space.basis(n):
            level = h.filtration(label)
            image = h.boundary.image(label)
            report.expect(
                "∂ preserves word length filtration",
                all(h.filtration(t) <= level for t in image),
                label,
            )
    for n in range(0, h.truncation + 2):
        for label in h.space.basis(n):
            level = h.filtration(label)
            report.expect(
                "B raises word length by one",
                all(h.filtration(t) == level + 1 for t in b.image(label)),
                label,
            )
    return report


# ---------------------------------------------------------------------------
# Cochains


@dataclass(frozen=True)
class Cochain:
    """Sparse Hochschild cochain: letter tuple ↦ element of A"""

    algebra: Cdga
    degree: int
    values: Mapping[Letters, Vector] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for letters, value in self.values.items():
            value = {k: Fraction(v) for k, v in value.items() if v}
            if not value:
                continue
            for k in value:
                if self.algebra.degree(k) - suspended_degree(self.algebra, letters) != self.degree:
                    raise ValueError(f"cochain value on {letters} does not have degree {self.degree}")
            cleaned[tuple(letters)] = value
        object.__setattr__(self, "values", cleaned)

    def is_zero(self) -> bool:
        return not self.values

    def __call__(self, letters: Iterable[str]) -> Vector:
        return dict(self.values.get(tuple(letters), {}))

    def __add__(self, other: "Cochain") -> "Cochain":
        return self.combine(other, 1)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self.combine(other, -1)

    def combine(self, other: "Cochain", coeff: object) -> "Cochain":
        if other.is_zero():
            return self
        if self.is_zero():
            return other.scaled(coeff)
        if other.degree != self.degree:
            raise ValueError("only cochains of the same degree can be added")
        values: Dict[Letters, Vector] = {k: dict(v) for k, v in self.values.items()}
        for letters, value in other.values.items():
            target = values.setdefault(letters, {})
            for k, v in value.items():
                add_term(target, k, coeff * v)
        return Cochain(self.algebra, self.degree, values)

    def scaled(self, coeff: object) -> "Cochain":
        return Cochain(
            self.algebra, self.degree, {k: {x: coeff * y for x, y in v.items()} for k, v in self.values.items()}
        )

    def to_vector(self) -> Vector:
        result: Vector = {}
        for letters, value in self.values.items():
            for k, v in value.items():
                add_term(result, cochain_label(letters, k), v)
        return result


def unit_cochain(a: Cdga) -> Cochain:
    return Cochain(a, 0, {(): {a.unit: Fraction(1)}})


def zero_cochain(a: Cdga, degree: int) -> Cochain:
    return Cochain(a, degree, {})


def cup(f: Cochain, g: Cochain) -> Cochain:
    """(f∪g)(w'w'') = (-1)^{|g||w'|} f(w') g(w'')"""
    a = f.algebra
    values: Dict[Letters, Vector] = {}
    for left, u in f.values.items():
        s = sign(g.degree * suspended_degree(a, left))
        for right, v in g.values.items():
            target = values.setdefault(left + right, {})
            for k, x in a.multiply(u, v).items():
                add_term(target, k, s * x)
    return Cochain(a, f.degree + g.degree, values)


def pre_lie(f: Cochain, g: Cochain) -> Cochain:
    """
    f ∘ g: insert g into each slot of f, Koszul sign (|g|-1)·|letters before|.

    Components of g landing on the unit are dropped (normalized cochains).
    """
    a = f.algebra
    shift = g.degree - 1
    values: Dict[Letters, Vector] = {}
    for inner, output in g.values.items():
        for letter, c in output.items():
            if letter == a.unit:
                continue
            for outer, value in f.values.items():
                before = 0
                for i, x in enumerate(outer):
                    if x == letter:
                        s = sign(shift * before)
                        target = values.setdefault(outer[:i] + inner + outer[i + 1 :], {})
                        for k, v in value.items():
                            add_term(target, k, s * c * v)
                    before += a.degree(x) - 1
    return Cochain(a, f.degree + g.degree - 1, values)


def gerstenhaber_bracket(f: Cochain, g: Cochain) -> Cochain:
    """[f, g] = f∘g - (-1)^{(|f|-1)(|g|-1)} g∘f"""
    return pre_lie(f, g).combine(pre_lie(g, f), -sign((f.degree - 1) * (g.degree - 1)))


def coboundary_value(f: Cochain, letters: Letters) -> Vector:
    """
    (δf)(w) = d(f(w)) - (-1)^{|f|} Σ c·F(p[w']q), F(p[w']q) = (-1)^{|p||f|} p f(w') q.
    """
    a = f.algebra
    result: Vector = dict(a.d(f(letters)))
    outer = -sign(f.degree)
    for coeff, p, rest, q in bar_terms(a, letters):
        inner = f.values.get(rest)
        if not inner:
            continue
        s = outer * sign(a.degree(p) * f.degree) * coeff
        for k, v in a.multiply(a.multiply({p: Fraction(1)}, inner), {q: Fraction(1)}).items():
            add_term(result, k, s * v)
    return result


@dataclass(frozen=True)
class CochainComplex:
    """Hochschild cochains of total degree ≥ -N (plus one degree below)"""

    algebra: Cdga
    bound: int
    complex: Complex
    entries: Mapping[str, Tuple[Letters, str]] = field(default_factory=dict)

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    def cochain(self, vec: Mapping[str, Fraction], degree: int) -> Cochain:
        values: Dict[Letters, Vector] = {}
        for label, coeff in vec.items():
            letters, k = self.entries[label]
            add_term(values.setdefault(letters, {}), k, coeff)
        return Cochain(self.algebra, degree, values)

    def vector(self, f: Cochain) -> Vector:
        vec = f.to_vector()
        for label in vec:
            if label not in self.space:
                raise RangeError(f"cochain component {label} lies outside the stored range", f.degree)
        return vec

    def coboundary(self, f: Cochain) -> Cochain:
        if f.is_zero():
            return zero_cochain(self.algebra, f.degree + 1)
        return self.cochain(self.complex.differential.apply(self.vector(f)), f.degree + 1)

    def homology(self, n: int) -> HomologyData:
        return homology(self.complex, n)


def build_cochain_complex(a, N: int) -> CochainComplex:
    """
    Normalized Hochschild cochains of degree ≥ -N - 1 with δ.

    Homology is computable for -N ≤ n ≤ top degree of A. δ∘δ = 0 is
    checked on construction.
    """
    if N < 0:
        raise RangeError("the degree bound must be nonnegative", N)
    algebra = _algebra_of(a)
    top = algebra.top
    lo = -N - 1
    sequences = letter_sequences(algebra, top - lo)
    order = {label: i for i, label in enumerate(algebra.space.labels)}
    entries: Dict[str, Tuple[Letters, str]] = {}
    bases: Dict[int, List[str]] = {}
    # letters -> [(value label, degree, cochain label)] over the stored range
    sources: Dict[Letters, List[Tuple[str, int, str]]] = {}
    for n in range(lo, top + 1):
        found = []
        for k in algebra.space.labels:
            length = algebra.degree(k) - n
            if length < 0:
                continue
            for letters in sequences.get(length, []):
                found.append((len(letters), tuple(order[x] for x in letters), order[k], letters, k))
        found.sort()
        labels = []
        for *_, letters, k in found:
            label = cochain_label(letters, k)
            entries[label] = (letters, k)
            sources.setdefault(letters, []).append((k, n, label))
            labels.append(label)
        bases[n] = labels
    space = GradedSpace(bases, lo=lo, hi=top)

    columns: Dict[int, Dict[str, Vector]] = {n: {label: {} for label in bases[n]} for n in range(lo, top + 1)}
    for label, (letters, k) in entries.items():
        n = algebra.degree(k) - suspended_degree(algebra, letters)
        if n < top:
            for t, c in algebra.d_basis(k).items():
                add_term(columns[n][label], cochain_label(letters, t), c)
    # δ is assembled target word by target word: each bar term p[w']q of
    # 1[w]1 feeds every stored cochain on w'.
    for length in range(0, top - lo):
        for letters in sequences.get(length, []):
            for coeff, p, rest, q in bar_terms(algebra, letters):
                for k, n, source in sources.get(rest, ()):
                    if n >= top:
                        continue
                    s = -sign(n) * sign(algebra.degree(p) * n) * coeff
                    value = algebra.multiply(algebra.mul_basis(p, k), {q: Fraction(1)})
                    for t, v in value.items():
                        add_term(columns[n][source], cochain_label(letters, t), s * v)
    delta = DegreeMap(space, space, 1, columns)
    complex_ = Complex(space, delta, (lo + 1, top))
    logger.info(
        "built Hochschild cochains of %s for degrees %d..%d (%d basis cochains)",
        algebra.name,
        lo,
        top,
        len(entries),
    )
    return CochainComplex(algebra, N, complex_, entries)


@dataclass(frozen=True)
class HHAlgebra:
    """Cup product on HH^*(A;A) in chosen cocycle bases"""

    cochains: CochainComplex
    classes: Mapping[int, HomologyData]
    labels: Mapping[int, Tuple[str, ...]]
    products: Mapping[Tuple[str, str], Vector]

    def degree_of(self, label: str) -> int:
        for n, names in self.labels.items():
            if label in names:
                return n
        raise KeyError(label)

    def representative(self, label: str) -> Cochain:
        n = self.degree_of(label)
        index = self.labels[n].index(label)
        return self.cochains.cochain(self.classes[n].representatives[index], n)

    def coordinates(self, f: Cochain) -> Vector:
        data = self.classes[f.degree]
        coords = data.coordinates(self.cochains.vector(f))
        return {self.labels[f.degree][i]: c for i, c in enumerate(coords) if c}


def hh_label(n: int, i: int) -> str:
    return f"HH{n}#{i}"


def hh_algebra(a, N: int) -> HHAlgebra:
    """Homology-level cup products for classes in degrees -N..top"""
    cochains = build_cochain_complex(a, N)
    algebra = cochains.algebra
    degrees = range(-N, algebra.top + 1)
    classes = {n: cochains.homology(n) for n in degrees}
    labels = {n: tuple(hh_label(n, i) for i in range(classes[n].dimension)) for n in degrees}
    reps = {
        labels[n][i]: cochains.cochain(vec, n)
        for n in degrees
        for i, vec in enumerate(classes[n].representatives)
    }
    products: Dict[Tuple[str, str], Vector] = {}
    for i in degrees:
        for j in degrees:
            if i + j not in degrees:
                continue
            for x in labels[i]:
                for y in labels[j]:
                    product = cup(reps[x], reps[y])
                    coords = classes[i + j].coordinates(cochains.vector(product))
                    products[(x, y)] = {labels[i + j][k]: c for k, c in enumerate(coords) if c}
    return HHAlgebra(cochains, classes, labels, products)


def gerstenhaber_report(hh: HHAlgebra, samples: List[Tuple[str, str, str]], report: Optional[Report] = None) -> Report:
    """
    Bracket and cup identities on the given class triples.

    Brackets of cocycles must be cocycles; antisymmetry and Jacobi of the
    pre-Lie bracket hold exactly on cochains; the cup product is
    graded commutative in cohomology.
    """
    report = report or Report("Gerstenhaber structure on HH^*(A;A)")
    cochains = hh.cochains
    algebra = cochains.algebra
    lo, hi = cochains.complex.exact_degrees
    unit = unit_cochain(algebra)

    def in_range(degree: int) -> bool:
        return lo - 1 <= degree <= hi

    for x, y, z in samples:
        f, g, h = hh.representative(x), hh.representative(y), hh.representative(z)
        witness = f"({x}, {y}, {z})"
        fg = gerstenhaber_bracket(f, g)
        gf = gerstenhaber_bracket(g, f)
        report.expect(
            "bracket antisymmetry",
            fg.combine(gf, sign((f.degree - 1) * (g.degree - 1))).is_zero(),
            witness,
        )
        jacobi = gerstenhaber_bracket(f, gerstenhaber_bracket(g, h))
        jacobi = jacobi - gerstenhaber_bracket(fg, h)
        jacobi = jacobi.combine(
            gerstenhaber_bracket(g, gerstenhaber_bracket(f, h)), -sign((f.degree - 1) * (g.degree - 1))
        )
        report.expect("bracket Jacobi identity", jacobi.is_zero(), witness)
        report.expect("unit is central for the bracket", gerstenhaber_bracket(unit, g).is_zero(), y)
        if in_range(fg.degree) and in_range(fg.degree + 1):
            report.expect("bracket of cocycles is a cocycle", cochains.coboundary(fg).is_zero(), witness)
        if f.degree + g.degree in hh.classes:
            commutator = cup(f, g).combine(cup(g, f), -sign(f.degree * g.degree))
            report.expect(
                "cup product is graded commutative in cohomology",
                not any(hh.coordinates(commutator).values()),
                witness,
            )
    return report
