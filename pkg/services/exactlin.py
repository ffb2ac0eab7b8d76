"""
Exact graded linear algebra over the rationals.

Scalars are ``fractions.Fraction``. Vectors are sparse dictionaries from
basis label to scalar. Elimination is delegated to sympy's
``DomainMatrix`` over ``QQ``; everything else (graded bookkeeping, signs,
homology representatives) lives here.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import ChainIdentityError, RangeError

logger = logging.getLogger(__name__)

Scalar = Fraction
Vector = Dict[str, Fraction]
MatrixLike = Union[DomainMatrix, Sequence[Sequence[object]]]


def to_scalar(value: object) -> Fraction:
    """Coerce an int, a Fraction or a "p/q" string into an exact scalar"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def format_scalar(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def sign(exponent: int) -> int:
    """(-1) ** exponent"""
    return -1 if exponent % 2 else 1


def add_to(acc: Vector, vec: Mapping[str, Fraction], coeff: object = 1) -> Vector:
    """acc += coeff * vec, dropping entries that cancel"""
    if not coeff:
        return acc
    for label, value in vec.items():
        total = acc.get(label, 0) + coeff * value
        if total:
            acc[label] = total
        else:
            acc.pop(label, None)
    return acc


def add_term(acc: Vector, label: str, value: object) -> Vector:
    if not value:
        return acc
    total = acc.get(label, 0) + value
    if total:
        acc[label] = Fraction(total)
    else:
        acc.pop(label, None)
    return acc


def scaled(vec: Mapping[str, Fraction], coeff: object) -> Vector:
    if not coeff:
        return {}
    return {label: value * coeff for label, value in vec.items() if value}


@dataclass(frozen=True)
class GradedSpace:
    """
    Finite graded vector space given by ordered basis labels per degree.

    Labels are unique across the whole space, so a label determines its
    degree. A dual space keeps the labels, negates the degrees and flips
    ``dual``.
    """

    bases: Mapping[int, Tuple[str, ...]] = field(default_factory=dict)
    lo: Optional[int] = None
    hi: Optional[int] = None
    dual: bool = False

    def __post_init__(self):
        cleaned: Dict[int, Tuple[str, ...]] = {}
        degrees: Dict[str, int] = {}
        for degree in sorted(self.bases):
            labels = tuple(self.bases[degree])
            for label in labels:
                if label in degrees:
                    raise ValueError(
                        f"basis label {label!r} repeated (degrees {degrees[label]} and {degree})"
                    )
                degrees[label] = degree
            if labels:
                cleaned[degree] = labels
        lo = self.lo if self.lo is not None else (min(cleaned) if cleaned else 0)
        hi = self.hi if self.hi is not None else (max(cleaned) if cleaned else lo - 1)
        if cleaned and (min(cleaned) < lo or max(cleaned) > hi):
            raise ValueError("basis labels outside the declared degree range")
        object.__setattr__(self, "bases", cleaned)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "_degrees", degrees)
        object.__setattr__(
            self,
            "_index",
            {label: i for labels in cleaned.values() for i, label in enumerate(labels)},
        )

    def basis(self, degree: int) -> Tuple[str, ...]:
        return self.bases.get(degree, ())

    def dim(self, degree: int) -> int:
        return len(self.bases.get(degree, ()))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def degree_of(self, label: str) -> int:
        try:
            return self._degrees[label]
        except KeyError:
            raise KeyError(f"unknown basis label {label!r}") from None

    def index(self, label: str) -> int:
        return self._index[label]

    def __contains__(self, label: object) -> bool:
        return label in self._degrees

    @property
    def labels(self) -> List[str]:
        return [label for degree in sorted(self.bases) for label in self.bases[degree]]

    def dual_space(self) -> "GradedSpace":
        return GradedSpace(
            {-degree: labels for degree, labels in self.bases.items()},
            lo=-self.hi,
            hi=-self.lo,
            dual=not self.dual,
        )


@dataclass(frozen=True)
class DegreeMap:
    """
    Linear map of fixed degree between graded spaces.

    ``columns[n]`` holds, for every basis label of ``source`` in degree n,
    its image as a sparse vector in ``target`` degree n + degree. A degree
    is defined exactly when it is a key of ``columns``.
    """

    source: GradedSpace
    target: GradedSpace
    degree: int
    columns: Mapping[int, Mapping[str, Vector]] = field(default_factory=dict)

    def __post_init__(self):
        normalized: Dict[int, Dict[str, Vector]] = {}
        for n, images in self.columns.items():
            block: Dict[str, Vector] = {}
            for label, image in images.items():
                if self.source.degree_of(label) != n:
                    raise ValueError(f"{label!r} does not live in source degree {n}")
                clean = {}
                for t, value in image.items():
                    if not value:
                        continue
                    if self.target.degree_of(t) != n + self.degree:
                        raise ValueError(
                            f"image of {label!r} has {t!r} outside target degree {n + self.degree}"
                        )
                    clean[t] = Fraction(value)
                if clean:
                    block[label] = clean
            normalized[n] = block
        object.__setattr__(self, "columns", normalized)

    @classmethod
    def from_function(
        cls,
        source: GradedSpace,
        target: GradedSpace,
        degree: int,
        image: Callable[[str], Mapping[str, Fraction]],
        degrees: Optional[Iterable[int]] = None,
    ) -> "DegreeMap":
        if degrees is None:
            degrees = [n for n in source.degrees() if n + degree in range(target.lo, target.hi + 1)]
        columns = {n: {label: dict(image(label)) for label in source.basis(n)} for n in degrees}
        return cls(source, target, degree, columns)

    @property
    def defined_degrees(self) -> List[int]:
        return sorted(self.columns)

    def defined_on(self, n: int) -> bool:
        return n in self.columns

    def image(self, label: str) -> Vector:
        n = self.source.degree_of(label)
        if n not in self.columns:
            raise RangeError(f"map is not defined in degree {n}", n)
        return self.columns[n].get(label, {})

    def apply(self, vec: Mapping[str, Fraction]) -> Vector:
        result: Vector = {}
        for label, coeff in vec.items():
            add_to(result, self.image(label), coeff)
        return result

    def block(self, n: int) -> DomainMatrix:
        """Matrix of the degree-n block: rows target^{n+d}, columns source^n"""
        if n not in self.columns:
            raise RangeError(f"map is not defined in degree {n}", n)
        rows: Dict[int, Dict[int, object]] = {}
        for label, image in self.columns[n].items():
            col = self.source.index(label)
            for t, value in image.items():
                rows.setdefault(self.target.index(t), {})[col] = _qq(value)
        return DomainMatrix(rows, (self.target.dim(n + self.degree), self.source.dim(n)), QQ)

    def compose(self, other: "DegreeMap") -> "DegreeMap":
        """self ∘ other"""
        columns = {}
        for n in other.columns:
            if n + other.degree not in self.columns:
                continue
            columns[n] = {
                label: self.apply(other.columns[n].get(label, {})) for label in other.source.basis(n)
            }
        return DegreeMap(other.source, self.target, self.degree + other.degree, columns)

    __matmul__ = compose

    def scaled(self, coeff: object) -> "DegreeMap":
        return DegreeMap(
            self.source,
            self.target,
            self.degree,
            {n: {l: scaled(v, coeff) for l, v in block.items()} for n, block in self.columns.items()},
        )

    def mismatch(self, other: "DegreeMap", coeff: object = 1) -> Optional[str]:
        """First source label where self and coeff * other differ on a common degree"""
        for n in sorted(set(self.columns) & set(other.columns)):
            for label in self.source.basis(n):
                diff = dict(self.columns[n].get(label, {}))
                add_to(diff, other.columns[n].get(label, {}), -Fraction(coeff))
                if diff:
                    return label
        return None

    def nonzero_witness(self) -> Optional[str]:
        for n in sorted(self.columns):
            for label in self.source.basis(n):
                if self.columns[n].get(label):
                    return label
        return None

    def is_zero(self) -> bool:
        return self.nonzero_witness() is None


def identity_map(space: GradedSpace) -> DegreeMap:
    return DegreeMap.from_function(space, space, 0, lambda label: {label: Fraction(1)}, space.degrees())


@dataclass(frozen=True)
class Complex:
    """
    Cochain complex: a graded space with a degree +1 square-zero map.

    ``exact_degrees`` is the inclusive range where homology is computable
    (both the incoming and the outgoing differential are known).
    """

    space: GradedSpace
    differential: DegreeMap
    exact_degrees: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.differential.degree != 1:
            raise ValueError("a differential has degree +1")
        witness = (self.differential @ self.differential).nonzero_witness()
        if witness is not None:
            raise ChainIdentityError("d∘d = 0", witness)
        if self.exact_degrees is None:
            defined = self.differential.defined_degrees
            top = max(defined) if defined else self.space.lo - 1
            object.__setattr__(self, "exact_degrees", (self.space.lo, top))
        object.__setattr__(self, "_homology", {})

    def dim(self, n: int) -> int:
        return self.space.dim(n)


@dataclass(frozen=True)
class HomologyData:
    """Homology in one degree with chosen representatives and dual projection"""

    degree: int
    dimension: int
    representatives: Tuple[Vector, ...]
    projection: Tuple[Vector, ...]

    def __post_init__(self):
        columns: Dict[str, Dict[int, Fraction]] = {}
        for i, functional in enumerate(self.projection):
            for label, value in functional.items():
                columns.setdefault(label, {})[i] = value
        object.__setattr__(self, "_columns", columns)

    def project_label(self, label: str) -> Dict[int, Fraction]:
        return self._columns.get(label, {})

    def coordinates(self, cycle: Mapping[str, Fraction]) -> List[Fraction]:
        coords = [Fraction(0)] * self.dimension
        for label, coeff in cycle.items():
            for i, value in self._columns.get(label, {}).items():
                coords[i] += coeff * value
        return coords


def _qq(value: object):
    f = to_scalar(value)
    return QQ(f.numerator, f.denominator)


def _fraction(element) -> Fraction:
    return Fraction(int(element.numerator), int(element.denominator))


def as_domain_matrix(m: MatrixLike) -> DomainMatrix:
    if isinstance(m, DomainMatrix):
        return m if m.domain == QQ else m.convert_to(QQ)
    rows = [list(r) for r in m]
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise ValueError("matrix rows have different lengths")
    dod = {}
    for i, row in enumerate(rows):
        entries = {j: _qq(v) for j, v in enumerate(row) if to_scalar(v)}
        if entries:
            dod[i] = entries
    return DomainMatrix(dod, (len(rows), ncols), QQ)


def _dod(dm: DomainMatrix) -> Dict[int, Dict[int, Fraction]]:
    return {i: {j: _fraction(v) for j, v in row.items() if v} for i, row in dm.to_dod().items()}


def _rref(dm: DomainMatrix) -> Tuple[Dict[int, Dict[int, Fraction]], Tuple[int, ...]]:
    rows, cols = dm.shape
    if rows == 0 or cols == 0:
        return {}, ()
    reduced, pivots = dm.rref()
    return _dod(reduced), tuple(pivots)


def _kernel_from_rref(
    reduced: Mapping[int, Mapping[int, Fraction]], pivots: Sequence[int], cols: int
) -> List[Dict[int, Fraction]]:
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        vec = {free: Fraction(1)}
        for r, p in enumerate(pivots):
            value = reduced.get(r, {}).get(free)
            if value:
                vec[p] = -value
        basis.append(vec)
    return basis


def to_rows(m: MatrixLike) -> List[List[Fraction]]:
    dm = as_domain_matrix(m)
    rows, cols = dm.shape
    dense = [[Fraction(0)] * cols for _ in range(rows)]
    for i, row in _dod(dm).items():
        for j, value in row.items():
            dense[i][j] = value
    return dense


def rank(m: MatrixLike) -> int:
    """Rank over QQ"""
    dm = as_domain_matrix(m)
    if 0 in dm.shape:
        return 0
    return int(dm.rank())


def kernel_basis(m: MatrixLike) -> List[List[Fraction]]:
    """Exact basis of the null space, one vector per free column"""
    dm = as_domain_matrix(m)
    cols = dm.shape[1]
    reduced, pivots = _rref(dm)
    basis = []
    for sparse in _kernel_from_rref(reduced, pivots, cols):
        vec = [Fraction(0)] * cols
        for j, value in sparse.items():
            vec[j] = value
        basis.append(vec)
    return basis


def solve(m: MatrixLike, rhs: Sequence[object]) -> Optional[List[Fraction]]:
    """
    One solution x of m x = rhs, free variables set to zero.

    Returns:
        The solution, or None when the system is inconsistent
    """
    dm = as_domain_matrix(m)
    rows, cols = dm.shape
    if len(rhs) != rows:
        raise ValueError("right-hand side does not match the matrix")
    dod = {i: dict(row) for i, row in dm.to_dod().items()}
    for i, value in enumerate(rhs):
        if to_scalar(value):
            dod.setdefault(i, {})[cols] = _qq(value)
    reduced, pivots = _rref(DomainMatrix(dod, (rows, cols + 1), QQ))
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, p in enumerate(pivots):
        x[p] = reduced.get(r, {}).get(cols, Fraction(0))
    return x


def inverse(m: MatrixLike) -> List[List[Fraction]]:
    dm = as_domain_matrix(m)
    if dm.shape[0] != dm.shape[1]:
        raise ValueError("only square matrices have inverses")
    if dm.shape[0] == 0:
        return []
    return to_rows(dm.inv())


def matmul(left: MatrixLike, right: MatrixLike) -> List[List[Fraction]]:
    """left · right over QQ"""
    return to_rows(as_domain_matrix(left).matmul(as_domain_matrix(right)))


def homology(c: Complex, n: int) -> HomologyData:
    """
    Homology of c in degree n.

    Cycles are parametrized by the free columns F of the reduced outgoing
    differential, so a cycle is determined by its F-coordinates. The
    projection reads those coordinates and applies a functional killing
    the boundaries, normalized against the chosen representatives.
    """
    lo, hi = c.exact_degrees
    if n < lo or n > hi:
        raise RangeError(f"homology requested in degree {n}, stored range is [{lo}, {hi}]", n)
    cached = c._homology.get(n)
    if cached is not None:
        return cached

    labels = c.space.basis(n)
    dim_n = len(labels)
    if dim_n == 0:
        data = HomologyData(n, 0, (), ())
        c._homology[n] = data
        return data

    outgoing = c.differential.block(n)
    reduced, pivots = _rref(outgoing)
    kernel = _kernel_from_rref(reduced, pivots, dim_n)
    pivot_set = set(pivots)
    free = [col for col in range(dim_n) if col not in pivot_set]
    local = {col: i for i, col in enumerate(free)}

    previous = c.space.dim(n - 1) if c.differential.defined_on(n - 1) else 0
    incoming_rows: Dict[int, Dict[int, object]] = {}
    if previous:
        for i, row in c.differential.block(n - 1).to_dod().items():
            if i in local:
                incoming_rows[local[i]] = dict(row)

    nfree = len(free)
    augmented = {i: dict(row) for i, row in incoming_rows.items()}
    for i in range(nfree):
        augmented.setdefault(i, {})[previous + i] = QQ(1)
    _, aug_pivots = _rref(DomainMatrix(augmented, (nfree, previous + nfree), QQ))
    chosen = [p - previous for p in aug_pivots if p >= previous]

    transposed: Dict[int, Dict[int, object]] = {}
    for i, row in incoming_rows.items():
        for j, value in row.items():
            transposed.setdefault(j, {})[i] = value
    left_kernel = kernel_basis(DomainMatrix(transposed, (previous, nfree), QQ))
    if len(left_kernel) != len(chosen):
        raise ChainIdentityError("homology bookkeeping", labels[0], "cycle and cocycle counts disagree")

    gram = [[functional[j] for j in chosen] for functional in left_kernel]
    normalizer = inverse(gram)
    projection = []
    for row in normalizer:
        functional: Vector = {}
        for coeff, mu in zip(row, left_kernel):
            if coeff:
                for j, value in enumerate(mu):
                    if value:
                        add_term(functional, labels[free[j]], coeff * value)
        projection.append(functional)

    representatives = []
    for j in chosen:
        representatives.append({labels[col]: value for col, value in kernel[j].items()})

    data = HomologyData(n, len(chosen), tuple(representatives), tuple(projection))
    logger.debug("homology in degree %d: chains %d, dimension %d", n, dim_n, data.dimension)
    c._homology[n] = data
    return data


def betti_numbers(c: Complex, degrees: Iterable[int]) -> Dict[int, int]:
    return {n: homology(c, n).dimension for n in degrees}


def dual_map(f: DegreeMap) -> DegreeMap:
    """
    Graded dual f^∨(φ) = (-1)^{|f||φ|} φ∘f.

    Dualizing a dual space lands back on the original labels through the
    evaluation isomorphism v ↦ (φ ↦ (-1)^{|v||φ|} φ(v)).
    """
    d = f.degree
    source = f.target.dual_space()
    target = f.source.dual_space()
    columns: Dict[int, Dict[str, Vector]] = {}
    for n, block in f.columns.items():
        phi_degree = -(n + d)
        factor = sign(d * phi_degree)
        if f.target.dual:
            factor *= sign(n + d)
        if f.source.dual:
            factor *= sign(n)
        dual_block: Dict[str, Vector] = {label: {} for label in f.target.basis(n + d)}
        for label, image in block.items():
            for t, value in image.items():
                dual_block[t][label] = factor * value
        columns[phi_degree] = dual_block
    return DegreeMap(source, target, d, columns)
