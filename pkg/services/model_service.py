import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from models.schemas import BasisEntry, DifferentialEntry, GeneratorEntry, ModelFile, ProductEntry
from .cdga import Cdga, PDModel, ensure_valid, tensor
from .exactlin import GradedSpace, Vector, format_scalar, to_scalar
from .exceptions import ModelLoadError, UnknownModelError
from .sullivan import FreeAlgebra, Polynomial, SullivanModel, polynomial_from_labels

logger = logging.getLogger(__name__)

Model = Union[PDModel, SullivanModel]


@dataclass(frozen=True)
class ModelPair:
    """
    A PD model and a Sullivan model of the same space; either may be missing.

    ``formality`` pairs Sullivan generators with the basis elements of the
    PD model they map to; empty means generators go to the basis element
    of the same name.
    """

    pd: Optional[PDModel] = None
    sullivan: Optional[SullivanModel] = None
    formality: Tuple[Tuple[str, str], ...] = ()

    @property
    def name(self) -> str:
        return (self.pd or self.sullivan).name

    @property
    def default_degree(self) -> int:
        """m + 10 for PD models, 10 for Sullivan-only input"""
        return self.pd.dimension + 10 if self.pd is not None else 10

    @property
    def default_pipeline(self) -> str:
        """hochschild when a PD model is present, sullivan otherwise"""
        return "hochschild" if self.pd is not None else "sullivan"

    @classmethod
    def of(cls, model: "Model") -> "ModelPair":
        if isinstance(model, PDModel):
            return cls(pd=model)
        return cls(sullivan=model)


def sphere_pd(k: int, generator: str = "x", name: Optional[str] = None) -> PDModel:
    """H*(S^k) = ℚ[x]/x² with ∫x = 1"""
    space = GradedSpace({0: ["1"], k: [generator]}, lo=0, hi=k)
    return PDModel(Cdga(space, "1", {}, {}, name or f"S{k}"), k, {generator: Fraction(1)})


def projective_pd(n: int) -> PDModel:
    """H*(CP^n) = ℚ[x]/x^(n+1) with ∫x^n = 1"""
    labels = ["1"] + [FreeAlgebra.label(("x",) * i) for i in range(1, n + 1)]
    space = GradedSpace({2 * i: [label] for i, label in enumerate(labels)}, lo=0, hi=2 * n)
    product = {
        (labels[i], labels[j]): {labels[i + j]: Fraction(1)}
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i + j <= n
    }
    return PDModel(Cdga(space, "1", product, {}, f"CP{n}"), 2 * n, {labels[n]: Fraction(1)})


def sphere_sullivan(k: int, names: Tuple[str, str] = ("x", "y"), name: Optional[str] = None) -> SullivanModel:
    """(⋀x, 0) for odd k; (⋀(x, y), dy = x²) with |y| = 2k - 1 for even k"""
    x, y = names
    if k % 2:
        return SullivanModel(name or f"S{k}", ((x, k),))
    return SullivanModel(name or f"S{k}", ((x, k), (y, 2 * k - 1)), {y: {(x, x): Fraction(1)}})


def projective_sullivan(n: int) -> SullivanModel:
    """(⋀(x, y), dy = x^(n+1)) with |x| = 2, |y| = 2n + 1"""
    return SullivanModel(f"CP{n}", (("x", 2), ("y", 2 * n + 1)), {"y": {("x",) * (n + 1): Fraction(1)}})


def product_sullivan(first: SullivanModel, second: SullivanModel, name: str) -> SullivanModel:
    return SullivanModel(
        name, first.generators + second.generators, {**first.differential, **second.differential}
    )


def _sphere_pair(k: int) -> ModelPair:
    return ModelPair(sphere_pd(k), sphere_sullivan(k))


def _product_pair(k: int, l: int) -> ModelPair:
    name = f"S{k}xS{l}"
    pd = tensor(sphere_pd(k, "x"), sphere_pd(l, "y"), name)
    second = ("z", "w")
    sullivan = product_sullivan(sphere_sullivan(k), sphere_sullivan(l, second), name)
    return ModelPair(pd, sullivan, (("x", "x"), ("z", "y")))


BUILTINS = {
    "S2": lambda: _sphere_pair(2),
    "S3": lambda: _sphere_pair(3),
    "S4": lambda: _sphere_pair(4),
    "S5": lambda: _sphere_pair(5),
    "S6": lambda: _sphere_pair(6),
    "S7": lambda: _sphere_pair(7),
    "CP2": lambda: ModelPair(projective_pd(2), projective_sullivan(2)),
    "CP3": lambda: ModelPair(projective_pd(3), projective_sullivan(3)),
    "S2xS3": lambda: _product_pair(2, 3),
    "S2xS2": lambda: _product_pair(2, 2),
    "S3xS3": lambda: _product_pair(3, 3),
}


@lru_cache(maxsize=None)
def _builtin(name: str) -> ModelPair:
    return BUILTINS[name]()


def _scalars(values: Dict[str, str]) -> Vector:
    return {label: to_scalar(value) for label, value in values.items() if to_scalar(value)}


def _texts(vec: Dict[str, Fraction]) -> Dict[str, str]:
    return {label: format_scalar(value) for label, value in vec.items() if value}


class ModelService:
    """Service for builtin models and model files"""

    def __init__(self):
        self.data_dir = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")

    def builtin_names(self) -> List[str]:
        return list(BUILTINS)

    def builtin(self, name: str) -> ModelPair:
        """
        Builtin model pair by name

        Raises:
            UnknownModelError: name is not a builtin
        """
        if name not in BUILTINS:
            raise UnknownModelError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")
        return _builtin(name)

    def parse(self, text: str, source: str = "<string>") -> Model:
        """
        Parse model file text without validating the algebra.

        Raises:
            ModelLoadError: invalid JSON (line:column) or schema error (field path)
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelLoadError(f"{source}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from e
        try:
            model_file = ModelFile.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            message = first["msg"].removeprefix("Value error, ")
            raise ModelLoadError(f"{source}: {where}: {message}" if where else f"{source}: {message}") from e
        return self.from_model_file(model_file, source)

    def read(self, path: str) -> Model:
        """Parse a model file from disk without validating the algebra"""
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ModelLoadError(f"{path}: cannot read model file: {e.strerror}") from e
        return self.parse(text, path)

    def load(self, path: str) -> Model:
        """
        Load and validate a model file

        Raises:
            ModelLoadError: the file cannot be read or parsed
            ModelValidationError: the model violates an axiom (first violation named)
        """
        model = self.read(path)
        ensure_valid(model)
        logger.info("loaded %s from %s", model.name, path)
        return model

    def from_model_file(self, model_file: ModelFile, source: str = "<model>") -> Model:
        try:
            if model_file.kind == "sullivan":
                return self._sullivan(model_file)
            return self._pd(model_file)
        except (KeyError, ValueError) as e:
            raise ModelLoadError(f"{source}: {e.args[0] if e.args else e}") from e

    def _pd(self, model_file: ModelFile) -> PDModel:
        bases: Dict[int, List[str]] = {}
        for entry in model_file.basis:
            bases.setdefault(entry.degree, []).append(entry.label)
        space = GradedSpace(bases)
        product = {(e.left, e.right): _scalars(e.value) for e in model_file.product}
        d_table = {e.label: _scalars(e.value) for e in model_file.differential}
        algebra = Cdga(space, model_file.unit, product, d_table, model_file.name)
        return PDModel(algebra, model_file.dimension, _scalars(model_file.orientation))

    def _sullivan(self, model_file: ModelFile) -> SullivanModel:
        generators = tuple((g.name, g.degree) for g in model_file.generators)
        algebra = FreeAlgebra(generators)
        differential: Dict[str, Polynomial] = {}
        for entry in model_file.differential:
            differential[entry.label] = polynomial_from_labels(algebra, _scalars(entry.value))
        return SullivanModel(model_file.name, generators, differential)

    def serialize(self, model: Model) -> ModelFile:
        """Canonical ModelFile for a model (labels in basis order)"""
        if isinstance(model, SullivanModel):
            algebra = model.algebra
            return ModelFile(
                name=model.name,
                kind="sullivan",
                generators=[GeneratorEntry(name=n, degree=d) for n, d in algebra.generators],
                differential=[
                    DifferentialEntry(label=n, value=_texts(algebra.label_polynomial(model.differential[n])))
                    for n, _ in algebra.generators
                    if model.differential.get(n)
                ],
            )
        a = model.algebra
        order = {label: i for i, label in enumerate(a.space.labels)}
        return ModelFile(
            name=model.name,
            kind="pd-cdga",
            basis=[BasisEntry(label=label, degree=a.degree(label)) for label in a.space.labels],
            unit=a.unit,
            product=[
                ProductEntry(left=l, right=r, value=_texts(a.product[(l, r)]))
                for l, r in sorted(a.product, key=lambda pair: (order[pair[0]], order[pair[1]]))
                if a.product[(l, r)]
            ],
            differential=[
                DifferentialEntry(label=label, value=_texts(a.d_table[label]))
                for label in a.space.labels
                if a.d_table.get(label)
            ],
            dimension=model.dimension,
            orientation=_texts(dict(model.orientation)),
        )

    def dumps(self, model: Model) -> str:
        return json.dumps(self.serialize(model).model_dump(exclude_none=True), indent=2, ensure_ascii=False) + "\n"

    def export_builtins(self, directory: str) -> List[str]:
        """Write every builtin as <name>.pd.json and <name>.sullivan.json"""
        os.makedirs(directory, exist_ok=True)
        written = []
        for name in self.builtin_names():
            pair = self.builtin(name)
            models = [("pd", pair.pd)] + ([("sullivan", pair.sullivan)] if pair.sullivan else [])
            for suffix, model in models:
                path = os.path.join(directory, f"{name}.{suffix}.json")
                with open(path, "w", encoding="utf-8") as f:
                    f.write(self.dumps(model))
                written.append(path)
        logger.info("exported %d model files to %s", len(written), directory)
        return written


# Global model service instance
model_service = ModelService()
