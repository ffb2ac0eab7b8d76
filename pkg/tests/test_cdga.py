from fractions import Fraction

import pytest

from services.cdga import (
    Cdga,
    PDModel,
    cohomology_dimensions,
    ensure_valid,
    flip_orientation,
    mu_A,
    multiplication,
    tensor,
    theta,
    theta_inverse,
    validate,
)
from services.exactlin import GradedSpace
from services.exceptions import ModelValidationError, NotPoincareDualityError
from services.model_service import model_service, sphere_pd


def test_builtin_pd_models_are_valid():
    for name in model_service.builtin_names():
        assert validate(model_service.builtin(name).pd) == []


def test_mu_A_on_the_two_sphere(s2):
    mu = mu_A(s2.pd)
    assert mu.degree == 2
    assert mu.image("1") == {"1⊗x": Fraction(1), "x⊗1": Fraction(1)}
    assert mu.image("x") == {"x⊗x": Fraction(1)}


def test_mu_A_on_the_three_sphere(s3):
    mu = mu_A(s3.pd)
    assert mu.image("1") == {"1⊗x": Fraction(1), "x⊗1": Fraction(-1)}
    assert mu.image("x") == {"x⊗x": Fraction(-1)}


def test_mu_A_on_the_projective_plane(cp2):
    assert mu_A(cp2.pd).image("1") == {"1⊗x^2": Fraction(1), "x⊗x": Fraction(1), "x^2⊗1": Fraction(1)}


def test_mu_A_multiplies_to_the_euler_class(s2, cp2):
    # μ(μ_A(1)) is χ(M) times the top class
    assert multiplication(s2.pd.algebra, mu_A(s2.pd).image("1")) == {"x": Fraction(2)}
    assert multiplication(cp2.pd.algebra, mu_A(cp2.pd).image("1")) == {"x^2": Fraction(3)}


def test_theta_and_its_inverse(cp2):
    t = theta(cp2.pd)
    assert t.degree == -4
    assert t.image("x") == {"x": Fraction(1)}
    inverse = theta_inverse(cp2.pd)
    assert inverse["1"] == {"x^2": Fraction(1)}
    assert inverse["x^2"] == {"1": Fraction(1)}


def test_degree_one_element_is_rejected():
    space = GradedSpace({0: ["1"], 1: ["e"], 2: ["f"], 3: ["g"]})
    model = PDModel(Cdga(space, "1", {}, {}, "bad"), 3, {"g": Fraction(1)})
    violations = validate(model)
    assert violations[0].axiom == "1-connected"
    with pytest.raises(ModelValidationError, match="1-connected input required"):
        ensure_valid(model)


def test_degenerate_pairing():
    model = PDModel(sphere_pd(2).algebra, 2, {})
    with pytest.raises(NotPoincareDualityError) as info:
        ensure_valid(model)
    assert info.value.degree == 0


def test_graded_commutativity_violation():
    space = GradedSpace({0: ["1"], 2: ["a", "b"], 4: ["c"]})
    product = {("a", "b"): {"c": Fraction(1)}, ("b", "a"): {"c": Fraction(-1)}}
    model = PDModel(Cdga(space, "1", product, {}, "twisted"), 4, {"c": Fraction(1)})
    assert "graded-commutativity" in {v.axiom for v in validate(model)}


def test_leibniz_violation():
    space = GradedSpace({0: ["1"], 2: ["a"], 3: ["b"], 5: ["c"]})
    product = {("a", "b"): {"c": Fraction(1)}, ("b", "a"): {"c": Fraction(1)}}
    model = Cdga(space, "1", product, {"a": {"b": Fraction(1)}}, "leaky")
    violations = [v for v in validate(model) if v.axiom == "leibniz"]
    assert violations and violations[0].witness == ("a", "a")


def test_tensor_of_spheres():
    p = tensor(sphere_pd(2, "x"), sphere_pd(3, "y"), "S2xS3")
    assert p.dimension == 5
    assert validate(p) == []
    assert p.algebra.space.basis(5) == ("x·y",)
    assert p.orientation == {"x·y": Fraction(1)}
    assert p.algebra.mul_basis("y", "x") == {"x·y": Fraction(1)}


def test_tensor_sign_on_odd_factors():
    p = tensor(sphere_pd(3, "x"), sphere_pd(3, "y"))
    assert p.algebra.mul_basis("x", "y") == {"x·y": Fraction(1)}
    assert p.algebra.mul_basis("y", "x") == {"x·y": Fraction(-1)}


def test_tensor_needs_distinct_labels():
    with pytest.raises(ValueError):
        tensor(sphere_pd(2), sphere_pd(3))


def test_flipped_orientation_stays_valid(s2):
    flipped = flip_orientation(s2.pd)
    assert flipped.orientation == {"x": Fraction(-1)}
    assert validate(flipped) == []
    assert mu_A(flipped).image("x") == {"x⊗x": Fraction(-1)}


def test_cohomology_dimensions(cp2):
    assert cohomology_dimensions(cp2.pd) == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1}
