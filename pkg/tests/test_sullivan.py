from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from services.cdga import ensure_valid, validate
from services.exceptions import ChainIdentityError, ModelValidationError
from services.model_service import model_service
from services.sullivan import (
    FreeAlgebra,
    SullivanModel,
    bar,
    build_free_loop_model,
    f_map,
    f_map_report,
    formality_images,
    hodge_shift_report,
    hodge_table,
    polynomial_from_labels,
    product_filtration_report,
    truncated_algebra,
)

XBAR = bar("x")
YBAR = bar("y")

mixed = FreeAlgebra([("a", 2), ("b", 3), ("c", 3), ("e", 4), ("f", 5)])
factors = st.lists(st.sampled_from(["a", "b", "c", "e", "f"]), max_size=4)


@pytest.fixture
def free_s2(s2):
    return build_free_loop_model(s2.sullivan, 4)


def test_normal_form_and_labels():
    assert mixed.normalize(["c", "b"]) == (-1, ("b", "c"))
    assert mixed.normalize(["b", "a", "b"]) is None
    assert mixed.normalize(["e", "a", "a"]) == (1, ("a", "a", "e"))
    assert FreeAlgebra.label(("a", "a", "b")) == "a^2·b"
    assert FreeAlgebra.label(()) == "1"
    assert mixed.parse("c*b") == (-1, ("b", "c"))
    assert mixed.parse("a^2 b") == (1, ("a", "a", "b"))
    with pytest.raises(KeyError):
        mixed.parse("z")


@given(factors, factors)
def test_products_agree_with_normal_forms(left, right):
    assert mixed.multiply(mixed.polynomial(left), mixed.polynomial(right)) == mixed.polynomial(left + right)


@given(factors, factors)
def test_free_algebra_is_graded_commutative(left, right):
    p, q = mixed.polynomial(left), mixed.polynomial(right)
    s = (-1) ** (sum(mixed.degrees[g] for g in left) * sum(mixed.degrees[g] for g in right))
    assert mixed.multiply(p, q) == {m: s * c for m, c in mixed.multiply(q, p).items()}


def test_monomials_of_a_degree():
    assert sorted(mixed.monomials(6)) == [("a", "a", "a"), ("a", "e"), ("b", "c")]
    assert mixed.monomials(-1) == []


def test_barred_differential(free_s2):
    assert free_s2.dbar_images[YBAR] == {(XBAR, "x"): Fraction(-2)}
    assert free_s2.dbar.image(YBAR) == {f"{XBAR}·x": Fraction(-2)}
    assert free_s2.dbar.image("y") == {"x^2": Fraction(1)}


def test_s_operator(free_s2):
    assert free_s2.s_map.degree == -1
    assert free_s2.s_map.image("x^2") == {f"{XBAR}·x": Fraction(2)}
    assert free_s2.s_map.image(f"{XBAR}·{YBAR}") == {}
    assert free_s2.weight(f"{XBAR}·{YBAR}") == 2


def test_hodge_table_of_s2(free_s2):
    table = hodge_table(free_s2, 4)
    assert table.totals == {n: 1 for n in range(0, 5)}
    assert table.consistent
    assert table.dim(1, 1) == 1
    assert table.dim(2, 0) == 1
    assert table.dim(3, 2) == 1 and table.dim(3, 1) == 0


def test_hodge_table_of_s3(s3):
    table = hodge_table(build_free_loop_model(s3.sullivan, 6), 6)
    assert table.dims == {(0, 0): 1, (2, 1): 1, (3, 0): 1, (4, 2): 1, (5, 1): 1, (6, 3): 1}
    assert table.weights == [0, 1, 2, 3]


def test_hodge_table_of_cp2(cp2):
    table = hodge_table(build_free_loop_model(cp2.sullivan, 6), 6)
    assert table.consistent
    assert [table.dim(n, 0) for n in range(0, 6)] == [1, 0, 1, 0, 1, 0]


def test_comparison_map(s2):
    fmap = f_map(s2.sullivan, 4)
    assert fmap.image("x[x]") == {f"{XBAR}·x": Fraction(1)}
    assert fmap.image("x[]") == {"x": Fraction(1)}
    report = f_map_report(s2.sullivan, 4)
    assert report.passed, report.first_failure
    assert "H(f) is an isomorphism" in report.checks


def test_truncated_algebra(s2):
    cdga, monomials = truncated_algebra(s2.sullivan, 4)
    assert validate(cdga) == []
    assert monomials["x^2"] == ("x", "x")
    assert cdga.d_basis("y") == {"x^2": Fraction(1)}


def test_hodge_shift_with_the_hochschild_side(s2, free_s2):
    report = hodge_shift_report(free_s2, 4, s2.pd)
    assert report.passed, report.first_failure
    assert "Φ respects word length filtration" in report.checks


def test_square_nonzero_differential_is_rejected():
    model = SullivanModel(
        "broken",
        (("a", 2), ("b", 3), ("c", 2)),
        {"b": {("a", "a"): Fraction(1)}, "c": {("b",): Fraction(1)}},
    )
    violations = validate(model)
    assert [(v.axiom, v.witness) for v in violations] == [("d∘d = 0", ("c",))]
    with pytest.raises(ModelValidationError):
        build_free_loop_model(model, 3)


def test_degree_one_generator_is_rejected():
    model = SullivanModel("circle", (("t", 1),))
    with pytest.raises(ModelValidationError, match="1-connected input required"):
        ensure_valid(model)


def test_differential_of_the_wrong_degree():
    model = SullivanModel("skewed", (("a", 2), ("b", 4)), {"b": {("a",): Fraction(1)}})
    assert validate(model)[0].axiom == "differential-degree"


def test_polynomial_from_labels(s2):
    algebra = s2.sullivan.algebra
    assert polynomial_from_labels(algebra, {"x*x": 3, "x^2": -1}) == {("x", "x"): Fraction(2)}


def test_formality_map_of_s2(s2):
    _, images = formality_images(s2.sullivan, s2.pd, 4)
    assert images["x"] == {"x": Fraction(1)}
    assert images["y"] == {}
    assert images["x^2"] == {}
    assert images["1"] == {"1": Fraction(1)}


def test_formality_map_must_commute_with_d(s2, cp2):
    # x² is nonzero in H*(CP²), so dy = x² cannot go to d(0)
    with pytest.raises(ChainIdentityError, match="ψ∘d = d∘ψ"):
        formality_images(s2.sullivan, cp2.pd, 4)


@pytest.mark.parametrize("name, N", [("S2", 4), ("CP2", 6)])
def test_loop_products_respect_hodge_weights(name, N):
    pair = model_service.builtin(name)
    report = product_filtration_report(pair.pd, pair.sullivan, N)
    assert report.passed, report.first_failure
    assert "product weight is at most the sum of the weights" in report.checks


def test_loop_products_respect_hodge_weights_on_a_product():
    pair = model_service.builtin("S2xS2")
    report = product_filtration_report(pair.pd, pair.sullivan, 5, dict(pair.formality))
    assert report.passed, report.first_failure
    assert "ψ is a quasi-isomorphism" in report.checks
