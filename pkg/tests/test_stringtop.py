from fractions import Fraction

import pytest

from services.cdga import flip_orientation, mu_A
from services.exceptions import RangeError
from services.hochschild import build_chain_complex
from services.model_service import model_service
from services.stringtop import (
    bracket_transport_report,
    bv_bracket,
    loop_algebra,
    phi,
    phi_filtration_report,
    transport_to_hh,
    verify_bv,
)


@pytest.fixture
def ls2(s2):
    return loop_algebra(s2.pd, 4)


@pytest.fixture
def ls3(s3):
    return loop_algebra(s3.pd, 5)


def test_phi_on_a_bare_head(s2):
    h = build_chain_complex(s2.pd, 3)
    phimap = phi(h, mu_A(s2.pd))
    assert phimap.degree == 2
    assert phimap.image("x[]") == {("x[]", "x[]"): Fraction(1)}
    assert phimap.image("1[x]") == {
        ("1[]", "x[x]"): Fraction(1),
        ("x[]", "1[x]"): Fraction(1),
        ("1[x]", "x[]"): Fraction(1),
        ("x[x]", "1[]"): Fraction(1),
    }


def test_phi_filtration(cp2):
    h = build_chain_complex(cp2.pd, 6)
    assert phi_filtration_report(phi(h, mu_A(cp2.pd))).passed


def test_loop_homology_is_regraded_by_the_dimension(ls2):
    assert (ls2.lo, ls2.hi) == (-2, 2)
    assert all(len(ls2.basis(p)) == 1 for p in range(-2, 3))
    assert set(ls2.unit) == {"L0#0"}


def test_degree_bound_below_the_dimension(s3):
    with pytest.raises(RangeError):
        loop_algebra(s3.pd, 2)


def test_bv_axioms_for_s2(ls2):
    report = verify_bv(ls2)
    assert report.passed, report.first_failure
    for check in ("unit", "graded commutativity", "associativity", "Δ∘Δ = 0", "Poisson rule"):
        assert check in report.checks


def test_bv_axioms_for_s3(ls3):
    report = verify_bv(ls3)
    assert report.passed, report.first_failure


def test_bv_axioms_survive_a_flipped_orientation(s2):
    assert verify_bv(loop_algebra(flip_orientation(s2.pd), 4)).passed


def test_rational_products_on_the_loop_homology_of_s2(ls2):
    # the top class of the base kills the degree-two class, the odd class does not
    assert ls2.product[("L-2#0", "L2#0")] == {}
    assert ls2.product[("L-1#0", "L2#0")]
    assert ls2.product[("L-1#0", "L-1#0")] == {}


def test_loop_homology_of_s3(ls3):
    assert [len(ls3.basis(p)) for p in range(-3, 3)] == [1, 0, 1, 1, 1, 1]
    assert ls3.product[("L-3#0", "L2#0")]
    assert not ls3.apply_delta(ls3.unit)
    # Δ sends the degree -1 class onto a multiple of the unit
    image = ls3.delta.image("L-1#0")
    assert image and set(image) == set(ls3.unit)


def test_bracket_needs_homogeneous_arguments(ls3):
    with pytest.raises(ValueError):
        bv_bracket(ls3, {"L-3#0": Fraction(1), "L0#0": Fraction(1)}, {"L0#0": Fraction(1)})
    assert bv_bracket(ls3, {}, {"L0#0": Fraction(1)}) == {}


def test_transport_to_hochschild_cohomology(s3, ls3):
    report = transport_to_hh(s3.pd, 5, ls3)
    assert report.passed, report.first_failure
    assert "unit maps to the unit cochain" in report.checks


@pytest.mark.parametrize("name, N", [("S2", 4), ("CP2", 6)])
def test_transport_on_even_dimensional_models(name, N):
    pd = model_service.builtin(name).pd
    report = transport_to_hh(pd, N)
    assert report.passed, report.first_failure
    assert "loop product matches cup product" in report.checks


def test_bracket_transport_on_s2(s2, ls2):
    report = bracket_transport_report(s2.pd, 4, ls2)
    assert report.passed, report.first_failure
    assert "bracket is (-1)^(m+1) = -1 times the Gerstenhaber bracket" in report.checks


def test_bracket_transport_on_s3(s3, ls3):
    report = bracket_transport_report(s3.pd, 5, ls3)
    assert report.passed, report.first_failure
    assert "bracket is (-1)^(m+1) = +1 times the Gerstenhaber bracket" in report.checks
