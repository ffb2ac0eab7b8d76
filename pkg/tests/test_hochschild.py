from fractions import Fraction

import pytest

from services.exceptions import RangeError
from services.hochschild import (
    Cochain,
    build_chain_complex,
    build_cochain_complex,
    coboundary_value,
    cup,
    filtration_report,
    gerstenhaber_report,
    hh_algebra,
    letter_sequences,
    unit_cochain,
    word_label,
)
from services.model_service import model_service


def test_word_labels_and_degrees(s2):
    h = build_chain_complex(s2.pd, 4)
    assert word_label("x", ("x", "x")) == "x[x|x]"
    assert h.word("x[x]").degree == 3
    assert h.filtration("x[x|x]") == 2
    assert "1[]" in h.space.basis(0)


def test_betti_numbers_of_the_free_loop_space_of_s2(s2):
    assert build_chain_complex(s2.pd, 6).betti() == {n: 1 for n in range(0, 7)}


def test_betti_numbers_of_the_free_loop_space_of_s3(s3):
    assert build_chain_complex(s3.pd, 6).betti() == {0: 1, 1: 0, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1}


def test_homology_outside_the_stored_range(s2):
    h = build_chain_complex(s2.pd, 3)
    with pytest.raises(RangeError):
        h.homology(4)
    with pytest.raises(RangeError):
        build_chain_complex(s2.pd, -1)


def test_connes_operator_squares_to_zero(cp2):
    h = build_chain_complex(cp2.pd, 5)
    assert h.connes.degree == -1
    assert (h.connes @ h.connes).nonzero_witness() is None


def test_connes_operator_vanishes_on_unit_heads(s2):
    h = build_chain_complex(s2.pd, 4)
    assert h.connes.image("1[x]") == {}


def test_connes_operator_on_short_words(s2):
    h = build_chain_complex(s2.pd, 4)
    assert h.connes.image("x[]") == {"1[x]": Fraction(1)}
    # the two rotations of x[x] cancel
    assert h.connes.image("x[x]") == {}


def test_chain_dimensions_of_s2(s2):
    h = build_chain_complex(s2.pd, 6)
    assert [h.space.dim(n) for n in range(0, 7)] == [1, 1, 2, 2, 2, 2, 2]


def test_filtration(s3):
    assert filtration_report(build_chain_complex(s3.pd, 5)).passed


def test_cup_with_the_unit(cp2):
    hh = hh_algebra(cp2.pd, 2)
    unit = unit_cochain(cp2.pd.algebra)
    for names in hh.labels.values():
        for label in names:
            f = hh.representative(label)
            assert (cup(unit, f) - f).is_zero()
            assert (cup(f, unit) - f).is_zero()


def test_cochain_coboundary_of_the_unit(s2):
    cochains = build_cochain_complex(s2.pd, 2)
    assert cochains.coboundary(unit_cochain(s2.pd.algebra)).is_zero()


def test_cup_product_table_is_graded_commutative(s2):
    hh = hh_algebra(s2.pd, 2)
    for (x, y), value in hh.products.items():
        flipped = hh.products[(y, x)]
        s = (-1) ** (hh.degree_of(x) * hh.degree_of(y))
        assert value == {k: s * v for k, v in flipped.items()}


def test_gerstenhaber_identities_on_every_triple(s2):
    hh = hh_algebra(s2.pd, 2)
    labels = [label for names in hh.labels.values() for label in names]
    samples = [(x, y, z) for x in labels for y in labels for z in labels]
    report = gerstenhaber_report(hh, samples)
    assert report.passed, report.first_failure
    assert "bracket Jacobi identity" in report.checks


def test_cochain_values_have_the_declared_degree(s2):
    with pytest.raises(ValueError):
        Cochain(s2.pd.algebra, 1, {(): {"1": Fraction(1)}})


def test_cup_is_associative_on_cochains(cp2):
    a = cp2.pd.algebra
    f = Cochain(a, 2, {(): {"x": Fraction(1)}, ("x", "x"): {"x^2": Fraction(-1)}})
    g = Cochain(a, 0, {(): {"1": Fraction(3)}, ("x", "x"): {"x": Fraction(1)}})
    h = Cochain(a, 1, {("x",): {"x": Fraction(1)}, ("x^2",): {"x^2": Fraction(2)}})
    left = cup(cup(f, g), h)
    assert not left.is_zero()
    assert (left - cup(f, cup(g, h))).is_zero()


def test_cochain_degrees_follow_the_bound(s2):
    cochains = build_cochain_complex(s2.pd, 2)
    assert (cochains.space.lo, cochains.space.hi) == (-3, 2)
    assert cochains.homology(-2).dimension == 1
    with pytest.raises(RangeError):
        cochains.homology(-3)


def test_assembled_coboundary_matches_the_direct_formula(cp2):
    a = cp2.pd.algebra
    cochains = build_cochain_complex(a, 2)
    words = [w for found in letter_sequences(a, a.top + 2).values() for w in found]
    for n in range(cochains.space.lo, a.top):
        for label in cochains.space.basis(n):
            f = cochains.cochain({label: Fraction(1)}, n)
            assembled = cochains.coboundary(f)
            for letters in words:
                assert assembled(letters) == coboundary_value(f, letters), (label, letters)


def test_cochains_of_a_product_model():
    pair = model_service.builtin("S2xS2")
    cochains = build_cochain_complex(pair.pd, 3)
    assert cochains.homology(0).dimension == 5
    assert cochains.coboundary(unit_cochain(pair.pd.algebra)).is_zero()
