from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from services.exactlin import (
    Complex,
    DegreeMap,
    GradedSpace,
    betti_numbers,
    dual_map,
    format_scalar,
    homology,
    identity_map,
    kernel_basis,
    matmul,
    rank,
    solve,
    to_scalar,
)
from services.exceptions import ChainIdentityError, RangeError

matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda cols: st.lists(
        st.lists(st.integers(min_value=-3, max_value=3), min_size=cols, max_size=cols), min_size=1, max_size=4
    )
)


def small_complex():
    space = GradedSpace({0: ["a"], 1: ["b", "c"], 2: ["e"]})
    d = DegreeMap(space, space, 1, {0: {"a": {"b": 1}}, 1: {}, 2: {}})
    return Complex(space, d, (0, 2))


def test_scalars():
    assert to_scalar("3/4") == Fraction(3, 4)
    assert to_scalar(" -2 ") == Fraction(-2)
    assert format_scalar(Fraction(-6, 4)) == "-3/2"
    assert format_scalar(Fraction(5)) == "5"
    with pytest.raises(ValueError):
        to_scalar("one half")
    with pytest.raises(TypeError):
        to_scalar(0.5)


def test_rank_of_dependent_rows():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0], [0, 1]]) == 2
    assert rank([]) == 0


@given(matrices)
def test_kernel_basis_is_a_kernel(rows):
    basis = kernel_basis(rows)
    assert rank(rows) + len(basis) == len(rows[0])
    for vec in basis:
        assert all(sum(Fraction(a) * v for a, v in zip(row, vec)) == 0 for row in rows)


def test_solve():
    assert solve([[2, 0], [0, 4]], [1, 1]) == [Fraction(1, 2), Fraction(1, 4)]
    assert solve([[1, 1], [1, 1]], [1, 2]) is None


def test_repeated_label_is_rejected():
    with pytest.raises(ValueError):
        GradedSpace({0: ["a"], 2: ["a"]})


def test_image_in_wrong_degree_is_rejected():
    space = GradedSpace({0: ["a"], 1: ["b"], 2: ["c"]})
    with pytest.raises(ValueError):
        DegreeMap(space, space, 1, {0: {"a": {"c": 1}}})


def test_image_outside_defined_degrees_raises():
    space = GradedSpace({0: ["a"], 1: ["b"]})
    d = DegreeMap(space, space, 1, {0: {"a": {"b": 1}}})
    with pytest.raises(RangeError):
        d.image("b")


def test_non_square_zero_differential_is_rejected():
    space = GradedSpace({0: ["a"], 1: ["b"], 2: ["c"]})
    d = DegreeMap(space, space, 1, {0: {"a": {"b": 1}}, 1: {"b": {"c": 1}}})
    with pytest.raises(ChainIdentityError) as info:
        Complex(space, d)
    assert info.value.witness == "a"


def test_homology_of_small_complex():
    c = small_complex()
    assert betti_numbers(c, range(0, 3)) == {0: 0, 1: 1, 2: 1}
    h1 = homology(c, 1)
    assert h1.representatives == ({"c": Fraction(1)},)
    assert h1.coordinates({"b": Fraction(5), "c": Fraction(2)}) == [Fraction(2)]
    with pytest.raises(RangeError):
        homology(c, 3)


def test_homology_is_cached():
    c = small_complex()
    assert homology(c, 1) is homology(c, 1)


def test_composition_with_identity():
    c = small_complex()
    d = c.differential
    assert (d @ identity_map(c.space)).mismatch(d) is None
    assert (identity_map(c.space) @ d).mismatch(d) is None


def test_double_dual_is_the_original_map():
    space = GradedSpace({0: ["a"], 1: ["b", "c"], 2: ["e"]})
    f = DegreeMap(space, space, 1, {0: {"a": {"b": 2, "c": -1}}, 1: {"b": {"e": 3}, "c": {"e": 3}}})
    back = dual_map(dual_map(f))
    assert back.source == f.source and back.target == f.target
    assert back.mismatch(f) is None
    assert dual_map(f).degree == 1


def test_dual_carries_the_koszul_sign():
    space = GradedSpace({0: ["a"], 1: ["b"]})
    f = DegreeMap(space, space, 1, {0: {"a": {"b": 1}}})
    # f^∨(b^∨) = (-1)^{|f||b^∨|} b^∨∘f with |b^∨| = -1
    assert dual_map(f).image("b") == {"a": Fraction(-1)}


def test_dual_of_a_composite_picks_up_the_koszul_sign():
    space = GradedSpace({0: ["a"], 1: ["b", "c"], 2: ["e"]})
    f = DegreeMap(space, space, 1, {0: {"a": {"b": 2, "c": 1}}, 1: {}})
    g = DegreeMap(space, space, 1, {1: {"b": {"e": 3}, "c": {"e": -1}}})
    composite = dual_map(g @ f)
    assert composite.nonzero_witness() is not None
    # (g∘f)^∨ = (-1)^{|f||g|} f^∨∘g^∨
    assert composite.mismatch(dual_map(f) @ dual_map(g), -1) is None
    assert composite.mismatch(dual_map(f) @ dual_map(g)) is not None


def test_matmul():
    assert matmul([[1, 2], [0, 1]], [[1, 0], [3, 1]]) == [[7, 2], [3, 1]]
