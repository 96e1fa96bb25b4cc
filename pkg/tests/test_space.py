from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pfkit import (
    Density,
    FiniteProbabilitySpace,
    NegativeDensityError,
    SpaceMismatchError,
    algebra_distance,
    class_distance,
    class_of,
    constant_density,
    indicator,
    inner,
)

from conftest import spaces

HALF = Fraction(1, 2)


def test_masses_must_sum_to_one():
    with pytest.raises(ValueError):
        FiniteProbabilitySpace(("a", "b"), (HALF, Fraction(1, 3)))


def test_masses_must_be_nonnegative():
    with pytest.raises(ValueError):
        FiniteProbabilitySpace(("a", "b"), (Fraction(3, 2), Fraction(-1, 2)))


def test_labels_must_be_distinct():
    with pytest.raises(ValueError):
        FiniteProbabilitySpace(("a", "a"), (HALF, HALF))


def test_needs_a_positive_atom():
    with pytest.raises(ValueError):
        FiniteProbabilitySpace((), ())


def test_from_masses_default_labels():
    space = FiniteProbabilitySpace.from_masses([HALF, HALF])
    assert space.atom_labels == ("0", "1")


def test_set_algebra(three_point):
    space, _ = three_point
    a = space.set_of(["1", "2"])
    b = space.set_of(["2", "3"])
    assert sorted((a & b).labels()) == ["2"]
    assert sorted((a | b).labels()) == ["1", "2", "3"]
    assert sorted((a - b).labels()) == ["1"]
    assert sorted((a ^ b).labels()) == ["1", "3"]
    assert sorted(a.complement().labels()) == ["3"]
    assert a.contains_atom(space.atom_index("2"))
    assert (a & b).is_subset(b)


def test_measures(three_point):
    space, _ = three_point
    assert space.set_of(["1", "2"]).measure == HALF
    assert space.set_of(["2"]).measure == 0
    assert space.full_set().measure == 1
    assert space.empty_set().measure == 0


def test_null_atoms_vanish_in_classes(three_point):
    space, _ = three_point
    a = space.set_of(["1", "2"])
    assert a.algebra_class() == space.set_of(["1"]).algebra_class()
    assert class_distance(a.algebra_class(), class_of(space.set_of(["1"]))) == 0
    assert a.algebra_class() != space.set_of(["1", "3"]).algebra_class()


def test_distance_is_symmetric_difference_mass(three_point):
    space, _ = three_point
    a = space.set_of(["1", "2"])
    b = space.set_of(["3"])
    assert algebra_distance(a, b) == 1
    assert algebra_distance(a, space.set_of(["1"])) == 0


@given(spaces(), st.data())
def test_distance_metric_axioms(space, data):
    bits = st.integers(0, space.full_mask)
    a = space.set_from_bits(data.draw(bits))
    b = space.set_from_bits(data.draw(bits))
    c = space.set_from_bits(data.draw(bits))
    assert algebra_distance(a, b) == algebra_distance(b, a)
    assert algebra_distance(a, c) <= algebra_distance(a, b) + algebra_distance(b, c)
    assert (algebra_distance(a, b) == 0) == (a.algebra_class() == b.algebra_class())


def test_density_arithmetic(three_point):
    space, _ = three_point
    f = indicator(space, space.set_of(["1"]))
    g = constant_density(space, HALF)
    h = f - g
    assert h.integral() == 0
    assert h.positive_part().integral() == Fraction(1, 4)
    assert h.negative_part().integral() == Fraction(1, 4)
    assert h.l1_norm() == HALF
    assert (f + f).scale(HALF) == f
    assert inner(f, g) == Fraction(1, 4)


def test_density_integral_over(three_point):
    space, _ = three_point
    f = indicator(space, space.set_of(["1"]))
    assert f.integral_over(space.set_of(["1", "2"])) == HALF
    assert f.integral_over(space.set_of(["3"])) == 0


def test_min_positive(three_point):
    space, _ = three_point
    f = indicator(space, space.set_of(["1"]))
    assert f.min_positive() == 1
    zero = constant_density(space, Fraction(0))
    with pytest.raises(NegativeDensityError):
        zero.min_positive()


def test_density_values_live_on_positive_atoms(three_point):
    space, _ = three_point
    f = indicator(space, space.set_of(["2"]))  # null atom only
    assert f == constant_density(space, Fraction(0))
    assert f.support_bits() == 0


def test_cross_space_operations_rejected(three_point):
    space, _ = three_point
    other = FiniteProbabilitySpace.from_masses([HALF, HALF])
    with pytest.raises(SpaceMismatchError):
        space.full_set() & other.full_set()
    with pytest.raises(SpaceMismatchError):
        indicator(space, space.full_set()) + indicator(other, other.full_set())


@given(spaces())
def test_class_representative_has_no_null_atoms(space):
    cls = class_of(space.full_set())
    rep = cls.representative()
    assert rep.bits == space.positive_mask
    assert rep.measure == 1


def test_density_equality_is_exact():
    space = FiniteProbabilitySpace.from_masses([Fraction(1, 3), Fraction(2, 3)])
    f = Density(space, (Fraction(1, 3), Fraction(1, 3)))
    g = constant_density(space, Fraction(1, 3))
    assert f == g
    assert f.integral() == Fraction(1, 3)
