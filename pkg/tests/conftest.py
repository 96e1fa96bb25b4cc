from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from pfkit import (
    FiniteProbabilitySpace,
    MeasurePreservingMap,
    SystemGenerator,
    three_point_system,
    two_atom_swap,
)

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture
def three_point():
    return three_point_system()


@pytest.fixture
def swap():
    return two_atom_swap()


@st.composite
def spaces(draw, max_positive=5, max_null=3, denominator_bound=12):
    """Random space with exact masses: a composition of the denominator
    into positive parts, padded with null atoms."""
    n_pos = draw(st.integers(1, max_positive))
    q = draw(st.integers(n_pos, denominator_bound))
    if n_pos == 1:
        cuts = []
    else:
        cuts = sorted(
            draw(
                st.lists(
                    st.integers(1, q - 1),
                    min_size=n_pos - 1,
                    max_size=n_pos - 1,
                    unique=True,
                )
            )
        )
    bounds = [0] + cuts + [q]
    masses = [Fraction(bounds[i + 1] - bounds[i], q) for i in range(n_pos)]
    masses += [Fraction(0)] * draw(st.integers(0, max_null))
    order = draw(st.permutations(range(len(masses))))
    masses = [masses[i] for i in order]
    return FiniteProbabilitySpace.from_masses(masses)


@st.composite
def systems(draw, **space_kwargs):
    space = draw(spaces(**space_kwargs))
    by_mass: dict[Fraction, list[int]] = {}
    for a in space.positive_support:
        by_mass.setdefault(space.masses[a], []).append(a)
    targets = [0] * space.atom_count
    for members in by_mass.values():
        image = draw(st.permutations(members))
        for src, dst in zip(members, image):
            targets[src] = dst
    for a in range(space.atom_count):
        if space.masses[a] == 0:
            targets[a] = draw(st.integers(0, space.atom_count - 1))
    return space, MeasurePreservingMap(space, tuple(targets))


@st.composite
def subsets(draw, space):
    return space.set_from_bits(draw(st.integers(0, space.full_mask)))


def generated_systems(count=40, seed=2024, **kwargs):
    gen = SystemGenerator(seed, **kwargs)
    return [gen.system(i) for i in range(count)]
