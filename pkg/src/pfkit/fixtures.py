"""Small named systems used across tests, demos, and the generator."""

from __future__ import annotations

from fractions import Fraction

from .dynamics import MeasurePreservingMap
from .space import FiniteProbabilitySpace

System = tuple[FiniteProbabilitySpace, MeasurePreservingMap]


def three_point_system() -> System:
    """Three atoms 1, 2, 3 with masses 1/2, 0, 1/2 and 1->1, 2->3, 3->3.

    The workhorse example: transfer powers converge (the positive atoms are
    fixed), yet the null atom drags set orbits to limits that depend on it.
    The set {1, 2} has constant forward images {1, 3} from step one on, and
    its limit class is the class of the whole space, while the equivalent
    set {1} stays put with a strictly smaller limit class.
    """
    space = FiniteProbabilitySpace(
        ("1", "2", "3"), (Fraction(1, 2), Fraction(0), Fraction(1, 2))
    )
    phi = MeasurePreservingMap.from_labels(space, {"1": "1", "2": "3", "3": "3"})
    return space, phi


def two_atom_swap() -> System:
    """Two atoms of mass 1/2 exchanged by the map; powers never converge."""
    space = FiniteProbabilitySpace(("a", "b"), (Fraction(1, 2), Fraction(1, 2)))
    phi = MeasurePreservingMap.from_labels(space, {"a": "b", "b": "a"})
    return space, phi


def identity_system(n: int) -> System:
    """n equal atoms fixed pointwise; convergent but far from ergodic."""
    space = FiniteProbabilitySpace.from_masses([Fraction(1, n)] * n)
    phi = MeasurePreservingMap(space, tuple(range(n)))
    return space, phi


def single_atom_with_nulls(null_count: int = 2) -> System:
    """One full-mass atom plus a chain of null atoms feeding into it."""
    labels = ("p",) + tuple(f"n{i}" for i in range(null_count))
    masses = (Fraction(1),) + (Fraction(0),) * null_count
    space = FiniteProbabilitySpace(labels, masses)
    targets = [0] + list(range(null_count))
    return space, MeasurePreservingMap(space, tuple(targets))
