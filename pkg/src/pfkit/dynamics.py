"""Measure-preserving atom maps and setwise dynamics.

A map is a target list over the atoms.  Measure preservation on a finite
space forces the positive atoms to be permuted among equal-mass partners,
while null atoms may land anywhere; the constructor validates the mass
balance atom by atom and caches the induced positive permutation.

Sub-sigma-algebras of a finite power set are in bijection with partitions
of the atoms, so the lattice operations here (invariant algebra, preimage
algebras, their stabilized tail, completions modulo null sets) are all
partition computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal

from .errors import NotMeasurePreservingError
from .space import (
    FiniteProbabilitySpace,
    MeasurableSet,
    MeasureAlgebraClass,
)


@dataclass(frozen=True)
class MeasurePreservingMap:
    """An atom map phi validated to preserve the measure.

    `targets[i]` is the atom index of phi(atom i).  Validation checks, for
    every atom y, that the total mass of the fiber phi^-1({y}) equals the
    mass of y.  On a finite space this is exactly measure preservation.
    """

    space: FiniteProbabilitySpace
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.space.atom_count
        if len(self.targets) != n:
            raise ValueError("target list length must match the atom count")
        for t in self.targets:
            if not 0 <= t < n:
                raise ValueError(f"target index {t} out of range")
        masses = self.space.masses
        fiber_mass = [Fraction(0)] * n
        for x, y in enumerate(self.targets):
            fiber_mass[y] += masses[x]
        for y in range(n):
            if fiber_mass[y] != masses[y]:
                raise NotMeasurePreservingError(
                    self.space.atom_labels[y], masses[y], fiber_mass[y]
                )

    @classmethod
    def from_labels(
        cls, space: FiniteProbabilitySpace, pairs: dict[str, str]
    ) -> "MeasurePreservingMap":
        targets = [0] * space.atom_count
        if set(pairs) != set(space.atom_labels):
            raise ValueError("map must assign a target to every atom")
        for src, dst in pairs.items():
            targets[space.atom_index(src)] = space.atom_index(dst)
        return cls(space, tuple(targets))

    @cached_property
    def image_atom_bits(self) -> tuple[int, ...]:
        """Bitmask of {phi(x)} per atom x."""
        return tuple(1 << t for t in self.targets)

    @cached_property
    def preimage_atom_bits(self) -> tuple[int, ...]:
        """Bitmask of the fiber phi^-1({y}) per atom y."""
        fibers = [0] * self.space.atom_count
        for x, y in enumerate(self.targets):
            fibers[y] |= 1 << x
        return tuple(fibers)

    @cached_property
    def positive_permutation(self) -> tuple[int, ...]:
        """The bijection induced on positive atoms, in positive indexing.

        Entry k is the positive index of phi(positive atom k).  The mass
        balance check already guarantees this is a permutation pairing
        equal-mass atoms.
        """
        pos_index = self.space.positive_index
        return tuple(pos_index[self.targets[a]] for a in self.space.positive_support)

    @cached_property
    def is_positive_identity(self) -> bool:
        return all(p == k for k, p in enumerate(self.positive_permutation))

    def image_bits(self, bits: int) -> int:
        out = 0
        table = self.image_atom_bits
        while bits:
            low = bits & -bits
            out |= table[low.bit_length() - 1]
            bits ^= low
        return out

    def preimage_bits(self, bits: int) -> int:
        out = 0
        table = self.preimage_atom_bits
        while bits:
            low = bits & -bits
            out |= table[low.bit_length() - 1]
            bits ^= low
        return out

    def image(self, a: MeasurableSet) -> MeasurableSet:
        """The literal forward image phi(A)."""
        self.space._require_same(a.space)
        return MeasurableSet(self.space, self.image_bits(a.bits))

    def preimage(self, a: MeasurableSet) -> MeasurableSet:
        """The literal preimage phi^-1(A); preserves the measure exactly."""
        self.space._require_same(a.space)
        return MeasurableSet(self.space, self.preimage_bits(a.bits))

    def iterate_atom(self, atom: int, n: int) -> int:
        for _ in range(n):
            atom = self.targets[atom]
        return atom

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        arrows = ", ".join(
            f"{self.space.atom_labels[x]}->{self.space.atom_labels[y]}"
            for x, y in enumerate(self.targets)
        )
        return f"MeasurePreservingMap({arrows})"


def check_measure_preserving(
    space: FiniteProbabilitySpace, targets: Iterable[int]
) -> MeasurePreservingMap:
    """Validate a target list; raises NotMeasurePreservingError on failure."""
    return MeasurePreservingMap(space, tuple(targets))


@dataclass(frozen=True)
class SigmaSubAlgebra:
    """A sub-sigma-algebra of the power set, stored as its atom partition.

    A subset belongs to the algebra exactly when it is a union of blocks.
    Blocks are kept in a canonical order (sorted by smallest member) so that
    equality of partitions is structural equality.
    """

    space: FiniteProbabilitySpace
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        seen = 0
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            b = 0
            for i in block:
                b |= 1 << i
            if b & seen:
                raise ValueError("blocks overlap")
            seen |= b
        if seen != self.space.full_mask:
            raise ValueError("blocks must cover every atom")

    @classmethod
    def from_blocks(
        cls, space: FiniteProbabilitySpace, blocks: Iterable[Iterable[int]]
    ) -> "SigmaSubAlgebra":
        canon = tuple(
            sorted((tuple(sorted(set(b))) for b in blocks), key=lambda b: b[0])
        )
        return cls(space, canon)

    @cached_property
    def block_bits(self) -> tuple[int, ...]:
        out = []
        for block in self.blocks:
            b = 0
            for i in block:
                b |= 1 << i
            out.append(b)
        return tuple(out)

    @cached_property
    def block_of_atom(self) -> tuple[int, ...]:
        owner = [0] * self.space.atom_count
        for bi, block in enumerate(self.blocks):
            for i in block:
                owner[i] = bi
        return tuple(owner)

    def contains_set(self, a: MeasurableSet) -> bool:
        """Membership test: A is in the algebra iff it is a union of blocks."""
        self.space._require_same(a.space)
        for b in self.block_bits:
            inter = a.bits & b
            if inter != 0 and inter != b:
                return False
        return True

    def member_sets(self) -> Iterable[MeasurableSet]:
        """All sets of the algebra (2^blocks of them); test-scale only."""
        nb = len(self.blocks)
        for mask in range(1 << nb):
            bits = 0
            for bi in range(nb):
                if mask >> bi & 1:
                    bits |= self.block_bits[bi]
            yield MeasurableSet(self.space, bits)

    def refines(self, coarser: "SigmaSubAlgebra") -> bool:
        """True when every block of `coarser` is a union of blocks of self.

        Equivalent to `coarser` being a subfamily of self as a set algebra.
        """
        self.space._require_same(coarser.space)
        owner = self.block_of_atom
        for block in coarser.blocks:
            first = owner[block[0]]
            blk = self.block_bits
            bits = 0
            for i in block:
                bits |= 1 << i
            union = 0
            for i in block:
                union |= blk[owner[i]]
            if union != bits:
                return False
        return True

    def completion(self) -> "SigmaSubAlgebra":
        """Completion modulo null sets, within the power set.

        A set differs from a member by a null set iff it agrees with a member
        on the positive support, so the completion is the refinement that
        splits every null atom into its own singleton block.
        """
        posmask = self.space.positive_mask
        blocks: list[tuple[int, ...]] = []
        for block in self.blocks:
            kept = tuple(i for i in block if posmask >> i & 1)
            if kept:
                blocks.append(kept)
            for i in block:
                if not posmask >> i & 1:
                    blocks.append((i,))
        return SigmaSubAlgebra.from_blocks(self.space, blocks)

    def positive_blocks(self) -> tuple[tuple[int, ...], ...]:
        """Blocks intersected with the positive support, empty ones dropped."""
        posmask = self.space.positive_mask
        out = []
        for block in self.blocks:
            kept = tuple(i for i in block if posmask >> i & 1)
            if kept:
                out.append(kept)
        return tuple(sorted(out, key=lambda b: b[0]))


def completion_mod_null(algebra: SigmaSubAlgebra) -> SigmaSubAlgebra:
    return algebra.completion()


def completions_equal(a: SigmaSubAlgebra, b: SigmaSubAlgebra) -> bool:
    """Whether two algebras have the same completion modulo null sets.

    Both completions share the split-null-singleton structure, so equality
    reduces to equality of the partitions restricted to positive atoms.
    """
    a.space._require_same(b.space)
    return a.positive_blocks() == b.positive_blocks()


def invariant_algebra(phi: MeasurePreservingMap) -> SigmaSubAlgebra:
    """The algebra of strictly invariant sets, A = phi^-1(A).

    Membership of an atom propagates both ways along the arrow x -> phi(x),
    so the invariant sets are exactly the unions of weakly connected
    components of the functional graph.
    """
    n = phi.space.atom_count
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for x, y in enumerate(phi.targets):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return SigmaSubAlgebra.from_blocks(phi.space, groups.values())


def preimage_algebra(phi: MeasurePreservingMap, n: int) -> SigmaSubAlgebra:
    """The algebra {phi^-n(A)}: the partition into fibers of the n-fold map."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    fibers: dict[int, list[int]] = {}
    for x in range(phi.space.atom_count):
        fibers.setdefault(phi.iterate_atom(x, n), []).append(x)
    return SigmaSubAlgebra.from_blocks(phi.space, fibers.values())


def tail_algebra(phi: MeasurePreservingMap) -> tuple[SigmaSubAlgebra, int]:
    """The stabilized decreasing chain of preimage algebras.

    The chain loses blocks exactly while the forward range shrinks, so it
    stabilizes in at most atom-count steps; two equal consecutive terms stay
    equal forever after.  Returns (algebra, index at which it stabilized).
    """
    prev = preimage_algebra(phi, 0)
    for n in range(1, phi.space.atom_count + 2):
        cur = preimage_algebra(phi, n)
        if cur.blocks == prev.blocks:
            return prev, n - 1
        prev = cur
    raise AssertionError("preimage chain failed to stabilize within the bound")


@dataclass(frozen=True)
class OrbitReport:
    """Eventually periodic trajectory of a set under repeated image/preimage.

    `orbit_sets` lists the literal sets from step 0 through the end of the
    first full cycle; `set_at` extends it to arbitrary n by periodicity.
    `limit_class` is present exactly when the cycle is constant modulo null
    sets, which on a finite space is the same as metric convergence.
    """

    preperiod: int
    period: int
    orbit_sets: tuple[MeasurableSet, ...]
    limit_class: MeasureAlgebraClass | None = field(default=None)

    def __post_init__(self) -> None:
        if self.period < 1 or self.preperiod < 0:
            raise ValueError("bad orbit shape")
        if len(self.orbit_sets) != self.preperiod + self.period:
            raise ValueError("orbit_sets must cover preperiod plus one cycle")

    @property
    def converges(self) -> bool:
        return self.limit_class is not None

    def set_at(self, n: int) -> MeasurableSet:
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n < len(self.orbit_sets):
            return self.orbit_sets[n]
        return self.orbit_sets[self.preperiod + (n - self.preperiod) % self.period]


Direction = Literal["forward", "backward"]


def set_orbit(
    phi: MeasurePreservingMap, a: MeasurableSet, direction: Direction = "forward"
) -> OrbitReport:
    """Follow phi^n(A) (or phi^-n(A)) until the literal set repeats.

    The step map is a function on a finite set of bitmasks, so the orbit is
    eventually periodic; the first repeat pins down preperiod and period.
    """
    phi.space._require_same(a.space)
    if direction == "forward":
        step = phi.image_bits
    elif direction == "backward":
        step = phi.preimage_bits
    else:
        raise ValueError(f"unknown direction {direction!r}")

    seen: dict[int, int] = {}
    seq: list[int] = []
    cur = a.bits
    while cur not in seen:
        seen[cur] = len(seq)
        seq.append(cur)
        cur = step(cur)
    preperiod = seen[cur]
    period = len(seq) - preperiod

    posmask = phi.space.positive_mask
    cycle_classes = {bits & posmask for bits in seq[preperiod:]}
    limit = None
    if len(cycle_classes) == 1:
        limit = MeasureAlgebraClass(phi.space, cycle_classes.pop())
    sets = tuple(MeasurableSet(phi.space, bits) for bits in seq)
    return OrbitReport(preperiod, period, sets, limit)


def minimal_invariant_superset(
    phi: MeasurePreservingMap, a: MeasurableSet
) -> MeasurableSet:
    """The smallest strictly invariant set containing A.

    Saturate forward images, then saturate preimages of the result; both
    unions grow monotonically so each loop ends within atom-count steps.
    The outcome equals the union of the weakly connected components that
    meet A, which the tests use as an independent oracle.
    """
    phi.space._require_same(a.space)
    fwd = a.bits
    while True:
        nxt = fwd | phi.image_bits(fwd)
        if nxt == fwd:
            break
        fwd = nxt
    full = fwd
    while True:
        nxt = full | phi.preimage_bits(full)
        if nxt == full:
            break
        full = nxt
    return MeasurableSet(phi.space, full)


def invariant_version(phi: MeasurePreservingMap, a: MeasurableSet) -> MeasurableSet:
    """The liminf of the preimage orbit: union over n of inter_{k>=n} phi^-k(A).

    The backward orbit is eventually periodic, and the inner intersections
    increase to the intersection of one full cycle, which is the returned
    set.  It is always strictly invariant; whenever A is equivalent to its
    own preimage modulo null sets, it is also equivalent to A.
    """
    phi.space._require_same(a.space)
    orbit = set_orbit(phi, a, direction="backward")
    bits = phi.space.full_mask
    for j in range(orbit.period):
        bits &= orbit.orbit_sets[orbit.preperiod + j].bits
    return MeasurableSet(phi.space, bits)
