"""Transfer and composition operators on L1 of a finite space.

Operators are exact rational matrices over the positive atoms; null atoms
vanish in L1 and are dropped.  The transfer operator moves mass forward
through the map, its adjoint composes with the map, and both are bi-Markov.
Power sequences are detected exactly: for permutation-structured matrices
the period is the lcm of the cycle lengths, and anything else falls back to
hashing with a step budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

from .dynamics import MeasurePreservingMap, SigmaSubAlgebra
from .errors import NegativeDensityError, PeriodDetectionError
from .space import (
    ONE,
    ZERO,
    Density,
    FiniteProbabilitySpace,
    MeasurableSet,
    MeasureAlgebraClass,
)


@dataclass(frozen=True)
class MarkovMatrix:
    """A rational matrix acting on densities over the positive atoms.

    Row i holds the coefficients producing the output value at positive atom
    i, so `apply` is a plain row-times-vector product.  `weights` are the
    positive atom masses, fixing the pairing used for adjoints.
    """

    space: FiniteProbabilitySpace
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.space.positive_support)
        if len(self.entries) != d or any(len(row) != d for row in self.entries):
            raise ValueError("matrix shape must match the positive support")

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @cached_property
    def weights(self) -> tuple[Fraction, ...]:
        m = self.space.masses
        return tuple(m[a] for a in self.space.positive_support)

    def apply(self, f: Density) -> Density:
        self.space._require_same(f.space)
        vals = tuple(
            sum((row[j] * f.values[j] for j in range(self.dimension)), ZERO)
            for row in self.entries
        )
        return Density(self.space, vals)

    def compose(self, other: "MarkovMatrix") -> "MarkovMatrix":
        """Matrix product self @ other (apply other first)."""
        self.space._require_same(other.space)
        d = self.dimension
        cols = tuple(zip(*other.entries))
        rows = tuple(
            tuple(sum((row[k] * col[k] for k in range(d)), ZERO) for col in cols)
            for row in self.entries
        )
        return MarkovMatrix(self.space, rows)

    def __matmul__(self, other: "MarkovMatrix") -> "MarkovMatrix":
        return self.compose(other)

    def adjoint(self) -> "MarkovMatrix":
        """The adjoint for the weighted pairing: B[j][i] = w_i A[i][j] / w_j."""
        d = self.dimension
        w = self.weights
        rows = tuple(
            tuple(w[i] * self.entries[i][j] / w[j] for i in range(d))
            for j in range(d)
        )
        return MarkovMatrix(self.space, rows)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for row in self.entries for v in row)

    def preserves_constants(self) -> bool:
        return all(sum(row, ZERO) == ONE for row in self.entries)

    def preserves_integrals(self) -> bool:
        w = self.weights
        d = self.dimension
        return all(
            sum((w[i] * self.entries[i][j] for i in range(d)), ZERO) == w[j]
            for j in range(d)
        )

    def is_bimarkov(self) -> bool:
        """Positive, fixes constants, and the adjoint fixes constants too."""
        return (
            self.is_nonnegative()
            and self.preserves_constants()
            and self.preserves_integrals()
        )

    @cached_property
    def is_identity(self) -> bool:
        return all(
            v == (ONE if i == j else ZERO)
            for i, row in enumerate(self.entries)
            for j, v in enumerate(row)
        )

    def permutation_structure(self) -> tuple[int, ...] | None:
        """If each row is a basis vector, the underlying permutation, else None.

        Row i equal to e_s means (Mf)(i) = f(s), i.e. s is the source feeding
        output slot i.  Requires the source assignment to be a bijection.
        """
        d = self.dimension
        sources = []
        for row in self.entries:
            ones = [j for j, v in enumerate(row) if v == ONE]
            if len(ones) != 1 or any(v != ZERO for j, v in enumerate(row) if j != ones[0]):
                return None
            sources.append(ones[0])
        if len(set(sources)) != d:
            return None
        return tuple(sources)


def identity_matrix(space: FiniteProbabilitySpace) -> MarkovMatrix:
    d = len(space.positive_support)
    return MarkovMatrix(
        space, tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d))
    )


def transfer_operator(phi: MeasurePreservingMap) -> MarkovMatrix:
    """The operator moving densities forward: integrals over A of the output
    equal integrals of the input over phi^-1(A).

    On positive atoms the output value at y collects f(x) mu(x) / mu(y) over
    the positive fiber of y; measure preservation makes this a permutation
    matrix, but the entries are assembled from the defining formula rather
    than from that structural fact.
    """
    space = phi.space
    pos = space.positive_support
    masses = space.masses
    d = len(pos)
    rows = []
    for y in pos:
        row = [ZERO] * d
        for k, x in enumerate(pos):
            if phi.targets[x] == y:
                row[k] = masses[x] / masses[y]
        rows.append(tuple(row))
    return MarkovMatrix(space, tuple(rows))


def koopman_operator(phi: MeasurePreservingMap) -> MarkovMatrix:
    """The composition operator f -> f o phi on the positive atoms."""
    space = phi.space
    pos = space.positive_support
    pos_index = space.positive_index
    d = len(pos)
    rows = []
    for x in pos:
        row = [ZERO] * d
        row[pos_index[phi.targets[x]]] = ONE
        rows.append(tuple(row))
    return MarkovMatrix(space, tuple(rows))


def rank_one_projection(space: FiniteProbabilitySpace) -> MarkovMatrix:
    """The averaging projection f -> integral(f) * 1."""
    pos = space.positive_support
    masses = space.masses
    row = tuple(masses[a] for a in pos)
    return MarkovMatrix(space, tuple(row for _ in pos))


@dataclass(frozen=True)
class LimitReport:
    """Outcome of exact cycle detection on a power sequence.

    `converges` means the eventual cycle has length one; the stabilized
    value is then `limit` (a matrix or a density, matching the sequence).
    """

    converges: bool
    preperiod: int
    period: int
    limit: MarkovMatrix | Density | None


def _detect_cycle(first, step, key, max_steps: int) -> tuple[int, int, list]:
    seen: dict = {}
    seq = []
    cur = first
    for _ in range(max_steps + 1):
        k = key(cur)
        if k in seen:
            pre = seen[k]
            return pre, len(seq) - pre, seq
        seen[k] = len(seq)
        seq.append(cur)
        cur = step(cur)
    raise PeriodDetectionError(f"no repeat within {max_steps} steps")


def _matrix_key(m: MarkovMatrix) -> tuple:
    return tuple(tuple((v.numerator, v.denominator) for v in row) for row in m.entries)


def power_sequence(m: MarkovMatrix, max_steps: int | None = None) -> LimitReport:
    """Exact eventual periodicity of (M^n) starting from M^0 = I.

    Permutation-structured matrices get the analytic answer: powers repeat
    with period lcm(cycle lengths) and no preperiod.  Other matrices are
    hashed step by step under a budget.
    """
    perm = m.permutation_structure()
    if perm is not None:
        period = _permutation_order(perm)
        converges = period == 1
        return LimitReport(
            converges, 0, period, identity_matrix(m.space) if converges else None
        )
    if max_steps is None:
        max_steps = 4096
    ident = identity_matrix(m.space)
    pre, period, seq = _detect_cycle(ident, lambda x: x @ m, _matrix_key, max_steps)
    converges = period == 1
    return LimitReport(converges, pre, period, seq[pre] if converges else None)


def _permutation_order(perm: tuple[int, ...]) -> int:
    seen = [False] * len(perm)
    order = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        order = lcm(order, length)
    return order


def density_power_sequence(
    m: MarkovMatrix, f: Density, max_steps: int | None = None
) -> LimitReport:
    """Exact eventual periodicity of (M^n f); may converge when (M^n) does not."""
    m.space._require_same(f.space)
    if max_steps is None:
        perm = m.permutation_structure()
        max_steps = 4096 if perm is None else _permutation_order(perm) + 1

    def key(g: Density) -> tuple:
        return tuple((v.numerator, v.denominator) for v in g.values)
    pre, period, seq = _detect_cycle(f, m.apply, key, max_steps)
    converges = period == 1
    return LimitReport(converges, pre, period, seq[pre] if converges else None)


def apply_power(m: MarkovMatrix, f: Density, n: int) -> Density:
    if n < 0:
        raise ValueError("n must be nonnegative")
    for _ in range(n):
        f = m.apply(f)
    return f


def cesaro_limit(m: MarkovMatrix, max_steps: int | None = None) -> MarkovMatrix:
    """The limit of the averages (1/n) sum of M^k.

    For an eventually periodic power sequence the preperiod washes out and
    the limit is the plain average over one cycle.
    """
    report = power_sequence(m, max_steps=max_steps)
    power = identity_matrix(m.space)
    for _ in range(report.preperiod):
        power = power @ m
    d = m.dimension
    acc = [[ZERO] * d for _ in range(d)]
    for _ in range(report.period):
        for i in range(d):
            row = power.entries[i]
            for j in range(d):
                acc[i][j] += row[j]
        power = power @ m
    q = Fraction(report.period)
    rows = tuple(tuple(v / q for v in row) for row in acc)
    return MarkovMatrix(m.space, rows)


def conditional_expectation(
    space: FiniteProbabilitySpace, algebra: SigmaSubAlgebra, f: Density
) -> Density:
    """Blockwise averaging against the masses; the defining property
    (equal integrals over every member of the algebra) is checked in tests.
    """
    space._require_same(algebra.space)
    space._require_same(f.space)
    masses = space.masses
    pos_index = space.positive_index
    out = [ZERO] * len(space.positive_support)
    for block in algebra.blocks:
        block_mass = sum((masses[i] for i in block), ZERO)
        if block_mass == 0:
            continue
        total = sum(
            (f.values[pos_index[i]] * masses[i] for i in block if i in pos_index),
            ZERO,
        )
        avg = total / block_mass
        for i in block:
            if i in pos_index:
                out[pos_index[i]] = avg
    return Density(space, tuple(out))


def density_support(f: Density) -> MeasureAlgebraClass:
    """The class of {f > 0}; rejects densities with negative values."""
    if not f.is_nonnegative():
        raise NegativeDensityError("support is defined for nonnegative densities")
    return MeasureAlgebraClass(f.space, f.support_bits())


def fixed_space_dimension(m: MarkovMatrix) -> int:
    """Dimension of {f : Mf = f}, by exact elimination on (M - I)."""
    d = m.dimension
    rows = [
        [m.entries[i][j] - (ONE if i == j else ZERO) for j in range(d)]
        for i in range(d)
    ]
    rank = 0
    for col in range(d):
        pivot = next((r for r in range(rank, d) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col]
        rows[rank] = [v / inv for v in rows[rank]]
        for r in range(d):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == d:
            break
    return d - rank
