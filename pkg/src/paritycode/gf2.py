"""Linear algebra over GF(2) for Z-type stabiliser supports and X-type chains.

Supports are packed into Python integers (bit ``k`` is physical spin ``k``), so
XOR, AND and popcount are single word-level operations regardless of size.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import DimensionError, ParityCodeError

# When set (the test suite does), every solution is re-verified by substitution.
CHECK_SOLUTIONS = False

__all__ = [
    "SupportVector",
    "Gf2Matrix",
    "SolveResult",
    "commutes",
    "overlap_parity",
    "rank",
    "solve",
]


@dataclass(frozen=True)
class SupportVector:
    """Fixed-length bit vector indexed by physical spin."""

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} do not fit in length {self.n}")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> SupportVector:
        bits = 0
        for k in indices:
            if not 0 <= k < n:
                raise IndexError(f"index {k} out of range for length {n}")
            bits ^= 1 << k
        return cls(n, bits)

    @classmethod
    def from_bools(cls, values: Sequence[int | bool]) -> SupportVector:
        return cls.from_indices(len(values), (k for k, v in enumerate(values) if v))

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        out = []
        b, k = self.bits, 0
        while b:
            if b & 1:
                out.append(k)
            b >>= 1
            k += 1
        return out

    def to_list(self) -> list[int]:
        return [(self.bits >> k) & 1 for k in range(self.n)]

    def __getitem__(self, k: int) -> int:
        if not 0 <= k < self.n:
            raise IndexError(k)
        return (self.bits >> k) & 1

    def __contains__(self, k: object) -> bool:
        return isinstance(k, int) and 0 <= k < self.n and bool((self.bits >> k) & 1)

    def _check(self, other: SupportVector) -> None:
        if self.n != other.n:
            raise DimensionError(f"length mismatch: {self.n} vs {other.n}")

    def __xor__(self, other: SupportVector) -> SupportVector:
        self._check(other)
        return SupportVector(self.n, self.bits ^ other.bits)

    def __and__(self, other: SupportVector) -> SupportVector:
        self._check(other)
        return SupportVector(self.n, self.bits & other.bits)

    def __or__(self, other: SupportVector) -> SupportVector:
        self._check(other)
        return SupportVector(self.n, self.bits | other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Hamming weight first, then bit sequence read from index 0 (0 before 1)."""
        return (self.weight, tuple(self.to_list()))

    def __repr__(self) -> str:
        return f"SupportVector(n={self.n}, {self.indices()})"


@dataclass(frozen=True)
class Gf2Matrix:
    rows: tuple[SupportVector, ...]
    n_cols: int

    def __post_init__(self) -> None:
        for r in self.rows:
            if r.n != self.n_cols:
                raise DimensionError(f"row of length {r.n} in matrix with {self.n_cols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[SupportVector], n_cols: int | None = None) -> Gf2Matrix:
        rows = tuple(rows)
        if n_cols is None:
            if not rows:
                raise ValueError("n_cols required for an empty matrix")
            n_cols = rows[0].n
        return cls(rows, n_cols)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> Gf2Matrix:
        return cls.from_rows(SupportVector.from_bools(r) for r in rows)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def matvec(self, x: SupportVector) -> SupportVector:
        if x.n != self.n_cols:
            raise DimensionError(f"vector length {x.n} != {self.n_cols}")
        return SupportVector.from_bools([(r.bits & x.bits).bit_count() & 1 for r in self.rows])


@dataclass(frozen=True)
class SolveResult:
    """Outcome of ``m x = rhs``; ``solution`` is None when the system is infeasible."""

    solution: SupportVector | None
    nullspace: tuple[SupportVector, ...]

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def overlap_parity(a: SupportVector, b: SupportVector) -> int:
    a._check(b)
    return (a.bits & b.bits).bit_count() & 1


def commutes(x_support: SupportVector, z_support: SupportVector) -> bool:
    """An X chain and a Z product commute iff their supports overlap on an even count."""
    return overlap_parity(x_support, z_support) == 0


def _eliminate(rows: list[int], n_cols: int, aug: list[int] | None = None) -> list[int]:
    """Reduce ``rows`` in place to RREF; returns pivot columns, lowest index first."""
    pivots = []
    r = 0
    for col in range(n_cols):
        mask = 1 << col
        pivot = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        if aug is not None:
            aug[r], aug[pivot] = aug[pivot], aug[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
                if aug is not None:
                    aug[i] ^= aug[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(m: Gf2Matrix) -> int:
    return len(_eliminate([r.bits for r in m.rows], m.n_cols))


def solve(m: Gf2Matrix, rhs: SupportVector | Sequence[int]) -> SolveResult:
    """Solve ``m x = rhs`` over GF(2).

    The particular solution sets every free variable to zero; the nullspace
    basis has one vector per free column, in increasing column order.
    """
    if not isinstance(rhs, SupportVector):
        rhs = SupportVector.from_bools(rhs)
    if rhs.n != m.n_rows:
        raise DimensionError(f"rhs length {rhs.n} != number of rows {m.n_rows}")
    rows = [r.bits for r in m.rows]
    aug = [rhs[i] for i in range(m.n_rows)]
    pivots = _eliminate(rows, m.n_cols, aug)
    if any(aug[i] for i in range(len(pivots), len(rows))):
        return SolveResult(None, _nullspace(rows, pivots, m.n_cols))
    x = 0
    for r, col in enumerate(pivots):
        if aug[r]:
            x |= 1 << col
    sol = SupportVector(m.n_cols, x)
    if CHECK_SOLUTIONS and m.matvec(sol) != rhs:
        raise ParityCodeError("GF(2) solve produced a vector that fails substitution")
    return SolveResult(sol, _nullspace(rows, pivots, m.n_cols))


def _nullspace(rows: list[int], pivots: list[int], n_cols: int) -> tuple[SupportVector, ...]:
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for r, col in enumerate(pivots):
            if rows[r] >> free & 1:
                v |= 1 << col
        basis.append(SupportVector(n_cols, v))
    return tuple(basis)
