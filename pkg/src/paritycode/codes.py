"""Parity codes: physical spins, Z-type stabilisers and derived logical operators.

A :class:`ParityCode` ties ``N`` logical spins to a larger set of physical
spins.  Logical ``Z_k`` is a single physical spin; the stabilisers fix the
remaining degrees of freedom.  Logical X chains and the per-spin labels (which
product of logical Z operators a physical spin carries, and with what sign) are
derived, never supplied by hand.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from . import gf2
from .errors import (
    CodeDesignError,
    CountMismatchError,
    DependentStabilisersError,
    DimensionError,
    InfeasibleLogicalXError,
    InfeasibleTargetError,
    LabelConsistencyError,
)
from .gf2 import Gf2Matrix, SupportVector

SpinId = Hashable  # (i, j) tuple for built-in layouts, str for custom codes

# beyond this many free directions the minimal-weight search is refused
MAX_NULLSPACE_ENUMERATION = 16


@dataclass(frozen=True)
class Stabiliser:
    support: SupportVector
    nu: int
    face_id: str

    def __post_init__(self) -> None:
        if not self.support:
            raise CodeDesignError(f"stabiliser {self.face_id} has empty support")
        if self.nu not in (1, -1):
            raise CodeDesignError(f"stabiliser {self.face_id}: nu must be +1 or -1, got {self.nu}")

    @property
    def arity(self) -> int:
        return self.support.weight


@dataclass(frozen=True)
class Label:
    """Logical Z product carried by one physical spin, and its sign."""

    subset: frozenset[int]
    mu: int

    def __repr__(self) -> str:
        return f"Label({sorted(self.subset)}, mu={self.mu:+d})"


@dataclass(frozen=True, eq=False)
class ParityCode:
    n_logical: int
    spins: tuple[SpinId, ...]
    stabilisers: tuple[Stabiliser, ...]
    logical_z: tuple[int, ...]
    logical_x: tuple[SupportVector, ...] | None = None
    labels: tuple[Label, ...] | None = None
    name: str = "custom"
    metadata: Mapping[str, object] = field(default_factory=dict)

    @property
    def n_spins(self) -> int:
        return len(self.spins)

    @property
    def n_stabilisers(self) -> int:
        return len(self.stabilisers)

    def index(self, spin: SpinId) -> int:
        try:
            return self._index_map()[spin]
        except KeyError:
            raise KeyError(f"unknown spin {spin!r}") from None

    def _index_map(self) -> dict[SpinId, int]:
        cache = self.__dict__.get("_idx")
        if cache is None:
            cache = {s: k for k, s in enumerate(self.spins)}
            object.__setattr__(self, "_idx", cache)
        return cache

    def support(self, spins: Iterable[SpinId]) -> SupportVector:
        return SupportVector.from_indices(self.n_spins, (self.index(s) for s in spins))

    def vertex_spin(self, k: int) -> int:
        """Physical index carrying logical Z of logical spin ``k`` (1-based)."""
        return self.logical_z[k - 1]

    def label_of(self, spin: SpinId) -> Label:
        if self.labels is None:
            raise CodeDesignError("labels not derived")
        return self.labels[self.index(spin)]

    def spins_with_label(self, subset: Iterable[int]) -> list[int]:
        """All physical indices whose label equals ``subset`` (duplicates allowed)."""
        if self.labels is None:
            raise CodeDesignError("labels not derived")
        target = frozenset(subset)
        return [p for p, lab in enumerate(self.labels) if lab.subset == target]

    def label_multimap(self) -> dict[frozenset[int], list[int]]:
        if self.labels is None:
            raise CodeDesignError("labels not derived")
        out: dict[frozenset[int], list[int]] = defaultdict(list)
        for p, lab in enumerate(self.labels):
            out[lab.subset].append(p)
        return dict(out)

    def same_as(self, other: ParityCode) -> bool:
        """Structural equality: spins, stabilisers, logical Z and derived data."""
        return (
            self.n_logical == other.n_logical
            and self.spins == other.spins
            and self.stabilisers == other.stabilisers
            and self.logical_z == other.logical_z
            and self.logical_x == other.logical_x
            and self.labels == other.labels
        )

    def __repr__(self) -> str:
        return (
            f"ParityCode({self.name!r}, N={self.n_logical}, spins={self.n_spins}, "
            f"stabilisers={self.n_stabilisers})"
        )


def _constraint_matrix(code: ParityCode) -> Gf2Matrix:
    n = code.n_spins
    rows = [s.support for s in code.stabilisers]
    rows += [SupportVector.from_indices(n, [z]) for z in code.logical_z]
    return Gf2Matrix.from_rows(rows, n)


def _check_counts(code: ParityCode) -> None:
    if len(code.logical_z) != code.n_logical:
        raise CountMismatchError(
            f"{len(code.logical_z)} logical Z spins for {code.n_logical} logical spins"
        )
    if len(set(code.logical_z)) != len(code.logical_z):
        raise CodeDesignError("logical Z spins must be distinct")
    expected = code.n_spins - code.n_logical
    if code.n_stabilisers != expected:
        raise CountMismatchError(
            f"{code.n_stabilisers} stabilisers but |spins| - N = {expected}"
        )
    for s in code.stabilisers:
        if s.support.n != code.n_spins:
            raise DimensionError(f"stabiliser {s.face_id} has length {s.support.n}")


def _check_independence(code: ParityCode) -> None:
    # report the first stabiliser that falls into the span of its predecessors
    basis: dict[int, int] = {}  # leading bit -> reduced row
    for s in code.stabilisers:
        v = s.support.bits
        while v:
            lead = v.bit_length() - 1
            if lead not in basis:
                basis[lead] = v
                break
            v ^= basis[lead]
        else:
            raise DependentStabilisersError(
                f"stabiliser {s.face_id} is a product of earlier stabilisers"
            )
    full = gf2.rank(_constraint_matrix(code))
    if full < code.n_spins:
        raise DependentStabilisersError(
            f"stabilisers plus logical Z have rank {full} < {code.n_spins}; "
            "a logical Z spin is fixed by the stabilisers"
        )


def minimal_weight(particular: SupportVector, nullspace: Sequence[SupportVector]) -> SupportVector:
    """Lowest-weight member of ``particular + span(nullspace)``, lexicographic tie-break."""
    if len(nullspace) > MAX_NULLSPACE_ENUMERATION:
        raise CodeDesignError(
            f"nullspace of dimension {len(nullspace)} too large for minimal-weight search"
        )
    best = particular
    for r in range(1, len(nullspace) + 1):
        for combo in itertools.combinations(nullspace, r):
            v = particular
            for b in combo:
                v = v ^ b
            if v.sort_key() < best.sort_key():
                best = v
    return best


def derive_logical_x(code: ParityCode) -> tuple[SupportVector, ...]:
    """Logical X chains: contain ``Z_k``'s spin, avoid other logical Z spins,
    and overlap every stabiliser evenly."""
    m = _constraint_matrix(code)
    n_stab = code.n_stabilisers
    out = []
    for k in range(1, code.n_logical + 1):
        rhs = [0] * n_stab + [int(kk == k) for kk in range(1, code.n_logical + 1)]
        res = gf2.solve(m, rhs)
        if res.solution is None:
            raise InfeasibleLogicalXError(k)
        out.append(minimal_weight(res.solution, res.nullspace))
    return tuple(out)


def _decomposition_matrix(code: ParityCode) -> Gf2Matrix:
    """Columns: logical Z singletons then stabiliser supports; rows: physical spins."""
    n_cols = code.n_logical + code.n_stabilisers
    rows = []
    zpos = {z: k for k, z in enumerate(code.logical_z)}
    for p in range(code.n_spins):
        bits = 0
        if p in zpos:
            bits |= 1 << zpos[p]
        for s_idx, s in enumerate(code.stabilisers):
            if p in s.support:
                bits |= 1 << (code.n_logical + s_idx)
        rows.append(SupportVector(n_cols, bits))
    return Gf2Matrix.from_rows(rows, n_cols)


def decompose_spin(
    code: ParityCode, p: int, _m: Gf2Matrix | None = None
) -> tuple[frozenset[int], tuple[int, ...]]:
    """Write physical ``Z_p`` as (product of logical Z) x (product of stabilisers).

    Returns the logical subset and the indices of the stabilisers used.
    """
    m = _m if _m is not None else _decomposition_matrix(code)
    res = gf2.solve(m, SupportVector.from_indices(code.n_spins, [p]))
    if res.solution is None:
        raise CodeDesignError(f"Z on spin {code.spins[p]!r} is not in the generated group")
    if res.nullspace:
        raise DependentStabilisersError("decomposition is not unique; generators are dependent")
    idx = res.solution.indices()
    subset = frozenset(i + 1 for i in idx if i < code.n_logical)
    stabs = tuple(i - code.n_logical for i in idx if i >= code.n_logical)
    return subset, stabs


def label_spins(code: ParityCode, logical_x: Sequence[SupportVector] | None = None) -> tuple[Label, ...]:
    """Label every physical spin by intersection with the logical X chains, and
    cross-check the subset (and obtain mu) from the GF(2) decomposition."""
    logical_x = logical_x if logical_x is not None else code.logical_x
    if logical_x is None:
        logical_x = derive_logical_x(code)
    labels = []
    m = _decomposition_matrix(code)
    for p in range(code.n_spins):
        by_intersection = frozenset(k + 1 for k, x in enumerate(logical_x) if p in x)
        subset, stabs = decompose_spin(code, p, m)
        if subset != by_intersection:
            raise LabelConsistencyError(
                f"spin {code.spins[p]!r}: intersection gives {sorted(by_intersection)}, "
                f"decomposition gives {sorted(subset)}"
            )
        mu = 1
        for s in stabs:
            mu *= code.stabilisers[s].nu
        labels.append(Label(subset, mu))
    return tuple(labels)


def build_code(
    n_logical: int,
    spins: Sequence[SpinId],
    stabilisers: Sequence[Stabiliser],
    logical_z: Sequence[int],
    *,
    name: str = "custom",
    metadata: Mapping[str, object] | None = None,
) -> ParityCode:
    """Validate a layout and derive its logical X chains and spin labels."""
    if len(set(spins)) != len(spins):
        dup = next(s for s in spins if list(spins).count(s) > 1)
        raise CodeDesignError(f"duplicate spin id {dup!r}")
    raw = ParityCode(
        n_logical, tuple(spins), tuple(stabilisers), tuple(logical_z),
        name=name, metadata=dict(metadata or {}),
    )
    _check_counts(raw)
    _check_independence(raw)
    lx = derive_logical_x(raw)
    labels = label_spins(raw, lx)
    return ParityCode(
        raw.n_logical, raw.spins, raw.stabilisers, raw.logical_z, lx, labels,
        name=name, metadata=raw.metadata,
    )


# -- verification -----------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[CheckResult]
    rank_deficit: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}".rstrip() for c in self.checks]


def verify_code(code: ParityCode) -> VerificationReport:
    checks = []
    n, N = code.n_spins, code.n_logical
    expected = n - N
    checks.append(CheckResult(
        "stabiliser_count", code.n_stabilisers == expected,
        f"{code.n_stabilisers} stabilisers, |spins| - N = {expected}",
    ))
    stab_rank = gf2.rank(Gf2Matrix.from_rows([s.support for s in code.stabilisers], n)) if code.stabilisers else 0
    deficit = code.n_stabilisers - stab_rank
    checks.append(CheckResult(
        "stabiliser_independence", deficit == 0, f"rank {stab_rank} of {code.n_stabilisers}",
    ))
    full = gf2.rank(_constraint_matrix(code)) if code.stabilisers or code.logical_z else 0
    checks.append(CheckResult(
        "full_rank_with_logical_z", full == n, f"rank {full} of {n}",
    ))

    try:
        lx = code.logical_x if code.logical_x is not None else derive_logical_x(code)
    except CodeDesignError as exc:
        checks.append(CheckResult("logical_x_commutation", False, str(exc)))
        checks.append(CheckResult("label_agreement", False, "logical X unavailable"))
        return VerificationReport(checks, deficit)

    bad = []
    for k, x in enumerate(lx, start=1):
        for kk, z in enumerate(code.logical_z, start=1):
            zv = SupportVector.from_indices(n, [z])
            if gf2.commutes(x, zv) == (k == kk):
                bad.append(f"X{k}/Z{kk}")
        for s in code.stabilisers:
            if not gf2.commutes(x, s.support):
                bad.append(f"X{k}/S{s.face_id}")
    checks.append(CheckResult(
        "logical_x_commutation", not bad, ", ".join(bad[:8]) + (" ..." if len(bad) > 8 else ""),
    ))

    try:
        labels = label_spins(code, lx)
        ok = all(labels[z] == Label(frozenset({k}), 1) for k, z in enumerate(code.logical_z, 1))
        checks.append(CheckResult("label_agreement", ok, "" if ok else "logical Z spin mislabelled"))
    except CodeDesignError as exc:
        checks.append(CheckResult("label_agreement", False, str(exc)))
    return VerificationReport(checks, deficit)


# -- syndromes --------------------------------------------------------------


@dataclass(frozen=True)
class SyndromeReport:
    violated: tuple[str, ...]
    satisfied_count: int

    @property
    def clean(self) -> bool:
        return not self.violated


def syndrome(code: ParityCode, z_configuration: Sequence[int]) -> SyndromeReport:
    """Stabilisers whose product over a measured +-1 configuration differs from nu."""
    if len(z_configuration) != code.n_spins:
        raise DimensionError(f"configuration of length {len(z_configuration)} for {code.n_spins} spins")
    down = 0
    for p, v in enumerate(z_configuration):
        if v not in (1, -1):
            raise ValueError(f"spin values must be +-1, got {v!r}")
        if v == -1:
            down |= 1 << p
    violated = []
    for s in code.stabilisers:
        value = -1 if (s.support.bits & down).bit_count() & 1 else 1
        if value != s.nu:
            violated.append(s.face_id)
    return SyndromeReport(tuple(violated), code.n_stabilisers - len(violated))


# -- multi-body extensions --------------------------------------------------


def add_multibody_spin(
    code: ParityCode,
    target: Iterable[int],
    locality: Iterable[SpinId],
    *,
    nu: int = 1,
    spin_id: SpinId | None = None,
    face_id: str | None = None,
) -> ParityCode:
    """Append one spin carrying the logical product ``target``.

    The new stabiliser acts on ``locality`` plus the new spin, so the new
    label is the XOR of the locality labels; it must equal ``target``.
    """
    if code.labels is None:
        raise CodeDesignError("labels not derived")
    target = frozenset(target)
    locality = list(locality)
    if not locality:
        raise InfeasibleTargetError(target)
    acc: frozenset[int] = frozenset()
    for s in locality:
        acc = acc ^ code.label_of(s).subset
    if acc != target:
        raise InfeasibleTargetError(acc ^ target)
    if spin_id is None:
        spin_id = "K" + "-".join(str(k) for k in sorted(target))
        base, n = spin_id, 1
        while spin_id in code._index_map():
            n += 1
            spin_id = f"{base}#{n}"
    n_new = code.n_spins + 1
    widen = lambda v: SupportVector(n_new, v.bits)  # noqa: E731
    stabs = [Stabiliser(widen(s.support), s.nu, s.face_id) for s in code.stabilisers]
    idx = [code.index(s) for s in locality] + [code.n_spins]
    stabs.append(Stabiliser(
        SupportVector.from_indices(n_new, idx), nu, face_id or f"[{spin_id}]",
    ))
    return build_code(
        code.n_logical, code.spins + (spin_id,), stabs, code.logical_z,
        name=code.name + "+multibody", metadata=code.metadata,
    )
