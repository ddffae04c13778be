"""Figures of merit comparing a compiled program with its logical model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import LogicalModel
from .oracles import logical_spectrum
from .program import PhysicalProgram
from .spectral import (
    DEGENERACY_THRESHOLD,
    DEFAULT_DIM_CAP,
    DEFAULT_DRIVER_SIGN,
    AnnealSchedule,
    GapProfile,
    anneal_gap_profile,
    assemble,
    constraint_ground_mask,
    constraint_table,
    field_table,
    lowest_eigs,
)


@dataclass
class SubspaceAnalysis:
    """Split of the final Hamiltonian into the constraint ground space and its complement."""

    E0: float  # ground energy of the constraint part alone
    Eg: float  # logical ground energy
    Eg_prime: float  # lowest final energy outside the constraint ground space
    p0_mask: np.ndarray
    final: np.ndarray  # full s=1 diagonal

    @property
    def margin(self) -> float:
        return self.Eg_prime - (self.E0 + self.Eg)

    @property
    def p0_dimension(self) -> int:
        return int(self.p0_mask.sum())


def subspace_analysis(program: PhysicalProgram, model: LogicalModel, cap: int = DEFAULT_DIM_CAP) -> SubspaceAnalysis:
    constraint = constraint_table(program).values(cap)
    final = constraint + field_table(program).values(cap)
    mask = constraint_ground_mask(program, cap)
    E0 = float(constraint[mask].min())
    outside = final[~mask]
    Eg_prime = float(outside.min()) if outside.size else np.inf
    Eg = float(logical_spectrum(model)[0])
    return SubspaceAnalysis(E0, Eg, Eg_prime, mask, final)


@dataclass
class DeltaEResult:
    e_logic: float
    e_phys: float
    delta_e: float
    margin: float | None = None
    # |e_phys - min(margin, e_logic)|; None when margin < 0, where the ground
    # state leaves the constraint space and the relation has no meaning
    identity_residual: float | None = None


def end_gap(system, cap: int = DEFAULT_DIM_CAP) -> float:
    """``lambda_1 - lambda_0`` of the final (s = 1) Hamiltonian."""
    return lowest_eigs(assemble(system, 1.0, cap=cap), 2).gap


def metric_delta_e(
    model: LogicalModel, program: PhysicalProgram, *, subspace: bool = True, cap: int = DEFAULT_DIM_CAP
) -> DeltaEResult:
    e_logic = end_gap(model)
    e_phys = end_gap(program, cap)
    out = DeltaEResult(e_logic, e_phys, abs(e_logic - e_phys))
    if subspace:
        sa = subspace_analysis(program, model, cap)
        out.margin = sa.margin
        if sa.margin >= 0:
            out.identity_residual = abs(e_phys - min(sa.margin, e_logic))
    return out


LOGIC_DEGENERATE = "logic_degenerate"
PHYS_GAP_CLOSED = "phys_gap_closed"


@dataclass
class ChiResult:
    min_gap_logic: float
    min_gap_phys: float
    chi: float | None
    flags: list[str] = field(default_factory=list)
    logic_profile: GapProfile | None = None
    phys_profile: GapProfile | None = None

    @property
    def excluded(self) -> bool:
        """Excluded from the reciprocal-mean average (either gap vanished)."""
        return bool(self.flags)


def metric_chi(
    model: LogicalModel,
    program: PhysicalProgram,
    schedule: AnnealSchedule | None = None,
    *,
    driver_sign: int = DEFAULT_DRIVER_SIGN,
    drive_ancillas: bool = True,
    refine: bool = False,
    cap: int = DEFAULT_DIM_CAP,
) -> ChiResult:
    """Ratio of the physical to the logical minimum gap under the same schedule.

    A vanishing logical gap leaves ``chi`` undefined (``None``); a vanishing
    physical gap gives ``chi = 0``.  Both are flagged.
    """
    kw = dict(driver_sign=driver_sign, refine=refine)
    lp = anneal_gap_profile(model, schedule, **kw)
    pp = anneal_gap_profile(program, schedule, drive_ancillas=drive_ancillas, cap=cap, **kw)
    flags = []
    if lp.min_gap < DEGENERACY_THRESHOLD:
        flags.append(LOGIC_DEGENERATE)
        chi = None
    else:
        chi = pp.min_gap / lp.min_gap
        if pp.min_gap < DEGENERACY_THRESHOLD:
            flags.append(PHYS_GAP_CLOSED)
    return ChiResult(lp.min_gap, pp.min_gap, chi, flags, lp, pp)


def reciprocal_mean(values) -> float:
    """``1 / mean(1 / x)``: the average used for chi-bar."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return float("nan")
    return float(1.0 / np.mean(1.0 / arr))
