"""Numerical check of the four sufficient conditions for a faithful encoding.

Everything is done on index maps rather than dense matrices: the constraint
ground-space projector ``P0`` is diagonal, the logical X chains and the
ancilla controlled-flip unitaries are basis permutations, so every commutator
norm reduces to a maximum over basis states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .codes import ParityCode
from .errors import DimensionCapError, InvalidParameterError
from .gadgets import GadgetGroup
from .metrics import subspace_analysis
from .model import LogicalModel
from .oracles import logical_spectrum
from .program import PhysicalProgram
from .spectral import GROUND_TOL, HilbertSpec, assemble

RESIDUAL_TOL = 1e-9
SPECTRUM_TOL = 1e-8
# the checks work on index maps, not dense matrices, so this is a memory bound only
CONDITIONS_MAX_DIM = 2**20


@dataclass
class ConditionsReport:
    commutator_residual_i: float
    parity_residual_ii: float
    mu_residual_ii: float
    flip_unitary_residual_iii: float
    gap_margin_iv: float
    p0_dimension: int
    D: float
    E0: float
    Eg: float
    Eg_prime: float
    spectrum_residual: float | None
    details: dict = field(default_factory=dict)

    def passed(self, tol: float = RESIDUAL_TOL, spectrum_tol: float = SPECTRUM_TOL) -> dict[str, bool]:
        return {
            "i": self.commutator_residual_i <= tol,
            "ii": max(self.parity_residual_ii, self.mu_residual_ii) <= tol,
            "iii": self.flip_unitary_residual_iii <= tol,
            "iv": self.gap_margin_iv > 0,
            "spectrum": self.spectrum_residual is not None and self.spectrum_residual <= spectrum_tol,
        }

    @property
    def ok(self) -> bool:
        return all(self.passed().values())

    def lines(self) -> list[str]:
        p = self.passed()
        return [
            f"(i)   ||[P0, H]||                 = {self.commutator_residual_i:.3e}  {'ok' if p['i'] else 'FAIL'}",
            f"(ii)  ||(S - nu) P0||, mu check   = {self.parity_residual_ii:.3e}, {self.mu_residual_ii:.3e}  "
            f"{'ok' if p['ii'] else 'FAIL'}",
            f"(iii) controlled-flip commutators = {self.flip_unitary_residual_iii:.3e}  {'ok' if p['iii'] else 'FAIL'}",
            f"(iv)  E'_g - (E0 + E_g)           = {self.gap_margin_iv:.6g}  {'ok' if p['iv'] else 'FAIL'}",
            f"dim P0 = {self.p0_dimension} = 2^N * D with D = {self.D:g}",
            "spectrum match residual         = "
            + ("n/a" if self.spectrum_residual is None else f"{self.spectrum_residual:.3e}")
            + f"  {'ok' if p['spectrum'] else 'FAIL'}",
        ]


def _permutation_commutator(d: np.ndarray, perm: np.ndarray) -> float:
    """Operator norm of ``[diag(d), W]`` for the permutation ``W|x> = |perm[x]>``."""
    return float(np.max(np.abs(d[perm] - d))) if d.size else 0.0


def _ancilla_realigner(group: GadgetGroup, spec: HilbertSpec, index: np.ndarray) -> np.ndarray:
    """Permutation moving, for each face configuration, the ground ancilla
    states of ``group`` onto the lowest ancilla indices (a controlled flip for
    a single qubit ancilla)."""
    table = group.energy_table(scaled=False)
    n_face_states = 2**group.n_face
    n_anc = table.size // n_face_states
    t = table.reshape(n_anc, n_face_states)
    ground = t <= table.min() + GROUND_TOL
    # local permutation pi[c, a_old] = a_new
    pi = np.empty((n_face_states, n_anc), dtype=np.int64)
    for c in range(n_face_states):
        order = np.concatenate([np.flatnonzero(ground[:, c]), np.flatnonzero(~ground[:, c])])
        pi[c, order] = np.arange(n_anc)
    c = np.zeros_like(index)
    mult = 1
    for s in group.face_sites:
        c += mult * spec.digits(s, index)
        mult *= 2
    a = np.zeros_like(index)
    mult = 1
    for s in group.ancilla_sites:
        a += mult * spec.digits(s, index)
        mult *= spec.site_dims[s]
    new_a = pi[c, a]
    out = index.copy()
    rem_old, rem_new = a, new_a
    for s in group.ancilla_sites:
        d = spec.site_dims[s]
        out += (rem_new % d - rem_old % d) * spec.strides[s]
        rem_old, rem_new = rem_old // d, rem_new // d
    return out


def _inverse(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return inv


def _flip(spec: HilbertSpec, sites, index: np.ndarray) -> np.ndarray:
    out = index.copy()
    for s in sites:
        out += spec.strides[s] * (1 - 2 * spec.digits(s, index))
    return out


def check_conditions(
    program: PhysicalProgram,
    code: ParityCode | None = None,
    model: LogicalModel | None = None,
    *,
    max_dim: int = CONDITIONS_MAX_DIM,
) -> ConditionsReport:
    """Evaluate conditions (i)-(iv) and the subspace spectrum match.

    ``model`` is the logical model the program was compiled from; it is
    reconstructed from the program fields when omitted.
    """
    code = code or program.code
    if code is not program.code and not code.same_as(program.code):
        raise InvalidParameterError("program was compiled for a different code")
    if program.total_dim > max_dim:
        raise DimensionCapError(
            f"conditions check on {program.total_dim} states exceeds cap {max_dim}; use N <= 4"
        )
    model = model or recover_model(program)
    spec = HilbertSpec(program.site_dims)
    index = np.arange(spec.total_dim, dtype=np.int64)
    sa = subspace_analysis(program, model)
    m = sa.p0_mask.astype(float)
    n = code.n_logical

    # (i) the final Hamiltonian assembled as a sparse operator, commutator with diag(P0)
    h = assemble(program, 1.0).to_sparse()
    comm = sp.diags(m) @ h - h @ sp.diags(m)
    res_i = float(np.abs(comm.data).max()) if comm.nnz else 0.0

    # (ii) stabiliser eigenvalues on P0 and the sign of every labelled spin
    z = np.stack([spec.z_values(p, index) for p in range(code.n_spins)])
    p0 = sa.p0_mask
    res_ii = 0.0
    for s in code.stabilisers:
        prod = np.prod(z[s.support.indices()][:, p0], axis=0)
        res_ii = max(res_ii, float(np.max(np.abs(prod - s.nu))) if prod.size else 0.0)
    res_mu = 0.0
    for p, lab in enumerate(code.labels):
        pred = lab.mu * np.prod(z[[code.vertex_spin(k) for k in lab.subset]][:, p0], axis=0)
        res_mu = max(res_mu, float(np.max(np.abs(z[p, p0] - pred))) if pred.size else 0.0)

    # (iii) V realigns ancillas, U = V^dagger; W_k = U X_k V
    V = index.copy()
    for g in program.groups:
        if g.n_ancillas:
            V = _ancilla_realigner(g, spec, index)[V]
    U = _inverse(V)
    res_iii = 0.0
    for k in range(1, n + 1):
        zk = z[code.vertex_spin(k)]
        X = _flip(spec, code.logical_x[k - 1].indices(), index)
        W = U[X[V]]
        # [P0, Z_k] vanishes identically: both are diagonal in this basis
        res_iii = max(res_iii, _permutation_commutator(m, W))
        res_iii = max(res_iii, _permutation_commutator(zk, U), _permutation_commutator(zk, V))

    # spectrum: lowest 2^N * D levels of H against E0 + logical spectrum
    p0_dim = sa.p0_dimension
    D = p0_dim / 2**n
    spec_res = None
    if D == int(D) and D >= 1:
        levels = np.sort(sa.final)[:p0_dim]
        target = np.sort(np.repeat(sa.E0 + logical_spectrum(model), int(D)))
        spec_res = float(np.max(np.abs(levels - target)))

    return ConditionsReport(
        res_i, res_ii, res_mu, res_iii, sa.margin, p0_dim, D, sa.E0, sa.Eg, sa.Eg_prime, spec_res,
        details={"variant": program.variant, "Delta": program.Delta, "dim": spec.total_dim},
    )


def recover_model(program: PhysicalProgram) -> LogicalModel:
    """Logical model implied by a program's fields (inverse of ``compile_program``)."""
    code = program.code
    vertex = {code.vertex_spin(k): k for k in range(1, code.n_logical + 1)}
    h = [0.0] * code.n_logical
    terms: dict[frozenset[int], float] = {}
    for p, lab in enumerate(code.labels):
        if p in vertex:
            h[vertex[p] - 1] += program.fields[p]
        else:
            terms[lab.subset] = terms.get(lab.subset, 0.0) + lab.mu * program.fields[p]
    J = {tuple(sorted(k)): v for k, v in terms.items() if len(k) == 2}
    K = {tuple(sorted(k)): v for k, v in terms.items() if len(k) > 2}
    return LogicalModel(code.n_logical, tuple(h), J, K)
