"""Exact diagonalisation over mixed qubit/qutrit registers.

Basis ordering: site 0 is the least significant mixed-radix digit.  A qubit
digit ``d`` means ``z = 1 - 2d`` (digit 0 is spin up); a qutrit digit ``d``
means ``T = 1 - d`` (values +1, 0, -1).

The anneal Hamiltonian is ``H(s) = s * H_final + (1 - s) * driver_sign * sum_i X_i``
where ``X`` is the Pauli X on qubits and the spin-1 ``S_x`` on qutrits.
"""

from __future__ import annotations

import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionCapError, InvalidParameterError, SolverError
from .model import LogicalModel
from .program import PhysicalProgram

DEFAULT_DIM_CAP = 2**26
DENSE_MAX_DIM = 4096
DEFAULT_TOL = 1e-10
DEGENERACY_THRESHOLD = 1e-8
DEFAULT_DRIVER_SIGN = -1
# gadget energies in units of Delta are small rationals; this separates ground from excited
GROUND_TOL = 1e-9
BATCH_DENSE_MAX_DIM = 256

_SX_SPIN1 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class HilbertSpec:
    site_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(d not in (2, 3) for d in self.site_dims):
            raise InvalidParameterError(f"site dimensions must be 2 or 3, got {self.site_dims}")

    @property
    def total_dim(self) -> int:
        return math.prod(self.site_dims)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for d in self.site_dims:
            out.append(acc)
            acc *= d
        return tuple(out)

    def check_cap(self, cap: int = DEFAULT_DIM_CAP) -> None:
        if self.total_dim > cap:
            raise DimensionCapError(f"Hilbert space dimension {self.total_dim} exceeds cap {cap}")

    def digits(self, site: int, index: np.ndarray | None = None) -> np.ndarray:
        if index is None:
            index = np.arange(self.total_dim, dtype=np.int64)
        return (index // self.strides[site]) % self.site_dims[site]

    def z_values(self, site: int, index: np.ndarray | None = None) -> np.ndarray:
        d = self.digits(site, index)
        return (1 - 2 * d if self.site_dims[site] == 2 else 1 - d).astype(float)

    def decode(self, index: int) -> tuple[int, ...]:
        """z value of every site for one basis index."""
        out = []
        for d, st in zip(self.site_dims, self.strides):
            digit = (index // st) % d
            out.append(1 - 2 * digit if d == 2 else 1 - digit)
        return tuple(out)


@dataclass(frozen=True)
class Factor:
    """A diagonal term on a few sites, tabulated over their local mixed-radix basis."""

    sites: tuple[int, ...]
    table: np.ndarray


@dataclass(frozen=True)
class DiagonalTable:
    """z-basis energy function assembled from local factors."""

    spec: HilbertSpec
    factors: tuple[Factor, ...]
    constant: float = 0.0

    def values(self, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
        self.spec.check_cap(cap)
        dim = self.spec.total_dim
        out = np.full(dim, self.constant)
        index = np.arange(dim, dtype=np.int64)
        digit_cache: dict[int, np.ndarray] = {}
        for f in self.factors:
            local = np.zeros(dim, dtype=np.int64)
            mult = 1
            for s in f.sites:
                if s not in digit_cache:
                    digit_cache[s] = self.spec.digits(s, index)
                local += mult * digit_cache[s]
                mult *= self.spec.site_dims[s]
            out += f.table[local]
        return out

    def permuted(self, order: Sequence[int]) -> DiagonalTable:
        """Relabel sites so that new site ``k`` is old site ``order[k]``."""
        order = list(order)
        if sorted(order) != list(range(self.spec.n_sites)):
            raise InvalidParameterError("order must be a permutation of the sites")
        new_of_old = {old: new for new, old in enumerate(order)}
        spec = HilbertSpec(tuple(self.spec.site_dims[o] for o in order))
        factors = tuple(Factor(tuple(new_of_old[s] for s in f.sites), f.table) for f in self.factors)
        return DiagonalTable(spec, factors, self.constant)

    def __add__(self, other: DiagonalTable) -> DiagonalTable:
        if other.spec != self.spec:
            raise InvalidParameterError("cannot add tables over different registers")
        return DiagonalTable(self.spec, self.factors + other.factors, self.constant + other.constant)


def field_table(program: PhysicalProgram) -> DiagonalTable:
    spec = HilbertSpec(program.site_dims)
    factors = tuple(
        Factor((p,), np.array([f, -f])) for p, f in enumerate(program.fields) if f != 0
    )
    return DiagonalTable(spec, factors)


def constraint_table(program: PhysicalProgram) -> DiagonalTable:
    spec = HilbertSpec(program.site_dims)
    factors = tuple(Factor(g.face_sites + g.ancilla_sites, g.energy_table()) for g in program.groups)
    return DiagonalTable(spec, factors)


def constraint_ground_mask(program: PhysicalProgram, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Basis states where every gadget sits at its exact minimum (independent of ``Delta``)."""
    spec = HilbertSpec(program.site_dims)
    factors = []
    for g in program.groups:
        unit = g.energy_table(scaled=False)
        factors.append(Factor(g.face_sites + g.ancilla_sites, (unit > unit.min() + GROUND_TOL).astype(float)))
    return DiagonalTable(spec, tuple(factors)).values(cap) == 0


def program_table(program: PhysicalProgram) -> DiagonalTable:
    return field_table(program) + constraint_table(program)


def logical_table(model: LogicalModel) -> DiagonalTable:
    """The logical model on ``N`` qubits, logical spin ``k`` on site ``k - 1``."""
    spec = HilbertSpec((2,) * model.n)
    factors = [Factor((k,), np.array([h, -h])) for k, h in enumerate(model.h) if h != 0]
    for key, v in model.terms():
        sites = tuple(k - 1 for k in sorted(key))
        loc = np.arange(2 ** len(sites))
        parity = np.zeros_like(loc)
        for a in range(len(sites)):
            parity ^= (loc >> a) & 1
        factors.append(Factor(sites, v * (1 - 2 * parity).astype(float)))
    return DiagonalTable(spec, tuple(factors))


def as_table(system: PhysicalProgram | LogicalModel | DiagonalTable) -> DiagonalTable:
    if isinstance(system, DiagonalTable):
        return system
    if isinstance(system, PhysicalProgram):
        return program_table(system)
    if isinstance(system, LogicalModel):
        return logical_table(system)
    raise TypeError(f"cannot build a diagonal table from {type(system).__name__}")


# -- assembled operators ----------------------------------------------------


@dataclass
class AssembledOperator:
    """``diag(diagonal) + sum_site coeff * X_site``."""

    spec: HilbertSpec
    diagonal: np.ndarray
    generators: list[tuple[int, float]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.spec.total_dim

    @property
    def is_diagonal(self) -> bool:
        return all(c == 0 for _, c in self.generators)

    def offdiagonal_sparse(self) -> sp.csr_matrix:
        dim = self.dim
        rows, cols, vals = [], [], []
        index = np.arange(dim, dtype=np.int64)
        for site, coeff in self.generators:
            if coeff == 0:
                continue
            d = self.spec.digits(site, index)
            st = self.spec.strides[site]
            if self.spec.site_dims[site] == 2:
                rows.append(index)
                cols.append(index + st * (1 - 2 * d))
                vals.append(np.full(dim, coeff))
            else:
                c = coeff / math.sqrt(2.0)
                up = d < 2
                rows += [index[up], index[up] + st]
                cols += [index[up] + st, index[up]]
                vals += [np.full(up.sum(), c)] * 2
        if not rows:
            return sp.csr_matrix((dim, dim))
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )

    def to_sparse(self) -> sp.csr_matrix:
        return (sp.diags(self.diagonal) + self.offdiagonal_sparse()).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


@dataclass(frozen=True)
class AnnealSchedule:
    grid: tuple[float, ...]

    def __post_init__(self) -> None:
        g = tuple(float(s) for s in self.grid)
        if len(g) < 2 or g[0] != 0.0 or g[-1] != 1.0:
            raise InvalidParameterError("schedule grid must start at 0 and end at 1")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise InvalidParameterError("schedule grid must be strictly increasing")
        object.__setattr__(self, "grid", g)

    @classmethod
    def uniform(cls, points: int = 101) -> AnnealSchedule:
        return cls(tuple(np.linspace(0.0, 1.0, points)))


def _driven_sites(spec: HilbertSpec, n_physical: int | None, drive_ancillas: bool) -> list[int]:
    if drive_ancillas or n_physical is None:
        return list(range(spec.n_sites))
    return list(range(n_physical))


def assemble(
    system: PhysicalProgram | LogicalModel | DiagonalTable,
    s: float,
    *,
    driver_sign: int = DEFAULT_DRIVER_SIGN,
    drive_ancillas: bool = True,
    site_order: Sequence[int] | None = None,
    cap: int = DEFAULT_DIM_CAP,
    diagonal: np.ndarray | None = None,
) -> AssembledOperator:
    if not 0.0 <= s <= 1.0:
        raise InvalidParameterError(f"schedule point {s} outside [0, 1]")
    if driver_sign not in (1, -1):
        raise InvalidParameterError("driver_sign must be +1 or -1")
    table = as_table(system)
    n_phys = system.n_physical if isinstance(system, PhysicalProgram) else None
    driven = _driven_sites(table.spec, n_phys, drive_ancillas)
    if site_order is not None:
        table = table.permuted(site_order)
        new_of_old = {old: new for new, old in enumerate(site_order)}
        driven = sorted(new_of_old[d] for d in driven)
    table.spec.check_cap(cap)
    final = diagonal if diagonal is not None else table.values(cap)
    gens = [(site, (1.0 - s) * driver_sign) for site in driven]
    return AssembledOperator(table.spec, s * final, gens)


# -- eigensolvers -----------------------------------------------------------


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    method: str
    iterations: int = 0
    residual: float = 0.0
    degeneracy_threshold: float = DEGENERACY_THRESHOLD
    vectors: np.ndarray | None = None

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def _seeded_start(dim: int, seed: int) -> np.ndarray:
    v = np.random.default_rng(seed).standard_normal(dim)
    return v / np.linalg.norm(v)


def lowest_eigs(
    op: AssembledOperator,
    k: int = 2,
    tol: float = DEFAULT_TOL,
    *,
    dense_max: int = DENSE_MAX_DIM,
    method: str = "auto",
    seed: int = 0,
    max_iter: int | None = None,
    return_vectors: bool = False,
) -> SpectrumResult:
    """``k`` smallest eigenvalues, ascending.

    Dense symmetric solves up to ``dense_max``; beyond that implicitly
    restarted Lanczos (ARPACK) from a seeded start vector, accepted only when
    every residual ``|Hv - lam v|`` is below ``tol * max(1, |lam|)``.
    """
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    dim = op.dim
    k = min(k, dim)
    if method == "auto":
        method = "diagonal" if op.is_diagonal else ("dense" if dim <= dense_max else "lanczos")

    if method == "diagonal":
        if return_vectors:
            order = np.argsort(op.diagonal, kind="stable")[:k]
            vecs = np.zeros((dim, k))
            vecs[order, np.arange(k)] = 1.0
            return SpectrumResult(op.diagonal[order], "diagonal", vectors=vecs)
        vals = np.partition(op.diagonal, k - 1)[:k] if k < dim else op.diagonal.copy()
        return SpectrumResult(np.sort(vals), "diagonal")

    if method == "dense":
        h = op.to_dense()
        if return_vectors:
            w, v = scipy.linalg.eigh(h, subset_by_index=[0, k - 1])
        else:
            w, v = scipy.linalg.eigh(h, subset_by_index=[0, k - 1], eigvals_only=True), None
        res = 0.0
        if v is not None:
            res = float(np.max(np.linalg.norm(h @ v - v * w, axis=0)))
        return SpectrumResult(np.asarray(w), "dense", residual=res, vectors=v)

    if method != "lanczos":
        raise InvalidParameterError(f"unknown method {method!r}")
    w, v, resid, attempts = _lanczos(op.to_sparse(), k, tol, seed, max_iter)
    return SpectrumResult(
        w, "lanczos", iterations=attempts, residual=resid, vectors=v if return_vectors else None
    )


def _lanczos(
    h: sp.csr_matrix, k: int, tol: float, seed: int = 0, max_iter: int | None = None
) -> tuple[np.ndarray, np.ndarray, float, int]:
    """ARPACK with a seeded start; retried with a wider Krylov space until residuals pass."""
    dim = h.shape[0]
    v0 = _seeded_start(dim, seed)
    ncv = min(dim - 1, max(2 * k + 1, 20))
    max_iter = max_iter or 50 * dim
    resid_max = np.inf
    for attempt in range(1, 4):
        try:
            w, v = spla.eigsh(h, k=k, which="SA", v0=v0, ncv=ncv, tol=tol * 1e-2, maxiter=max_iter)
        except spla.ArpackNoConvergence:
            ncv = min(dim - 1, 2 * ncv)
            continue
        order = np.argsort(w)
        w, v = w[order], v[:, order]
        resid = np.linalg.norm(h @ v - v * w, axis=0)
        resid_max = float(resid.max())
        if np.all(resid <= tol * np.maximum(1.0, np.abs(w))):
            return w, v, resid_max, attempt
        ncv = min(dim - 1, 2 * ncv)
    raise SolverError("Lanczos did not reach the residual tolerance", resid_max)


# -- anneal profiles --------------------------------------------------------


@dataclass
class GapProfile:
    s: np.ndarray
    gaps: np.ndarray
    ground: np.ndarray
    min_gap: float
    s_min: float
    degenerate: list[float]
    driver_sign: int
    drive_ancillas: bool
    solver_ms: float = 0.0

    @property
    def flagged(self) -> bool:
        return bool(self.degenerate)

    @property
    def end_gap(self) -> float:
        return float(self.gaps[-1])


def _gaps(low: np.ndarray) -> np.ndarray:
    return low[:, 1] - low[:, 0]


def _batched_dense_lowest(diag: np.ndarray, offdiag: np.ndarray, svals: Sequence[float]) -> np.ndarray:
    svals = np.asarray(svals, dtype=float)
    stack = svals[:, None, None] * np.diag(diag)[None] + (1 - svals)[:, None, None] * offdiag[None]
    return np.linalg.eigvalsh(stack)[:, :2]


def anneal_gap_profile(
    system: PhysicalProgram | LogicalModel | DiagonalTable,
    schedule: AnnealSchedule | None = None,
    *,
    driver_sign: int = DEFAULT_DRIVER_SIGN,
    drive_ancillas: bool = True,
    refine: bool = False,
    degeneracy: float = DEGENERACY_THRESHOLD,
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_DIM_CAP,
) -> GapProfile:
    """Gap ``lambda_1(s) - lambda_0(s)`` on every grid point, and its minimum.

    With ``refine`` the bracket around the grid minimum is narrowed by golden
    section (three extra solves).
    """
    schedule = schedule or AnnealSchedule.uniform()
    t0 = time.perf_counter()
    table = as_table(system)
    final = table.values(cap)
    unit = assemble(system, 0.0, driver_sign=driver_sign, drive_ancillas=drive_ancillas, cap=cap, diagonal=final)
    dim = unit.dim
    grid = np.asarray(schedule.grid)

    if dim <= BATCH_DENSE_MAX_DIM:
        off = unit.offdiagonal_sparse().toarray()

        def solve(svals):
            return _batched_dense_lowest(final, off, svals)
    else:
        off = unit.offdiagonal_sparse()

        def solve(svals):
            out = []
            for s in svals:
                if s == 1.0:
                    out.append(np.sort(np.partition(final, 1)[:2]))
                else:
                    out.append(_lanczos((sp.diags(s * final) + (1 - s) * off).tocsr(), 2, tol)[0])
            return np.asarray(out)

    low = solve(grid)
    gaps = _gaps(low)
    s_all, g_all = list(grid), list(gaps)
    if refine:
        i = int(np.argmin(gaps))
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        phi = (math.sqrt(5) - 1) / 2
        c, d = b - phi * (b - a), a + phi * (b - a)
        gc, gd = _gaps(solve([c, d]))
        # one golden-section step: keep the sub-bracket holding the lower probe
        e = a + (1 - phi) * (d - a) if gc < gd else c + phi * (b - c)
        ge = float(_gaps(solve([e]))[0])
        s_all += [c, d, e]
        g_all += [float(gc), float(gd), ge]
    g_all = np.asarray(g_all)
    degenerate = [float(s) for s, g in zip(s_all, g_all) if g < degeneracy]
    g_all = np.where(g_all < degeneracy, 0.0, g_all)
    j = int(np.argmin(g_all))
    gaps = np.where(gaps < degeneracy, 0.0, gaps)
    return GapProfile(
        grid, gaps, low[:, 0], float(g_all[j]), float(s_all[j]), degenerate,
        driver_sign, drive_ancillas, (time.perf_counter() - t0) * 1e3,
    )
