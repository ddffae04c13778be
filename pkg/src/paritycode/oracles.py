"""Exhaustive reference solvers used to check the fast paths."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError
from .gadgets import SITE_SQUARE, GadgetGroup
from .model import LogicalModel

MAX_BRUTE_FORCE_N = 24
MAX_ORACLE_SITES = 20


def all_configurations(n: int) -> np.ndarray:
    """All +-1 strings of length ``n`` in lexicographic order with +1 before -1."""
    idx = np.arange(2**n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return 1 - 2 * bits


def brute_force_logical_ground(model: LogicalModel) -> tuple[tuple[int, ...], float]:
    """Exact minimiser of the logical energy.

    Ties go to the lexicographically smallest configuration, reading spin 1
    first with +1 ordered before -1 (so an all-zero model returns all-up).
    """
    n = model.n
    if n > MAX_BRUTE_FORCE_N:
        raise InvalidParameterError(f"brute force limited to N <= {MAX_BRUTE_FORCE_N}")
    best_e, best_idx = np.inf, -1
    chunk = 1 << min(n, 20)
    shifts = np.arange(n - 1, -1, -1)
    for start in range(0, 2**n, chunk):
        idx = np.arange(start, min(start + chunk, 2**n), dtype=np.int64)
        cfg = 1 - 2 * ((idx[:, None] >> shifts) & 1)
        e = model.energies(cfg)
        k = int(np.argmin(e))
        if e[k] < best_e:
            best_e, best_idx = float(e[k]), int(idx[k])
    config = tuple(int(1 - 2 * ((best_idx >> s) & 1)) for s in shifts)
    return config, best_e


def logical_spectrum(model: LogicalModel) -> np.ndarray:
    """All ``2^N`` classical energies, sorted."""
    return np.sort(model.energies(all_configurations(model.n)))


def gadget_groundspace_oracle(group: GadgetGroup) -> tuple[object, set[tuple[int, ...]]]:
    """Minimum exact energy (units of Delta) and every local configuration attaining it."""
    if group.n_sites > MAX_ORACLE_SITES:
        raise InvalidParameterError(f"oracle limited to {MAX_ORACLE_SITES} sites, got {group.n_sites}")
    # exact: every strength is rescaled to an integer by the common denominator
    denom = math.lcm(group.constant.denominator, *(t.strength.denominator for t in group.terms))
    cfgs = np.array(list(group.local_states()), dtype=np.int8).reshape(-1, group.n_sites)
    energy = np.full(len(cfgs), int(group.constant * denom), dtype=np.int64)
    for t in group.terms:
        weight = int(t.strength * denom)
        if t.kind == SITE_SQUARE:
            energy += weight * cfgs[:, t.sites[0]].astype(np.int64) ** 2
        else:
            energy += weight * np.prod(cfgs[:, list(t.sites)], axis=1, dtype=np.int64)
    low = energy.min()
    ground = {tuple(int(x) for x in row) for row in cfgs[energy == low]}
    return Fraction(int(low), denom), ground


def target_eigenspace(m: int, target: int) -> set[tuple[int, ...]]:
    return {cfg for cfg in itertools.product((1, -1), repeat=m) if int(np.prod(cfg)) == target}


def projects_onto_target(group: GadgetGroup) -> bool:
    """Ground set restricted to the face spins equals the stabiliser's target eigenspace."""
    _, ground = gadget_groundspace_oracle(group)
    return {cfg[: group.n_face] for cfg in ground} == target_eigenspace(group.n_face, group.target)


MAX_LABEL_ORACLE_SPINS = 22


def valid_configurations(code) -> np.ndarray:
    """Every physical +-1 configuration satisfying all stabiliser constraints."""
    n = code.n_spins
    if n > MAX_LABEL_ORACLE_SPINS:
        raise InvalidParameterError(f"label oracle limited to {MAX_LABEL_ORACLE_SPINS} spins, got {n}")
    cfgs = 1 - 2 * ((np.arange(2**n, dtype=np.int64)[:, None] >> np.arange(n)) & 1)
    ok = np.ones(len(cfgs), dtype=bool)
    for s in code.stabilisers:
        ok &= np.prod(cfgs[:, s.support.indices()], axis=1) == s.nu
    return cfgs[ok]


def label_oracle(code) -> list[tuple[frozenset[int], int] | None]:
    """Per spin, the ``(subset, sign)`` with ``z_p = sign * prod z_vertex(k)``
    on every valid configuration, found by search over all subsets."""
    cfgs = valid_configurations(code)
    vz = cfgs[:, list(code.logical_z)]
    out = []
    for p in range(code.n_spins):
        found = None
        for r in range(code.n_logical + 1):
            for sub in itertools.combinations(range(1, code.n_logical + 1), r):
                prod = np.prod(vz[:, [k - 1 for k in sub]], axis=1) if sub else np.ones(len(cfgs))
                for sign in (1, -1):
                    if np.all(cfgs[:, p] == sign * prod):
                        found = (frozenset(sub), sign)
        out.append(found)
    return out
