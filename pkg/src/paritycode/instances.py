"""Seeded random logical instances.

Generator: numpy's PCG64 bit generator seeded with the 64-bit instance seed.
Each coefficient consumes one raw 64-bit output ``r``; ``u = (r >> 11) / (2^53 - 1)``
is uniform on the closed interval ``[0, 1]`` and maps to ``-J + 2 J u``.
Draw order: ``h_1 .. h_N`` then ``J_12, J_13, ..., J_1N, J_23, ..., J_{N-1,N}``.
PCG64 and this mapping are platform independent, so a seed fixes an
instance bit for bit.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import InvalidParameterError
from .model import LogicalModel

SEED_MASK = (1 << 64) - 1
_DENOM = float((1 << 53) - 1)


def uniform_closed(seed: int, count: int) -> np.ndarray:
    """``count`` draws on ``[0, 1]`` from the documented 53-bit mapping."""
    gen = np.random.PCG64(seed & SEED_MASK)
    raw = gen.random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) / _DENOM


def instance_seed(base_seed: int, instance_id: int) -> int:
    return (base_seed ^ instance_id) & SEED_MASK


def generate_instance(n: int, J: float = 1.0, seed: int = 0) -> LogicalModel:
    if not J > 0:
        raise InvalidParameterError(f"J must be positive, got {J}")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    vals = -J + 2.0 * J * uniform_closed(seed, n + len(pairs))
    h = tuple(float(v) for v in vals[:n])
    couplings = {p: float(v) for p, v in zip(pairs, vals[n:])}
    return LogicalModel(n, h, couplings)
