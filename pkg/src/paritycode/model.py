"""The logical Ising model that an encoding is asked to reproduce."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError


def _key(subset: Iterable[int]) -> frozenset[int]:
    return frozenset(int(k) for k in subset)


@dataclass(frozen=True, eq=False)
class LogicalModel:
    """``H = sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j + sum_S K_S prod_{k in S} Z_k``.

    Logical spins are numbered ``1..n``.  Zero-valued couplings are dropped.
    """

    n: int
    h: tuple[float, ...]
    J: Mapping[frozenset[int], float] = field(default_factory=dict)
    K: Mapping[frozenset[int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidParameterError("model needs at least one logical spin")
        h = tuple(float(x) for x in self.h)
        if len(h) != self.n:
            raise InvalidParameterError(f"{len(h)} fields for {self.n} spins")
        J, K = {}, {}
        for raw, v in self.J.items():
            key = _key(raw)
            if len(key) != 2 or not key <= set(range(1, self.n + 1)):
                raise InvalidParameterError(f"bad coupling key {sorted(key)}")
            if v != 0:
                J[key] = J.get(key, 0.0) + float(v)
        for raw, v in self.K.items():
            key = _key(raw)
            if len(key) < 3 or not key <= set(range(1, self.n + 1)):
                raise InvalidParameterError(f"bad higher-order key {sorted(key)}")
            if v != 0:
                K[key] = K.get(key, 0.0) + float(v)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "K", K)

    @classmethod
    def from_dense(cls, h, J=None, K=None) -> LogicalModel:
        """``J`` may be an ``n x n`` array (upper triangle is read)."""
        n = len(h)
        couplings = {}
        if J is not None:
            J = np.asarray(J, dtype=float)
            for i in range(n):
                for j in range(i + 1, n):
                    couplings[(i + 1, j + 1)] = J[i, j]
        return cls(n, tuple(h), couplings, dict(K or {}))

    def terms(self) -> list[tuple[frozenset[int], float]]:
        """All non-field terms as ``(logical subset, coefficient)``, ordered deterministically."""
        items = list(self.J.items()) + list(self.K.items())
        return sorted(items, key=lambda kv: (len(kv[0]), sorted(kv[0])))

    def energies(self, spins: np.ndarray) -> np.ndarray:
        """Energy of each row of a ``(m, n)`` array of +-1 values."""
        spins = np.asarray(spins, dtype=float)
        e = spins @ np.asarray(self.h)
        for key, v in self.terms():
            idx = [k - 1 for k in sorted(key)]
            e = e + v * np.prod(spins[:, idx], axis=1)
        return e

    def energy(self, config: Iterable[int]) -> float:
        return float(self.energies(np.asarray([list(config)]))[0])

    def coefficient(self, subset: Iterable[int]) -> float:
        key = _key(subset)
        if len(key) == 1:
            return self.h[next(iter(key)) - 1]
        if len(key) == 2:
            return self.J.get(key, 0.0)
        return self.K.get(key, 0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogicalModel):
            return NotImplemented
        return (self.n, self.h, dict(self.J), dict(self.K)) == (other.n, other.h, dict(other.J), dict(other.K))

    __hash__ = None  # type: ignore[assignment]
