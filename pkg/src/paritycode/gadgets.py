"""Constraint Hamiltonians that enforce one stabiliser each.

Every gadget is a :class:`GadgetGroup`: a list of local terms over the face's
physical spins plus zero or more ancillas.  Strengths are exact rationals in
units of ``Delta``; the group energy is ``Delta * (sum(terms) + constant)``,
with ``constant`` chosen so the minimum is exactly zero.

Local site ``a < M`` is the ``a``-th face spin, ``a >= M`` an ancilla.  Qubit
sites take the values +1/-1, qutrit sites +1/0/-1.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod

import numpy as np

from .errors import GadgetError, InvalidParameterError

QUBIT_VALUES = (1, -1)
QUTRIT_VALUES = (1, 0, -1)

SITE_FIELD = "site_field"
TWO_BODY = "two_body"
SITE_SQUARE = "site_square"  # (T^z)^2 on a qutrit, values 1/0/1
PARITY = "parity"  # product of Z over all face spins (formal penalty only)

DEFAULT_RATIO = Fraction(2)


def local_values(dim: int) -> tuple[int, ...]:
    if dim == 2:
        return QUBIT_VALUES
    if dim == 3:
        return QUTRIT_VALUES
    raise GadgetError(f"unsupported site dimension {dim}")


@dataclass(frozen=True)
class GadgetTerm:
    kind: str
    sites: tuple[int, ...]
    strength: Fraction

    def __post_init__(self) -> None:
        if self.kind == TWO_BODY and (len(self.sites) != 2 or self.sites[0] == self.sites[1]):
            raise GadgetError(f"two-body term needs two distinct sites, got {self.sites}")
        if self.kind in (SITE_FIELD, SITE_SQUARE) and len(self.sites) != 1:
            raise GadgetError(f"{self.kind} term acts on one site, got {self.sites}")

    def value(self, config: Sequence[int]) -> Fraction:
        if self.kind == SITE_SQUARE:
            return self.strength * config[self.sites[0]] ** 2
        return self.strength * prod(config[s] for s in self.sites)


@dataclass(frozen=True)
class SquaredForm:
    """``scale * (sum_a coeffs[a] * z_a + offset) ** 2`` over the group's local sites."""

    coeffs: tuple[Fraction, ...]
    offset: Fraction
    scale: Fraction

    def value(self, config: Sequence[int]) -> Fraction:
        lin = self.offset + sum((c * z for c, z in zip(self.coeffs, config)), Fraction(0))
        return self.scale * lin * lin


@dataclass(frozen=True)
class GadgetGroup:
    variant: str
    n_face: int
    target: int
    ancilla_dims: tuple[int, ...]
    terms: tuple[GadgetTerm, ...]
    constant: Fraction
    Delta: float
    face_sites: tuple[int, ...] = ()
    ancilla_sites: tuple[int, ...] = ()
    face_id: str = ""
    squared: SquaredForm | None = None
    ratio: Fraction | None = None

    @property
    def n_ancillas(self) -> int:
        return len(self.ancilla_dims)

    @property
    def local_dims(self) -> tuple[int, ...]:
        return (2,) * self.n_face + self.ancilla_dims

    @property
    def n_sites(self) -> int:
        return self.n_face + self.n_ancillas

    def local_energy(self, config: Sequence[int]) -> Fraction:
        """Energy in units of ``Delta`` (exact)."""
        return sum((t.value(config) for t in self.terms), Fraction(0)) + self.constant

    def local_states(self):
        return itertools.product(*(local_values(d) for d in self.local_dims))

    def energy_table(self, scaled: bool = True) -> np.ndarray:
        """Float energies over the local mixed-radix basis, multiplied by
        ``Delta`` unless ``scaled`` is false.

        Local site 0 is the least significant digit; digit ``d`` of a qubit is
        the value ``1 - 2d`` and of a qutrit ``1 - d``.
        """
        dims = self.local_dims
        size = prod(dims)
        digits = np.empty((size, len(dims)), dtype=np.int64)
        idx = np.arange(size)
        for a, d in enumerate(dims):
            digits[:, a] = idx % d
            idx = idx // d
        z = np.where(np.array(dims) == 2, 1 - 2 * digits, 1 - digits).astype(float)
        e = np.full(size, float(self.constant))
        for t in self.terms:
            col = z[:, list(t.sites)]
            if t.kind == SITE_SQUARE:
                e += float(t.strength) * col[:, 0] ** 2
            else:
                e += float(t.strength) * np.prod(col, axis=1)
        return self.Delta * e if scaled else e

    def with_sites(self, face_sites: Sequence[int], ancilla_sites: Sequence[int], face_id: str | None = None) -> GadgetGroup:
        if len(face_sites) != self.n_face or len(ancilla_sites) != self.n_ancillas:
            raise GadgetError("site count mismatch when placing gadget")
        return GadgetGroup(
            self.variant, self.n_face, self.target, self.ancilla_dims, self.terms, self.constant,
            self.Delta, tuple(face_sites), tuple(ancilla_sites),
            self.face_id if face_id is None else face_id, self.squared, self.ratio,
        )


def _check_delta(Delta: float) -> None:
    if not Delta > 0:
        raise InvalidParameterError(f"Delta must be positive, got {Delta}")


def _arity(face: Sequence[int] | int) -> tuple[int, tuple[int, ...]]:
    if isinstance(face, int):
        return face, tuple(range(face))
    face = tuple(face)
    return len(face), face


def _min_over_states(dims: Sequence[int], terms: Sequence[GadgetTerm]) -> Fraction:
    best = None
    for cfg in itertools.product(*(local_values(d) for d in dims)):
        e = sum((t.value(cfg) for t in terms), Fraction(0))
        if best is None or e < best:
            best = e
    return best


def expand_square(form: SquaredForm, dims: Sequence[int]) -> tuple[list[GadgetTerm], Fraction]:
    """Multiply out a squared linear form into one- and two-site terms plus a constant."""
    terms, const = [], form.scale * form.offset**2
    c = form.coeffs
    for a in range(len(c)):
        if c[a] == 0:
            continue
        sq = form.scale * c[a] ** 2
        if dims[a] == 2:
            const += sq
        else:
            terms.append(GadgetTerm(SITE_SQUARE, (a,), sq))
        if form.offset:
            terms.append(GadgetTerm(SITE_FIELD, (a,), 2 * form.scale * form.offset * c[a]))
    for a, b in itertools.combinations(range(len(c)), 2):
        if c[a] and c[b]:
            terms.append(GadgetTerm(TWO_BODY, (a, b), 2 * form.scale * c[a] * c[b]))
    return terms, const


def _from_square(variant, n_face, target, ancilla_dims, form, Delta, face_sites, face_id, ratio=None) -> GadgetGroup:
    dims = (2,) * n_face + tuple(ancilla_dims)
    terms, const = expand_square(form, dims)
    # squares are non-negative and the target states reach zero, so const is already the shift
    low = _min_over_states(dims, terms) + const
    if low != 0:
        raise GadgetError(f"{variant} gadget has minimum {low} != 0")
    return GadgetGroup(
        variant, n_face, target, tuple(ancilla_dims), tuple(terms), const, float(Delta),
        face_sites, (), face_id, form, ratio,
    )


def formal_penalty(face: Sequence[int] | int, nu: int, Delta: float, face_id: str = "") -> GadgetGroup:
    """``(Delta/2)(1 - nu S)``: zero on the nu eigenspace, ``Delta`` off it."""
    _check_delta(Delta)
    if nu not in (1, -1):
        raise InvalidParameterError(f"nu must be +-1, got {nu}")
    m, sites = _arity(face)
    term = GadgetTerm(PARITY, tuple(range(m)), Fraction(-nu, 2))
    return GadgetGroup("formal", m, nu, (), (term,), Fraction(1, 2), float(Delta), sites, (), face_id)


def even_parity_gadget(face: Sequence[int] | int, Delta: float, face_id: str = "") -> GadgetGroup:
    """One qutrit ancilla: ``(Delta/4)(4 T + sum z)^2``, with ``+1`` inside for three-spin faces."""
    _check_delta(Delta)
    m, sites = _arity(face)
    if m not in (3, 4):
        raise GadgetError(f"qutrit gadget supports 3- or 4-spin faces, got {m}")
    form = SquaredForm((Fraction(1),) * m + (Fraction(4),), Fraction(int(m == 3)), Fraction(1, 4))
    return _from_square("even_qutrit", m, 1, (3,), form, Delta, sites, face_id)


def odd_parity_gadget(
    face: Sequence[int] | int,
    Delta: float,
    ratio: float | Fraction = DEFAULT_RATIO,
    *,
    face_id: str = "",
    strict: bool = True,
) -> GadgetGroup:
    """One qubit ancilla, pure two-body couplings.

    Face pairs couple at ``Delta/2`` and each face spin couples to the ancilla
    at ``ratio * Delta/2``.  A three-spin face behaves as if a fourth spin were
    pinned to +1, which turns its couplings into single-site fields.  At
    ``ratio = 2`` this is ``(Delta/4)(2 a + sum z [+1])^2`` minus a constant.
    """
    _check_delta(Delta)
    r = Fraction(ratio).limit_denominator(10**6) if not isinstance(ratio, Fraction) else ratio
    if strict and not 1 < r < 3:
        raise GadgetError(f"ratio {float(r)} outside the open window (1, 3)")
    m, sites = _arity(face)
    if m not in (3, 4):
        raise GadgetError(f"qubit gadget supports 3- or 4-spin faces, got {m}")
    pinned = m == 3
    anc = m
    half = Fraction(1, 2)
    terms = [GadgetTerm(TWO_BODY, (a, b), half) for a, b in itertools.combinations(range(m), 2)]
    terms += [GadgetTerm(TWO_BODY, (a, anc), r * half) for a in range(m)]
    if pinned:
        terms += [GadgetTerm(SITE_FIELD, (a,), half) for a in range(m)]
        terms.append(GadgetTerm(SITE_FIELD, (anc,), r * half))
    dims = (2,) * (m + 1)
    const = -_min_over_states(dims, terms)
    form = None
    if r == 2:
        form = SquaredForm((Fraction(1),) * m + (Fraction(2),), Fraction(int(pinned)), Fraction(1, 4))
    return GadgetGroup("odd_qubit", m, -1, (2,), tuple(terms), const, float(Delta), sites, (), face_id, form, r)


def mbody_form(m: int, target: int, n_ancillas: int) -> SquaredForm:
    """Squared linear form for an ``m``-spin stabiliser with qubit ancillas.

    Odd ``m``: ``(sum z - target (1 + 2 sum a))^2``; even ``m``: ``(sum z + 2 sum a)^2``.
    """
    one = Fraction(1)
    if m % 2:
        coeffs = (one,) * m + (Fraction(-2 * target),) * n_ancillas
        offset = Fraction(-target)
    else:
        coeffs = (one,) * m + (Fraction(2),) * n_ancillas
        offset = Fraction(0)
    return SquaredForm(coeffs, offset, Fraction(1, 4))


def _raw_mbody(m: int, target: int, n_ancillas: int, Delta: float = 1.0, sites=None, face_id="") -> GadgetGroup:
    form = mbody_form(m, target, n_ancillas)
    dims = (2,) * (m + n_ancillas)
    terms, const = expand_square(form, dims)
    return GadgetGroup(
        "mbody", m, target, (2,) * n_ancillas, tuple(terms), const, float(Delta),
        tuple(sites) if sites is not None else tuple(range(m)), (), face_id, form,
    )


# oracle-based search is exhaustive over 2^(m+P) states
MAX_AUDIT_SITES = 20


@lru_cache(maxsize=None)
def minimal_ancillas(m: int, target: int) -> int:
    """Smallest qubit-ancilla count whose ground set projects exactly onto the
    ``target`` eigenspace, found by exhaustive enumeration."""
    from .oracles import projects_onto_target

    if m < 3:
        raise InvalidParameterError("multi-body gadgets need m >= 3")
    if target not in (1, -1):
        raise InvalidParameterError(f"target must be +-1, got {target}")
    for p in range(0, m + 1):
        if m + p > MAX_AUDIT_SITES:
            break
        if projects_onto_target(_raw_mbody(m, target, p)):
            return p
    raise GadgetError(f"no ancilla count up to {MAX_AUDIT_SITES - m} enforces m={m}, target={target:+d}")


def mbody_gadget(
    face: Sequence[int] | int,
    target_sign: int,
    Delta: float,
    *,
    n_ancillas: int | None = None,
    face_id: str = "",
) -> GadgetGroup:
    _check_delta(Delta)
    m, sites = _arity(face)
    if m < 3:
        raise GadgetError(f"multi-body gadget needs at least 3 spins, got {m}")
    p = minimal_ancillas(m, target_sign) if n_ancillas is None else n_ancillas
    return _raw_mbody(m, target_sign, p, Delta, sites, face_id)


def stated_ancilla_count(m: int, target: int) -> int:
    """Ancilla counts as commonly stated for this construction, kept for auditing:
    ``(m-1)/2`` for odd ``m``; ``m/2`` (negative) or ``m/2 + 1`` (positive) for even ``m``."""
    if m % 2:
        return (m - 1) // 2
    return m // 2 if target == -1 else m // 2 + 1


@dataclass(frozen=True)
class AuditRow:
    m: int
    target: int
    form: str
    minimal: int
    stated: int
    stated_valid: bool

    @property
    def agrees(self) -> bool:
        return self.minimal == self.stated


def audit_ancilla_counts(max_m: int = 8, min_m: int = 3) -> list[AuditRow]:
    from .oracles import projects_onto_target

    rows = []
    for m in range(min_m, max_m + 1):
        for target in (1, -1):
            stated = stated_ancilla_count(m, target)
            valid = m + stated <= MAX_AUDIT_SITES and projects_onto_target(_raw_mbody(m, target, stated))
            form = "(sum z -+ (1 + 2 sum a))^2" if m % 2 else "(sum z + 2 sum a)^2"
            rows.append(AuditRow(m, target, form, minimal_ancillas(m, target), stated, valid))
    return rows


def format_audit(rows: Sequence[AuditRow]) -> str:
    head = f"{'M':>3} {'sign':>4} {'minimal_P':>9} {'stated_P':>8} {'stated_ok':>9} {'agree':>5}  form"
    lines = [head]
    for r in rows:
        lines.append(
            f"{r.m:>3} {r.target:>+4d} {r.minimal:>9} {r.stated:>8} {str(r.stated_valid):>9} "
            f"{'yes' if r.agrees else 'NO':>5}  {r.form}"
        )
    n_bad = sum(not r.agrees for r in rows)
    lines.append(f"disagreements: {n_bad} of {len(rows)}")
    return "\n".join(lines)
