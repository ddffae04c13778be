"""Compile a logical model and a parity code into a physical program."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .codes import ParityCode
from .errors import ConnectivityError, GadgetError, InvalidParameterError
from .gadgets import (
    DEFAULT_RATIO,
    SITE_FIELD,
    GadgetGroup,
    even_parity_gadget,
    formal_penalty,
    mbody_gadget,
    odd_parity_gadget,
)
from .model import LogicalModel

VARIANTS = ("formal", "even_qutrit", "odd_qubit", "mbody")

# nu policy each built-in variant is designed for
VARIANT_NU = {"even_qutrit": "all_even", "odd_qubit": "all_odd"}


@dataclass(frozen=True)
class Site:
    dim: int
    role: str  # "physical" | "ancilla"
    name: str


@dataclass(frozen=True, eq=False)
class PhysicalProgram:
    code: ParityCode
    sites: tuple[Site, ...]
    fields: tuple[float, ...]  # one per physical spin, from h, mu*J and mu*K
    groups: tuple[GadgetGroup, ...]
    Delta: float
    variant: str
    ratio: Fraction | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def site_dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.sites)

    @property
    def n_physical(self) -> int:
        return self.code.n_spins

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.site_dims, dtype=object))

    def folded_fields(self) -> np.ndarray:
        """Per-site fields with single-site gadget terms folded in."""
        out = np.zeros(len(self.sites))
        out[: self.n_physical] = self.fields
        for g in self.groups:
            glob = g.face_sites + g.ancilla_sites
            for t in g.terms:
                if t.kind == SITE_FIELD:
                    out[glob[t.sites[0]]] += g.Delta * float(t.strength)
        return out


def constraint_groups(
    code: ParityCode,
    variant: str,
    Delta: float,
    ratio: float | Fraction = DEFAULT_RATIO,
    *,
    strict_ratio: bool = True,
) -> list[GadgetGroup]:
    """One gadget per stabiliser, with ancillas not yet assigned global sites."""
    out = []
    for s in code.stabilisers:
        face = s.support.indices()
        if variant == "formal":
            g = formal_penalty(face, s.nu, Delta, s.face_id)
        elif variant == "even_qutrit":
            if s.nu != 1:
                raise GadgetError(f"face {s.face_id}: qutrit gadget enforces nu=+1 only")
            g = even_parity_gadget(face, Delta, s.face_id)
        elif variant == "odd_qubit":
            if s.nu != -1:
                raise GadgetError(f"face {s.face_id}: qubit gadget enforces nu=-1 only")
            g = odd_parity_gadget(face, Delta, ratio, face_id=s.face_id, strict=strict_ratio)
        elif variant == "mbody":
            g = mbody_gadget(face, s.nu, Delta, face_id=s.face_id)
        else:
            raise InvalidParameterError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        out.append(g)
    return out


def compile_program(
    model: LogicalModel,
    code: ParityCode,
    variant: str = "formal",
    Delta: float = 1.0,
    ratio: float | Fraction = DEFAULT_RATIO,
    *,
    strict_ratio: bool = True,
) -> PhysicalProgram:
    """Place ``h_k`` on the vertex spin of logical ``k`` and every coupling
    ``J_L`` / ``K_L`` on the spin(s) labelled ``L``, scaled by their sign.

    When several spins share a label, the coefficient is split equally between
    them (recorded in ``metadata["split_labels"]``).
    """
    if code.labels is None:
        raise InvalidParameterError("code labels not derived")
    if model.n != code.n_logical:
        raise InvalidParameterError(f"model has {model.n} spins, code encodes {code.n_logical}")
    if not Delta >= 0:
        raise InvalidParameterError(f"Delta must be non-negative, got {Delta}")
    fields = np.zeros(code.n_spins)
    for k, hk in enumerate(model.h, start=1):
        fields[code.vertex_spin(k)] += hk
    split = {}
    for key, value in model.terms():
        targets = code.spins_with_label(key)
        if not targets:
            what = "pair" if len(key) == 2 else "subset"
            raise ConnectivityError(f"no physical spin carries the logical {what} {sorted(key)}")
        share = value / len(targets)
        for p in targets:
            fields[p] += code.labels[p].mu * share
        if len(targets) > 1:
            split["-".join(map(str, sorted(key)))] = len(targets)

    # Delta = 0 switches the penalty off but keeps the gadget structure (and its ground space)
    groups = constraint_groups(code, variant, Delta or 1.0, ratio, strict_ratio=strict_ratio)
    if Delta == 0:
        groups = [replace(g, Delta=0.0) for g in groups]
    sites = [Site(2, "physical", str(s)) for s in code.spins]
    placed = []
    for g in groups:
        anc = []
        for a, d in enumerate(g.ancilla_dims):
            anc.append(len(sites))
            sites.append(Site(d, "ancilla", f"{g.face_id}#{a}"))
        placed.append(g.with_sites(g.face_sites, anc))
    r = Fraction(ratio).limit_denominator(10**6) if variant == "odd_qubit" else None
    meta = {"split_labels": split, "split_rule": "equal" if split else None}
    return PhysicalProgram(code, tuple(sites), tuple(fields), tuple(placed), float(Delta), variant, r, meta)


def label_totals(program: PhysicalProgram) -> dict[frozenset[int], float]:
    """Sum of ``mu * field`` over all spins sharing each label (vertex spins excluded)."""
    out: dict[frozenset[int], float] = {}
    vertex = set(program.code.logical_z)
    for p, lab in enumerate(program.code.labels):
        if p in vertex:
            continue
        out[lab.subset] = out.get(lab.subset, 0.0) + lab.mu * program.fields[p]
    return out

