"""Parity-constraint encodings of Ising models: code design, ancilla gadgets
and exact-diagonalisation checks."""

from __future__ import annotations

from .codes import (
    Label,
    ParityCode,
    Stabiliser,
    SyndromeReport,
    VerificationReport,
    add_multibody_spin,
    build_code,
    derive_logical_x,
    label_spins,
    syndrome,
    verify_code,
)
from .conditions import ConditionsReport, check_conditions
from .errors import *  # noqa: F401,F403
from .gadgets import (
    GadgetGroup,
    GadgetTerm,
    audit_ancilla_counts,
    even_parity_gadget,
    formal_penalty,
    mbody_gadget,
    minimal_ancillas,
    odd_parity_gadget,
)
from .gf2 import Gf2Matrix, SupportVector, commutes, rank, solve
from .instances import generate_instance
from .io import dump_code, dump_model, load_custom_code, load_model
from .layouts import build_square_lattice, build_tree_code, build_triangular_lattice
from .metrics import metric_chi, metric_delta_e
from .model import LogicalModel
from .oracles import brute_force_logical_ground, gadget_groundspace_oracle
from .program import PhysicalProgram, compile_program
from .spectral import (
    AnnealSchedule,
    AssembledOperator,
    DiagonalTable,
    HilbertSpec,
    SpectrumResult,
    anneal_gap_profile,
    assemble,
    lowest_eigs,
)
from .sweep import ExperimentConfig, SweepRecord, run_sweep

__version__ = "0.1.0"
