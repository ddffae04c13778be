from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paritycode.errors import ConnectivityError, GadgetError, InvalidParameterError
from paritycode.instances import generate_instance
from paritycode.io import load_example_code, program_to_dict
from paritycode.layouts import build_square_lattice, build_tree_code
from paritycode.model import LogicalModel
from paritycode.program import compile_program, label_totals


def test_all_odd_field_sign_flipped():
    code = build_square_lattice(3, "all_odd")
    model = LogicalModel(3, (0.0, 0.0, 0.0), {(1, 2): 0.7})
    prog = compile_program(model, code, "formal", 1.0)
    assert prog.fields[code.index((1, 2))] == pytest.approx(-0.7)


def test_all_even_places_couplings_directly():
    code = build_square_lattice(4)
    model = generate_instance(4, 1.0, seed=11)
    prog = compile_program(model, code, "even_qutrit", 2.0)
    for k in range(1, 5):
        assert prog.fields[code.index((0, k))] == model.h[k - 1]
    for i, j in itertools.combinations(range(1, 5), 2):
        assert prog.fields[code.index((i, j))] == model.J[frozenset((i, j))]


def test_tree_missing_pair_is_connectivity_error():
    code = build_tree_code([(1, 2), (2, 3)])
    model = LogicalModel(3, (0, 0, 0), {(1, 3): 0.5})
    with pytest.raises(ConnectivityError, match=r"\[1, 3\]"):
        compile_program(model, code)


def test_tree_accepts_edges_only():
    code = build_tree_code([(1, 2), (2, 3)])
    model = LogicalModel(3, (0.1, 0, 0), {(1, 2): 0.5, (2, 3): -0.25})
    prog = compile_program(model, code, "mbody", 1.0)
    assert label_totals(prog) == pytest.approx({frozenset({1, 2}): 0.5, frozenset({2, 3}): -0.25})


@pytest.mark.parametrize("variant,policy", [("even_qutrit", "all_odd"), ("odd_qubit", "all_even")])
def test_gadget_policy_mismatch(variant, policy):
    code = build_square_lattice(3, policy)
    with pytest.raises(GadgetError):
        compile_program(generate_instance(3), code, variant)


def test_model_size_mismatch():
    with pytest.raises(InvalidParameterError):
        compile_program(generate_instance(3), build_square_lattice(4))


def test_negative_delta_rejected():
    with pytest.raises(InvalidParameterError):
        compile_program(generate_instance(3), build_square_lattice(3), Delta=-1.0)


def test_site_layout_and_dimension():
    code = build_square_lattice(3)
    prog = compile_program(generate_instance(3), code, "even_qutrit", 1.0)
    # 6 qubits + one qutrit per face (3 faces for N=3)
    assert prog.site_dims == (2,) * 6 + (3,) * 3
    assert prog.total_dim == 1728
    qubit = compile_program(generate_instance(3), build_square_lattice(3, "all_odd"), "odd_qubit", 1.0)
    assert qubit.total_dim == 512


def test_delta_zero_keeps_structure():
    prog = compile_program(generate_instance(3), build_square_lattice(3), "even_qutrit", 0.0)
    assert prog.Delta == 0.0
    assert all(g.Delta == 0.0 for g in prog.groups)
    assert all(np.all(g.energy_table() == 0) for g in prog.groups)


def test_reflection_duplicates_split_equally():
    code = load_example_code("reflection_gadget")
    full = generate_instance(7, 1.0, seed=5)
    # keep only the pairs the reflected layout realises
    carried = {lab.subset for lab in code.labels if len(lab.subset) == 2}
    model = LogicalModel(7, full.h, {k: v for k, v in full.J.items() if k in carried})
    prog = compile_program(model, code, "formal", 1.0)
    split = prog.metadata["split_labels"]
    assert split == {"2-3": 2, "2-4": 2, "2-5": 2}
    for p in code.spins_with_label((2, 4)):
        assert code.labels[p].mu * prog.fields[p] == pytest.approx(model.J[frozenset((2, 4))] / 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.sampled_from(["all_even", "all_odd"]))
def test_label_totals_conserve_couplings(n, seed, policy):
    code = build_square_lattice(n, policy)
    model = generate_instance(n, 1.0, seed)
    totals = label_totals(compile_program(model, code, "formal", 1.0))
    for key, v in model.terms():
        assert totals[key] == pytest.approx(v, abs=1e-15)


def test_program_dict_roundtrip_shape():
    prog = compile_program(generate_instance(3), build_square_lattice(3), "even_qutrit", 2.0)
    doc = program_to_dict(prog)
    assert doc["variant"] == "even_qutrit"
    assert sorted(g["face"] for g in doc["groups"]) == ["[0,2]", "[0,3]", "[1,3]"]
    assert [x["dim"] for x in doc["sites"]] == [2] * 6 + [3] * 3
