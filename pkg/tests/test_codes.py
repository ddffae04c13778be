from __future__ import annotations

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paritycode.codes import (
    Stabiliser,
    add_multibody_spin,
    build_code,
    derive_logical_x,
    label_spins,
    syndrome,
    verify_code,
)
from paritycode.errors import (
    CodeFileError,
    CountMismatchError,
    DependentStabilisersError,
    DimensionError,
    InfeasibleTargetError,
    InvalidGraphError,
    InvalidParameterError,
)
from paritycode.gf2 import SupportVector
from paritycode.io import code_to_dict, dump_code, load_custom_code, load_example_code
from paritycode.layouts import (
    build_square_lattice,
    build_tree_code,
    build_triangular_lattice,
    face_nu,
    square_faces,
    square_mu_block,
)
from paritycode.oracles import label_oracle, valid_configurations


def spins_of(code, vec):
    return {code.spins[p] for p in vec.indices()}


# -- square lattice ----------------------------------------------------------


def test_square_n5_counts():
    code = build_square_lattice(5)
    assert code.n_spins == 15 and code.n_stabilisers == 10


def test_square_rejects_n1():
    with pytest.raises(InvalidParameterError):
        build_square_lattice(1)


def test_square_all_even_mu_positive():
    code = build_square_lattice(5, "all_even")
    assert all(lab.mu == 1 for lab in code.labels)


def test_square_all_odd_examples():
    code = build_square_lattice(5, "all_odd")
    assert code.label_of((1, 2)).mu == -1
    assert code.label_of((2, 4)).mu == 1
    lab = code.label_of((2, 4))
    assert lab.subset == {2, 4}


@pytest.mark.parametrize("n", range(2, 7))
def test_all_odd_mu_closed_form(n):
    code = build_square_lattice(n, "all_odd")
    for i, j in itertools.combinations(range(n + 1), 2):
        assert code.label_of((i, j)).mu == (-1) ** (i * (j - i))


def test_vertex_spins_label_themselves():
    code = build_square_lattice(4, "all_odd")
    for k in range(1, 5):
        lab = code.label_of((0, k))
        assert lab.subset == {k} and lab.mu == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 5), st.randoms(use_true_random=False))
def test_mu_block_formula_matches_gf2(n, rnd):
    nu = {f: rnd.choice((1, -1)) for f in square_faces(n)}
    code = build_square_lattice(n, nu)
    block = square_mu_block(n, face_nu(code))
    for (i, j), mu in block.items():
        assert code.label_of((i, j)).mu == mu


def test_logical_x_n2_exhaustive():
    code = build_square_lattice(2)
    assert spins_of(code, code.logical_x[0]) == {(0, 1), (1, 2)}
    # exhaustive: supports containing (0,1), not (0,2), commuting with the one face
    face = code.stabilisers[0].support
    sols = []
    for b in range(8):
        v = SupportVector(3, b)
        if v[code.index((0, 1))] and not v[code.index((0, 2))] and (v.bits & face.bits).bit_count() % 2 == 0:
            sols.append(v)
    assert sols == [code.logical_x[0]]


def test_logical_x3_n5():
    code = build_square_lattice(5)
    assert spins_of(code, code.logical_x[2]) == {(0, 3), (1, 3), (2, 3), (3, 4), (3, 5)}


def test_logical_x_relations_hold():
    code = build_square_lattice(5, "all_odd")
    for k, x in enumerate(code.logical_x, start=1):
        for kk in range(1, 6):
            assert x[code.vertex_spin(kk)] == (1 if kk == k else 0)
        for s in code.stabilisers:
            assert (x.bits & s.support.bits).bit_count() % 2 == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_square_labels_match_brute_force(n):
    code = build_square_lattice(n, "all_odd")
    assert label_oracle(code) == [(lab.subset, lab.mu) for lab in code.labels]


# -- triangular and tree -----------------------------------------------------


def test_triangular_n3():
    code = build_triangular_lattice(3)
    assert code.n_spins == 6 and code.n_stabilisers == 3
    pairs = {lab.subset for lab in code.labels if len(lab.subset) == 2}
    assert pairs == {frozenset(p) for p in [(1, 2), (1, 3), (2, 3)]}
    assert label_oracle(code) == [(lab.subset, lab.mu) for lab in code.labels]


def test_triangular_n2():
    code = build_triangular_lattice(2)
    assert code.n_spins == 3 and code.n_stabilisers == 1


def test_triangular_product_is_corner_triangle():
    # faces [0,2], [0,3], [1,3] multiply out to the three corners (0,1), (0,3), (1,3)
    code = build_triangular_lattice(3)
    ids = {s.face_id: s.support for s in code.stabilisers}
    prod = ids["[0,2]"] ^ ids["[0,3]"] ^ ids["[1,3]"]
    assert spins_of(code, prod) == {(0, 1), (0, 3), (1, 3)}


@pytest.mark.parametrize("n", range(2, 6))
def test_triangular_verifies(n):
    code = build_triangular_lattice(n, "all_odd")
    assert verify_code(code).passed
    assert code.n_spins == n * (n + 1) // 2
    pairs = {lab.subset for lab in code.labels if len(lab.subset) == 2}
    assert len(pairs) == n * (n - 1) // 2


def test_tree_balanced_7():
    code = build_tree_code({1: [2, 3], 2: [4, 5], 3: [6, 7]})
    assert code.n_spins == 13 and verify_code(code).passed


def test_tree_single_edge():
    code = build_tree_code([(1, 2)])
    assert code.n_spins == 3 and code.n_stabilisers == 1


def test_tree_star_labels_and_hub_chain():
    code = build_tree_code({1: [2, 3, 4]})
    assert code.n_spins == 7
    edge_labels = sorted(sorted(lab.subset) for lab in code.labels if len(lab.subset) == 2)
    assert edge_labels == [[1, 2], [1, 3], [1, 4]]
    assert label_oracle(code) == [(lab.subset, lab.mu) for lab in code.labels]
    assert spins_of(code, code.logical_x[0]) == {(0, 1), (1, 2), (1, 3), (1, 4)}


def test_tree_rejects_cycle():
    with pytest.raises(InvalidGraphError):
        build_tree_code([(1, 2), (2, 3), (1, 3)])


def test_tree_rejects_disconnected():
    with pytest.raises(InvalidGraphError):
        build_tree_code([(1, 2), (3, 4)])


# -- custom codes ------------------------------------------------------------


def three_spin_doc(nu=1):
    return {"n_logical": 2, "spins": ["a", "b", "c"],
            "stabilisers": [{"spins": ["a", "b", "c"], "nu": nu, "face": "F"}], "logical_z": ["a", "b"]}


@pytest.mark.parametrize("nu", [1, -1])
def test_custom_three_spin_label(nu):
    code = load_custom_code(three_spin_doc(nu))
    lab = code.label_of("c")
    assert lab.subset == {1, 2} and lab.mu == nu
    assert label_oracle(code)[2] == (frozenset({1, 2}), nu)


def test_square_file_round_trip(tmp_path):
    code = build_square_lattice(4, "all_odd")
    path = tmp_path / "code.json"
    dump_code(code, path)
    again = load_custom_code(path)
    assert again.same_as(code)
    assert again.labels == code.labels


def test_custom_count_mismatch():
    doc = three_spin_doc()
    doc["stabilisers"] = []
    with pytest.raises(CountMismatchError):
        load_custom_code(doc)


def test_custom_dependent_stabilisers_named():
    doc = {"n_logical": 1, "spins": ["a", "b", "c"],
           "stabilisers": [{"spins": ["a", "b"], "face": "P"}, {"spins": ["a", "b"], "face": "Q"}],
           "logical_z": ["a"]}
    with pytest.raises(DependentStabilisersError, match="Q"):
        load_custom_code(doc)


def test_custom_parse_error_location():
    doc = three_spin_doc()
    doc["stabilisers"][0]["spins"] = ["a", "zz", "c"]
    with pytest.raises(CodeFileError) as err:
        load_custom_code(doc)
    assert err.value.location == "stabilisers[0].spins[1]"


def test_custom_bad_json_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n_logical": 2,\n "spins": [}')
    with pytest.raises(CodeFileError) as err:
        load_custom_code(p)
    assert "line 2" in err.value.location


def test_custom_bad_nu():
    doc = three_spin_doc()
    doc["stabilisers"][0]["nu"] = 2
    with pytest.raises(CodeFileError, match="nu"):
        load_custom_code(doc)


def test_reflection_gadget_example():
    code = load_example_code("reflection_gadget")
    assert verify_code(code).passed
    multi = {tuple(sorted(k)): len(v) for k, v in code.label_multimap().items() if len(v) > 1}
    assert multi == {(2, 3): 2, (2, 4): 2, (2, 5): 2}
    # the logical-2 chain leaves row 2 and turns down column 6
    chain = spins_of(code, code.logical_x[1])
    assert {(3, 6), (4, 6), (5, 6)} <= chain
    assert code.spins_with_label({2, 6}) == []


def test_hub_strip_example():
    code = load_example_code("hub_strip")
    assert verify_code(code).passed
    pairs = {tuple(sorted(k)) for k in code.label_multimap() if len(k) == 2}
    assert all(min(p) <= 3 for p in pairs)
    assert len(pairs) == 7 + 6 + 5


# -- verify_code failure modes ----------------------------------------------


def _raw(code, stabs):
    from paritycode.codes import ParityCode

    return ParityCode(code.n_logical, code.spins, tuple(stabs), code.logical_z)


def test_verify_duplicated_stabiliser():
    code = build_square_lattice(3)
    stabs = list(code.stabilisers)
    stabs[1] = Stabiliser(stabs[0].support, 1, "dup")
    report = verify_code(_raw(code, stabs))
    assert not report["stabiliser_independence"].passed
    assert report.rank_deficit == 1


def test_verify_count_mismatch():
    code = build_square_lattice(3)
    report = verify_code(_raw(code, code.stabilisers[:-1]))
    assert not report["stabiliser_count"].passed


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_builtin_square_verifies(n):
    assert verify_code(build_square_lattice(n, "all_odd")).passed


# -- random valid codes -----------------------------------------------------


@st.composite
def random_codes(draw):
    n_logical = draw(st.integers(1, 4))
    n_spins = draw(st.integers(n_logical + 1, 10))
    stabs = []
    for p in range(n_logical, n_spins):
        # each new spin closes one stabiliser over earlier spins: always independent
        others = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=4, unique=True))
        nu = draw(st.sampled_from((1, -1)))
        stabs.append(Stabiliser(SupportVector.from_indices(n_spins, others + [p]), nu, f"S{p}"))
    perm = draw(st.permutations(range(n_spins)))
    spins = [f"q{perm[k]}" for k in range(n_spins)]
    return build_code(n_logical, spins, stabs, list(range(n_logical)))


@settings(max_examples=40, deadline=None)
@given(random_codes())
def test_random_code_labels_match_brute_force(code):
    assert verify_code(code).passed
    assert label_oracle(code) == [(lab.subset, lab.mu) for lab in code.labels]


@settings(max_examples=25, deadline=None)
@given(random_codes())
def test_random_code_label_methods_agree(code):
    # label_spins raises on any disagreement between intersection and decomposition
    assert label_spins(code, derive_logical_x(code)) == code.labels


# -- multi-body spins ----------------------------------------------------------


def test_multibody_case_I():
    code = build_square_lattice(5)
    i, j = 1, 3
    new = add_multibody_spin(code, {i, j, i + 1, j + 1}, [(i, j), (i + 1, j + 1)])
    assert new.labels[-1].subset == {1, 2, 3, 4}
    assert verify_code(new).passed
    assert label_oracle(new)[-1] == (frozenset({1, 2, 3, 4}), 1)


def test_multibody_case_II():
    code = build_square_lattice(5)
    i, j = 2, 4
    new = add_multibody_spin(code, {i, j - 1, j, j + 1}, [(i - 1, j - 1), (i, j), (i - 1, j + 1)])
    assert new.labels[-1].subset == {2, 3, 4, 5}
    assert verify_code(new).passed


def test_multibody_case_III_six_body():
    code = build_square_lattice(6)
    i, j = 2, 5
    target = {i - 1, j - 1, i, j, i + 1, j + 1}
    new = add_multibody_spin(code, target, [(i - 1, j - 1), (i, j), (i + 1, j + 1)])
    assert new.labels[-1].subset == {1, 2, 3, 4, 5, 6}
    assert verify_code(new).passed


def test_multibody_duplicate_label_allowed():
    code = build_square_lattice(3)
    new = add_multibody_spin(code, {1, 2}, [(1, 2)])
    assert len(new.spins_with_label({1, 2})) == 2


def test_multibody_infeasible_reports_residual():
    code = build_square_lattice(4)
    with pytest.raises(InfeasibleTargetError) as err:
        add_multibody_spin(code, {1, 2, 3}, [(1, 2)])
    assert err.value.residual == {3}


# -- syndromes -----------------------------------------------------------------


def test_syndrome_clean_on_satisfying():
    code = build_square_lattice(4, "all_odd")
    cfg = valid_configurations(code)[5]
    assert syndrome(code, cfg.tolist()).violated == ()


def test_syndrome_single_flip_hits_incident_faces():
    code = build_square_lattice(4, "all_odd")
    cfg = valid_configurations(code)[3].tolist()
    p = code.index((1, 3))
    cfg[p] = -cfg[p]
    rep = syndrome(code, cfg)
    incident = {s.face_id for s in code.stabilisers if s.support[p]}
    assert set(rep.violated) == incident
    assert 1 <= len(incident) <= 4
    assert rep.satisfied_count == code.n_stabilisers - len(incident)


def test_syndrome_all_up_on_all_odd_n3():
    code = build_square_lattice(3, "all_odd")
    assert len(syndrome(code, [1] * 6).violated) == 3


def test_syndrome_length_checked():
    with pytest.raises(DimensionError):
        syndrome(build_square_lattice(3), [1, 1])


def test_code_dict_is_json():
    json.dumps(code_to_dict(build_tree_code([(1, 2), (2, 3)])))
