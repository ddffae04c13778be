"""Codes beyond the square lattice: a tree, a triangular lattice, a reflected
layout with duplicated labels and an added multi-body spin.

Run: python3 demos/04_custom_codes.py
"""

from __future__ import annotations

from paritycode import build_square_lattice, build_tree_code, build_triangular_lattice, verify_code
from paritycode.codes import add_multibody_spin
from paritycode.io import load_example_code


def show(code):
    report = verify_code(code)
    print(f"{code.name}: {code.n_spins} spins, {code.n_stabilisers} stabilisers, verified={report.passed}")
    return report


show(build_tree_code([(1, 2), (1, 3), (2, 4), (2, 5)]))
show(build_triangular_lattice(5))

reflect = load_example_code("reflection_gadget")
show(reflect)
dupes = {tuple(sorted(k)): [reflect.spins[p] for p in v] for k, v in reflect.label_multimap().items() if len(v) > 1}
print("  duplicated labels:", dupes)

hub = load_example_code("hub_strip")
show(hub)

four = add_multibody_spin(build_square_lattice(5), {1, 2, 3, 4}, [(1, 3), (2, 4)])
show(four)
print("  new spin", four.spins[-1], "carries", sorted(four.labels[-1].subset))
