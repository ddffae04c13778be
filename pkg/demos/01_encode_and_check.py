"""Encode a random 3-spin Ising instance, check it, and read the answer back.

Run: python3 demos/01_encode_and_check.py
"""

from __future__ import annotations

import numpy as np

from paritycode import build_square_lattice, check_conditions, compile_program, generate_instance
from paritycode.oracles import brute_force_logical_ground
from paritycode.spectral import HilbertSpec, assemble

model = generate_instance(3, J=1.0, seed=42)
print("logical fields ", np.round(model.h, 3))
print("logical pairs  ", {tuple(sorted(k)): round(v, 3) for k, v in model.J.items()})

for variant, policy in (("odd_qubit", "all_odd"), ("even_qutrit", "all_even")):
    code = build_square_lattice(3, policy)
    program = compile_program(model, code, variant, Delta=50.0)  # R = 100 at J = 1
    print(f"\n== {variant}: {len(program.sites)} sites, Hilbert dimension {program.total_dim}")
    for line in check_conditions(program, code, model).lines():
        print("  " + line)

    # the s = 1 Hamiltonian is diagonal, so its ground state is a single basis state
    final = assemble(program, 1.0).diagonal
    z = HilbertSpec(program.site_dims).decode(int(np.argmin(final)))
    decoded = tuple(z[code.vertex_spin(k)] for k in (1, 2, 3))
    expected, energy = brute_force_logical_ground(model)
    print(f"  decoded {decoded}, brute force {expected} (energy {energy:.4f})")
