"""Ground spaces of the ancilla gadgets and the ancilla-count audit.

Run: python3 demos/02_gadget_audit.py
"""

from __future__ import annotations

from collections import Counter

from paritycode.gadgets import audit_ancilla_counts, even_parity_gadget, format_audit, mbody_gadget, odd_parity_gadget
from paritycode.oracles import gadget_groundspace_oracle, projects_onto_target

print("qutrit gadget on a 4-spin face: ground configurations (z1..z4, T)")
_, ground = gadget_groundspace_oracle(even_parity_gadget(4, 1.0))
for cfg in sorted(ground, reverse=True):
    print("  ", cfg)

print("\nqubit gadget, ancilla coupling ratio scan (window is open between 1 and 3)")
for ratio in (0.9, 1.5, 2.0, 2.5, 3.1):
    ok = projects_onto_target(odd_parity_gadget(4, 1.0, ratio, strict=False))
    print(f"   ratio {ratio:>3}: {'enforces odd parity' if ok else 'wrong ground space'}")

print("\n5-body gadget with target +1: face spin sums in the ground set")
g = mbody_gadget(5, 1, 1.0)
_, ground = gadget_groundspace_oracle(g)
print("  ", dict(sorted(Counter(sum(c[:5]) for c in ground).items(), reverse=True)))

print("\nminimal ancilla counts against the counts usually quoted")
print(format_audit(audit_ancilla_counts(8)))
