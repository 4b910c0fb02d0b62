"""The Schroedinger algebra: the first-order picture at k = 0 and the value
of k at which the second-order polarization closes."""

import sympy as sp

from gaq.enveloping import anomaly_scan, check_ho_polarization
from gaq.group_model import registry_get
from gaq.lie_structure import characteristic_subalgebra, validate_polarization
from gaq.representations import quantum_invariant_relations
from gaq.symexpr import to_text

sch = registry_get("schrodinger-algebra")
ch = characteristic_subalgebra(sch)
print("generic characteristic subalgebra:", ch.names())
for pins, sub in ch.special:
    print(f"  at {pins}:", sub.names())

flat = sch.with_pins(k=0)
for P in (["t", "a", "x"], ["t", "a", "c"]):
    print(P, validate_polarization(flat, P).flags)

template = ["t", "a", "x", "c + (i/(2*m))*v^2"]
scan = anomaly_scan(sch, template, "k")
print("obstruction:", [to_text(o) for o in scan.obstructions])
print("roots:", [to_text(r) for r in scan.roots], " |k|:", [to_text(m) for m in scan.magnitudes()])

for k in (0, sp.I / 4):
    v = check_ho_polarization(sch.with_pins(k=k), template)
    print(f"k = {to_text(k)}: closes = {v.passed}", v.detail)

rel = quantum_invariant_relations(k=sp.I / 4)
print("sl(2,R) brackets reproduced:", rel.sl2_pattern, rel.residuals)
