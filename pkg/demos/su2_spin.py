"""Spin representations of SU(2): integrality of 2j, reduced operators on
polynomials in c, and the resulting ladder matrices."""

import sympy as sp

from gaq.group_model import registry_get, verify_cocycle
from gaq.representations import su2_rep_matrices

su2 = registry_get("su2")
for j in ("1/2", "3/10", "1"):
    rep = verify_cocycle(su2.with_pins(j=sp.Rational(j)), trials=20)
    print(f"j = {j}: cocycle single valued = {rep.passed}")

for j in ("1/2", "1", "3/2"):
    r = su2_rep_matrices(j)
    print(f"\nj = {j}, dimension {r.dim}, weights {r.weights}")
    sp.pprint(r.J0)
    print("Casimir:", r.casimir.diagonal().tolist()[0], " adjoint pair:", r.adjoint_ok())
    print("extreme monomials:", r.highest, "/", r.lowest, *r.notes)
