"""Walk through the Heisenberg-Weyl group from its group law to the
configuration-space representation."""

from gaq.group_model import registry_get, verify_cocycle
from gaq.invariant_calculus import left_fields, quantization_form, sigma_normal_form
from gaq.lie_structure import characteristic_subalgebra, validate_polarization
from gaq.representations import represent

hw = registry_get("heisenberg-weyl")
print("cocycle verified:", verify_cocycle(hw, trials=20).passed)

for X in left_fields(hw):
    print(f"X^L_{X.name} =", X.normalized().text())
print("Theta =", quantization_form(hw).text())

nf = sigma_normal_form(hw)
print("rank of Sigma:", nf.rank, " nu:", nf.nu, " J:", nf.J_text())
print("characteristic subalgebra:", characteristic_subalgebra(hw).names())

for P in (["a", "p"], ["a", "q"], ["a", "q + i*p"], ["p"]):
    print(P, validate_polarization(hw, P).flags)

print(represent(hw, "P_q").summary())
