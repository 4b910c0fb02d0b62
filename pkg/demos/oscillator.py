"""Second-order polarization of the harmonic oscillator group and the
Schroedinger equation it imposes on Phi(x, t)."""

from gaq.enveloping import anomaly_scan, casimir, check_ho_polarization
from gaq.group_model import registry_get
from gaq.representations import hermite_residual_check, schrodinger_residual
from gaq.symexpr import ParamAssumption, to_text

osc = registry_get("harmonic-oscillator")

scan = anomaly_scan(osc, ["t - alpha*x^2", "p"], "alpha", [ParamAssumption("alpha", "real")])
print("closing coefficient of x^2:", [to_text(r) for r in scan.roots])

v = check_ho_polarization(osc, ["t - (i*hbar/(2*m))*x^2", "p"])
print("P_HO_x closes:", v.closes, " avoids X0:", v.avoids_central)
print("Casimir:", casimir(osc).element.text())

eq, psi = schrodinger_residual(osc)
print("equation on Phi:", to_text(eq), "= 0")

for n in range(4):
    h = hermite_residual_check(n)
    print(f"n = {n}: residual {h.max_residual:.1e}, energy {h.energy:.3f}")
