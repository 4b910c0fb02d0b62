"""End-to-end scenarios behind ``gaq replay-paper`` and the acceptance suite.

Each ``criterion_*`` function returns a list of :class:`CheckRecord`; the
criterion passes when every record does.
"""

from __future__ import annotations

import time
from typing import Callable

import sympy as sp

from . import linalg
from .enveloping import CENTRAL_VALUE, PBW, anomaly_scan, check_ho_polarization, op_commutator, to_coordinates
from .group_model import REGISTRY, GroupSpec, registry_get, verify_cocycle
from .invariant_calculus import (CENTRAL, by_name, commutator, dual_forms, exterior_derivative, haar_measure,
                                 interior_product, left_fields, left_invariance_check, polarized_measure,
                                 quantization_form, right_fields, same_measure, wedge, Form)
from .lie_structure import AlgebraElement, algebra_of, characteristic_subalgebra, jacobi_check, \
    structure_constants, validate_polarization
from .oracles import fd_field_check
from .report import CheckRecord
from .representations import (BUILTIN, apply_polarization, hermite_residual_check, make_ansatz,
                              reduce_right_action, schrodinger_residual, su2_rep_matrices,
                              verify_equivariance)
from .symexpr import equal, normalize, parse, to_text

SCHRODINGER_TEMPLATE = ("t", "a", "x", "c + (i/(2*m))*v^2")


def _rec(name: str, ok: bool, detail: str = "", witness=None, data=None) -> CheckRecord:
    return CheckRecord(name, bool(ok), detail, witness, data or {})


def _field_matches(spec: GroupSpec, X, expected: dict[str, str]) -> bool:
    ctx = spec.extended_context
    for v, c in zip(spec.all_symbols, X.coeffs):
        want = parse(expected.get(v.name, "0"), ctx)
        if not equal(c, want, ctx):
            return False
    return True


# -- 1 ------------------------------------------------------------------------

def criterion_weyl_brackets() -> list[CheckRecord]:
    hw = registry_get("heisenberg-weyl")
    L = left_fields(hw)
    table = {"q": {"q": "1", "phi": "p/(2*hbar)"}, "p": {"p": "1", "phi": "-q/(2*hbar)"},
             "a": {"a": "1"}, CENTRAL: {"phi": "1"}}
    out = [_rec(f"hw-left-field[{X.name}]", _field_matches(hw, X, table[X.name]), X.text()) for X in L]
    C = structure_constants(hw, "left")
    hbar = hw.params["hbar"]
    qp = C.get(("q", "p"), {})
    ok = set(qp) == {CENTRAL} and normalize(qp[CENTRAL] + 1 / hbar) == 0
    out.append(_rec("hw-[q,p]=-X0/hbar", ok, str({k: to_text(v) for k, v in qp.items()})))
    direct = commutator(by_name(L, "q"), by_name(L, "p"))
    out.append(_rec("hw-[q,p]-direct", all(equal(a, b) for a, b in
                                           zip(direct.coeffs, by_name(L, CENTRAL).scale(-1 / hbar).coeffs))))
    out.append(fd_field_check(hw, "left", points=100, tol=1e-6))
    out.append(fd_field_check(hw, "right", points=100, tol=1e-6))
    return out


# -- 2 ------------------------------------------------------------------------

def criterion_su2_integrality() -> list[CheckRecord]:
    out = []
    su2 = registry_get("su2")
    for j, expect in ((sp.Rational(1, 2), True), (1, True), (sp.Rational(3, 2), True),
                      (sp.Rational(3, 10), False), (sp.Rational(3, 4), False)):
        rep = verify_cocycle(su2.with_pins(j=j), trials=20)
        single = [c for c in rep if c.name.startswith("single-valuedness")]
        sv = bool(single) and all(c.passed for c in single)
        other = all(c.passed for c in rep if not c.name.startswith("single-valuedness"))
        out.append(_rec(f"su2-cocycle[j={j}]", other and sv == expect,
                        f"single-valued: {sv} (expected {expect})"))
    return out


# -- 3 ------------------------------------------------------------------------

def criterion_su2_representation() -> list[CheckRecord]:
    out = []
    for j in (sp.Rational(1, 2), 1, sp.Rational(3, 2), 2):
        R = su2_rep_matrices(j)
        n = int(2 * j + 1)
        cas_ok = (R.casimir - R.j * (R.j + 1) * sp.eye(n)).is_zero_matrix
        out.append(_rec(f"su2-rep[j={j}]", R.dim == n and cas_ok,
                        f"dim {R.dim}, Casimir {to_text(R.casimir[0, 0])}*1"))
    su2 = registry_get("su2")
    rep = BUILTIN[("su2", "P_c")]
    psi = make_ansatz(su2, rep.prefactor, rep.reduced)
    ctx = su2.extended_context.with_functions(("Phi", 1))
    expected = {"vphi": "-2*i*c*D[Phi(c), c]", "c": "D[Phi(c), c]", "cs": "c^2*D[Phi(c), c] - 2*j*c*Phi(c)"}
    for g, text in expected.items():
        op = reduce_right_action(su2, rep.elements, psi, g)
        got = op.operator.apply(psi.phi)
        out.append(_rec(f"su2-reduced[{g}]", equal(got, parse(text, ctx), ctx), op.text()))
    return out


# -- 4 ------------------------------------------------------------------------

def _same_span(alg, got: list[AlgebraElement], names: list[str]) -> bool:
    want = [alg.unit(n).vector() for n in names]
    have = [g.vector() for g in got]
    if len(have) != len(want):
        return False
    return linalg.rank(have + want) == len(want)


def criterion_characteristic() -> list[CheckRecord]:
    out = []
    for name, basis in (("heisenberg-weyl", ["a"]), ("su2", ["vphi"]), ("harmonic-oscillator", ["t"])):
        spec = registry_get(name)
        ch = characteristic_subalgebra(spec)
        out.append(_rec(f"char[{name}]", _same_span(algebra_of(spec), ch.basis, basis),
                        ", ".join(ch.names()), data={"conditions": ch.conditions}))
    sc = registry_get("schrodinger-algebra")
    ch = characteristic_subalgebra(sc)
    out.append(_rec("char[schrodinger, generic k]", _same_span(algebra_of(sc), ch.basis, ["a"]),
                    ", ".join(ch.names())))
    k0 = sc.with_pins(k=0)
    ch0 = characteristic_subalgebra(k0, False)
    out.append(_rec("char[schrodinger, k=0]", _same_span(algebra_of(k0), ch0.basis, ["t", "a", "c"]),
                    ", ".join(ch0.names())))
    return out


# -- 5 ------------------------------------------------------------------------

def criterion_polarizations() -> list[CheckRecord]:
    out = []
    cases = [
        (registry_get("heisenberg-weyl"), ["a", "p"], "hw P_q", {"full": True, "symplectic": True}),
        (registry_get("su2"), ["vphi", "cs"], "su2 P_c", {"full": True, "symplectic": True}),
        (registry_get("schrodinger-algebra").with_pins(k=0), ["t", "a", "x"], "schrodinger k=0 P",
         {"full": False, "symplectic": True}),
        (registry_get("schrodinger-algebra").with_pins(k=0), ["t", "a", "c"], "schrodinger k=0 P_C",
         {"full": True, "symplectic": False}),
    ]
    for spec, P, label, want in cases:
        v = validate_polarization(spec, P)
        ok = v.horizontal and v.subalgebra and all(getattr(v, k) == b for k, b in want.items())
        out.append(_rec(f"polarization[{label}]", ok, str(v.flags), data={"flags": v.flags}))
    return out


# -- 6 ------------------------------------------------------------------------

def criterion_oscillator() -> list[CheckRecord]:
    osc = registry_get("harmonic-oscillator")
    rep = BUILTIN[("harmonic-oscillator", "P_HO_x")]
    v = check_ho_polarization(osc, list(rep.elements))
    out = [_rec("ho-polarization[P_HO_x]", v.passed, v.detail or "closes")]
    eq, psi = schrodinger_residual(osc)
    ctx = osc.extended_context.with_functions(("Phi", 2))
    want = parse("i*hbar*D[Phi(x, t), t] + hbar^2/(2*m)*D[Phi(x, t), x, 2] - m*omega^2*x^2/2*Phi(x, t)", ctx)
    out.append(_rec("schrodinger-equation", equal(eq, want, ctx), to_text(eq)))
    res = apply_polarization(osc, [rep.elements[1]], psi)[0]
    out.append(_rec("p-residual", res.solved, to_text(res.residual)))
    for n in range(6):
        h = hermite_residual_check(n)
        ok = h.max_residual < 1e-8 and abs(h.energy - h.expected_energy) < 1e-10
        out.append(_rec(f"hermite[n={n}]", ok, f"residual {h.max_residual:.1e}, energy {h.energy:g}"))
    return out


# -- 7 ------------------------------------------------------------------------

def criterion_anomaly() -> list[CheckRecord]:
    out = []
    hw = registry_get("heisenberg-weyl")
    rep = BUILTIN[("heisenberg-weyl", "P_q")]
    psi = make_ansatz(hw, rep.prefactor, rep.reduced)
    eqv = verify_equivariance(hw, psi)
    pbw = PBW(hw)
    q, p, z = pbw.gen("q"), pbw.gen("p"), pbw.gen(CENTRAL)
    abstract = to_coordinates(hw, op_commutator(q, p))
    coord = op_commutator(to_coordinates(hw, q), to_coordinates(hw, p))
    agree = (abstract - coord).is_zero()
    out.append(_rec("central-convention", eqv.passed and agree and CENTRAL_VALUE == sp.I,
                    "X0 acts as +i on equivariant functions; abstract and coordinate brackets agree"))
    sc = registry_get("schrodinger-algebra")
    t0 = time.perf_counter()
    scan = anomaly_scan(sc, list(SCHRODINGER_TEMPLATE), "k")
    dt = time.perf_counter() - t0
    mags = scan.magnitudes()
    ok = len(scan.roots) == 1 and mags[0] == sp.Rational(1, 4)
    out.append(_rec("anomaly-root", ok, f"roots {[to_text(r) for r in scan.roots]}, |k| = "
                    f"{[to_text(m) for m in mags]}",
                    data={"obstructions": scan.obstructions, "candidates": scan.candidates}))
    rec = _rec("anomaly-runtime", dt < 10, "scan under 10 s")
    rec.seconds = dt
    out.append(rec)
    return out


# -- 8 ------------------------------------------------------------------------

def criterion_cross_cutting() -> list[CheckRecord]:
    out = []
    for name in REGISTRY:
        spec = registry_get(name)
        out.append(jacobi_check(spec))
        out[-1].name = f"jacobi[{name}]"
        if not isinstance(spec, GroupSpec):
            continue
        L, R = left_fields(spec), right_fields(spec)
        lr = all(commutator(X, Y).is_zero() for X in L for Y in R)
        out.append(_rec(f"left-right-commute[{name}]", lr))
        forms = dual_forms(spec)
        dual = all(normalize(interior_product(X, w) - (1 if i == k else 0)) == 0
                   for i, w in enumerate(forms) for k, X in enumerate(L))
        out.append(_rec(f"duality[{name}]", dual))
        theta = quantization_form(spec)
        out.append(_rec(f"d2theta[{name}]", exterior_derivative(exterior_derivative(theta)).is_zero()))
        t0 = normalize(interior_product(by_name(L, CENTRAL), theta))
        out.append(_rec(f"theta(X0)[{name}]", normalize(t0 - spec.convention) == 0, to_text(t0)))
        rec = left_invariance_check(spec, translations=50, tol=1e-8)
        rec.name = f"left-invariance[{name}]"
        out.append(rec)
    return out


# -- 9 ------------------------------------------------------------------------

def _form(spec: GroupSpec, text: str, names: tuple[str, ...]) -> Form:
    syms = spec.all_symbols
    idx = tuple(sorted(next(i for i, s in enumerate(syms) if s.name == n) for n in names))
    sign = 1
    order = [next(i for i, s in enumerate(syms) if s.name == n) for n in names]
    if order != sorted(order):
        sign = -1
    return Form(tuple(syms), len(names), {idx: sign * parse(text, spec.extended_context)})


def criterion_measures() -> list[CheckRecord]:
    out = []
    su2 = registry_get("su2")
    L = left_fields(su2)
    mu = polarized_measure(su2, [by_name(L, "vphi")])
    want = _form(su2, "1/(1 + c*cs)^2", ("c", "cs"))
    out.append(_rec("measure[su2]", same_measure(mu, want), mu.text()))
    osc = registry_get("harmonic-oscillator")
    mu = polarized_measure(osc, [by_name(left_fields(osc), "p")])
    want = _form(osc, "1", ("x", "t"))
    out.append(_rec("measure[oscillator]", same_measure(mu, want), mu.text()))
    for j in (sp.Rational(1, 2), 1, sp.Rational(3, 2), 2):
        out.append(_rec(f"su2-adjoint[j={j}]", su2_rep_matrices(j).adjoint_ok()))
    return out


CRITERIA: dict[int, tuple[str, Callable[[], list[CheckRecord]]]] = {
    1: ("Weyl brackets", criterion_weyl_brackets),
    2: ("SU(2) integrality", criterion_su2_integrality),
    3: ("SU(2) representation", criterion_su2_representation),
    4: ("Characteristic subalgebras", criterion_characteristic),
    5: ("Polarization verdicts", criterion_polarizations),
    6: ("Oscillator configuration space", criterion_oscillator),
    7: ("Anomaly scan", criterion_anomaly),
    8: ("Cross-cutting properties", criterion_cross_cutting),
    9: ("Measures", criterion_measures),
}


def run_criterion(n: int) -> tuple[bool, list[CheckRecord], float]:
    _, fn = CRITERIA[n]
    t0 = time.perf_counter()
    recs = fn()
    return all(r.passed for r in recs), recs, time.perf_counter() - t0
