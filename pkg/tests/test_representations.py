import numpy as np
import pytest
import sympy as sp

from conftest import spec
from gaq.errors import RepresentationError, SpecError
from gaq.invariant_calculus import by_name, left_fields
from gaq.representations import (BUILTIN, _su2_reduced_ops, apply_polarization, builtin,
                                 gram_quadrature, half_integer, hermite_residual_check, make_ansatz,
                                 quantum_invariant_relations, reduce_right_action,
                                 reduced_bracket_check, represent, schrodinger_residual,
                                 solve_first_order, su2_rep_matrices, verify_equivariance)
from gaq.symexpr import equal, sym

I = sp.I
q, pp, c, x, t = sym("q"), sym("p"), sym("c"), sym("x"), sym("t")


def reduced(spec_name, rep_name, generator):
    s = spec(spec_name)
    rep = builtin(spec_name, rep_name)
    psi = make_ansatz(s, rep.prefactor, rep.reduced)
    return reduce_right_action(s, rep.elements, psi, generator)


class TestEquivariance:
    def test_unit_charge(self, hw):
        assert verify_equivariance(hw, make_ansatz(hw, "zeta*exp(q*p)", ("q",))).passed

    def test_wrong_charge(self, hw):
        assert not verify_equivariance(hw, make_ansatz(hw, "zeta^2*exp(q)", ("q",))).passed

    def test_su2(self, su2):
        assert verify_equivariance(su2, make_ansatz(su2, "zeta*(1 + c*cs)^(-j)", ("c",))).passed


class TestPolarizationEquations:
    @pytest.mark.parametrize("key", [("heisenberg-weyl", "P_q"), ("heisenberg-weyl", "P_p"),
                                     ("su2", "P_c")])
    def test_first_order_residuals_vanish(self, key):
        s, rep = spec(key[0]), BUILTIN[key]
        psi = make_ansatz(s, rep.prefactor, rep.reduced)
        assert all(r.solved for r in apply_polarization(s, rep.elements, psi))

    def test_oscillator_residuals(self, osc):
        rep = BUILTIN[("harmonic-oscillator", "P_HO_x")]
        psi = make_ansatz(osc, rep.prefactor, rep.reduced)
        second, first = apply_polarization(osc, rep.elements, psi)
        assert first.solved and not second.solved

    def test_derived_schrodinger_equation(self, osc):
        eq, psi = schrodinger_residual(osc)
        hbar, m, w = (osc.params[k] for k in ("hbar", "m", "omega"))
        Phi = psi.phi
        want = (I * hbar * sp.diff(Phi, t) + hbar**2 / (2 * m) * sp.diff(Phi, x, 2)
                - m * w**2 * x**2 * Phi / 2)
        assert equal(eq, want, osc.context)

    def test_integrating_factor(self, hw):
        X = by_name(left_fields(hw), "p")
        f = solve_first_order(hw, X, "p")
        hbar = hw.params["hbar"]
        assert equal(f, sp.exp(I * q * pp / (2 * hbar)))
        assert equal(X(f * sp.exp(I * sym("phi"))), 0)


class TestReducedActions:
    def test_hw_position(self):
        op = reduced("heisenberg-weyl", "P_q", "p")
        hbar = spec("heisenberg-weyl").params["hbar"]
        Phi = sp.Function("Phi")(q)
        # sign is fixed by the engine's own fields; see the notes on conventions
        assert equal(op(Phi), I / hbar * q * Phi)

    def test_hw_derivative(self):
        op = reduced("heisenberg-weyl", "P_q", "q")
        Phi = sp.Function("Phi")(q)
        assert equal(op(Phi), sp.diff(Phi, q))

    def test_hw_weyl_bracket(self):
        s = spec("heisenberg-weyl")
        ops = {g: reduced("heisenberg-weyl", "P_q", g) for g in ("q", "p", "a")}
        assert reduced_bracket_check(s, ops).passed
        hbar = s.params["hbar"]
        Phi = sp.Function("Phi")(q)
        lhs = ops["q"](ops["p"](Phi)) - ops["p"](ops["q"](Phi))
        # [X^R_q, X^R_p] = (1/hbar) X0 and X0 acts as i
        assert equal(lhs, I / hbar * Phi)

    def test_su2_lowering(self):
        j = spec("su2").params["j"]
        Phi = sp.Function("Phi")(c)
        assert equal(reduced("su2", "P_c", "cs")(Phi), c**2 * sp.diff(Phi, c) - 2 * j * c * Phi)

    def test_su2_weight(self):
        Phi = sp.Function("Phi")(c)
        assert equal(reduced("su2", "P_c", "vphi")(Phi), -2 * I * c * sp.diff(Phi, c))

    def test_su2_brackets(self):
        s = spec("su2")
        ops = {g: reduced("su2", "P_c", g) for g in ("vphi", "c", "cs")}
        assert reduced_bracket_check(s, ops).passed

    @pytest.mark.parametrize("key", sorted(BUILTIN))
    def test_represent_reports(self, key):
        assert represent(spec(key[0]), key[1]).passed

    def test_unknown_polarization(self, hw):
        with pytest.raises(SpecError):
            represent(hw, "P_x")

    @pytest.mark.parametrize("j", [sp.Rational(1, 2), 1, sp.Rational(3, 2), 2])
    def test_su2_finite_span(self, j):
        ops = _su2_reduced_ops(sp.Rational(j))
        top = int(2 * j)
        for k in range(top + 1):
            for op in ops.values():
                image = sp.Poly(sp.expand(op(c**k)), c) if sp.expand(op(c**k)) != 0 else None
                assert image is None or image.degree() <= top


class TestSU2Matrices:
    def test_spin_half(self):
        r = su2_rep_matrices(sp.Rational(1, 2))
        assert r.dim == 2
        assert r.casimir == sp.Rational(3, 4) * sp.eye(2)
        assert sorted(r.J0.eigenvals()) == [-sp.Rational(1, 2), sp.Rational(1, 2)]

    def test_spin_one(self):
        r = su2_rep_matrices(1)
        assert r.dim == 3 and r.casimir == 2 * sp.eye(3)

    def test_trivial(self):
        r = su2_rep_matrices(0)
        assert r.dim == 1
        assert r.J0.is_zero_matrix and r.Jp.is_zero_matrix and r.Jm.is_zero_matrix

    @pytest.mark.parametrize("j", ["1/2", "1", "3/2", "2", "5/2"])
    def test_algebra(self, j):
        r = su2_rep_matrices(j)
        jj = half_integer(j)
        assert r.casimir == jj * (jj + 1) * sp.eye(r.dim)
        assert r.J0 * r.Jp - r.Jp * r.J0 == r.Jp
        assert r.J0 * r.Jm - r.Jm * r.J0 == -r.Jm
        assert r.adjoint_ok()

    @pytest.mark.parametrize("j", ["1/2", "1", "3/2"])
    def test_gram_by_quadrature(self, j):
        r = su2_rep_matrices(j)
        for l in range(r.dim):
            assert gram_quadrature(j, l) == pytest.approx(float(r.gram[l, l]), rel=1e-8)

    def test_highest_weight_monomial(self):
        r = su2_rep_matrices(sp.Rational(3, 2))
        assert (r.highest, r.lowest) == ("c^3", "1")
        assert r.weights == [sp.Rational(k, 2) for k in (-3, -1, 1, 3)]
        assert any("c^3/2" in n for n in r.notes)

    @pytest.mark.parametrize("j", ["0.3", "-1", sp.Rational(1, 3)])
    def test_non_half_integer(self, j):
        with pytest.raises(RepresentationError):
            su2_rep_matrices(j)


class TestHermite:
    @pytest.mark.parametrize("n", range(6))
    def test_levels(self, n):
        res = hermite_residual_check(n)
        assert res.max_residual < 1e-8
        assert res.energy == pytest.approx(n + 0.5)

    def test_other_constants(self):
        res = hermite_residual_check(2, hbar=0.5, m=2.0, omega=1.5)
        assert res.max_residual < 1e-8 and res.energy == pytest.approx(2.5 * 0.5 * 1.5)

    def test_wrong_width(self):
        res = hermite_residual_check(0, phi="exp(-x^2)*exp(-i*t/2)")
        assert res.max_residual > 1e-3

    def test_custom_grid(self):
        res = hermite_residual_check(1, grid=(np.linspace(-2, 2, 9), [0.0, 1.0, 2.0]))
        assert res.max_residual < 1e-8

    def test_negative_level(self):
        with pytest.raises(RepresentationError):
            hermite_residual_check(-1)


class TestQuantumRelations:
    def test_at_anomaly(self):
        rep = quantum_invariant_relations(k=I / 4)
        assert rep.polarization.passed and rep.sl2_pattern
        assert all(rep.commute_with_hw.values())

    def test_without_anomaly(self):
        rep = quantum_invariant_relations(k=0)
        assert not rep.polarization.passed and not rep.sl2_pattern
        assert rep.residuals["[t,c]"] == sp.Rational(1, 2)
        assert "F_t" in rep.classical
