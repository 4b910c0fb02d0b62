import itertools

import pytest
import sympy as sp

from conftest import GROUPS, spec
from gaq.invariant_calculus import (Form, VectorField, by_name, commutator, dual_forms,
                                    exterior_derivative, haar_measure, interior_product,
                                    left_fields, left_invariance_check, lie_derivative,
                                    noether_invariants, polarized_measure, quantization_form,
                                    right_fields, same_measure, sigma_normal_form)
from gaq.oracles import fd_field_check
from gaq.symexpr import equal, sym

I = sp.I
q, p, a, phi = sym("q"), sym("p"), sym("a"), sym("phi")
c, cs, vphi = sym("c"), sym("cs"), sym("vphi")
t, x = sym("t"), sym("x")


def components(X: VectorField) -> dict:
    return {v.name: cf for v, cf in zip(X.variables, X.coeffs)}


def assert_field(X, expected: dict, ctx=None):
    got = components(X)
    for name, value in got.items():
        assert equal(value, expected.get(name, 0), ctx), (X.name, name, value)


def assert_form(w: Form, expected: dict, ctx=None):
    names = [v.name for v in w.variables]
    keys = itertools.combinations(names, w.degree)
    for key in keys:
        want = expected.get(key, 0)
        assert equal(w.coefficient(*key), want, ctx), (key, w.coefficient(*key), want)


class TestFields:
    def test_hw_left(self, hw):
        hbar = hw.params["hbar"]
        L = left_fields(hw)
        assert_field(by_name(L, "q"), {"q": 1, "phi": p / (2 * hbar)})
        assert_field(by_name(L, "p"), {"p": 1, "phi": -q / (2 * hbar)})

    def test_hw_right(self, hw):
        hbar = hw.params["hbar"]
        assert_field(by_name(right_fields(hw), "q"), {"q": 1, "phi": -p / (2 * hbar)})

    def test_su2_left(self, su2):
        j = su2.params["j"]
        L = left_fields(su2)
        assert_field(by_name(L, "vphi"), {"vphi": 1})
        eta2 = sp.exp(-2 * I * vphi)
        assert_field(by_name(L, "c"), {"c": eta2 * (1 + c * cs), "vphi": eta2 * I * cs / 2,
                                       "phi": eta2 * I * cs * j})

    def test_su2_right(self, su2):
        assert_field(by_name(right_fields(su2), "vphi"), {"vphi": 1, "c": -2 * I * c, "cs": 2 * I * cs})

    def test_oscillator_left_time(self, osc):
        m, w = osc.params["m"], osc.params["omega"]
        assert_field(by_name(left_fields(osc), "t"), {"t": 1, "x": p / m, "p": -m * w**2 * x})

    def test_oscillator_right_time(self, osc):
        assert_field(by_name(right_fields(osc), "t"), {"t": 1})

    @pytest.mark.parametrize("name", GROUPS)
    def test_identity_values_are_basis_directions(self, name):
        s = spec(name)
        at_e = dict(zip(s.symbols(), s.identity))
        for side in (left_fields, right_fields):
            for k, X in enumerate(side(s)[:-1]):
                for i, cf in enumerate(X.coeffs[:-1]):
                    assert equal(cf.xreplace(at_e), int(i == k), s.context)

    @pytest.mark.parametrize("name", GROUPS)
    @pytest.mark.parametrize("side", ["left", "right"])
    def test_finite_difference_oracle(self, name, side):
        rec = fd_field_check(spec(name), side, points=100, tol=1e-6)
        assert rec.passed, rec.detail

    @pytest.mark.parametrize("name", GROUPS)
    def test_left_commutes_with_right(self, name):
        s = spec(name)
        for X, Y in itertools.product(left_fields(s), right_fields(s)):
            assert commutator(X, Y).normalized().is_zero(), (X.name, Y.name)


class TestForms:
    @pytest.mark.parametrize("name", GROUPS)
    def test_duality(self, name):
        s = spec(name)
        forms, fields = dual_forms(s), left_fields(s)
        for i, w in enumerate(forms):
            for k, X in enumerate(fields):
                assert equal(w(X), int(i == k), s.extended_context), (w.name, X.name)

    def test_su2_coframe(self, su2):
        th = by_name(dual_forms(su2), "c")
        assert_form(th, {("c",): sp.exp(2 * I * vphi) / (1 + c * cs)})

    def test_hw_coframe(self, hw):
        forms = dual_forms(hw)
        assert_form(by_name(forms, "q"), {("q",): 1})
        assert_form(by_name(forms, "p"), {("p",): 1})

    def test_hw_theta(self, hw):
        hbar = hw.params["hbar"]
        assert_form(quantization_form(hw), {("phi",): hbar, ("q",): -p / 2, ("p",): q / 2})

    def test_su2_theta(self, su2):
        # sign fixed by requiring d Theta = 2ij dc^dcs / (1 + c cs)^2
        j = su2.params["j"]
        assert_form(quantization_form(su2), {("phi",): 1, ("c",): -I * j * cs / (1 + c * cs),
                                             ("cs",): I * j * c / (1 + c * cs)})

    def test_oscillator_theta(self, osc):
        hbar, m, w = (osc.params[k] for k in ("hbar", "m", "omega"))
        assert_form(quantization_form(osc), {("phi",): hbar, ("x",): p / 2, ("p",): -x / 2,
                                             ("t",): -(p**2 / (2 * m) + m * w**2 * x**2 / 2)})

    def test_hw_dtheta(self, hw):
        assert_form(exterior_derivative(quantization_form(hw)), {("q", "p"): 1})

    def test_su2_dtheta(self, su2):
        j = su2.params["j"]
        assert_form(exterior_derivative(quantization_form(su2)),
                    {("c", "cs"): 2 * I * j / (1 + c * cs) ** 2})

    @pytest.mark.parametrize("name", GROUPS)
    def test_d_squared(self, name):
        s = spec(name)
        assert exterior_derivative(exterior_derivative(quantization_form(s))).is_zero()

    @pytest.mark.parametrize("name", GROUPS)
    def test_vertical_invariance(self, name):
        s = spec(name)
        theta = quantization_form(s)
        X0 = left_fields(s)[-1]
        assert lie_derivative(X0, theta).is_zero()
        assert equal(interior_product(X0, theta), s.convention, s.context)
        assert equal(interior_product(X0, quantization_form(s, scaled=False)), 1)

    @pytest.mark.parametrize("name", GROUPS)
    def test_left_invariance_numeric(self, name):
        s = spec(name, j=1) if name == "su2" else spec(name)
        rec = left_invariance_check(s, translations=50, points=20, tol=1e-8)
        assert rec.passed, rec.detail

    def test_contraction_of_area_form(self):
        w = Form.from_dict((q, p), 2, {(0, 1): 1})
        X = VectorField((q, p), (1, 0))
        out = interior_product(X, w)
        assert out.degree == 1 and out.coefficient("p") == 1 and out.coefficient("q") == 0

    def test_oscillator_contraction(self, osc):
        m, w = osc.params["m"], osc.params["omega"]
        X = by_name(right_fields(osc), "x")
        value = interior_product(X, quantization_form(osc))
        assert equal(value, p * sp.cos(w * t) + m * w * x * sp.sin(w * t))


class TestNoether:
    def test_hw(self, hw):
        F = noether_invariants(hw)
        assert equal(F["q"], -p) and equal(F["p"], q) and F["a"] == 0

    def test_oscillator_energy(self, osc):
        m, w = osc.params["m"], osc.params["omega"]
        assert equal(noether_invariants(osc)["t"], -(p**2 / (2 * m) + m * w**2 * x**2 / 2))

    @pytest.mark.parametrize("name", GROUPS)
    def test_central_invariant_is_convention(self, name):
        s = spec(name)
        assert equal(noether_invariants(s)["X0"], s.convention)

    @pytest.mark.parametrize("name", GROUPS)
    def test_noether_identity(self, name):
        # right fields generate left translations, which preserve Theta
        s = spec(name)
        theta = quantization_form(s)
        sigma = exterior_derivative(theta)
        F = noether_invariants(s)
        for X in right_fields(s):
            lhs = interior_product(X, sigma)
            rhs = exterior_derivative(F[X.name], theta.variables).scale(-1)
            assert (lhs - rhs).is_zero(), X.name


class TestNormalForm:
    def test_hw(self, hw):
        nf = sigma_normal_form(hw)
        assert nf.rank == 2
        assert equal(nf.nu[0], 1 / hw.params["hbar"])
        assert nf.kernel == [[0, 0, 1]]

    def test_oscillator_complex_structure(self, osc):
        nf = sigma_normal_form(osc)
        assert set(nf.J_terms()) == {(1, "p", "x"), (-1, "x", "p")}

    def test_su2_complex_structure(self, su2):
        nf = sigma_normal_form(su2)
        assert set(nf.J_terms()) == {(1, "cs", "c"), (-1, "c", "cs")}
        assert nf.conditions, "the rank depends on j != 0"

    def test_su2_trivial_spin(self):
        assert sigma_normal_form(spec("su2", j=0)).rank == 0

    @pytest.mark.parametrize("name", GROUPS)
    def test_J_squares_to_minus_one_on_pairs(self, name):
        nf = sigma_normal_form(spec(name))
        J2 = nf.J * nf.J
        for e, f, _ in nf.pairs:
            assert list(J2 * sp.Matrix(e)) == [-v for v in e]


class TestMeasures:
    def test_su2(self, su2):
        X = by_name(left_fields(su2), "vphi")
        mu = polarized_measure(su2, [X])
        want = Form.from_dict(mu.variables, 2, {(1, 2): 1 / (1 + c * cs) ** 2})
        assert same_measure(mu, want)

    def test_oscillator(self, osc):
        X = by_name(left_fields(osc), "p")
        mu = polarized_measure(osc, [X])
        want = Form.from_dict(mu.variables, 2, {(1, 0): 1})  # dx ^ dt
        assert same_measure(mu, want)

    def test_hw(self, hw):
        L = left_fields(hw)
        mu = polarized_measure(hw, [by_name(L, "a"), by_name(L, "p")])
        assert same_measure(mu, Form.one(mu.variables, [1, 0, 0, 0]))

    def test_degenerate(self, hw):
        X = by_name(left_fields(hw), "q")
        with pytest.raises(ValueError):
            polarized_measure(hw, [X, X])

    @pytest.mark.parametrize("name", GROUPS)
    def test_haar_is_top_degree(self, name):
        s = spec(name)
        assert haar_measure(s).degree == s.dim
