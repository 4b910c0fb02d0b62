import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import spec
from gaq.enveloping import (MAX_DEGREE, PBW, DiffOperator, anomaly_scan, casimir,
                            check_ho_polarization, op_commutator, op_compose, to_coordinates)
from gaq.errors import DegreeBoundExceeded, NonPolynomialObstruction
from gaq.group_model import parse_spec_text
from gaq.invariant_calculus import by_name, left_fields
from gaq.symexpr import ParamAssumption, equal, sym

I = sp.I
q, p, phi = sym("q"), sym("p"), sym("phi")
ALPHA = ParamAssumption("alpha", "real")

SCHRODINGER_HO = ["t", "a", "x", "c + (i/(2*m))*v^2"]


def field_op(s, name):
    return DiffOperator.from_field(by_name(left_fields(s), name))


def same_operator(A: DiffOperator, B: DiffOperator, ctx=None) -> bool:
    diff = A - B
    return all(equal(c, 0, ctx) for c in diff.terms.values())


class TestDiffOperators:
    def test_leibniz(self):
        d = DiffOperator((q, p), {(1, 0): 1})
        mq = DiffOperator.multiplication((q, p), q)
        want = DiffOperator((q, p), {(1, 0): q, (0, 0): 1})
        assert same_operator(op_compose(d, mq), want)

    def test_square_matches_double_application(self, osc):
        X = field_op(osc, "x")
        f = sp.Function("f")(*osc.all_symbols)
        assert equal(op_compose(X, X)(f), X(X(f)))

    def test_self_commutator(self, osc):
        X = op_compose(field_op(osc, "t"), field_op(osc, "x"))
        assert op_commutator(X, X).is_zero()

    def test_mixed_representations_rejected(self, hw):
        with pytest.raises(TypeError):
            op_compose(field_op(hw, "q"), PBW(hw).gen("q"))


class TestPBW:
    def test_heisenberg_pair(self, schr):
        U = PBW(schr)
        x, v = U.gen("x"), U.gen("v")
        got = op_commutator(x, v)
        assert got.terms == {(U.index["Z"],): schr.params["m"]}

    def test_central_bracket_pattern(self, hw):
        U = PBW(hw)
        Xq, Xp, Z = U.gen("q"), U.gen("p"), U.gen("X0")
        hbar = hw.params["hbar"]
        assert (op_commutator(Xq * Xq, Xp) - (Z * Xq).scale(-2 / hbar)).is_zero()

    def test_coordinate_and_abstract_modes_agree(self, hw):
        U = PBW(hw)
        Xq, Xp = U.gen("q"), U.gen("p")
        abstract = to_coordinates(hw, op_commutator(Xq * Xq, Xp))
        A, B = field_op(hw, "q"), field_op(hw, "p")
        direct = op_commutator(op_compose(A, A), B)
        assert same_operator(abstract, direct, hw.extended_context)

    def test_confluence(self, schr):
        U = PBW(schr)
        x, v = U.gen("x"), U.gen("v")
        assert ((x * v) * x - x * (v * x)).is_zero()
        assert (U.parse("x*v*x") - U.parse("v*x^2") - U.parse("m*x*Z")).is_zero()

    def test_parse_keeps_written_order(self, schr):
        U = PBW(schr)
        assert (U.parse("v*x") - U.gen("v") * U.gen("x")).is_zero()

    @given(st.lists(st.sampled_from("tacxvZ"), min_size=0, max_size=4),
           st.lists(st.sampled_from("tacxvZ"), min_size=0, max_size=4),
           st.lists(st.sampled_from("tacxvZ"), min_size=0, max_size=3))
    def test_associativity(self, a, b, c):
        U = PBW(spec("schrodinger-algebra"))

        def word(letters):
            out = U.scalar(1)
            for ch in letters:
                out = out * U.gen(ch)
            return out

        A, B, C = word(a), word(b), word(c)
        assert ((A * B) * C - A * (B * C)).is_zero()


def _random_operator(s, rng, degree=2):
    names = [X.name for X in left_fields(s)]
    U = PBW(s)
    out = U.scalar(rng.randint(-3, 3))
    for _ in range(3):
        term = U.scalar(rng.randint(1, 3))
        for _ in range(rng.randint(1, degree)):
            term = term * U.gen(rng.choice(names))
        out = out + term
    return out


@pytest.mark.parametrize("seed", range(8))
def test_associativity_on_test_polynomials(seed):
    # numeric application of coordinate realizations to a random polynomial
    s = spec("harmonic-oscillator", hbar=1, m=1, omega=1)
    rng = random.Random(seed)
    A, B, C = (to_coordinates(s, _random_operator(s, rng)) for _ in range(3))
    t, x, pp = sym("t"), sym("x"), sym("p")
    f = sum(rng.randint(-4, 4) * t**i * x**j * pp**k for i in range(3) for j in range(3) for k in range(3))
    f = f * sp.exp(I * phi)
    left = op_compose(op_compose(A, B), C)(f)
    right = op_compose(A, op_compose(B, C))(f)
    point = {t: 0.3, x: -0.4, pp: 0.7, phi: 0.2}
    assert abs(complex((left - right).subs(point).evalf())) < 1e-9


class TestHigherOrderPolarizations:
    def test_oscillator_configuration_space(self, osc):
        v = check_ho_polarization(osc, ["t - (i*hbar/(2*m))*x^2", "p"])
        assert v.passed and v.closes and v.avoids_central

    def test_schrodinger_at_anomaly(self):
        v = check_ho_polarization(spec("schrodinger-algebra", k=I / 4), SCHRODINGER_HO)
        assert v.passed

    def test_schrodinger_without_anomaly(self):
        v = check_ho_polarization(spec("schrodinger-algebra", k=0), SCHRODINGER_HO)
        assert not v.passed
        assert v.scalars, "the obstruction is a nonzero scalar"
        assert all(sp.sympify(s).is_number and s != 0 for s in v.scalars)

    def test_real_quarter_does_not_close(self):
        v = check_ho_polarization(spec("schrodinger-algebra", k=sp.Rational(1, 4)), SCHRODINGER_HO)
        assert not v.passed

    def test_central_element_rejected(self, hw):
        v = check_ho_polarization(hw, ["X0"])
        assert not v.avoids_central and not v.passed

    def test_degree_bound(self, osc):
        assert MAX_DEGREE == 2
        with pytest.raises(DegreeBoundExceeded):
            check_ho_polarization(osc, ["x^3", "p"])

    def test_first_order_content_is_validated(self, osc):
        v = check_ho_polarization(osc, ["t - (i*hbar/(2*m))*x^2", "p"])
        assert v.content_verdict is not None and v.content_verdict.horizontal


class TestAnomalyScan:
    def test_schrodinger(self, schr):
        scan = anomaly_scan(schr, SCHRODINGER_HO, "k")
        assert scan.roots == [I / 4]
        assert scan.magnitudes() == [sp.Rational(1, 4)]
        assert scan.obstructions == [4 * I * sp.Symbol("k") + 1]

    def test_oscillator_prefactor(self, osc):
        scan = anomaly_scan(osc, ["t - alpha*x^2", "p"], "alpha", [ALPHA])
        hbar, m = osc.params["hbar"], osc.params["m"]
        assert len(scan.roots) == 1 and equal(scan.roots[0], I * hbar / (2 * m))

    def test_oscillator_momentum_prefactor(self, osc):
        scan = anomaly_scan(osc, ["t - alpha*p^2", "x"], "alpha", [ALPHA])
        hbar, m, w = osc.params["hbar"], osc.params["m"], osc.params["omega"]
        assert len(scan.roots) == 1 and equal(scan.roots[0], I * hbar * m * w**2 / 2)

    def test_unobstructed_template(self, hw):
        scan = anomaly_scan(hw, ["a", "p + alpha*a"], "alpha", [ALPHA])
        assert scan.all_values and scan.roots == []

    def test_non_rational_coefficient(self, schr):
        with pytest.raises(NonPolynomialObstruction):
            anomaly_scan(schr, ["t", "a", "x", "c + exp(alpha)*v^2"], "alpha", [ALPHA])


class TestCasimir:
    def test_oscillator(self, osc):
        res = casimir(osc)
        assert all(res.commutes.values())
        U = PBW(osc)
        hbar, m, w = (osc.params[k] for k in ("hbar", "m", "omega"))
        want = U.parse("t") - (U.gen("x") * U.gen("x")).scale(I * hbar / (2 * m)) \
            - (U.gen("p") * U.gen("p")).scale(I * hbar * m * w**2 / 2)
        assert len(res.basis) == 1
        assert (res.element - want).is_zero()

    def test_oscillator_commutation(self, osc):
        el = casimir(osc).element
        U = el.algebra
        for g in ("t", "x", "p"):
            assert U.gen(g).commutator(el).central_to().is_zero()

    def test_abelian(self):
        plane = parse_spec_text("[meta]\nname = plane\nkind = algebra\ncentral = Z\n\n"
                                "[generators]\nu\nw\n\n[brackets]\n[u, w] = 0\n\n[theta]\nZ = 1\n")
        res = casimir(plane)
        texts = {b.text() for b in res.basis}
        assert {"u", "w"} <= texts and all(res.commutes.values())
