"""Wave functions on the extended group, polarization equations and reduced actions.

A wave function is ``prefactor * Phi(reduced coordinates)``; the prefactor
carries the fibre dependence ``exp(i*phi)`` so that ``X0 Psi = i Psi``.
Right-invariant fields preserve the polarized space, and acting with them
then dividing by the prefactor leaves a differential operator in the
reduced coordinates (a :class:`ReducedOperator`).
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import sympy as sp

from .enveloping import PBW, DiffOperator, PBWElement, check_ho_polarization, to_coordinates
from .errors import GaqError, RepresentationError, SpecError
from .group_model import GroupSpec, registry_get
from .invariant_calculus import CENTRAL, VectorField, by_name, left_fields, right_fields
from .lie_structure import AlgebraElement, algebra_of, structure_constants
from .report import CheckRecord, Report
from .symexpr import Expr, equal, normalize, parse, to_text

PHI = "Phi"


# ---------------------------------------------------------------------------
# ansatz
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WaveAnsatz:
    """``Psi = prefactor * Phi(*reduced)`` with ``Phi`` left opaque."""

    prefactor: Expr
    reduced: tuple[sp.Symbol, ...]
    label: str = ""

    @property
    def phi(self) -> Expr:
        return sp.Function(PHI)(*self.reduced)

    @property
    def psi(self) -> Expr:
        return self.prefactor * self.phi

    def text(self) -> str:
        args = ", ".join(s.name for s in self.reduced)
        return f"{to_text(self.prefactor)} * {PHI}({args})"


def make_ansatz(spec: GroupSpec, prefactor: str, reduced: Sequence[str], label: str = "") -> WaveAnsatz:
    """Build an ansatz from DSL text; ``zeta`` may be used for ``exp(i*phi)``."""
    ctx = spec.extended_context
    text = prefactor.replace("zeta", f"exp(i*{spec.fibre.name})")
    syms = {s.name: s for s in spec.all_symbols}
    return WaveAnsatz(parse(text, ctx), tuple(syms[r] for r in reduced), label)


def verify_equivariance(spec: GroupSpec, psi: WaveAnsatz) -> CheckRecord:
    """``X0 Psi = i Psi``."""
    X0 = by_name(left_fields(spec), CENTRAL)
    lhs = X0(psi.psi)
    ok = equal(lhs, sp.I * psi.psi, spec.extended_context)
    detail = "X0 Psi = i Psi" if ok else f"X0 Psi / Psi = {to_text(normalize(lhs / psi.psi))}"
    return CheckRecord("equivariance", ok, detail)


# ---------------------------------------------------------------------------
# operators acting on ansatze
# ---------------------------------------------------------------------------


def _as_operator(spec: GroupSpec, element) -> tuple[str, DiffOperator]:
    """Coordinate operator for a left-algebra element, given as text,
    :class:`AlgebraElement`, :class:`PBWElement` or :class:`VectorField`."""
    if isinstance(element, VectorField):
        return element.name or element.text(), DiffOperator.from_field(element)
    if isinstance(element, DiffOperator):
        return element.text(), element
    pbw = PBW(spec)
    if isinstance(element, AlgebraElement):
        element = pbw.from_algebra(element)
    elif isinstance(element, str):
        element = pbw.parse(element)
    return element.text(), to_coordinates(spec, element)


def _reduce(spec: GroupSpec, psi: WaveAnsatz, result: Expr) -> Expr:
    return normalize(sp.expand(result / psi.prefactor))


def _operator_on_phi(expr: Expr, psi: WaveAnsatz) -> tuple[DiffOperator, Expr]:
    """Read ``expr`` (linear in Phi and its derivatives) as an operator on Phi.

    Returns the operator and whatever is left over (nonzero only when
    ``expr`` is not linear in Phi).
    """
    phi = psi.phi
    placeholders: dict = {}
    index: dict = {}
    for d in sorted(expr.atoms(sp.Derivative), key=lambda d: -d.derivative_count):
        if d.expr != phi:
            continue
        s = sp.Dummy(f"d{len(placeholders)}")
        placeholders[d] = s
        alpha = [0] * len(psi.reduced)
        for v, k in d.variable_count:
            alpha[psi.reduced.index(v)] += k
        index[s] = tuple(alpha)
    s0 = sp.Dummy("phi0")
    placeholders[phi] = s0
    index[s0] = (0,) * len(psi.reduced)
    e = sp.expand(expr.xreplace(placeholders))
    terms = {}
    rest = e
    for s, alpha in index.items():
        c = normalize(e.coeff(s))
        if c != 0:
            terms[alpha] = c
        rest = rest - c * s
    rest = normalize(rest)
    return DiffOperator(tuple(psi.reduced), terms), rest


@dataclass
class Residual:
    """Result of applying one polarization element to an ansatz."""

    element: str
    residual: Expr
    operator: DiffOperator

    @property
    def solved(self) -> bool:
        return self.residual == 0


def apply_polarization(spec: GroupSpec, P: Sequence, psi: WaveAnsatz) -> list[Residual]:
    """Apply every element of ``P`` to ``psi`` and strip the prefactor.

    Elements may have higher order (PBW text such as
    ``"t - (i*hbar/(2*m))*x^2"``). A residual of 0 means the element
    annihilates the ansatz for every ``Phi``; otherwise the residual is the
    equation left on ``Phi``.
    """
    out = []
    for element in P:
        name, op = _as_operator(spec, element)
        res = _reduce(spec, psi, op.apply(psi.psi))
        red, rest = _operator_on_phi(res, psi)
        if rest != 0:
            raise SpecError(f"{name} does not act linearly on the ansatz")
        out.append(Residual(name, res, red))
    return out


def solve_first_order(spec: GroupSpec, X: VectorField, variable: str) -> Expr:
    """Integrating factor for ``X = g * (d/du + f X0) + (directions Phi ignores)``.

    Returns ``exp(-i * integral f du)``, the factor ``F`` with
    ``(d/du + f X0)(exp(i*phi) F) = 0``.
    """
    u = next(s for s in spec.all_symbols if s.name == variable)
    g = X.component(variable)
    if g == 0:
        raise SpecError(f"{X.name} has no d/d{variable} component")
    f = normalize(X.vertical / g)
    return sp.exp(normalize(-sp.I * sp.integrate(f, u)))


# ---------------------------------------------------------------------------
# reduced right action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedOperator:
    """Right generator ``name`` as an operator on ``Phi``."""

    name: str
    operator: DiffOperator

    def __call__(self, f) -> Expr:
        return normalize(self.operator.apply(f))

    def text(self) -> str:
        return self.operator.text()


def reduce_right_action(spec: GroupSpec, P: Sequence, psi: WaveAnsatz, generator: str) -> ReducedOperator:
    """Act with ``X^R_generator`` on ``psi`` and read off the operator on ``Phi``.

    Raises
    ------
    RepresentationError
        If the first-order polarization equations are not solved by ``psi``
        or the result depends on coordinates outside the reduced set.
    """
    for r in apply_polarization(spec, [p for p in P if _degree(spec, p) <= 1], psi):
        if not r.solved:
            raise RepresentationError(f"ansatz does not solve {r.element}: residual {to_text(r.residual)}")
    X = by_name(right_fields(spec), generator)
    res = _reduce(spec, psi, X(psi.psi))
    op, rest = _operator_on_phi(res, psi)
    if rest != 0:
        raise RepresentationError(f"X^R_{generator} leaves a non-linear remainder {to_text(rest)}")
    allowed = set(psi.reduced) | set(spec.pins().keys()) | {p.symbol for p in spec.context.params}
    stray = set().union(*(sp.sympify(c).free_symbols for c in op.terms.values())) - allowed if op.terms else set()
    if stray:
        names = ", ".join(sorted(s.name for s in stray))
        raise RepresentationError(f"X^R_{generator} leaks coordinates {names}: polarized space not invariant")
    return ReducedOperator(generator, op)


def _degree(spec, p) -> int:
    if isinstance(p, str):
        return PBW(spec).parse(p).degree_without_central()
    if isinstance(p, PBWElement):
        return p.degree_without_central()
    return 1


def reduced_bracket_check(spec: GroupSpec, ops: Mapping[str, ReducedOperator],
                          central_value=sp.I) -> CheckRecord:
    """Reduced operators obey the right-field brackets with ``X0 -> central_value``."""
    table = structure_constants(spec, "right")
    names = [n for n in ops if n != CENTRAL]
    variables = next(iter(ops.values())).operator.variables if ops else ()
    for a_i, a in enumerate(names):
        for b in names[a_i + 1:]:
            A, B = ops[a].operator, ops[b].operator
            lhs = A.compose(B) - B.compose(A)
            rhs = DiffOperator(variables, {})
            for z, c in table.get((a, b), {}).items():
                if z == CENTRAL:
                    rhs = rhs + DiffOperator.multiplication(variables, c * central_value)
                elif z in ops:
                    rhs = rhs + ops[z].operator.scale(c)
                else:
                    return CheckRecord("reduced-brackets", False, f"[{a}, {b}] involves {z}, not reduced")
            if not (lhs - rhs).is_zero():
                return CheckRecord("reduced-brackets", False, f"[{a}, {b}] mismatch",
                                   {"lhs": lhs.text(), "rhs": rhs.text()})
    return CheckRecord("reduced-brackets", True, "reduced operators satisfy the right-field brackets")


# ---------------------------------------------------------------------------
# built-in ansatze for the registry examples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Representation:
    """A named polarization with its verified ansatz."""

    spec_name: str
    name: str
    elements: tuple[str, ...]
    prefactor: str
    reduced: tuple[str, ...]


BUILTIN = {
    ("heisenberg-weyl", "P_q"): Representation("heisenberg-weyl", "P_q", ("a", "p"),
                                              "zeta*exp(i*q*p/(2*hbar))", ("q",)),
    ("heisenberg-weyl", "P_p"): Representation("heisenberg-weyl", "P_p", ("a", "q"),
                                              "zeta*exp(-i*q*p/(2*hbar))", ("p",)),
    ("su2", "P_c"): Representation("su2", "P_c", ("vphi", "cs"), "zeta*(1 + c*cs)^(-j)", ("c",)),
    ("harmonic-oscillator", "P_HO_x"): Representation(
        "harmonic-oscillator", "P_HO_x", ("t - (i*hbar/(2*m))*x^2", "p"),
        "zeta*exp(-i*p*x/(2*hbar))", ("x", "t")),
    ("harmonic-oscillator", "P_HO_p"): Representation(
        "harmonic-oscillator", "P_HO_p", ("t - (i*hbar*m*omega^2/2)*p^2", "x"),
        "zeta*exp(i*p*x/(2*hbar))", ("p", "t")),
}


def builtin(spec_name: str, name: str) -> Representation:
    try:
        return BUILTIN[(spec_name, name)]
    except KeyError:
        known = ", ".join(n for s, n in BUILTIN if s == spec_name) or "none"
        raise SpecError(f"no built-in polarization {name!r} for {spec_name} (known: {known})") from None


def represent(spec: GroupSpec, name: str) -> Report:
    """Equivariance, residuals and reduced right actions for a built-in polarization."""
    rep = builtin(spec.name, name)
    psi = make_ansatz(spec, rep.prefactor, rep.reduced, name)
    report = Report()
    report.add(verify_equivariance(spec, psi))
    for r in apply_polarization(spec, rep.elements, psi):
        report.add(CheckRecord(f"residual[{r.element}]", r.solved or _degree(spec, r.element) > 1,
                               "0" if r.solved else to_text(r.residual)))
    ops = {}
    for X in right_fields(spec):
        if X.name == CENTRAL:
            continue
        try:
            ops[X.name] = reduce_right_action(spec, rep.elements, psi, X.name)
            report.add(CheckRecord(f"reduced[{X.name}]", True, ops[X.name].text()))
        except RepresentationError as exc:
            report.add(CheckRecord(f"reduced[{X.name}]", False, str(exc)))
    if ops:
        report.add(reduced_bracket_check(spec, ops))
    return report


# ---------------------------------------------------------------------------
# SU(2) matrices
# ---------------------------------------------------------------------------


@dataclass
class SU2Rep:
    """Spin-``j`` matrices on the monomial basis ``1, c, ..., c^(2j)``."""

    j: sp.Rational
    J0: sp.Matrix
    Jp: sp.Matrix
    Jm: sp.Matrix
    casimir: sp.Matrix
    gram: sp.Matrix
    weights: list[sp.Rational]
    highest: str
    lowest: str
    notes: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.J0.shape[0]

    def adjoint_ok(self) -> bool:
        """``J+^dagger = J-`` and ``J0^dagger = J0`` in the Gram inner product."""
        G = self.gram
        Gi = G.inv()
        dag = lambda M: (Gi * M.H * G).applyfunc(sp.nsimplify)
        return (dag(self.Jp) - self.Jm).is_zero_matrix and (dag(self.J0) - self.J0).is_zero_matrix


def half_integer(j) -> sp.Rational:
    """Exact ``j`` with ``2j`` a non-negative integer, or :class:`RepresentationError`."""
    if isinstance(j, str):
        try:
            j = Fraction(j)
        except ValueError:
            raise RepresentationError(f"cannot read spin {j!r}") from None
    r = sp.nsimplify(j, rational=True) if isinstance(j, float) else sp.Rational(j)
    if not (2 * r).is_integer or r < 0:
        raise RepresentationError(f"2j must be a non-negative integer; got j = {j}")
    return r


@lru_cache(maxsize=1)
def _su2_reduced_ops_symbolic() -> tuple[sp.Symbol, dict[str, ReducedOperator]]:
    spec = registry_get("su2")
    rep = BUILTIN[("su2", "P_c")]
    psi = make_ansatz(spec, rep.prefactor, rep.reduced)
    ops = {g: reduce_right_action(spec, rep.elements, psi, g) for g in ("vphi", "c", "cs")}
    return spec.params["j"], ops


def _su2_reduced_ops(j: sp.Rational) -> dict[str, ReducedOperator]:
    jsym, ops = _su2_reduced_ops_symbolic()
    out = {}
    for g, op in ops.items():
        terms = {a: normalize(sp.sympify(c).xreplace({jsym: j})) for a, c in op.operator.terms.items()}
        out[g] = ReducedOperator(g, DiffOperator(op.operator.variables, {a: c for a, c in terms.items() if c != 0}))
    return out


def _matrix(op: ReducedOperator, n: int, c: sp.Symbol) -> sp.Matrix:
    M = sp.zeros(n, n)
    for l in range(n):
        image = sp.Poly(sp.expand(op(c ** l)), c)
        for (deg,), coef in image.terms():
            if deg >= n:
                raise RepresentationError(f"c^{l} is mapped outside the span (degree {deg})")
            M[deg, l] = coef
    return M


def su2_rep_matrices(j) -> SU2Rep:
    """Matrices of ``J0 = (i/2)(X^R_vphi + 2j X0)``, ``J+ = (i/sqrt2) X^R_cs`` and
    ``J- = (i/sqrt2) X^R_c`` on polynomials of degree ``<= 2j``.

    The Casimir is ``J0^2 + J+ J- + J- J+``; with this normalization of
    ``J+-`` it equals ``j(j+1)``. The Gram matrix comes from
    ``|Psi|^2 dc dcs / (1 + c cs)^2`` with ``cs = conj(c)``:
    ``<c^l, c^l> = pi l! (2j-l)! / (2j+1)!``.
    """
    j = half_integer(j)
    n = int(2 * j + 1)
    ops = _su2_reduced_ops(j)
    c = ops["c"].operator.variables[0]
    eta, Xc, Xcs = (_matrix(ops[g], n, c) for g in ("vphi", "c", "cs"))
    J0 = (sp.I / 2 * (eta + 2 * j * sp.I * sp.eye(n))).applyfunc(sp.nsimplify)
    k = sp.I / sp.sqrt(2)
    Jp = (k * Xcs).applyfunc(sp.nsimplify)
    Jm = (k * Xc).applyfunc(sp.nsimplify)
    cas = (J0 * J0 + Jp * Jm + Jm * Jp).applyfunc(sp.nsimplify)
    gram = sp.diag(*[sp.pi * sp.factorial(l) * sp.factorial(2 * j - l) / sp.factorial(2 * j + 1)
                     for l in range(n)])
    weights = [J0[l, l] for l in range(n)]
    hi = max(range(n), key=lambda l: weights[l])
    lo = min(range(n), key=lambda l: weights[l])
    notes = []
    if n > 1 and (Jp * sp.eye(n)[:, hi]).is_zero_matrix is False:
        notes.append("highest-weight vector not annihilated by J+")
    if n > 1 and hi != j:
        notes.append(f"highest weight at c^{hi}, not c^{j}")
    mono = lambda l: "1" if l == 0 else ("c" if l == 1 else f"c^{l}")
    return SU2Rep(j, J0, Jp, Jm, cas, gram, weights, mono(hi), mono(lo), notes)


def gram_quadrature(j, l: int) -> float:
    """Numeric ``<c^l, c^l>`` by radial quadrature (angular factor ``2 pi``)."""
    from scipy.integrate import quad

    j = float(half_integer(j))
    val, _ = quad(lambda r: r ** (2 * l + 1) * (1 + r * r) ** (-2 * j - 2), 0, np.inf)
    return 2 * math.pi * val


# ---------------------------------------------------------------------------
# harmonic oscillator
# ---------------------------------------------------------------------------


def schrodinger_residual(spec: GroupSpec | None = None) -> tuple[Expr, WaveAnsatz]:
    """Equation left on ``Phi(x, t)`` by the second-order element of ``P_HO_x``,
    multiplied by ``i*hbar``."""
    spec = spec or registry_get("harmonic-oscillator")
    rep = BUILTIN[("harmonic-oscillator", "P_HO_x")]
    psi = make_ansatz(spec, rep.prefactor, rep.reduced)
    res = apply_polarization(spec, [rep.elements[0]], psi)[0].residual
    hbar = spec.params["hbar"]
    return normalize(sp.I * hbar * res), psi


@dataclass
class HermiteResult:
    n: int
    max_residual: float
    energy: float
    expected_energy: float


def hermite_residual_check(n: int, grid=None, hbar: float = 1.0, m: float = 1.0, omega: float = 1.0,
                           phi: str | None = None) -> HermiteResult:
    """Evaluate the derived oscillator equation on the level-``n`` Hermite function.

    ``grid`` is a pair ``(xs, ts)``; the default is 41 points on ``[-4, 4]``
    at ``t in {0, 0.5}``. ``phi`` replaces the trial function (DSL text in
    ``x`` and ``t``) for negative controls. The energy is read off as
    ``i hbar d_t Phi / Phi`` at the first grid point where ``Phi`` is not
    small.
    """
    if n < 0:
        raise RepresentationError("level must be non-negative")
    spec = registry_get("harmonic-oscillator")
    eq, psi = schrodinger_residual(spec)
    x, t = psi.reduced
    P = spec.params
    if phi is None:
        xi = sp.sqrt(P["m"] * P["omega"] / P["hbar"]) * x
        trial = (sp.exp(-P["m"] * P["omega"] * x ** 2 / (2 * P["hbar"])) * sp.hermite(n, xi)
                 * sp.exp(-sp.I * (n + sp.Rational(1, 2)) * P["omega"] * t))
    else:
        trial = parse(phi, spec.extended_context)
    vals = {P["hbar"]: sp.nsimplify(hbar), P["m"]: sp.nsimplify(m), P["omega"]: sp.nsimplify(omega)}
    expr = eq.subs(psi.phi, trial).doit().subs(vals)
    f = sp.lambdify((x, t), expr, "numpy")
    dt = sp.lambdify((x, t), (sp.I * P["hbar"] * sp.diff(trial, t) / trial).subs(vals), "numpy")
    if grid is None:
        xs, ts = np.linspace(-4, 4, 41), np.array([0.0, 0.5])
    else:
        xs, ts = (np.asarray(g, dtype=float) for g in grid)
    X, T = np.meshgrid(xs, ts)
    res = np.abs(np.asarray(f(X, T), dtype=complex) * np.ones_like(X))
    energy = complex(dt(0.1, 0.0))
    return HermiteResult(n, float(res.max()), float(energy.real), (n + 0.5) * hbar * omega)


# ---------------------------------------------------------------------------
# Schroedinger algebra: quantum invariant relations
# ---------------------------------------------------------------------------

HO_OPERATORS = {
    "t": "t - (i/(2*m))*x^2",
    "a": "a - (i/m)*v*x",
    "c": "c + (i/(2*m))*v^2",
}


@dataclass
class RelationReport:
    k: Expr
    polarization: object
    residuals: dict[str, Expr]
    commute_with_hw: dict[str, bool]
    classical: str = "F_t + F_x^2/(2m) = 0 (classical relation at k = 0; documentation only)"

    @property
    def sl2_pattern(self) -> bool:
        return all(r == 0 for r in self.residuals.values())

    def records(self) -> list[CheckRecord]:
        out = [CheckRecord("ho-polarization", self.polarization.passed, self.polarization.detail)]
        for pair, r in self.residuals.items():
            out.append(CheckRecord(f"relation{pair}", r == 0, "reproduced" if r == 0 else
                                   f"differs by the scalar {to_text(r)}", None if r == 0 else {"scalar": to_text(r)}))
        for g, ok in self.commute_with_hw.items():
            out.append(CheckRecord(f"commutes-with[{g}]", ok))
        return out


def quantum_invariant_relations(spec=None, k=None) -> RelationReport:
    """Check the second-order ``t, a, c`` operators of the Schroedinger algebra.

    They must form, with ``x``, a higher-order polarization and reproduce
    the ``sl(2,R)`` brackets ``[t,a] = -2t``, ``[a,c] = -2c``, ``[t,c] = a``
    exactly once the central generator acts as ``i`` (the classical central
    term ``2kZ`` must be absorbed by reordering).
    """
    spec = spec or registry_get("schrodinger-algebra")
    if k is not None:
        spec = spec.with_pins(k=k)
    pbw = PBW(spec)
    ops = {g: pbw.parse(t) for g, t in HO_OPERATORS.items()}
    verdict = check_ho_polarization(pbw, [ops["t"], ops["a"], ops["c"], pbw.gen("x")])
    alg = pbw.alg
    residuals = {}
    for a, b in (("t", "a"), ("a", "c"), ("t", "c")):
        lhs = ops[a].commutator(ops[b]).central_to()
        rhs = pbw.scalar(0)
        for z, c in alg.bracket_basis(a, b).items():
            if z in ops:
                rhs = rhs + ops[z].scale(c)
        diff = (lhs - rhs.central_to())
        residuals[f"[{a},{b}]"] = diff.scalar_part() if diff.is_scalar() else sp.nan
    commute = {}
    for g in ("x", "v"):
        commute[g] = all(ops[o].commutator(pbw.gen(g)).central_to().is_zero() for o in ops)
    return RelationReport(sp.sympify(k) if k is not None else spec.context.params, verdict, residuals, commute)
