"""Lie algebra data, Jacobi checks, pseudo-extensions, the characteristic
subalgebra and first-order polarizations.

A :class:`LieAlgebra` is the constant-coefficient shadow of a spec: basis
names (the central generator last), the bracket table and the values of the
unscaled quantization form on the basis. Group specs produce one from their
left-invariant fields; abstract specs carry one directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import sympy as sp

from . import linalg
from .errors import GaqError, NonClosureError, SpecError
from .group_model import AbstractAlgebraSpec, GroupSpec, linear_coefficients
from .invariant_calculus import (
    CENTRAL,
    Form,
    VectorField,
    commutator,
    dual_forms,
    exterior_derivative,
    left_fields,
    quantization_form,
    right_fields,
    sigma_normal_form,
    wedge,
)
from .report import CheckRecord
from .symexpr import Context, Expr, ParamAssumption, equal, equal_witness, normalize, parse, to_text

Table = dict[tuple[str, str], dict[str, Expr]]


# ---------------------------------------------------------------------------
# algebra data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieAlgebra:
    """Basis, bracket table and quantization-form values at the identity."""

    name: str
    basis: tuple[str, ...]
    central: str
    table: Table
    theta: Mapping[str, Expr]
    context: Context

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(b for b in self.basis if b != self.central)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def bracket_basis(self, x: str, y: str) -> dict[str, Expr]:
        return dict(self.table.get((x, y), {}))

    def bracket(self, u: "AlgebraElement", v: "AlgebraElement") -> "AlgebraElement":
        out: dict[str, Expr] = {}
        for x, a in u.coeffs.items():
            for y, b in v.coeffs.items():
                for z, c in self.table.get((x, y), {}).items():
                    out[z] = out.get(z, 0) + a * b * c
        return AlgebraElement.of(self, out)

    def theta_of(self, u: "AlgebraElement") -> Expr:
        return normalize(sum((c * sp.sympify(self.theta.get(x, 0)) for x, c in u.coeffs.items()),
                             sp.Integer(0)))

    def sigma(self, u: "AlgebraElement", v: "AlgebraElement") -> Expr:
        """``Sigma(u, v) = -Theta([u, v])`` (left-invariant arguments)."""
        return normalize(-self.theta_of(self.bracket(u, v)))

    def element(self, spec) -> "AlgebraElement":
        return AlgebraElement.parse(self, spec) if isinstance(spec, str) else spec

    def unit(self, name: str) -> "AlgebraElement":
        return AlgebraElement.of(self, {name: 1})


@dataclass(frozen=True)
class AlgebraElement:
    """Constant combination of basis generators (coefficients may hold
    parameters and ``i`` but never chart coordinates)."""

    basis: tuple[str, ...]
    coeffs: Mapping[str, Expr]

    @classmethod
    def of(cls, alg: LieAlgebra, coeffs: Mapping[str, Expr]) -> "AlgebraElement":
        clean = {}
        for k, v in coeffs.items():
            if k not in alg.basis:
                raise SpecError(f"unknown generator {k!r}")
            v = normalize(v)
            if v != 0:
                clean[k] = v
        return cls(alg.basis, clean)

    @classmethod
    def from_vector(cls, alg: LieAlgebra, vec: Sequence) -> "AlgebraElement":
        return cls.of(alg, dict(zip(alg.basis, vec)))

    @classmethod
    def parse(cls, alg: LieAlgebra, text: str, declare: Sequence[ParamAssumption] = ()) -> "AlgebraElement":
        """Parse a linear combination such as ``"q + i*mu*p"``.

        Generator names act as symbols; extra parameters (``mu``) must be
        declared.
        """
        ctx = Context(alg.basis, tuple(alg.context.params) + tuple(declare))
        e = parse(text, ctx)
        coeffs = linear_coefficients(e, [ctx.symbol(b) for b in alg.basis], text)
        return cls.of(alg, coeffs)

    def vector(self) -> list[Expr]:
        return [sp.sympify(self.coeffs.get(b, 0)) for b in self.basis]

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = normalize(out.get(k, 0) + v)
        return AlgebraElement(self.basis, {k: v for k, v in out.items() if v != 0})

    def scale(self, s) -> "AlgebraElement":
        s = sp.sympify(s)
        return AlgebraElement(self.basis, {k: normalize(s * v) for k, v in self.coeffs.items()
                                           if normalize(s * v) != 0})

    def is_zero(self) -> bool:
        return not self.coeffs

    def text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for b in self.basis:
            if b in self.coeffs:
                c = self.coeffs[b]
                parts.append(b if c == 1 else f"({to_text(c)})*{b}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.text()


def field_commutator(X: VectorField, Y: VectorField) -> VectorField:
    """Coefficient-wise Lie bracket of two fields, vertical slot included."""
    return commutator(X, Y)


def _express(fields_dual: Sequence[Form], Y: VectorField, names: Sequence[str], spec: GroupSpec,
             what: str) -> dict[str, Expr]:
    at_e = {s: v for s, v in zip(spec.symbols(), spec.identity)}
    out = {}
    ctx = spec.extended_context
    for form, nm in zip(fields_dual, names):
        c = normalize(form(Y))
        if c.free_symbols & set(spec.all_symbols):
            c0 = normalize(c.xreplace(at_e))
            w = equal_witness(c, c0, ctx)
            if w is not None:
                raise NonClosureError(f"{what} has a non-constant component along {nm}: {to_text(c)}")
            c = c0
        if c != 0:
            out[nm] = c
    return out


def structure_constants(spec: GroupSpec | AbstractAlgebraSpec, side: str = "left") -> Table:
    """Bracket table of the left (or right) invariant basis.

    For a group spec every commutator of invariant fields is expanded in the
    same basis using the dual coframe; coefficients must be constant.

    Raises
    ------
    NonClosureError
        If a commutator has a non-constant coefficient.
    """
    if isinstance(spec, AbstractAlgebraSpec):
        if side != "left":
            return {k: {g: normalize(-c) for g, c in row.items()} for k, row in spec.table.items()}
        return {k: dict(v) for k, v in spec.table.items()}
    fields = left_fields(spec) if side == "left" else right_fields(spec)
    dual = dual_forms(spec, side)
    names = [f.name for f in fields]
    table: Table = {}
    for a, b in itertools.combinations(range(len(fields)), 2):
        Y = field_commutator(fields[a], fields[b])
        row = _express(dual, Y, names, spec, f"[X_{names[a]}, X_{names[b]}]")
        table[(names[a], names[b])] = row
        table[(names[b], names[a])] = {k: normalize(-v) for k, v in row.items()}
    return table


def algebra_of(spec: GroupSpec | AbstractAlgebraSpec | LieAlgebra) -> LieAlgebra:
    """Constant-coefficient algebra data of a spec (left-invariant basis)."""
    if isinstance(spec, LieAlgebra):
        return spec
    if isinstance(spec, AbstractAlgebraSpec):
        theta = {b: spec.theta(b) for b in spec.basis}
        return LieAlgebra(spec.name, spec.basis, spec.central, structure_constants(spec), theta,
                          spec.context)
    table = structure_constants(spec)
    basis = tuple(spec.coords) + (CENTRAL,)
    theta_form = quantization_form(spec, check=False, scaled=False)
    at_e = {s: v for s, v in zip(spec.symbols(), spec.identity)}
    theta = {f.name: normalize(theta_form(f).xreplace(at_e)) for f in left_fields(spec)}
    return LieAlgebra(spec.name, basis, CENTRAL, table, theta, spec.context)


def jacobi_check(alg: LieAlgebra | GroupSpec | AbstractAlgebraSpec) -> CheckRecord:
    """Cyclic sums ``[[x,y],z] + [[y,z],x] + [[z,x],y] = 0`` for all triples."""
    alg = algebra_of(alg)
    for x, y, z in itertools.combinations(alg.basis, 3):
        X, Y, Z = (alg.unit(n) for n in (x, y, z))
        s = alg.bracket(alg.bracket(X, Y), Z) + alg.bracket(alg.bracket(Y, Z), X) + alg.bracket(
            alg.bracket(Z, X), Y)
        for g, c in s.coeffs.items():
            if not equal(c, 0, alg.context):
                return CheckRecord("jacobi", False, f"cyclic sum over ({x}, {y}, {z}) is {s.text()}",
                                   {"triple": [x, y, z], "sum": s.text()})
    return CheckRecord("jacobi", True, f"{len(alg.basis)} generators")


def table_text(alg: LieAlgebra) -> list[str]:
    """Nonzero brackets as ``[x, y] = ...`` lines."""
    lines = []
    for x, y in itertools.combinations(alg.basis, 2):
        row = alg.bracket_basis(x, y)
        if row:
            lines.append(f"[{x}, {y}] = {AlgebraElement.of(alg, row).text()}")
    return lines


# ---------------------------------------------------------------------------
# pseudo-extensions
# ---------------------------------------------------------------------------


@dataclass
class PseudoExtension:
    """Result of adding ``lambda0_i theta^{L i}`` to the quantization form."""

    theta: Form
    dtheta: Form
    dtheta_formula: Form
    right_fields: list[VectorField]
    lambda0: dict[str, Expr]


def pseudo_extend(spec: GroupSpec, lambda0: Mapping[str, Expr]) -> PseudoExtension:
    """Pseudo-extension by a gradient covector at the identity.

    Returns ``Theta + lambda0_i theta^{L i}`` (the exact part ``-d lambda``
    is dropped), its exterior derivative computed directly and through the
    structure constants as ``-1/2 lambda0_i C^i_jk theta^j ^ theta^k``, and
    the redefined right fields ``X^R_i + lambda0_i X0``.
    """
    unknown = set(lambda0) - set(spec.coords)
    if unknown:
        raise SpecError(f"lambda0 names unknown generators {sorted(unknown)}")
    lam = {k: sp.sympify(v) for k, v in lambda0.items()}
    coframe = {f.name: f for f in dual_forms(spec)[:-1]}
    theta = quantization_form(spec, check=False)
    extra = Form(theta.variables, 1, {})
    for k, v in lam.items():
        extra = extra + coframe[k].scale(v)
    total = (theta + extra).normalized()
    direct = exterior_derivative(total)
    table = structure_constants(spec)
    formula = exterior_derivative(theta)
    names = list(spec.coords)
    for i, v in lam.items():
        for j, k in itertools.combinations(names, 2):
            c = table.get((j, k), {}).get(i, 0)
            if c != 0:
                # -1/2 C^i_jk theta^j ^ theta^k summed over ordered pairs
                formula = formula + wedge(coframe[j], coframe[k]).scale(-v * c)
    rf = []
    for X in right_fields(spec):
        shift = lam.get(X.name, 0)
        coeffs = list(X.coeffs)
        coeffs[-1] = normalize(coeffs[-1] + shift)
        rf.append(VectorField(X.variables, tuple(coeffs), "right", X.name))
    return PseudoExtension(total, direct, formula.normalized(), rf, lam)


# ---------------------------------------------------------------------------
# characteristic subalgebra
# ---------------------------------------------------------------------------


@dataclass
class CharacteristicSubalgebra:
    """Basis of ``Ker Theta ^ Ker dTheta`` in the generic case, the
    parameter conditions assumed nonzero, and the special cases obtained by
    setting each condition to zero."""

    basis: list[AlgebraElement]
    conditions: list[Expr]
    special: list[tuple[dict, "CharacteristicSubalgebra"]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def names(self) -> list[str]:
        return [b.text() for b in self.basis]


def _char_system(alg: LieAlgebra) -> list[list[Expr]]:
    rows = [[sp.sympify(alg.theta.get(b, 0)) for b in alg.basis]]
    for y in alg.basis:
        Y = alg.unit(y)
        rows.append([alg.sigma(alg.unit(x), Y) for x in alg.basis])
    return rows


def _char_generic(alg: LieAlgebra) -> CharacteristicSubalgebra:
    conditions: list[Expr] = []
    vecs = linalg.nullspace(_char_system(alg), alg.dim, conditions)
    vecs = linalg.span_basis(vecs, conditions)
    basis = [AlgebraElement.from_vector(alg, v) for v in vecs]
    return CharacteristicSubalgebra(basis, conditions)


def _pin_algebra(spec, values: dict):
    return spec.with_pins(**{k: v for k, v in values.items()})


def characteristic_subalgebra(spec: GroupSpec | AbstractAlgebraSpec, special_cases: bool = True
                              ) -> CharacteristicSubalgebra:
    """Solve ``Theta(X) = 0`` and ``i_X dTheta = 0`` at the identity.

    Generic in the unpinned parameters; each recorded condition is also
    solved for a parameter and the computation repeated with that value
    pinned (one level deep).
    """
    alg = algebra_of(spec)
    out = _char_generic(alg)
    if special_cases and not isinstance(spec, LieAlgebra):
        params = {p.name: p.symbol for p in spec.context.params if p.pin is None}
        for cond in out.conditions:
            for pname, psym in params.items():
                if not cond.has(psym):
                    continue
                for root in sp.solve(cond, psym):
                    root = sp.nsimplify(root)
                    if not root.is_Rational:
                        continue
                    try:
                        sub = characteristic_subalgebra(_pin_algebra(spec, {pname: root}), False)
                    except (GaqError, ValueError):
                        continue
                    out.special.append(({pname: root}, sub))
    return out


# ---------------------------------------------------------------------------
# polarizations
# ---------------------------------------------------------------------------


@dataclass
class PolarizationVerdict:
    """Flags and evidence from :func:`validate_polarization`."""

    elements: list[AlgebraElement]
    horizontal: bool
    subalgebra: bool
    maximal: bool
    full: bool
    symplectic: bool
    isotropic: bool
    conditions: list[Expr] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def flags(self) -> dict[str, bool]:
        return {k: getattr(self, k) for k in ("horizontal", "subalgebra", "maximal", "full", "symplectic")}

    def records(self, prefix: str = "") -> list[CheckRecord]:
        out = []
        for k, v in self.flags.items():
            w = self.witnesses.get(k)
            out.append(CheckRecord(f"{prefix}{k}", v, w if isinstance(w, str) else "",
                                   w if isinstance(w, dict) else None))
        return out


@dataclass
class PolarizationSpec:
    """A list of algebra elements; verdicts come from :func:`validate_polarization`."""

    elements: list
    label: str = ""


def _as_elements(alg: LieAlgebra, P, declare=()) -> list[AlgebraElement]:
    items = P.elements if isinstance(P, PolarizationSpec) else P
    out = []
    for it in items:
        if isinstance(it, str):
            out.append(AlgebraElement.parse(alg, it, declare))
        elif isinstance(it, AlgebraElement):
            out.append(it)
        else:
            raise TypeError(f"cannot interpret {it!r} as an algebra element")
    return out


def _complement(alg: LieAlgebra, pvecs: list[list[Expr]], conditions) -> list[list[Expr]]:
    """Unit vectors completing ``pvecs`` to a basis."""
    chosen = [list(v) for v in pvecs]
    extra = []
    for k in range(alg.dim):
        e = [sp.Integer(int(i == k)) for i in range(alg.dim)]
        if linalg.rank(chosen + [e], conditions) > len(chosen):
            chosen.append(e)
            extra.append(e)
    return extra


def _lambda_roots(poly: Expr, lam: sp.Symbol) -> list[Expr]:
    poly = sp.Poly(normalize(poly), lam)
    if poly.degree() <= 0:
        return []
    roots = sp.roots(poly)
    if sum(roots.values()) == poly.degree():
        return list(roots)
    return list(sp.solve(poly.as_expr(), lam))


def _common_eigenvectors(maps: list[sp.Matrix], W: sp.Matrix, conditions) -> sp.Matrix | None:
    """A nonzero vector in the column span of ``W`` that every map sends to
    a multiple of itself, or ``None``."""
    lam = sp.Dummy("lam")
    branches = [W]
    for A in maps:
        nxt = []
        for B in branches:
            if B.cols == 0:
                continue
            K = (A * B).applyfunc(normalize)
            pencil = (K - lam * B).applyfunc(normalize)
            s = B.cols
            minors = []
            for rows in itertools.combinations(range(pencil.rows), s):
                d = normalize(pencil.extract(list(rows), list(range(s))).det(method="berkowitz"))
                if d != 0:
                    minors.append(d)
            if not minors:
                # the pencil is singular for every lambda; any value works
                roots = [sp.Integer(0)]
            else:
                g = minors[0]
                for d in minors[1:]:
                    g = sp.gcd(g, d)
                roots = _lambda_roots(g, lam)
            for r in roots:
                M = pencil.xreplace({lam: r}).applyfunc(normalize)
                rows = [list(M.row(i)) for i in range(M.rows)]
                ns = linalg.nullspace(rows, s, conditions)
                if ns:
                    nxt.append((B * sp.Matrix(ns).T).applyfunc(normalize))
        branches = nxt
        if not branches:
            return None
    for B in branches:
        if B.cols:
            return B[:, 0]
    return None


def _is_maximal(alg: LieAlgebra, pvecs, conditions) -> tuple[bool, AlgebraElement | None]:
    comp = _complement(alg, pvecs, conditions)
    if not comp:
        return True, None
    M = sp.Matrix([list(v) for v in pvecs] + comp).T
    Minv = M.inv(method="LU").applyfunc(normalize)
    r = len(pvecs)

    def quotient(vec):
        return (Minv * sp.Matrix(vec))[r:, 0].applyfunc(normalize)

    lift = sp.Matrix(comp).T
    maps = []
    for pv in pvecs:
        P = AlgebraElement.from_vector(alg, pv)
        cols = []
        for k in range(len(comp)):
            Y = AlgebraElement.from_vector(alg, list(lift[:, k]))
            cols.append(list(quotient(alg.bracket(P, Y).vector())))
        maps.append(sp.Matrix(cols).T)
    theta_row = [[sp.sympify(alg.theta.get(b, 0)) for b in alg.basis]]
    H = linalg.nullspace(theta_row, alg.dim, conditions)
    Wcols = linalg.span_basis([list(quotient(h)) for h in H], conditions)
    if not Wcols:
        return True, None
    W = sp.Matrix(Wcols).T
    vec = _common_eigenvectors(maps, W, conditions)
    if vec is None:
        return True, None
    return False, AlgebraElement.from_vector(alg, list((lift * vec).applyfunc(normalize)))


def validate_polarization(spec: GroupSpec | AbstractAlgebraSpec | LieAlgebra, P,
                          declare: Sequence[ParamAssumption] = ()) -> PolarizationVerdict:
    """Validate a first-order polarization.

    Flags: horizontal (``Theta`` vanishes on ``P``), subalgebra (closed
    under brackets), maximal (no horizontal element outside ``span P``
    extends it to a larger closed subspace; decided over constant complex
    coefficients), full (contains the characteristic subalgebra) and
    symplectic (``dim P - dim(P ^ G_C)`` equals half the rank of ``Sigma``).
    """
    alg = algebra_of(spec)
    elems = _as_elements(alg, P, declare)
    conditions: list[Expr] = []
    witnesses: dict = {}
    pvecs = linalg.span_basis([e.vector() for e in elems], conditions)
    basis = [AlgebraElement.from_vector(alg, v) for v in pvecs]

    bad = [e for e in elems if alg.theta_of(e) != 0]
    horizontal = not bad
    if bad:
        witnesses["horizontal"] = f"Theta({bad[0].text()}) = {to_text(alg.theta_of(bad[0]))}"

    subalgebra = True
    for u, v in itertools.combinations(basis, 2):
        b = alg.bracket(u, v)
        if linalg.solve_in_span(pvecs, b.vector(), conditions) is None:
            subalgebra = False
            witnesses["subalgebra"] = f"[{u.text()}, {v.text()}] = {b.text()} is outside P"
            break

    isotropic = all(alg.sigma(u, v) == 0 for u, v in itertools.combinations(basis, 2))

    if horizontal and subalgebra:
        maximal, ext = _is_maximal(alg, pvecs, conditions)
        if ext is not None:
            witnesses["maximal"] = f"can be extended by {ext.text()}"
    else:
        maximal = False
        witnesses["maximal"] = "not a horizontal subalgebra"

    char = characteristic_subalgebra(spec if not isinstance(spec, LieAlgebra) else alg, False)
    cvecs = [c.vector() for c in char.basis]
    conditions.extend(c for c in char.conditions if c not in conditions)
    r_p = len(pvecs)
    r_union = linalg.rank(pvecs + cvecs, conditions) if cvecs else r_p
    full = r_union == r_p
    if not full:
        missing = [c.text() for c in char.basis if linalg.solve_in_span(pvecs, c.vector()) is None]
        witnesses["full"] = f"misses characteristic direction(s) {', '.join(missing)}"
    inter = r_p + len(cvecs) - r_union
    sigma_rank = _sigma_rank(spec, alg, conditions)
    symplectic = 2 * (r_p - inter) == sigma_rank
    if not symplectic:
        witnesses["symplectic"] = (f"dim P - dim(P ^ G_C) = {r_p - inter} but rank Sigma / 2 = "
                                   f"{sigma_rank // 2}")
    data = {"dim": r_p, "dim_char_intersection": inter, "sigma_rank": sigma_rank,
            "characteristic": [c.text() for c in char.basis]}
    return PolarizationVerdict(elems, horizontal, subalgebra, maximal, full, symplectic, isotropic,
                               conditions, witnesses, data)


def _sigma_rank(spec, alg: LieAlgebra, conditions) -> int:
    rows = [[alg.sigma(alg.unit(x), alg.unit(y)) for y in alg.basis] for x in alg.basis]
    return linalg.rank(rows, conditions)
