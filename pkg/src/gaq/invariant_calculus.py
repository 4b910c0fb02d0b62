"""Invariant vector fields, forms, the quantization 1-form and its normal form.

Everything lives on the extended chart: the coordinates of a
:class:`~gaq.group_model.GroupSpec` followed by the fibre angle ``phi``.
Vector fields store one coefficient per variable (the last one is the
vertical component along ``X0 = d/dphi``); forms store coefficients keyed by
increasing index tuples.

Sign conventions
----------------
``(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)`` and
``d a (X, Y) = X a(Y) - Y a(X) - a([X, Y])``. With these, the left coframe
obeys ``d theta^i = -1/2 C^i_jk theta^j ^ theta^k`` where
``[X_j, X_k] = C^i_jk X_i``.
"""

from __future__ import annotations

import cmath
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import sympy as sp

from .errors import SingularPointError, SpecError
from .group_model import AbstractAlgebraSpec, GroupSpec
from .linalg import nonzero_condition as _nonzero_condition
from .report import CheckRecord
from .symexpr import Expr, equal, equal_witness, get_seed, normalize, sym, to_text

CENTRAL = "X0"


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField:
    """First-order differential operator ``sum_k coeffs[k] d/d variables[k]``.

    ``tag`` is one of ``left``, ``right``, ``vertical`` or ``generic``;
    ``name`` is the generator the field belongs to (``X0`` for the vertical
    field).
    """

    variables: tuple[sp.Symbol, ...]
    coeffs: tuple[Expr, ...]
    tag: str = "generic"
    name: str = ""

    def __post_init__(self):
        if len(self.variables) != len(self.coeffs):
            raise ValueError("one coefficient per variable is required")

    def __call__(self, f) -> Expr:
        """Apply the field to a function as a derivation."""
        f = sp.sympify(f)
        return sp.Add(*(c * sp.diff(f, v) for v, c in zip(self.variables, self.coeffs) if c != 0))

    @property
    def vertical(self) -> Expr:
        return self.coeffs[-1]

    def component(self, name: str) -> Expr:
        for v, c in zip(self.variables, self.coeffs):
            if v.name == name:
                return c
        raise KeyError(name)

    def _like(self, coeffs, tag="generic", name="") -> "VectorField":
        return VectorField(self.variables, tuple(coeffs), tag, name)

    def __add__(self, other: "VectorField") -> "VectorField":
        return self._like(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self._like(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "VectorField":
        return self._like(-a for a in self.coeffs)

    def scale(self, s) -> "VectorField":
        s = sp.sympify(s)
        return self._like(s * a for a in self.coeffs)

    __rmul__ = scale

    def normalized(self) -> "VectorField":
        return VectorField(self.variables, tuple(normalize(c) for c in self.coeffs), self.tag, self.name)

    def is_zero(self) -> bool:
        return all(normalize(c) == 0 for c in self.coeffs)

    def text(self) -> str:
        """Readable ``coeff*d/dx + ...`` rendering."""
        parts = []
        for v, c in zip(self.variables, self.coeffs):
            c = normalize(c)
            if c != 0:
                parts.append(f"({to_text(c)})*d/d{v.name}")
        return " + ".join(parts) if parts else "0"


def vertical_field(variables: Sequence[sp.Symbol]) -> VectorField:
    """The fundamental field ``X0 = d/dphi`` (the fibre is the last variable)."""
    n = len(variables)
    return VectorField(tuple(variables), tuple(sp.Integer(int(k == n - 1)) for k in range(n)),
                       "vertical", CENTRAL)


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket ``[X, Y]^k = X(Y^k) - Y(X^k)``, normalized."""
    coeffs = tuple(normalize(X(b) - Y(a)) for a, b in zip(X.coeffs, Y.coeffs))
    return VectorField(X.variables, coeffs)


def by_name(fields: Iterable, name: str):
    """Look up a field (or form) by generator name."""
    for f in fields:
        if f.name == name:
            return f
    raise KeyError(name)


# ---------------------------------------------------------------------------
# differential forms
# ---------------------------------------------------------------------------


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx`` (0 if an index repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


@dataclass(frozen=True)
class Form:
    """Differential form of a fixed degree on the extended chart.

    ``coeffs[(i, j, ...)]`` with ``i < j < ...`` multiplies
    ``d variables[i] ^ d variables[j] ^ ...``. Degree 0 forms store their
    value under the empty tuple.
    """

    variables: tuple[sp.Symbol, ...]
    degree: int
    coeffs: Mapping[tuple[int, ...], Expr] = field(default_factory=dict)
    tag: str = "generic"
    name: str = ""

    @classmethod
    def from_dict(cls, variables, degree, coeffs, tag="generic", name="") -> "Form":
        clean = {}
        for k, v in coeffs.items():
            sign, key = _sort_sign(k)
            if sign == 0:
                continue
            clean[key] = clean.get(key, 0) + sign * sp.sympify(v)
        clean = {k: v for k, v in clean.items() if v != 0}
        return cls(tuple(variables), degree, clean, tag, name)

    @classmethod
    def one(cls, variables, coeffs: Sequence, tag="generic", name="") -> "Form":
        """1-form from a coefficient list aligned with ``variables``."""
        return cls.from_dict(variables, 1, {(k,): c for k, c in enumerate(coeffs)}, tag, name)

    def coefficient(self, *names: str) -> Expr:
        """Coefficient of ``d names[0] ^ d names[1] ^ ...``."""
        pos = {v.name: k for k, v in enumerate(self.variables)}
        sign, key = _sort_sign([pos[n] for n in names])
        return sign * sp.sympify(self.coeffs.get(key, 0))

    def vector(self) -> list[Expr]:
        """Coefficients of a 1-form as a list aligned with ``variables``."""
        if self.degree != 1:
            raise ValueError("only 1-forms have a coefficient vector")
        return [sp.sympify(self.coeffs.get((k,), 0)) for k in range(len(self.variables))]

    def _combine(self, other: "Form", s: int) -> "Form":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + s * v
        return Form.from_dict(self.variables, self.degree, out)

    def __add__(self, other: "Form") -> "Form":
        return self._combine(other, 1)

    def __sub__(self, other: "Form") -> "Form":
        return self._combine(other, -1)

    def __neg__(self) -> "Form":
        return self.scale(-1)

    def scale(self, s) -> "Form":
        s = sp.sympify(s)
        return Form.from_dict(self.variables, self.degree, {k: s * v for k, v in self.coeffs.items()})

    __rmul__ = scale

    def normalized(self) -> "Form":
        out = {k: normalize(v) for k, v in self.coeffs.items()}
        return Form(self.variables, self.degree, {k: v for k, v in out.items() if v != 0},
                    self.tag, self.name)

    def is_zero(self) -> bool:
        return all(normalize(v) == 0 for v in self.coeffs.values())

    def __call__(self, *fields: VectorField) -> Expr:
        """Evaluate on ``degree`` vector fields (determinant formula)."""
        if len(fields) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} fields")
        total = sp.Integer(0)
        for key, c in self.coeffs.items():
            if self.degree == 0:
                total += c
                continue
            m = sp.Matrix([[f.coeffs[i] for i in key] for f in fields])
            total += c * m.det(method="berkowitz")
        return total

    def text(self) -> str:
        parts = []
        for key in sorted(self.coeffs):
            c = normalize(self.coeffs[key])
            if c == 0:
                continue
            basis = "^".join(f"d{self.variables[i].name}" for i in key)
            parts.append(f"({to_text(c)})*{basis}" if basis else to_text(c))
        return " + ".join(parts) if parts else "0"


OneForm = Form
TwoForm = Form


def wedge(a: Form, b: Form) -> Form:
    out: dict[tuple[int, ...], Expr] = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            sign, key = _sort_sign(ka + kb)
            if sign:
                out[key] = out.get(key, 0) + sign * va * vb
    return Form.from_dict(a.variables, a.degree + b.degree, out)


def exterior_derivative(w: Form | Expr, variables: Sequence[sp.Symbol] | None = None) -> Form:
    """Exterior derivative; a bare expression is treated as a 0-form."""
    if not isinstance(w, Form):
        if variables is None:
            raise ValueError("variables are needed to differentiate a function")
        w = Form(tuple(variables), 0, {(): sp.sympify(w)})
    out: dict[tuple[int, ...], Expr] = {}
    for key, c in w.coeffs.items():
        for j, v in enumerate(w.variables):
            dc = sp.diff(c, v)
            if dc == 0:
                continue
            sign, k = _sort_sign((j,) + key)
            if sign:
                out[k] = out.get(k, 0) + sign * dc
    return Form.from_dict(w.variables, w.degree + 1, {k: normalize(v) for k, v in out.items()})


def interior_product(X: VectorField, w: Form) -> Expr | Form:
    """Contraction in the first slot; a 1-form yields an expression."""
    if w.degree == 0:
        raise ValueError("cannot contract a 0-form")
    out: dict[tuple[int, ...], Expr] = {}
    for key, c in w.coeffs.items():
        for r, i in enumerate(key):
            rest = key[:r] + key[r + 1:]
            out[rest] = out.get(rest, 0) + (-1) ** r * X.coeffs[i] * c
    if w.degree == 1:
        return normalize(out.get((), 0))
    return Form.from_dict(w.variables, w.degree - 1, {k: normalize(v) for k, v in out.items()})


def lie_derivative(X: VectorField, w: Form) -> Form:
    """Cartan formula ``L_X w = i_X dw + d(i_X w)``."""
    first = interior_product(X, exterior_derivative(w))
    if w.degree == 1:
        inner = interior_product(X, w)
        second = exterior_derivative(inner, w.variables)
        first = first if isinstance(first, Form) else Form(w.variables, 0, {(): first})
        return (first + second).normalized()
    second = exterior_derivative(interior_product(X, w))
    return (first + second).normalized()


# ---------------------------------------------------------------------------
# invariant fields and forms of a group spec
# ---------------------------------------------------------------------------


def _identity_map(spec: GroupSpec, slot: str) -> dict:
    return {s: v for s, v in zip(spec.symbols(slot), spec.identity)}


def _invariant_fields(spec: GroupSpec, side: str) -> list[VectorField]:
    variables = tuple(spec.all_symbols)
    # left fields differentiate in the second slot, right fields in the first
    diff_slot, live_slot = ("", "'") if side == "left" else ("'", "")
    at_e = _identity_map(spec, diff_slot)
    rename = {a: b for a, b in zip(spec.symbols(live_slot), spec.symbols())}
    xi = spec.cocycle_full()
    fields = []
    for i, s in enumerate(spec.symbols(diff_slot)):
        coeffs = []
        for e in list(spec.law) + [xi]:
            d = sp.diff(e, s).xreplace(at_e)
            if d.has(sp.zoo, sp.nan):
                raise SingularPointError(f"derivative of the law is singular at the identity ({spec.coords[i]})")
            coeffs.append(normalize(d.xreplace(rename)))
        fields.append(VectorField(variables, tuple(coeffs), side, spec.coords[i]))
    fields.append(vertical_field(variables))
    return fields


def left_fields(spec: GroupSpec) -> list[VectorField]:
    """Left-invariant fields, one per chart coordinate, followed by ``X0``.

    ``X^L_i`` has coefficient ``d law^j(g', g)/d g^i`` at ``g = e`` along
    ``g^j`` (with ``g'`` renamed to the live point) and ``d xi/d g^i`` at
    ``g = e`` along the fibre.
    """
    return _invariant_fields(spec, "left")


def right_fields(spec: GroupSpec) -> list[VectorField]:
    """Right-invariant fields: as :func:`left_fields` with the slots swapped."""
    return _invariant_fields(spec, "right")


def _field_matrix(fields: Sequence[VectorField]) -> sp.Matrix:
    return sp.Matrix([list(f.coeffs) for f in fields])


def dual_forms(spec: GroupSpec, side: str = "left") -> list[Form]:
    """Invariant coframe dual to :func:`left_fields` (or the right fields).

    The last entry is the fibre row: the unscaled quantization form.

    Raises
    ------
    SpecError
        If the field matrix is singular.
    """
    fields = left_fields(spec) if side == "left" else right_fields(spec)
    m = _field_matrix(fields)
    if normalize(m.det(method="berkowitz")) == 0:
        raise SpecError("invariant fields are linearly dependent; the chart is degenerate")
    inv = m.T.inv(method="LU")
    variables = tuple(spec.all_symbols)
    out = []
    for i, f in enumerate(fields):
        row = [normalize(inv[i, k]) for k in range(len(variables))]
        name = f.name if f.name != CENTRAL else spec.fibre.name
        out.append(Form.one(variables, row, side, name))
    return out


def quantization_form(spec: GroupSpec, check: bool = True, scaled: bool = True) -> Form:
    """The quantization 1-form.

    ``Theta = conv * (dphi + sum_i d xi(g', g)/d g^i |_{g' = g^-1} dg^i)``
    where ``conv`` is the spec's declared convention factor (dropped when
    ``scaled`` is false). With ``check`` the result is compared with the
    fibre row of :func:`dual_forms`.

    Raises
    ------
    SpecError
        When the two constructions disagree, which indicates a spec bug.
    """
    inv = {a: b for a, b in zip(spec.symbols("'"), spec.inverse)}
    xi = spec.cocycle_full()
    coeffs = [normalize(sp.diff(xi, s).xreplace(inv)) for s in spec.symbols()] + [sp.Integer(1)]
    variables = tuple(spec.all_symbols)
    theta = Form.one(variables, coeffs, "left", "Theta")
    if check:
        row = dual_forms(spec)[-1]
        for a, b, v in zip(theta.vector(), row.vector(), variables):
            w = equal_witness(a, b, spec.extended_context)
            if w is not None:
                raise SpecError(f"quantization form disagrees with the dual coframe along d{v.name}: {w}")
    if scaled:
        theta = theta.scale(spec.convention).normalized()
        theta = Form(theta.variables, 1, theta.coeffs, "left", "Theta")
    return theta


def noether_invariants(spec: GroupSpec) -> dict[str, Expr]:
    """``F_i = i_{X^R_i} Theta`` for every generator (``X0`` included)."""
    theta = quantization_form(spec, check=False)
    return {X.name: normalize(interior_product(X, theta)) for X in right_fields(spec)}


# ---------------------------------------------------------------------------
# Sigma at the identity and its normal form
# ---------------------------------------------------------------------------


def sigma_matrix(spec: GroupSpec | AbstractAlgebraSpec) -> tuple[tuple[str, ...], sp.Matrix, list[Expr]]:
    """``Sigma(X_i, X_j)`` on the non-central generators at the identity.

    Returns the generator names, the antisymmetric matrix and the values of
    the unscaled quantization form on the generators. For a group spec the
    matrix is computed from ``d Theta`` on the left fields; for an abstract
    algebra from ``Sigma(X, Y) = -Theta([X, Y])``.
    """
    if isinstance(spec, AbstractAlgebraSpec):
        names = spec.generators
        theta = [spec.theta(g) for g in names]
        n = len(names)
        m = sp.zeros(n, n)
        for a in range(n):
            for b in range(n):
                row = spec.bracket(names[a], names[b])
                m[a, b] = normalize(-sum(c * spec.theta(g) for g, c in row.items()))
        return names, m, theta
    fields = left_fields(spec)[:-1]
    theta_form = quantization_form(spec, check=False, scaled=False)
    sigma = exterior_derivative(theta_form)
    at_e = {s: v for s, v in zip(spec.symbols(), spec.identity)}
    n = len(fields)
    m = sp.zeros(n, n)
    for a in range(n):
        for b in range(a + 1, n):
            v = normalize(sigma(fields[a], fields[b]).xreplace(at_e))
            m[a, b], m[b, a] = v, -v
    theta = [normalize(interior_product(f, theta_form).xreplace(at_e)) for f in fields]
    return spec.coords, m, theta


@dataclass
class NormalForm:
    """Darboux data of ``Sigma`` at the identity.

    ``pairs`` holds ``(e, f, nu)`` with ``Sigma(e, f) = nu``; vectors are
    coefficient lists over ``names``. ``J`` is the matrix of the partial
    complex structure in the same basis (``J e = -f``, ``J f = e``,
    ``J k = 0`` for kernel vectors). ``conditions`` lists expressions
    assumed nonzero on the way (the generic case).
    """

    names: tuple[str, ...]
    sigma: sp.Matrix
    pairs: list[tuple[list[Expr], list[Expr], Expr]]
    kernel: list[list[Expr]]
    J: sp.Matrix
    conditions: list[Expr]

    @property
    def rank(self) -> int:
        return 2 * len(self.pairs)

    @property
    def nu(self) -> list[Expr]:
        return [p[2] for p in self.pairs]

    def J_terms(self) -> list[tuple[Expr, str, str]]:
        """``J`` as ``(coefficient, form index, field index)`` terms:
        ``sum coeff * theta^{form} (x) X_{field}``."""
        out = []
        for i, fld in enumerate(self.names):
            for j, frm in enumerate(self.names):
                c = normalize(self.J[i, j])
                if c != 0:
                    out.append((c, frm, fld))
        return out

    def J_text(self) -> str:
        parts = []
        for c, frm, fld in self.J_terms():
            parts.append(f"({to_text(c)})*theta^{frm} (x) X_{fld}")
        return " + ".join(parts) if parts else "0"


def _unit(n: int, k: int) -> list[Expr]:
    return [sp.Integer(int(i == k)) for i in range(n)]


def sigma_normal_form(spec: GroupSpec | AbstractAlgebraSpec) -> NormalForm:
    """Symplectic Gram-Schmidt of ``Sigma`` over the left generators."""
    names, m, _ = sigma_matrix(spec)
    n = len(names)

    def form(u, v):
        return normalize((sp.Matrix([u]) * m * sp.Matrix(v))[0, 0])

    pool = [_unit(n, k) for k in range(n)]
    pairs, conditions = [], []
    while True:
        found = None
        for a, u in enumerate(pool):
            for b in range(a + 1, len(pool)):
                nu = form(u, pool[b])
                if nu != 0:
                    found = (a, b, nu)
                    break
            if found:
                break
        if not found:
            break
        a, b, nu = found
        e, f = pool[a], pool[b]
        cond = _nonzero_condition(nu)
        if cond is not None:
            conditions.append(cond)
        pairs.append((e, f, nu))
        rest = []
        for k, v in enumerate(pool):
            if k in (a, b):
                continue
            se, sf = form(v, e), form(v, f)
            w = [normalize(vi - sf / nu * ei + se / nu * fi) for vi, ei, fi in zip(v, e, f)]
            rest.append(w)
        pool = rest
    kernel = [v for v in pool if any(x != 0 for x in v)]
    cols = [p[0] for p in pairs] + [p[1] for p in pairs] + kernel
    B = sp.Matrix(cols).T
    k = len(pairs)
    Jstd = sp.zeros(n, n)
    for a in range(k):
        Jstd[k + a, a] = -1  # J e_a = -f_a
        Jstd[a, k + a] = 1   # J f_a = e_a
    J = (B * Jstd * B.inv()).applyfunc(normalize)
    return NormalForm(tuple(names), m, pairs, kernel, J, conditions)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------


def haar_measure(spec: GroupSpec) -> Form:
    """Left Haar form ``theta^1 ^ ... ^ theta^n`` over the chart coordinates."""
    forms = dual_forms(spec)[:-1]
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out.normalized()


def polarized_measure(spec: GroupSpec, fields: Sequence[VectorField]) -> Form:
    """Contract the Haar form with each given field in turn.

    Raises
    ------
    ValueError
        If the contraction vanishes (degenerate polarization).
    """
    out = haar_measure(spec)
    for X in fields:
        out = interior_product(X, out)
        if not isinstance(out, Form):
            out = Form(tuple(spec.all_symbols), 0, {(): out})
        if out.is_zero():
            raise ValueError("polarized measure vanishes: the fields are degenerate")
    return out.normalized()


def same_measure(a: Form, b: Form) -> bool:
    """Equality of top forms up to orientation (overall sign)."""
    if a.degree != b.degree:
        return False
    return (a - b).is_zero() or (a + b).is_zero()


# ---------------------------------------------------------------------------
# numeric spot checks
# ---------------------------------------------------------------------------


def _lambdify(exprs, symbols):
    import numpy as np

    f = sp.lambdify(symbols, exprs, modules=[{"log": np.emath.log}, "numpy"])

    def call(*args):
        with np.errstate(all="ignore"):
            return np.array(f(*args), dtype=complex)

    return call


def left_invariance_check(spec: GroupSpec, translations: int = 50, points: int = 20,
                          tol: float = 1e-8, seed: int | None = None) -> CheckRecord:
    """Compare ``L_h^* Theta`` with ``Theta`` numerically.

    ``L_h`` maps ``(g, phi)`` to ``(h*g, phi_h + phi + xi(h, g))``; the
    pullback at ``g`` is ``Jac^T Theta(h*g)`` with the Jacobian taken in
    the second slot.
    """
    from .group_model import _PointSource

    theta = quantization_form(spec, check=False)
    params = [s for s in sp.Matrix(theta.vector()).free_symbols | set().union(
        *[sp.sympify(e).free_symbols for e in spec.law], sp.sympify(spec.cocycle_full()).free_symbols)
        if s.name in spec.params]
    params = sorted(set(params), key=lambda s: s.name)
    h, g = spec.symbols("'"), spec.symbols()
    phi = spec.fibre
    image = list(spec.law) + [phi + spec.cocycle_full()]
    jac = sp.Matrix(image).jacobian(g + [phi])
    f_img = _lambdify(image, h + g + [phi] + params)
    f_jac = _lambdify(jac, h + g + [phi] + params)
    f_theta = _lambdify(theta.vector(), g + [phi] + params)
    src = _PointSource(spec, seed)
    worst, witness = 0.0, None
    import numpy as np

    for _ in range(translations):
        pv = src.params()
        pvals = [pv.get(p.name, 1.0) for p in params]
        hv = src.element()
        for _ in range(points):
            gv = src.element()
            args = list(hv) + list(gv) + [0.3] + pvals
            img = f_img(*args)
            J = f_jac(*args)
            t_img = f_theta(*(list(img[:-1]) + [img[-1]] + pvals))
            t_here = f_theta(*(list(gv) + [0.3] + pvals))
            pulled = J.T @ t_img
            err = float(np.max(np.abs(pulled - t_here)))
            if not np.isfinite(err):
                continue
            if err > worst:
                worst, witness = err, {"h": hv, "g": gv}
    passed = worst <= tol
    return CheckRecord("left-invariance", passed, f"max deviation {worst:.3e}",
                       None if passed else witness, {"max_deviation": worst})
