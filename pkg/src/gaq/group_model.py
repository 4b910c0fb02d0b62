"""Centrally extended group specifications, axiom checks and the registry.

A :class:`GroupSpec` describes a Lie group ``G`` in one chart together with a
real 2-cocycle ``xi``. The extension ``G x U(1)`` carries the fibre angle
``phi`` (``zeta = exp(i*phi)``) and composes as::

    (g', phi') * (g, phi) = (g' * g, phi' + phi + xi(g', g))

Two-point expressions use primes for the slots: ``q'`` belongs to the left
factor, ``q`` to the right factor and ``q''`` to the product.
"""

from __future__ import annotations

import cmath
import math
import random
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import sympy as sp

from .errors import SingularPointError, SpecError, UnknownSpecError
from .report import CheckRecord, Report
from .symexpr import (
    Context,
    Expr,
    ParamAssumption,
    Sampler,
    equal_witness,
    eval_numeric,
    get_seed,
    normalize,
    parse,
    sym,
)

SLOTS = {"first": "'", "second": "", "product": "''"}
FIBRE = "phi"
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class GroupSpec:
    """Chart, composition law, inverse and cocycle of a centrally extended group.

    Attributes
    ----------
    law : tuple of Expr
        ``g''^i`` as functions of the primed (first) and plain (second) slots.
    inverse : tuple of Expr
        ``(g^{-1})^i`` over the plain chart.
    cocycle : Expr
        ``xi(g', g)``; may mention product-slot names (``q''``), which are
        replaced by the law when evaluated.
    convention : Expr
        Scalar multiplying the quantization 1-form (``hbar`` when the
        1-form is rescaled by ``hbar``).
    singular : tuple of Expr
        Expressions over the doubled chart that must not vanish.
    """

    name: str
    context: Context
    identity: tuple[Expr, ...]
    law: tuple[Expr, ...]
    inverse: tuple[Expr, ...]
    cocycle: Expr
    convention: Expr = sp.Integer(1)
    angles: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    singular: tuple[Expr, ...] = ()

    # -- chart helpers -----------------------------------------------------

    @property
    def coords(self) -> tuple[str, ...]:
        return self.context.coords

    @property
    def dim(self) -> int:
        return len(self.coords)

    def symbols(self, slot: str = "") -> list[sp.Symbol]:
        """Chart symbols for a slot suffix (``"'"``, ``""`` or ``"''"``)."""
        return [sym(c + slot) for c in self.coords]

    @property
    def fibre(self) -> sp.Symbol:
        return sym(FIBRE)

    @property
    def all_symbols(self) -> list[sp.Symbol]:
        """Chart symbols followed by the fibre angle."""
        return self.symbols() + [self.fibre]

    @property
    def extended_context(self) -> Context:
        return self.context.with_coords(FIBRE)

    @property
    def params(self) -> dict[str, sp.Symbol]:
        return {p.name: p.symbol for p in self.context.params}

    def pins(self) -> dict[sp.Symbol, Expr]:
        return self.context.pins()

    def with_pins(self, **values) -> "GroupSpec":
        """Copy with parameters pinned; pinned values are substituted everywhere."""
        ctx = self.context.with_pins(**values)
        pins = ctx.pins()

        def sub(e):
            return normalize(sp.sympify(e).xreplace(pins))

        return replace(
            self,
            context=ctx,
            identity=tuple(sub(e) for e in self.identity),
            law=tuple(sub(e) for e in self.law),
            inverse=tuple(sub(e) for e in self.inverse),
            cocycle=sp.sympify(self.cocycle).xreplace(pins),
            convention=sub(self.convention),
            singular=tuple(sub(e) for e in self.singular),
        )

    # -- evaluation --------------------------------------------------------

    def _slot_map(self, slot: str, values: Sequence) -> dict:
        return {s: sp.sympify(v) for s, v in zip(self.symbols(slot), values)}

    def law_at(self, g1: Sequence, g2: Sequence) -> list[Expr]:
        m = {**self._slot_map("'", g1), **self._slot_map("", g2)}
        return [e.xreplace(m) for e in self.law]

    def cocycle_full(self) -> Expr:
        """``xi(g', g)`` with product-slot names replaced by the law."""
        return sp.sympify(self.cocycle).xreplace(self._slot_map("''", self.law))

    def cocycle_at(self, g1: Sequence, g2: Sequence) -> Expr:
        m = {**self._slot_map("'", g1), **self._slot_map("", g2)}
        return self.cocycle_full().xreplace(m)

    def inverse_at(self, g: Sequence) -> list[Expr]:
        m = self._slot_map("", g)
        return [e.xreplace(m) for e in self.inverse]

    def rename(self, e: Expr, src: str, dst: str) -> Expr:
        """Rename chart symbols from one slot suffix to another."""
        m = {a: b for a, b in zip(self.symbols(src), self.symbols(dst))}
        return sp.sympify(e).xreplace(m)

    def numeric_env(self, params: Mapping[str, complex] | None = None) -> dict[str, complex]:
        env = {}
        for p in self.context.params:
            if p.pin is not None:
                env[p.name] = complex(p.pin)
        if params:
            env.update({k: complex(v) for k, v in params.items()})
        return env


@dataclass(frozen=True)
class AbstractAlgebraSpec:
    """Lie algebra given by a bracket table on named generators plus a central ``Z``.

    ``table[(x, y)]`` maps generator names to coefficients of ``[x, y]``;
    it is stored antisymmetrically. ``theta_e`` is the value of the
    quantization form on each basis element at the identity.
    """

    name: str
    generators: tuple[str, ...]
    table: Mapping[tuple[str, str], Mapping[str, Expr]]
    context: Context
    central: str = "Z"
    theta_e: Mapping[str, Expr] = field(default_factory=dict)
    convention: Expr = sp.Integer(1)

    @property
    def basis(self) -> tuple[str, ...]:
        return self.generators + (self.central,)

    def bracket(self, x: str, y: str) -> dict[str, Expr]:
        return dict(self.table.get((x, y), {}))

    def theta(self, x: str) -> Expr:
        return sp.sympify(self.theta_e.get(x, 0))

    def pins(self) -> dict[sp.Symbol, Expr]:
        return self.context.pins()

    def with_pins(self, **values) -> "AbstractAlgebraSpec":
        ctx = self.context.with_pins(**values)
        pins = ctx.pins()
        table = {}
        for key, row in self.table.items():
            row = {g: normalize(sp.sympify(c).xreplace(pins)) for g, c in row.items()}
            table[key] = {g: c for g, c in row.items() if c != 0}
        theta = {g: normalize(sp.sympify(c).xreplace(pins)) for g, c in self.theta_e.items()}
        return replace(self, context=ctx, table=table, theta_e=theta)

    @property
    def params(self) -> dict[str, sp.Symbol]:
        return {p.name: p.symbol for p in self.context.params}


def make_table(entries: Mapping[tuple[str, str], Mapping[str, Expr]]) -> dict:
    """Antisymmetrize a partial bracket table, dropping zero coefficients."""
    table: dict[tuple[str, str], dict[str, Expr]] = {}
    for (x, y), row in entries.items():
        row = {g: normalize(c) for g, c in row.items()}
        row = {g: c for g, c in row.items() if c != 0}
        if x == y:
            if row:
                raise SpecError(f"[{x}, {x}] must vanish")
            continue
        if (y, x) in table and table[(y, x)] != {g: -c for g, c in row.items()}:
            raise SpecError(f"[{x}, {y}] and [{y}, {x}] disagree")
        table[(x, y)] = row
        table[(y, x)] = {g: -c for g, c in row.items()}
    return table


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


def compose(spec: GroupSpec, g1: Sequence, g2: Sequence) -> list[Expr]:
    """Compose two points of the extended group.

    Points are sequences of chart values followed by the fibre angle.

    Raises
    ------
    ValueError
        On a dimension mismatch.
    SingularPointError
        If the product leaves the chart.
    """
    n = spec.dim
    if len(g1) != n + 1 or len(g2) != n + 1:
        raise ValueError(f"points must have {n + 1} entries (chart plus fibre)")
    a = [sp.sympify(v) for v in g1[:n]]
    b = [sp.sympify(v) for v in g2[:n]]
    m = {**spec._slot_map("'", a), **spec._slot_map("", b)}
    for s in spec.singular:
        if normalize(s.xreplace(m)) == 0:
            raise SingularPointError(f"product leaves the chart: {s} vanishes")
    coords = [normalize(e) for e in spec.law_at(a, b)]
    if any(e.has(sp.zoo, sp.nan) for e in coords):
        raise SingularPointError("product leaves the chart")
    phi = normalize(sp.sympify(g1[n]) + sp.sympify(g2[n]) + spec.cocycle_at(a, b))
    return coords + [phi]


def compose_numeric(spec: GroupSpec, g1: Sequence[complex], g2: Sequence[complex],
                    params: Mapping[str, complex]) -> list[complex]:
    """Numeric version of :func:`compose` for chart points (no fibre entry)."""
    env = dict(params)
    env.update({c + "'": v for c, v in zip(spec.coords, g1)})
    env.update({c: v for c, v in zip(spec.coords, g2)})
    for s in spec.singular:
        if abs(eval_numeric(s, env)) < 1e-9:
            raise SingularPointError("product leaves the chart")
    return [eval_numeric(e, env) for e in spec.law]


def cocycle_numeric(spec: GroupSpec, g1, g2, params) -> complex:
    env = dict(params)
    env.update({c + "'": v for c, v in zip(spec.coords, g1)})
    env.update({c: v for c, v in zip(spec.coords, g2)})
    prod = compose_numeric(spec, g1, g2, params)
    env.update({c + "''": v for c, v in zip(spec.coords, prod)})
    return eval_numeric(spec.cocycle, env)


def inverse_numeric(spec: GroupSpec, g, params) -> list[complex]:
    env = dict(params)
    env.update({c: v for c, v in zip(spec.coords, g)})
    return [eval_numeric(e, env) for e in spec.inverse]


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _point_symbols(spec: GroupSpec, tag: str) -> list[sp.Symbol]:
    return [sym(f"{c}_{tag}") for c in spec.coords]


def _differences(spec: GroupSpec, lhs: Sequence, rhs: Sequence) -> list[tuple[Expr, Expr]]:
    """Component pairs to compare.

    Random points stay in a small box around the identity where no branch
    cut is crossed, so angles can be compared directly here; the numeric
    trials compare them modulo 2*pi.
    """
    return list(zip(lhs, rhs))


def _close(spec: GroupSpec, lhs: Sequence[complex], rhs: Sequence[complex], tol=ANGLE_TOL) -> bool:
    for c, a, b in zip(spec.coords, lhs, rhs):
        if c in spec.angles:
            a, b = cmath.exp(1j * a), cmath.exp(1j * b)
        if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
            return False
    return True


def _angle_close(a: complex, b: complex, tol=ANGLE_TOL) -> bool:
    return abs(cmath.exp(1j * a) - cmath.exp(1j * b)) <= tol * max(1.0, abs(a), abs(b))


class _PointSource:
    """Random group elements and parameter values for numeric trials."""

    def __init__(self, spec: GroupSpec, seed: int | None = None, box=Fraction(2, 5)):
        self.spec = spec
        self.rng = random.Random(get_seed() if seed is None else seed)
        self.sampler = Sampler(spec.context, self.rng, box)

    def params(self) -> dict[str, complex]:
        out = {}
        for p in self.spec.context.params:
            out[p.name] = complex(self.sampler.parameter(p))
        return out

    def element(self) -> list[complex]:
        return [float(self.sampler.coordinate()) for _ in self.spec.coords]


def _symbolic_check(spec: GroupSpec, pairs, singular=()) -> dict | None:
    for a, b in pairs:
        w = equal_witness(a, b, spec.context, singular=singular)
        if w is not None:
            return w
    return None


def _singular_for(spec: GroupSpec, first: Sequence, second: Sequence) -> list[Expr]:
    m = {**spec._slot_map("'", first), **spec._slot_map("", second)}
    return [s.xreplace(m) for s in spec.singular]


def verify_group_axioms(spec: GroupSpec, trials: int = 100, seed: int | None = None) -> Report:
    """Check identity, associativity and inverse laws (chart and fibre).

    Each axiom is tested symbolically via :func:`~gaq.symexpr.equal` and at
    ``trials`` random points; a failing record carries a witness.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    report = Report()
    e = list(spec.identity)
    g = spec.symbols()
    g1, g2, g3 = (_point_symbols(spec, t) for t in ("1", "2", "3"))
    src = _PointSource(spec, seed)

    def record(name, pairs, numeric, singular=()):
        sym_w = _symbolic_check(spec, pairs, singular)
        num_w = None
        for _ in range(trials):
            try:
                ok, wit = numeric()
            except SingularPointError:
                continue
            if not ok:
                num_w = wit
                break
        passed = sym_w is None and num_w is None
        witness = None if passed else {"symbolic": sym_w, "numeric": num_w}
        report.add(CheckRecord(name, passed, "" if passed else "axiom violated", witness))

    def num_identity():
        p, a = src.params(), src.element()
        r1 = compose_numeric(spec, a, [complex(eval_numeric(v, p)) for v in e], p)
        r2 = compose_numeric(spec, [complex(eval_numeric(v, p)) for v in e], a, p)
        ok = _close(spec, r1, a) and _close(spec, r2, a)
        return ok, {"g": a, "params": p}

    record("identity", _differences(spec, spec.law_at(g, e), g)
           + _differences(spec, spec.law_at(e, g), g), num_identity)

    def num_assoc():
        p = src.params()
        a, b, c = src.element(), src.element(), src.element()
        lhs = compose_numeric(spec, compose_numeric(spec, a, b, p), c, p)
        rhs = compose_numeric(spec, a, compose_numeric(spec, b, c, p), p)
        return _close(spec, lhs, rhs), {"g1": a, "g2": b, "g3": c, "params": p}

    g12 = spec.law_at(g1, g2)
    g23 = spec.law_at(g2, g3)
    assoc_pairs = _differences(spec, spec.law_at(g12, g3), spec.law_at(g1, g23))
    record("associativity", assoc_pairs, num_assoc,
           _singular_for(spec, g1, g2) + _singular_for(spec, g2, g3)
           + _singular_for(spec, g12, g3) + _singular_for(spec, g1, g23))

    def num_inverse():
        p, a = src.params(), src.element()
        inv = inverse_numeric(spec, a, p)
        ident = [complex(eval_numeric(v, p)) for v in e]
        ok = _close(spec, compose_numeric(spec, a, inv, p), ident) and \
            _close(spec, compose_numeric(spec, inv, a, p), ident)
        return ok, {"g": a, "params": p}

    inv = spec.inverse_at(g)
    record("inverse", _differences(spec, spec.law_at(g, inv), e)
           + _differences(spec, spec.law_at(inv, g), e), num_inverse)

    def num_fibre_assoc():
        p = src.params()
        a, b, c = src.element(), src.element(), src.element()
        ab = compose_numeric(spec, a, b, p)
        bc = compose_numeric(spec, b, c, p)
        lhs = cocycle_numeric(spec, a, b, p) + cocycle_numeric(spec, ab, c, p)
        rhs = cocycle_numeric(spec, a, bc, p) + cocycle_numeric(spec, b, c, p)
        return _angle_close(lhs, rhs), {"g1": a, "g2": b, "g3": c, "params": p}

    lhs = spec.cocycle_at(g1, g2) + spec.cocycle_at(g12, g3)
    rhs = spec.cocycle_at(g1, g23) + spec.cocycle_at(g2, g3)
    record("fibre-associativity", [(lhs, rhs)], num_fibre_assoc,
           _singular_for(spec, g1, g2) + _singular_for(spec, g2, g3))

    def num_fibre_identity():
        p, a = src.params(), src.element()
        ident = [complex(eval_numeric(v, p)) for v in e]
        ok = _angle_close(cocycle_numeric(spec, a, ident, p), 0) and \
            _angle_close(cocycle_numeric(spec, ident, a, p), 0)
        return ok, {"g": a, "params": p}

    record("fibre-identity", [(spec.cocycle_at(g, e), 0), (spec.cocycle_at(e, g), 0)],
           num_fibre_identity)
    return report


def verify_cocycle(spec: GroupSpec, trials: int = 100, seed: int | None = None) -> Report:
    """Check the 2-cocycle identity, ``xi(e, e) = 0`` and single-valuedness.

    For every angular chart coordinate and every slot it appears in, the
    angle is shifted by ``2*pi`` and ``exp(i*xi)`` must not change. When the
    shift depends on an unpinned parameter, the check reports the
    condition under which it holds and tests it against the declared domain.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    report = Report()
    e = list(spec.identity)
    src = _PointSource(spec, seed)

    xi_ee = normalize(spec.cocycle_at(e, e))
    report.add(CheckRecord("cocycle-normalization", xi_ee == 0,
                           "" if xi_ee == 0 else f"xi(e, e) = {xi_ee}", data={"xi(e,e)": xi_ee}))

    g1, g2, g3 = (_point_symbols(spec, t) for t in ("1", "2", "3"))
    g12, g23 = spec.law_at(g1, g2), spec.law_at(g2, g3)
    lhs = spec.cocycle_at(g1, g2) + spec.cocycle_at(g12, g3)
    rhs = spec.cocycle_at(g1, g23) + spec.cocycle_at(g2, g3)
    sym_w = equal_witness(lhs, rhs, spec.context,
                          singular=_singular_for(spec, g1, g2) + _singular_for(spec, g2, g3))
    num_w = None
    for _ in range(trials):
        p = src.params()
        a, b, c = src.element(), src.element(), src.element()
        try:
            ab, bc = compose_numeric(spec, a, b, p), compose_numeric(spec, b, c, p)
            l = cocycle_numeric(spec, a, b, p) + cocycle_numeric(spec, ab, c, p)
            r = cocycle_numeric(spec, a, bc, p) + cocycle_numeric(spec, b, c, p)
        except SingularPointError:
            continue
        if not _angle_close(l, r):
            num_w = {"g1": a, "g2": b, "g3": c, "params": p, "defect": l - r}
            break
    ok = sym_w is None and num_w is None
    report.add(CheckRecord("cocycle-additivity", ok, "" if ok else "2-cocycle identity fails",
                           None if ok else {"symbolic": sym_w, "numeric": num_w}))

    for angle in spec.angles:
        for slot in ("'", "", "''"):
            s = sym(angle + slot)
            if s not in sp.sympify(spec.cocycle).free_symbols:
                continue
            report.add(_single_valued(spec, s, src, trials))
    return report


def _single_valued(spec: GroupSpec, s: sp.Symbol, src: _PointSource, trials: int) -> CheckRecord:
    xi = sp.sympify(spec.cocycle).xreplace(spec.pins())
    delta = normalize(xi.xreplace({s: s + 2 * sp.pi}) - xi)
    name = f"single-valuedness[{s.name}]"
    ratio = normalize(delta / (2 * sp.pi))
    data = {"shift": delta}
    coord_syms = {x for x in ratio.free_symbols if x.name not in spec.context.param_names}
    if not coord_syms:
        if ratio.is_number:
            ok = bool(ratio.is_integer)
            return CheckRecord(name, ok, "" if ok else f"exp(i*xi) changes by exp({to_text_safe(delta)}*i)",
                               None if ok else {"shift/(2*pi)": ratio}, data)
        # parametric shift: decide from the declared parameter domains
        subs, cond = {}, []
        for p in spec.context.params:
            if p.symbol in ratio.free_symbols:
                n = sp.Symbol(f"n_{p.name}", integer=True)
                if p.domain == "integer-constrained":
                    subs[p.symbol] = n / p.multiplier
                cond.append(p)
        reduced = normalize(ratio.xreplace(subs))
        ok = bool(reduced.is_integer)
        data["condition"] = f"{to_text_safe(ratio)} must be an integer"
        return CheckRecord(name, ok, data["condition"], None if ok else {"shift/(2*pi)": ratio}, data)
    # coordinate-dependent shift: sample
    env_pts = []
    for _ in range(trials):
        p = src.params()
        env = dict(p)
        for slot in ("'", "", "''"):
            env.update({c + slot: v for c, v in zip(spec.coords, src.element())})
        try:
            d = eval_numeric(delta, env)
        except SingularPointError:
            continue
        if not _angle_close(d, 0):
            return CheckRecord(name, False, "exp(i*xi) is not single valued", {"point": env}, data)
        env_pts.append(env)
    return CheckRecord(name, True, "", None, data)


def to_text_safe(e) -> str:
    from .symexpr import to_text

    try:
        return to_text(e)
    except TypeError:
        return str(e)


# ---------------------------------------------------------------------------
# spec files
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"^\[([a-z][a-z-]*)\]\s*$")
_BRACKET = re.compile(r"^\[\s*(\w+)\s*,\s*(\w+)\s*\]\s*=\s*(.+)$")


def _sections(text: str, source: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            current = m.group(1)
            if current in sections:
                raise SpecError(f"{source}:{lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise SpecError(f"{source}:{lineno}: content before the first section")
        sections[current].append((lineno, line))
    return sections


def _kv(line: str, lineno: int, source: str) -> tuple[str, str]:
    if "=" not in line:
        raise SpecError(f"{source}:{lineno}: expected 'name = value'")
    k, v = line.split("=", 1)
    return k.strip(), v.strip()


def _parse_params(entries, source) -> tuple[ParamAssumption, ...]:
    params = []
    for lineno, line in entries:
        pin = None
        if "=" in line:
            line, pin_text = line.split("=", 1)
            pin = sp.nsimplify(pin_text.strip(), rational=True)
        parts = line.split()
        if not parts:
            raise SpecError(f"{source}:{lineno}: empty parameter declaration")
        name, domain = parts[0], parts[1] if len(parts) > 1 else "real"
        mult = int(parts[2]) if len(parts) > 2 else 1
        try:
            params.append(ParamAssumption(name, domain, mult, pin))
        except ValueError as exc:
            raise SpecError(f"{source}:{lineno}: {exc}") from None
    return tuple(params)


def _expr(text: str, ctx: Context, lineno: int, source: str) -> Expr:
    from .errors import GaqError

    try:
        return parse(text, ctx)
    except GaqError as exc:
        raise SpecError(f"{source}:{lineno}: {exc}") from None


def parse_spec_text(text: str, source: str = "<string>") -> GroupSpec | AbstractAlgebraSpec:
    """Parse a sectioned spec file (see the README for the format)."""
    sec = _sections(text, source)
    meta = dict(_kv(line, n, source) for n, line in sec.get("meta", []))
    name = meta.get("name", Path(source).stem)
    params = _parse_params(sec.get("parameters", []), source)
    if meta.get("kind", "group") == "algebra":
        return _parse_algebra(sec, meta, name, params, source)

    chart, angles = [], []
    for lineno, line in sec.get("chart", []):
        parts = line.split()
        chart.append(parts[0])
        if len(parts) > 1:
            if parts[1] != "angle":
                raise SpecError(f"{source}:{lineno}: unknown coordinate flag {parts[1]!r}")
            angles.append(parts[0])
    if not chart:
        raise SpecError(f"{source}: empty [chart]")
    if FIBRE in chart:
        raise SpecError(f"{source}: '{FIBRE}' is reserved for the fibre angle")
    ctx = Context(tuple(chart), params)

    def per_coord(section: str, lhs_suffix: str) -> tuple[Expr, ...]:
        found = {}
        for lineno, line in sec.get(section, []):
            k, v = _kv(line, lineno, source)
            base = k[: len(k) - len(lhs_suffix)] if lhs_suffix else k
            if not k.endswith(lhs_suffix) or base not in chart or base.endswith("'"):
                raise SpecError(f"{source}:{lineno}: unexpected left-hand side {k!r} in [{section}]")
            found[base] = _expr(v, ctx, lineno, source)
        missing = [c for c in chart if c not in found]
        if missing:
            raise SpecError(f"{source}: [{section}] lacks {missing}")
        return tuple(found[c] for c in chart)

    identity = per_coord("identity", "")
    law = per_coord("law", "''")
    inverse = per_coord("inverse", "")
    coc_lines = sec.get("cocycle", [])
    if not coc_lines:
        raise SpecError(f"{source}: missing [cocycle]")
    cocycle = _expr(" ".join(l for _, l in coc_lines), ctx, coc_lines[0][0], source)
    singular = tuple(_expr(line, ctx, n, source) for n, line in sec.get("singular", []))
    pairs = []
    for lineno, line in sec.get("pairs", []):
        parts = line.split()
        if len(parts) != 2 or any(p not in chart for p in parts):
            raise SpecError(f"{source}:{lineno}: a pair names two chart coordinates")
        pairs.append((parts[0], parts[1]))
    convention = _expr(meta.get("convention", "1"), ctx, 0, source)
    for nm, e in zip(chart, identity):
        if e.free_symbols - set(p.symbol for p in params):
            raise SpecError(f"{source}: identity value of {nm} must be constant")
    spec = GroupSpec(name, ctx, identity, law, inverse, cocycle, convention,
                     tuple(angles), tuple(pairs), singular)
    pins = {p.name: p.pin for p in params if p.pin is not None}
    return spec.with_pins(**pins) if pins else spec


def _parse_algebra(sec, meta, name, params, source) -> AbstractAlgebraSpec:
    gens = [line.split()[0] for _, line in sec.get("generators", [])]
    central = meta.get("central", "Z")
    if not gens:
        raise SpecError(f"{source}: empty [generators]")
    ctx = Context(tuple(gens) + (central,), params)
    basis_syms = [ctx.symbol(g) for g in gens + [central]]
    entries = {}
    for lineno, line in sec.get("brackets", []):
        m = _BRACKET.match(line)
        if not m:
            raise SpecError(f"{source}:{lineno}: expected '[x, y] = expression'")
        x, y, rhs = m.groups()
        for g in (x, y):
            if g not in gens and g != central:
                raise SpecError(f"{source}:{lineno}: unknown generator {g!r}")
        entries[(x, y)] = linear_coefficients(_expr(rhs, ctx, lineno, source), basis_syms,
                                              f"{source}:{lineno}")
    theta = {}
    for lineno, line in sec.get("theta", []):
        k, v = _kv(line, lineno, source)
        theta[k] = _expr(v, Context((), params), lineno, source)
    if not theta:
        theta = {central: sp.Integer(1)}
    convention = _expr(meta.get("convention", "1"), Context((), params), 0, source)
    alg = AbstractAlgebraSpec(name, tuple(gens), make_table(entries), ctx, central, theta, convention)
    pins = {p.name: p.pin for p in params if p.pin is not None}
    return alg.with_pins(**pins) if pins else alg


def linear_coefficients(e: Expr, basis: Sequence[sp.Symbol], where: str = "") -> dict[str, Expr]:
    """Coefficients of an expression that is linear and homogeneous in ``basis``."""
    e = sp.expand(e)
    out = {}
    rest = e
    for b in basis:
        c = normalize(e.coeff(b))
        if any(c.has(o) for o in basis):
            raise SpecError(f"{where}: expression is not linear in the generators")
        if c != 0:
            out[b.name] = c
        rest = rest - c * b
    if normalize(rest) != 0:
        raise SpecError(f"{where}: expression is not a linear combination of generators")
    return out


def load_spec(path_or_name: str, **kwargs) -> GroupSpec | AbstractAlgebraSpec:
    """Load a spec from a file path or, failing that, from the registry."""
    p = Path(path_or_name)
    if p.suffix == ".gaq" or p.exists():
        if not p.exists():
            raise SpecError(f"no such spec file: {path_or_name}")
        return parse_spec_text(p.read_text(), str(p))
    return registry_get(path_or_name, **kwargs)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

REGISTRY = ("heisenberg-weyl", "su2", "harmonic-oscillator", "schrodinger-algebra")


def _registry_text(name: str) -> str:
    return resources.files("gaq").joinpath("specs").joinpath(f"{name}.gaq").read_text()


def heisenberg_weyl_text(n: int = 1, r: int = 1) -> str:
    """Spec text for the Heisenberg-Weyl group in ``n`` degrees of freedom
    times an abelian ``R^r`` (the cocycle's kernel directions)."""
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")

    def names(base, k):
        return [base] if k == 1 else [f"{base}{i}" for i in range(1, k + 1)]

    qs, ps, as_ = names("q", n), names("p", n), (names("a", r) if r else [])
    chart = qs + ps + as_
    lines = ["[meta]", f"name = heisenberg-weyl", "convention = hbar", "", "[chart]", *chart,
             "", "[identity]", *(f"{c} = 0" for c in chart), "", "[parameters]", "hbar positive",
             "", "[law]", *(f"{c}'' = {c}' + {c}" for c in chart),
             "", "[inverse]", *(f"{c} = -{c}" for c in chart), "", "[cocycle]",
             "(" + " + ".join(f"{p}'*{q} - {q}'*{p}" for q, p in zip(qs, ps)) + ")/(2*hbar)", ""]
    return "\n".join(lines)


def registry_get(name: str, **kwargs) -> GroupSpec | AbstractAlgebraSpec:
    """Built-in specs by name.

    ``heisenberg-weyl`` accepts ``n`` (degrees of freedom, default 1) and
    ``r`` (extra abelian kernel directions, default 1).

    Raises
    ------
    UnknownSpecError
        For names outside the registry.
    """
    if name not in REGISTRY:
        raise UnknownSpecError(f"unknown spec {name!r}; known: {', '.join(REGISTRY)}")
    if name == "heisenberg-weyl":
        n, r = kwargs.pop("n", 1), kwargs.pop("r", 1)
        if (n, r) != (1, 1):
            if kwargs:
                raise TypeError(f"unexpected arguments {sorted(kwargs)}")
            return parse_spec_text(heisenberg_weyl_text(n, r), f"heisenberg-weyl(n={n},r={r})")
    if kwargs:
        raise TypeError(f"unexpected arguments {sorted(kwargs)}")
    return parse_spec_text(_registry_text(name), f"{name}.gaq")
