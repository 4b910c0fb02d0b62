"""Enveloping-algebra operators, higher-order polarizations and anomaly scans.

Two representations of an operator coexist:

* :class:`PBWElement` -- a noncommutative polynomial in the basis of a
  :class:`~gaq.lie_structure.LieAlgebra`, kept in Poincare-Birkhoff-Witt
  order (basis order, central generator last);
* :class:`DiffOperator` -- a differential operator on the extended chart,
  a finite sum of ``coefficient * d^alpha``.

On equivariant wave functions the central generator acts as multiplication
by ``i`` (``X0 zeta = i zeta``). Ideal computations substitute that value
before reducing, so obstructions show up as leftover scalars.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import sympy as sp
from sympy import QQ_I

from .errors import DegreeBoundExceeded, GaqError, NonPolynomialObstruction, SpecError
from .group_model import AbstractAlgebraSpec, GroupSpec
from .invariant_calculus import VectorField, left_fields
from .lie_structure import AlgebraElement, LieAlgebra, algebra_of, validate_polarization
from .linalg import nonzero_condition
from .report import CheckRecord
from .symexpr import Context, Expr, ParamAssumption, normalize, parse, to_text

#: highest operator degree accepted in a higher-order polarization
MAX_DEGREE = 2
#: value of the central generator on equivariant functions
CENTRAL_VALUE = sp.I

Word = tuple[int, ...]


# ---------------------------------------------------------------------------
# PBW algebra
# ---------------------------------------------------------------------------


class _OperatorContext(Context):
    """Context whose generator names parse as noncommutative symbols."""

    def symbol(self, name: str) -> sp.Symbol:
        if name in self.coords:
            return sp.Symbol(name, commutative=False)
        return super().symbol(name)


class PBW:
    """Universal enveloping algebra of a :class:`LieAlgebra` in PBW form."""

    def __init__(self, alg: LieAlgebra | GroupSpec | AbstractAlgebraSpec):
        self.alg = algebra_of(alg)
        self.names = self.alg.basis
        self.index = {n: i for i, n in enumerate(self.names)}
        self.central = self.index[self.alg.central]
        self._bracket: dict[tuple[int, int], dict[int, Expr]] = {}
        for (x, y), row in self.alg.table.items():
            self._bracket[(self.index[x], self.index[y])] = {self.index[z]: sp.sympify(c)
                                                            for z, c in row.items()}
        self._cache: dict[Word, dict[Word, Expr]] = {}

    # -- construction -------------------------------------------------------

    def element(self, terms: Mapping[Word, Expr]) -> "PBWElement":
        out: dict[Word, Expr] = {}
        for w, c in terms.items():
            for w2, c2 in self.order(tuple(w)).items():
                out[w2] = out.get(w2, 0) + c * c2
        return PBWElement(self, _clean(out))

    def gen(self, name: str) -> "PBWElement":
        return PBWElement(self, {(self.index[name],): sp.Integer(1)})

    def scalar(self, c) -> "PBWElement":
        c = sp.sympify(c)
        return PBWElement(self, {(): c} if c != 0 else {})

    def from_algebra(self, u: AlgebraElement) -> "PBWElement":
        return self.element({(self.index[n],): c for n, c in u.coeffs.items()})

    def parse(self, text: str, declare: Sequence[ParamAssumption] = ()) -> "PBWElement":
        """Parse operator text such as ``"t - (i/(2*m))*x^2"``; products keep
        their written order."""
        ctx = _OperatorContext(self.names, tuple(self.alg.context.params) + tuple(declare))
        e = sp.expand(parse(text, ctx))
        terms: dict[Word, Expr] = {}
        for t in sp.Add.make_args(e):
            c, nc = t.args_cnc()
            word: list[int] = []
            for f in nc:
                base, exp = (f.base, f.exp) if isinstance(f, sp.Pow) else (f, 1)
                if not isinstance(base, sp.Symbol) or base.name not in self.index:
                    raise SpecError(f"cannot read {f} as a generator power")
                if not (sp.sympify(exp).is_Integer and exp >= 0):
                    raise SpecError(f"generator powers must be non-negative integers: {f}")
                word.extend([self.index[base.name]] * int(exp))
            coeff = sp.Mul(*c)
            if coeff.free_symbols & {sp.Symbol(n, commutative=False) for n in self.names}:
                raise SpecError("malformed operator text")
            terms[tuple(word)] = terms.get(tuple(word), 0) + coeff
        return self.element(terms)

    # -- ordering -----------------------------------------------------------

    def order(self, word: Word) -> dict[Word, Expr]:
        """PBW normal form of a word, memoized."""
        if word in self._cache:
            return self._cache[word]
        for k in range(len(word) - 1):
            x, y = word[k], word[k + 1]
            if x > y:
                out: dict[Word, Expr] = {}
                swapped = word[:k] + (y, x) + word[k + 2:]
                for w, c in self.order(swapped).items():
                    out[w] = out.get(w, 0) + c
                for z, c in self._bracket.get((x, y), {}).items():
                    for w, c2 in self.order(word[:k] + (z,) + word[k + 2:]).items():
                        out[w] = out.get(w, 0) + c * c2
                res = _clean(out)
                self._cache[word] = res
                return res
        res = {word: sp.Integer(1)}
        self._cache[word] = res
        return res

    def monomials(self, degree: int, include_central: bool = False) -> list[Word]:
        """Ordered words of length ``<= degree``, highest degree first."""
        gens = [i for i in range(len(self.names)) if include_central or i != self.central]
        out = []
        for d in range(degree, -1, -1):
            out.extend(itertools.combinations_with_replacement(gens, d))
        return out


def _clean(terms: Mapping[Word, Expr]) -> dict[Word, Expr]:
    out = {}
    for w, c in terms.items():
        c = normalize(c)
        if c != 0:
            out[w] = c
    return out


@dataclass(frozen=True)
class PBWElement:
    """Element of the enveloping algebra as ``{word: coefficient}``."""

    algebra: PBW
    terms: Mapping[Word, Expr]

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def degree_without_central(self) -> int:
        c = self.algebra.central
        return max((sum(1 for g in w if g != c) for w in self.terms), default=0)

    def __add__(self, other: "PBWElement") -> "PBWElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return PBWElement(self.algebra, _clean(out))

    def __sub__(self, other: "PBWElement") -> "PBWElement":
        return self + other.scale(-1)

    def __neg__(self) -> "PBWElement":
        return self.scale(-1)

    def scale(self, s) -> "PBWElement":
        s = sp.sympify(s)
        return PBWElement(self.algebra, _clean({w: s * c for w, c in self.terms.items()}))

    def __mul__(self, other: "PBWElement") -> "PBWElement":
        if not isinstance(other, PBWElement):
            return self.scale(other)
        out: dict[Word, Expr] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                for w, c in self.algebra.order(w1 + w2).items():
                    out[w] = out.get(w, 0) + c1 * c2 * c
        return PBWElement(self.algebra, _clean(out))

    def __rmul__(self, s) -> "PBWElement":
        return self.scale(s)

    def commutator(self, other: "PBWElement") -> "PBWElement":
        return self * other - other * self

    def central_to(self, value=CENTRAL_VALUE) -> "PBWElement":
        """Replace the central generator by a scalar."""
        z = self.algebra.central
        out: dict[Word, Expr] = {}
        for w, c in self.terms.items():
            n = w.count(z)
            rest = tuple(g for g in w if g != z)
            out[rest] = out.get(rest, 0) + c * sp.sympify(value) ** n
        return PBWElement(self.algebra, _clean(out))

    def xreplace(self, mapping) -> "PBWElement":
        return PBWElement(self.algebra, _clean({w: sp.sympify(c).xreplace(mapping)
                                                for w, c in self.terms.items()}))

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(len(w) == 0 for w in self.terms)

    def scalar_part(self) -> Expr:
        return sp.sympify(self.terms.get((), 0))

    def is_central_polynomial(self) -> bool:
        z = self.algebra.central
        return bool(self.terms) and all(all(g == z for g in w) for w in self.terms)

    def text(self) -> str:
        if not self.terms:
            return "0"
        names = self.algebra.names
        parts = []
        for w in sorted(self.terms, key=lambda w: (-len(w), w)):
            c = self.terms[w]
            mono = "*".join(_power_text(names, w))
            if not mono:
                parts.append(to_text(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({to_text(c)})*{mono}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.text()


def _power_text(names, word: Word) -> list[str]:
    out = []
    for g, grp in itertools.groupby(word):
        n = len(list(grp))
        out.append(names[g] if n == 1 else f"{names[g]}^{n}")
    return out


# ---------------------------------------------------------------------------
# coordinate differential operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffOperator:
    """``sum coeff * d^alpha`` over the chart variables (fibre included)."""

    variables: tuple[sp.Symbol, ...]
    terms: Mapping[tuple[int, ...], Expr]

    @classmethod
    def from_field(cls, X: VectorField) -> "DiffOperator":
        n = len(X.variables)
        terms = {}
        for k, c in enumerate(X.coeffs):
            if c != 0:
                terms[tuple(int(i == k) for i in range(n))] = sp.sympify(c)
        return cls(tuple(X.variables), terms)

    @classmethod
    def multiplication(cls, variables, f) -> "DiffOperator":
        return cls(tuple(variables), {(0,) * len(variables): sp.sympify(f)})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def apply(self, f) -> Expr:
        f = sp.sympify(f)
        out = sp.Integer(0)
        for alpha, c in self.terms.items():
            g = f
            for v, k in zip(self.variables, alpha):
                if k:
                    g = sp.diff(g, v, k)
            out += c * g
        return out

    __call__ = apply

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return DiffOperator(self.variables, _clean_ops(out))

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + other.scale(-1)

    def scale(self, s) -> "DiffOperator":
        s = sp.sympify(s)
        return DiffOperator(self.variables, _clean_ops({a: s * c for a, c in self.terms.items()}))

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """``(self o other) f = self(other(f))`` by the Leibniz rule."""
        out: dict[tuple[int, ...], Expr] = {}
        for alpha, a in self.terms.items():
            for beta, b in other.terms.items():
                for gamma in itertools.product(*(range(k + 1) for k in alpha)):
                    mult = 1
                    db = b
                    for v, al, ga in zip(self.variables, alpha, gamma):
                        mult *= math.comb(al, ga)
                        if ga:
                            db = sp.diff(db, v, ga)
                    if db == 0:
                        continue
                    key = tuple(al - ga + be for al, ga, be in zip(alpha, gamma, beta))
                    out[key] = out.get(key, 0) + mult * a * db
        return DiffOperator(self.variables, _clean_ops(out))

    def is_zero(self) -> bool:
        return not self.terms

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=lambda a: (-sum(a), a)):
            d = "".join(f"d{v.name}" + (f"^{k}" if k > 1 else "") for v, k in zip(self.variables, a) if k)
            parts.append(f"({to_text(self.terms[a])})" + (f"*{d}" if d else ""))
        return " + ".join(parts)


def _clean_ops(terms):
    out = {}
    for a, c in terms.items():
        c = normalize(c)
        if c != 0:
            out[a] = c
    return out


def op_compose(A, B):
    """Operator product in either representation."""
    if isinstance(A, PBWElement) and isinstance(B, PBWElement):
        return A * B
    if isinstance(A, DiffOperator) and isinstance(B, DiffOperator):
        return A.compose(B)
    raise TypeError("both operators must use the same representation")


def op_commutator(A, B):
    """``A B - B A`` in either representation."""
    if isinstance(A, PBWElement) and isinstance(B, PBWElement):
        return A.commutator(B)
    return op_compose(A, B) - op_compose(B, A)


def to_coordinates(spec: GroupSpec, u: PBWElement) -> DiffOperator:
    """Realize a PBW element with the left-invariant fields of ``spec``."""
    fields = {X.name: DiffOperator.from_field(X) for X in left_fields(spec)}
    variables = tuple(spec.all_symbols)
    total = DiffOperator(variables, {})
    for w, c in u.terms.items():
        op = DiffOperator.multiplication(variables, c)
        for g in w:
            op = op.compose(fields[u.algebra.names[g]])
        total = total + op
    return total


# ---------------------------------------------------------------------------
# left ideals
# ---------------------------------------------------------------------------


class _Field:
    """Exact scalar field ``QQ(i)(parameters)`` used for elimination."""

    def __init__(self, symbols: Iterable[sp.Symbol]):
        self.symbols = tuple(sorted(set(symbols), key=lambda s: s.name))
        self.K = QQ_I.frac_field(*self.symbols) if self.symbols else QQ_I

    def __call__(self, e):
        return self.K.from_sympy(sp.sympify(e))

    def back(self, x) -> Expr:
        return normalize(self.K.to_sympy(x))


@dataclass
class Reduction:
    """``w = sum_k B[k] * P_k + remainder`` inside the truncated ideal."""

    remainder: PBWElement
    witness: dict[int, PBWElement]

    @property
    def scalar(self) -> Expr:
        return self.remainder.scalar_part()


class LeftIdeal:
    """Truncated left ideal ``U . P`` after the central substitution.

    Any nonzero scalar reached during elimination is stored in ``scalars``
    rather than used as a pivot, so remainders computed by :meth:`reduce`
    are taken modulo the proper part of the ideal and expose the scalar.
    Spanned by ``m * p_k`` for ordered monomials ``m`` with
    ``deg m + deg p_k <= degree``; kept in echelon form with columns ordered
    by decreasing degree so that leftovers land on low-degree monomials.
    """

    def __init__(self, pbw: PBW, gens: Sequence[PBWElement], degree: int,
                 central_value=CENTRAL_VALUE):
        self.pbw = pbw
        self.gens = [g.central_to(central_value) for g in gens]
        self.degree = degree
        self.central_value = central_value
        self.columns = pbw.monomials(degree)
        self.col = {w: i for i, w in enumerate(self.columns)}
        syms = set()
        for g in self.gens:
            for c in g.terms.values():
                syms |= sp.sympify(c).free_symbols
        for row in pbw.alg.table.values():
            for c in row.values():
                syms |= sp.sympify(c).free_symbols
        self.F = _Field(syms)
        self.conditions: list[Expr] = []
        self.scalars: list[tuple[Expr, dict]] = []
        self.rows: list[tuple[dict[int, object], dict[tuple[Word, int], object]]] = []
        for k, g in enumerate(self.gens):
            dg = g.degree
            for m in pbw.monomials(max(degree - dg, 0)):
                prod = (PBWElement(pbw, {m: sp.Integer(1)}) * g).central_to(central_value)
                if prod.is_zero():
                    continue
                self._insert(self._vec(prod), {(m, k): self.F.K.one})

    def _vec(self, u: PBWElement) -> dict[int, object]:
        out = {}
        for w, c in u.terms.items():
            if w not in self.col:
                raise DegreeBoundExceeded(f"term of degree {len(w)} exceeds the truncation {self.degree}")
            out[self.col[w]] = self.F(c)
        return out

    def _reduce_vec(self, vec, comb):
        K = self.F.K
        vec, comb = dict(vec), dict(comb)
        for pv, pc in self.rows:
            lead = min(pv)
            if lead in vec:
                f = vec[lead]
                for i, c in pv.items():
                    v = vec.get(i, K.zero) - f * c
                    if v == K.zero:
                        vec.pop(i, None)
                    else:
                        vec[i] = v
                for i, c in pc.items():
                    v = comb.get(i, K.zero) - f * c
                    if v == K.zero:
                        comb.pop(i, None)
                    else:
                        comb[i] = v
        return vec, comb

    def _insert(self, vec, comb):
        vec, comb = self._reduce_vec(vec, comb)
        if not vec:
            return
        lead = min(vec)
        piv = vec[lead]
        if self.columns[lead] == ():
            # a scalar in the ideal: kept apart so reductions still expose it
            self.scalars.append((self.F.back(piv), {i: self.F.back(c) for i, c in comb.items()}))
            return
        cond = nonzero_condition(self.F.back(piv))
        if cond is not None and cond not in self.conditions:
            self.conditions.append(cond)
        inv = self.F.K.one / piv
        vec = {i: c * inv for i, c in vec.items()}
        comb = {i: c * inv for i, c in comb.items()}
        # keep rows fully reduced against the new pivot
        new_rows = []
        for pv, pc in self.rows:
            if lead in pv:
                f = pv[lead]
                pv = {i: pv.get(i, self.F.K.zero) - f * vec.get(i, self.F.K.zero) for i in set(pv) | set(vec)}
                pv = {i: c for i, c in pv.items() if c != self.F.K.zero}
                pc = {i: pc.get(i, self.F.K.zero) - f * comb.get(i, self.F.K.zero) for i in set(pc) | set(comb)}
                pc = {i: c for i, c in pc.items() if c != self.F.K.zero}
            new_rows.append((pv, pc))
        new_rows.append((vec, comb))
        new_rows.sort(key=lambda r: min(r[0]))
        self.rows = new_rows

    def reduce(self, u: PBWElement) -> Reduction:
        """Remainder of ``u`` (after the central substitution) modulo the ideal."""
        u = u.central_to(self.central_value)
        vec, comb = self._reduce_vec(self._vec(u), {})
        rem = {self.columns[i]: self.F.back(c) for i, c in vec.items()}
        witness: dict[int, dict[Word, Expr]] = {}
        for (m, k), c in comb.items():
            witness.setdefault(k, {})
            witness[k][m] = witness[k].get(m, 0) - self.F.back(c)
        wit = {k: PBWElement(self.pbw, _clean(v)) for k, v in witness.items()}
        return Reduction(PBWElement(self.pbw, _clean(rem)), {k: v for k, v in wit.items() if not v.is_zero()})

    def contains_unit(self) -> bool:
        return bool(self.scalars)

    def low_degree(self, max_degree: int = 1) -> list[PBWElement]:
        """Echelon elements whose leading monomial has degree ``<= max_degree``."""
        out = []
        for pv, _ in self.rows:
            if len(self.columns[min(pv)]) <= max_degree:
                out.append(PBWElement(self.pbw, _clean({self.columns[i]: self.F.back(c) for i, c in pv.items()})))
        return out


# ---------------------------------------------------------------------------
# higher-order polarizations
# ---------------------------------------------------------------------------


@dataclass
class HOPolarizationVerdict:
    """Outcome of :func:`check_ho_polarization`."""

    elements: list[PBWElement]
    closes: bool
    avoids_central: bool
    closure: dict[tuple[int, int], Reduction]
    obstructions: dict[tuple[int, int], PBWElement]
    content: list[AlgebraElement]
    content_verdict: object | None
    conditions: list[Expr] = field(default_factory=list)
    scalars: list[Expr] = field(default_factory=list)
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.closes and self.avoids_central

    def scalar_obstructions(self) -> dict[tuple[int, int], Expr]:
        return {k: r.scalar_part() for k, r in self.obstructions.items() if r.scalar_part() != 0}

    def records(self) -> list[CheckRecord]:
        out = []
        for (a, b), red in self.closure.items():
            name = f"closure[{a},{b}]"
            ok = red.remainder.is_zero()
            wit = {f"B[{k}]": v.text() for k, v in red.witness.items()}
            detail = "closes" if ok else f"leftover {red.remainder.text()}"
            out.append(CheckRecord(name, ok, detail, None if ok else {"leftover": red.remainder.text()},
                                   {"coefficients": wit}))
        out.append(CheckRecord("no-central-intersection", self.avoids_central, self.detail))
        if self.content_verdict is not None:
            flags = self.content_verdict.flags
            out.append(CheckRecord("vector-field-content", True,
                                   ", ".join(e.text() for e in self.content),
                                   data={"first_order_flags": flags}))
        return out


def _elements(pbw: PBW, P, declare=()) -> list[PBWElement]:
    out = []
    for p in P:
        if isinstance(p, PBWElement):
            out.append(p)
        elif isinstance(p, AlgebraElement):
            out.append(pbw.from_algebra(p))
        else:
            out.append(pbw.parse(p, declare))
    return out


def _saturated_ideal(pbw: PBW, elems: list[PBWElement], central_value) -> LeftIdeal:
    """Truncated ideal, regenerated until its degree-one part stops growing.

    A degree-one element found deep in the ideal can be multiplied on the
    left again without leaving the truncation, which exposes scalars that a
    single pass would miss.
    """
    gens = list(elems)
    ideal = LeftIdeal(pbw, gens, 2 * MAX_DEGREE - 1, central_value)
    for _ in range(len(pbw.names) + 1):
        if ideal.contains_unit():
            break
        low = ideal.low_degree(1)
        known = LeftIdeal(pbw, [g for g in gens if g.degree <= 1], 1, central_value) if gens else None
        fresh = [u for u in low if known is None or not known.reduce(u).remainder.is_zero()]
        if not fresh:
            break
        gens = gens + fresh
        conditions = ideal.conditions
        ideal = LeftIdeal(pbw, gens, 2 * MAX_DEGREE - 1, central_value)
        ideal.conditions = conditions + [c for c in ideal.conditions if c not in conditions]
    return ideal


def check_ho_polarization(spec, P, declare: Sequence[ParamAssumption] = (),
                          central_value=CENTRAL_VALUE) -> HOPolarizationVerdict:
    """Validate a higher-order polarization of degree at most :data:`MAX_DEGREE`.

    (a) every pairwise commutator is reduced modulo the left ideal generated
    by ``P`` (truncated at degree ``2*MAX_DEGREE - 1``) and must leave no
    remainder; the reduction coefficients are kept as witnesses.
    (b) neither ``P`` nor the truncated ideal may contain a nonzero
    polynomial in the central generator.
    (c) the degree-one part of the ideal (its vector-field content) is
    validated as a first-order polarization.

    Raises
    ------
    DegreeBoundExceeded
        If an element of ``P`` has degree above :data:`MAX_DEGREE`.
    """
    pbw = spec if isinstance(spec, PBW) else PBW(spec)
    elems = _elements(pbw, P, declare)
    for e in elems:
        if e.degree_without_central() > MAX_DEGREE:
            raise DegreeBoundExceeded(f"{e.text()} has degree {e.degree_without_central()} > {MAX_DEGREE}")
    central_hits = [e for e in elems if e.is_central_polynomial() or e.central_to(central_value).is_scalar()]
    ideal = _saturated_ideal(pbw, elems, central_value)
    avoids = not central_hits and not ideal.contains_unit()
    detail = ""
    if central_hits:
        detail = f"{central_hits[0].text()} is a polynomial in the central generator"
    closure, obstructions = {}, {}
    for a, b in itertools.combinations(range(len(elems)), 2):
        red = ideal.reduce(elems[a].commutator(elems[b]))
        closure[(a, b)] = red
        if not red.remainder.is_zero():
            obstructions[(a, b)] = red.remainder
    content = []
    z = pbw.alg.central
    for u in ideal.low_degree(1):
        coeffs = {}
        for w, c in u.terms.items():
            if len(w) == 1:
                coeffs[pbw.names[w[0]]] = c
            elif len(w) == 0:
                coeffs[z] = normalize(c / central_value)
        if coeffs:
            content.append(AlgebraElement.of(pbw.alg, coeffs))
    verdict = None
    if content and avoids:
        try:
            verdict = validate_polarization(pbw.alg, content)
        except GaqError:
            verdict = None
    scalars = [v for v, _ in ideal.scalars]
    if scalars and not detail:
        detail = f"the generated left ideal contains the scalar {to_text(scalars[0])}"
    return HOPolarizationVerdict(elems, not obstructions, avoids, closure, obstructions, content,
                                 verdict, conditions=list(ideal.conditions), scalars=scalars,
                                 detail=detail)


# ---------------------------------------------------------------------------
# anomaly scan
# ---------------------------------------------------------------------------


@dataclass
class AnomalyScan:
    """Obstructions in the scanned parameter and the values that survive.

    ``candidates`` are roots of the obstruction numerators and of the
    generic-case pivot conditions; ``roots`` keeps those for which the
    pinned template passes :func:`check_ho_polarization`.
    """

    parameter: str
    obstructions: list[Expr]
    candidates: list[Expr]
    roots: list[Expr]
    all_values: bool
    verified: dict[str, bool]
    conditions: list[Expr]

    def magnitudes(self) -> list[Expr]:
        return [normalize(sp.Abs(r)) for r in self.roots]


def _roots_in(e: Expr, x: sp.Symbol) -> list[Expr]:
    e = sp.expand(e)
    if not e.has(x):
        return []
    try:
        found = list(sp.roots(sp.Poly(e, x)).keys())
    except sp.PolynomialError:
        found = []
    return found or list(sp.solve(e, x))


def _rational_in(e: Expr, x: sp.Symbol) -> bool:
    num, den = sp.fraction(sp.together(sp.sympify(e)))
    return num.is_polynomial(x) and den.is_polynomial(x)


def anomaly_scan(spec, template: Sequence, param: str,
                 declare: Sequence[ParamAssumption] = ()) -> AnomalyScan:
    """Find the parameter values at which a template closes.

    ``param`` may be a spec parameter (like ``k``) or a template-only symbol
    (declared via ``declare``, or created on the fly). Remainder
    coefficients and scalars found in the ideal are treated as rational
    functions of the parameter; their numerators and the pivot conditions
    give candidate values, each of which is re-verified by pinning it.

    Raises
    ------
    NonPolynomialObstruction
        If an obstruction is not rational in the parameter.
    """
    base_alg = algebra_of(spec)
    known = [p for p in base_alg.context.params if p.name == param]
    decl = list(declare)
    if not known and not any(d.name == param for d in decl):
        decl.append(ParamAssumption(param, "real"))
    old = next((p.symbol for p in list(base_alg.context.params) + decl if p.name == param), sp.Symbol(param))
    # drop assumptions: a real-declared symbol lets sympy discard complex roots
    free = sp.Symbol(param)
    table = {key: {z: sp.sympify(c).xreplace({old: free}) for z, c in row.items()}
             for key, row in base_alg.table.items()}
    pbw = PBW(dataclasses.replace(base_alg, table=table))
    elems = [PBWElement(pbw, {w: sp.sympify(c).xreplace({old: free}) for w, c in e.terms.items()})
             for e in _elements(PBW(base_alg), template, decl)]
    for e in elems:
        for c in e.terms.values():
            if not _rational_in(c, free):
                raise NonPolynomialObstruction(f"template coefficient {to_text(c)} is not rational in {param}")
    verdict = check_ho_polarization(pbw, elems)
    polys = []
    coeffs = [c for rem in verdict.obstructions.values() for c in rem.terms.values()]
    for c in coeffs + list(verdict.scalars):
        c = normalize(sp.sympify(c))
        num = sp.fraction(sp.together(c))[0]
        if not _rational_in(c, free):
            raise NonPolynomialObstruction(f"obstruction {to_text(c)} is not polynomial in {param}")
        num = sp.expand(num)
        if num != 0 and num not in polys:
            polys.append(num)
    conds = [normalize(sp.sympify(c)) for c in verdict.conditions]
    if not polys:
        return AnomalyScan(param, [], [], [], True, {}, verdict.conditions)
    cands: list[Expr] = []
    dependent = [p for p in polys if p.has(free)]
    if dependent and len(dependent) == len(polys):
        g = dependent[0]
        for p in dependent[1:]:
            g = sp.gcd(g, p)
        cands += [r for r in _roots_in(g, free)
                  if all(normalize(p.xreplace({free: r})) == 0 for p in polys)]
    for c in conds:
        cands += [r for r in _roots_in(sp.fraction(sp.together(c))[0], free)]
    uniq: list[Expr] = []
    for r in (normalize(r) for r in cands):
        if r not in uniq:
            uniq.append(r)
    verified = {}
    for r in uniq:
        verified[to_text(r)] = _pin_template(spec, base_alg, template, param, r, decl).passed
    roots = [r for r in uniq if verified[to_text(r)]]
    return AnomalyScan(param, polys, uniq, roots, False, verified, verdict.conditions)


def _pin_template(spec, alg: LieAlgebra, template, param, value, decl):
    if any(p.name == param for p in alg.context.params):
        target = spec if isinstance(spec, (GroupSpec, AbstractAlgebraSpec)) else alg
        return check_ho_polarization(algebra_of(target.with_pins(**{param: value})), template, decl)
    pbw = PBW(alg)
    sym = next(p.symbol for p in decl if p.name == param)
    elems = [e.xreplace({sym: value}) for e in _elements(pbw, template, decl)]
    return check_ho_polarization(pbw, elems)


# ---------------------------------------------------------------------------
# Casimir elements
# ---------------------------------------------------------------------------


@dataclass
class CasimirResult:
    """Quadratic invariants on equivariant functions.

    ``element`` is the normalized non-constant invariant of lowest degree;
    ``basis`` lists all independent ones (constants excluded).
    """

    element: PBWElement | None
    basis: list[PBWElement]
    commutes: dict[str, bool]


def casimir(spec, degree: int = MAX_DEGREE, central_value=CENTRAL_VALUE) -> CasimirResult:
    """Solve for elements of degree ``<= degree`` commuting with every
    generator once the central generator acts as ``central_value``."""
    pbw = spec if isinstance(spec, PBW) else PBW(spec)
    monos = [w for w in pbw.monomials(degree) if w != ()]
    gens = [pbw.gen(n) for n in pbw.alg.generators]
    unknowns = sp.symbols(f"u0:{len(monos)}")
    cand = PBWElement(pbw, {w: u for w, u in zip(monos, unknowns)})
    eqs = []
    for g in gens:
        com = g.commutator(cand).central_to(central_value)
        eqs.extend(com.terms.values())
    from . import linalg

    rows = [[sp.diff(e, u) for u in unknowns] for e in eqs]
    ns = linalg.nullspace(rows, len(unknowns)) if rows else [
        [sp.Integer(int(i == k)) for i in range(len(unknowns))] for k in range(len(unknowns))]
    basis = []
    for v in ns:
        el = PBWElement(pbw, _clean({w: c for w, c in zip(monos, v)}))
        if not el.is_zero():
            basis.append(el)
    basis.sort(key=lambda e: (e.degree, e.text()))
    element = None
    if basis:
        # prefer a genuinely quadratic invariant when one exists
        quad = [b for b in basis if b.degree == degree] or basis
        element = quad[0]
        lead = min((w for w in element.terms if len(w) == 1), default=None)
        if lead is not None:
            element = element.scale(1 / element.terms[lead])
    commutes = {}
    if element is not None:
        for n, g in zip(pbw.alg.generators, gens):
            commutes[n] = g.commutator(element).central_to(central_value).is_zero()
    return CasimirResult(element, basis, commutes)
