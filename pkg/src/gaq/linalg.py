"""Exact linear algebra over parameter-dependent scalars.

Row reduction picks pivots that are provably nonzero when possible; when a
pivot depends on parameters and could vanish, it is recorded as a
condition (the result is then the generic case).
"""

from __future__ import annotations

from typing import Sequence

import sympy as sp

from .symexpr import Expr, normalize


def nonzero_condition(e: Expr) -> Expr | None:
    """Essential factor of ``e`` that might vanish, or ``None`` if it cannot."""
    e = normalize(e)
    if e.is_zero is False or not e.free_symbols:
        return None
    num = sp.fraction(sp.together(e))[0]
    keep = [f for f in sp.Mul.make_args(sp.factor_terms(num)) if f.free_symbols and f.is_zero is not False]
    return sp.Mul(*keep) if keep else None


def _pivot_score(e: Expr) -> tuple[int, int]:
    return (0 if not e.free_symbols else 1, sp.count_ops(e))


def rref(rows: Sequence[Sequence], conditions: list | None = None) -> tuple[sp.Matrix, list[int]]:
    """Reduced row echelon form; appends pivot conditions to ``conditions``."""
    m = sp.Matrix([[normalize(x) for x in r] for r in rows]) if rows else sp.Matrix(0, 0, [])
    nr, nc = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        cands = [i for i in range(r, nr) if normalize(m[i, c]) != 0]
        if not cands:
            continue
        i = min(cands, key=lambda k: _pivot_score(m[k, c]))
        m.row_swap(r, i)
        piv = m[r, c]
        cond = nonzero_condition(piv)
        if cond is not None and conditions is not None and cond not in conditions:
            conditions.append(cond)
        m[r, :] = (m[r, :] / piv).applyfunc(normalize)
        for k in range(nr):
            if k != r and m[k, c] != 0:
                m[k, :] = (m[k, :] - m[k, c] * m[r, :]).applyfunc(normalize)
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence], conditions: list | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, conditions)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, conditions: list | None = None) -> list[list[Expr]]:
    """Basis of ``{x : rows . x = 0}`` (generic case)."""
    if not rows:
        return [[sp.Integer(int(i == k)) for i in range(ncols)] for k in range(ncols)]
    m, piv = rref(rows, conditions)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [sp.Integer(0)] * ncols
        v[f] = sp.Integer(1)
        for r, p in enumerate(piv):
            v[p] = normalize(-m[r, f])
        basis.append(v)
    return basis


def span_basis(vectors: Sequence[Sequence], conditions: list | None = None) -> list[list[Expr]]:
    """Independent rows spanning the same space."""
    if not vectors:
        return []
    m, piv = rref(vectors, conditions)
    return [[m[r, c] for c in range(m.cols)] for r in range(len(piv))]


def solve_in_span(vectors: Sequence[Sequence], target: Sequence, conditions: list | None = None):
    """Coefficients ``a`` with ``sum a_k vectors[k] = target``, or ``None``."""
    n = len(target)
    if not vectors:
        return [] if all(normalize(t) == 0 for t in target) else None
    k = len(vectors)
    aug = [[vectors[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    m, piv = rref(aug, conditions)
    if k in piv:
        return None
    sol = [sp.Integer(0)] * k
    for r, p in enumerate(piv):
        sol[p] = m[r, k]
    return sol
