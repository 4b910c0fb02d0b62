"""Numeric oracles that share no code path with the symbolic derivations.

Invariant fields are recomputed by central differences of the numeric
group law: the left field of generator ``i`` at ``g`` is
``d/de [g * (e e_i)]`` at ``e = 0`` and the right field is
``d/de [(e e_i) * g]``; the vertical entry differentiates the cocycle.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import sympy as sp

from .errors import SingularPointError
from .group_model import GroupSpec, _PointSource, cocycle_numeric, compose_numeric
from .invariant_calculus import left_fields, right_fields
from .report import CheckRecord


def fd_field(spec: GroupSpec, side: str, index: int, g: Sequence[float], params, h: float = 1e-5) -> np.ndarray:
    """Finite-difference components of one invariant field at ``g`` (fibre last)."""
    n = spec.dim
    e = list(spec.identity)

    def image(eps):
        step = [complex(sp.sympify(x)) for x in e]
        step[index] += eps
        a, b = (list(g), step) if side == "left" else (step, list(g))
        return np.array(compose_numeric(spec, a, b, params) + [cocycle_numeric(spec, a, b, params)])

    out = (image(h) - image(-h)) / (2 * h)
    return out[: n + 1]


def fd_field_check(spec: GroupSpec, side: str = "left", points: int = 100, tol: float = 1e-6,
                   seed: int | None = None) -> CheckRecord:
    """Compare the symbolic fields with :func:`fd_field` at random points."""
    fields = (left_fields if side == "left" else right_fields)(spec)[:-1]
    syms = spec.all_symbols
    params = [p.symbol for p in spec.context.params]
    funcs = [sp.lambdify(syms + params, list(X.coeffs), "numpy") for X in fields]
    src = _PointSource(spec, seed)
    worst, witness, done = 0.0, None, 0
    while done < points:
        pv = src.params()
        g = src.element()
        args = list(g) + [0.0] + [pv[p.name] for p in spec.context.params]
        for i, f in enumerate(funcs):
            try:
                num = fd_field(spec, side, i, g, pv)
            except SingularPointError:
                break
            sym_val = np.array(f(*args), dtype=complex)
            err = float(np.max(np.abs(num - sym_val)))
            if err > worst:
                worst = err
                if err > tol:
                    witness = {"point": list(g), "generator": fields[i].name, "error": err}
        else:
            done += 1
    ok = worst <= tol
    return CheckRecord(f"fd-oracle[{side}]", ok, f"max deviation {worst:.2e} over {points} points",
                       witness, {"max_error": worst})
