"""Command-line entry point: ``gaq <command> [options]``.

Exit codes: 0 when every check passes, 1 when a mathematical check fails
(the report carries the witness), 2 for usage or spec errors.
Parameter values are pinned with ``--<name> <value>``, e.g. ``--hbar 1``.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

import sympy as sp

from . import __version__
from .errors import GaqError
from .report import REPORT_SCHEMA, CheckRecord, Report, dumps, jsonable
from .symexpr import Context, get_seed, parse, set_seed, to_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        # parameter pins such as --j must never be read as abbreviations of --json
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def _split_elements(values: Sequence[str]) -> list[str]:
    """Split ``--set`` values on top-level commas or semicolons."""
    out = []
    for v in values:
        depth, cur = 0, ""
        for ch in v:
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
            if ch in ",;" and depth == 0:
                out.append(cur.strip())
                cur = ""
            else:
                cur += ch
        if cur.strip():
            out.append(cur.strip())
    return out


def _pins(extra: Sequence[str]) -> dict[str, sp.Expr]:
    pins = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--") or len(tok) < 3:
            raise UsageError(f"unexpected argument {tok!r}")
        name = tok[2:]
        if "=" in name:
            name, value = name.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise UsageError(f"missing value for {tok}") from None
        pins[name] = parse(value, Context())
    return pins


def _load(args, pins):
    from .group_model import load_spec

    spec = load_spec(args.spec)
    if pins:
        known = set(spec.params)
        unknown = sorted(set(pins) - known)
        if unknown:
            raise UsageError(f"{spec.name} has no parameter(s) {', '.join(unknown)}; "
                             f"known: {', '.join(sorted(known)) or 'none'}")
        spec = spec.with_pins(**pins)
    return spec


def _group(spec):
    from .group_model import GroupSpec

    if not isinstance(spec, GroupSpec):
        raise UsageError(f"{spec.name} is an abstract algebra; this command needs a group spec")
    return spec


# ---------------------------------------------------------------------------
# commands; each returns (report, result payload, required check names or None)
# ---------------------------------------------------------------------------


def cmd_verify(args, pins):
    from .group_model import GroupSpec, verify_cocycle, verify_group_axioms
    from .lie_structure import jacobi_check

    spec = _load(args, pins)
    rep = Report()
    if isinstance(spec, GroupSpec):
        rep.extend(verify_group_axioms(spec, trials=args.trials))
        rep.extend(verify_cocycle(spec, trials=args.trials))
    rep.add(jacobi_check(spec))
    return spec, rep, {}


def cmd_fields(args, pins):
    from .invariant_calculus import commutator, left_fields, right_fields

    spec = _group(_load(args, pins))
    L, R = left_fields(spec), right_fields(spec)
    rep = Report()
    rep.add(CheckRecord("left-right-commute", all(commutator(X, Y).is_zero() for X in L for Y in R)))
    result = {"left": {X.name: X.text() for X in L}, "right": {X.name: X.text() for X in R}}
    return spec, rep, result


def cmd_theta(args, pins):
    from .invariant_calculus import (CENTRAL, by_name, exterior_derivative, interior_product, left_fields,
                                     noether_invariants, quantization_form, sigma_normal_form)
    from .symexpr import normalize

    spec = _group(_load(args, pins))
    theta = quantization_form(spec)
    dtheta = exterior_derivative(theta)
    rep = Report()
    t0 = normalize(interior_product(by_name(left_fields(spec), CENTRAL), theta))
    rep.add(CheckRecord("theta(X0)", normalize(t0 - spec.convention) == 0, to_text(t0)))
    rep.add(CheckRecord("d2theta", exterior_derivative(dtheta).is_zero()))
    nf = sigma_normal_form(spec)
    result = {"theta": theta.text(), "dtheta": dtheta.text(),
              "noether": noether_invariants(spec), "nu": nf.nu, "J": nf.J_text(),
              "kernel": list(nf.kernel)}
    return spec, rep, result


def cmd_brackets(args, pins):
    from .lie_structure import algebra_of, jacobi_check, structure_constants, table_text, LieAlgebra
    from .group_model import GroupSpec

    spec = _load(args, pins)
    rep = Report()
    if isinstance(spec, GroupSpec) and args.side == "right":
        alg = algebra_of(spec)
        alg = LieAlgebra(alg.name, alg.basis, alg.central, structure_constants(spec, "right"),
                         alg.theta, alg.context)
    else:
        alg = algebra_of(spec)
    rep.add(jacobi_check(alg))
    return spec, rep, {"side": args.side, "brackets": table_text(alg)}


def cmd_char(args, pins):
    from .lie_structure import characteristic_subalgebra

    spec = _load(args, pins)
    ch = characteristic_subalgebra(spec)
    result = {"basis": ch.names(), "conditions": ch.conditions,
              "special": [{"pins": p, "basis": s.names()} for p, s in ch.special]}
    return spec, Report(), result


_POLARIZATION_CORE = ("horizontal", "subalgebra", "maximal")


def cmd_polarize(args, pins):
    from .lie_structure import validate_polarization

    spec = _load(args, pins)
    P = _split_elements(args.set)
    v = validate_polarization(spec, P)
    rep = Report()
    rep.checks.extend(v.records())
    required = set(_POLARIZATION_CORE) | set(_split_elements(args.require or []))
    result = {"elements": [e.text() for e in v.elements], "flags": v.flags,
              "conditions": v.conditions, "data": v.data}
    return spec, rep, result, required


def cmd_ho_polarize(args, pins):
    from .enveloping import check_ho_polarization

    spec = _load(args, pins)
    v = check_ho_polarization(spec, _split_elements(args.set))
    rep = Report()
    rep.checks.extend(v.records())
    result = {"elements": [e.text() for e in v.elements], "closes": v.closes,
              "avoids_central": v.avoids_central, "content": [c.text() for c in v.content],
              "scalars": v.scalars, "conditions": v.conditions}
    return spec, rep, result


DEFAULT_TEMPLATES = {
    ("schrodinger-algebra", "k"): ["t", "a", "x", "c + (i/(2*m))*v^2"],
    ("harmonic-oscillator", "alpha"): ["t - alpha*x^2", "p"],
}


def cmd_anomaly(args, pins):
    from .enveloping import anomaly_scan

    spec = _load(args, pins)
    template = _split_elements(args.template) if args.template else DEFAULT_TEMPLATES.get((spec.name, args.param))
    if not template:
        raise UsageError(f"no default template for {spec.name} / {args.param}; pass --template")
    scan = anomaly_scan(spec, template, args.param)
    rep = Report()
    ok = scan.all_values or bool(scan.roots)
    rep.add(CheckRecord("closure-values", ok,
                        "all parameter values" if scan.all_values else
                        ", ".join(f"{args.param} = {to_text(r)}" for r in scan.roots) or "no value closes"))
    result = {"template": template, "parameter": args.param, "obstructions": scan.obstructions,
              "candidates": scan.candidates, "roots": scan.roots, "magnitudes": scan.magnitudes(),
              "all_values": scan.all_values, "verified": scan.verified, "conditions": scan.conditions}
    return spec, rep, result


def cmd_represent(args, pins):
    from .representations import represent

    spec = _group(_load(args, pins))
    rep = represent(spec, args.polarization)
    return spec, rep, {"polarization": args.polarization}


def cmd_su2(args, pins):
    from .representations import su2_rep_matrices

    R = su2_rep_matrices(args.j)
    n = R.dim
    rep = Report()
    rep.add(CheckRecord("casimir", (R.casimir - R.j * (R.j + 1) * sp.eye(n)).is_zero_matrix,
                        f"{to_text(R.j * (R.j + 1))} * identity"))
    rep.add(CheckRecord("adjointness", R.adjoint_ok()))
    result = {"j": R.j, "dim": n, "J0": R.J0, "J+": R.Jp, "J-": R.Jm, "weights": R.weights,
              "highest": R.highest, "lowest": R.lowest, "notes": R.notes}
    return None, rep, result


def cmd_hermite(args, pins):
    from .representations import hermite_residual_check

    rep = Report()
    result = {}
    for n in range(args.n + 1) if args.all else [args.n]:
        h = hermite_residual_check(n, hbar=args.hbar, m=args.m, omega=args.omega)
        ok = h.max_residual < args.tol and abs(h.energy - h.expected_energy) < 1e-10
        rep.add(CheckRecord(f"hermite[n={n}]", ok, f"max residual {h.max_residual:.2e}",
                            data={"energy": h.energy}))
        result[str(n)] = {"max_residual": h.max_residual, "energy": h.energy}
    return None, rep, result


def cmd_replay(args, pins):
    from .replay import CRITERIA, run_criterion

    rep = Report()
    result = {}
    for n, (name, _) in CRITERIA.items():
        ok, recs, dt = run_criterion(n)
        for r in recs:
            r.name = f"{n}.{r.name}"
        rep.checks.extend(recs)
        result[str(n)] = {"name": name, "status": "pass" if ok else "fail"}
        if not args.no_timings:
            result[str(n)]["seconds"] = dt
    return None, rep, result


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")
    common.add_argument("--no-timings", action="store_true", help="omit timings from the JSON report")
    common.add_argument("--seed", type=int, help="random seed (default: GAQ_SEED or 1729)")

    p = _Parser(prog="gaq", description="Group-approach-to-quantization engine")
    p.add_argument("--version", action="version", version=f"gaq {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spec_cmd(name, func, help_):
        sp_ = sub.add_parser(name, parents=[common], help=help_)
        sp_.add_argument("spec", help="registry name or path to a .gaq file")
        sp_.set_defaults(func=func)
        return sp_

    v = spec_cmd("verify", cmd_verify, "group, cocycle and Jacobi checks")
    v.add_argument("--trials", type=int, default=100)
    spec_cmd("fields", cmd_fields, "left- and right-invariant vector fields")
    spec_cmd("theta", cmd_theta, "quantization form, its differential and Noether invariants")
    b = spec_cmd("brackets", cmd_brackets, "structure constants")
    b.add_argument("--side", choices=("left", "right"), default="left")
    spec_cmd("char-subalgebra", cmd_char, "characteristic subalgebra")
    pol = spec_cmd("polarize", cmd_polarize, "validate a first-order polarization")
    pol.add_argument("--set", action="append", required=True, help="comma-separated elements")
    pol.add_argument("--require", action="append", help="also require flags, e.g. full,symplectic")
    ho = spec_cmd("ho-polarize", cmd_ho_polarize, "validate a higher-order polarization")
    ho.add_argument("--set", action="append", required=True)
    an = spec_cmd("anomaly-scan", cmd_anomaly, "parameter values at which a template closes")
    an.add_argument("--param", required=True)
    an.add_argument("--template", action="append")
    r = spec_cmd("represent", cmd_represent, "ansatz residuals and reduced right actions")
    r.add_argument("--polarization", required=True)
    s = sub.add_parser("su2-matrices", parents=[common], help="spin-j matrices")
    s.add_argument("--j", required=True)
    s.set_defaults(func=cmd_su2)
    h = sub.add_parser("hermite", parents=[common], help="oscillator eigenfunction residuals")
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--all", action="store_true", help="check every level up to n")
    h.add_argument("--hbar", type=float, default=1.0)
    h.add_argument("--m", type=float, default=1.0)
    h.add_argument("--omega", type=float, default=1.0)
    h.add_argument("--tol", type=float, default=1e-8)
    h.set_defaults(func=cmd_hermite)
    rp = sub.add_parser("replay-paper", parents=[common], help="run every acceptance scenario")
    rp.set_defaults(func=cmd_replay)
    return p


def _echo(argv: Sequence[str]) -> list[str]:
    """Command line without the report path, which does not affect results."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--json":
            skip = True
        elif not a.startswith("--json="):
            out.append(a)
    return out


def run(argv: Sequence[str] | None = None, out=None) -> int:
    """Run one command; returns the exit code."""
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if args.seed is not None:
            set_seed(args.seed)
        pins = _pins(extra)
        t0 = time.perf_counter()
        outcome = args.func(args, pins)
    except UsageError as exc:
        print(f"gaq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GaqError as exc:
        print(f"gaq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - t0
    spec, rep, result = outcome[:3]
    required = outcome[3] if len(outcome) > 3 else None
    checks = [c for c in rep if required is None or c.name in required]
    passed = all(c.passed for c in checks)

    print(f"gaq {args.command}" + (f" {spec.name}" if spec is not None else ""), file=out)
    if rep.checks:
        print(rep.summary(), file=out)
    for key, val in jsonable(result).items():
        if isinstance(val, dict):
            print(f"{key}:", file=out)
            for k, v in val.items():
                print(f"  {k}: {v}", file=out)
        elif isinstance(val, list) and val and isinstance(val[0], str) and len(val) > 3:
            print(f"{key}:", file=out)
            for v in val:
                print(f"  {v}", file=out)
        else:
            print(f"{key}: {val}", file=out)
    print("PASS" if passed else "FAIL", file=out)

    if args.json:
        timings = not args.no_timings
        payload = {
            "schema": REPORT_SCHEMA,
            "version": __version__,
            "command": _echo(argv),
            "seed": get_seed(),
            "spec": None if spec is None else {"name": spec.name, "pins": {k: v for k, v in pins.items()}},
            "status": "pass" if passed else "fail",
            "checks": [c.to_dict(timings) for c in rep],
            "result": jsonable(result),
        }
        if timings:
            payload["seconds"] = round(elapsed, 6)
        with open(args.json, "w") as fh:
            fh.write(dumps(jsonable(payload)) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())
