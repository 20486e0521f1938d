"""Command-line entry point: ``slevir <subcommand> [flags]``.

Every subcommand writes one versioned JSON document (to ``--output`` or
stdout).  Exit status is 0 when all checks pass, 1 when a check fails (the
report says which), and 2 for invalid input or a computation error, in
which case a ``slevir.failure/1`` document goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import SlevirError

SCHEMA_CHECK = "slevir.check/1"
SCHEMA_FAILURE = "slevir.failure/1"
SCHEMA_SINGULAR = "slevir.singular/1"


class UsageError(ValueError):
    code = "invalid-arguments"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# argument helpers ------------------------------------------------------------------


def _kappa_arg(text: str) -> Fraction | None:
    if text == "generic":
        return None
    try:
        k = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"kappa must be 'generic' or a fraction p/q, got {text!r}") from None
    if k <= 0:
        raise argparse.ArgumentTypeError("kappa must be positive")
    return k


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_variant(p: argparse.ArgumentParser, default: str = "kappa-rho"):
    p.add_argument("--variant", choices=["chordal", "kappa-rho", "multiple"], default=default)
    p.add_argument("--rho", action="append", default=None, help="exponent rho_K (repeat for several marked points), e.g. 'kappa-6'")
    p.add_argument("--n", type=int, default=2, help="number of curves for --variant multiple")
    p.add_argument("--geometry", choices=["paired", "unpaired"], default="paired")


def _variant(args, depth: int):
    from .sle import make_variant

    if args.variant == "chordal":
        return make_variant("chordal", depth=depth)
    if args.variant == "kappa-rho":
        return make_variant("kappa-rho", rho=args.rho or ["kappa-6"], depth=depth)
    return make_variant("multiple", n=args.n, geometry=args.geometry, depth=depth)


def _emit(doc: dict, path: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _finite(x: float):
    return x if math.isfinite(x) else str(x)


# subcommands -------------------------------------------------------------------------


def cmd_check_commutators(args) -> dict:
    from .funcspace import random_element
    from .sle import drift_commutator_residual
    from .virasoro import commutator_residual

    v = _variant(args, depth=max(12, 2 * args.range + args.f_degree + 2))
    w = v.weights
    rng = np.random.default_rng(args.seed)
    failures = []
    for k in range(args.elements):
        e = random_element(v.vs, rng, f_degree=args.f_degree)
        for n in range(-args.range, args.range + 1):
            for m in range(-args.range, args.range + 1):
                if not commutator_residual(n, m, w, e).is_zero():
                    failures.append({"invariant": "virasoro-commutator", "element": k, "n": n, "m": m})
        for xi in v.xs:
            for n in (0, -1, -2):
                if not drift_commutator_residual(v, n, xi, e).is_zero():
                    failures.append({"invariant": "drift-commutator", "element": k, "n": n, "point": xi})
    return {
        "schema": SCHEMA_CHECK,
        "check": "commutators",
        "variant": v.params,
        "elements": args.elements,
        "range": args.range,
        "seed": args.seed,
        "failures": failures,
        "pass": not failures,
    }


def cmd_build_module(args) -> dict:
    from .sle import build_module

    v = _variant(args, depth=max(8, args.levels))
    return build_module(v, args.levels, kappa0=args.kappa).to_json()


def cmd_find_singular(args) -> dict:
    from .sle import find_singular_null

    v = _variant(args, depth=max(8, args.level))
    r = find_singular_null(v, args.level, args.kappa)
    out = {k: r[k] for k in ("level", "kappa", "null_vectors")}
    out["schema"] = SCHEMA_SINGULAR
    out["variant"] = v.params
    out["singular_vectors"] = []
    for s in r["singular_vectors"]:
        entry = {"words": s["words"], "coefficients": s["coefficients"], "element": s["element"].to_json()}
        if "ratio" in s:
            entry["ratio"] = s["ratio"].to_json()
        out["singular_vectors"].append(entry)
    return out


def cmd_verify_state(args) -> dict:
    from . import fock

    v = _variant(args, depth=max(8, args.lmax + 2))
    if args.variant == "multiple":
        raise UsageError("verify-state supports chordal and kappa-rho; use screening-check for multiple SLE")
    comps = fock.state_components(v, lmax=args.lmax, D=args.degree)
    bad = fock.state_annihilation_failures(v, comps)
    doc = fock.state_to_json(v, comps)
    doc["failures"] = [{"invariant": "state-annihilation", "partition": list(p), "point": x} for p, x in bad]
    doc["lmax"] = args.lmax
    doc["degree"] = args.degree
    doc["pass"] = not bad
    return doc


def cmd_screening_check(args) -> dict:
    from . import fock
    from .algebra.scalar import parse_scalar

    results = []
    if args.charges:
        alphas = [parse_scalar(c) for c in args.charges]
        ok = fock.coulomb_null_field_residual(alphas).is_zero()
        results.append({"identity": "coulomb-null-field", "charges": args.charges, "zero": ok})
    else:
        for I in range(args.n):
            ok = fock.screening_identity(args.n, args.l, I).is_zero()
            results.append({"identity": "screened-null-field", "N": args.n, "L": args.l, "I": I + 1, "zero": ok})
        if args.state_level is not None:
            for I in range(args.n):
                bad = fock.multiple_state_residual(args.n, args.l, args.state_level, I)
                results.append(
                    {"identity": "screened-state", "N": args.n, "L": args.l, "I": I + 1, "lmax": args.state_level, "zero": not bad}
                )
    failures = [dict(r, invariant=r["identity"]) for r in results if not r["zero"]]
    return {"schema": SCHEMA_CHECK, "check": "screening", "results": results, "failures": failures, "pass": not failures}


def _config_from_args(args):
    from .geometry import PairingConfig, config_from_walk

    if args.walk:
        cfg = config_from_walk(args.walk)
    else:
        pairs = []
        for token in args.pairs or []:
            i, j = (int(x) for x in token.split("-"))
            pairs.append((i, j))
        cfg = PairingConfig(len(args.points), tuple(sorted(pairs)))
    if cfg.n != len(args.points):
        raise UsageError(f"configuration has {cfg.n} points but {len(args.points)} were given")
    if not cfg.is_valid():
        raise UsageError(f"invalid pairing configuration {cfg.pairs}")
    return cfg


def cmd_ff_integrate(args) -> dict:
    from . import geometry

    spec = geometry.QuadratureSpec(nodes=args.nodes)
    cfg = _config_from_args(args)
    k = float(args.kappa)
    Z = geometry.feigin_fuchs_Z(cfg, args.points, k, spec)
    residuals = {f"null_field_{I}": geometry.null_field_residual(cfg, args.points, k, I, spec) for I in range(1, cfg.n + 1)}
    residuals["translation"] = geometry.translation_residual(cfg, args.points, k, spec=spec)
    residuals["scaling"] = geometry.scaling_residual(cfg, args.points, k, spec=spec)
    failures = [
        {"invariant": "null-field", "I": int(name.rsplit("_", 1)[1]), "residual": r}
        for name, r in residuals.items()
        if name.startswith("null_field") and r > args.tolerance
    ]
    doc = {
        "schema": geometry.SCHEMA_FF,
        "config": cfg.to_json(),
        "points": list(args.points),
        "kappa": k,
        "nodes": args.nodes,
        "Z": {"re": Z.real, "im": Z.imag} if isinstance(Z, complex) else Z,
        "residuals": residuals,
        "tolerance": args.tolerance,
        "failures": failures,
        "pass": not failures,
    }
    if cfg.L == 1 and cfg.n == 2:
        doc["beta_closed_form"] = geometry.beta_closed_form(args.points, k)
    if args.exponent:
        fit = geometry.asymptotic_exponent(cfg, args.points, k, tuple(args.exponent))
        doc["exponent"] = {"pair": args.exponent, "slope": fit.slope, "fit_residual": fit.fit_residual}
    if args.csv:
        row = {
            "config": cfg.label(),
            "walk": " ".join(map(str, cfg.walk())),
            "points": " ".join(map(repr, args.points)),
            "kappa": k,
            "Z": repr(Z),
            "residuals": json.dumps(residuals, sort_keys=True),
            "exponent": doc.get("exponent", {}).get("slope", ""),
        }
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(geometry.results_csv([row]))
    return doc


def cmd_configs(args) -> dict:
    from . import geometry

    cs = geometry.enumerate_configs(args.n, args.l)
    doc = geometry.configs_to_json(cs)
    doc["N"] = args.n
    doc["L"] = args.l
    doc["expected_count"] = geometry.config_count(args.n, args.l)
    doc["pass"] = doc["count"] == doc["expected_count"]
    return doc


def _sim_config(args):
    from .sim import SimConfig

    if args.kappa is None:
        raise UsageError("simulation needs a numeric --kappa")
    rho = tuple(args.rho or ["kappa-6"]) if args.variant == "kappa-rho" else ()
    if args.x0 is None:
        x0 = tuple(float(i) for i in range(args.n)) if args.variant == "multiple" else (0.0,)
    else:
        x0 = tuple(args.x0)
    y0 = tuple(args.y0) if args.y0 is not None else ((1.0,) * len(rho) if len(rho) <= 1 else tuple(float(i + 1) for i in range(len(rho))))
    return SimConfig(
        variant=args.variant,
        rho=rho,
        n_curves=args.n if args.variant == "multiple" else None,
        geometry=args.geometry,
        kappa=args.kappa,
        x0=x0,
        y0=y0 if args.variant == "kappa-rho" else (),
        dt=args.dt,
        eta=args.eta,
        K=args.K,
        eps=args.eps,
        n_paths=args.paths,
        seed=args.seed,
        horizon=args.horizon,
    )


def _add_sim(p: argparse.ArgumentParser):
    _add_variant(p)
    p.add_argument("--kappa", type=_kappa_arg, required=True)
    p.add_argument("--x0", type=_float_list)
    p.add_argument("--y0", type=_float_list)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--eta", type=float, default=1e-2)
    p.add_argument("--K", type=int, default=3, help="number of evolved coefficients g_{-2}..g_{-K}")
    p.add_argument("--eps", type=float, default=1e-2, help="stopping gap")
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=1.0)


def cmd_simulate(args) -> dict:
    from . import sim

    cfg = _sim_config(args)
    times = np.linspace(0.0, cfg.horizon, args.records + 1)
    if args.capacity:
        cap = sim.capacity_expectation(cfg, eps_levels=args.capacity)
        return {"schema": sim.SCHEMA_SIM, "config": cfg.to_json(), "capacity": {k: _jsonable(v) for k, v in cap.items()}}
    res = sim.run_ensemble(cfg, times)
    if args.paths_out:
        with open(args.paths_out, "w", encoding="utf-8") as fh:
            for p in range(res.n_paths):
                rec = sim.PathRecord(p, res.times, {k: v[:, p] for k, v in res.values.items()}, float(res.tau[p]), str(res.reason[p]))
                fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
    summary = {}
    for name, arr in res.values.items():
        summary[name] = {"mean": [math.fsum(row) / len(row) for row in arr]}
    reasons = {r: int(np.sum(res.reason == r)) for r in ("collision", "horizon")}
    return {
        "schema": sim.SCHEMA_SIM,
        "config": cfg.to_json(),
        "times": res.times.tolist(),
        "means": summary,
        "stopping": reasons,
        "tau_quantiles": {q: float(np.quantile(res.tau, float(q))) for q in ("0.1", "0.5", "0.9")},
        "rejected_steps": res.rejections,
    }


def _jsonable(v):
    if isinstance(v, float):
        return _finite(v)
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def cmd_drift_test(args) -> dict:
    from . import sim
    from .sle import build_module

    cfg = _sim_config(args)
    v = cfg.variant_object()
    times = np.linspace(0.0, cfg.horizon, args.slices + 1)
    res = sim.run_ensemble(cfg, times)
    reports = []
    if args.observable:
        for text in args.observable:
            reports.append(
                sim.martingale_drift_test(cfg, v.vs.parse(text), form="m", slices=args.slices, threshold=args.threshold, res=res, label=text)
            )
    if args.module_level is not None:
        mb = build_module(v, args.module_level)
        for level in range(args.module_level + 1):
            for wd in mb.basis[level]:
                label = "".join(f"L-{a}" for a in wd) + " Z" if wd else "Z"
                reports.append(
                    sim.martingale_drift_test(cfg, mb.element(wd), form="Zm", slices=args.slices, threshold=args.threshold, res=res, label=label)
                )
    if not reports:
        raise UsageError("give --observable and/or --module-level")
    doc = sim.drift_report_json(reports)
    doc["config"] = cfg.to_json()
    doc["failures"] = [{"invariant": "martingale-drift", "observable": r["observable"]} for r in reports if not r["pass"]]
    if args.expect_fail:
        # positive controls: success means every observable was rejected
        doc["expect_fail"] = True
        doc["pass"] = all(not r["pass"] for r in reports)
        doc["failures"] = [{"invariant": "control-not-rejected", "observable": r["observable"]} for r in reports if r["pass"]]
    return doc


def cmd_paper_suite(args) -> dict:
    from .suite import SuiteSettings, run_suite

    settings = SuiteSettings.quick_settings(args.seed) if args.quick else SuiteSettings(seed=args.seed)
    report, timings = run_suite(settings, args.only)
    for c in report["checks"]:
        sys.stderr.write(f"[{'PASS' if c['pass'] else 'FAIL'}] {c['id']:>2} {c['name']} ({timings[c['id']]:.1f}s)\n")
    report["failures"] = [{"invariant": c["name"], "id": c["id"]} for c in report["checks"] if not c["pass"]]
    return report


# parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slevir", description="Virasoro structure of SLE local martingales.", allow_abbrev=False)
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, allow_abbrev=False)
        sp.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
        sp.set_defaults(func=fn)
        return sp

    sp = add("check-commutators", cmd_check_commutators, "Virasoro and drift commutation relations on random elements")
    _add_variant(sp)
    sp.add_argument("--elements", type=int, default=20)
    sp.add_argument("--range", type=int, default=3)
    sp.add_argument("--f-degree", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("build-module", cmd_build_module, "graded basis of U(vir) Z")
    _add_variant(sp)
    sp.add_argument("--levels", type=int, default=4)
    sp.add_argument("--kappa", type=_kappa_arg, default=None)

    sp = add("find-singular", cmd_find_singular, "null and singular vectors at one level")
    _add_variant(sp)
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--kappa", type=_kappa_arg, default=None)

    sp = add("verify-state", cmd_verify_state, "Fock-space state components and their annihilation")
    _add_variant(sp)
    sp.add_argument("--lmax", type=int, default=4)
    sp.add_argument("--degree", type=int, default=6)

    sp = add("screening-check", cmd_screening_check, "screened integrand identities")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--charges", nargs="+", help="marked-point charges alpha_K for the Coulomb-gas identity")
    sp.add_argument("--state-level", type=int, default=None, help="also check the screened state to this Fock level")

    sp = add("ff-integrate", cmd_ff_integrate, "Feigin-Fuchs partition function by quadrature")
    sp.add_argument("--points", type=_float_list, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--pairs", nargs="*", help="pairs like 1-2 3-4 (1-based)")
    g.add_argument("--walk", type=_int_list, help="walk encoding, e.g. 0,1,0")
    sp.add_argument("--nodes", type=int, default=40)
    sp.add_argument("--tolerance", type=float, default=1e-5)
    sp.add_argument("--exponent", type=_int_list, help="collapse this adjacent pair, e.g. 1,2")
    sp.add_argument("--csv", help="also write a CSV row here")

    sp = add("configs", cmd_configs, "enumerate pairing configurations")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)

    sp = add("simulate", cmd_simulate, "simulate driving processes and Loewner coefficients")
    _add_sim(sp)
    sp.add_argument("--records", type=int, default=10, help="number of record intervals")
    sp.add_argument("--paths-out", help="write per-path records (JSON lines) here")
    sp.add_argument("--capacity", type=_float_list, help="estimate E[g_-2] at these stopping gaps and extrapolate")

    sp = add("drift-test", cmd_drift_test, "statistical martingale test")
    _add_sim(sp)
    sp.add_argument("--observable", action="append", help="polynomial in x, y, f2, ... (kappa allowed)")
    sp.add_argument("--module-level", type=int, help="test every module basis element up to this level")
    sp.add_argument("--slices", type=int, default=10)
    sp.add_argument("--threshold", type=float, default=4.0)
    sp.add_argument("--expect-fail", action="store_true", help="positive control: pass iff every observable is rejected")

    sp = add("paper-suite", cmd_paper_suite, "run every acceptance check")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--quick", action="store_true", help="smaller Monte Carlo sizes")
    sp.add_argument("--only", type=_int_list, help="comma-separated check ids")
    return p


def _failure(command: str | None, code: str, message: str) -> dict:
    return {"schema": SCHEMA_FAILURE, "command": command, "invariant": code, "message": message}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(json.dumps(_failure(argv[0] if argv else None, exc.code, str(exc)), sort_keys=True) + "\n")
        return 2
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING), stream=sys.stderr)
    try:
        doc = args.func(args)
    except (SlevirError, UsageError) as exc:
        sys.stderr.write(json.dumps(_failure(args.command, exc.code, str(exc)), sort_keys=True) + "\n")
        return 2
    except (ValueError, ArithmeticError, KeyError) as exc:
        sys.stderr.write(json.dumps(_failure(args.command, type(exc).__name__, str(exc)), sort_keys=True) + "\n")
        return 2
    doc.setdefault("command", args.command)
    _emit(doc, args.output)
    if doc.get("pass", True):
        return 0
    failures = doc.get("failures") or [{"invariant": args.command}]
    sys.stderr.write(json.dumps(_failure(args.command, failures[0].get("invariant", args.command), f"{len(failures)} check(s) failed"), sort_keys=True) + "\n")
    return 1


if __name__ == "__main__":
    sys.exit(main())
