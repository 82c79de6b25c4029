"""Batch command-line front end.

One machine-readable JSON report per invocation (schema 1).  Exit codes:
0 pass/accept, 1 fail/reject, 2 usage or input error.  Identical inputs and
seed produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import completions, dynamics, functions, groups, reps
from .errors import BudgetExceededError, IdealCstarError

SCHEMA = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    psd_tol: float = 1e-8
    eig_tol: float = 1e-8
    gap_tol: float = 0.05
    budget: int = groups.DEFAULT_BUDGET
    seed: int = 0
    output: str | None = None
    fmt: str = "json"

    def validate(self):
        if min(self.psd_tol, self.eig_tol, self.gap_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


def _default_budget() -> int:
    env = os.environ.get("IDEALCSTAR_BUDGET")
    return int(env) if env else groups.DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------


def parse_function(spec: str, model: groups.GroupModel) -> functions.GroupFunction:
    """Named families ('haagerup:n=2', 'folner:box=3',
    'schoenberg:wordlength,t=0.5', 'delta_e', 'one', 'wordlength') or a JSON
    table file prefixed with '@'.
    """
    spec = spec.strip()
    if spec.startswith("@"):
        return _function_from_json(spec[1:], model)
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for chunk in rest.split(","):
            if "=" in chunk:
                key, val = chunk.split("=", 1)
                params[key.strip()] = val.strip()
            else:
                params.setdefault("arg", chunk.strip())
    if name == "haagerup":
        return functions.haagerup(model, float(params.get("n", params.get("arg", 1))))
    if name == "schoenberg":
        base = params.get("arg", "wordlength")
        if base != "wordlength":
            raise ValueError("schoenberg currently supports psi = wordlength")
        return functions.schoenberg(functions.word_length_function(model),
                                    float(params["t"]))
    if name == "folner":
        if "box" in params:
            return functions.folner_box(model, int(params["box"]))
        return functions.folner_ball(model, int(params.get("ball", params.get("arg", 1))))
    if name == "delta_e":
        return functions.delta_e(model)
    if name == "one":
        return functions.constant_one(model)
    if name == "wordlength":
        return functions.word_length_function(model)
    if name == "random_pd":
        return reps.random_pd(model, int(params.get("dim", 2)),
                              int(params.get("seed", 0)))
    raise ValueError(f"unknown function spec {spec!r}")


def _function_from_json(path: str, model: groups.GroupModel) -> functions.GroupFunction:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "values" not in data:
        raise ValueError("function JSON needs a 'values' table")
    table = {model.element(word): complex(*_as_pair(v))
             for word, v in data["values"].items()}
    tail = _certificate_from_json(data.get("certificate"))
    return functions.TableFunction(model, table, tail=tail,
                                   label=os.path.basename(path))


def _as_pair(v) -> tuple[float, float]:
    if isinstance(v, (int, float)):
        return float(v), 0.0
    return float(v[0]), float(v[1])


def _certificate_from_json(data):
    if not data:
        return None
    kind = data.get("kind")
    if kind == "finite_support":
        return functions.FiniteSupport(int(data["radius"]))
    if kind == "exp_decay":
        return functions.ExpDecay(float(data["amplitude"]), float(data["ratio"]))
    if kind == "sphere_sups":
        return functions.SphereSupSequence(tuple(float(x) for x in data["sups"]),
                                           bool(data.get("limit_zero", False)))
    if kind == "bounded_below":
        return functions.BoundedBelow(float(data["bound"]),
                                      int(data.get("outside_radius", -1)))
    raise ValueError(f"unknown certificate kind {kind!r}")


def parse_element(spec: str, model: groups.GroupModel) -> completions.GroupRingElement:
    """'gensum', a single word like 'ab^-1a', or 'word:coeff,word:coeff'."""
    spec = spec.strip()
    if spec == "gensum":
        return completions.GroupRingElement.gensum(model)
    terms = {}
    for chunk in spec.split(","):
        word, _, coeff = chunk.partition(":")
        el = model.element(word.strip())
        val = complex(coeff) if coeff else 1.0
        terms[el] = terms.get(el, 0) + val
    return completions.GroupRingElement(model, terms)


def parse_family(spec: str, model: groups.GroupModel) -> list[functions.GroupFunction]:
    """'haagerup:n=1..10' or 'folner:boxes=2..10' / 'folner:balls=0..3'."""
    name, _, rest = spec.partition(":")
    key, _, rng = rest.partition("=")
    lo, _, hi = rng.partition("..")
    values = list(range(int(lo), int(hi) + 1)) if hi else [int(lo)]
    if name == "haagerup":
        return [functions.haagerup(model, n) for n in values]
    if name == "folner" and key in ("boxes", "box"):
        return [functions.folner_box(model, n) for n in values]
    if name == "folner" and key in ("balls", "ball"):
        return [functions.folner_ball(model, r) for r in values]
    raise ValueError(f"unknown family spec {spec!r}")


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if obj is None or isinstance(obj, (str, bool, np.bool_)):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def emit_report(command: str, result: dict, config: RunConfig) -> str:
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": {
            "psd_tol": config.psd_tol,
            "eig_tol": config.eig_tol,
            "gap_tol": config.gap_tol,
            "budget": config.budget,
            "seed": config.seed,
        },
        "result": _jsonable(result),
    }
    if config.fmt == "csv":
        text = _csv_render(report)
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _csv_render(report: dict) -> str:
    rows = ["key,value"]

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, list) and value and all(
                isinstance(v, dict) for v in value):
            for i, v in enumerate(value):  # sweep tables: one row per entry
                walk(f"{prefix}.{i}", v)
        elif isinstance(value, list):
            rows.append(f"{prefix},\"{json.dumps(value)}\"")
        else:
            rows.append(f"{prefix},{value}")

    walk("", report)
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_pd_check(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    h = parse_function(args.function, model)
    window = groups.ball(model, args.radius, budget=config.budget)
    check = functions.pd_window_check(h, window, tol=config.psd_tol)
    emit_report("pd-check", {
        "group": model.name, "function": h.label, "radius": args.radius,
        "passed": check.passed, "min_eigenvalue": check.min_eigenvalue,
        "window_size": check.window_size,
    }, config)
    return EXIT_PASS if check.passed else EXIT_FAIL


def cmd_cnd_check(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    psi = parse_function(args.function, model)
    window = groups.ball(model, args.radius, budget=config.budget)
    check = functions.cnd_window_check(psi, window, tol=config.psd_tol)
    emit_report("cnd-check", {
        "group": model.name, "function": psi.label, "radius": args.radius,
        "passed": check.passed, "max_violation": check.min_eigenvalue,
    }, config)
    return EXIT_PASS if check.passed else EXIT_FAIL


def cmd_ideal(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    h = parse_function(args.function, model)
    ideal = functions.IdealSpec.parse(args.ideal)
    member = functions.ideal_membership(h, ideal)
    emit_report("ideal", {
        "group": model.name, "function": h.label, "ideal": str(ideal),
        "verdict": member.verdict, "witness": member.witness,
    }, config)
    return EXIT_PASS if member.verdict == "member" else EXIT_FAIL


def cmd_lp_norm(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    h = parse_function(args.function, model)
    res = functions.lp_norm(h, args.p, args.radius, budget=config.budget)
    emit_report("lp-norm", {
        "group": model.name, "function": h.label, "p": args.p,
        "radius": args.radius, "partial": res.partial,
        "tail_bound": res.tail_bound, "total": res.total, "status": res.status,
    }, config)
    return EXIT_PASS if res.status == "finite" else EXIT_FAIL


def cmd_gns(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    h = parse_function(args.function, model)
    window = reps.gns_window(h, args.radius, args.pad, tol=config.psd_tol)
    checks = []
    exact = True
    for el in groups.ball(model, min(args.radius + args.pad, 3)).elements:
        recovered = window.coefficient(el)
        direct = h(el)
        defect = abs(recovered - direct)
        exact = exact and defect <= 1e-12
        checks.append({"element": repr(el), "defect": defect})
    emit_report("gns", {
        "group": model.name, "function": h.label, "radius": args.radius,
        "pad": args.pad, "gram_rank": window.rank,
        "coefficient_recovery_exact": exact, "recovery": checks,
    }, config)
    return EXIT_PASS if exact else EXIT_FAIL


def cmd_norm_gap(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    x = parse_element(args.element, model)
    ideal = functions.IdealSpec.parse(args.ideal)
    report = completions.norm_gap_report(
        x, ideal, radius=args.radius, gns_radius=args.gns_radius,
        exact_tol=1e-6, gap_tol=config.gap_tol, eig_tol=config.eig_tol,
        seed=config.seed, budget=config.budget)
    if args.sweep:
        lo, _, hi = args.sweep.partition("..")
        radii = list(range(int(lo), int(hi or lo) + 1))
        report["reduced_lower_sweep"] = completions.reduced_norm_sweep(
            x, radii, eig_tol=config.eig_tol, seed=config.seed,
            budget=config.budget)
    emit_report("norm-gap", report, config)
    return EXIT_PASS


def cmd_certificate(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    family = parse_family(args.family, model)
    ideal = functions.IdealSpec.parse(args.ideal)
    cert = completions.equality_certificate(
        ideal, family, args.conv_radius, psd_tol=config.psd_tol)
    emit_report("certificate", {
        "group": model.name, "ideal": str(ideal), "accepted": cert.accepted,
        "label": cert.label, "rows": list(cert.rows),
        "failures": list(cert.failures),
    }, config)
    return EXIT_PASS if cert.accepted else EXIT_FAIL


def cmd_coproduct(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    result = completions.coproduct_checks(
        model, args.radius, samples=args.samples, seed=config.seed,
        budget=config.budget)
    emit_report("coproduct", result, config)
    ok = result["coassociative"] and result["density"]["full_rank"]
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_growth(args, config: RunConfig) -> int:
    model = groups.model_from_name(args.group)
    c, counts = groups.growth_check(model, args.max_k)
    emit_report("growth", {
        "group": model.name, "max_k": args.max_k,
        "growth_constant": c, "sphere_counts": counts,
    }, config)
    return EXIT_PASS


def _load_system(path: str) -> dynamics.FiniteSystem:
    with open(path, encoding="utf-8") as fh:
        return dynamics.FiniteSystem.from_json(fh.read())


def cmd_dynamics(args, config: RunConfig) -> int:
    system = _load_system(args.system)
    op = args.op
    if op == "validate":
        emit_report("dynamics", {"op": op, "valid": True,
                                 "system": system.to_json()}, config)
        return EXIT_PASS
    if op == "cocycle":
        el = system.model.element(args.element or "a")
        rho = dynamics.radon_nikodym(system, el)
        emit_report("dynamics", {
            "op": op, "element": repr(el), "rho": list(rho)}, config)
        return EXIT_PASS
    if op == "covariant":
        dynamics.covariant_rep(system)  # construction verifies the axioms
        emit_report("dynamics", {"op": op, "verified": True}, config)
        return EXIT_PASS
    if op == "spectral-gap":
        rep = dynamics.covariant_rep(system)
        gap = dynamics.spectral_gap(rep, system.model.generators())
        emit_report("dynamics", {
            "op": op, "lambda_min": gap.lambda_min,
            "fixed_vector_exists": gap.has_fixed_vector,
        }, config)
        return EXIT_PASS
    if op == "dn-report":
        emit_report("dynamics", dynamics.dn_report(system), config)
        return EXIT_PASS
    raise ValueError(f"unknown dynamics op {op!r}")


def cmd_dn_report(args, config: RunConfig) -> int:
    system = _load_system(args.system)
    emit_report("dn-report", dynamics.dn_report(system), config)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idealcstar",
        description="Workbench for ideal completions of group algebras")
    parser.add_argument("--psd-tol", type=float, default=1e-8)
    parser.add_argument("--eig-tol", type=float, default=1e-8)
    parser.add_argument("--gap-tol", type=float, default=0.05)
    parser.add_argument("--budget", type=int, default=None,
                        help="element budget (default 2e6 or $IDEALCSTAR_BUDGET)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", type=str, default=None)
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"),
                        default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pd-check", help="positive-definiteness window check")
    p.add_argument("--group", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--radius", type=int, default=3)
    p.set_defaults(func=cmd_pd_check)

    p = sub.add_parser("cnd-check", help="conditionally-negative-type check")
    p.add_argument("--group", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--radius", type=int, default=3)
    p.set_defaults(func=cmd_cnd_check)

    p = sub.add_parser("ideal", help="certificate-driven ideal membership")
    p.add_argument("--group", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--ideal", required=True)
    p.set_defaults(func=cmd_ideal)

    p = sub.add_parser("lp-norm", help="l^p partial sum with tail bound")
    p.add_argument("--group", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--radius", type=int, default=10)
    p.set_defaults(func=cmd_lp_norm)

    p = sub.add_parser("gns", help="truncated GNS window with recovery check")
    p.add_argument("--group", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--pad", type=int, default=1)
    p.set_defaults(func=cmd_gns)

    p = sub.add_parser("norm-gap", help="full/reduced/D norm bracket report")
    p.add_argument("--group", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--gns-radius", type=int, default=4)
    p.add_argument("--ideal", default="c0")
    p.add_argument("--sweep", default=None, metavar="LO..HI",
                   help="also emit reduced-norm lower bounds over a radius range")
    p.set_defaults(func=cmd_norm_gap)

    p = sub.add_parser("certificate", help="equality certificate for a family")
    p.add_argument("--group", required=True)
    p.add_argument("--ideal", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--conv-radius", type=int, default=2)
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("coproduct", help="coproduct axioms: co-associativity, density")
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_coproduct)

    p = sub.add_parser("growth", help="sphere growth constant over a window")
    p.add_argument("--group", required=True)
    p.add_argument("--max-k", type=int, default=6)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("dynamics", help="finite-system operations")
    p.add_argument("--system", required=True)
    p.add_argument("--op", default="validate",
                   choices=("validate", "cocycle", "covariant",
                            "spectral-gap", "dn-report"))
    p.add_argument("--element", default=None)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("dn-report", help="Douglas-Nowak style system report")
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_dn_report)

    return parser


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    config = RunConfig(
        psd_tol=args.psd_tol, eig_tol=args.eig_tol, gap_tol=args.gap_tol,
        budget=args.budget if args.budget is not None else _default_budget(),
        seed=args.seed, output=args.output, fmt=args.fmt)
    try:
        config.validate()
        return args.func(args, config)
    except BudgetExceededError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (IdealCstarError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
