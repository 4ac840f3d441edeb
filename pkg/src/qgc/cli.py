"""``qgc`` command-line interface.

Exit codes: 0 analysis completed, 2 malformed input, 3 semantically invalid input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .accessibility import (
    accessibility_distribution,
    algebraic_rank_condition,
    corollary_check,
    rank_condition,
)
from .dynamics import flow_deviation, propagate_state_stepped
from .geometry import GeometryContext, basis_state, mc_expectation
from .io import (
    InvalidInputError,
    MalformedInputError,
    dump_json,
    encode_matrix,
    file_digest,
    load_mixed_state,
    load_operator,
    load_pure_state,
    load_schedule,
    load_system,
    trajectory_to_dict,
)
from .lie import analyze, lie_closure
from .operators import Tolerances

EXIT_OK, EXIT_MALFORMED, EXIT_INVALID = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def _positive_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive finite number: {s!r}")
    return v


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {s!r}")
    return v


def _seed(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative: {s!r}")
    return v


def _header(command: str) -> dict:
    return {"tool": "qgc", "version": __version__, "command": command}


def _tolerances(args) -> Tolerances:
    return Tolerances(rank_tol=args.tol) if getattr(args, "tol", None) else Tolerances()


def _tol_dict(tol: Tolerances) -> dict:
    return {"herm_tol": tol.herm_tol, "rank_tol": tol.rank_tol, "ode_tol": tol.ode_tol}


def _write(text: str, out=None):
    (out or sys.stdout).write(text)


def cmd_analyze(args) -> int:
    tol = _tolerances(args)
    system, raw = load_system(args.system, tol)
    n = system.n
    ctx = GeometryContext(n, args.kappa, tol)
    probe = load_pure_state(args.probe) if args.probe else basis_state(n)
    if probe.n != n:
        raise InvalidInputError(f"probe state has dimension {probe.n}, system has {n}")
    report = analyze(system, probe, ctx, tol)
    L = lie_closure(system.generators(), tol)
    rc = rank_condition(L, args.samples, args.seed, tol)
    corollary = corollary_check(L, trials=min(args.samples, 8), seed=args.seed, tol=tol)
    diagnostics = list(report.diagnostics)
    if rc.holds != rc.algebraic_holds:
        diagnostics.append("sampled rank condition disagrees with the algebraic test")
    doc = _header("analyze") | {
        "input_digest": file_digest(raw),
        "geometry": {"n": n, "kappa": ctx.kappa, "kappa_prime": ctx.kappa_prime},
        "tolerances": _tol_dict(tol),
        "probe_state": encode_matrix(probe.projector),
        "controllability": report.to_dict(),
        "accessibility": {
            "holds": rc.holds,
            "algebraic_holds": rc.algebraic_holds,
            "min_rank": rc.min_rank,
            "full_rank": 2 * n - 2,
            "ranks": list(rc.ranks),
            "samples": args.samples,
            "seed": args.seed,
            "witness": None if rc.witness is None else encode_matrix(rc.witness.projector),
        },
        "corollary_holds": corollary,
        "diagnostics": diagnostics,
    }
    if args.format == "json":
        _write(dump_json(doc))
    else:
        _write(_analyze_text(doc))
    return EXIT_OK


def _yes(b: bool) -> str:
    return "yes" if b else "no"


def _analyze_text(doc: dict) -> str:
    c = doc["controllability"]
    a = doc["accessibility"]
    n = c["n"]
    lines = [
        f"qgc {doc['version']}  input {doc['input_digest']}",
        f"n = {n}, kappa = {doc['geometry']['kappa']:g}, dim L = {c['dim_L']}",
        f"operator controllable:   {_yes(c['operator_controllable'])}"
        f"   [L = u(n), i.e. dim L == n^2 = {n * n}]",
        f"pure-state controllable: {_yes(c['pure_state_controllable'])}"
        f"   [dim L - dim(L ∩ c_P) = {c['dim_L'] - c['dim_centralizer_intersection']}"
        f" vs 2n-2 = {2 * n - 2}]",
        f"Killing-field criterion: {_yes(c['killing_pure_state_controllable'])}"
        f"   [dim phi(L) - dim phi(L ∩ c_P) = {c['killing_criterion_value']}]",
        f"rank condition:          {_yes(a['holds'])}"
        f"   [min dim C(p) = {a['min_rank']} over {len(a['ranks'])} points;"
        f" algebraic L + span{{iI}} = u(n): {_yes(a['algebraic_holds'])}]",
        f"accessibility = Kill:    {_yes(doc['corollary_holds'])}"
        f"   [dim phi(L) == n^2 - 1]",
    ]
    lines += [f"note: {d}" for d in doc["diagnostics"]]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    tol = Tolerances()
    system, raw = load_system(args.system, tol)
    sched = load_schedule(args.schedule)
    try:
        sched.check_against(system)
    except ValueError as exc:
        raise MalformedInputError(str(exc)) from None
    if not sched.segments:
        raise MalformedInputError("schedule has no segments")
    p0 = load_pure_state(args.initial) if args.initial else basis_state(system.n)
    if p0.n != system.n:
        raise InvalidInputError(f"initial state has dimension {p0.n}, system has {system.n}")
    shortest = min(s.duration for s in sched.segments)
    if args.compare_flows and args.dt > shortest * (1 + 1e-12):
        raise MalformedInputError(
            f"--dt {args.dt:g} exceeds the shortest segment duration {shortest:g}"
        )
    traj = propagate_state_stepped(system, p0, sched, args.dt)
    doc = _header("simulate") | {"input_digest": file_digest(raw)} | trajectory_to_dict(traj)
    summary = {"output": str(args.output), "points": len(traj)}
    if args.compare_flows:
        dev = flow_deviation(system, p0, sched, args.dt)
        doc["flow_comparison"] = {
            "step": args.dt,
            "max_deviation": dev,
            "ode_tol": tol.ode_tol,
            "within_tol": dev <= tol.ode_tol,
        }
        summary["flow_comparison"] = doc["flow_comparison"]
    try:
        Path(args.output).write_text(dump_json(doc))
    except OSError as exc:
        raise MalformedInputError(f"cannot write {args.output}: {exc.strerror}") from None
    _write(dump_json(_header("simulate") | summary))
    return EXIT_OK


def cmd_expectation(args) -> int:
    a = load_operator(args.observable)
    sigma = load_mixed_state(args.state)
    if a.shape != sigma.density.shape:
        raise MalformedInputError(
            f"observable is {a.shape[0]}x{a.shape[0]} but state is {sigma.n}x{sigma.n}"
        )
    n = a.shape[0]
    if n < 2:
        raise InvalidInputError("phase-space integration needs dimension >= 2")
    ctx = GeometryContext(n, args.kappa)
    exact = float(np.trace(a @ sigma.density).real)
    est, se = mc_expectation(a, sigma, ctx, args.mc_samples, args.seed)
    gap = abs(est - exact)
    passed = gap <= 4 * se or gap <= 1e-12 * max(1.0, abs(exact))
    doc = _header("expectation") | {
        "n": n,
        "kappa": ctx.kappa,
        "trace_value": exact,
        "mc_estimate": est,
        "std_error": se,
        "samples": args.mc_samples,
        "seed": args.seed,
        "within_4_std_errors": passed,
    }
    _write(dump_json(doc))
    return EXIT_OK


def cmd_rank(args) -> int:
    tol = Tolerances()
    system, raw = load_system(args.system, tol)
    n = system.n
    L = lie_closure(system.generators(), tol)
    doc = _header("rank") | {"input_digest": file_digest(raw), "n": n, "full_rank": 2 * n - 2}
    if args.state:
        p = load_pure_state(args.state)
        if p.n != n:
            raise InvalidInputError(f"state has dimension {p.n}, system has {n}")
        r = accessibility_distribution(L, p, tol).rank
        doc |= {"mode": "single", "rank": r, "full": r == 2 * n - 2}
    else:
        rc = rank_condition(L, args.points, args.seed, tol)
        doc |= {
            "mode": "sampled",
            "points": args.points,
            "seed": args.seed,
            "ranks": list(rc.ranks),
            "min_rank": rc.min_rank,
            "holds": rc.holds,
            "witness": None if rc.witness is None else encode_matrix(rc.witness.projector),
        }
    doc["algebraic_holds"] = algebraic_rank_condition(L, tol)
    _write(dump_json(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qgc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qgc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="controllability report for a system file")
    p.add_argument("system")
    p.add_argument("--kappa", type=_positive_float, default=1.0)
    p.add_argument("--tol", type=_positive_float, default=None, help="relative rank cutoff")
    p.add_argument("--samples", type=_positive_int, default=32)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--probe", default=None, help="pure-state file for the probe P")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="propagate a pure state under a schedule")
    p.add_argument("system")
    p.add_argument("--schedule", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--dt", type=_positive_float, default=1e-3)
    p.add_argument("--initial", default=None, help="initial pure-state file (default |0><0|)")
    p.add_argument("--compare-flows", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("expectation", help="phase-space Monte-Carlo expectation value")
    p.add_argument("--observable", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--kappa", type=_positive_float, default=1.0)
    p.add_argument("--mc-samples", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_expectation)

    p = sub.add_parser("rank", help="accessibility-distribution ranks")
    p.add_argument("system")
    p.add_argument("--points", type=_positive_int, default=32)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--state", default=None, help="evaluate at this pure state only")
    p.set_defaults(func=cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MalformedInputError as exc:
        print(f"qgc: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except InvalidInputError as exc:
        print(f"qgc: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
