"""
Command-line front end.

Subcommands: solve, certify, construct, verify-converse, experiment, curve,
validate. Exit codes: 0 success or pass, 1 checked failure (certificate
fails, a guarantee is violated, a tie does not materialize), 2 usage or
I/O error.

Usage:
    python -m greedcert certify --theorem thm2 --k 3 --mu 0.2 --head 9,3,1
    python -m greedcert verify-converse --mode j --k 3 --j 2 --out report.json
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from greedcert import adversarial, config, experiments, fileio, store
from greedcert.certificates import THEOREM_IDS, SignalProfile, certify_all
from greedcert.errors import ConstructionFailed, GreedCertError
from greedcert.linalg import normalize_columns
from greedcert.solvers import SolverConfig, TiePolicy, Variant, coefficients, run_oxx

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def _float_list(text: str) -> List[float]:
    return [_finite_float(part) for part in text.split(",") if part.strip()]


def _emit_json(payload, out: Optional[str]) -> None:
    if out:
        fileio.write_json(out, payload)
    else:
        print(fileio.dumps(payload))


def _add_variant(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.OMP.value)


# ----------------------
# Subcommands
# ----------------------

def _add_solve(sub) -> None:
    parser = sub.add_parser("solve", help="run OMP/OLS and write the iteration trace")
    parser.add_argument("--dict", dest="dictionary", required=True, help="header-less CSV matrix")
    parser.add_argument("--y", required=True, help="data vector CSV")
    parser.add_argument("--k", type=int, required=True, help="number of iterations")
    _add_variant(parser)
    parser.add_argument("--tie-tol", type=_finite_float, default=config.TIE_TOL)
    parser.add_argument("--tie-policy", choices=[p.value for p in TiePolicy], default=TiePolicy.LOWEST_INDEX.value)
    parser.add_argument("--out", default=None)
    parser.set_defaults(handler=_run_solve)


def _run_solve(args: argparse.Namespace) -> int:
    d = normalize_columns(fileio.read_matrix_csv(args.dictionary))
    y = fileio.read_vector_csv(args.y)
    solver_config = SolverConfig(Variant(args.variant), args.k, args.tie_tol, TiePolicy(args.tie_policy))
    trace = run_oxx(d, y, solver_config)
    payload = trace.to_dict()
    payload["coherence"] = d.coherence
    payload["coefficients"] = coefficients(d, y, trace.final_active_set).tolist()
    _emit_json(payload, args.out)
    return EXIT_OK


def _add_certify(sub) -> None:
    parser = sub.add_parser("certify", help="evaluate recovery certificates for a signal profile")
    parser.add_argument("--theorem", choices=list(THEOREM_IDS) + ["all"], default="all")
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--mu", type=_finite_float, required=True)
    parser.add_argument("--head", type=_float_list, required=True, help="comma-separated magnitudes")
    parser.add_argument("--eps", type=_finite_float, default=0.0)
    parser.add_argument("--tail", type=_finite_float, default=0.0)
    parser.add_argument("--g", type=int, default=0)
    parser.add_argument("--p", type=int, default=None)
    parser.add_argument("--r", type=int, default=None)
    _add_variant(parser)
    parser.add_argument("--out", default=None)
    parser.set_defaults(handler=_run_certify)


def _run_certify(args: argparse.Namespace) -> int:
    profile = SignalProfile.from_values(args.head, k=args.k, tail_l1=args.tail,
                                        noise_budget=args.eps, selected_prefix=args.g)
    ids = THEOREM_IDS if args.theorem == "all" else (args.theorem,)
    report = certify_all(profile, args.mu, Variant(args.variant), p=args.p, r=args.r, theorem_ids=ids)
    _emit_json(report.to_dict(), args.out)
    if args.theorem == "all":
        return EXIT_OK
    return EXIT_OK if report.verdicts[args.theorem].passed else EXIT_CHECK_FAILED


def _add_construct(sub) -> None:
    parser = sub.add_parser("construct", help="write the adversarial dictionary (and x^(j))")
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--mu", type=_finite_float, required=True)
    parser.add_argument("--j", type=int, default=None)
    parser.add_argument("--slack", type=_finite_float, default=config.DEFAULT_SLACK)
    parser.add_argument("--out", required=True)
    parser.add_argument("--vec", default=None)
    parser.set_defaults(handler=_run_construct)


def _run_construct(args: argparse.Namespace) -> int:
    instance = adversarial.build_dictionary(args.k, args.mu)
    fileio.write_matrix_csv(args.out, instance.dictionary.atoms)
    if args.vec:
        if args.j is None:
            raise argparse.ArgumentTypeError("--vec needs --j")
        fileio.write_vector_csv(args.vec, adversarial.worst_case_vector(args.k, args.j, args.mu, args.slack))
    return EXIT_OK


def _add_verify_converse(sub) -> None:
    parser = sub.add_parser("verify-converse", help="replay the tightness constructions")
    parser.add_argument("--mode", choices=["k", "j"], required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--j", type=int, default=None)
    parser.add_argument("--slack", type=_finite_float, default=config.DEFAULT_SLACK)
    _add_variant(parser)
    parser.add_argument("--out", default=None)
    parser.set_defaults(handler=_run_verify_converse)


def _run_verify_converse(args: argparse.Namespace) -> int:
    variant = Variant(args.variant)
    try:
        if args.mode == "k":
            report = adversarial.demonstrate_converse_k(args.k, variant=variant)
        else:
            if args.j is None:
                raise argparse.ArgumentTypeError("--mode j needs --j")
            report = adversarial.demonstrate_converse_j(args.k, args.j, args.slack, variant)
    except ConstructionFailed as exc:
        logger.error("%s", exc)
        _emit_json(exc.report or {"verdict": "failed", "reason": str(exc)}, args.out)
        return EXIT_CHECK_FAILED
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK


def _add_experiment(sub) -> None:
    parser = sub.add_parser("experiment", help="probability of meeting the decay condition per family")
    parser.add_argument("--k", type=int, default=config.DEFAULT_K)
    parser.add_argument("--trials", type=int, default=config.DEFAULT_TRIALS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grid-points", type=int, default=config.DEFAULT_GRID_POINTS)
    parser.add_argument("--families", default=",".join(f.value for f in experiments.FAMILY_ORDER))
    parser.add_argument("--out", required=True)
    parser.add_argument("--manifest", default=None, help="defaults to the CSV path with a .json suffix")
    parser.add_argument("--store", nargs="?", const="", default=None,
                        help="also save the run to the SQLite store (optional path)")
    parser.set_defaults(handler=_run_experiment)


def _run_experiment(args: argparse.Namespace) -> int:
    specs = [experiments.DistributionSpec(experiments.Family(name.strip()))
             for name in args.families.split(",") if name.strip()]
    grid = experiments.default_grid(args.grid_points)
    result = experiments.run_experiment(args.k, grid, args.trials, args.seed, specs)
    experiments.emit_csv(result, args.out)
    manifest = experiments.build_manifest(args.k, grid, args.trials, args.seed, specs)
    experiments.write_manifest(manifest, args.manifest or Path(args.out).with_suffix(".json"))
    if args.store is not None:
        run_id = store.save_experiment(result, manifest, args.store or None)
        logger.info("saved as run %d", run_id)
    return EXIT_OK


def _add_curve(sub) -> None:
    parser = sub.add_parser("curve", help="decay factors per (mu, i)")
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--mu", type=_float_list, required=True, help="comma-separated coherences")
    parser.add_argument("--out", required=True)
    parser.set_defaults(handler=_run_curve)


def _run_curve(args: argparse.Namespace) -> int:
    frame = experiments.decay_constraint_curve(args.k, args.mu)
    frame.to_csv(args.out, index=False, lineterminator="\n")
    return EXIT_OK


def _add_validate(sub) -> None:
    parser = sub.add_parser("validate", help="replay certified random instances and count failures")
    parser.add_argument("--theorem", choices=experiments.GUARANTEE_IDS, required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--mu", type=_finite_float, required=True)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    _add_variant(parser)
    parser.add_argument("--dictionary", choices=["adversarial", "random"], default="adversarial")
    parser.add_argument("--eps", type=_finite_float, default=0.0)
    parser.add_argument("--tail", type=_finite_float, default=0.0)
    parser.add_argument("--p", type=int, default=None)
    parser.add_argument("--r", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.set_defaults(handler=_run_validate)


def _run_validate(args: argparse.Namespace) -> int:
    report = experiments.validate_guarantee(
        args.theorem, args.k, args.mu, args.trials, args.seed, Variant(args.variant),
        dictionary=args.dictionary, noise_budget=args.eps, tail_l1=args.tail, p=args.p, r=args.r,
    )
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedcert", description="OMP/OLS recovery certificates")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_solve, _add_certify, _add_construct, _add_verify_converse,
                _add_experiment, _add_curve, _add_validate):
        add(sub)
    return parser


def run_cli(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except (GreedCertError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"greedcert {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> int:
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
