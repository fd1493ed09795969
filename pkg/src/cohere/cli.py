"""Command-line front end. JSON goes to stdout, diagnostics to stderr.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import measures, serialize, transforms
from .channels import schur_matrix
from .demos import DEMOS, run_demo
from .families import classification_report
from .numerics import Tolerance
from .states import DensityMatrix, PureState
from .structure import mixed_unitary_decompose

log = logging.getLogger("cohere")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CommandConfig:
    command: str
    tol: Tolerance = field(default_factory=Tolerance)
    seed: int = 0
    output: str | None = None


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return val


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $COHERE_SEED or 0)")
    p.add_argument("--eq-tol", type=_positive, default=None)
    p.add_argument("--psd-tol", type=_positive, default=None)
    p.add_argument("--opt-tol", type=_positive, default=None)
    p.add_argument("--output", "-o", default=None, help="write JSON here instead of stdout")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="cohere", description="Genuine and full incoherence toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a channel against every family")
    p.add_argument("--channel", required=True)
    p.add_argument("--h", type=float, nargs="+", default=None, help="Hamiltonian diagonal for TIO")

    p = sub.add_parser("measure", parents=[common], help="evaluate a coherence measure")
    p.add_argument("--state", required=True)
    p.add_argument("--measure", required=True, choices=sorted(measures.MEASURES))
    p.add_argument("--p", type=float, default=2.0, help="Schatten index for dephase/mindist")
    p.add_argument("--h", type=float, nargs="+", default=None, help="Hamiltonian diagonal for wy")

    p = sub.add_parser("convert", parents=[common], help="plan a state conversion")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--family", required=True, choices=["gio", "sgio", "fio"])
    p.add_argument("--stochastic", action="store_true")

    p = sub.add_parser("decompose", parents=[common], help="mixed-unitary decomposition of a GI map")
    p.add_argument("--channel", required=True)
    p.add_argument("--mixed-unitary", action="store_true", required=True)
    p.add_argument("--max-terms", type=int, default=9)
    p.add_argument("--restarts", type=int, default=20)

    p = sub.add_parser("demo", parents=[common], help="run a scripted check")
    p.add_argument("name", choices=sorted(DEMOS))
    return parser


def _config(args) -> CommandConfig:
    base = Tolerance()
    tol = Tolerance(
        eq=args.eq_tol or base.eq,
        psd=args.psd_tol or base.psd,
        opt=args.opt_tol or base.opt,
    )
    seed = args.seed
    if seed is None:
        env = os.environ.get("COHERE_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"COHERE_SEED must be an integer, got {env!r}") from None
    return CommandConfig(args.command, tol, seed, args.output)


def _load(path: str, kind: str, tol: Tolerance):
    try:
        obj = serialize.load_json(path)
    except FileNotFoundError:
        raise UsageError(f"{kind} file not found: {path}") from None
    except ValueError as exc:
        raise UsageError(f"{kind} file is not valid JSON: {path}: {exc}") from None
    try:
        if kind == "state":
            return serialize.state_from_json(obj, tol)
        return serialize.channel_from_json(obj, tol)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"invalid {kind} in {path}: {exc}") from None


def _convert(args, cfg: CommandConfig) -> dict:
    tol = cfg.tol
    src = _load(args.source, "state", tol)
    dst = _load(args.target, "state", tol)
    if src.dim != dst.dim:
        raise UsageError("source and target dimensions differ")
    src_pure, dst_pure = isinstance(src, PureState), isinstance(dst, PureState)
    family = args.family
    if family == "gio" and args.stochastic:
        family = "sgio"
    if family == "gio":
        if src_pure and dst_pure:
            plan = transforms.gio_pure_to_pure(src, dst, tol)
        elif src_pure:
            plan = transforms.gio_pure_to_mixed(src, dst, tol)
        elif dst_pure:
            plan = transforms.gio_mixed_to_pure(src, dst, tol)
        else:
            plan = transforms.gio_mixed_to_mixed(src, dst, tol)
    elif family == "sgio":
        if not dst_pure:
            raise UsageError("stochastic conversion needs a pure target")
        if src_pure:
            plan = transforms.sgio_optimal_probability(src, dst, tol)
        else:
            plan = transforms.gio_mixed_to_pure_stochastic(src, dst, tol)
    else:
        if src_pure and dst_pure:
            plan = transforms.fio_pure_to_pure(src, dst, tol)
        elif isinstance(dst, DensityMatrix) and np.allclose(dst.mat, np.eye(dst.dim) / dst.dim, atol=tol.eq):
            plan = transforms.fio_to_maximally_mixed(src, tol)
        elif src_pure and src.dim == 2:
            plan = transforms.fio_qubit_conversion(src, dst, tol)
        else:
            plan = transforms.TransformPlan(
                transforms.PlanVerdict.UNKNOWN, 0.0, None, "no FIO decision procedure for this input pair", "fio"
            )
    return serialize.plan_to_json(plan)


def _dispatch(args, cfg: CommandConfig) -> tuple[dict, int]:
    tol = cfg.tol
    if args.command == "classify":
        ch = _load(args.channel, "channel", tol)
        try:
            rep = classification_report(ch, args.h)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return rep.to_json(), EXIT_OK
    if args.command == "measure":
        rho = _load(args.state, "state", tol)
        try:
            res = measures.evaluate(args.measure, rho, args.p, args.h, tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if not res.converged:
            log.warning("minimization did not converge; value is an upper bound")
        return res.to_json(), EXIT_OK
    if args.command == "convert":
        return _convert(args, cfg), EXIT_OK
    if args.command == "decompose":
        ch = _load(args.channel, "channel", tol)
        if args.max_terms < 1 or args.restarts < 1:
            raise UsageError("--max-terms and --restarts must be >= 1")
        try:
            a = schur_matrix(ch)
            dec = mixed_unitary_decompose(ch, args.max_terms, args.restarts, cfg.seed, tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return serialize.decomposition_to_json(dec, a), EXIT_OK
    if args.command == "demo":
        res = run_demo(args.name, tol, cfg.seed)
        for name, ok in res.checks.items():
            log.info("%s %s", "PASS" if ok else "FAIL", name)
        return res.to_json(), EXIT_OK if res.passed else EXIT_VERIFY
    raise UsageError(f"unknown command {args.command}")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        payload, code = _dispatch(args, cfg)
    except UsageError as exc:
        print(f"cohere: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except transforms.VerificationError as exc:
        print(f"cohere: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    text = serialize.dumps(payload) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
