"""``grenlab`` command line interface.

Exit codes: 0 success, 2 configuration error, 3 invalid model.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from .chernoff import ChernoffConfig, ChernoffEstimates, estimate_constants
from .exceptions import GrenlabError
from .harness import ExperimentConfig, run, write_records
from .isotonic import grenander_fit
from .limits import hellinger_limits
from .models import REGISTRY, SampleConfig, get_model, sample, truth_selfcheck

log = logging.getLogger("grenlab")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _id_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def cmd_chernoff(args) -> None:
    cfg = ChernoffConfig(
        delta=args.delta,
        trunc=args.trunc,
        a_max=args.amax,
        a_step=args.astep,
        replicates=args.reps,
        seed=args.seed,
    )
    est = estimate_constants(cfg, workers=args.workers)
    if not est.window_ok:
        log.warning("window too small: boundary-hit fraction %.2e", est.boundary_hit_fraction)
    est.save(args.out)
    log.info("m2 = %.6f (se %.2e), k2 = %.6f (se %.2e)", est.m2, est.m2_se, est.k2, est.k2_se)


def cmd_limits(args) -> None:
    model = get_model(args.model)
    truth_selfcheck(model)
    lc = hellinger_limits(model, ChernoffEstimates.load(args.constants))
    lc.save(args.out)


def cmd_fit(args) -> None:
    model = get_model(args.model)
    est = grenander_fit(sample(SampleConfig(model, args.n, args.seed)))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["left", "right", "level"])
        for lo, hi, lv in zip(est.breakpoints[:-1], est.breakpoints[1:], est.levels):
            w.writerow([repr(float(lo)), repr(float(hi)), repr(float(lv))])


def _experiment(args, kind: str, model_id: str, n_grid, models=(), constants=None) -> None:
    cfg = ExperimentConfig(
        model_id=model_id,
        n_grid=tuple(n_grid),
        replicates=args.reps,
        seed=args.seed,
        constants_path=constants,
        output=args.out,
        kind=kind,
        models=tuple(models),
    )
    result = run(cfg, workers=args.workers)
    side = write_records(result, args.out)
    log.info("wrote %s and %s", args.out, side)


def cmd_clt(args) -> None:
    _experiment(args, "clt", args.model, args.n_grid, constants=args.constants)


def cmd_lemmas(args) -> None:
    _experiment(args, "lemma-decay", args.model, args.n_grid)


def cmd_varconst(args) -> None:
    _experiment(args, "variance-constancy", args.models[0], [args.n], models=args.models, constants=args.constants)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grenlab", description="Grenander-type estimators and Hellinger-loss Monte Carlo experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    models = ", ".join(sorted(REGISTRY))

    def common(p, seed=True, out=True, workers=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if out:
            p.add_argument("--out", required=True, metavar="PATH")
        if workers:
            p.add_argument("--workers", type=int, default=None, help="worker processes (default: all CPUs)")

    p = sub.add_parser("chernoff", help="estimate E|X(0)|^2 and k2 by Monte Carlo")
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--trunc", type=float, default=2.5)
    p.add_argument("--amax", type=float, default=8.0)
    p.add_argument("--astep", type=float, default=0.1)
    p.add_argument("--reps", type=int, default=100_000)
    common(p)
    p.set_defaults(func=cmd_chernoff)

    p = sub.add_parser("limits", help="limit constants for one model")
    p.add_argument("--model", required=True, help=models)
    p.add_argument("--constants", required=True, metavar="PATH")
    common(p, seed=False, workers=False)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("fit", help="single Grenander-type fit (breakpoints and levels CSV)")
    p.add_argument("--model", required=True, help=models)
    p.add_argument("--n", type=int, required=True)
    common(p, workers=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("clt", help="CLT experiment for the Hellinger loss")
    p.add_argument("--model", required=True, help=models)
    p.add_argument("--n-grid", type=_int_list, required=True, metavar="N,N,...")
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--constants", required=True, metavar="PATH")
    common(p)
    p.set_defaults(func=cmd_clt)

    p = sub.add_parser("lemmas", help="decay of the cubic loss and of the Hellinger / weighted-L2 gap")
    p.add_argument("--model", required=True, help=models)
    p.add_argument("--n-grid", type=_int_list, required=True, metavar="N,N,...")
    p.add_argument("--reps", type=int, default=2000)
    common(p)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("varconst", help="variance of n^(1/3) H for two density models")
    p.add_argument("--models", type=_id_list, required=True, metavar="ID,ID")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--constants", default=None, metavar="PATH")
    common(p)
    p.set_defaults(func=cmd_varconst)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except GrenlabError as exc:
        print(f"grenlab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
