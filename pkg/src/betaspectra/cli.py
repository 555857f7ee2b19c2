"""Command-line driver for the spectral-measure laboratory.

Subcommands: sample, sumrule, rate, mc, moments, probe, stats. All inputs
and outputs use the JSON schemas of the owning modules; `mc` emits CSV by
default. Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .ensembles import (
    EnsembleSpec,
    Kind,
    RngStream,
    sample_hermite,
    sample_jacobi_kn,
    sample_laguerre,
    spectral_measure,
)
from .errors import (
    BetaSpectraError,
    DegenerateMeasureError,
    DomainError,
    InvalidMatrixError,
    NotPositiveDefiniteError,
    ParameterError,
    PoleError,
    RangeError,
)
from .jacobi import JacobiCoeffs, VerblunskyCoeffs
from .moments_opt import MomentConstraint, moment_opt_report
from .montecarlo import McExperiment, mc_tail_rate, stat_suite
from .rates import (
    BetaHVariant,
    hermite_rate,
    jacobi_ensemble_rate,
    laguerre_rate,
    rate_fg,
    rate_fj,
    rate_fl,
)
from .sumrule import (
    TailJacobiModel,
    conjecture_probe_jacobi,
    conjecture_probe_laguerre,
    sumrule_verify,
)

__all__ = ["main", "cli"]

VALIDATION_ERRORS = (ParameterError, RangeError, InvalidMatrixError, DomainError)
NUMERICAL_ERRORS = (NotPositiveDefiniteError, PoleError, DegenerateMeasureError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, indent=2))


def _resolve_seed(args) -> int:
    env = os.environ.get("SPECTRA_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _spec_from_args(args) -> EnsembleSpec:
    return EnsembleSpec(
        kind=Kind(args.ensemble),
        n=args.n,
        beta=args.beta,
        m=getattr(args, "m", None),
        tau=getattr(args, "tau", None),
        a=getattr(args, "a", None),
        b=getattr(args, "b", None),
        kappa1=getattr(args, "kappa1", None),
        kappa2=getattr(args, "kappa2", None),
        interval=getattr(args, "interval", "[-2,2]"),
    )


def _cmd_sample(args) -> int:
    spec = _spec_from_args(args)
    stream = RngStream(seed=_resolve_seed(args))
    out = {"spec": spec.to_json()}
    if spec.kind is Kind.HERMITE:
        coeffs = sample_hermite(spec, stream)
    elif spec.kind is Kind.LAGUERRE:
        draw = sample_laguerre(spec, stream)
        coeffs = draw.coeffs
        out["d"] = draw.d.tolist()
        out["s"] = draw.s.tolist()
    else:
        alpha, coeffs = sample_jacobi_kn(spec, stream)
        out["alpha"] = alpha.to_json()["alpha"]
    out["coeffs"] = coeffs.to_json()
    out["measure"] = spectral_measure(coeffs, spec.interval).to_json()
    _emit_json(args, out)
    return 0


def _cmd_sumrule(args) -> int:
    with open(args.model) as fh:
        model = TailJacobiModel.from_json(json.load(fh))
    report = sumrule_verify(model)
    if abs(report.gap) > args.tol * (1.0 + abs(report.jacobi_side)):
        _emit_json(args, report.to_json())
        return 2
    _emit_json(args, report.to_json())
    return 0


def _cmd_rate(args) -> int:
    fam = args.family
    if fam == "fg":
        _emit_json(args, {"value": rate_fg(args.x)})
        return 0
    if fam == "fl":
        _emit_json(args, {"value": rate_fl(args.x, args.tau)})
        return 0
    if fam == "fj":
        _emit_json(args, {"value": rate_fj(args.x, args.u_minus, args.u_plus)})
        return 0
    variant = BetaHVariant(args.variant)
    if fam == "hermite":
        coeffs = JacobiCoeffs(np.asarray(_float_list(args.b or "")),
                              np.asarray(_float_list(args.a or "")))
        report = hermite_rate(coeffs)
    elif fam == "laguerre":
        report = laguerre_rate(
            np.asarray(_float_list(args.d)), np.asarray(_float_list(args.s)), args.tau
        )
    elif fam == "jacobi":
        report = jacobi_ensemble_rate(
            VerblunskyCoeffs(np.asarray(_float_list(args.alpha))),
            args.kappa1 or 0.0, args.kappa2 or 0.0, variant,
        )
    else:
        raise ParameterError(f"unknown rate family {fam!r}")
    _emit_json(args, report.to_json())
    return 0


def _cmd_mc(args) -> int:
    if args.experiment:
        with open(args.experiment) as fh:
            exp = McExperiment.from_json(json.load(fh))
    else:
        spec = _spec_from_args(args)
        exp = McExperiment(
            spec=spec,
            x=args.x,
            n_list=tuple(int(v) for v in _float_list(args.n_list)),
            samples=args.samples,
            seed=_resolve_seed(args),
            direction=args.direction,
        )
    result = mc_tail_rate(exp, workers=args.workers)
    if args.format == "json":
        _emit_json(args, result.to_json())
    else:
        _emit(args, result.to_csv())
    for flag in result.flags:
        print(f"warning: {flag}", file=sys.stderr)
    return 0


def _cmd_moments(args) -> int:
    if args.constraint:
        with open(args.constraint) as fh:
            constraint = MomentConstraint.from_json(json.load(fh))
    else:
        constraint = MomentConstraint(np.asarray(_float_list(args.c)))
    report = moment_opt_report(constraint)
    _emit_json(args, report)
    if abs(report["primal"] - report["dual"]) > args.tol and not report["flags"]:
        return 2
    return 0


def _cmd_probe(args) -> int:
    if args.family == "laguerre":
        with open(args.model) as fh:
            model = TailJacobiModel.from_json(json.load(fh))
        report = conjecture_probe_laguerre(model, args.tau)
    else:
        alpha = np.asarray(_float_list(args.alpha)) if args.alpha else np.empty(0)
        report = conjecture_probe_jacobi(alpha, args.kappa1 or 0.0, args.kappa2 or 0.0)
    _emit_json(args, report.to_json())
    return 0


def _cmd_stats(args) -> int:
    spec = _spec_from_args(args)
    report = stat_suite(
        spec,
        seed=_resolve_seed(args),
        reps=args.reps,
        wrong_marginal=args.negative_control,
    )
    _emit_json(args, report.to_json())
    return 0


def _add_common(p, seed=True):
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--workers", type=int, default=1)
    if seed:
        p.add_argument("--seed", type=int, default=0)


def _add_ensemble_args(p):
    p.add_argument("--ensemble", required=True, choices=[k.value for k in Kind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--kappa1", type=float, default=None)
    p.add_argument("--kappa2", type=float, default=None)
    p.add_argument("--interval", choices=["[-2,2]", "[0,1]"], default="[-2,2]")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="betaspectra", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample")
    _add_ensemble_args(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("sumrule")
    p.add_argument("--model", required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_sumrule)

    p = sub.add_parser("rate")
    p.add_argument("--family", required=True,
                   choices=["fg", "fl", "fj", "hermite", "laguerre", "jacobi"])
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--u-minus", type=float, default=0.0)
    p.add_argument("--u-plus", type=float, default=1.0)
    p.add_argument("--b", default=None, help="comma-separated diagonal entries")
    p.add_argument("--a", default=None, help="comma-separated off-diagonal entries")
    p.add_argument("--d", default=None)
    p.add_argument("--s", default=None)
    p.add_argument("--alpha", default=None)
    p.add_argument("--kappa1", type=float, default=None)
    p.add_argument("--kappa2", type=float, default=None)
    p.add_argument("--variant", choices=["corrected", "paper_literal"], default="corrected")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("mc")
    p.add_argument("--experiment", default=None, help="experiment JSON file")
    p.add_argument("--ensemble", choices=[k.value for k in Kind], default="hermite")
    p.add_argument("--n", type=int, default=2)  # placeholder; sizes come from --n-list
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--kappa1", type=float, default=None)
    p.add_argument("--kappa2", type=float, default=None)
    p.add_argument("--interval", choices=["[-2,2]", "[0,1]"], default="[-2,2]")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--n-list", default="20,40,80")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--direction", choices=["max_above", "min_below"], default="max_above")
    _add_common(p)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("moments")
    p.add_argument("--constraint", default=None, help="constraint JSON file")
    p.add_argument("--c", default=None, help="comma-separated moments c_1..c_{2l-1}")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("probe")
    p.add_argument("--family", required=True, choices=["laguerre", "jacobi"])
    p.add_argument("--model", default=None)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--alpha", default=None)
    p.add_argument("--kappa1", type=float, default=None)
    p.add_argument("--kappa2", type=float, default=None)
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("stats")
    _add_ensemble_args(p)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--negative-control", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    return parser


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "mc" and args.format is None:
        args.format = "csv"
    elif args.format is None:
        args.format = "json"
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BetaSpectraError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(cli())
