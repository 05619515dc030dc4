"""Command-line front end.

Exit status: 0 on success, 1 when a computation fails, 2 on bad arguments.
Reports go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import sys

from .constants import ConstantsError, load_constants, make_atom
from .extraction import ExtractionError, ExtractionInput, plan_precision, propagate_monte_carlo
from .formfactors import Dipole, FormFactorError, RatioHybrid, bundled_models, load_model
from .hfs import POL_PRESETS, BudgetError, CorrectionTerm, TermName, assemble_budget, default_corrections
from .quadrature import QuadratureError
from .report import (budget_report, extraction_report, models_report, plan_report,
                     render_csv, render_table, to_json, zemach_report)
from .units import Measurement, Unit
from .zemach import (DEFAULT_TOL, zemach_radius_coordinate, zemach_radius_dipole_analytic,
                     zemach_radius_momentum)

ATOMS = ("hydrogen", "muonic-hydrogen")


class _ComputationFailure(Exception):
    def __init__(self, operation: str, exc: Exception):
        super().__init__(f"{operation}: {exc}")


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value >= 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be finite and >= 0, got {text}")
    return value


def _override(text: str) -> CorrectionTerm:
    """NAME=VALUE[:UNCERTAINTY], e.g. pol=1.6e-6:0.6e-6."""
    try:
        name, rest = text.split("=", 1)
        value, _, unc = rest.partition(":")
        term = CorrectionTerm.user(name.strip(), float(value), float(unc) if unc else 0.0)
    except (ValueError, BudgetError) as exc:
        raise argparse.ArgumentTypeError(f"bad override {text!r} ({exc}); "
                                         "expected NAME=VALUE[:UNCERTAINTY]") from None
    return term


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--constants", default=None,
                        help="bundled set name or JSON file (default: $HFSZEMACH_CONSTANTS or codata-pinned)")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help="relative quadrature tolerance (default 1e-10)")

    parser = argparse.ArgumentParser(prog="hfszemach", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", parents=[common], help="hyperfine splitting budget")
    p.add_argument("--atom", choices=ATOMS, default="hydrogen")
    p.add_argument("--rp-fm", type=_nonnegative_float, default=None,
                   help="Zemach radius in fm (default: from --model, else 1.04)")
    p.add_argument("--rp-uncertainty-fm", type=_nonnegative_float, default=0.0)
    p.add_argument("--model", default=None, help="compute R_p from this form-factor model")
    p.add_argument("--override", type=_override, action="append", default=[],
                   metavar="NAME=VALUE[:UNC]")
    p.add_argument("--pol-preset", choices=sorted(POL_PRESETS), default="standard",
                   help="hydrogen polarizability default: 1.6(6) ppm (standard) or 1.4(6) ppm (low)")
    p.add_argument("--linear", action="store_true",
                   help="add uncertainties linearly (worst case) instead of in quadrature")

    p = sub.add_parser("zemach", parents=[common], help="Zemach radius from form-factor models")
    p.add_argument("--model", default="dipole", help="model name, JSON path, or 'all'")
    p.add_argument("--lambda2", type=_positive_float, default=None,
                   help="dipole scale in GeV^2 (implies --model dipole)")
    p.add_argument("--coordinate", action="store_true",
                   help="also evaluate the coordinate-space oracle where available")

    p = sub.add_parser("extract", parents=[common], help="Zemach radius from a measured HFS")
    p.add_argument("--atom", choices=ATOMS, default="hydrogen")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exp-hfs-hz", type=_positive_float)
    g.add_argument("--exp-hfs-mev", type=_positive_float, help="measured splitting in meV")
    p.add_argument("--exp-uncertainty", type=_nonnegative_float, default=None,
                   help="one sigma, in the unit of the value flag (default 0.0009 Hz / 0)")
    p.add_argument("--override", type=_override, action="append", default=[],
                   metavar="NAME=VALUE[:UNC]")
    p.add_argument("--pol-preset", choices=sorted(POL_PRESETS), default="standard",
                   help="hydrogen polarizability default: 1.6(6) ppm (standard) or 1.4(6) ppm (low)")
    p.add_argument("--mc-samples", type=int, default=0, help="Monte Carlo samples (0 = off)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples-csv", default=None, help="write Monte Carlo draws to this CSV file")

    p = sub.add_parser("plan", parents=[common], help="required experimental precision")
    p.add_argument("--atom", choices=ATOMS, default="muonic-hydrogen")
    p.add_argument("--target", type=_positive_float, required=True,
                   help="target relative R_p uncertainty (e.g. 0.005)")
    p.add_argument("--pol-uncertainty", type=_nonnegative_float, required=True)
    p.add_argument("--rp-fm", type=_positive_float, default=1.04)

    sub.add_parser("models", parents=[common], help="list bundled form-factor models")
    return parser


def _resolve_model(parser, ref):
    try:
        return load_model(ref)
    except FormFactorError as exc:
        parser.error(str(exc))


def _write_samples(path, draws):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample", "radius_fm"])
            w.writerows((i, repr(float(x))) for i, x in enumerate(draws))
    except OSError as exc:
        raise _ComputationFailure("write samples", exc)


def _run(args, parser) -> dict:
    if args.command == "models":
        return models_report(bundled_models())
    try:
        constants = load_constants(args.constants)
    except ConstantsError as exc:
        raise _ComputationFailure("load_constants", exc)

    if args.command == "zemach":
        if args.lambda2 is not None:
            models = [Dipole(args.lambda2)]
        elif args.model == "all":
            models = list(bundled_models().values())
        else:
            models = [_resolve_model(parser, args.model)]
        results = []
        for model in models:
            item = {"model": model}
            try:
                item["momentum"] = zemach_radius_momentum(model, constants, args.tol)
                if args.coordinate and not isinstance(model, RatioHybrid):
                    item["coordinate"] = zemach_radius_coordinate(model, constants, max(args.tol, 1e-9))
            except (QuadratureError, FormFactorError) as exc:
                raise _ComputationFailure(f"zemach radius ({model.name})", exc)
            if isinstance(model, Dipole):
                item["analytic"] = zemach_radius_dipole_analytic(model.lambda2, constants)
            results.append(item)
        return zemach_report(results, constants)

    atom = make_atom(constants, args.atom)
    overrides = list(getattr(args, "override", []))
    if getattr(args, "pol_preset", "standard") != "standard" and all(t.name is not TermName.POL for t in overrides):
        overrides += [t for t in default_corrections(atom, args.pol_preset) if t.name is TermName.POL]

    if args.command == "budget":
        model = None
        if args.rp_fm is not None:
            radius = Measurement(args.rp_fm, args.rp_uncertainty_fm, Unit.FM)
        elif args.model is not None:
            model = _resolve_model(parser, args.model)
            try:
                radius = zemach_radius_momentum(model, constants, args.tol).radius
            except (QuadratureError, FormFactorError) as exc:
                raise _ComputationFailure(f"zemach radius ({model.name})", exc)
        else:
            radius = Measurement(1.04, args.rp_uncertainty_fm, Unit.FM)
        try:
            budget = assemble_budget(atom, radius, overrides, constants,
                                     combination="linear" if args.linear else "quadrature")
        except (BudgetError, ValueError) as exc:
            raise _ComputationFailure("assemble_budget", exc)
        return budget_report(budget, radius, constants, model)

    if args.command == "extract":
        if args.exp_hfs_hz is not None:
            default_unc = 0.0009 if args.atom == "hydrogen" else 0.0
            exp = Measurement(args.exp_hfs_hz, args.exp_uncertainty if args.exp_uncertainty is not None
                              else default_unc, Unit.HZ)
        else:
            exp = Measurement(args.exp_hfs_mev, args.exp_uncertainty or 0.0, Unit.MILLI_EV)
        try:
            inp = ExtractionInput.with_defaults(atom, exp, constants, overrides)
        except ValueError as exc:
            parser.error(str(exc))
        try:
            mc = None
            settings = None
            if args.mc_samples:
                mc = propagate_monte_carlo(inp, args.mc_samples, args.seed,
                                           keep_samples=bool(args.samples_csv))
                settings = {"samples": args.mc_samples, "seed": args.seed}
                if args.samples_csv:
                    _write_samples(args.samples_csv, mc.samples)
            return extraction_report(inp, mc, settings)
        except ExtractionError as exc:
            detail = ", ".join(f"{k}={v:.6g}" for k, v in exc.decomposition.items())
            raise _ComputationFailure("extract_zemach_radius", f"{exc} [{detail}]")
        except ValueError as exc:
            raise _ComputationFailure("propagate_monte_carlo", exc)

    if args.command == "plan":
        radius = Measurement(args.rp_fm, 0.0, Unit.FM)
        plan = plan_precision(atom, args.target, args.pol_uncertainty, constants, radius)
        return plan_report(plan, atom, constants, radius)

    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    names = [t.name for t in getattr(args, "override", [])]
    if len(set(names)) != len(names):
        parser.error("each correction may be overridden at most once")
    if args.command == "extract" and args.mc_samples and args.mc_samples < 1000:
        parser.error("--mc-samples must be 0 or >= 1000")
    try:
        report = _run(args, parser)
    except _ComputationFailure as exc:
        print(f"hfszemach: error in {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        sys.stdout.write(to_json(report))
    elif args.format == "csv":
        sys.stdout.write(render_csv(report))
    else:
        sys.stdout.write(render_table(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
