"""
Command-line front end.

    weighted-chi2 coeffs --weights 2,1 --dof 2
    weighted-chi2 eval --spec spec.json --grid 0:30:301 --cdf --sf
    weighted-chi2 verify --weights 1,-1 --dof 2 --seed 42
    weighted-chi2 figure --pair 1,0.5 --pair 2,-1 --dof 50
    weighted-chi2 config --set samples=200000

Data goes to standard output (or --out); diagnostics go to standard error.
"""

import argparse
import json
import logging
import math
import re
import sys
from contextlib import contextmanager
from enum import IntEnum
from typing import List, Optional, Sequence, TextIO

import numpy as np

from . import __version__
from .config import get_config
from .distribution import cdf, evaluate_grid, sigma_grid
from .errors import (
    CoincidentPolesError,
    DomainError,
    OracleConvergenceError,
    SpecError,
    WeightedChi2Error,
)
from .model import WeightedSumSpec
from .oracles import RNG_NAME, SAMPLER_NAME, cf_inversion_cdf, monte_carlo_cdf_many, simulate
from .partial_fractions import expand
from .run_config import RunPreset, load_preset
from .utils import clamp_probability, format_float, parse_float_list, parse_grid, parse_int_list, write_csv

logger = logging.getLogger(__name__)

COEFF_HEADER = ("group_weight", "order", "index", "exponent", "coefficient")
VERIFY_HEADER = ("x", "analytic", "mc", "mc_se", "cf", "cf_bound", "status")
FIGURE_HEADER = ("lambda1", "lambda2", "n", "x", "cdf")


class ExitCode(IntEnum):
    OK = 0
    VERIFY_FAILED = 1
    INVALID_INPUT = 2
    ILL_CONDITIONED = 3


def configure_logging(verbosity: int = 0, log_file: Optional[str] = None) -> None:
    """WARNING by default, INFO with -v, DEBUG with -vv; --log-file always gets DEBUG."""
    package_logger = logging.getLogger("weighted_chi2")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG)
    console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(console)

    if log_file:
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        package_logger.addHandler(file_handler)

    package_logger.setLevel(logging.DEBUG if log_file else console.level)


@contextmanager
def _open_output(path: Optional[str]):
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def _first(*values):
    """First value that is not None."""
    return next(v for v in values if v is not None)


def _load_spec(args) -> WeightedSumSpec:
    if args.spec is not None:
        return WeightedSumSpec.from_json(args.spec)
    if args.dof is None:
        raise SpecError("--weights needs --dof")
    dofs = parse_int_list(args.dof)
    weights = parse_float_list(args.weights)
    return WeightedSumSpec.from_pairs(weights, dofs[0] if len(dofs) == 1 else dofs)


def _load_run_preset(args) -> RunPreset:
    return load_preset(_first(args.preset, get_config().preset))


def _merge_tol(args) -> float:
    return _first(args.merge_tol, get_config().merge_tol)


# --- commands --------------------------------------------------------------

def cmd_coeffs(args, out: TextIO) -> int:
    """Partial-fraction coefficients as CSV, then '# coeff_sum=<value>'."""
    spec = _load_spec(args)
    expansion = expand(spec, _merge_tol(args))
    if expansion.ill_conditioned and not args.force:
        logger.error("expansion is ill-conditioned; pass --force to print it anyway")
        return ExitCode.ILL_CONDITIONED

    # Exact zeros carry no component (e.g. the lower powers of a lone pole).
    rows = [row for row in expansion.rows() if row[4] != 0.0]
    write_csv(COEFF_HEADER, rows, out)
    print(f"# coeff_sum={format_float(expansion.coefficient_sum)}", file=out)
    return ExitCode.OK


def cmd_eval(args, out: TextIO) -> int:
    spec = _load_spec(args)
    if args.grid is not None:
        xs = parse_grid(args.grid)
    else:
        figure = _load_run_preset(args).figure
        xs = sigma_grid(spec, figure.span_sigmas, figure.points)

    want_pdf, want_cdf, want_sf = args.pdf, args.cdf, args.sf
    if not (want_pdf or want_cdf or want_sf):
        want_pdf = want_cdf = True

    expansion = expand(spec, _merge_tol(args))
    if expansion.ill_conditioned:
        logger.warning("values may carry conditioning error")
    table = evaluate_grid(spec, xs, want_pdf, want_cdf, want_sf, expansion=expansion)

    columns = [table.xs]
    if table.pdf is not None:
        columns.append(table.pdf)
    if table.cdf is not None:
        columns.append(tuple(clamp_probability(v) for v in table.cdf))
    if table.sf is not None:
        columns.append(tuple(clamp_probability(v) for v in table.sf))
    write_csv(table.columns(), zip(*columns), out)
    return ExitCode.OK


def _verify_grid(spec: WeightedSumSpec, levels: Sequence[float], samples: int, seed: int) -> List[float]:
    """Monte Carlo quantiles of the sum at the given levels."""
    draws = simulate(spec, samples, seed)
    return sorted({float(q) for q in np.quantile(draws, list(levels))})


def cmd_verify(args, out: TextIO) -> int:
    """
    Compare the analytic cdf with both oracles at each grid point.

    A point passes when
        |analytic - cf| <= cf_slack + cf bound, and
        |analytic - mc| <= mc_sigmas * standard error + 1 / samples.
    """
    spec = _load_spec(args)
    settings = get_config()
    verify = _load_run_preset(args).verify
    samples = _first(args.samples, verify.samples, settings.samples)
    seed = _first(args.seed, verify.seed, settings.seed)
    abs_tol = _first(args.tol, verify.abs_tol, settings.abs_tol)

    expansion = expand(spec, _merge_tol(args))
    if args.perturb:
        expansion = expansion.perturbed(args.perturb)
        logger.info("first coefficient perturbed by a relative %g", args.perturb)

    xs = parse_grid(args.grid) if args.grid is not None else _verify_grid(spec, verify.quantile_levels, samples, seed)
    mc_estimates = monte_carlo_cdf_many(spec, xs, samples, seed)

    rows = []
    all_pass = True
    for x, mc in zip(xs, mc_estimates):
        analytic = cdf(spec, x, expansion)
        try:
            cf = cf_inversion_cdf(spec, x, abs_tol)
            cf_value, cf_bound = cf.value, cf.error_bound
            cf_ok = abs(analytic - cf_value) <= verify.cf_slack + cf_bound
        except OracleConvergenceError as e:
            logger.warning("inversion oracle failed at x=%g: %s", x, e)
            cf_value, cf_bound, cf_ok = math.nan, math.nan, False
        mc_ok = abs(analytic - mc.value) <= verify.mc_sigmas * mc.error_bound + 1.0 / samples
        status = "PASS" if cf_ok and mc_ok else "FAIL"
        if status == "FAIL":
            all_pass = False
            logger.warning(
                "x=%g: analytic %.10g, monte carlo %.10g +/- %.2g, inversion %.10g +/- %.2g",
                x, analytic, mc.value, mc.error_bound, cf_value, cf_bound,
            )
        rows.append((x, analytic, mc.value, mc.error_bound, cf_value, cf_bound, status))

    precision = "double" if expansion.working_dps is None else f"mpmath:{expansion.working_dps}"
    print(f"# rng={RNG_NAME} sampler={SAMPLER_NAME} samples={samples} seed={seed}", file=out)
    print(f"# abs_tol={format_float(abs_tol)} precision={precision}", file=out)
    write_csv(VERIFY_HEADER, rows, out)
    print(f"# result={'PASS' if all_pass else 'FAIL'}", file=out)
    return ExitCode.OK if all_pass else ExitCode.VERIFY_FAILED


def _parse_pair(text: str):
    values = parse_float_list(text)
    if len(values) != 2:
        raise SpecError(f"--pair takes two weights like 1,-0.5, got {text!r}")
    return values[0], values[1]


def cmd_figure(args, out: TextIO) -> int:
    """Long-format cdf curves over mean +/- span_sigmas * sd, one per weight pair."""
    figure = _load_run_preset(args).figure
    dof = _first(args.dof, figure.dof)
    pairs = [_parse_pair(p) for p in args.pair] if args.pair else list(figure.pairs)
    points = _first(args.points, figure.points)
    merge_tol = _merge_tol(args)

    rows = []
    for lambda1, lambda2 in pairs:
        spec = WeightedSumSpec.from_pairs([lambda1, lambda2], dof)
        expansion = expand(spec, merge_tol)
        logger.info("curve (%g, %g), n=%d", lambda1, lambda2, dof)
        for x in sigma_grid(spec, figure.span_sigmas, points):
            rows.append((lambda1, lambda2, dof, x, clamp_probability(cdf(spec, x, expansion))))
    write_csv(FIGURE_HEADER, rows, out)
    return ExitCode.OK


def cmd_config(args, out: TextIO) -> int:
    settings = get_config()
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise SpecError(f"--set takes key=value, got {item!r}")
        try:
            settings.set(key.strip(), value.strip())
        except (KeyError, ValueError) as e:
            raise SpecError(str(e)) from e
    if args.show or not args.set:
        print(json.dumps(settings.as_dict(), indent=2), file=out)
    return ExitCode.OK


# --- parser ----------------------------------------------------------------

def _add_spec_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--weights", help="comma-separated nonzero weights, e.g. 2,1")
    source.add_argument("--spec", help='JSON file {"terms": [{"weight": w, "dof": n}, ...]}')
    parser.add_argument("--dof", help="common even dof, or one per weight (n1,n2,...)")
    parser.add_argument("--merge-tol", type=float, help="relative tolerance for merging equal weights")


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write data here instead of standard output")
    parser.add_argument("--preset", help="built-in preset name or YAML path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weighted-chi2",
        description="Exact distribution of a weighted sum of chi-squared variables",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug")
    parser.add_argument("--log-file", help="also write debug records to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="partial-fraction coefficients")
    _add_spec_options(p)
    _add_common_options(p)
    p.add_argument("--force", action="store_true", help="print ill-conditioned expansions too")
    p.set_defaults(handler=cmd_coeffs)

    p = sub.add_parser("eval", help="pdf / cdf / sf table")
    _add_spec_options(p)
    _add_common_options(p)
    p.add_argument("--grid", help="min:max:points (default: mean +/- 6 sd)")
    p.add_argument("--pdf", action="store_true", help="include the pdf column")
    p.add_argument("--cdf", action="store_true", help="include the cdf column")
    p.add_argument("--sf", action="store_true", help="include the survival-function column")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("verify", help="check the analytic cdf against both oracles")
    _add_spec_options(p)
    _add_common_options(p)
    p.add_argument("--grid", help="min:max:points (default: Monte Carlo quantiles)")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--tol", type=float, help="inversion oracle absolute tolerance")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("figure", help="cdf curves for pairs of weights")
    _add_common_options(p)
    p.add_argument("--pair", action="append", help="L1,L2 (repeatable)")
    p.add_argument("--dof", type=int, help="common dof of both terms")
    p.add_argument("--points", type=int, help="grid points per curve")
    p.add_argument("--merge-tol", type=float, help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_figure)

    p = sub.add_parser("config", help="show or change saved defaults")
    p.add_argument("--show", action="store_true", help="print the settings")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="change a setting (repeatable)")
    p.add_argument("--out", help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_config)
    return parser


# a value such as -1,2 or -7.5:20:56 that argparse would take for an option
_NEGATIVE_VALUE = re.compile(r"-[\d.]")


def _value_options(parser: argparse.ArgumentParser) -> set:
    """Option strings, across all subcommands, that take a value."""
    options = set()
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for subparser in action.choices.values():
                options |= _value_options(subparser)
        elif action.option_strings and action.nargs != 0:
            options.update(action.option_strings)
    return options


def _attach_negative_values(argv: Sequence[str], value_options: set) -> List[str]:
    """Rewrite `--opt -value` as `--opt=-value` for options that take a value."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in value_options and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the console script."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_attach_negative_values(argv, _value_options(parser)))
    configure_logging(args.verbose, args.log_file)
    try:
        with _open_output(args.out) as out:
            return int(args.handler(args, out))
    except (SpecError, DomainError, CoincidentPolesError) as e:
        logger.error("%s", e)
        return ExitCode.INVALID_INPUT
    except OSError as e:
        logger.error("cannot read or write %s: %s", e.filename or "file", e.strerror or e)
        return ExitCode.INVALID_INPUT
    except WeightedChi2Error as e:
        # overflow or non-convergence: the numbers cannot be trusted
        logger.error("numerical failure: %s", e)
        return ExitCode.ILL_CONDITIONED


if __name__ == "__main__":
    sys.exit(main())
