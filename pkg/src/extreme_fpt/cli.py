"""Command-line interface emitting CSV (plus one text command).

Subcommands: rescale, stats, density, error-table, sample, regime.
Flags override an optional JSON config file (--config), which overrides the
defaults L = D = 1.  Every CSV starts with a provenance comment line
``# extreme-fpt <version> <argv>`` and a header row; reruns with identical
flags are byte-identical.

Exit codes: 0 success, 1 success with infinite-moment sentinel rows,
2 usage error, 3 domain or solver error.
"""

import argparse
import dataclasses
import json
import math
import sys
from decimal import Decimal, InvalidOperation

from . import __version__, evt_core, exact, mc, models
from .errors import (
    DomainError,
    InfiniteMomentError,
    RescalingUndefinedError,
    SolverError,
    ValidationError,
)

_DEFAULTS = {
    "model": "point1d",
    "L": 1.0,
    "D": 1.0,
    "variant": "lambertw",
    "k": 1,
    "m": 1.0,
    "seed": 0,
    "replicates": 10000,
    "workers": 1,
}

_VARIANTS = ("lambertw", "elementary", "numeric")


def _parse_exact_int(text):
    """Integer, allowing scientific notation with an integral mantissa."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"N must be an integer, got {text!r}")
    return int(value)


def _parse_int_list(text):
    return [_parse_exact_int(part) for part in text.split(",") if part]


def _parse_variant_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if part not in _VARIANTS:
            raise argparse.ArgumentTypeError(
                f"variant must be one of {', '.join(_VARIANTS)}; got {part!r}")
        out.append(part)
    return out


def _parse_tail(text):
    if text == "exponential":
        return models.TailClass.exponential()
    if text.startswith("power:"):
        try:
            return models.TailClass.power(float(text.split(":", 1)[1]))
        except (ValueError, ValidationError):
            pass
    raise argparse.ArgumentTypeError(
        f"tail must be 'exponential' or 'power:ALPHA', got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="extreme-fpt",
        description="Extreme first-passage-time statistics from short-time "
                    "survival behavior.")
    parser.add_argument("--config", help="JSON file with default option values")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=["point1d", "robin1d", "sphere3d", "tabulated"])
    common.add_argument("--L", type=float)
    common.add_argument("--D", type=float)
    common.add_argument("--kappa", type=float)
    common.add_argument("--table", help="CSV of t,S rows for --model tabulated")
    common.add_argument("--A", type=float, help="short-time prefactor override")
    common.add_argument("--p", type=float, help="short-time power override")
    common.add_argument("--C", type=float, help="short-time rate override")
    common.add_argument("--tail", type=_parse_tail,
                        help="tail class for tabulated models: exponential | power:ALPHA")
    common.add_argument("--out", help="output path (default: stdout)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rescale", parents=[common],
                       help="normalizing sequences a_N, b_N")
    p.add_argument("--N", type=_parse_int_list, required=True)
    p.add_argument("--variant", type=_parse_variant_list)

    p = sub.add_parser("stats", parents=[common],
                       help="approximate and exact mean/variance of T_(k,N)")
    p.add_argument("--N", type=_parse_int_list, required=True)
    p.add_argument("--k", type=_parse_int_list)
    p.add_argument("--variant", type=_parse_variant_list)
    p.add_argument("--no-exact", action="store_true",
                   help="skip quadrature; exact columns stay empty")

    p = sub.add_parser("density", parents=[common],
                       help="rescaled density of T_N against the Gumbel limit")
    p.add_argument("--N", type=_parse_exact_int, required=True)
    p.add_argument("--variant", type=_parse_variant_list)

    p = sub.add_parser("error-table", parents=[common],
                       help="relative errors of the three mean approximants")
    p.add_argument("--N", type=_parse_int_list, required=True)
    p.add_argument("--k", type=_parse_exact_int)

    p = sub.add_parser("sample", parents=[common],
                       help="Monte Carlo order statistics, one row per replicate")
    p.add_argument("--N", type=_parse_exact_int, required=True)
    p.add_argument("--k", type=_parse_exact_int)
    p.add_argument("--replicates", type=_parse_exact_int)
    p.add_argument("--seed", type=_parse_exact_int)
    p.add_argument("--workers", type=_parse_exact_int)

    p = sub.add_parser("regime", parents=[common],
                       help="is N large enough for the short-time regime?")
    p.add_argument("--N", type=_parse_exact_int, required=True)

    return parser


class _UsageError(Exception):
    pass


def _merged(args, config, key):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return _DEFAULTS.get(key)


def _build_model(args, config):
    name = _merged(args, config, "model")
    L = float(_merged(args, config, "L"))
    D = float(_merged(args, config, "D"))
    kappa = _merged(args, config, "kappa")
    if kappa is not None and name != "robin1d":
        raise _UsageError(f"kappa is only valid for robin1d, not {name}")

    if name == "point1d":
        model = models.model_1d_point(L, D)
    elif name == "robin1d":
        if kappa is None:
            raise _UsageError("robin1d requires --kappa")
        model = models.model_1d_robin(L, D, float(kappa))
    elif name == "sphere3d":
        model = models.model_3d_sphere(L, D)
    elif name == "tabulated":
        table = _merged(args, config, "table")
        tail = _merged(args, config, "tail")
        stp = _stp_override(args, config)
        if table is None:
            raise _UsageError("tabulated model requires --table")
        if stp is None:
            raise _UsageError("tabulated model requires --A, --p and --C")
        if tail is None:
            raise _UsageError("tabulated model requires --tail")
        if isinstance(tail, str):
            tail = _parse_tail(tail)
        return models.load_tabulated_csv(table, stp, tail)
    else:
        raise _UsageError(f"unknown model {name!r}")

    stp = _stp_override(args, config)
    if stp is not None:
        model = dataclasses.replace(model, short_time=stp)
    return model


def _stp_override(args, config):
    vals = {key: _merged(args, config, key) for key in ("A", "p", "C")}
    given = [key for key, val in vals.items() if val is not None]
    if not given:
        return None
    if len(given) < 3:
        missing = sorted(set(vals) - set(given))
        raise _UsageError(
            f"short-time override needs all of A, p, C; missing {missing}")
    return models.ShortTimeParams(A=float(vals["A"]), p=float(vals["p"]),
                                  C=float(vals["C"]))


def _rescale_by_variant(model, variant, N):
    if variant == "lambertw":
        return evt_core.rescaling_lambertw(model.short_time, N)
    if variant == "elementary":
        return evt_core.rescaling_elementary(model.short_time, N)
    return evt_core.rescaling_numeric(model, N)


def _check_ns(ns, variants, minimum=2):
    for n in ns:
        if n < minimum:
            raise _UsageError(f"--N must be >= {minimum}, got {n}")
        if "elementary" in variants and n < 3:
            raise _UsageError(f"--N must be >= 3 for the elementary variant, got {n}")


def _fmt(x):
    return format(x, ".12g")


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _provenance(argv):
    return f"# extreme-fpt {__version__} " + " ".join(argv)


def _cmd_rescale(args, config, argv):
    model = _build_model(args, config)
    variants = _merged(args, config, "variant")
    if isinstance(variants, str):
        variants = [variants]
    _check_ns(args.N, variants)
    lines = [_provenance(argv), "N,variant,a_N,b_N"]
    for N in args.N:
        for variant in variants:
            r = _rescale_by_variant(model, variant, N)
            lines.append(f"{N},{variant},{_fmt(r.a_N)},{_fmt(r.b_N)}")
    _emit(lines, _merged(args, config, "out"))
    return 0


def _cmd_stats(args, config, argv):
    model = _build_model(args, config)
    variants = _merged(args, config, "variant")
    variant = variants[0] if isinstance(variants, list) else variants
    _check_ns(args.N, [variant])
    ks = args.k if args.k is not None else [int(_merged(args, config, "k"))]
    lines = [_provenance(argv),
             "N,k,approx_mean,approx_variance,exact_mean,exact_variance,rel_err_mean"]
    saw_infinite = False
    for N in args.N:
        for k in ks:
            r = _rescale_by_variant(model, variant, N)
            approx = evt_core.approx_moments(r, k)
            if args.no_exact:
                exact_mean = exact_var = rel = ""
            else:
                spec = exact.OrderStatSpec(k=k, N=N)
                try:
                    mean1 = exact.moment_TkN(model, spec, 1.0)
                    exact_mean = _fmt(mean1)
                    rel = _fmt(abs(mean1 - approx.mean) / mean1)
                except InfiniteMomentError:
                    saw_infinite = True
                    mean1 = None
                    exact_mean, rel = "inf", ""
                try:
                    mean2 = exact.moment_TkN(model, spec, 2.0)
                    exact_var = _fmt(mean2 - mean1 * mean1) if mean1 is not None else "inf"
                except InfiniteMomentError:
                    saw_infinite = True
                    exact_var = "inf"
            lines.append(
                f"{N},{k},{_fmt(approx.mean)},{_fmt(approx.variance)},"
                f"{exact_mean},{exact_var},{rel}")
    _emit(lines, _merged(args, config, "out"))
    return 1 if saw_infinite else 0


def _cmd_density(args, config, argv):
    model = _build_model(args, config)
    variants = _merged(args, config, "variant")
    variant = variants[0] if isinstance(variants, list) else variants
    N = args.N
    _check_ns([N], [variant])
    r = _rescale_by_variant(model, variant, N)
    lines = [_provenance(argv), "x,pdf_exact,pdf_gumbel"]
    for i in range(-600, 601):
        x = i / 100.0
        pdf = exact.rescaled_TN_pdf(model, N, r, x)
        ref = math.exp(x - math.exp(x))
        lines.append(f"{x:.2f},{_fmt(pdf)},{_fmt(ref)}")
    _emit(lines, _merged(args, config, "out"))
    return 0


def _cmd_error_table(args, config, argv):
    model = _build_model(args, config)
    k = args.k if args.k is not None else int(_merged(args, config, "k"))
    _check_ns(args.N, ["elementary"], minimum=3)
    rows = exact.error_table(model, args.N, k=k)
    lines = [_provenance(argv),
             "N,exact_mean,err_baseline,err_elementary,err_lambertw"]
    for row in rows:
        lines.append(f"{row.N},{_fmt(row.exact_mean)},{_fmt(row.err_baseline)},"
                     f"{_fmt(row.err_elementary)},{_fmt(row.err_lambertw)}")
    _emit(lines, _merged(args, config, "out"))
    return 0


def _cmd_sample(args, config, argv):
    model = _build_model(args, config)
    cfg = mc.SampleConfig(
        N=args.N,
        k=args.k if args.k is not None else int(_merged(args, config, "k")),
        replicates=args.replicates if args.replicates is not None
        else int(_merged(args, config, "replicates")),
        seed=args.seed if args.seed is not None else int(_merged(args, config, "seed")),
        workers=args.workers if args.workers is not None
        else int(_merged(args, config, "workers")),
    )
    _, samples = mc.sample_extremes(model, cfg, return_samples=True)
    lines = [_provenance(argv), "replicate,k,t"]
    for rep in range(cfg.replicates):
        for i in range(cfg.k):
            lines.append(f"{rep},{i + 1},{_fmt(samples[rep, i])}")
    _emit(lines, _merged(args, config, "out"))
    return 0


def _cmd_regime(args, config, argv):
    model = _build_model(args, config)
    _check_ns([args.N], ["elementary"], minimum=3)
    diag = exact.regime_diagnostic(model, args.N)
    lines = [
        _provenance(argv),
        f"dimensionless_mean = {_fmt(diag.dimensionless_mean)}",
        f"log_ratio = {_fmt(diag.log_ratio)}",
        f"in_regime = {str(diag.in_regime).lower()}",
    ]
    _emit(lines, _merged(args, config, "out"))
    return 0


_COMMANDS = {
    "rescale": _cmd_rescale,
    "stats": _cmd_stats,
    "density": _cmd_density,
    "error-table": _cmd_error_table,
    "sample": _cmd_sample,
    "regime": _cmd_regime,
}


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0

    config = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"extreme-fpt: cannot read config: {exc}", file=sys.stderr)
            return 2
        if not isinstance(config, dict):
            print("extreme-fpt: config must be a JSON object", file=sys.stderr)
            return 2

    try:
        return _COMMANDS[args.command](args, config, argv)
    except _UsageError as exc:
        print(f"extreme-fpt: usage error: {exc}", file=sys.stderr)
        return 2
    except RescalingUndefinedError as exc:
        print(f"extreme-fpt: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValidationError, SolverError) as exc:
        print(f"extreme-fpt: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
