"""Command line front end.

Subcommands: calibrate, report, table1, figure1, roc, poll, simulate.
Exit status is 0 on success, 2 for usage or domain errors and 1 for anything
unexpected.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from . import __version__
from .calibration import METHODS, FAVORED, calibration_rows, goodman_lr, marsman_lr, mle_lr
from .calibration import sellke_mbf, sellke_valid
from .inference import (
    GREATER,
    LESS,
    PollSpec,
    TrialSpec,
    evidential_report,
    format_value,
    poll_report,
    report_fields,
)
from .montecarlo import (
    DEFAULT_N_SIMS,
    McConfig,
    estimate_exceedance,
    sign_error_frequency,
    verify_eq1,
)
from .normal_math import DomainError, check_probability, std_normal_quantile, std_normal_sf
from .roc import (
    RocModel,
    convexity_check,
    negative_secant_lr,
    positive_secant_lr,
    roc_point,
    secant_product_lr,
    tangent_lr,
)

FORMATS = ("text", "csv", "json")
FORMAT_ENV = "EVIDENTIAL_FORMAT"

_METHOD_FLAGS = {"mle": "mle_lr", "marsman": "marsman", "goodman": "goodman", "sellke": "sellke"}
_TABLE1_LABELS = {
    "marsman": "Marsman et al (2017)",
    "mle_lr": "MLE-LR",
    "goodman": "Goodman (1999)",
    "sellke": "Sellke et al (2001)",
}


class UsageError(Exception):
    pass


# --- output ----------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _csv_text(rows, columns, precision):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(format_value(row.get(c), precision) for c in columns)
    return buf.getvalue()


def _text_table(rows, columns, precision):
    cells = [[format_value(row.get(c), precision) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(v.rjust(w) if _numeric(v) else v.ljust(w)
                               for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _numeric(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def _text_mapping(mapping, precision):
    width = max(len(k) for k in mapping)
    return "".join(f"{k.ljust(width)}  {format_value(v, precision)}\n" for k, v in mapping.items())


def render_table(args, rows, columns, meta=None, footer=None):
    """Serialize a list of row dicts (plus optional metadata) in the chosen format."""
    meta = meta or {}
    if args.format == "json":
        return json.dumps(_jsonable({**meta, "rows": rows}), indent=2) + "\n"
    if args.format == "csv":
        return _csv_text(rows, columns, args.precision)
    out = _text_mapping(meta, args.precision) + "\n" if meta else ""
    out += _text_table(rows, columns, args.precision)
    if footer:
        out += "\n" + _text_mapping(footer, args.precision)
    return out


def render_record(args, record, rows=None, columns=None):
    """Serialize one flat record; text mode may append a row table."""
    if args.format == "json":
        return json.dumps(_jsonable(record), indent=2) + "\n"
    if args.format == "csv":
        return _csv_text([record], list(record), args.precision)
    out = _text_mapping(record if rows is None else _scalars(record), args.precision)
    if rows:
        out += "\n" + _text_table(rows, columns, args.precision)
    return out


def _scalars(record):
    return {k: v for k, v in record.items() if not k.startswith(METHODS)}


def _write(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- argument helpers --------------------------------------------------------

def _positive(text):
    value = float(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text!r}")
    return value


def _count(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}")
    return value


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def parse_range(text):
    """``start:stop:step`` into an inclusive float grid."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like start:stop:step, got {text!r}")
    if not (step > 0 and stop > start and math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"invalid range {text!r}: need start < stop and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


_ROW_COLUMNS = ["method", "lr", "posterior", "raw_value", "raw_orientation", "valid"]


def _row_dicts(rows):
    return [{c: r.as_dict()[c] for c in _ROW_COLUMNS} for r in rows]


# --- commands ------------------------------------------------------------------

def cmd_calibrate(args):
    # p is read toward the favored side: p > 0.5 (or z < 0) means the observed
    # effect went the other way and every LR comes out below 1.
    if args.p is not None:
        p = check_probability(args.p)
        z = 0.0 if p == 0.5 else std_normal_quantile(1.0 - p)
        p_obs = min(p, 1.0 - p)
    else:
        z = args.z
        if not math.isfinite(z):
            raise DomainError(f"z must be finite, got {z!r}")
        p = std_normal_sf(z)
        p_obs = std_normal_sf(abs(z))
    rows = calibration_rows(z, args.prior_odds, toward_favored=p <= 0.5, p=p_obs)
    if args.method != "all":
        rows = [r for r in rows if r.method == _METHOD_FLAGS[args.method]]
    records = []
    for r in rows:
        rec = {"method": r.method, "lr": r.lr, "orientation": FAVORED,
               "posterior": r.posterior, "raw_value": r.raw_value,
               "raw_orientation": r.raw_orientation, "valid": r.valid}
        records.append(rec)
    meta = {"p": p, "z": z, "prior_odds": args.prior_odds}
    return render_table(args, records, list(records[0]), meta)


def _round_half_up(x, places):
    return float(Decimal(repr(x)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def cmd_table1(args):
    z = args.z
    rows = calibration_rows(z, args.prior_odds)
    records = []
    for r in rows:
        records.append({
            "method": _TABLE1_LABELS[r.method],
            "formula": r.formula,
            "prior": r.prior_description,
            "lr": r.lr,
            "posterior": r.posterior,
            "valid": r.valid,
        })
    columns = ["method", "formula", "prior", "lr", "posterior", "valid"]
    if args.paper_rounding:
        # p to two decimals, LRs to two decimals, posteriors truncated to whole percent.
        p_disp = _round_half_up(std_normal_sf(abs(z)), 2)
        if not 0.0 < p_disp < 1.0:
            raise DomainError(f"p rounds to {p_disp}; --paper-rounding needs it inside (0, 1)")
        rounded = calibration_rows(z, args.prior_odds, p=p_disp)
        for rec, r in zip(records, rounded):
            rec["lr_paper"] = _round_half_up(r.lr, 2)
            rec["posterior_paper_pct"] = int(math.floor(round(r.posterior * 100.0, 9)))
        columns += ["lr_paper", "posterior_paper_pct"]
    meta = {"z": z, "p_one_sided": std_normal_sf(abs(z)), "prior_odds": args.prior_odds}
    return render_table(args, records, columns, meta)


def figure1_rows(p_min, p_max, steps):
    if not (0.0 < p_min < p_max <= 0.5):
        raise UsageError(f"need 0 < p-min < p-max <= 0.5, got {p_min}, {p_max}")
    if steps < 2:
        raise UsageError("steps must be at least 2")
    rows = []
    for p in np.linspace(p_min, p_max, steps):
        p = float(p)
        z = 0.0 if p == 0.5 else std_normal_quantile(1.0 - p)
        rows.append({
            "p": p,
            "z": z,
            "marsman": marsman_lr(p),
            "mle": mle_lr(p),
            "goodman": goodman_lr(z),
            "sellke_oriented": sellke_mbf(p),
            "sellke_valid": sellke_valid(p),
        })
    return rows


_SVG_SERIES = (("marsman", "#1f77b4"), ("mle", "#d62728"), ("goodman", "#2ca02c"),
               ("sellke_oriented", "#9467bd"))


def figure1_svg(rows, width=640, height=420):
    """Minimal standalone SVG: one polyline per method, log10 LR on the y axis."""
    left, right, top, bottom = 60, 150, 20, 50
    pw, ph = width - left - right, height - top - bottom
    ps = [r["p"] for r in rows]
    x0, x1 = min(ps), max(ps)
    ymax = max(math.log10(r[k]) for r in rows for k, _ in _SVG_SERIES)
    ymax = max(ymax, 0.1)

    def sx(p):
        return left + pw * (p - x0) / (x1 - x0)

    def sy(lr):
        return top + ph * (1.0 - math.log10(lr) / ymax)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for decade in range(int(math.floor(ymax)) + 1):
        y = sy(10.0 ** decade)
        out.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{10 ** decade:g}</text>')
    for i in range(6):
        p = x0 + (x1 - x0) * i / 5
        out.append(f'<text x="{sx(p):.2f}" y="{top + ph + 16}" font-size="11" '
                   f'text-anchor="middle">{p:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" font-size="12" '
               f'text-anchor="middle">one-sided P-value</text>')
    out.append(f'<text x="14" y="{top + ph / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2})">likelihood ratio (log scale)</text>')
    for i, (key, colour) in enumerate(_SVG_SERIES):
        pts = " ".join(f"{sx(r['p']):.2f},{sy(r[key]):.2f}" for r in rows)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" '
                   f'y2="{ly - 4}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 36}" y="{ly}" font-size="11">{key}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_figure1(args):
    rows = figure1_rows(args.p_min, args.p_max, args.steps)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(figure1_svg(rows))
    return render_table(args, rows, list(rows[0]))


def cmd_roc(args):
    model = RocModel(args.delta)
    grid = parse_range(args.cutoffs)
    rows = []
    for c in grid:
        pt = roc_point(model, c)
        rec = {"cutoff": c, "fpr": pt.fpr, "tpr": pt.tpr,
               "lr_positive": None, "lr_negative": None, "secant_product": None,
               "tangent": tangent_lr(model, c)}
        if pt.interior:
            rec["lr_positive"] = positive_secant_lr(pt)
            rec["lr_negative"] = negative_secant_lr(pt)
            rec["secant_product"] = secant_product_lr(pt)
        rows.append(rec)
    report = convexity_check(model, grid)
    diag = report.as_dict()
    if args.format == "json":
        return render_table(args, rows, list(rows[0]), {"convexity": diag})
    return render_table(args, rows, list(rows[0]),
                        footer={f"convexity_{k}": v for k, v in diag.items()})


def cmd_report(args):
    trial = TrialSpec(theta_obs=args.theta_obs, se=args.se, delta=args.delta,
                      favored_direction=args.favored, n=args.n)
    report = evidential_report(trial, args.prior_odds)
    return render_record(args, report_fields(report), _row_dicts(report.rows), _ROW_COLUMNS)


def cmd_poll(args):
    poll = PollSpec(n=args.n, k=args.k, p0=args.p0)
    result = poll_report(poll, args.prior_odds, favored_direction=args.favored)
    record = {"n": poll.n, "k": poll.k, "p0": poll.p0}
    record.update(report_fields(result.report))
    record.update({"exact_tail": result.exact_tail, "normal_tail": result.normal_tail,
                   "approximation_error": result.approximation_error})
    return render_record(args, record, _row_dicts(result.report.rows), _ROW_COLUMNS)


def cmd_simulate(args):
    if args.check == "exceedance":
        if args.true_theta is None or args.cutoff is None:
            raise UsageError("exceedance needs --true-theta and --cutoff")
        cfg = McConfig(seed=args.seed, n_sims=args.n_sims, true_theta=args.true_theta,
                       se=args.se, cutoff=args.cutoff)
        est = estimate_exceedance(cfg, workers=args.workers)
        if math.isinf(args.cutoff):
            expected = 1.0 if args.cutoff < 0 else 0.0
        else:
            expected = std_normal_sf((args.cutoff - args.true_theta) / args.se)
        record = {"check": "exceedance", "seed": args.seed, "n_sims": args.n_sims,
                  "true_theta": args.true_theta, "se": args.se, "cutoff": args.cutoff,
                  "estimate": est.estimate, "std_error": est.std_error,
                  "analytic": expected, "z_score": est.z_score(expected)}
    elif args.check == "eq1":
        if args.delta is None or args.cutoff is None:
            raise UsageError("eq1 needs --delta and --cutoff")
        cmp = verify_eq1(args.delta, args.cutoff, args.n_sims, args.seed, workers=args.workers)
        record = {"check": "eq1", **cmp.as_dict(), "lr_z_score": cmp.lr_z_score}
    else:
        if args.true_theta is None or args.delta is None:
            raise UsageError("sign-error needs --true-theta and --delta")
        est = sign_error_frequency(args.true_theta, args.se, args.delta, args.n_sims,
                                   args.seed, workers=args.workers)
        expected = std_normal_sf(abs(args.true_theta - args.delta) / args.se)
        record = {"check": "sign-error", "seed": args.seed, "n_sims": args.n_sims,
                  "true_theta": args.true_theta, "se": args.se, "delta": args.delta,
                  "estimate": est.estimate, "std_error": est.std_error,
                  "analytic": expected, "z_score": est.z_score(expected)}
    return render_record(args, record)


# --- parser ----------------------------------------------------------------------

def _default_format():
    value = os.environ.get(FORMAT_ENV, "text").strip().lower() or "text"
    if value not in FORMATS:
        raise UsageError(f"{FORMAT_ENV} must be one of {', '.join(FORMATS)}, got {value!r}")
    return value


def build_parser(default_format="text"):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=default_format,
                        help=f"output format (default: ${FORMAT_ENV} or text)")
    common.add_argument("--precision", type=int, default=6,
                        help="significant digits for text/csv numbers (default 6)")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    parser = argparse.ArgumentParser(
        prog="evidential",
        description="One-sided p-values as likelihood ratios.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", parents=[common],
                       help="convert a one-sided p or a z score with one or all calibrations")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--p", type=float, help="one-sided p-value toward the favored side")
    src.add_argument("--z", type=float, help="z score, positive toward the favored side")
    p.add_argument("--prior-odds", type=_positive, default=1.0)
    p.add_argument("--method", choices=["all", *_METHOD_FLAGS], default="all")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("report", parents=[common], help="evidential report for one trial")
    p.add_argument("--theta-obs", type=float, required=True, help="observed effect")
    p.add_argument("--se", type=_positive, required=True, help="standard error of the effect")
    p.add_argument("--delta", type=float, default=0.0, help="dividing value (default 0)")
    p.add_argument("--favored", choices=[GREATER, LESS],
                   help="favored direction (default: the observed one)")
    p.add_argument("--prior-odds", type=_positive, default=1.0)
    p.add_argument("--n", type=_count, help="trial size, recorded only")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("table1", parents=[common],
                       help="compare the four calibrations at one z score")
    p.add_argument("--z", type=float, default=1.0)
    p.add_argument("--prior-odds", type=_positive, default=1.0)
    p.add_argument("--paper-rounding", action="store_true",
                   help="add columns computed with p rounded to 2 decimals")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("figure1", parents=[common], help="calibration curves over a p grid")
    p.add_argument("--p-min", type=float, default=0.001)
    p.add_argument("--p-max", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--svg", metavar="PATH", help="also write an SVG line plot")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("roc", parents=[common], help="binormal ROC points and convexity check")
    p.add_argument("--delta", type=float, default=1.0, help="separation of the two normals")
    p.add_argument("--cutoffs", default="-4:4:0.1", help="start:stop:step (inclusive)")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("poll", parents=[common], help="two-candidate poll example")
    p.add_argument("--n", type=_count, required=True, help="respondents")
    p.add_argument("--k", type=int, required=True, help="respondents favoring the candidate")
    p.add_argument("--p0", type=float, default=0.5, help="dividing proportion (default 0.5)")
    p.add_argument("--favored", choices=[GREATER, LESS], default=GREATER)
    p.add_argument("--prior-odds", type=_positive, default=1.0)
    p.set_defaults(func=cmd_poll)

    p = sub.add_parser("simulate", parents=[common], help="seeded Monte Carlo checks")
    p.add_argument("--check", choices=["exceedance", "eq1", "sign-error"], default="exceedance")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--n-sims", type=_count, default=DEFAULT_N_SIMS)
    p.add_argument("--true-theta", type=float)
    p.add_argument("--se", type=_positive, default=1.0)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--delta", type=float, help="ROC separation (eq1) or dividing value (sign-error)")
    p.add_argument("--workers", type=_count, default=1)
    p.set_defaults(func=cmd_simulate)
    return parser


def _join_range_values(argv):
    # Lets "--cutoffs -4:4:0.1" through; argparse would read -4:4:0.1 as an option.
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--cutoffs":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        default_format = _default_format()
    except UsageError as exc:
        print(f"evidential: error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser(default_format)
    try:
        args = parser.parse_args(_join_range_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _write(args, args.func(args))
    except (DomainError, UsageError) as exc:
        print(f"evidential {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"evidential {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


def run():
    sys.exit(main())
