"""Command-line front end: ``edweibull {pd,threshold,sweep,simulate,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 numerical failure. SNR is always given in dB. Records are CSV by default
(``--output json`` for JSON), with floats at 12 significant digits.

Sweep config files are INI-style, one section per sweep::

    [fig1]
    kind = pd_vs_snr
    u = 5
    pf = 0.1
    a_values = 0.75, 1, 1.5, 2
    snr_db_range = -10, 30, 0.5

    [fig5]
    kind = comp_roc
    u = 5
    snr_db = 25
    a_values = 0.5, 1, 2
    pf_grid = log:0.001:0.999:50
"""

import argparse
import configparser
import csv
import io
import itertools
import json
import sys
import time

from . import detector, montecarlo, sweep
from .channel import WeibullChannel
from .errors import AccuracyError, ConvergenceError, DomainError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def emit_records(records, fmt, stream):
    """Write a list of flat dicts as CSV (header + rows) or a JSON array."""
    if fmt == "json":
        rows = [
            {k: (v if isinstance(v, (str, int)) else float(_fmt(v))) for k, v in r.items()}
            for r in records
        ]
        json.dump(rows, stream, indent=1)
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(list(records[0]))
    for r in records:
        writer.writerow([_fmt(v) for v in r.values()])


def _float_list(text):
    try:
        return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _pf_grid(text):
    if text.startswith("log:"):
        try:
            lo, hi, n = text[4:].split(":")
            return sweep.log_pf_grid(float(lo), float(hi), int(n))
        except ValueError:
            raise UsageError(f"pf grid must look like log:LO:HI:N, got {text!r}") from None
    return _float_list(text)


def _triple(text):
    vals = _float_list(text)
    if len(vals) != 3:
        raise UsageError(f"expected start,stop,step, got {text!r}")
    return vals


def _add_output(p):
    p.add_argument("--output", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="edweibull",
        description="Energy detection performance over Weibull fading channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pd", help="average detection probability at one operating point")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--snr-db", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pf", type=float)
    g.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--method", choices=("auto", "series", "quadrature"), default="auto")
    _add_output(p)

    p = sub.add_parser("threshold", help="threshold for a target false-alarm probability")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--pf", type=float, required=True)
    _add_output(p)

    p = sub.add_parser("sweep", help="curve data for pd-vs-SNR or complementary ROC plots")
    p.add_argument("--config", metavar="FILE", help="INI file, one section per sweep")
    p.add_argument("--kind", choices=("pd_vs_snr", "comp_roc"))
    p.add_argument("--u", type=int, default=5)
    p.add_argument("--a", dest="a_values", default="0.5,1,1.5,2")
    p.add_argument("--pf", type=float, default=0.1)
    p.add_argument(
        "--snr-db-range", default="-10,30,0.5", metavar="START,STOP,STEP",
        help="use the --snr-db-range=-10,30,0.5 form when START is negative",
    )
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--pf-grid", default="log:0.001:0.999:50")
    p.add_argument("--engine", choices=("analytic", "simulate"), default="analytic")
    p.add_argument("--method", choices=("auto", "series", "quadrature"), default="auto")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of Pf (no --snr-db) or Pd")
    p.add_argument("--u", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pf", type=float)
    g.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--a", type=float, help="Weibull severity; omit for AWGN")
    p.add_argument("--snr-db", type=float, help="average SNR; omit to simulate H0")
    p.add_argument("--threads", type=int, default=None)
    _add_output(p)

    p = sub.add_parser("verify", help="series / quadrature / Monte Carlo agreement check")
    p.add_argument("--quick", action="store_true", help="reduced grid")
    p.add_argument("--seed", type=int, default=2024)
    return parser


def _threshold(args):
    if args.pf is not None:
        return detector.threshold_for_pf(args.u, args.pf)
    return args.lam


def cmd_pd(args, out):
    cfg = detector.DetectorConfig(args.u, _threshold(args))
    ch = WeibullChannel.from_db(args.a, args.snr_db)
    res = detector.avg_pd(cfg, ch, method=args.method)
    record = {
        "pf": detector.prob_false_alarm(cfg),
        "lambda": cfg.threshold,
        "pd": res.value,
        "pm": 1.0 - res.value,
        "method": res.method,
        "terms_used": res.terms_used,
        "est_error": res.est_error,
    }
    emit_records([record], args.output, out)
    return EXIT_OK


def cmd_threshold(args, out):
    lam = detector.threshold_for_pf(args.u, args.pf)
    pf = detector.prob_false_alarm(detector.DetectorConfig(args.u, lam))
    emit_records([{"u": args.u, "lambda": lam, "pf": pf}], args.output, out)
    return EXIT_OK


_SECTION_KEYS = {
    "kind": str,
    "u": int,
    "a_values": _float_list,
    "pf": float,
    "snr_db_range": _triple,
    "snr_db": float,
    "pf_grid": _pf_grid,
    "engine": str,
    "method": str,
    "trials": int,
    "seed": int,
}
_SPEC_FIELD = {"pf": "pf_fixed", "snr_db": "snr_db_fixed"}


def _field_lines(path):
    """Map (section, key) to its 1-based line number for diagnostics."""
    lines = {}
    section = None
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, 1):
            text = line.strip()
            if text.startswith("[") and text.endswith("]"):
                section = text[1:-1].strip()
            elif section and text and text[0] not in "#;" and ("=" in text or ":" in text):
                key = text.split("=", 1)[0] if "=" in text else text.split(":", 1)[0]
                lines.setdefault((section, key.strip().lower()), no)
    return lines


def read_sweep_config(path):
    """Parse an INI sweep file into a list of :class:`sweep.SweepSpec`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not parser.sections():
        raise UsageError(f"{path}: no sweep sections found")
    lines = _field_lines(path)
    specs = []
    for name in parser.sections():
        kwargs = {}
        for key, raw in parser.items(name):
            where = f"{path}:{lines.get((name, key), '?')} [{name}]"
            if key not in _SECTION_KEYS:
                raise UsageError(f"{where}: unknown field {key!r}")
            try:
                value = _SECTION_KEYS[key](raw.strip())
            except (UsageError, ValueError) as exc:
                raise UsageError(f"{where} {key}: {exc}") from None
            kwargs[_SPEC_FIELD.get(key, key)] = value
        if "kind" not in kwargs:
            raise UsageError(f"{path} [{name}]: missing required field 'kind'")
        try:
            specs.append(sweep.SweepSpec(**kwargs))
        except DomainError as exc:
            raise UsageError(f"{path} [{name}]: {exc}") from None
    return specs


def _inline_spec(args):
    if args.kind is None:
        raise UsageError("sweep needs --config FILE or --kind")
    try:
        return sweep.SweepSpec(
            kind=args.kind,
            u=args.u,
            a_values=_float_list(args.a_values),
            pf_fixed=args.pf,
            snr_db_range=_triple(args.snr_db_range),
            snr_db_fixed=args.snr_db,
            pf_grid=_pf_grid(args.pf_grid),
            engine=args.engine,
            method=args.method,
            trials=args.trials,
            seed=args.seed,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def cmd_sweep(args, out):
    specs = read_sweep_config(args.config) if args.config else [_inline_spec(args)]
    threads = montecarlo.default_threads() if args.threads is None else args.threads
    points = list(itertools.chain.from_iterable(sweep.run_sweep(s, threads) for s in specs))
    if args.output == "json":
        sweep.write_json(points, out)
    else:
        sweep.write_csv(points, out)
    return EXIT_OK


def cmd_simulate(args, out):
    if args.a is not None and args.snr_db is None:
        raise UsageError("--a needs --snr-db")
    cfg = detector.DetectorConfig(args.u, _threshold(args))
    if args.snr_db is None:
        spec = montecarlo.SimSpec(cfg, args.trials, args.seed, "H0")
    elif args.a is None:
        spec = montecarlo.SimSpec(
            cfg, args.trials, args.seed, "H1", snr=10.0 ** (args.snr_db / 10.0)
        )
    else:
        spec = montecarlo.SimSpec(
            cfg, args.trials, args.seed, "H1", WeibullChannel.from_db(args.a, args.snr_db)
        )
    rep = montecarlo.estimate_detection(spec, threads=args.threads)
    record = {
        "hypothesis": rep.hypothesis,
        "lambda": cfg.threshold,
        "estimate": rep.estimate,
        "detections": rep.detections,
        "trials": rep.trials,
        "seed": rep.seed,
        "half_width_95": rep.half_width_95,
    }
    emit_records([record], args.output, out)
    return EXIT_OK


# paper anchor points: (snr_db, reported missed-detection probability)
ANCHORS = ((-5.0, 0.78), (10.0, 0.41), (25.0, 0.10))
ANCHOR_TOL = 0.02
SERIES_TOL = 1e-8
LIMIT_TOL = 1e-8


def _verify_grids(quick):
    if quick:
        grid = list(itertools.product((1.0, 2.0, 3.5), (1, 5), (0.1,), (0.0, 10.0, 25.0)))
        mc_cells = [(1.0, 5, 0.2, 10.0), (2.0, 5, 0.1, 5.0), (3.5, 1, 0.1, 0.0)]
        return grid, mc_cells, 200000, (1, 5)
    grid = list(itertools.product(
        (0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 5.0), (1, 2, 5, 10),
        (0.01, 0.1, 0.2, 0.5), (0.0, 5.0, 10.0, 15.0, 20.0, 25.0),
    ))
    mc_cells = [
        (0.75, 1, 0.01, 0.0), (0.75, 10, 0.5, 25.0), (1.0, 5, 0.2, 10.0),
        (1.0, 2, 0.1, 5.0), (1.5, 10, 0.01, 15.0), (2.0, 5, 0.1, 5.0),
        (2.0, 5, 0.1, 15.0), (2.5, 1, 0.2, 20.0), (3.0, 2, 0.5, 0.0),
        (3.5, 10, 0.1, 10.0), (5.0, 1, 0.01, 25.0), (5.0, 5, 0.2, 5.0),
    ]
    return grid, mc_cells, 10**6, (1, 2, 5, 10)


def run_verification(quick=False, seed=2024, out=sys.stdout):
    """Run the three-way agreement check; return (ok, lines printed)."""
    grid, mc_cells, trials, limit_us = _verify_grids(quick)
    failures = []
    cells = {}
    quad_cache = {}
    for a, u, pf, db in grid:
        cfg = detector.DetectorConfig.from_pf(u, pf)
        ch = WeibullChannel.from_db(a, db)
        q = detector.avg_pd_weibull_quadrature(cfg, ch)
        quad_cache[(a, u, pf, db)] = q.value
        cell = cells.setdefault((a, u), {"n": 0, "series": 0, "d_sq": 0.0, "d_qm": 0.0})
        cell["n"] += 1
        if q.value < pf - 1e-10:
            failures.append(f"a={a} u={u} pf={pf} snr={db}dB: avg pd {q.value:.12g} < pf")
        try:
            s = detector.avg_pd_weibull_series(cfg, ch)
        except ConvergenceError:
            continue
        cell["series"] += 1
        d = abs(s.value - q.value)
        cell["d_sq"] = max(cell["d_sq"], d)
        if d > SERIES_TOL:
            failures.append(f"a={a} u={u} pf={pf} snr={db}dB: |series-quad| = {d:.3g}")

    for i, (a, u, pf, db) in enumerate(mc_cells):
        cfg = detector.DetectorConfig.from_pf(u, pf)
        ch = WeibullChannel.from_db(a, db)
        q = quad_cache.get((a, u, pf, db))
        if q is None:
            q = detector.avg_pd_weibull_quadrature(cfg, ch).value
        rep = montecarlo.estimate_detection(
            montecarlo.SimSpec(cfg, trials, seed + i, "H1", ch)
        )
        d = abs(rep.estimate - q)
        cell = cells.setdefault((a, u), {"n": 0, "series": 0, "d_sq": 0.0, "d_qm": 0.0})
        cell["d_qm"] = max(cell["d_qm"], d)
        if d > max(3.0 * rep.half_width_95, 5e-3):
            failures.append(f"a={a} u={u} pf={pf} snr={db}dB: |quad-MC| = {d:.3g}")

    limit_worst = 0.0
    for u in limit_us:
        for pf in (0.1, 0.2):
            cfg = detector.DetectorConfig.from_pf(u, pf)
            v = detector.avg_pd(cfg, WeibullChannel(2.0, 1e-12)).value
            limit_worst = max(limit_worst, abs(v - pf))
    if limit_worst > LIMIT_TOL:
        failures.append(f"zero-SNR limit off by {limit_worst:.3g}")

    out.write(f"{'a':>5} {'u':>3} {'cells':>5} {'series':>6} {'max|ser-quad|':>14} "
              f"{'max|quad-MC|':>13}\n")
    for (a, u), c in sorted(cells.items()):
        out.write(f"{a:5g} {u:3d} {c['n']:5d} {c['series']:6d} {c['d_sq']:14.3e} "
                  f"{c['d_qm']:13.3e}\n")
    out.write(f"zero-SNR limit: max |avg_pd - pf| = {limit_worst:.3e}\n")

    cfg = detector.DetectorConfig.from_pf(5, 0.2)
    for db, target in ANCHORS:
        pm = detector.avg_pd(cfg, WeibullChannel.from_db(1.0, db)).pm
        status = "PASS" if abs(pm - target) <= ANCHOR_TOL else "FAIL"
        out.write(f"anchor u=5 a=1 pf=0.2 snr={db:g}dB: pm={pm:.4f} "
                  f"(reported {target:.2f} +/- {ANCHOR_TOL}) {status}\n")

    for f in failures:
        out.write(f"VIOLATION {f}\n")
    out.write("verify: OK\n" if not failures else f"verify: {len(failures)} violation(s)\n")
    return not failures


def cmd_verify(args, out):
    t0 = time.perf_counter()
    ok = run_verification(args.quick, args.seed, out)
    print(f"elapsed {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "pd": cmd_pd,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    buffer = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buffer)
    except (UsageError, DomainError) as exc:
        print(f"edweibull {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, AccuracyError) as exc:
        print(f"edweibull {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = buffer.getvalue()
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
