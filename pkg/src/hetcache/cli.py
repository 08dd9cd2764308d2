"""Command-line entry point: analyze, simulate and sweep.

Every command writes CSV with a header row (to ``--output`` or stdout) and a
short human-readable summary on stderr.  Exit codes: 0 success, 2 invalid
configuration, 3 solver failure.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .exceptions import ConfigParseError, NotIrreducible, SolverDiverged, ValidationError
from .metrics import METRIC_COLUMNS
from .model import NetworkAnalyzer, NetworkSimulator
from .params import coerce_value, load_config
from .sim.policies import POLICIES

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER = 0, 2, 3

KEY_COLUMNS = ("row", "config_hash", "seed", "policy", "sweep_param", "sweep_value",
               "n_states", "residual")
CSV_COLUMNS = KEY_COLUMNS + METRIC_COLUMNS + tuple(f"{c}_ci95" for c in METRIC_COLUMNS) + (
    "flags",)

WEIGHT_KEYS = ("r_sat", "r_bs", "r_dev")


def fmt(value):
    """Fixed numeric formatting: 9 significant digits, blanks for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def write_csv(rows, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in CSV_COLUMNS])


# ----------------------------------------------------------------- row makers
def analytic_row(params, sweep=(None, None)):
    est = NetworkAnalyzer(params).fit()
    row = dict(row="analytic", config_hash=params.config_hash(), sweep_param=sweep[0],
               sweep_value=sweep[1], n_states=est.n_states_, residual=est.residual_)
    row.update(est.report_.as_row())
    return row, est


def simulation_rows(params, policy, sweep=(None, None)):
    est = NetworkSimulator(params, policy=policy).fit()
    common = dict(config_hash=params.config_hash(), policy=policy, sweep_param=sweep[0],
                  sweep_value=sweep[1])
    rows = []
    for seed, rep in zip(est.seeds_, est.reports_):
        row = dict(common, row="replication", seed=seed)
        row.update(rep.as_row())
        rows.append(row)
    agg = dict(common, row="mean", seed=params.seed)
    agg.update(est.aggregate_.as_row())
    rows.append(agg)
    return rows, est


# ------------------------------------------------------------------ sweeping
def parse_values(text):
    text = text.strip()
    if text.startswith("["):
        values = json.loads(text)
    else:
        values = [json.loads(v) if v.strip() else None for v in text.split(",")]
    if not values:
        raise ValidationError("sweep-values", "empty value list")
    return values


def sweep_point(params, key, value, balance=None):
    """``params`` with ``key`` set to ``value``; a swept mode weight is
    compensated by the ``balance`` weight so the three still sum to one."""
    value = coerce_value(key, value)
    changes = {key: value}
    if key in WEIGHT_KEYS:
        other = balance or ("r_bs" if key != "r_bs" else "r_dev")
        if other not in WEIGHT_KEYS or other == key:
            raise ValidationError("balance", "must name a different mode weight")
        rest = sum(getattr(params, k) for k in WEIGHT_KEYS if k not in (key, other))
        changes[other] = 1.0 - value - rest
        if abs(changes[other]) < 1e-12:
            changes[other] = 0.0
    out = params.replace(**changes)
    out.validate()
    return out


def _sweep_job(args):
    params, key, value, simulate, policy = args
    rows = [analytic_row(params, (key, value))[0]]
    if simulate:
        rows.extend(simulation_rows(params, policy, (key, value))[0])
    return rows


# ------------------------------------------------------------------ commands
def _params(args):
    params = load_config(args.config)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "replications", None) is not None:
        changes["replications"] = args.replications
    if getattr(args, "horizon", None) is not None:
        changes["horizon"] = args.horizon
    return params.replace(**changes) if changes else params


def _emit(rows, args):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)


def cmd_analyze(args):
    params = _params(args)
    row, est = analytic_row(params)
    _emit([row], args)
    r = est.report_
    print(f"config {row['config_hash']}: {est.n_states_} states, residual {est.residual_:.3e}",
          file=sys.stderr)
    print(f"g_hu {r.g_hu / 1e6:.4f} Mbps, epb {r.epb * 1e6:.6f} uJ/bit, "
          f"p_drop bs {r.p_drop_bs:.4g} d2d {r.p_drop_d2d:.4g}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    params = _params(args)
    if params.replications < 1:
        raise ValidationError("replications", "must be at least 1")
    rows, est = simulation_rows(params, args.policy)
    _emit(rows, args)
    agg = est.aggregate_
    print(f"{args.policy}: {agg.n} replications x {params.horizon:g} s, "
          f"g_hu {agg.mean['g_hu'] / 1e6:.4f} +- {agg.half_width['g_hu'] / 1e6:.4f} Mbps, "
          f"epb {agg.mean['epb'] * 1e6:.6f} +- {agg.half_width['epb'] * 1e6:.6f} uJ/bit",
          file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args):
    params = _params(args)
    if not args.sweep_param:
        raise ValidationError("sweep-param", "required for sweep")
    values = parse_values(args.sweep_values or "")
    points = [sweep_point(params, args.sweep_param, v, args.balance) for v in values]
    jobs = [(p, args.sweep_param, v, args.simulate, args.policy) for p, v in zip(points, values)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_sweep_job, jobs))
    else:
        chunks = [_sweep_job(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]     # map() keeps sweep order
    _emit(rows, args)
    print(f"sweep {args.sweep_param}: {len(values)} points, {len(rows)} rows", file=sys.stderr)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="hetcache", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON configuration (defaults if omitted)")
        p.add_argument("--output", metavar="PATH", help="CSV output path (stdout if omitted)")

    def simulation(p):
        p.add_argument("--policy", choices=POLICIES, default="pac")
        p.add_argument("--seed", type=int)
        p.add_argument("--replications", type=int)
        p.add_argument("--horizon", type=float, metavar="SECONDS")

    p = sub.add_parser("analyze", help="solve the analytical model")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run simulation replications")
    common(p)
    simulation(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="analyze (and optionally simulate) over a parameter list")
    common(p)
    simulation(p)
    p.add_argument("--sweep-param", metavar="KEY")
    p.add_argument("--sweep-values", metavar="LIST", help="comma list or JSON array")
    p.add_argument("--balance", metavar="KEY",
                   help="mode weight absorbing a swept weight (default r_bs)")
    p.add_argument("--simulate", action="store_true", help="add simulation rows per point")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ConfigParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SolverDiverged, NotIrreducible) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except json.JSONDecodeError as exc:
        print(f"error: sweep values: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
