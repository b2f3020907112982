"""Command-line experiment drivers.

Subcommands: gen-data, simulate, sweep, ip, counterexample, report.
Every run writes a manifest (inputs, seed, versions); re-running a
command with the same arguments reproduces its outputs byte-for-byte.
Exit codes: 0 success, 1 validation error, 2 infeasible scenario,
3 I/O error.
"""

import argparse
import os
import sys

from . import __version__
from .actions import coarse_library, fine_library
from .dynamics import (
    make_day_ahead_schedule,
    make_repeated_schedule,
    make_rolling_schedule,
    run_brd,
    run_fpd,
)
from .files import (
    read_table,
    render_summary_table,
    scenario_from_config_file,
    write_ip_runs_csv,
    write_ip_sweep_csv,
    write_library_csv,
    write_manifest,
    write_peak_series_csv,
    write_profile_csv,
    write_series,
    write_sweep_rows_csv,
    write_table,
    write_trajectory_csv,
)
from .infoprovider import PopulationMix, run_ip_population
from .metrics import summarize_sweep
from .model import InfeasibleActionError, ScenarioError
from .synth import (
    CASE_BALANCED,
    CASE_HIGHLY_IMBALANCED,
    CASE_MILDLY_IMBALANCED,
    SyntheticProfileParams,
    all_or_nothing_library,
    flat_fleet_scenario,
    generate_synthetic_day,
    two_period_scenario,
)


class _Outputs:
    """Tracks written files so failed commands leave nothing behind."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.paths = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        p = os.path.join(self.out_dir, name)
        self.paths.append(p)
        return p

    def discard(self):
        for p in self.paths:
            if os.path.exists(p):
                os.remove(p)


def _manifest_config(args):
    """Result-determining inputs only: the output path is placement."""
    return {k: v for k, v in vars(args).items() if k not in ("func", "out")}


def _schedule_for(name, grid):
    if name == "rolling":
        return make_rolling_schedule(grid)
    if name == "day-ahead":
        return make_day_ahead_schedule()
    if name.startswith("repeated:"):
        return make_repeated_schedule(int(name.split(":", 1)[1]))
    raise ScenarioError(f"unknown schedule: {name}")


def _build_scenario(args):
    if args.config:
        return scenario_from_config_file(args.config)
    return flat_fleet_scenario(
        n_agents=args.players,
        cap_mw=args.cap,
        intervals=args.intervals,
        seed=args.seed,
    )


def _libraries_for(scenario, mode):
    if mode == "continuous":
        return None
    if mode == "coarse":
        return [coarse_library(a, scenario.prices) for a in scenario.agents]
    initial = scenario.initial_profile()
    return [fine_library(a, initial, scenario.prices) for a in scenario.agents]


def _run_dynamics(dynamics, scenario, schedule, libraries, update):
    if dynamics == "brd":
        return run_brd(
            scenario, schedule, libraries=libraries,
            update_mode=update.replace("-", "_"),
        )
    return run_fpd(scenario, schedule, libraries=libraries)


def cmd_gen_data(args, out):
    params = SyntheticProfileParams(
        intervals=args.intervals,
        peak_mw=args.peak_mw,
        trough_mw=args.trough_mw,
        peak_hour=args.peak_hour,
        price_base=args.price_base,
        price_spike_factor=args.spike_factor,
        noise_fraction=args.noise,
    )
    baseline, prices = generate_synthetic_day(params, args.seed)
    write_series(out.path("baseline.csv"), baseline)
    write_series(out.path("prices.csv"), prices)
    write_manifest(out.path("manifest.json"), "gen-data", _manifest_config(args), args.seed)
    print(f"wrote baseline/prices for {args.intervals} intervals to {out.out_dir}")


def cmd_simulate(args, out):
    scenario = _build_scenario(args)
    schedule = _schedule_for(args.schedule, scenario.grid)
    libraries = _libraries_for(scenario, args.actions)
    trajectory = _run_dynamics(args.dynamics, scenario, schedule, libraries, args.update)
    write_trajectory_csv(out.path("trajectory.csv"), trajectory, scenario)
    write_peak_series_csv(out.path("peak_series.csv"), trajectory)
    write_profile_csv(out.path("final_profile.csv"), trajectory.final_profile.values)
    if libraries is not None:
        write_library_csv(out.path("library_agent1.csv"), libraries[0])
    write_manifest(out.path("manifest.json"), "simulate", _manifest_config(args), args.seed)
    conv = trajectory.convergence
    initial_peak = trajectory.peak_series[0]
    final_peak = trajectory.peak_series[-1]
    reduction = 100.0 * (initial_peak - final_peak) / initial_peak
    print(
        f"{args.dynamics.upper()} {args.actions}: peak {initial_peak:.1f} -> "
        f"{final_peak:.1f} MW ({reduction:+.2f}%), "
        f"converged_at={conv.converged_at}, oscillation={conv.oscillation_period}"
    )


def _parse_players(text):
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in text.split(",")]


def cmd_sweep(args, out):
    caps = [float(c) for c in args.caps.split(",")]
    players = _parse_players(args.players)
    dynamics = ["brd", "fpd"] if args.dynamics == "both" else [args.dynamics]
    results = {}
    for dyn in dynamics:
        for cap in caps:
            for n in players:
                scenario = flat_fleet_scenario(
                    n_agents=n, cap_mw=cap, intervals=args.intervals, seed=args.seed
                )
                schedule = make_rolling_schedule(scenario.grid)
                trajectory = _run_dynamics(dyn, scenario, schedule, None, args.update)
                results[(dyn, cap, n)] = trajectory
                if args.verbose:
                    r = results[(dyn, cap, n)]
                    print(
                        f"  {dyn} cap={cap:g} N={n}: peak {r.peak_series[0]:.0f} -> "
                        f"{r.peak_series[-1]:.0f}"
                    )
    summary = summarize_sweep(results)
    write_sweep_rows_csv(out.path("sweep_rows.csv"), summary)
    table = render_summary_table(summary)
    with open(out.path("summary.txt"), "w") as fh:
        fh.write(table)
    write_manifest(out.path("manifest.json"), "sweep", _manifest_config(args), args.seed)
    print(table, end="")


def cmd_ip(args, out):
    if args.scale_players:
        rows = []
        for n in _parse_players(args.scale_players):
            scenario = flat_fleet_scenario(
                n_agents=n, cap_mw=args.cap, intervals=args.intervals, seed=args.seed
            )
            mix = PopulationMix(
                n_agents=n, aware_fraction=args.aware_fraction or 0.0,
                runs=args.runs, seed=args.seed,
            )
            result = run_ip_population(scenario, mix)
            rows.append([n, repr(result.mean_pct), repr(result.std_pct)])
            print(f"  N={n}: mean reduction {result.mean_pct:.2f}%")
        write_table(
            out.path("ip_scaling.csv"), ["players", "mean_reduction_pct", "std_reduction_pct"], rows
        )
        write_manifest(out.path("manifest.json"), "ip", _manifest_config(args), args.seed)
        return
    scenario = flat_fleet_scenario(
        n_agents=args.players, cap_mw=args.cap, intervals=args.intervals, seed=args.seed
    )
    if args.aware_fraction is not None:
        fractions = [args.aware_fraction]
    else:
        fractions = [round(0.1 * k, 1) for k in range(11)]
    results = []
    for fraction in fractions:
        mix = PopulationMix(
            n_agents=args.players, aware_fraction=fraction, runs=args.runs, seed=args.seed
        )
        results.append(run_ip_population(scenario, mix))
        print(f"  aware={fraction:.1f}: mean reduction {results[-1].mean_pct:.2f}%")
    write_ip_sweep_csv(out.path("ip_sweep.csv"), results)
    write_ip_runs_csv(out.path("ip_runs.csv"), results)
    write_manifest(out.path("manifest.json"), "ip", _manifest_config(args), args.seed)


def cmd_counterexample(args, out):
    cases = (
        ["brd-oscillation", "anti-symmetric", "case1", "case2", "case3"]
        if args.case == "all"
        else [args.case]
    )
    lines = []
    for case in cases:
        lines.append(_run_counterexample_case(case, args.rounds))
    report = "\n".join(lines) + "\n"
    with open(out.path("report.txt"), "w") as fh:
        fh.write(report)
    write_manifest(out.path("manifest.json"), "counterexample", _manifest_config(args), args.seed)
    print(report, end="")


def _run_counterexample_case(case, rounds):
    if case in ("brd-oscillation", "anti-symmetric"):
        scenario = two_period_scenario(CASE_BALANCED)
        libraries = [all_or_nothing_library(a) for a in scenario.agents]
        init = [0, 0] if case == "brd-oscillation" else [0, 1]
        trajectory = run_brd(
            scenario, make_repeated_schedule(rounds), libraries=libraries, init=init
        )
    elif case == "case1":
        scenario = two_period_scenario(CASE_BALANCED, split_baseline=True)
        trajectory = run_brd(scenario, make_repeated_schedule(rounds))
    elif case in ("case2", "case3"):
        background = CASE_HIGHLY_IMBALANCED if case == "case2" else CASE_MILDLY_IMBALANCED
        scenario = two_period_scenario(background)
        libraries = [all_or_nothing_library(a) for a in scenario.agents]
        trajectory = run_brd(
            scenario, make_repeated_schedule(rounds), libraries=libraries, init=[0, 0]
        )
    else:
        raise ScenarioError(f"unknown counterexample case: {case}")
    conv = trajectory.convergence
    return (
        f"{case}: converged_at={conv.converged_at} "
        f"oscillation_period={conv.oscillation_period} "
        f"final_peak={trajectory.peak_series[-1]:g}"
    )


def cmd_report(args, out):
    found = False
    rows_path = os.path.join(args.in_dir, "sweep_rows.csv")
    if os.path.exists(rows_path):
        header, rows = read_table(rows_path)
        results = {
            (r[0], float(r[1]), int(r[2])): (100.0, 100.0 - float(r[4]))
            for r in rows
        }
        print(render_summary_table(summarize_sweep(results)), end="")
        found = True
    ip_path = os.path.join(args.in_dir, "ip_sweep.csv")
    if os.path.exists(ip_path):
        header, rows = read_table(ip_path)
        print("aware_fraction  mean_reduction_pct  std_reduction_pct")
        for r in rows:
            print(f"{float(r[0]):<14.1f}  {float(r[1]):<18.4f}  {float(r[2]):.4f}")
        found = True
    if not found:
        raise ScenarioError(f"no result files found under {args.in_dir}")


def _add_common(parser, intervals=96):
    parser.add_argument("--seed", type=int, default=0, help="master 64-bit seed")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--intervals", type=int, default=intervals)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cpgame", description="Coincident-peak pricing game simulator"
    )
    parser.add_argument("--version", action="version", version=f"cpgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="emit a synthetic peak-day baseline and prices")
    _add_common(p)
    p.add_argument("--peak-mw", type=float, default=85000.0)
    p.add_argument("--trough-mw", type=float, default=55000.0)
    p.add_argument("--peak-hour", type=float, default=17.0)
    p.add_argument("--price-base", type=float, default=60.0)
    p.add_argument("--spike-factor", type=float, default=8.0)
    p.add_argument("--noise", type=float, default=0.004)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("simulate", help="run one trajectory")
    _add_common(p)
    p.add_argument("--config", help="scenario config file (YAML/JSON)")
    p.add_argument("--dynamics", choices=["brd", "fpd"], default="fpd")
    p.add_argument("--actions", choices=["continuous", "coarse", "fine"], default="continuous")
    p.add_argument("--update", choices=["simultaneous", "round-robin"], default="simultaneous")
    p.add_argument("--players", type=int, default=5)
    p.add_argument("--cap", type=float, default=1500.0)
    p.add_argument("--schedule", default="rolling", help="rolling | day-ahead | repeated:K")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run the dynamics x cap x players grid")
    _add_common(p)
    p.add_argument("--caps", default="1200,1500,1800")
    p.add_argument("--players", default="2-15")
    p.add_argument("--dynamics", choices=["brd", "fpd", "both"], default="both")
    p.add_argument("--update", choices=["simultaneous", "round-robin"], default="simultaneous")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ip", help="information-provider population experiments")
    _add_common(p, intervals=24)
    p.add_argument("--players", type=int, default=10)
    p.add_argument("--cap", type=float, default=1200.0)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--aware-fraction", type=float, default=None,
                   help="single fraction; omit for the 0..1 sweep")
    p.add_argument("--scale-players", default=None,
                   help="comma/range list: run the player-count scaling experiment")
    p.set_defaults(func=cmd_ip)

    p = sub.add_parser("counterexample", help="two-period benchmark games")
    _add_common(p)
    p.add_argument(
        "--case",
        choices=["brd-oscillation", "anti-symmetric", "case1", "case2", "case3", "all"],
        default="all",
    )
    p.add_argument("--rounds", type=int, default=10)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("report", help="render tables from stored results")
    p.add_argument("--in", dest="in_dir", required=True)
    p.set_defaults(func=cmd_report, out=None)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = _Outputs(args.out) if getattr(args, "out", None) else None
    try:
        args.func(args, out)
    except InfeasibleActionError as exc:
        if out:
            out.discard()
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (ScenarioError, ValueError, KeyError) as exc:
        if out:
            out.discard()
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        if out:
            out.discard()
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
