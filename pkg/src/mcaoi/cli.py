"""Command-line entry point: ``mcaoi <subcommand> ...``.

Exit status: 0 success, 1 usage, 2 validation, 3 runtime, 4 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from mcaoi import __version__, analytic, kernels, simulator
from mcaoi.errors import AoIError, ScenarioError
from mcaoi.renewal import Backend
from mcaoi.results import (
    PARETO_COLUMNS,
    SIMULATION_COLUMNS,
    SWEEP_COLUMNS,
    ParetoRecord,
    ResultTable,
    SimulationRecord,
    atomic_write,
    render,
)
from mcaoi.scenario import parse_scenario
from mcaoi.sweep import (
    Evaluator,
    Metric,
    Source,
    SweepGrid,
    find_crossover,
    pareto_contour,
    run_sweep,
    with_backend,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3, 4

log = logging.getLogger("mcaoi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _num(value: float) -> str:
    return format(value, ".10g")


def _scenario_args(p):
    p.add_argument("--scenario", help="YAML scenario file (default: $MCAOI_SCENARIO, else built-in defaults)")
    p.add_argument("--backend", choices=[b.value for b in Backend], help="closed-form variant")


def _output_args(p):
    p.add_argument("-o", "--output", help="write the table here instead of stdout")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcaoi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mcaoi {__version__} ({kernels.BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("analyze", help="closed forms at one point, both backends side by side")
    p.add_argument("--n", type=int, default=20, help="devices")
    p.add_argument("--m", type=int, default=1, help="subchannels")
    p.add_argument("--l", type=int, default=100, help="block length")
    p.add_argument("--b", type=float, default=1.0, help="total bandwidth")
    p.add_argument("--eps", type=float, default=0.99, help="confidence")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--p", type=float, help="packet error rate")
    group.add_argument("--power-db", type=float, help="received power; error rate from the PHY model")
    p.add_argument("--k", type=int, default=100, help="payload bits (with --power-db)")
    p.add_argument("--noise", type=float, default=1.0, help="full-band noise power (with --power-db)")

    p = sub.add_parser("simulate", help="Monte Carlo run at one operating point")
    _scenario_args(p)
    _output_args(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--l", type=int, default=100)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--p", type=float)
    group.add_argument("--power-db", type=float)
    p.add_argument("--num-rounds", type=int, help="renewal cycles to draw")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["renewal", "slot"], default="renewal")
    p.add_argument("--dump-samples", help="write raw cycle counts, one per line")

    p = sub.add_parser("sweep", help="optimize L over the scenario grid")
    _scenario_args(p)
    _output_args(p)
    p.add_argument("--metric", choices=[m.value for m in Metric])
    p.add_argument("--source", choices=[s.value for s in Source])

    p = sub.add_parser("pareto", help="average vs bounded AoI contours per power")
    _scenario_args(p)
    _output_args(p)
    p.add_argument("--powers", type=float, nargs="+", default=[3.0, 4.0, 5.0, 6.0])
    p.add_argument("--source", choices=[s.value for s in Source])
    p.add_argument("--shared-l", choices=[m.value for m in Metric],
                   help="use one block length per point, optimized for this metric")

    p = sub.add_parser("crossover", help="power where two subchannel counts swap order")
    _scenario_args(p)
    p.add_argument("--m-a", type=int, required=True)
    p.add_argument("--m-b", type=int, required=True)
    p.add_argument("--metric", choices=[m.value for m in Metric], default=Metric.AVERAGE_AOI.value)
    p.add_argument("--source", choices=[s.value for s in Source])

    p = sub.add_parser("verify", help="closed forms vs simulator vs oracles")
    _scenario_args(p)
    p.add_argument("--num-rounds", type=int, default=1_000_000)
    p.add_argument("--seeds", type=int, default=5, help="size of the seed battery")
    p.add_argument("--no-trends", action="store_true", help="skip the informational trend rows")
    return parser


def _load(args):
    scn = parse_scenario(getattr(args, "scenario", None))
    system = scn.system
    if getattr(args, "backend", None):
        system = with_backend(system, args.backend)
    return scn, system


def _emit(args, table: ResultTable):
    text = render(table, args.format)
    if args.output:
        atomic_write(args.output, text)
        log.info("wrote %d rows to %s", len(table.rows), args.output)
    else:
        sys.stdout.write(text)


def cmd_analyze(args):
    sched = analytic.ScheduleConfig(args.n, args.m, args.l, args.b, args.eps)
    if args.power_db is not None:
        from mcaoi.sweep import SystemConfig

        system = SystemConfig(args.n, args.k, args.b, args.noise, args.eps)
        snr, p = system.error_rate(args.power_db, args.m, args.l)
        print(f"gamma={_num(snr)}")
        print(f"per={format(p, '.6g')}")
    else:
        p = 0.0 if args.p is None else args.p
    res = {b: analytic.analyze(sched, p, b) for b in (Backend.REDERIVED, Backend.AS_PRINTED)}
    r, a = res[Backend.REDERIVED], res[Backend.AS_PRINTED]
    print(f"N={args.n} M={args.m} G={sched.num_groups} T={_num(sched.slot_duration)} "
          f"GT={_num(sched.round_duration)} p={format(p, '.6g')} eps={args.eps:g}")
    print(f"avg_aoi={_num(r.avg_aoi)}")
    print(f"{'':22s}{'rederived':>20s}{'as_printed':>20s}")
    for name in ("second_moment", "variance", "cheb_bound"):
        print(f"{name:22s}{_num(getattr(r, name)):>20s}{_num(getattr(a, name)):>20s}")
    print(f"{'bound_radicand_var':22s}{'':>20s}{_num(analytic.printed_implied_variance(sched, p)):>20s}")
    for backend, result in res.items():
        for d in result.diagnostics:
            print(f"diagnostic[{backend.value}] {d.code}: {d.message}")
    return EXIT_OK


def cmd_simulate(args):
    scn, system = _load(args)
    sim = scn.sim
    sim = simulator.SimConfig(
        args.num_rounds if args.num_rounds is not None else sim.num_rounds,
        args.seed if args.seed is not None else sim.seed,
        sim.warmup_rounds,
    )
    sched = system.schedule(args.m, args.l)
    if args.p is not None:
        power_db, snr, p = float("nan"), float("nan"), args.p
    else:
        power_db = 0.0 if args.power_db is None else args.power_db
        snr, p = system.error_rate(power_db, args.m, args.l)
    if args.mode == "slot":
        samples = simulator.simulate_slots(p, sim)
    else:
        samples = simulator.simulate_renewals(p, sim)
    stats = simulator.empirical_stats(samples, sched)
    if args.dump_samples:
        samples.dump(args.dump_samples)
    a = analytic.analyze(sched, p, system.backend)
    row = SimulationRecord(
        power_db, args.m, args.l, snr, p,
        stats.time_avg_aoi, stats.time_second_moment, stats.empirical_variance,
        stats.empirical_bounded_aoi, stats.fraction_below, stats.total_time, stats.num_cycles,
        a.avg_aoi, a.cheb_bound, system.backend.value, f"simulated-{args.mode}", sim.seed,
    )
    table = ResultTable.build(SIMULATION_COLUMNS, [row], seed=sim.seed, backend=system.backend,
                              num_rounds=sim.num_rounds, mode=args.mode)
    if args.output:
        _emit(args, table)
        print(f"time_avg_aoi={_num(stats.time_avg_aoi)} analytic={_num(a.avg_aoi)}")
        print(f"empirical_bounded_aoi={_num(stats.empirical_bounded_aoi)} chebyshev={_num(a.cheb_bound)}")
    else:
        _emit(args, table)
    return EXIT_OK


def cmd_sweep(args):
    scn, system = _load(args)
    grid = scn.grid
    if args.metric or args.source:
        grid = SweepGrid(grid.power_db_list, grid.subchannel_list, grid.block_len_range,
                         args.metric or grid.metric, args.source or grid.source)
    records = run_sweep(system, grid, sim=scn.sim)
    seed = scn.sim.seed if grid.source is Source.SIMULATED else None
    table = ResultTable.build(SWEEP_COLUMNS, records, seed=seed, backend=system.backend,
                              metric=grid.metric.value, source=grid.source.value)
    _emit(args, table)
    return EXIT_OK


def cmd_pareto(args):
    scn, system = _load(args)
    source = Source.parse(args.source or scn.grid.source)
    seed = scn.sim.seed if source is Source.SIMULATED else None
    rows = []
    for power_db in args.powers:
        for pt in pareto_contour(system, power_db, scn.grid.subchannel_list, scn.grid.block_len_range,
                                 source=source, sim=scn.sim, shared_block_len=args.shared_l):
            rows.append(ParetoRecord(power_db, pt.num_subchannels, pt.avg_aoi, pt.bounded_aoi,
                                     pt.block_len_avg, pt.block_len_bounded, system.backend.value,
                                     source.value, seed))
    table = ResultTable.build(PARETO_COLUMNS, rows, seed=seed, backend=system.backend)
    _emit(args, table)
    return EXIT_OK


def cmd_crossover(args):
    scn, system = _load(args)
    source = Source.parse(args.source or scn.grid.source)
    grid = SweepGrid(scn.grid.power_db_list, (args.m_a, args.m_b), scn.grid.block_len_range,
                     args.metric, source)
    issues = grid.validate(system)
    if issues:
        raise ScenarioError("invalid crossover request", issues)
    records = run_sweep(system, grid, sim=scn.sim)
    value = find_crossover(records, args.m_a, args.m_b, args.metric, system, grid.block_len_range,
                           source=source, sim=scn.sim)
    label = "none" if value is None else f"{value:.2f}"
    print(f"crossover_db={label} metric={Metric.parse(args.metric).value} "
          f"M_a={args.m_a} M_b={args.m_b} source={source.value} backend={system.backend.value}")
    return EXIT_OK


def cmd_verify(args):
    from mcaoi import verify

    if args.backend and Backend.parse(args.backend) is not Backend.REDERIVED:
        raise UsageError("verify arbitrates the rederived closed forms; --backend as_printed conflicts")
    scn, system = _load(args)
    if system.backend is not Backend.REDERIVED:
        raise UsageError("verify needs the rederived backend; the scenario selects as_printed")
    seeds = tuple(range(scn.sim.seed, scn.sim.seed + args.seeds))
    results = verify.run_verify(system, args.num_rounds, seeds, include_trends=not args.no_trends)
    for row in results:
        print(row.line())
    failed = [r for r in results if r.passed is False]
    print(f"{len(results) - len(failed)}/{len(results)} rows ok ({kernels.BACKEND} kernels)")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "pareto": cmd_pareto,
    "crossover": cmd_crossover,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mcaoi: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AoIError as exc:
        code = EXIT_VALIDATION if exc.category == "validation" else EXIT_RUNTIME
        print(f"mcaoi: {exc.category} error: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"mcaoi: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
