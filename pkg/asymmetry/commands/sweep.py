# asymmetry/commands/sweep.py
import argparse

from asymmetry.commands.options import finite_float, float_list
from asymmetry.reports.svg import LineChart
from asymmetry.reports.writers import emit, sweep_csv
from asymmetry.services.simulation_service import delta_grid, sweep_cs


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("sweep", help="Phi and phi^(lambda) along a grid of conditional symmetry tables")
    parser.add_argument("--delta-min", type=finite_float, default=0.0)
    parser.add_argument("--delta-max", type=finite_float, default=1.0)
    parser.add_argument("--delta-step", type=finite_float, default=0.01)
    parser.add_argument("--lambda", dest="lambdas", type=float_list, default=float_list("-0.5,0,1"))
    parser.add_argument("--svg", default=None, help="Also draw the curves to this SVG file")
    parser.add_argument("--out", default=None, help="CSV destination (default stdout)")
    parser.set_defaults(handler=run_sweep)


def run_sweep(args: argparse.Namespace) -> int:
    deltas = delta_grid(args.delta_min, args.delta_max, args.delta_step)
    rows = sweep_cs(deltas, args.lambdas)
    emit(sweep_csv(rows), args.out)

    if args.svg:
        low, high = deltas[0], deltas[-1]
        chart = LineChart(
            title="Phi versus phi^(lambda) under conditional symmetry",
            x_label="Delta",
            y_label="measure",
            x_range=(low, high if high > low else low + 1.0),
        )
        chart.add_series("phi", "Phi", deltas, [row.phi for row in rows])
        for position, lam in enumerate(args.lambdas):
            chart.add_series(f"phi-power-{lam:g}", f"Phi^({lam:g})", deltas,
                             [row.power[position].value for row in rows])
        emit(chart.render(), args.svg)
    return 0
