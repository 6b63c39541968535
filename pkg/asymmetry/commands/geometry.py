# asymmetry/commands/geometry.py
import argparse

from asymmetry.commands.options import finite_float
from asymmetry.reports.svg import LineChart
from asymmetry.reports.writers import curve_csv, emit
from asymmetry.services.geometry_service import constraint_curve, unit_grid


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("geometry", help="Distances from the conditional pair point to (1/2, 1/2)")
    parser.add_argument("--grid-step", type=finite_float, default=0.001)
    parser.add_argument("--svg", default=None, help="Also draw the three distances to this SVG file")
    parser.add_argument("--out", default=None, help="CSV destination (default stdout)")
    parser.set_defaults(handler=run_geometry)


def run_geometry(args: argparse.Namespace) -> int:
    samples = constraint_curve(unit_grid(args.grid_step))
    emit(curve_csv(samples), args.out)

    if args.svg:
        pcs = [s.pc for s in samples]
        chart = LineChart(title="Distances on the constraint curve", x_label="p^c", y_label="distance")
        chart.add_series("ed", "Euclidean", pcs, [s.ed for s in samples])
        chart.add_series("frd", "Fisher-Rao", pcs, [s.frd for s in samples])
        chart.add_series("hd", "Hellinger", pcs, [s.hd for s in samples])
        emit(chart.render(), args.svg)
    return 0
