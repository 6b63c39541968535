# asymmetry/commands/options.py
import argparse
import math
from typing import List

from asymmetry.schemas.measures import WeightKind

WEIGHT_CHOICES = {
    "uniform": [WeightKind.UNIFORM],
    "pair": [WeightKind.PAIR],
    "both": [WeightKind.UNIFORM, WeightKind.PAIR],
}


def float_list(text: str) -> List[float]:
    """argparse type for comma separated floats ("-0.5,0,1"); empty text is an empty list."""
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            value = float(item)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{item!r} is not a number")
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"{item!r} is not finite")
        values.append(value)
    return values


def finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} is not finite")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return value


def seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {value} outside [0, 2^64)")
    return value
