# asymmetry/commands/__init__.py
from asymmetry.commands import analyze, coverage, geometry, schema, sweep

COMMANDS = (analyze, sweep, geometry, coverage, schema)
