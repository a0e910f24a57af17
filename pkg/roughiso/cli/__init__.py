"""Command-line subcommands; each module exposes ``register(subparsers)``."""

from . import construct, decompose, experiment, lattice, oracle, sample, verify

SUBCOMMANDS = (sample, decompose, construct, verify, oracle, lattice, experiment)

__all__ = ["SUBCOMMANDS"]
