"""``sample``: draw a point process or a segment."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..libs.seeding import Seed
from ..models import PointSetModel, RealPointSetModel
from ..services.blocks import sample_rooted_blue, sample_rooted_red
from ..services.processes import (
    sample_bernoulli_rooted,
    sample_poisson,
    sample_with_initial_short_gaps,
)
from .common import EXIT_OK, emit, seed_value

PROCESSES = ("bernoulli", "poisson", "blue", "red", "initial-short")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("sample", help="sample a percolation, Poisson set or segment")
    parser.add_argument("--process", choices=PROCESSES, default="bernoulli")
    parser.add_argument("--points", type=int, default=64, help="number of points (bernoulli, initial-short)")
    parser.add_argument("--p", default="1/2", help="retention probability")
    parser.add_argument("--alpha", default="1", help="Poisson intensity")
    parser.add_argument("--horizon", default="64", help="Poisson horizon")
    parser.add_argument("--M", type=int, default=10)
    parser.add_argument("--K", type=int, default=4)
    parser.add_argument("--L", type=int, default=16, help="blue length or initial short gaps")
    parser.add_argument("--seed", type=seed_value, required=True)
    parser.add_argument("--out", type=Path)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    seed = Seed(args.seed)
    if args.process == "poisson":
        real = sample_poisson(args.alpha, args.horizon, seed)
        emit(RealPointSetModel.from_domain(real).model_dump(), args.out)
        return EXIT_OK
    if args.process == "bernoulli":
        points = sample_bernoulli_rooted(args.points, args.p, seed)
    elif args.process == "blue":
        points = sample_rooted_blue(args.L, args.M, seed)
    elif args.process == "red":
        points = sample_rooted_red(args.M, args.K, seed)
    else:
        points = sample_with_initial_short_gaps(args.L, args.M, args.points, seed)
    emit(PointSetModel.from_domain(points).model_dump(), args.out)
    return EXIT_OK
