"""``lattice``: dump the lattice of rooted increasing rough isometries."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..libs.seeding import Seed
from ..libs.utils import format_rational, parse_rational
from ..models import LatticeDumpModel
from ..services.lattice import build_lattice, fkg_check
from ..services.oracle import SearchBudget
from .common import EXIT_DOMAIN_FAILURE, EXIT_OK, emit, load_instance, seed_value


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("lattice", help="enumerate and dump an increasing-map lattice")
    parser.add_argument("--instance", type=Path, required=True)
    parser.add_argument("--x", help="first point for the FKG covariance")
    parser.add_argument("--y", help="second point for the FKG covariance")
    parser.add_argument("--samples", type=int, default=0, help="uniform draws from the lattice")
    parser.add_argument("--seed", type=seed_value, default=0, help="seed for --samples")
    parser.add_argument("--out", type=Path)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    if instance.constants is None:
        raise ValueError("instance has no constants")
    lat = build_lattice(
        instance.A.to_domain(),
        instance.B.to_domain(),
        instance.constants.ri(),
        SearchBudget.from_settings(),
    )
    if lat is None:
        emit({"empty": True}, args.out)
        return EXIT_DOMAIN_FAILURE
    model = LatticeDumpModel.model_validate(lat.as_dict())
    if args.x is not None and args.y is not None:
        x, y = parse_rational(args.x), parse_rational(args.y)
        model.covariance = format_rational(fkg_check(lat, int(x), int(y)))
    if args.samples > 0:
        model.samples = [[int(v) for v in T.image] for T in lat.sample(Seed(args.seed), args.samples)]
    emit(model.model_dump(exclude_none=True), args.out)
    return EXIT_OK
