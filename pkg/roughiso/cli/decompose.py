"""``decompose``: blue/red block decomposition of a point set."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..libs.seeding import Seed
from ..libs.utils import read_json
from ..models import PointSetModel
from ..services.blocks import BlockParams, decompose, structure_check
from ..services.processes import sample_bernoulli_rooted
from .common import EXIT_DOMAIN_FAILURE, EXIT_OK, emit, seed_value


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("decompose", help="split a point set into blocks")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", type=Path, help="point set JSON")
    source.add_argument("--seed", type=seed_value, help="sample a rooted percolation instead")
    parser.add_argument("--points", type=int, default=4096)
    parser.add_argument("--M", type=int, required=True)
    parser.add_argument("--K", type=int, required=True)
    parser.add_argument("--out", type=Path)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.input is not None:
        A = PointSetModel.model_validate(read_json(args.input)).to_domain()
    else:
        A = sample_bernoulli_rooted(args.points, "1/2", Seed(args.seed))
    bp = BlockParams(args.M, args.K)
    result = decompose(A, bp)
    violation = structure_check(result, bp)
    payload = result.as_dict()
    payload["structure"] = None if violation is None else {"block": violation.block, "reason": violation.reason}
    emit(payload, args.out)
    return EXIT_OK if violation is None else EXIT_DOMAIN_FAILURE
