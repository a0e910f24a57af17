"""``construct``: build a Markov rough isometry between two seeded percolations."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..libs.exceptions import StreamExhaustedError
from ..libs.seeding import trial_seed
from ..libs.utils import write_ndjson
from ..models import (
    ConstantsModel,
    ConstructionModel,
    InstanceModel,
    MappingModel,
    PointSetModel,
    StageRecordModel,
)
from ..services.construct import default_params
from ..services.induction import construct
from .common import EXIT_DOMAIN_FAILURE, EXIT_OK, emit, seed_value


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("construct", help="run the block construction")
    parser.add_argument("--n", type=int, required=True, help="number of points of A to cover")
    for name in ("M", "F", "R", "K"):
        parser.add_argument(f"--{name}", type=int, help=f"override the default {name}")
    parser.add_argument("--seed", type=seed_value, required=True)
    parser.add_argument("--max-points", type=int, help="point budget per stream")
    parser.add_argument("--out", type=Path, help="construction JSON (stdout when omitted)")
    parser.add_argument("--stages", type=Path, help="stage records as NDJSON")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    p = default_params(args.n).with_overrides(M=args.M, F=args.F, R=args.R, K=args.K)
    seed = trial_seed(args.seed, 0)
    try:
        result = construct(p, seed, args.max_points)
    except StreamExhaustedError:
        emit(
            ConstructionModel(
                success=False, params=p.as_dict(), seed=seed.describe(), failure_reason="exhausted"
            ).model_dump(mode="json"),
            args.out,
        )
        raise
    if args.stages is not None:
        write_ndjson(
            args.stages,
            [StageRecordModel.model_validate(record.as_dict()).model_dump() for record in result.stages],
        )
    if result.success:
        model = ConstructionModel(
            success=True,
            params=p.as_dict(),
            seed=seed.describe(),
            instance=InstanceModel(
                A=PointSetModel.from_domain(result.A),
                B=PointSetModel.from_domain(result.B),
                constants=ConstantsModel.from_domain(p.markov),
                mapping=MappingModel.from_domain(result.T),
            ),
        )
    else:
        model = ConstructionModel(
            success=False,
            params=p.as_dict(),
            seed=seed.describe(),
            failure_stage=result.stage,
            failure_reason=result.reason,
        )
    emit(model.model_dump(mode="json"), args.out)
    return EXIT_OK if result.success else EXIT_DOMAIN_FAILURE
