"""``oracle``: exact small-instance searches."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..libs.utils import format_rational
from ..models import MappingModel, PointSetModel
from ..services.oracle import (
    Family,
    SearchBudget,
    counterexample_family,
    enumerate_increasing_ri,
    enumerate_markov_ri,
    exists_general_ri,
    exists_markov_ri,
    minimal_multiplicative_constant,
)
from .common import EXIT_DOMAIN_FAILURE, EXIT_OK, emit, load_instance


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("oracle", help="exact searches on small instances")
    actions = parser.add_subparsers(dest="action", required=True)

    minimal = actions.add_parser("minimal-M", help="smallest multiplicative constant")
    minimal.add_argument("--instance", type=Path, required=True)
    minimal.add_argument("--family", choices=[f.value for f in Family], required=True)
    minimal.add_argument("--D", default="0", help="additive constant (fiber bound for markov)")
    minimal.add_argument("--R", default="0")
    minimal.set_defaults(handler=run_minimal)

    exists = actions.add_parser("exists", help="smallest witness for the instance constants")
    exists.add_argument("--instance", type=Path, required=True)
    exists.add_argument("--family", choices=["markov", "general", "rooted"], required=True)
    exists.set_defaults(handler=run_exists)

    enumerate_ = actions.add_parser("enumerate", help="all monotone witnesses")
    enumerate_.add_argument("--instance", type=Path, required=True)
    enumerate_.add_argument("--family", choices=["markov", "increasing"], required=True)
    enumerate_.set_defaults(handler=run_enumerate)

    family = actions.add_parser("counterexample", help="four-point non-monotone family member")
    family.add_argument("--L", type=int, required=True)
    family.add_argument("--max-value", type=int, default=64)
    family.set_defaults(handler=run_counterexample)

    for sub in (minimal, exists, enumerate_, family):
        sub.add_argument("--out", type=Path)


def run_minimal(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    value = minimal_multiplicative_constant(
        instance.A.to_domain(),
        instance.B.to_domain(),
        args.family,
        D=args.D,
        R=args.R,
        budget=SearchBudget.from_settings(),
    )
    text = "inf" if value == float("inf") else format_rational(value)
    emit({"family": args.family, "M": text}, args.out)
    return EXIT_OK


def run_exists(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    if instance.constants is None:
        raise ValueError("instance has no constants")
    A, B = instance.A.to_domain(), instance.B.to_domain()
    budget = SearchBudget.from_settings()
    if args.family == "markov":
        found = exists_markov_ri(A, B, instance.constants.markov(), budget)
    else:
        found = exists_general_ri(A, B, instance.constants.ri(), budget, rooted=args.family == "rooted")
    emit({"found": found is not None, "mapping": found and MappingModel.from_domain(found).model_dump()}, args.out)
    return EXIT_OK if found is not None else EXIT_DOMAIN_FAILURE


def run_enumerate(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    if instance.constants is None:
        raise ValueError("instance has no constants")
    A, B = instance.A.to_domain(), instance.B.to_domain()
    budget = SearchBudget.from_settings()
    if args.family == "markov":
        found = enumerate_markov_ri(A, B, instance.constants.markov(), budget)
    else:
        found = enumerate_increasing_ri(A, B, instance.constants.ri(), budget)
    emit({"count": len(found), "images": [[str(v) for v in T.image] for T in found]}, args.out)
    return EXIT_OK


def run_counterexample(args: argparse.Namespace) -> int:
    budget = SearchBudget.from_settings({"max_codomain_value": args.max_value})
    A, B, witness = counterexample_family(args.L, budget)
    emit(
        {
            "L": args.L,
            "A": PointSetModel.from_domain(A).model_dump(),
            "B": PointSetModel.from_domain(B).model_dump(),
            "witness": MappingModel.from_domain(witness).model_dump(),
        },
        args.out,
    )
    return EXIT_OK
