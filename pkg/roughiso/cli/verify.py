"""``verify``: check a mapping against a family of rough isometries."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..models import CheckKind, ConstantsModel, ViolationModel
from ..services.verify import (
    find_cut_point,
    verify_increasing,
    verify_markov,
    verify_rooted,
    verify_rough_isometry,
)
from .common import EXIT_DOMAIN_FAILURE, EXIT_OK, emit, load_instance


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="verify a mapping instance")
    parser.add_argument("--kind", choices=[k.value for k in CheckKind], required=True)
    parser.add_argument("--instance", type=Path, required=True)
    for name in ("M", "D", "F", "R"):
        parser.add_argument(f"--{name}", help=f"override constant {name} (rational)")
    parser.add_argument("--out", type=Path)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    if instance.mapping is None:
        raise ValueError("instance has no mapping to verify")
    base = instance.constants.model_dump() if instance.constants else {"M": 1}
    base.update({k: getattr(args, k) for k in ("M", "D", "F", "R") if getattr(args, k) is not None})
    constants = ConstantsModel.model_validate(base)
    A, B = instance.A.to_domain(), instance.B.to_domain()
    T = instance.mapping.to_domain()

    kind = CheckKind(args.kind)
    if kind is CheckKind.MARKOV:
        violation = verify_markov(A, B, T, constants.markov())
    elif kind is CheckKind.ROOTED:
        violation = verify_rooted(A, B, T, constants.ri())
    elif kind is CheckKind.INCREASING:
        T.check_against(A, B)
        violation = verify_increasing(T)
    else:
        violation = verify_rough_isometry(A, B, T, constants.ri())

    cut = find_cut_point(A, B, T)
    emit(
        {
            "kind": kind.value,
            "ok": violation is None,
            "violation": None if violation is None else ViolationModel.from_domain(violation).model_dump(),
            "cut_point": None if cut is None else str(cut),
        },
        args.out,
    )
    return EXIT_OK if violation is None else EXIT_DOMAIN_FAILURE
