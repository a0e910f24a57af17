"""``experiment run``: execute an experiment spec file."""
from __future__ import annotations

import argparse
from pathlib import Path

from ..config import get_settings
from ..config.settings import load_settings_or_default
from ..libs.utils import read_json
from ..models import ExperimentSpec
from ..services.experiments import ExperimentRunner, ExperimentStatus, strip_timing
from .common import EXIT_DOMAIN_FAILURE, EXIT_OK, emit


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("experiment", help="Monte-Carlo experiments")
    actions = parser.add_subparsers(dest="action", required=True)
    run_parser = actions.add_parser("run", help="run an experiment spec")
    run_parser.add_argument("spec", type=Path)
    run_parser.add_argument("--jobs", type=int, help="worker processes")
    run_parser.add_argument("--out", type=Path, help="report path (overrides the spec)")
    run_parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    raw = read_json(args.spec)
    defaults = load_settings_or_default(get_settings().settings_file).EXPERIMENT_DEFAULTS
    for key, value in defaults.items():
        raw.setdefault(key, value)
    spec = ExperimentSpec.model_validate(raw)
    if args.out is not None:
        spec = spec.model_copy(update={"output": args.out})
    state = ExperimentRunner().run(spec, jobs=args.jobs)
    if spec.output is None:
        for record in strip_timing(state.cells):
            emit(record)
    return EXIT_OK if state.status is ExperimentStatus.COMPLETED else EXIT_DOMAIN_FAILURE
