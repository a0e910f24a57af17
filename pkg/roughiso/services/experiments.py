"""Monte-Carlo experiment runner.

Pipeline Steps:
1. Validate the spec and expand its grid into cells
2. Run the seeded trials of each cell (optionally on a process pool)
3. Aggregate outcomes into report cells with exact binomial intervals
4. Write the NDJSON report and the CSV summary
"""
from __future__ import annotations

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, MutableMapping, Optional
from uuid import uuid4

import numpy as np
import pandas as pd

from ..config import get_settings
from ..libs.exceptions import HorizonTooSmallError, StreamExhaustedError
from ..libs.sampling import GapSampler
from ..libs.seeding import trial_seed
from ..libs.stats import binomial_sigma, chi_square_fit, exact_binomial_interval, geometric_pmf
from ..libs.utils import dump_json, ensure_directory, write_ndjson
from ..models.experiments import ExperimentKind, ExperimentSpec, ReportCell
from .blocks import long_gap_count, sample_rooted_blue, sample_rooted_red
from .construct import (
    CombSpec,
    Direction,
    Params,
    block_map,
    comb_search,
    default_params,
    divide_subsegments,
)
from .induction import construct, trivial_baseline
from .oracle import SearchBudget, exists_general_ri
from .pointsets import PointSet
from .processes import sample_bernoulli_rooted
from .verify import (
    RiConstants,
    event_Ew,
    exact_horizon,
    markov_to_increasing_constants,
    verify_markov,
    verify_rooted,
)

logger = logging.getLogger(__name__)


class ExperimentStatus(str, Enum):
    """Experiment lifecycle states."""

    PENDING = "pending"
    RUNNING = "running"
    WRITING = "writing"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class ExperimentState:
    experiment_id: str
    status: ExperimentStatus
    message: Optional[str] = None
    cells_completed: int = 0
    cells: list[ReportCell] = field(default_factory=list)
    files_created: list[str] = field(default_factory=list)


# -- trial functions -----------------------------------------------------------
#
# Each takes the cell parameters, the master seed and a trial index and
# returns a small JSON-friendly outcome; they live at module level so that a
# process pool can pickle them.


def _params_for(cell: dict[str, Any]) -> Params:
    p = default_params(int(cell["n"]))
    overrides = {k: cell[k] for k in ("M", "F", "R", "K") if k in cell}
    return p.with_overrides(**overrides) if overrides else p


def success_curve_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    p = _params_for(cell)
    try:
        result = construct(p, trial_seed(master, index), cell.get("max_points"))
    except StreamExhaustedError:
        return {"success": False, "reason": "exhausted", "stage": None}
    if not result.success:
        return {"success": False, "reason": result.reason, "stage": result.stage}
    violation = verify_markov(result.A, result.B, result.T, p.markov)
    if violation is None:
        rooted = markov_to_increasing_constants(p.markov)
        violation = verify_rooted(result.A, result.B, result.T, rooted)
    if violation is not None:
        logger.warning(f"trial {index}: construction failed verification: {violation.kind.value}")
        return {"success": False, "reason": "unverified", "stage": None}
    return {"success": True, "reason": None, "stage": None, "stages": len(result.stages) - 1}


def red_segment_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    M, K = int(cell["M"]), int(cell["K"])
    red = sample_rooted_red(M, K, trial_seed(master, index))
    longs = [g for g in red.gaps if g > M]
    return {"X": long_gap_count(red, M), "long_total": int(sum(longs))}


def comb_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    spec = _comb_spec(cell)
    limit = math.ceil(int(cell["a"]) * 2 ** int(cell["s"]))
    sampler = GapSampler(trial_seed(master, index).generator())
    size = limit + spec.span
    gaps = sampler.truncated(int(cell["M"]), size) if "M" in cell else sampler.geometric_half(size)
    match = comb_search(gaps, spec, limit)
    return {"exceeds": match is None, "Z": None if match is None else match.position}


def _certified_Ew(A: PointSet, L: Any, M: int, horizon: int) -> Optional[bool]:
    try:
        return event_Ew(A, 0, L, M, horizon)
    except HorizonTooSmallError:
        return None


def e0_ew_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    """``E0`` on the first ``K`` gaps; ``Ew`` at ``w = 0`` up to the certified horizon.

    ``Ew`` is ``None`` when the sampled prefix is too short to certify a
    negative answer.
    """

    M, K, L = int(cell["M"]), int(cell["K"]), cell.get("L", 0)
    count = int(cell.get("points", max(K, 64) + 64 * M * M))
    A = sample_bernoulli_rooted(count, "1/2", trial_seed(master, index))
    e0 = all(g <= M for g in A.gaps[:K])
    if "horizon" in cell:
        horizon = int(cell["horizon"])
    else:
        horizon = math.ceil(exact_horizon(A, 0, M))
    return {
        "E0": e0,
        "Ew": _certified_Ew(A, str(L), M, horizon),
        "distance_only": _certified_Ew(A, 0, M, horizon),
    }


def baseline_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    n = int(cell["n"])
    seed = trial_seed(master, index)
    A = sample_bernoulli_rooted(n, "1/2", seed.child("A"))
    B = sample_bernoulli_rooted(n, "1/2", seed.child("B"))
    T, c = trivial_baseline(A, B, n)
    return {
        "M": float(c.M),
        "max_gap": max(A.gaps + B.gaps, default=1),
        "verified": verify_rooted(A, B, T, c) is None,
    }


def optimality_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    """Bad event for the optimality bound; with ``conditioned`` the event is forced.

    ``A`` must contain ``0 .. ceil(15q) + 2`` and ``B``'s first gap must exceed
    ``30q + 1/2``.  Conditioned samples are handed to the exhaustive oracle.
    """

    q = int(cell.get("q", 1))
    lead = math.ceil(15 * q) + 2
    window = int(cell.get("window", lead + 1))
    codomain_points = int(cell.get("codomain_points", 20))
    seed = trial_seed(master, index)
    sampler_a = GapSampler(seed.child("A").generator())
    sampler_b = GapSampler(seed.child("B").generator())
    if cell.get("conditioned", False):
        a_gaps = [1] * lead + sampler_a.geometric_half(max(window - lead - 1, 0)).tolist()
        b_gaps = sampler_b.shifted(30 * q, 1).tolist()
        b_gaps += sampler_b.geometric_half(codomain_points - 2).tolist()
    else:
        a_gaps = sampler_a.geometric_half(window - 1).tolist()
        b_gaps = sampler_b.geometric_half(codomain_points - 1).tolist()
    A = PointSet.from_gaps(a_gaps)
    B = PointSet.from_gaps(b_gaps)
    event = all(g == 1 for g in A.gaps[:lead]) and 2 * B.gaps[0] > 60 * q + 1
    outcome: dict[str, Any] = {"event": event, "certified": None}
    if event and cell.get("conditioned", False):
        budget = SearchBudget.from_settings()
        c = RiConstants(30 * q, "1/2", 10 * q)
        outcome["certified"] = exists_general_ri(A, B, c, budget, rooted=True) is None
    return outcome


def subsegment_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    L, M, Z = int(cell["L"]), int(cell["M"]), int(cell["Z"])
    blue = sample_rooted_blue(L, M, trial_seed(master, index))
    _, Y = divide_subsegments(blue, Z)
    return {"Y": Y, "exceeds": Y * Z > 3 * L}


def stage_trial(cell: dict[str, Any], master: int, index: int) -> dict[str, Any]:
    p = _params_for(cell)
    seed = trial_seed(master, index)
    U1 = sample_rooted_blue(int(cell["L1"]), p.M, seed.child("U1"))
    V = sample_rooted_red(p.M, p.K, seed.child("V"))
    U2 = sample_rooted_blue(int(cell["L2"]), p.M, seed.child("U2"))
    result = block_map(U1, V, U2, p)
    outcome: dict[str, Any] = {}
    for direction in (Direction.FORWARD, Direction.REVERSE):
        mapped = result.outcomes[direction]
        verified = None
        if mapped.success and mapped.mapping is not None:
            domain = result.W if direction is Direction.FORWARD else U2.prefix(len(mapped.mapping))
            codomain = PointSet(mapped.mapping.codomain)
            violation = verify_markov(PointSet(domain.points), codomain, mapped.mapping, p.markov)
            verified = violation is None
        outcome[direction.value] = {
            "success": mapped.success,
            "reason": mapped.reason,
            "verified": verified,
        }
    return outcome


def _comb_spec(cell: dict[str, Any]) -> CombSpec:
    m, s = int(cell["m"]), int(cell["s"])
    d = int(cell.get("d", 0))
    return CombSpec(a=(s + 1,) * m, d=(d,) * (m - 1))


# -- aggregation -----------------------------------------------------------------


@dataclass
class _Tally:
    successes: int
    failures: dict[str, int] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)


def _interval_extra(prefix: str, hits: int, trials: int) -> dict[str, Any]:
    low, high = exact_binomial_interval(hits, trials)
    return {f"{prefix}_estimate": hits / trials, f"{prefix}_ci": [low, high]}


def _tally_success_curve(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    failures = Counter(o["reason"] for o in outcomes if not o["success"])
    stages = Counter(str(o["stage"]) for o in outcomes if not o["success"] and o["stage"] is not None)
    p = _params_for(cell)
    return _Tally(
        successes=sum(o["success"] for o in outcomes),
        failures=dict(sorted(failures.items())),
        extras={"params": p.as_dict(), "failure_stages": dict(sorted(stages.items()))},
    )


def _tally_red(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    M, K = int(cell["M"]), int(cell["K"])
    n = int(cell["n"])
    log2n = math.log2(n)
    threshold = math.sqrt(log2n) / 8
    tail_x = sum(o["X"] > threshold for o in outcomes)
    tail_b = sum(o["long_total"] >= 3 * log2n for o in outcomes)
    theta = math.exp(K * math.log1p(-(2.0**-M)))
    fit = chi_square_fit(np.asarray([o["X"] for o in outcomes]), geometric_pmf(theta), 1)
    extras = {
        "chi_square": {"statistic": fit.statistic, "pvalue": fit.pvalue, "bins": len(fit.observed)},
        "min_X": min(o["X"] for o in outcomes),
    }
    extras.update(_interval_extra("long_total_tail", tail_b, len(outcomes)))
    return _Tally(successes=tail_x, extras=extras)


def _tally_comb(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    trials = len(outcomes)
    exceed = sum(o["exceeds"] for o in outcomes)
    m, a, s = int(cell["m"]), int(cell["a"]), int(cell["s"])
    bound = math.exp(-a / (m * m))
    sigma = binomial_sigma(bound, trials)
    return _Tally(
        successes=exceed,
        extras={
            "bound": bound,
            "flagged": exceed / trials > bound + 3 * sigma,
            "exact_single_tooth": (1 - 2.0**-s) ** math.ceil(a * 2**s) if m == 1 else None,
        },
    )


def _tally_e0(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    M, K = int(cell["M"]), int(cell["K"])
    trials = len(outcomes)
    hits = sum(o["E0"] for o in outcomes)
    exact = (1 - 2.0**-M) ** K
    low, high = exact_binomial_interval(hits, trials)
    extras: dict[str, Any] = {"e0_exact": exact, "e0_in_interval": low <= exact <= high}
    for key, prefix in (("Ew", "ew"), ("distance_only", "distance_only")):
        certified = [o[key] for o in outcomes if o[key] is not None]
        extras[f"{prefix}_uncertified"] = trials - len(certified)
        if certified:
            extras.update(_interval_extra(prefix, sum(certified), len(certified)))
    return _Tally(successes=hits, extras=extras)


def _tally_baseline(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    measured = pd.Series([o["M"] for o in outcomes], dtype=float)
    n = int(cell["n"])
    return _Tally(
        successes=sum(o["verified"] for o in outcomes),
        failures={"unverified": sum(not o["verified"] for o in outcomes)},
        extras={
            "baseline_median": float(measured.median()),
            "baseline_quantiles": [float(v) for v in measured.quantile([0.1, 0.5, 0.9])],
            "baseline_below_max_gap": sum(o["M"] < o["max_gap"] for o in outcomes),
            "construction_M": default_params(n).M,
        },
    )


def _tally_optimality(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    q = int(cell.get("q", 1))
    events = sum(o["event"] for o in outcomes)
    certified = sum(bool(o["certified"]) for o in outcomes)
    if cell.get("conditioned", False):
        return _Tally(
            successes=certified,
            failures={"not_certified": events - certified, "no_event": len(outcomes) - events},
            extras={"events": events},
        )
    return _Tally(successes=events, extras={"bound": 2.0 ** (-45 * q - 3)})


def _tally_subsegments(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    counts = [o["Y"] for o in outcomes]
    return _Tally(
        successes=sum(o["exceeds"] for o in outcomes),
        extras={"mean_Y": float(np.mean(counts)), "max_Y": int(max(counts))},
    )


def _tally_stage(cell: dict[str, Any], outcomes: list[dict[str, Any]]) -> _Tally:
    forward = [o["forward"] for o in outcomes]
    reverse = [o["reverse"] for o in outcomes]
    failures = Counter(f["reason"] for f in forward if not f["success"])
    unverified = sum(f["verified"] is False for f in forward + reverse)
    extras = {"unverified": unverified}
    extras.update(_interval_extra("reverse", sum(r["success"] for r in reverse), len(outcomes)))
    return _Tally(
        successes=sum(f["success"] for f in forward),
        failures=dict(sorted(failures.items())),
        extras=extras,
    )


Trial = Callable[[dict[str, Any], int, int], dict[str, Any]]
Tally = Callable[[dict[str, Any], list[dict[str, Any]]], _Tally]

KINDS: dict[ExperimentKind, tuple[Trial, Tally]] = {
    ExperimentKind.SUCCESS_CURVE: (success_curve_trial, _tally_success_curve),
    ExperimentKind.RED_SEGMENT_TAILS: (red_segment_trial, _tally_red),
    ExperimentKind.COMB_TAILS: (comb_trial, _tally_comb),
    ExperimentKind.E0_AND_EW: (e0_ew_trial, _tally_e0),
    ExperimentKind.BASELINE_COMPARISON: (baseline_trial, _tally_baseline),
    ExperimentKind.OPTIMALITY_EVENT: (optimality_trial, _tally_optimality),
    ExperimentKind.SUBSEGMENT_TAILS: (subsegment_trial, _tally_subsegments),
    ExperimentKind.STAGE_SUCCESS: (stage_trial, _tally_stage),
}


# -- runner ---------------------------------------------------------------------


def run_trials(
    trial: Trial, cell: dict[str, Any], master: int, trials: int, jobs: int = 1
) -> list[dict[str, Any]]:
    """Outcomes in trial-index order regardless of ``jobs``."""

    task = partial(trial, cell, master)
    if jobs <= 1:
        return [task(index) for index in range(trials)]
    with Pool(processes=jobs) as pool:
        return pool.map(task, range(trials), chunksize=max(1, trials // (4 * jobs)))


def strip_timing(cells: list[ReportCell]) -> list[dict[str, Any]]:
    return [cell.model_dump(mode="json", exclude={"wall_time"}) for cell in cells]


class ExperimentRunner:
    """Run experiment specs cell by cell and write their reports."""

    def __init__(self, status_store: Optional[MutableMapping[str, ExperimentState]] = None):
        self.status_store: MutableMapping[str, ExperimentState] = (
            status_store if status_store is not None else {}
        )

    def run(
        self,
        spec: ExperimentSpec,
        jobs: Optional[int] = None,
        experiment_id: Optional[str] = None,
    ) -> ExperimentState:
        """
        Execute every cell of ``spec``.

        Args:
            spec: Validated experiment specification
            jobs: Worker processes; defaults to the spec, then to the settings
            experiment_id: Optional id (generated if not provided)

        Returns:
            ExperimentState with the report cells
        """
        experiment_id = experiment_id or str(uuid4())
        state = ExperimentState(experiment_id=experiment_id, status=ExperimentStatus.PENDING)
        self.status_store[experiment_id] = state
        workers = jobs or spec.jobs or get_settings().jobs
        trial, tally = KINDS[spec.kind]

        try:
            state.status = ExperimentStatus.RUNNING
            for cell in spec.grid:
                started = time.perf_counter()
                outcomes = run_trials(trial, cell, spec.seed, spec.trials, workers)
                counted = tally(cell, outcomes)
                low, high = exact_binomial_interval(counted.successes, spec.trials)
                state.cells.append(
                    ReportCell(
                        name=spec.name,
                        kind=spec.kind,
                        cell=cell,
                        trials=spec.trials,
                        successes=counted.successes,
                        estimate=counted.successes / spec.trials,
                        ci_low=low,
                        ci_high=high,
                        failures=counted.failures,
                        extras=counted.extras,
                        wall_time=time.perf_counter() - started,
                    )
                )
                state.cells_completed += 1
                logger.info(
                    f"{spec.name}: cell {dump_json(cell)} done ({counted.successes}/{spec.trials})"
                )

            if spec.output is not None:
                state.status = ExperimentStatus.WRITING
                state.files_created.extend(str(p) for p in write_report(state.cells, spec.output))
            state.status = ExperimentStatus.COMPLETED
        except Exception as exc:
            logger.exception(f"experiment {spec.name} failed")
            state.status = ExperimentStatus.FAILED
            state.message = str(exc)
            raise
        return state


def write_report(cells: list[ReportCell], output: Path) -> list[Path]:
    """NDJSON report at ``output`` plus a CSV summary next to it."""

    output = Path(output)
    ensure_directory(output.parent)
    ndjson = write_ndjson(output, [cell.model_dump(mode="json") for cell in cells])
    frame = pd.DataFrame(
        [
            {
                "name": cell.name,
                "kind": cell.kind.value,
                "cell": dump_json(cell.cell),
                "trials": cell.trials,
                "successes": cell.successes,
                "estimate": cell.estimate,
                "ci_low": cell.ci_low,
                "ci_high": cell.ci_high,
                "failures": dump_json(cell.failures),
                "wall_time": cell.wall_time,
            }
            for cell in cells
        ]
    )
    csv_path = output.with_suffix(".csv")
    frame.to_csv(csv_path, index=False)
    return [ndjson, csv_path]


def _run(
    kind: ExperimentKind, grid: list[dict[str, Any]], trials: int, seed: int, jobs: int = 1
) -> list[ReportCell]:
    spec = ExperimentSpec(name=kind.value, kind=kind, grid=grid, trials=trials, seed=seed)
    return ExperimentRunner().run(spec, jobs=jobs).cells


def run_success_curve(
    n_list: list[int],
    trials: int,
    seed: int,
    overrides: Optional[dict[str, int]] = None,
    jobs: int = 1,
) -> list[ReportCell]:
    grid = [{"n": n, **(overrides or {})} for n in n_list]
    return _run(ExperimentKind.SUCCESS_CURVE, grid, trials, seed, jobs)


def run_red_segment_tails(M: int, K: int, n: int, trials: int, seed: int) -> ReportCell:
    return _run(ExperimentKind.RED_SEGMENT_TAILS, [{"M": M, "K": K, "n": n}], trials, seed)[0]


def run_comb_tails(grid: list[dict[str, Any]], trials: int, seed: int) -> list[ReportCell]:
    return _run(ExperimentKind.COMB_TAILS, grid, trials, seed)


def run_e0_and_ew(
    M: int, K: int, L_grid: list[Any], trials: int, seed: int, horizon: Optional[int] = None
) -> list[ReportCell]:
    extra = {"horizon": horizon} if horizon else {}
    grid = [{"M": M, "K": K, "L": L, **extra} for L in L_grid]
    return _run(ExperimentKind.E0_AND_EW, grid, trials, seed)


def run_baseline_comparison(n_list: list[int], trials: int, seed: int) -> list[ReportCell]:
    return _run(ExperimentKind.BASELINE_COMPARISON, [{"n": n} for n in n_list], trials, seed)


def run_optimality_event(q: int, trials: int, seed: int, conditioned: bool = False) -> ReportCell:
    grid = [{"q": q, "conditioned": conditioned}]
    return _run(ExperimentKind.OPTIMALITY_EVENT, grid, trials, seed)[0]
