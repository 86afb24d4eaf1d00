"""
Experiment Service - the Monte Carlo harness.

For every sweep point and trial the harness synthesizes a GDP-view world,
injects adversaries, and estimates every question with CIUV and the four
baselines. Errors are ``|estimate - truth|``; each method's errors over all
questions and trials form one :class:`ResultRow`.

Trial seeds come from ``SeedSequence([seed, trial])`` and are shared by all
sweep points, so a sweep compares the same worlds under different factors.
Each trial seed spawns four independent streams: world, adversary
selection, CIUV probe sampling and the K-sources prior sample.
"""

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import ScenarioConfig, SweepSpec
from src.core.constants import ErrorSignProfiles, FilePatterns, MethodNames, GdpViews
from src.core.logging import get_logger
from src.models.orchestration import StoppingConfig
from src.models.reliability import ProbeSet
from src.models.results import ERRORS_COLUMN, RESULT_COLUMNS, ResultRow
from src.models.simworld import AdversaryConfig, ImprovementConfig
from src.repositories.dataset_repository import synthesize_gdp_views
from src.repositories.simulated_environment import SimulatedEnvironment, inject_adversaries
from src.services.baseline_service import BaselineService, build_trust_ranking
from src.services.ciuv_service import CIUVService
from src.services.reliability_service import estimate_profiles, sample_probes
from src.utils.file_utils import (
    ensure_dir,
    read_records_csv,
    write_jsonl,
    write_records_csv,
    write_xy_csv,
)

logger = get_logger(__name__)

BASE_LABEL = "base"


@dataclass(frozen=True)
class TrialSeeds:
    """Integer seeds of the four streams of one trial."""

    world: int
    adversary: int
    probes: int
    prior: int

    @classmethod
    def derive(cls, master_seed: int, trial: int) -> "TrialSeeds":
        """Counter scheme: ``SeedSequence([master_seed, trial])`` spawns the four streams."""
        children = np.random.SeedSequence([master_seed, trial]).spawn(4)
        world, adversary, probes, prior = (int(c.generate_state(1)[0]) for c in children)
        return cls(world=world, adversary=adversary, probes=probes, prior=prior)


@dataclass
class CellResult:
    """Output of one ``(sweep point, trial)`` cell."""

    label: str
    trial: int
    question_ids: List[str]
    errors: Dict[str, List[float]]
    trajectory: List[Dict[str, Any]]


@dataclass
class ExperimentResult:
    """Everything an experiment produced, ready to be written."""

    rows: List[ResultRow] = field(default_factory=list)
    trajectory: List[Dict[str, Any]] = field(default_factory=list)
    plot_series: Dict[str, Tuple[List[float], List[float]]] = field(default_factory=dict)

    def rows_for(self, method: str) -> List[ResultRow]:
        """Rows of one method in sweep order."""
        return [row for row in self.rows if row.method == method]

    def write(self, output_dir: Path) -> Dict[str, Path]:
        """
        Write ``results.csv``, ``trajectory.jsonl`` and ``plotdata/*.csv``.

        Args:
            output_dir: Target directory, created if missing

        Returns:
            Paths of the written files by kind
        """
        output_dir = ensure_dir(Path(output_dir))
        columns = RESULT_COLUMNS + ScenarioConfig.field_names() + [ERRORS_COLUMN]
        results_path = write_records_csv(
            [row.to_record() for row in self.rows], columns, output_dir / FilePatterns.RESULTS
        )
        trajectory_path = output_dir / FilePatterns.TRAJECTORY
        write_jsonl(self.trajectory, trajectory_path)
        plot_dir = ensure_dir(output_dir / FilePatterns.PLOT_DIR)
        for name, (xs, ys) in sorted(self.plot_series.items()):
            write_xy_csv(xs, ys, plot_dir / f"{name}.csv")
        logger.info(
            f"Wrote {len(self.rows)} result rows and {len(self.plot_series)} plot series "
            f"to {output_dir}"
        )
        return {"results": results_path, "trajectory": trajectory_path, "plotdata": plot_dir}


def plateau_cost(
    errors: Sequence[float], cumulative_costs: Sequence[float], band: float = 0.1
) -> float:
    """
    Cost spent until the error settles.

    The plateau starts at the first iteration after which every error stays
    within ``band`` times the total drop (largest error minus final error)
    of the final error. A flat series settles at the first iteration.

    Args:
        errors: Error per iteration, usually averaged over runs
        cumulative_costs: Cumulative cost per iteration
        band: Fraction of the total drop still counted as settled, in ``[0, 1)``

    Returns:
        Cumulative cost at the start of the plateau
    """
    if len(errors) == 0 or len(errors) != len(cumulative_costs):
        raise ValueError("errors and cumulative_costs must be non-empty and equally long")
    if not 0 <= band < 1:
        raise ValueError(f"band must lie in [0, 1), got {band}")
    final = errors[-1]
    allowed = band * (max(errors) - final)
    start = len(errors) - 1
    while start > 0 and abs(errors[start - 1] - final) <= allowed:
        start -= 1
    return float(cumulative_costs[start])


def iterations_to_reach(errors: Sequence[float], level: float) -> int:
    """Index of the first iteration whose error is at most ``level``; ``len(errors)`` if none."""
    for index, error in enumerate(errors):
        if error <= level:
            return index
    return len(errors)


def series_label(factor: str, value: str) -> str:
    """File-safe label of a sweep point, e.g. ``mv_3``."""
    if not factor:
        return BASE_LABEL
    return re.sub(r"[^A-Za-z0-9.\-]+", "_", f"{factor}_{value}")


def run_cell(
    scenario: ScenarioConfig, trial: int, label: str, factor: str = "", value: str = ""
) -> CellResult:
    """
    Run one trial of one scenario.

    Args:
        scenario: Scenario to run
        trial: Trial index, combined with the master seed
        label: Sweep point label
        factor: Swept field, echoed into trajectory records
        value: Swept value, echoed into trajectory records

    Returns:
        Per-method errors in question order and the CIUV trajectories
    """
    seeds = TrialSeeds.derive(scenario.seed, trial)
    world, specs = synthesize_gdp_views(
        seeds.world,
        scenario.n_questions,
        growth_range=(scenario.growth_low, scenario.growth_high),
        error_signs=ErrorSignProfiles.signs_for(scenario.error_sign_profile),
        include_ground_truth_view=True,
    )
    participants = [
        s
        for s in specs
        if scenario.include_ground_truth_view or s.source_id != GdpViews.GROUND_TRUTH_VIEW
    ]
    participants = inject_adversaries(
        participants, AdversaryConfig(mv=scenario.mv, mf=scenario.mf, seed=seeds.adversary)
    )
    env = SimulatedEnvironment(
        world=world,
        specs=participants,
        mf=scenario.mf,
        improvement=ImprovementConfig(
            if_factor=scenario.if_factor, a=scenario.a, exponent_sign=scenario.exponent_sign
        ),
        stimulate_honest=scenario.stimulate_honest,
    )

    ciuv = CIUVService(
        stopping=StoppingConfig(
            R=scenario.R, D=scenario.D, e_T=scenario.e_T, max_iterations=scenario.max_iterations
        ),
        n_probes=scenario.n_probe_questions,
        truth_mode=scenario.truth_mode,
        resample_probes=scenario.resample_probes,
    )
    baselines = BaselineService(k=scenario.k)
    probe_seeds = np.random.SeedSequence(seeds.probes).spawn(len(world.questions))
    prior_rng = np.random.default_rng(seeds.prior)

    errors: Dict[str, List[float]] = {method: [] for method in MethodNames.ALL}
    trajectory: List[Dict[str, Any]] = []
    questions = list(world.questions)

    with env:
        for index, target in enumerate(questions):
            env.reset()
            truth = env.truth_of(target.question_id)
            pool = questions[:index] + questions[index + 1 :]

            prior_questions = sample_probes(pool, scenario.n_probe_questions, prior_rng)
            prior = ProbeSet(
                questions=tuple(prior_questions), reports=tuple(env.answer(prior_questions))
            )
            ranking = build_trust_ranking(estimate_profiles(prior))
            views = env.current_answers(target.question_id)
            for method, estimate in baselines.estimate_all(views, ranking).items():
                errors[method].append(abs(estimate - truth))

            run = ciuv.run(
                env, pool, target, seed=int(probe_seeds[index].generate_state(1)[0])
            )
            errors[MethodNames.CIUV].append(abs(run.estimate.u_star - truth))

            cumulative = 0
            for record in run.history:
                cumulative += record.cost
                entry = record.to_dict()
                entry.update(
                    {
                        "sweep_factor": factor,
                        "sweep_value": value,
                        "trial": trial,
                        "question_id": target.question_id,
                        "error": abs(record.estimate.u_star - truth),
                        "cumulative_cost": cumulative,
                        "stop_reason": run.stop_reason.value,
                    }
                )
                trajectory.append(entry)

    return CellResult(
        label=label,
        trial=trial,
        question_ids=[q.question_id for q in questions],
        errors=errors,
        trajectory=trajectory,
    )


def _run_cell_args(args: Tuple[ScenarioConfig, int, str, str, str]) -> CellResult:
    return run_cell(*args)


def _cost_error_series(trajectory: Sequence[Dict[str, Any]]) -> Tuple[List[float], List[float]]:
    """Mean cumulative cost against mean error per iteration index, runs carried forward."""
    runs: Dict[Tuple[int, str], List[Dict[str, Any]]] = {}
    for entry in trajectory:
        runs.setdefault((entry["trial"], entry["question_id"]), []).append(entry)
    length = max(len(r) for r in runs.values())
    costs = np.zeros((len(runs), length))
    errs = np.zeros((len(runs), length))
    for i, records in enumerate(runs.values()):
        for j in range(length):
            record = records[min(j, len(records) - 1)]
            costs[i, j] = record["cumulative_cost"]
            errs[i, j] = record["error"]
    return [float(c) for c in costs.mean(axis=0)], [float(e) for e in errs.mean(axis=0)]


class ExperimentService:
    """Runs scenarios and sweeps of scenarios."""

    def __init__(self, workers: int = 1):
        """
        Initialize Experiment Service.

        Args:
            workers: Processes used for independent cells; 1 runs in-process
        """
        self.workers = max(1, int(workers))

    def _map(self, cells: List[Tuple[ScenarioConfig, int, str, str, str]]) -> List[CellResult]:
        if self.workers == 1 or len(cells) == 1:
            return [_run_cell_args(cell) for cell in cells]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(_run_cell_args, cells))

    def run_experiment(
        self, config: ScenarioConfig, sweep: Optional[SweepSpec] = None
    ) -> ExperimentResult:
        """
        Run every method on every sweep point and trial.

        Args:
            config: Base scenario
            sweep: Optional factor to vary; each value is re-validated

        Returns:
            Result rows in sweep order (methods in fixed order), trajectories
            and plot series
        """
        points: List[Tuple[str, str, ScenarioConfig]]
        if sweep is None:
            points = [("", "", config)]
        else:
            points = [(sweep.factor, value, scenario) for value, scenario in sweep.configs(config)]

        cells = [
            (scenario, trial, series_label(factor, value), factor, value)
            for factor, value, scenario in points
            for trial in range(scenario.n_trials)
        ]
        logger.info(
            f"Running {len(points)} sweep point(s) x {config.n_trials} trial(s) "
            f"with {self.workers} worker(s)"
        )
        outcomes = self._map(cells)

        result = ExperimentResult()
        for factor, value, scenario in points:
            label = series_label(factor, value)
            point_cells = [cell for cell in outcomes if cell.label == label]
            point_cells.sort(key=lambda cell: cell.trial)
            for method in MethodNames.ALL:
                series = [e for cell in point_cells for e in cell.errors[method]]
                row = ResultRow.from_errors(
                    method, series, scenario, sweep_factor=factor, sweep_value=value
                )
                result.rows.append(row)
                per_question = np.array([cell.errors[method] for cell in point_cells])
                xs = [float(i) for i in range(1, per_question.shape[1] + 1)]
                result.plot_series[f"{label}__{method}"] = (
                    xs,
                    [float(y) for y in per_question.mean(axis=0)],
                )
            point_trajectory = [entry for cell in point_cells for entry in cell.trajectory]
            result.trajectory.extend(point_trajectory)
            result.plot_series[f"{label}__cost_error"] = _cost_error_series(point_trajectory)
            ciuv_row = result.rows[-len(MethodNames.ALL)]
            logger.info(
                f"Sweep point {label}: CIUV mean error {ciuv_row.mean_error:.4f}",
                extra={"extra_fields": {"label": label, "mean_error": ciuv_row.mean_error}},
            )
        return result

    def run_and_write(
        self, config: ScenarioConfig, output_dir: Path, sweep: Optional[SweepSpec] = None
    ) -> ExperimentResult:
        """Run an experiment and write its output files."""
        result = self.run_experiment(config, sweep)
        result.write(output_dir)
        return result


def load_results(path: Path) -> List[ResultRow]:
    """Parse a ``results.csv`` written by :meth:`ExperimentResult.write`."""
    return [ResultRow.from_record(record) for record in read_records_csv(path)]


def summarize(rows: Iterable[ResultRow]) -> List[str]:
    """One human-readable line per row."""
    lines = []
    for row in rows:
        prefix = f"{row.sweep_factor}={row.sweep_value} " if row.sweep_factor else ""
        lines.append(f"{prefix}{row.method:<10} mean={row.mean_error:.4f} std={row.std_dev:.4f}")
    return lines
