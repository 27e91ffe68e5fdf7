"""Benchmark harness: config parsing, paired runs, summaries.

An experiment is a grid of (criterion, seed). For each seed, one
dataset is generated (or one CSV split drawn) and every criterion
consumes the byte-identical splits, so accuracy differences between
criteria are paired comparisons. Each run records the post-loop test
accuracy next to the supervised baseline (fit on the initial labeled
split only), both thresholded at probability 0.5.

Outputs in the experiment directory:

* ``trace_<criterion>_<seed>.txt`` -- one selection step per line
* ``results.csv``   -- criterion,seed,test_accuracy,baseline_accuracy,status
* ``summary.csv``   -- criterion,mean,sd,mean_paired_diff_vs_confidence,n_runs
* ``arms.csv``      -- criterion name -> kind (lets summarize re-run from disk)
* ``split_checksums.csv`` -- seed -> SHA-256 over the split arrays

Reals in CSV files carry 12 significant digits; rerunning a config
reproduces every output byte for byte. Failed runs (e.g. divergence
under a flat prior) are recorded as rows with empty accuracies rather
than retried: the failure mode is itself a finding about the criterion
and prior combination.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from . import data as datagen
from .criteria import (
    AGGREGATIONS,
    AGGREGATION_WEIGHTED_SUM,
    CONFIDENCE,
    CRITERION_KINDS,
    MULTI_OBJECTIVE,
    SUPERSET,
    CriterionSpec,
    ObjectiveSpec,
)
from .engine import StoppingRule, run_pseudo_labeling
from .exceptions import ConfigError, NoSuccessfulRunsError, PseudoSelectError
from .glm import DEFAULT_LEARNER, LabeledSet, ModelFit, PriorSpec, predict_proba_rows
from .rng import derive_seeds


@dataclass(frozen=True)
class CsvSource:
    path: str
    label_column: str
    positive_label: str


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one benchmark."""

    criteria: tuple[tuple[str, CriterionSpec], ...]
    seeds: tuple[int, ...]
    stopping: StoppingRule
    prior: PriorSpec
    output_dir: str
    synthetic: datagen.SyntheticSpec | None = None
    csv_source: CsvSource | None = None
    split: datagen.SplitSpec | None = None

    def __post_init__(self):
        if not self.criteria:
            raise ConfigError("need at least one criterion")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        names = [name for name, _ in self.criteria]
        if len(set(names)) != len(names):
            raise ConfigError(f"criterion names must be unique, got {names}")
        if (self.synthetic is None) == (self.csv_source is None):
            raise ConfigError("exactly one of synthetic or csv data must be configured")
        if self.split is None:
            raise ConfigError("a split section is required")
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def confidence_arm(self) -> str | None:
        """Name of the first confidence-kind arm; the paired-difference baseline."""
        for name, spec in self.criteria:
            if spec.kind == CONFIDENCE:
                return name
        return None


@dataclass(frozen=True)
class RunRecord:
    criterion: str
    seed: int
    test_accuracy: float | None
    baseline_accuracy: float | None
    status: str  # "ok" or "failed"
    trace_path: str | None
    error: str | None = None


@dataclass(frozen=True)
class CriterionSummary:
    criterion: str
    mean: float
    sd: float
    sd_degenerate: bool  # one run only: sd is reported as 0 by convention
    mean_paired_diff_vs_confidence: float | None
    n_runs: int


@dataclass(frozen=True)
class ExperimentResult:
    runs: tuple[RunRecord, ...]
    confidence_arm: str | None
    output_dir: str


def classification_accuracy(model: ModelFit, test: LabeledSet) -> float:
    """Share of test rows classified correctly at the 0.5 threshold."""
    predictions = (predict_proba_rows(model, test.x) > 0.5).astype(int)
    return float(np.mean(predictions == test.y))


def _split_checksum(split: datagen.SplitResult) -> str:
    digest = hashlib.sha256()
    for array in (
        split.labeled.x,
        split.labeled.y,
        split.pool.x,
        split.test.x,
        split.test.y,
        split.pool_labels,
    ):
        digest.update(np.ascontiguousarray(array).tobytes())
    return digest.hexdigest()


def _format_real(value: float | None) -> str:
    return "" if value is None else f"{value:.12g}"


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run the full (criterion x seed) grid and write all output files.

    Per seed the dataset and splits are built once and shared across
    criteria. Runs are independent jobs; ``jobs`` bounds the worker
    pool. Output row order is sorted by (criterion, seed) so reruns are
    byte-identical.
    """
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    learner = DEFAULT_LEARNER

    if config.csv_source is not None:
        csv_features, csv_labels = datagen.load_csv(
            config.csv_source.path,
            config.csv_source.label_column,
            config.csv_source.positive_label,
        )

    splits: dict[int, datagen.SplitResult] = {}
    checksums: dict[int, str] = {}
    baselines: dict[int, float | None] = {}
    baseline_errors: dict[int, str] = {}
    for seed in config.seeds:
        data_seed, split_seed = derive_seeds(seed, 2)
        if config.synthetic is not None:
            features, labels = datagen.generate(replace(config.synthetic, seed=data_seed))
        else:
            features, labels = csv_features, csv_labels
        split_result = datagen.split(features, labels, replace(config.split, seed=split_seed))
        splits[seed] = split_result
        checksums[seed] = _split_checksum(split_result)
        try:
            baseline_fit = learner.fit(split_result.labeled, config.prior)
            baselines[seed] = classification_accuracy(baseline_fit, split_result.test)
        except PseudoSelectError as err:
            baselines[seed] = None
            baseline_errors[seed] = str(err)

    def run_one(name: str, spec: CriterionSpec, seed: int) -> RunRecord:
        split_result = splits[seed]
        trace_path = out_dir / f"trace_{name}_{seed}.txt"
        if seed in baseline_errors:
            return RunRecord(
                name, seed, None, None, "failed", None,
                error=f"baseline fit failed: {baseline_errors[seed]}",
            )
        try:
            final_fit, trace, _ = run_pseudo_labeling(
                split_result.labeled, split_result.pool, spec, config.stopping, learner
            )
        except PseudoSelectError as err:
            partial = getattr(err, "trace", None)
            if partial is not None:
                partial.write(trace_path)
            return RunRecord(
                name, seed, None, baselines[seed], "failed",
                str(trace_path) if partial is not None else None,
                error=str(err),
            )
        trace.write(trace_path)
        return RunRecord(
            name, seed,
            classification_accuracy(final_fit, split_result.test),
            baselines[seed], "ok", str(trace_path),
        )

    tasks = [(name, spec, seed) for name, spec in config.criteria for seed in config.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_one, *task) for task in tasks]
            records = [f.result() for f in futures]
    else:
        records = [run_one(*task) for task in tasks]

    records.sort(key=lambda r: (r.criterion, r.seed))
    result = ExperimentResult(tuple(records), config.confidence_arm, str(out_dir))

    _write_results_csv(out_dir / "results.csv", records)
    _write_arms_csv(out_dir / "arms.csv", config.criteria)
    _write_checksums_csv(out_dir / "split_checksums.csv", config.seeds, checksums)
    try:
        _write_summary_csv(out_dir / "summary.csv", summarize(result))
    except NoSuccessfulRunsError:
        pass  # results.csv still records what happened
    return result


def summarize(result: ExperimentResult) -> list[CriterionSummary]:
    """Per-criterion mean, sample standard deviation, and mean paired
    accuracy difference against the confidence arm across shared seeds.

    Single-run criteria report sd = 0 flagged as degenerate.
    """
    ok_runs = [r for r in result.runs if r.status == "ok"]
    if not ok_runs:
        raise NoSuccessfulRunsError("every run failed; nothing to summarize")

    by_criterion: dict[str, list[RunRecord]] = {}
    for record in ok_runs:
        by_criterion.setdefault(record.criterion, []).append(record)

    confidence_by_seed: dict[int, float] = {}
    if result.confidence_arm is not None:
        for record in by_criterion.get(result.confidence_arm, []):
            confidence_by_seed[record.seed] = record.test_accuracy

    summaries = []
    for name in sorted(by_criterion):
        records = by_criterion[name]
        accuracies = np.array([r.test_accuracy for r in records])
        mean = float(np.mean(accuracies))
        degenerate = len(accuracies) == 1
        sd = 0.0 if degenerate else float(np.std(accuracies, ddof=1))
        paired = None
        if confidence_by_seed:
            diffs = [
                r.test_accuracy - confidence_by_seed[r.seed]
                for r in records
                if r.seed in confidence_by_seed
            ]
            if diffs:
                paired = float(np.mean(diffs))
        summaries.append(
            CriterionSummary(name, mean, sd, degenerate, paired, len(records))
        )
    return summaries


def _write_results_csv(path: Path, records: list[RunRecord]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["criterion", "seed", "test_accuracy", "baseline_accuracy", "status"])
        for r in records:
            writer.writerow(
                [r.criterion, r.seed, _format_real(r.test_accuracy),
                 _format_real(r.baseline_accuracy), r.status]
            )


def _write_arms_csv(path: Path, criteria: tuple[tuple[str, CriterionSpec], ...]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["criterion", "kind"])
        for name, spec in criteria:
            writer.writerow([name, spec.kind])


def _write_checksums_csv(path: Path, seeds: tuple[int, ...], checksums: dict[int, str]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["seed", "checksum"])
        for seed in sorted(set(seeds)):
            writer.writerow([seed, checksums[seed]])


def _write_summary_csv(path: Path, summaries: list[CriterionSummary]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["criterion", "mean", "sd", "mean_paired_diff_vs_confidence", "n_runs"]
        )
        for s in summaries:
            writer.writerow(
                [s.criterion, _format_real(s.mean), _format_real(s.sd),
                 _format_real(s.mean_paired_diff_vs_confidence), s.n_runs]
            )


def summarize_result_dir(result_dir: str | Path) -> list[CriterionSummary]:
    """Rebuild summaries from results.csv (and arms.csv) in a directory,
    and rewrite summary.csv there."""
    result_dir = Path(result_dir)
    results_path = result_dir / "results.csv"
    if not results_path.exists():
        raise ConfigError(f"no results.csv in {result_dir}")

    confidence_arm = None
    arms_path = result_dir / "arms.csv"
    if arms_path.exists():
        with arms_path.open(newline="") as handle:
            for row in list(csv.DictReader(handle)):
                if row["kind"] == CONFIDENCE and confidence_arm is None:
                    confidence_arm = row["criterion"]

    records = []
    with results_path.open(newline="") as handle:
        for row in csv.DictReader(handle):
            records.append(
                RunRecord(
                    criterion=row["criterion"],
                    seed=int(row["seed"]),
                    test_accuracy=float(row["test_accuracy"]) if row["test_accuracy"] else None,
                    baseline_accuracy=(
                        float(row["baseline_accuracy"]) if row["baseline_accuracy"] else None
                    ),
                    status=row["status"],
                    trace_path=None,
                )
            )
    result = ExperimentResult(tuple(records), confidence_arm, str(result_dir))
    summaries = summarize(result)
    _write_summary_csv(result_dir / "summary.csv", summaries)
    return summaries


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

def _parse_prior(node, default: PriorSpec) -> PriorSpec:
    if node is None:
        return default
    if not isinstance(node, dict) or "precision" not in node:
        raise ConfigError("prior must be a mapping with a 'precision' key")
    return PriorSpec(float(node["precision"]))


def _parse_objective(node: dict) -> ObjectiveSpec:
    kind = node.get("kind")
    return ObjectiveSpec(
        kind=kind,
        feature_subset=tuple(node["features"]) if "features" in node else None,
        weights=tuple(node["weights"]) if "weights" in node else None,
    )


def _parse_criterion(node: dict, default_prior: PriorSpec) -> CriterionSpec:
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError("each criterion needs a 'kind'")
    kind = node["kind"]
    if kind not in CRITERION_KINDS:
        raise ConfigError(f"unknown criterion kind {kind!r}")
    prior = _parse_prior(node.get("prior"), default_prior)
    kwargs: dict = {"kind": kind, "prior": prior}
    if kind == MULTI_OBJECTIVE:
        objectives = node.get("objectives")
        if not isinstance(objectives, list):
            raise ConfigError("multi_objective needs an 'objectives' list")
        kwargs["objectives"] = tuple(_parse_objective(o) for o in objectives)
        aggregation = node.get("aggregation")
        if aggregation not in AGGREGATIONS:
            raise ConfigError(f"unknown aggregation {aggregation!r}")
        kwargs["aggregation"] = aggregation
        if aggregation == AGGREGATION_WEIGHTED_SUM:
            kwargs["aggregation_weights"] = tuple(node.get("weights", ()))
    if kind == SUPERSET:
        if "inner" not in node or "mode" not in node:
            raise ConfigError("superset needs 'inner' and 'mode'")
        # the wrapper's prior is the inner default unless the inner overrides
        kwargs["inner"] = _parse_criterion(node["inner"], prior)
        kwargs["mode"] = node["mode"]
    return CriterionSpec(**kwargs)


def _parse_stopping(node) -> StoppingRule:
    if node is None:
        return StoppingRule.exhaust_pool()
    kind = node.get("kind")
    if kind == "exhaust_pool":
        return StoppingRule.exhaust_pool()
    if kind == "max_iterations":
        return StoppingRule.max_iterations(int(node["steps"]))
    if kind == "score_threshold":
        return StoppingRule.score_threshold(float(node["threshold"]))
    raise ConfigError(f"unknown stopping rule {kind!r}")


def parse_config(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed YAML mapping."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    try:
        prior = _parse_prior(raw.get("prior"), PriorSpec(0.0))
        stopping = _parse_stopping(raw.get("stopping"))

        data_node = raw.get("data")
        if not isinstance(data_node, dict) or "kind" not in data_node:
            raise ConfigError("config needs a 'data' section with a 'kind'")
        synthetic = None
        csv_source = None
        if data_node["kind"] == "synthetic":
            synthetic = datagen.SyntheticSpec(
                seed=0,  # replaced per run seed
                n=int(data_node["n"]),
                d_features=int(data_node["num_features"]),
                theta_star=tuple(float(t) for t in data_node["coefficients"]),
                feature_scale=float(data_node.get("feature_scale", 1.0)),
            )
        elif data_node["kind"] == "csv":
            path = Path(data_node["path"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            csv_source = CsvSource(
                path=str(path),
                label_column=data_node["label_column"],
                positive_label=str(data_node["positive_label"]),
            )
        else:
            raise ConfigError(f"unknown data kind {data_node['kind']!r}")

        split_node = raw.get("split")
        if not isinstance(split_node, dict):
            raise ConfigError("config needs a 'split' section")
        split_spec = datagen.SplitSpec(
            n_labeled=int(split_node["labeled"]),
            n_unlabeled=int(split_node["unlabeled"]),
            n_test=int(split_node["test"]),
            seed=0,  # replaced per run seed
            stratified=bool(split_node.get("stratified", False)),
        )

        criteria_node = raw.get("criteria")
        if not isinstance(criteria_node, list) or not criteria_node:
            raise ConfigError("config needs a nonempty 'criteria' list")
        criteria = []
        for entry in criteria_node:
            if "name" not in entry:
                raise ConfigError("each criterion needs a 'name'")
            criteria.append((str(entry["name"]), _parse_criterion(entry, prior)))

        seeds = raw.get("seeds")
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError("config needs a nonempty 'seeds' list")

        return ExperimentConfig(
            criteria=tuple(criteria),
            seeds=tuple(int(s) for s in seeds),
            stopping=stopping,
            prior=prior,
            output_dir=str(raw.get("output_dir", "results")),
            synthetic=synthetic,
            csv_source=csv_source,
            split=split_spec,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, PseudoSelectError) as err:
        raise ConfigError(f"invalid config: {err}") from err


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse config {path}: {err}") from err
    return parse_config(raw, base_dir=path.parent)


# Overfit-prone preset: labeled split far smaller than the parameter
# dimension, unit-precision prior, and an imbalanced population (positive
# intercept) with many weak signal directions. That combination is where
# confidence-driven selection drifts toward the majority class while the
# joint-evidence criterion, anchored by the balanced labeled split,
# resists the drift.
OVERFIT_PRONE_PRESET: dict = {
    "output_dir": "results-overfit-prone",
    "prior": {"precision": 1.0},
    "stopping": {"kind": "exhaust_pool"},
    "seeds": list(range(1, 51)),
    "data": {
        "kind": "synthetic",
        "n": 720,
        "num_features": 10,
        "coefficients": [2.0, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5],
        "feature_scale": 1.0,
    },
    "split": {"labeled": 20, "unlabeled": 200, "test": 500, "stratified": True},
    "criteria": [
        {"name": "posterior_predictive", "kind": "pseudo_posterior_predictive"},
        {"name": "confidence", "kind": "confidence"},
    ],
}

PRESETS = {"overfit-prone": OVERFIT_PRONE_PRESET}


def preset_config_text(preset: str) -> str:
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
    return yaml.safe_dump(PRESETS[preset], sort_keys=False)
