"""The self-training selection loop.

One iteration: fit the model on the labeled rows, score every pool
candidate under the configured criterion, pick the argmax (ties to the
smallest pool index), move the winner with its pseudo-label into the
labeled set, shrink the pool. Repeat until the stopping rule fires or
the pool is exhausted. Added pseudo-labels are never revised.

Candidate scoring within an iteration is a pure fan-out and may run on
worker threads; the reduction is always in pool-index order, so serial
and concurrent runs produce bit-identical traces. The loop itself is
inherently sequential.

On a learner failure mid-run the engine aborts with the partial trace
attached rather than silently skipping the candidate, because skips
would bias comparisons between criteria.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .criteria import (
    AGGREGATION_RANK_SUM,
    MULTI_OBJECTIVE,
    CandidateScore,
    CriterionSpec,
    rank_sum_scores,
    score_candidate,
)
from .exceptions import (
    DimensionMismatchError,
    EmptyPoolError,
    PseudoSelectError,
    ScoringError,
    SelectionAbortedError,
)
from .glm import DEFAULT_LEARNER, LabeledSet, ModelFit, UnlabeledPool

EXHAUST_POOL = "exhaust_pool"
MAX_ITERATIONS = "max_iterations"
SCORE_THRESHOLD = "score_threshold"


@dataclass(frozen=True)
class StoppingRule:
    """When to stop adding pseudo-labels.

    ``exhaust_pool`` runs until the pool is empty (the benchmark
    default), ``max_iterations`` caps the number of additions, and
    ``score_threshold`` stops before the first addition whose selected
    score falls below the threshold.
    """

    kind: str
    max_steps: int | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in (EXHAUST_POOL, MAX_ITERATIONS, SCORE_THRESHOLD):
            raise PseudoSelectError(f"unknown stopping rule {self.kind!r}")
        if self.kind == MAX_ITERATIONS:
            if self.max_steps is None or int(self.max_steps) < 1:
                raise PseudoSelectError("max_iterations needs a step budget >= 1")
            object.__setattr__(self, "max_steps", int(self.max_steps))
        if self.kind == SCORE_THRESHOLD:
            if self.threshold is None or not np.isfinite(self.threshold):
                raise PseudoSelectError("score_threshold needs a finite threshold")
            object.__setattr__(self, "threshold", float(self.threshold))

    @classmethod
    def exhaust_pool(cls) -> "StoppingRule":
        return cls(EXHAUST_POOL)

    @classmethod
    def max_iterations(cls, k: int) -> "StoppingRule":
        return cls(MAX_ITERATIONS, max_steps=k)

    @classmethod
    def score_threshold(cls, t: float) -> "StoppingRule":
        return cls(SCORE_THRESHOLD, threshold=t)


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    pool_index: int
    pseudo_label: int
    score: float
    labeled_size_after: int


@dataclass(frozen=True)
class SelectionTrace:
    """Ordered record of every selection the loop made."""

    steps: tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def to_lines(self) -> list[str]:
        """One step per line: iteration,pool_index,pseudo_label,score
        (score carries 12 significant digits)."""
        return [
            f"{s.iteration},{s.pool_index},{s.pseudo_label},{s.score:.12g}"
            for s in self.steps
        ]

    def write(self, path: str | Path) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.to_lines()))

    @classmethod
    def from_lines(cls, lines: list[str], initial_labeled_size: int) -> "SelectionTrace":
        steps = []
        for offset, line in enumerate(lines):
            it, idx, label, score = line.strip().split(",")
            steps.append(
                TraceStep(
                    iteration=int(it),
                    pool_index=int(idx),
                    pseudo_label=int(label),
                    score=float(score),
                    labeled_size_after=initial_labeled_size + offset + 1,
                )
            )
        return cls(tuple(steps))


def score_all_candidates(
    data: LabeledSet,
    pool: UnlabeledPool,
    spec: CriterionSpec,
    learner=None,
    fit_on_data: ModelFit | None = None,
    jobs: int = 1,
) -> list[CandidateScore]:
    """Score every pool row, in pool order.

    Fit-once criteria reuse a single model fitted on ``data`` (passed in
    or fitted here); refit criteria refit per candidate, warm-started
    from that model. Pool-level rank_sum aggregation happens here.
    Scoring failures are re-raised tagged with the offending pool index.
    """
    if pool.m < 1:
        raise EmptyPoolError("cannot score an empty pool")
    if pool.d != data.d:
        raise DimensionMismatchError(
            f"pool dimension {pool.d} does not match labeled dimension {data.d}"
        )
    learner = learner or DEFAULT_LEARNER
    if fit_on_data is None:
        fit_on_data = learner.fit(data, spec.prior)
    warm = fit_on_data.theta_hat

    def one(i: int) -> CandidateScore:
        try:
            return score_candidate(
                data,
                pool.x[i],
                spec,
                learner,
                fit_on_data=fit_on_data,
                warm_start=warm,
                pool_index=i,
            )
        except PseudoSelectError as err:
            raise ScoringError(f"scoring pool candidate {i} failed: {err}", pool_index=i) from err

    if jobs > 1 and pool.m > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool_exec:
            futures = [pool_exec.submit(one, i) for i in range(pool.m)]
            scores = [f.result() for f in futures]  # index order keeps runs identical
    else:
        scores = [one(i) for i in range(pool.m)]

    if spec.kind == MULTI_OBJECTIVE and spec.aggregation == AGGREGATION_RANK_SUM:
        pooled = rank_sum_scores([s.objective_values for s in scores])
        scores = [
            CandidateScore(s.pool_index, s.pseudo_label, pooled[i], s.objective_values)
            for i, s in enumerate(scores)
        ]
    return scores


def select_best(scores: list[CandidateScore]) -> CandidateScore:
    """Argmax over candidate scores; ties go to the smallest pool index."""
    if not scores:
        raise EmptyPoolError("no candidate scores to select from")
    best = scores[0]
    for candidate in scores[1:]:
        if candidate.score > best.score:
            best = candidate
    return best


def run_pseudo_labeling(
    d0: LabeledSet,
    u0: UnlabeledPool,
    spec: CriterionSpec,
    stop: StoppingRule,
    learner=None,
    jobs: int = 1,
) -> tuple[ModelFit, SelectionTrace, LabeledSet]:
    """Run the full loop; returns the final refit, the trace, and the
    final labeled set.

    Trace pool indices refer to positions in ``u0``. An empty pool
    yields an empty trace for every stopping rule. Deterministic for
    identical inputs, regardless of ``jobs``.
    """
    if u0.m > 0 and u0.d != d0.d:
        raise DimensionMismatchError(
            f"pool dimension {u0.d} does not match labeled dimension {d0.d}"
        )
    learner = learner or DEFAULT_LEARNER

    data = d0
    remaining_x = u0.x
    remaining_original = list(range(u0.m))
    steps: list[TraceStep] = []
    iteration = 0

    def abort(err: PseudoSelectError, pool_index: int | None) -> SelectionAbortedError:
        return SelectionAbortedError(
            f"selection aborted at iteration {iteration}: {err}",
            iteration=iteration,
            pool_index=pool_index,
            trace=SelectionTrace(tuple(steps)),
        )

    while remaining_original:
        if stop.kind == MAX_ITERATIONS and len(steps) >= stop.max_steps:
            break
        iteration += 1
        view = UnlabeledPool(remaining_x, u0.label_space)
        try:
            fit_on_data = learner.fit(data, spec.prior)
            scores = score_all_candidates(
                data, view, spec, learner, fit_on_data=fit_on_data, jobs=jobs
            )
        except ScoringError as err:
            raise abort(err, remaining_original[err.pool_index]) from err
        except PseudoSelectError as err:
            raise abort(err, None) from err

        best = select_best(scores)
        if stop.kind == SCORE_THRESHOLD and best.score < stop.threshold:
            break

        view_index = best.pool_index
        original_index = remaining_original[view_index]
        data = data.with_row(remaining_x[view_index], best.pseudo_label)
        steps.append(
            TraceStep(
                iteration=iteration,
                pool_index=original_index,
                pseudo_label=best.pseudo_label,
                score=best.score,
                labeled_size_after=data.n,
            )
        )
        remaining_x = np.delete(remaining_x, view_index, axis=0)
        del remaining_original[view_index]

    try:
        final_fit = learner.fit(data, spec.prior)
    except PseudoSelectError as err:
        raise abort(err, None) from err
    return final_fit, SelectionTrace(tuple(steps)), data
