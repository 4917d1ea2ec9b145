"""Orchestration of the full active-learning loop and its evaluation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .annotation import AnnotationQueue, AnnotationResult, AnnotationTask, SimulatedOracle
from .classifier import (
    ClassifierModel,
    TrainConfig,
    combos_to_array,
    fine_tune,
    init_model,
    predict_proba,
    train,
)
from .core import (
    Dataset,
    LabelCombination,
    PoolPartition,
    ProbabilityVector,
    commit_annotations,
)
from .correlation import CorrelationTable, build_table, refine_pseudo, update_table
from .metrics import LabelMetrics, label_metrics
from .selection import SelectionStrategy, StrategyKind, select


@dataclass(frozen=True)
class ALConfig:
    k_max: int = 25
    max_iterations: int = 20
    strategy: SelectionStrategy = field(default_factory=SelectionStrategy)
    threshold: float = 0.5
    target_metric: float | None = None
    seed: int = 0
    epochs_per_round: int = 5
    learning_rate: float = 2e-3
    momentum: float = 0.9
    batch_size: int = 32
    weight_decay: float = 0.0
    finetune_scope: str = "cumulative"  # cumulative | batch
    table_scope: str = "batch"  # batch | cumulative
    validate: bool = True  # correlation-table confidence validation
    refine_gate: float | None = None  # max Manhattan distance for refinement
    oracle_noise: float = 0.0
    hidden_dim: int | None = None

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.finetune_scope not in ("cumulative", "batch"):
            raise ValueError("finetune_scope must be 'cumulative' or 'batch'")
        if self.table_scope not in ("cumulative", "batch"):
            raise ValueError("table_scope must be 'cumulative' or 'batch'")

    def train_config(self, seed_offset: int = 0) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            batch_size=self.batch_size,
            epochs=self.epochs_per_round,
            weight_decay=self.weight_decay,
            seed=self.seed + seed_offset,
        )


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    selected_ids: tuple[str, ...]
    corrected_fraction: float
    reviewed_fraction: float
    labeled_fraction: float
    per_label: tuple[LabelMetrics, ...]
    macro_accuracy: float
    mean_scores: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "selected_ids": list(self.selected_ids),
            "corrected_fraction": self.corrected_fraction,
            "reviewed_fraction": self.reviewed_fraction,
            "labeled_fraction": self.labeled_fraction,
            "per_label": [asdict(lm) for lm in self.per_label],
            "macro_accuracy": self.macro_accuracy,
            "mean_scores": dict(sorted(self.mean_scores.items())),
        }


@dataclass
class ALState:
    """Mutable loop state threaded through prepare/finalize phases."""

    config: ALConfig
    dataset: Dataset
    model: ClassifierModel
    partition: PoolPartition
    table: CorrelationTable
    iteration: int = 0  # last completed iteration
    initial_pool_size: int = 0
    queue: AnnotationQueue = field(default_factory=AnnotationQueue)
    batch_probs: dict[str, np.ndarray] = field(default_factory=dict)
    mean_scores: dict[str, float] = field(default_factory=dict)
    reports: list[IterationReport] = field(default_factory=list)

    def labeled_fraction(self) -> float:
        if self.initial_pool_size == 0:
            return 0.0
        return len(self.partition.labeled) / self.initial_pool_size


def new_state(config: ALConfig, dataset: Dataset, partition: PoolPartition) -> ALState:
    model = init_model(
        dataset.schema,
        dataset.feature_dim,
        config.train_config(),
        hidden_dim=config.hidden_dim,
    )
    return ALState(
        config=config,
        dataset=dataset,
        model=model,
        partition=partition,
        table=CorrelationTable(),
        initial_pool_size=len(partition.candidate),
    )


def evaluate(
    model: ClassifierModel, samples, threshold: float
) -> tuple[tuple[LabelMetrics, ...], float]:
    """Per-label metrics over a ground-truthed sample list; returns macro accuracy."""
    if not samples:
        raise ValueError("test set is empty")
    state = predict_proba(model, samples)
    truth = combos_to_array([s.truth for s in samples])
    preds = (state.probs >= threshold).astype(int)
    per_label = []
    for j in range(model.schema.m):
        per_label.append(label_metrics(truth[:, j], preds[:, j], state.probs[:, j]))
    macro = float(np.mean([lm.accuracy for lm in per_label]))
    return tuple(per_label), macro


def prepare_iteration(state: ALState) -> list[AnnotationTask]:
    """Score the pool, select a batch, propose pseudo-labels, fill the queue."""
    if not state.partition.candidate:
        raise ValueError("candidate pool is empty")
    cfg = state.config
    t = state.iteration + 1
    pool_ids = sorted(state.partition.candidate)
    pool_samples = state.dataset.subset(pool_ids)
    matrix = predict_proba(state.model, pool_samples, iteration=t)
    batch = select(
        matrix,
        cfg.strategy,
        cfg.k_max,
        state.dataset.schema,
        seed=cfg.seed * 100_000 + t,
    )
    index = {sid: i for i, sid in enumerate(matrix.ids)}
    table = state.table if cfg.validate else CorrelationTable()
    tasks = []
    state.batch_probs = {}
    for sid in batch.ids:
        p = matrix.probs[index[sid]]
        outcome = refine_pseudo(p, table, cfg.threshold, max_distance=cfg.refine_gate)
        proposed = outcome.refined if outcome.validated else outcome.proposed
        state.batch_probs[sid] = p
        tasks.append(
            AnnotationTask(
                sample_id=sid,
                proposed=proposed,
                prob=ProbabilityVector(p),
                iteration=t,
            )
        )
    state.queue.enqueue(tasks)
    # informativeness summaries for all strategies, logged every iteration
    state.mean_scores = _strategy_score_means(matrix, state.dataset.schema)
    return tasks


def _strategy_score_means(matrix, schema) -> dict[str, float]:
    from .selection import score_lc, score_mle, score_mlm

    mlm = [score_mlm(matrix.probs[i], schema) for i in range(len(matrix))]
    lc = [score_lc(matrix.probs[i]) for i in range(len(matrix))]
    mle = [score_mle(matrix.probs[i]) for i in range(len(matrix))]
    return {
        "mlm": float(np.mean(mlm)),
        "lc": float(np.mean(lc)),
        "mle": float(np.mean(mle)),
    }


def finalize_iteration(
    state: ALState, results: list[AnnotationResult]
) -> IterationReport:
    """Commit annotations, update the correlation table, fine-tune, evaluate."""
    if not state.queue.is_empty():
        raise RuntimeError("annotation queue not drained")
    cfg = state.config
    t = state.iteration + 1
    annotated = [(r.sample_id, r.final) for r in results]
    state.partition = commit_annotations(state.partition, annotated)

    if cfg.finetune_scope == "batch":
        pairs = [(state.dataset[sid], combo) for sid, combo in annotated]
    else:
        pairs = [
            (state.dataset[sid], combo)
            for sid, combo in sorted(state.partition.labeled.items())
        ]
    state.model = fine_tune(state.model, pairs, cfg.train_config(seed_offset=t))

    if cfg.table_scope == "cumulative":
        # re-profile the full labeled set with the freshly tuned model
        labeled_ids = sorted(state.partition.labeled)
        matrix = predict_proba(state.model, state.dataset.subset(labeled_ids), t)
        probs = matrix.probs
        combos = [state.partition.labeled[sid] for sid in labeled_ids]
    else:
        probs = np.stack([state.batch_probs[r.sample_id] for r in results])
        combos = [r.final for r in results]
    fresh = build_table(probs, combos, iteration=t)
    if state.table.is_empty():
        state.table = fresh  # initialized after the first iteration
    else:
        state.table = update_table(state.table, fresh)

    test_samples = state.dataset.subset(sorted(state.partition.test))
    per_label, macro = evaluate(state.model, test_samples, cfg.threshold)
    corrected = sum(1 for r in results if r.changed)
    report = IterationReport(
        iteration=t,
        selected_ids=tuple(r.sample_id for r in results),
        corrected_fraction=corrected / len(results) if results else 0.0,
        reviewed_fraction=1.0,
        labeled_fraction=state.labeled_fraction(),
        per_label=per_label,
        macro_accuracy=macro,
        mean_scores=dict(state.mean_scores),
    )
    state.iteration = t
    state.reports.append(report)
    state.batch_probs = {}
    state.queue.drain_results()
    return report


def run_iteration(state: ALState) -> IterationReport:
    """One full headless iteration with the simulated oracle."""
    prepare_iteration(state)
    oracle = SimulatedOracle(
        noise_rate=state.config.oracle_noise,
        seed=state.config.seed + 977 * (state.iteration + 1),
    )
    results = oracle.annotate_all(
        state.queue, lambda sid: state.dataset[sid].truth
    )
    return finalize_iteration(state, results)


def run(
    config: ALConfig, dataset: Dataset, partition: PoolPartition
) -> ALState:
    """Full headless loop: iterate until budget, empty pool, or target metric."""
    state = new_state(config, dataset, partition)
    for _ in range(config.max_iterations):
        if not state.partition.candidate:
            break
        report = run_iteration(state)
        if (
            config.target_metric is not None
            and report.macro_accuracy >= config.target_metric
        ):
            break
    return state


def baseline(
    config: ALConfig, dataset: Dataset, partition: PoolPartition
) -> tuple[ClassifierModel, tuple[LabelMetrics, ...], float]:
    """Train on the entire candidate pool with ground truth; same metrics."""
    model = init_model(
        dataset.schema,
        dataset.feature_dim,
        config.train_config(),
        hidden_dim=config.hidden_dim,
    )
    pairs = [
        (s, s.truth) for s in dataset.subset(sorted(partition.candidate))
    ]
    tc = TrainConfig(
        learning_rate=config.learning_rate,
        momentum=config.momentum,
        batch_size=config.batch_size,
        epochs=config.epochs_per_round * config.max_iterations,
        seed=config.seed,
    )
    model = train(model, pairs, tc)
    per_label, macro = evaluate(
        model, dataset.subset(sorted(partition.test)), config.threshold
    )
    return model, per_label, macro
