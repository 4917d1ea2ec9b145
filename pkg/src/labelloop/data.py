"""Dataset file format, synthetic benchmark generation, report series I/O."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    Dataset,
    LabelCombination,
    LabelSchema,
    PoolPartition,
    Sample,
    decode_combination,
)
from .driver import ALConfig, IterationReport


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Line-delimited JSON: header record, then one record per sample."""
    path = Path(path)
    with path.open("w") as fh:
        header = {
            "feature_dim": dataset.feature_dim,
            "labels": list(dataset.schema.labels),
            "exclusive_index": dataset.schema.exclusive_index,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for s in dataset.samples:
            record = {
                "id": s.id,
                "features": [float(v) for v in s.features],
                "truth": str(s.truth) if s.truth is not None else None,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty dataset file")
    try:
        header = json.loads(lines[0])
        schema = LabelSchema(
            labels=tuple(header["labels"]),
            exclusive_index=header["exclusive_index"],
        )
        feature_dim = int(header["feature_dim"])
    except (KeyError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: malformed header: {exc}") from exc
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            features = np.array(rec["features"], dtype=np.float64)
            truth = (
                decode_combination(rec["truth"], schema)
                if rec.get("truth") is not None
                else None
            )
            sample = Sample(id=rec["id"], features=features, truth=truth)
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from exc
        if features.shape[0] != feature_dim:
            raise ValueError(
                f"{path}: line {lineno}: feature dim {features.shape[0]}, "
                f"expected {feature_dim}"
            )
        samples.append(sample)
    if not samples:
        raise ValueError(f"{path}: empty dataset")
    return Dataset(schema=schema, feature_dim=feature_dim, samples=samples)


def dataset_hash(dataset: Dataset) -> str:
    """Stable content hash over the canonical serialization."""
    digest = hashlib.sha256()
    header = {
        "feature_dim": dataset.feature_dim,
        "labels": list(dataset.schema.labels),
        "exclusive_index": dataset.schema.exclusive_index,
    }
    digest.update(json.dumps(header, sort_keys=True).encode())
    for s in dataset.samples:
        digest.update(s.id.encode())
        digest.update(s.features.tobytes())
        digest.update(str(s.truth).encode() if s.truth else b"-")
    return digest.hexdigest()


@dataclass(frozen=True)
class SynthConfig:
    """Class-conditional Gaussian generator over label combinations."""

    n_samples: int
    feature_dim: int
    schema: LabelSchema
    prior: tuple[tuple[str, float], ...]  # (combination string, probability)
    center_scale: float = 1.0
    noise_scale: float = 0.5
    label_scales: tuple[float, ...] | None = None  # per-label signal strength
    severity_ranges: tuple[tuple[float, float], ...] | None = None  # per-label
    interaction_mix: float = 0.0  # multi-label centers lean toward own directions
    seed: int = 0
    id_prefix: str = "s"

    def __post_init__(self):
        total = sum(p for _, p in self.prior)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("prior probabilities must sum to 1")
        ex = self.schema.exclusive_index
        for combo_str, _ in self.prior:
            combo = decode_combination(combo_str, self.schema)
            if combo.bits[ex] == 1 and sum(combo.bits) > 1:
                raise ValueError(
                    f"combination {combo_str!r} mixes the exclusive label with others"
                )


def label_prototypes(cfg: SynthConfig) -> np.ndarray:
    """One scaled unit direction per label; combination centers sum them."""
    rng = np.random.default_rng(cfg.seed + 1)
    protos = rng.standard_normal((cfg.schema.m, cfg.feature_dim))
    protos /= np.linalg.norm(protos, axis=1, keepdims=True)
    if cfg.label_scales is not None:
        protos *= np.asarray(cfg.label_scales, dtype=np.float64)[:, None]
    return cfg.center_scale * protos


def interaction_directions(cfg: SynthConfig) -> dict[str, np.ndarray]:
    """Seeded unit direction per multi-positive combination, at center scale.

    With interaction_mix > 0, co-occurring labels present partly through a
    combination-specific direction instead of the pure sum of their prototypes.
    """
    rng = np.random.default_rng(cfg.seed + 2)
    dirs = {}
    for combo_str in sorted(c for c, _ in cfg.prior):
        if sum(int(b) for b in combo_str) >= 2:
            d = rng.standard_normal(cfg.feature_dim)
            dirs[combo_str] = cfg.center_scale * d / np.linalg.norm(d)
    return dirs


def combination_centers(cfg: SynthConfig) -> dict[str, np.ndarray]:
    """Centers: each label owns a direction, combos sum them; multi-label
    combos optionally blend in their own interaction direction."""
    protos = label_prototypes(cfg)
    inter = interaction_directions(cfg)
    centers = {}
    for combo_str, _ in cfg.prior:
        bits = np.array([int(c) for c in combo_str], dtype=np.float64)
        center = bits @ protos
        if cfg.interaction_mix > 0.0 and combo_str in inter:
            center = (1.0 - cfg.interaction_mix) * center + (
                cfg.interaction_mix * inter[combo_str]
            )
        centers[combo_str] = center
    return centers


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Draw samples from the combination prior with seeded Gaussian features."""
    rng = np.random.default_rng(cfg.seed)
    protos = label_prototypes(cfg)
    inter = interaction_directions(cfg)
    combo_strs = [c for c, _ in cfg.prior]
    probs = np.array([p for _, p in cfg.prior])
    choices = rng.choice(len(combo_strs), size=cfg.n_samples, p=probs)
    width = len(str(max(cfg.n_samples - 1, 1)))
    samples = []
    for i, ci in enumerate(choices):
        combo_str = combo_strs[ci]
        bits = np.array([int(c) for c in combo_str], dtype=np.float64)
        if cfg.severity_ranges is not None:
            # per-sample severity: each positive label contributes a variable
            # fraction of its full prototype direction
            sev = np.array([rng.uniform(lo, hi) for lo, hi in cfg.severity_ranges])
            bits = bits * sev
        center = bits @ protos
        if cfg.interaction_mix > 0.0 and combo_str in inter:
            center = (1.0 - cfg.interaction_mix) * center + (
                cfg.interaction_mix * inter[combo_str]
            )
        feats = center + cfg.noise_scale * rng.standard_normal(cfg.feature_dim)
        samples.append(
            Sample(
                id=f"{cfg.id_prefix}{i:0{width}d}",
                features=feats,
                truth=decode_combination(combo_str, cfg.schema),
            )
        )
    return Dataset(schema=cfg.schema, feature_dim=cfg.feature_dim, samples=samples)


LUSMS_SYNTH_V1_LABELS = ("A-line", "B-line", "P-lesion", "P-effusion")

LUSMS_SYNTH_V1_PRIOR = (
    ("1000", 0.28),
    ("0100", 0.18),
    ("0010", 0.14),
    ("0001", 0.12),
    ("0110", 0.07),
    ("0101", 0.07),
    ("0011", 0.07),
    ("0111", 0.07),
)


def stratified_warm_start(
    dataset: Dataset, pool_ids: list[str], n: int = 25
) -> dict[str, LabelCombination]:
    """Deterministic seed labels: at least one per combination, rest by frequency.

    Quotas follow a largest-ratio fill, then the first pool ids of each
    combination (in id order) are taken, so the result depends only on the
    dataset contents.
    """
    by_combo: dict[str, list[str]] = {}
    for sid in pool_ids:
        truth = dataset[sid].truth
        if truth is None:
            raise ValueError(f"pool sample {sid!r} has no ground truth")
        by_combo.setdefault(str(truth), []).append(sid)
    if n < len(by_combo):
        raise ValueError("warm-start budget smaller than combination count")
    combos = sorted(by_combo)
    quota = {c: 1 for c in combos}
    while sum(quota.values()) < n:
        c = max(combos, key=lambda c: (len(by_combo[c]) / quota[c], c))
        quota[c] += 1
    return {
        sid: dataset[sid].truth
        for c in combos
        for sid in by_combo[c][: quota[c]]
    }


def lusms_synth_v1(seed: int = 42) -> tuple[Dataset, PoolPartition]:
    """Default desk-scale benchmark: 2000-sample pool + 500-sample test set.

    Four labels with an exclusive healthy label; the prior is imbalanced with
    effusion the rarest single presentation. Co-occurring labels present
    mostly through combination-specific patterns rather than the plain sum of
    the single-label signatures, and effusion severity varies per sample, so
    weak presentations stay genuinely uncertain. A 25-sample stratified
    warm-start labeled set guarantees every combination is represented before
    the first selection round.
    """
    schema = LabelSchema(labels=LUSMS_SYNTH_V1_LABELS, exclusive_index=0)
    cfg = SynthConfig(
        n_samples=2500,
        feature_dim=32,
        schema=schema,
        prior=LUSMS_SYNTH_V1_PRIOR,
        center_scale=2.9,
        noise_scale=0.2,
        label_scales=(1.0, 1.1, 1.0, 1.0),
        severity_ranges=((1.0, 1.0), (1.0, 1.0), (1.0, 1.0), (0.15, 1.0)),
        interaction_mix=0.8,
        seed=seed,
    )
    dataset = generate_synthetic(cfg)
    ids = dataset.ids()
    pool, test = ids[:2000], ids[2000:]
    labeled = stratified_warm_start(dataset, pool, n=25)
    partition = PoolPartition(
        candidate=frozenset(set(pool) - set(labeled)),
        labeled=labeled,
        test=frozenset(test),
    )
    return dataset, partition


def lusms_synth_v1_config(**overrides) -> ALConfig:
    """Reference loop configuration for the default benchmark."""
    params = dict(
        k_max=25,
        max_iterations=5,
        threshold=0.5,
        seed=42,
        epochs_per_round=6,
        learning_rate=0.018,
        momentum=0.9,
        batch_size=32,
        table_scope="cumulative",
    )
    params.update(overrides)
    return ALConfig(**params)


def write_report_series(
    path: str | Path,
    config: ALConfig,
    reports: list[IterationReport],
    data_hash: str,
) -> None:
    """JSONL series: metadata header record, then one record per iteration."""
    path = Path(path)
    header = {
        "record": "run-metadata",
        "config": {
            "k_max": config.k_max,
            "max_iterations": config.max_iterations,
            "strategy": config.strategy.kind.value,
            "threshold": config.threshold,
            "target_metric": config.target_metric,
            "seed": config.seed,
            "epochs_per_round": config.epochs_per_round,
            "learning_rate": config.learning_rate,
            "momentum": config.momentum,
            "batch_size": config.batch_size,
            "weight_decay": config.weight_decay,
            "finetune_scope": config.finetune_scope,
            "table_scope": config.table_scope,
            "validate": config.validate,
            "refine_gate": config.refine_gate,
            "oracle_noise": config.oracle_noise,
            "hidden_dim": config.hidden_dim,
        },
        "dataset_hash": data_hash,
    }
    with path.open("w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for report in reports:
            fh.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")


def read_report_series(path: str | Path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text().splitlines()
    header = json.loads(lines[0])
    return header, [json.loads(line) for line in lines[1:] if line.strip()]


def report_series_to_csv(path: str | Path) -> str:
    """Flatten a report series into CSV rows for plotting."""
    _, records = read_report_series(path)
    if not records:
        return ""
    cols = ["iteration", "labeled_fraction", "corrected_fraction", "macro_accuracy"]
    label_count = len(records[0]["per_label"])
    for j in range(label_count):
        cols += [f"acc_{j}", f"sen_{j}", f"spe_{j}", f"auc_{j}"]
    rows = [",".join(cols)]
    for rec in records:
        row = [
            str(rec["iteration"]),
            f"{rec['labeled_fraction']:.6f}",
            f"{rec['corrected_fraction']:.6f}",
            f"{rec['macro_accuracy']:.6f}",
        ]
        for lm in rec["per_label"]:
            row += [
                f"{lm['accuracy']:.6f}",
                f"{lm['sensitivity']:.6f}",
                f"{lm['specificity']:.6f}",
                f"{lm['auc']:.6f}",
            ]
        rows.append(",".join(row))
    return "\n".join(rows) + "\n"
