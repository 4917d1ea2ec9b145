"""Pseudo-label assignment and label-correlation confidence validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import LabelCombination, LabelSchema, ProbabilityVector, decode_combination

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrelationTable:
    """Map from label combination (string form) to its relationship vector.

    A relationship vector (RV) is the normalized column-mean prediction profile
    of the samples confirmed with that combination; every RV sums to 1.
    """

    entries: dict[str, np.ndarray] = field(default_factory=dict)
    iteration_built: int = 0

    def __post_init__(self):
        fixed: dict[str, np.ndarray] = {}
        for combo, rv in self.entries.items():
            arr = np.asarray(rv, dtype=np.float64)
            if np.any(arr < 0.0):
                raise ValueError(f"RV for {combo!r} has negative entries")
            if abs(arr.sum() - 1.0) > 1e-9:
                raise ValueError(f"RV for {combo!r} does not sum to 1")
            arr.setflags(write=False)
            fixed[combo] = arr
        object.__setattr__(self, "entries", fixed)

    def __len__(self) -> int:
        return len(self.entries)

    def is_empty(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class RefinementOutcome:
    """Raw threshold pseudo-label plus its table-validated refinement."""

    proposed: LabelCombination
    refined: LabelCombination
    distance: float | None
    changed: bool
    validated: bool

    def __post_init__(self):
        if self.changed != (self.proposed != self.refined):
            raise ValueError("changed flag inconsistent with proposed/refined")


def assign_pseudo(
    p: ProbabilityVector | np.ndarray, threshold: float, strict: bool = False
) -> LabelCombination:
    """Threshold each per-label probability into a pseudo-label bit.

    Bit i is 1 when p_i >= threshold (or strictly > with strict=True).
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    arr = p.p if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=np.float64)
    if strict:
        bits = arr > threshold
    else:
        bits = arr >= threshold
    return LabelCombination(tuple(int(b) for b in bits))


def normalize_rv(p_avg: np.ndarray) -> np.ndarray:
    """Scale a non-negative vector to sum 1; rejects zero-sum input."""
    arr = np.asarray(p_avg, dtype=np.float64)
    if np.any(arr < 0.0):
        raise ValueError("cannot normalize a vector with negative entries")
    total = arr.sum()
    if total <= 0.0:
        raise ValueError("cannot normalize a zero-sum vector")
    return arr / total


def build_table(
    probs: np.ndarray, combos: list[LabelCombination], iteration: int = 0
) -> CorrelationTable:
    """Group prediction rows by confirmed combination and build one RV per group."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[0] != len(combos):
        raise ValueError("probability rows must align with combinations")
    if probs.shape[0] == 0:
        raise ValueError("cannot build a table from zero samples")
    groups: dict[str, list[int]] = {}
    for i, combo in enumerate(combos):
        groups.setdefault(str(combo), []).append(i)
    entries: dict[str, np.ndarray] = {}
    for combo_str, rows in groups.items():
        p_avg = probs[rows].mean(axis=0)
        if p_avg.sum() <= 0.0:
            logger.warning("skipping degenerate zero-sum group for %s", combo_str)
            continue
        entries[combo_str] = normalize_rv(p_avg)
    return CorrelationTable(entries=entries, iteration_built=iteration)


def nearest_combination(
    q: np.ndarray, table: CorrelationTable
) -> tuple[str, float]:
    """Manhattan-nearest table combination; ties broken by ascending string."""
    if table.is_empty():
        raise ValueError("correlation table is empty")
    q = np.asarray(q, dtype=np.float64)
    best: tuple[float, str] | None = None
    for combo_str in sorted(table.entries):
        dist = float(np.abs(q - table.entries[combo_str]).sum())
        if best is None or dist < best[0]:
            best = (dist, combo_str)
    return best[1], best[0]


def refine_pseudo(
    p: ProbabilityVector | np.ndarray,
    table: CorrelationTable,
    threshold: float,
    schema: LabelSchema | None = None,
    strict: bool = False,
    max_distance: float | None = None,
) -> RefinementOutcome:
    """Validate a threshold pseudo-label against the correlation table.

    The refined combination is the Manhattan-nearest table entry of the
    normalized probability profile. With an empty table (first iteration) or a
    zero probability vector the raw proposal stands, flagged unvalidated.
    An optional max-distance gate keeps the raw proposal when the profile is
    too far from every table entry to count as a confident match.
    """
    arr = p.p if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=np.float64)
    proposed = assign_pseudo(arr, threshold, strict=strict)
    if table.is_empty() or arr.sum() <= 0.0:
        return RefinementOutcome(
            proposed=proposed,
            refined=proposed,
            distance=None,
            changed=False,
            validated=False,
        )
    q = normalize_rv(arr)
    combo_str, dist = nearest_combination(q, table)
    if max_distance is not None and dist > max_distance:
        return RefinementOutcome(
            proposed=proposed,
            refined=proposed,
            distance=dist,
            changed=False,
            validated=False,
        )
    refined = LabelCombination(tuple(int(c) for c in combo_str))
    return RefinementOutcome(
        proposed=proposed,
        refined=refined,
        distance=dist,
        changed=refined != proposed,
        validated=True,
    )


def update_table(old: CorrelationTable, fresh: CorrelationTable) -> CorrelationTable:
    """Merge a freshly built table into the running one under the mass constraint.

    A fresh RV replaces the stored one only when every positively-labeled entry
    is at least as large; new combinations are inserted, absent ones kept.
    """
    sample_old = next(iter(old.entries.values()), None)
    sample_fresh = next(iter(fresh.entries.values()), None)
    if (
        sample_old is not None
        and sample_fresh is not None
        and sample_old.shape != sample_fresh.shape
    ):
        raise ValueError("tables built over different schemas")
    entries = dict(old.entries)
    for combo_str, fresh_rv in fresh.entries.items():
        if combo_str not in entries:
            entries[combo_str] = fresh_rv
            continue
        bits = np.array([int(c) for c in combo_str], dtype=np.float64)
        old_rv = entries[combo_str]
        if np.all(fresh_rv * bits >= old_rv * bits):
            entries[combo_str] = fresh_rv
    return CorrelationTable(entries=entries, iteration_built=fresh.iteration_built)


def dump_table(table: CorrelationTable) -> str:
    """Text serialization: one "combo rv0 rv1 ..." line, 6 decimal places."""
    lines = []
    for combo_str in sorted(table.entries):
        rv = table.entries[combo_str]
        lines.append(combo_str + " " + " ".join(f"{v:.6f}" for v in rv))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_table(text: str, schema: LabelSchema, iteration: int = 0) -> CorrelationTable:
    """Inverse of dump_table (to the serialized precision)."""
    entries: dict[str, np.ndarray] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        parts = line.split()
        combo = decode_combination(parts[0], schema)
        rv = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        entries[str(combo)] = rv / rv.sum()
    return CorrelationTable(entries=entries, iteration_built=iteration)
