"""Sequential pair screening over signature prefixes.

A pair's match count is examined at each configured checkpoint. Reaching the
accept cutoff resolves the pair early as above-threshold, reaching the
discard cutoff resolves it early as below-threshold, and a pair that clears
every checkpoint is decided by the full-width match frequency. Cutoffs come
from the binomial threshold table, so each early resolution is wrong with
probability at most the configured significance (per checkpoint).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .binomial import ThresholdTable, build_threshold_table
from .minhash import Signature

ABOVE = "AboveThreshold"
BELOW = "BelowThreshold"

OUTPUT_EARLY = "OutputEarly"
FILTERED_EARLY = "FilteredEarly"
FULL_COMPARISON = "FullComparison"

DEFAULT_SCHEDULE = tuple(range(100, 1000, 100))

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class PairOutcome:
    """How one pair was decided.

    resolution_checkpoint is the checkpoint that resolved the pair early,
    None for a full comparison. comparisons_used counts the slots the
    sequential walk needed: the resolving checkpoint, or all of them.
    """

    decision: str
    resolution_kind: str
    resolution_checkpoint: int | None
    comparisons_used: int
    estimate: float


@dataclass(frozen=True)
class ScreenConfig:
    threshold: float = 0.5
    e: float = 1e-5
    e_upper: float | None = None
    schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    k: int = 1000
    master_seed: int = 42

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", tuple(int(v) for v in self.schedule))
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if not 0.0 < self.e < 1.0:
            raise ValueError(f"significance e must lie in (0, 1), got {self.e}")
        if self.e_upper is not None and not 0.0 < self.e_upper < 1.0:
            raise ValueError(f"significance e_upper must lie in (0, 1), got {self.e_upper}")
        if self.k < 1:
            raise ValueError(f"signature length k must be at least 1, got {self.k}")
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        prev = 0
        for point in self.schedule:
            if point <= prev:
                raise ValueError(f"schedule must be strictly increasing, got {self.schedule}")
            prev = point
        if self.schedule and self.schedule[-1] > self.k:
            raise ValueError(
                f"schedule reaches {self.schedule[-1]} but signatures have only {self.k} slots"
            )


@dataclass(frozen=True)
class BatchSummary:
    """Aggregate accounting for one screened batch."""

    n_pairs: int
    total_comparisons: int
    baseline_comparisons: int
    filtered_at: dict[int, int] = field(default_factory=dict)
    output_at: dict[int, int] = field(default_factory=dict)
    full_comparisons: int = 0
    above_threshold: tuple[tuple[int, int], ...] = ()


def build_table(cfg: ScreenConfig) -> ThresholdTable:
    return build_threshold_table(cfg.threshold, cfg.e, cfg.schedule, cfg.e_upper)


def compare_pair(
    a: Signature, b: Signature, table: ThresholdTable, cfg: ScreenConfig
) -> PairOutcome:
    """Walk one pair through the checkpoint schedule.

    The accept test runs before the discard test at each checkpoint, and a
    checkpoint with no discard cutoff simply cannot discard. Cumulative
    match counts are taken from one vectorized slot comparison; the
    sequential semantics are unchanged because prefix counts do not depend
    on how they are computed.
    """
    if a.fingerprint != b.fingerprint:
        raise ValueError("signatures come from different hash families")
    if a.k != cfg.k or b.k != cfg.k:
        raise ValueError(f"expected signatures of length {cfg.k}, got {a.k} and {b.k}")
    if table.rows and table.rows[-1].k > cfg.k:
        raise ValueError(
            f"threshold table checkpoint {table.rows[-1].k} exceeds signature length {cfg.k}"
        )
    prefix_matches = np.cumsum(a.values == b.values)
    for row in table.rows:
        x = int(prefix_matches[row.k - 1])
        if x >= row.m_u:
            return PairOutcome(
                decision=ABOVE,
                resolution_kind=OUTPUT_EARLY,
                resolution_checkpoint=row.k,
                comparisons_used=row.k,
                estimate=x / row.k,
            )
        if row.m_l is not None and x <= row.m_l:
            return PairOutcome(
                decision=BELOW,
                resolution_kind=FILTERED_EARLY,
                resolution_checkpoint=row.k,
                comparisons_used=row.k,
                estimate=x / row.k,
            )
    x = int(prefix_matches[cfg.k - 1])
    estimate = x / cfg.k
    return PairOutcome(
        decision=ABOVE if estimate >= cfg.threshold else BELOW,
        resolution_kind=FULL_COMPARISON,
        resolution_checkpoint=None,
        comparisons_used=cfg.k,
        estimate=estimate,
    )


def screen_batch(
    pairs: Sequence[tuple[int, int]],
    signatures: Mapping[int, Signature],
    cfg: ScreenConfig,
    table: ThresholdTable | None = None,
) -> tuple[list[PairOutcome], BatchSummary]:
    """Screen every pair, in order, against a shared threshold table."""
    for id_a, id_b in pairs:
        for set_id in (id_a, id_b):
            if set_id not in signatures:
                raise ValueError(f"no signature for set id {set_id}")
    if table is None:
        table = build_table(cfg)
    outcomes: list[PairOutcome] = []
    filtered_at: dict[int, int] = {k: 0 for k in cfg.schedule}
    output_at: dict[int, int] = {k: 0 for k in cfg.schedule}
    full = 0
    total = 0
    above: list[tuple[int, int]] = []
    for id_a, id_b in pairs:
        outcome = compare_pair(signatures[id_a], signatures[id_b], table, cfg)
        outcomes.append(outcome)
        total += outcome.comparisons_used
        if outcome.resolution_kind == FILTERED_EARLY:
            filtered_at[outcome.resolution_checkpoint] += 1
        elif outcome.resolution_kind == OUTPUT_EARLY:
            output_at[outcome.resolution_checkpoint] += 1
        else:
            full += 1
        if outcome.decision == ABOVE:
            above.append((id_a, id_b))
    summary = BatchSummary(
        n_pairs=len(outcomes),
        total_comparisons=total,
        baseline_comparisons=len(outcomes) * cfg.k,
        filtered_at=filtered_at,
        output_at=output_at,
        full_comparisons=full,
        above_threshold=tuple(above),
    )
    return outcomes, summary


def filtering_rate(
    outcomes: Sequence[PairOutcome], k: int, schedule: Sequence[int]
) -> tuple[float, float]:
    """Fraction of pairs resolved by checkpoint k.

    Returns (strict, resolved): strict counts only early discards, the
    headline filtering rate; resolved also counts early accepts. Both are
    cumulative over checkpoints up to and including k.
    """
    if k not in tuple(schedule):
        raise ValueError(f"checkpoint {k} not in schedule {tuple(schedule)}")
    if not outcomes:
        raise ValueError("filtering rate undefined over zero outcomes")
    filtered = 0
    resolved = 0
    for outcome in outcomes:
        cp = outcome.resolution_checkpoint
        if cp is None or cp > k:
            continue
        resolved += 1
        if outcome.resolution_kind == FILTERED_EARLY:
            filtered += 1
    return filtered / len(outcomes), resolved / len(outcomes)
