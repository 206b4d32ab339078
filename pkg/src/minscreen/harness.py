"""Experiment harness: sign, screen, and report.

Produces the outcome CSV and an aggregate report per run. The report's cost
metric is slot comparisons, which is portable across machines; wall time is
recorded for orientation only and is never compared against anything.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, replace
from typing import AbstractSet, Mapping, Sequence

from .minhash import Signature, make_family, sign
from .sets import jaccard_fraction
from .screening import (
    ABOVE,
    BELOW,
    PairOutcome,
    ScreenConfig,
    build_table,
    filtering_rate,
    screen_batch,
)

OUTCOME_COLUMNS = [
    "pair_index",
    "id_a",
    "id_b",
    "decision",
    "resolution_kind",
    "resolution_checkpoint",
    "comparisons_used",
    "estimate",
]


@dataclass(frozen=True)
class ExperimentReport:
    n_pairs: int
    k: int
    threshold: float
    e: float
    e_upper: float
    schedule: tuple[int, ...]
    total_comparisons: int
    baseline_comparisons: int
    above_threshold_count: int
    fr_strict: dict[int, float]
    fr_resolved: dict[int, float]
    accuracy: float | None
    agreement_vs_exact: float | None
    wall_time_ms: float


def sign_all(
    sets: Mapping[int, AbstractSet[int]], pairs: Sequence[tuple[int, int]], cfg: ScreenConfig
) -> dict[int, Signature]:
    """Sign every set referenced by the pair list."""
    family = make_family(cfg.k, cfg.master_seed)
    referenced = sorted({set_id for pair in pairs for set_id in pair})
    signatures: dict[int, Signature] = {}
    for set_id in referenced:
        if set_id not in sets:
            raise ValueError(f"pair list references unknown set id {set_id}")
        signatures[set_id] = sign(family, sets[set_id])
    return signatures


def screen_signatures(
    signatures: Mapping[int, Signature],
    pairs: Sequence[tuple[int, int]],
    cfg: ScreenConfig,
    baseline: bool = False,
    sets: Mapping[int, AbstractSet[int]] | None = None,
) -> tuple[list[PairOutcome], ExperimentReport]:
    """Screen presigned pairs and aggregate the report.

    With baseline=True the same signatures are also decided by a plain
    full-width comparison, and accuracy is the fraction of pairs on which
    the screened decision agrees with it. agreement_vs_exact is only
    available when the underlying sets are supplied.
    """
    started = time.perf_counter()
    outcomes, summary = screen_batch(pairs, signatures, cfg)
    fr_strict: dict[int, float] = {}
    fr_resolved: dict[int, float] = {}
    if outcomes:
        for point in cfg.schedule:
            strict, resolved = filtering_rate(outcomes, point, cfg.schedule)
            fr_strict[point] = strict
            fr_resolved[point] = resolved

    accuracy = None
    if baseline:
        full_cfg = replace(cfg, schedule=())
        full_outcomes, _ = screen_batch(pairs, signatures, full_cfg)
        agree = sum(
            1 for o, f in zip(outcomes, full_outcomes) if o.decision == f.decision
        )
        accuracy = agree / len(outcomes) if outcomes else 1.0

    agreement_vs_exact = None
    if sets is not None and outcomes:
        hits = 0
        for (id_a, id_b), outcome in zip(pairs, outcomes):
            exact = jaccard_fraction(sets[id_a], sets[id_b])
            truth = ABOVE if exact >= cfg.threshold else BELOW
            hits += outcome.decision == truth
        agreement_vs_exact = hits / len(outcomes)

    report = ExperimentReport(
        n_pairs=len(outcomes),
        k=cfg.k,
        threshold=cfg.threshold,
        e=cfg.e,
        e_upper=cfg.e if cfg.e_upper is None else cfg.e_upper,
        schedule=cfg.schedule,
        total_comparisons=summary.total_comparisons,
        baseline_comparisons=summary.baseline_comparisons,
        above_threshold_count=len(summary.above_threshold),
        fr_strict=fr_strict,
        fr_resolved=fr_resolved,
        accuracy=accuracy,
        agreement_vs_exact=agreement_vs_exact,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )
    return outcomes, report


def run_screen(
    sets: Mapping[int, AbstractSet[int]],
    pairs: Sequence[tuple[int, int]],
    cfg: ScreenConfig,
    baseline: bool = False,
) -> tuple[list[PairOutcome], ExperimentReport]:
    """Sign the referenced sets, then screen every pair."""
    signatures = sign_all(sets, pairs, cfg)
    return screen_signatures(signatures, pairs, cfg, baseline=baseline, sets=sets)


def outcomes_csv(pairs: Sequence[tuple[int, int]], outcomes: Sequence[PairOutcome]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(OUTCOME_COLUMNS)
    for index, ((id_a, id_b), outcome) in enumerate(zip(pairs, outcomes)):
        writer.writerow(
            [
                index,
                id_a,
                id_b,
                outcome.decision,
                outcome.resolution_kind,
                "" if outcome.resolution_checkpoint is None else outcome.resolution_checkpoint,
                outcome.comparisons_used,
                repr(outcome.estimate),
            ]
        )
    return buf.getvalue()


def write_outcomes_csv(
    path: str, pairs: Sequence[tuple[int, int]], outcomes: Sequence[PairOutcome]
) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(outcomes_csv(pairs, outcomes))


def read_outcomes_csv(path: str) -> tuple[list[tuple[int, int]], list[PairOutcome]]:
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != OUTCOME_COLUMNS:
            raise ValueError(f"{path}: not an outcomes CSV (header {header})")
        pairs: list[tuple[int, int]] = []
        outcomes: list[PairOutcome] = []
        for row in reader:
            if len(row) != len(OUTCOME_COLUMNS):
                raise ValueError(f"{path}: malformed outcomes row {row}")
            pairs.append((int(row[1]), int(row[2])))
            outcomes.append(
                PairOutcome(
                    decision=row[3],
                    resolution_kind=row[4],
                    resolution_checkpoint=None if row[5] == "" else int(row[5]),
                    comparisons_used=int(row[6]),
                    estimate=float(row[7]),
                )
            )
    return pairs, outcomes


def report_fr_curves(
    outcome_sets: Mapping[str, Sequence[PairOutcome]], schedule: Sequence[int]
) -> str:
    """Filtering-rate curves as CSV, one labeled block of rows per source."""
    if not outcome_sets:
        raise ValueError("no outcome sets to report on")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source", "k", "fr_strict", "fr_resolved"])
    for label, outcomes in outcome_sets.items():
        if not outcomes:
            raise ValueError(f"outcome set {label!r} is empty")
        for point in schedule:
            strict, resolved = filtering_rate(outcomes, point, schedule)
            writer.writerow([label, point, repr(strict), repr(resolved)])
    return buf.getvalue()


def report_json(report: ExperimentReport) -> str:
    payload = asdict(report)
    payload["schedule"] = list(report.schedule)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def format_report(report: ExperimentReport) -> str:
    """Human-readable run summary."""
    cost = f"slot comparisons    : {report.total_comparisons}"
    if report.baseline_comparisons:
        share = report.total_comparisons / report.baseline_comparisons
        cost += f" ({share:.1%} of {report.baseline_comparisons} baseline)"
    lines = [
        f"pairs screened      : {report.n_pairs}",
        f"signature slots     : {report.k}",
        f"threshold           : {report.threshold}",
        f"e (lower / upper)   : {report.e} / {report.e_upper}",
        f"schedule            : {','.join(str(k) for k in report.schedule) or '(none)'}",
        f"above threshold     : {report.above_threshold_count}",
        cost,
    ]
    for point in report.schedule:
        lines.append(
            f"  by k={point:<5d} filtered {report.fr_strict[point]:.4f}"
            f"  resolved {report.fr_resolved[point]:.4f}"
        )
    if report.accuracy is not None:
        lines.append(f"accuracy vs full    : {report.accuracy:.6f}")
    if report.agreement_vs_exact is not None:
        lines.append(f"agreement vs exact  : {report.agreement_vs_exact:.6f}")
    lines.append(f"wall time           : {report.wall_time_ms:.1f} ms")
    return "\n".join(lines) + "\n"
