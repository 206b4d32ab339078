"""Set and pair files, plus synthetic workloads with exact target Jaccard.

Sets file: one set per line, whitespace-separated decimal token ids. The
0-based physical line number is the set id, so comment lines (leading '#')
still consume an id. Pairs file: two set ids per line; comments and blank
lines are skipped.

Synthetic pairs are constructed, not sampled: a target similarity a/b in
lowest terms becomes a*c shared tokens out of b*c union tokens, so the
exact Jaccard of every generated pair equals the target as a rational.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Mapping, Sequence

from .sets import TOKEN_MAX

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def load_sets(path: str) -> dict[int, frozenset[int]]:
    """Parse a sets file into {line number: token set}."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    sets: dict[int, frozenset[int]] = {}
    duplicates = 0
    for lineno, line in enumerate(text.splitlines()):
        if line.lstrip().startswith("#"):
            continue
        fields = line.split()
        if not fields:
            raise ValueError(f"{path}: empty set at line {lineno}")
        tokens: set[int] = set()
        for field in fields:
            try:
                value = int(field, 10)
            except ValueError:
                raise ValueError(f"{path}: bad token {field!r} at line {lineno}") from None
            if not 0 <= value <= TOKEN_MAX:
                raise ValueError(
                    f"{path}: token {value} at line {lineno} outside unsigned 64-bit range"
                )
            if value in tokens:
                duplicates += 1
            else:
                tokens.add(value)
        sets[lineno] = frozenset(tokens)
    if duplicates:
        logger.warning("%s: deduplicated %d repeated tokens", path, duplicates)
    return sets


def load_pairs(path: str) -> list[tuple[int, int]]:
    """Parse a pairs file into an ordered list of (id, id)."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    pairs: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines()):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise ValueError(f"{path}: expected two set ids at line {lineno}, got {line!r}")
        try:
            id_a, id_b = int(fields[0], 10), int(fields[1], 10)
        except ValueError:
            raise ValueError(f"{path}: bad set id at line {lineno}") from None
        if min(id_a, id_b) < 0:
            raise ValueError(f"{path}: negative set id at line {lineno}")
        pairs.append((id_a, id_b))
    return pairs


def write_sets(path: str, sets: Mapping[int, AbstractSet[int]]) -> None:
    """Write sets with ids 0..n-1, one per line, tokens sorted."""
    expected = range(len(sets))
    if sorted(sets) != list(expected):
        raise ValueError("set ids must be contiguous from 0 to match line numbers")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for set_id in expected:
            fh.write(" ".join(str(t) for t in sorted(sets[set_id])))
            fh.write("\n")


def write_pairs(path: str, pairs: Sequence[tuple[int, int]]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for id_a, id_b in pairs:
            fh.write(f"{id_a} {id_b}\n")


@dataclass(frozen=True)
class WorkloadGroup:
    """pair_count pairs at exactly the target similarity, with both set
    sizes inside [size_lo, size_hi]."""

    jaccard: Fraction
    pair_count: int
    size_lo: int
    size_hi: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "jaccard", Fraction(self.jaccard))
        if not 0 < self.jaccard < 1:
            raise ValueError(f"target Jaccard must lie strictly in (0, 1), got {self.jaccard}")
        if self.pair_count < 1:
            raise ValueError(f"pair count must be at least 1, got {self.pair_count}")
        if not 1 <= self.size_lo <= self.size_hi:
            raise ValueError(f"bad size range [{self.size_lo}, {self.size_hi}]")


@dataclass(frozen=True)
class WorkloadSpec:
    groups: tuple[WorkloadGroup, ...]
    seed: int = 42

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", tuple(self.groups))
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("workload seed must be an unsigned 64-bit integer")


def parse_group(text: str) -> WorkloadGroup:
    """CLI group syntax J:COUNT:SIZE, SIZE being LO-HI or a single value."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"group must look like J:COUNT:LO-HI, got {text!r}")
    jaccard = Fraction(parts[0])
    count = int(parts[1], 10)
    size = parts[2]
    if "-" in size:
        lo_text, hi_text = size.split("-", 1)
        lo, hi = int(lo_text, 10), int(hi_text, 10)
    else:
        lo = hi = int(size, 10)
    return WorkloadGroup(jaccard=jaccard, pair_count=count, size_lo=lo, size_hi=hi)


def _pick_scale(group: WorkloadGroup) -> tuple[int, int, int, int]:
    """Smallest scale c whose set sizes land in the group's range.

    With target a/b in lowest terms, the pair shares a*c tokens, and the
    (b-a)*c exclusive tokens split as evenly as possible between the sides.
    Returns (shared, exclusive_a, exclusive_b, scale).
    """
    a = group.jaccard.numerator
    b = group.jaccard.denominator
    c = 1
    while True:
        shared = a * c
        exclusive = (b - a) * c
        excl_a = exclusive // 2
        excl_b = exclusive - excl_a
        size_a = shared + excl_a
        size_b = shared + excl_b
        if size_a > group.size_hi:
            raise ValueError(
                f"cannot reach Jaccard {a}/{b} with set sizes in "
                f"[{group.size_lo}, {group.size_hi}]"
            )
        if size_a >= group.size_lo and size_b <= group.size_hi:
            return shared, excl_a, excl_b, c
        c += 1


def gen_synthetic(spec: WorkloadSpec) -> tuple[dict[int, frozenset[int]], list[tuple[int, int]]]:
    """Generate sets and pairs for a workload spec.

    Pair p gets set ids 2p and 2p+1. Token ids come from a counter starting
    at the workload seed, so each run is deterministic and all pairs are
    token-disjoint from one another.
    """
    sets: dict[int, frozenset[int]] = {}
    pairs: list[tuple[int, int]] = []
    counter = spec.seed

    def take(n: int) -> list[int]:
        nonlocal counter
        block = [(counter + i) & _MASK64 for i in range(n)]
        counter = (counter + n) & _MASK64
        return block

    for group in spec.groups:
        shared_n, excl_a_n, excl_b_n, _ = _pick_scale(group)
        for _ in range(group.pair_count):
            shared = take(shared_n)
            excl_a = take(excl_a_n)
            excl_b = take(excl_b_n)
            id_a = len(sets)
            id_b = id_a + 1
            sets[id_a] = frozenset(shared + excl_a)
            sets[id_b] = frozenset(shared + excl_b)
            pairs.append((id_a, id_b))
    return sets, pairs
