"""Partitioning the high-risk symbols: greedy agglomeration and an exhaustive oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .distribution import JointDistribution
from .errors import CoverMismatch, TooLarge
from .lift import RiskSplit
from .mechanism import HighRiskPartition, complete_merging, mutual_information

MAX_ORACLE_SYMBOLS = 12


@dataclass(frozen=True)
class MergeStep:
    kind: str  # "seed" | "grow" | "fixup"
    members: tuple[int, ...]
    omega: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "members": list(self.members), "omega": _json_float(self.omega)}


@dataclass(frozen=True)
class GreedyTrace:
    partition: HighRiskPartition
    feasible: bool
    merge_log: tuple[MergeStep, ...]

    def to_dict(self) -> dict:
        return {
            "blocks": [list(b) for b in self.partition.blocks],
            "feasible": self.feasible,
            "merge_log": [step.to_dict() for step in self.merge_log],
        }


def _json_float(v):
    return None if not np.isfinite(v) else float(v)


class _BlockScorer:
    """Leakage of candidate merges, evaluated with the active kernels."""

    def __init__(self, joint: JointDistribution):
        self.kern = _kernels.active
        self.mass = joint.mass
        self.ps = joint.ps

    def column(self, members) -> np.ndarray:
        return self.kern.block_column(self.mass, np.asarray(sorted(members), dtype=np.int64))

    def omega(self, members) -> float:
        return float(self.kern.column_omega(self.column(members), self.ps))

    def scores(self, members, candidate_cols: np.ndarray) -> np.ndarray:
        return self.kern.stacked_omegas(self.column(members), candidate_cols, self.ps)


def greedy_refine(
    joint: JointDistribution, split: RiskSplit, *, strict_fixup_range: bool = False
) -> GreedyTrace:
    """Agglomerative refinement of the high-risk set.

    Blocks are seeded with the riskiest remaining symbol and grown by the
    symbol whose absorption gives the smallest merged leakage, until the
    block's leakage drops to ``split.epsilon`` or no symbols remain. If the
    final block still leaks too much it absorbs whole earlier blocks, again
    picking the least-leaky merge each time.

    Ties go to the lowest symbol index (growth) or block position (fix-up).
    With ``strict_fixup_range`` the first block is never a fix-up candidate.
    """
    eps = split.epsilon
    scorer = _BlockScorer(joint)
    pending = list(split.high_risk)
    single = {x: scorer.omega((x,)) for x in pending}
    blocks: list[list[int]] = []
    log: list[MergeStep] = []

    while pending:
        seed = pending[0]
        for x in pending[1:]:
            if single[x] > single[seed]:
                seed = x
        pending.remove(seed)
        block = [seed]
        w = single[seed]
        log.append(MergeStep("seed", (seed,), w))
        while w > eps and pending:
            scores = scorer.scores(block, joint.mass[:, pending])
            x = pending.pop(int(np.argmin(scores)))
            block.append(x)
            w = scorer.omega(block)
            log.append(MergeStep("grow", (x,), w))
        blocks.append(sorted(block))

    if blocks:
        w = scorer.omega(blocks[-1])
        while w > eps and len(blocks) > 1:
            first = 1 if strict_fixup_range else 0
            candidates = list(range(first, len(blocks) - 1))
            if not candidates:
                break
            cols = np.column_stack([scorer.column(blocks[i]) for i in candidates])
            k = candidates[int(np.argmin(scorer.scores(blocks[-1], cols)))]
            absorbed = blocks.pop(k)
            blocks[-1] = sorted(blocks[-1] + absorbed)
            w = scorer.omega(blocks[-1])
            log.append(MergeStep("fixup", tuple(absorbed), w))

    feasible = all(scorer.omega(b) <= eps for b in blocks)
    part = HighRiskPartition(blocks=tuple(tuple(b) for b in blocks), covers=split)
    return GreedyTrace(partition=part, feasible=feasible, merge_log=tuple(log))


class OracleResult(NamedTuple):
    """Best feasible partition, or ``partition=None`` (utility NaN) if none exists."""

    partition: HighRiskPartition | None
    utility: float

    @property
    def feasible(self) -> bool:
        return self.partition is not None


def subset_tables(joint: JointDistribution, symbols) -> tuple[np.ndarray, np.ndarray]:
    """Leakage and utility penalty of every nonempty subset of ``symbols``.

    Index ``mask`` selects ``symbols[i]`` for each set bit ``i``. The penalty
    is sum_x p(x) ln(p(x) / p(Q)) <= 0.
    """
    scorer = _BlockScorer(joint)
    m = len(symbols)
    omega = np.full(1 << m, np.inf)
    penalty = np.zeros(1 << m)
    px = joint.px
    for mask in range(1, 1 << m):
        members = [symbols[i] for i in range(m) if mask >> i & 1]
        omega[mask] = scorer.omega(members)
        p = px[members]
        penalty[mask] = np.sum(p * np.log(p / p.sum()))
    return omega, penalty


def brute_force_optimal(joint: JointDistribution, split: RiskSplit) -> OracleResult:
    """Exhaustively search all set partitions of the high-risk symbols.

    Among partitions whose blocks all satisfy the leakage bound, return one
    with maximal I(X;Y); ties prefer fewer blocks, then lexicographically
    smaller block content.
    """
    symbols = list(split.high_risk)
    m = len(symbols)
    if m > MAX_ORACLE_SYMBOLS:
        raise TooLarge(f"high-risk set too large for oracle ({m} > {MAX_ORACLE_SYMBOLS} symbols)")
    if m == 0:
        part = HighRiskPartition(blocks=(), covers=split)
        return OracleResult(part, mutual_information(joint, part))
    omega, penalty = subset_tables(joint, symbols)
    feasible = omega <= split.epsilon
    rgs, _ = _kernels.active.best_partition(penalty, feasible, m)
    if rgs[0] < 0:
        return OracleResult(None, float("nan"))
    blocks = [[] for _ in range(int(rgs.max()) + 1)]
    for i, label in enumerate(rgs):
        blocks[label].append(symbols[i])
    part = HighRiskPartition(blocks=tuple(tuple(b) for b in blocks), covers=split)
    return OracleResult(part, mutual_information(joint, part))


def is_refinement(
    finer: HighRiskPartition,
    coarser: HighRiskPartition,
    joint: JointDistribution | None = None,
) -> bool:
    """True if every block of ``coarser`` is a union of blocks of ``finer``.

    When ``joint`` is given the block masses are also checked to add up
    (to 1e-12).
    """
    fine_cover = {x for b in finer.blocks for x in b}
    coarse_cover = {x for b in coarser.blocks for x in b}
    if fine_cover != coarse_cover:
        raise CoverMismatch("partitions cover different symbol sets")
    owner = {x: i for i, b in enumerate(coarser.blocks) for x in b}
    members: dict[int, list[int]] = {i: [] for i in range(len(coarser.blocks))}
    for j, block in enumerate(finer.blocks):
        targets = {owner[x] for x in block}
        if len(targets) != 1:
            return False
        members[targets.pop()].append(j)
    if joint is not None:
        px = joint.px
        for i, block in enumerate(coarser.blocks):
            parts = sum(px[list(finer.blocks[j])].sum() for j in members[i])
            if abs(px[list(block)].sum() - parts) > 1e-12:
                return False
    return True


__all__ = [
    "GreedyTrace",
    "MAX_ORACLE_SYMBOLS",
    "MergeStep",
    "OracleResult",
    "brute_force_optimal",
    "complete_merging",
    "greedy_refine",
    "is_refinement",
    "subset_tables",
]
