"""Merge channels induced by a partition of the high-risk symbols, and their metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .distribution import JointDistribution, entropy_x
from .errors import IoFailure, PartitionMismatch, ZeroEntropy
from .lift import RiskSplit


@dataclass(frozen=True)
class HighRiskPartition:
    """Ordered, disjoint blocks whose union is exactly ``covers.high_risk``."""

    blocks: tuple[tuple[int, ...], ...]
    covers: RiskSplit

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for block in blocks:
            if not block:
                raise PartitionMismatch("partition contains an empty block")
            overlap = seen.intersection(block)
            if overlap or len(set(block)) != len(block):
                raise PartitionMismatch(f"blocks overlap on symbols {sorted(overlap) or list(block)}")
            seen.update(block)
        if seen != set(self.covers.high_risk):
            raise PartitionMismatch(
                f"blocks cover {sorted(seen)}, high-risk set is {list(self.covers.high_risk)}"
            )

    def __len__(self):
        return len(self.blocks)


def complete_merging(split: RiskSplit) -> HighRiskPartition:
    """The baseline: every high-risk symbol merged into one super-symbol."""
    blocks = (split.high_risk,) if split.high_risk else ()
    return HighRiskPartition(blocks=blocks, covers=split)


@dataclass(frozen=True, eq=False)
class SanitizationChannel:
    """Deterministic merge channel p(y|x).

    Outputs are the kept low-risk symbols in alphabet order, followed by one
    super-symbol per block. ``output_symbols[k]`` lists the input symbols that
    map to output ``k``; its representative is the smallest of them.
    """

    output_symbols: tuple[tuple[int, ...], ...]
    num_kept: int
    transition: np.ndarray
    output_px: np.ndarray
    output_joint: np.ndarray
    ps: np.ndarray

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(members[0] for members in self.output_symbols)

    def to_dict(self) -> dict:
        return {
            "output_symbols": [
                {"representative": members[0], "members": list(members)}
                for members in self.output_symbols
            ],
            "transition": self.transition.tolist(),
        }


def build_channel(joint: JointDistribution, part: HighRiskPartition) -> SanitizationChannel:
    split = part.covers
    if split.num_symbols != joint.num_symbols:
        raise PartitionMismatch(
            f"risk split covers {split.num_symbols} symbols, joint has {joint.num_symbols}"
        )
    kern = _kernels.active
    outputs = tuple((x,) for x in split.low_risk) + part.blocks
    transition = np.zeros((joint.num_symbols, len(outputs)))
    output_joint = np.empty((joint.num_secrets, len(outputs)))
    output_px = np.empty(len(outputs))
    for y, members in enumerate(outputs):
        transition[list(members), y] = 1.0
        output_joint[:, y] = kern.block_column(joint.mass, np.asarray(members, dtype=np.int64))
        output_px[y] = joint.px[list(members)].sum()
    for a in (transition, output_joint, output_px):
        a.setflags(write=False)
    return SanitizationChannel(
        output_symbols=outputs,
        num_kept=len(split.low_risk),
        transition=transition,
        output_px=output_px,
        output_joint=output_joint,
        ps=joint.ps,
    )


def output_omegas(channel: SanitizationChannel) -> np.ndarray:
    """Worst-case absolute log-lift of every output symbol."""
    kern = _kernels.active
    return np.array(
        [kern.column_omega(np.ascontiguousarray(channel.output_joint[:, y]), channel.ps)
         for y in range(channel.output_joint.shape[1])]
    )


def post_leakage(channel: SanitizationChannel) -> float:
    """max over outputs y and secrets s of |ln(p(y|s) / p(y))|."""
    return float(output_omegas(channel).max())


def merged_leakage(channel: SanitizationChannel) -> float:
    """Leakage restricted to super-symbols; NaN when nothing was merged."""
    omegas = output_omegas(channel)[channel.num_kept:]
    return float(omegas.max()) if omegas.size else float("nan")


def mutual_information(joint: JointDistribution, part: HighRiskPartition) -> float:
    """I(X;Y) in nats: H(X) minus the resolution lost inside each block."""
    px = joint.px
    loss = 0.0
    for block in part.blocks:
        p = px[list(block)]
        loss += float(np.sum(p * np.log(p / p.sum())))
    return entropy_x(joint) + loss


def nmil(joint: JointDistribution, part: HighRiskPartition) -> float:
    """Normalized mutual-information loss (H(X) - I(X;Y)) / H(X), clipped to [0, 1]."""
    h = entropy_x(joint)
    if h <= 0.0:
        raise ZeroEntropy("H(X) = 0: normalized loss is undefined")
    return float(np.clip((h - mutual_information(joint, part)) / h, 0.0, 1.0))


def dump_channel_json(channel: SanitizationChannel, path, extra: dict | None = None) -> None:
    payload = channel.to_dict()
    if extra:
        payload.update(extra)
    try:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
