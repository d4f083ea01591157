"""Log-lift leakage of symbols and symbol subsets, and the low/high risk split."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distribution import JointDistribution
from .errors import EmptySubset, IoFailure


@dataclass(frozen=True, eq=False)
class LiftProfile:
    """Per-cell log-lift ``ln(p(s|x) / p(s))`` and per-symbol worst case.

    ``log_lift`` holds ``-inf`` where p(s, x) = 0; the matching ``omega``
    entry is then ``+inf``.
    """

    log_lift: np.ndarray
    omega: np.ndarray


@dataclass(frozen=True)
class RiskSplit:
    epsilon: float
    low_risk: tuple[int, ...]
    high_risk: tuple[int, ...]

    @property
    def num_symbols(self) -> int:
        return len(self.low_risk) + len(self.high_risk)


def _members(subset) -> np.ndarray:
    return np.asarray(sorted(set(int(x) for x in subset)), dtype=np.int64)


def block_column(joint: JointDistribution, subset) -> np.ndarray:
    """p(Q, s) for every secret s, accumulated in ascending symbol order."""
    return _kernels.active.block_column(joint.mass, _members(subset))


def subset_omega(joint: JointDistribution, subset) -> float:
    """Worst-case absolute log-lift of the merged symbol set ``subset``."""
    members = _members(subset)
    if members.size == 0:
        raise EmptySubset("subset must contain at least one symbol")
    if members[0] < 0 or members[-1] >= joint.num_symbols:
        raise IndexError(f"symbol index out of range for |X|={joint.num_symbols}")
    kern = _kernels.active
    return float(kern.column_omega(kern.block_column(joint.mass, members), joint.ps))


def compute_lift_profile(joint: JointDistribution) -> LiftProfile:
    mass = joint.mass
    with np.errstate(divide="ignore"):
        log_lift = np.log(mass) - np.log(joint.ps)[:, None] - np.log(joint.px)[None, :]
    log_lift[mass <= 0] = -np.inf
    # omega must agree exactly with subset_omega on singletons
    omega = np.array([subset_omega(joint, (x,)) for x in range(joint.num_symbols)])
    log_lift.setflags(write=False)
    omega.setflags(write=False)
    return LiftProfile(log_lift=log_lift, omega=omega)


def risk_split(profile: LiftProfile, epsilon: float) -> RiskSplit:
    """Symbols with omega <= epsilon are low risk, the rest high risk."""
    epsilon = float(epsilon)
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    low = tuple(int(x) for x in np.flatnonzero(profile.omega <= epsilon))
    high = tuple(int(x) for x in np.flatnonzero(~(profile.omega <= epsilon)))
    return RiskSplit(epsilon=epsilon, low_risk=low, high_risk=high)


def dump_profile_csv(profile: LiftProfile, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in profile.log_lift:
                writer.writerow([f"{v:.12g}" for v in row])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
