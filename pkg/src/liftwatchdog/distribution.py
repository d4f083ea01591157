"""Joint distributions p(s, x) over secrets S (rows) and public symbols X (columns)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    DeadSymbol,
    DegenerateSampler,
    InvalidDistribution,
    IoFailure,
    MassNotNormalizable,
    NegativeEntry,
)

NORMALIZATION_TOLERANCE = 1e-6
MIN_SAMPLED_MASS = 1e-12
MAX_SAMPLER_ATTEMPTS = 1000

SAMPLER_DESCRIPTION = "numpy PCG64, flat Dirichlet over the joint simplex"


@dataclass(frozen=True)
class Marginals:
    px: np.ndarray
    ps: np.ndarray


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Validated, immutable joint probability table.

    Construct through :func:`validate` (or the loaders) rather than directly.
    ``ps`` is accumulated column by column with the same kernel that sums
    merged blocks, so merging the whole alphabet reproduces it exactly.
    """

    mass: np.ndarray
    px: np.ndarray = field(repr=False)
    ps: np.ndarray = field(repr=False)

    @property
    def num_secrets(self) -> int:
        return self.mass.shape[0]

    @property
    def num_symbols(self) -> int:
        return self.mass.shape[1]

    def to_dict(self) -> dict:
        return {
            "num_secrets": self.num_secrets,
            "num_symbols": self.num_symbols,
            "mass": self.mass.tolist(),
        }


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def validate(raw_table) -> JointDistribution:
    """Check a raw table and return a normalized :class:`JointDistribution`.

    Tables whose total is within 1e-6 of one are silently rescaled to sum to
    one; anything further off raises :class:`MassNotNormalizable`.
    """
    try:
        table = np.array(raw_table, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidDistribution(f"table is not a rectangular numeric matrix: {exc}") from exc
    if table.ndim != 2 or table.size == 0:
        raise InvalidDistribution(f"expected a nonempty 2-D table, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise InvalidDistribution("table contains non-finite entries")
    if np.any(table < 0):
        s, x = np.argwhere(table < 0)[0]
        raise NegativeEntry(f"negative probability at (s={s}, x={x}): {table[s, x]}")
    total = table.sum()
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise MassNotNormalizable(f"total mass {total!r} deviates from 1 by more than 1e-6")
    table = table / total
    dead_cols = np.flatnonzero(table.sum(axis=0) <= 0)
    if dead_cols.size:
        raise DeadSymbol(f"symbol column(s) {dead_cols.tolist()} have zero mass")
    dead_rows = np.flatnonzero(table.sum(axis=1) <= 0)
    if dead_rows.size:
        raise DeadSymbol(f"secret row(s) {dead_rows.tolist()} have zero mass")

    kern = _kernels.active
    ps = kern.block_column(table, np.arange(table.shape[1], dtype=np.int64))
    return JointDistribution(mass=_frozen(table), px=_frozen(table.sum(axis=0)), ps=_frozen(ps))


def marginals(joint: JointDistribution) -> Marginals:
    return Marginals(px=joint.px, ps=joint.ps)


def entropy_x(joint: JointDistribution) -> float:
    """Shannon entropy of the symbol marginal, in nats."""
    px = joint.px[joint.px > 0]
    return float(max(0.0, -np.sum(px * np.log(px))))


def sample_random_joint(num_secrets: int, num_symbols: int, rng_seed: int) -> JointDistribution:
    """Draw a joint uniformly from the simplex of |S| x |X| tables.

    Draws with a row or column mass below 1e-12 are rejected and redrawn.
    """
    if num_secrets < 1 or num_symbols < 1:
        raise ValueError("num_secrets and num_symbols must be >= 1")
    rng = np.random.default_rng(rng_seed)
    n = num_secrets * num_symbols
    for _ in range(MAX_SAMPLER_ATTEMPTS):
        table = rng.dirichlet(np.ones(n)).reshape(num_secrets, num_symbols)
        if table.sum(axis=0).min() >= MIN_SAMPLED_MASS and table.sum(axis=1).min() >= MIN_SAMPLED_MASS:
            return validate(table)
    raise DegenerateSampler(f"no admissible draw after {MAX_SAMPLER_ATTEMPTS} attempts")


def trial_seed(master_seed: int, trial: int) -> int:
    """Child seed for one Monte Carlo trial, derived from (master seed, index)."""
    state = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(trial)])
    return int(state.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def from_json_obj(obj) -> JointDistribution:
    if not isinstance(obj, dict) or "mass" not in obj:
        raise InvalidDistribution('JSON input must be an object with a "mass" field')
    joint = validate(obj["mass"])
    for key, actual in (("num_secrets", joint.num_secrets), ("num_symbols", joint.num_symbols)):
        if key in obj and obj[key] != actual:
            raise InvalidDistribution(f"{key}={obj[key]} does not match mass shape ({actual})")
    return joint


def read_csv_table(text: str):
    rows = [row for row in csv.reader(text.splitlines()) if row and any(c.strip() for c in row)]
    try:
        return [[float(c) for c in row] for row in rows]
    except ValueError as exc:
        raise InvalidDistribution(f"CSV contains a non-numeric cell: {exc}") from exc


def load(path) -> JointDistribution:
    """Read a joint from a ``.json`` or headerless ``.csv`` file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".csv":
        return validate(read_csv_table(text))
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        if path.suffix.lower() == ".json":
            raise InvalidDistribution(f"{path}: invalid JSON: {exc}") from exc
        return validate(read_csv_table(text))
    return from_json_obj(obj)


def dump_json(joint: JointDistribution, path) -> None:
    try:
        Path(path).write_text(json.dumps(joint.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def dump_csv(joint: JointDistribution, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in joint.mass:
                writer.writerow([f"{v:.17g}" for v in row])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
