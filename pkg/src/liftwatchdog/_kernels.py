"""Numeric inner loops, with a numba-compiled and a plain-numpy implementation.

The numba bodies are used when numba imports cleanly and the environment
variable ``LIFT_WATCHDOG_DISABLE_NUMBA`` is unset (or ``0``/``false``). Both
implementations are always importable as ``NUMBA_KERNELS`` / ``NUMPY_KERNELS``
so they can be compared against each other.

Every leakage value in the package goes through ``column_omega`` of the active
backend, applied to a column built by ``block_column``. Keeping a single code
path for these two primitives is what makes "feasible implies leakage <= eps"
hold bit-for-bit rather than up to rounding.
"""

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None


def _numba_disabled():
    flag = os.environ.get("LIFT_WATCHDOG_DISABLE_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy implementation
# ---------------------------------------------------------------------------


def _np_block_column(mass, members):
    col = np.zeros(mass.shape[0])
    for x in members:
        col += mass[:, x]
    return col


def _np_column_omega(col, ps):
    if np.any(col <= 0.0):
        return np.inf
    shift = np.log(col.sum() / ps.sum())
    return float(np.max(np.abs(np.log(col / ps) - shift)))


def _np_stacked_omegas(base, cols, ps):
    merged = base[:, None] + cols
    with np.errstate(divide="ignore"):
        lifts = np.log(merged / ps[:, None]) - np.log(merged.sum(axis=0) / ps.sum())
    out = np.abs(lifts).max(axis=0)
    out[(merged <= 0.0).any(axis=0)] = np.inf
    return out


def _rgs_lex_less(a, b, m):
    """True if the partition coded by RGS ``a`` has lexicographically smaller
    block content than ``b`` (blocks ordered by their first element)."""
    nblocks = 0
    for i in range(m):
        if a[i] + 1 > nblocks:
            nblocks = a[i] + 1
    for k in range(nblocks):
        ia = 0
        ib = 0
        while True:
            while ia < m and a[ia] != k:
                ia += 1
            while ib < m and b[ib] != k:
                ib += 1
            if ia == m or ib == m:
                if ia == m and ib == m:
                    break
                return ia == m
            if ia != ib:
                return ia < ib
            ia += 1
            ib += 1
    return False


def _np_best_partition(penalty, feasible, m):
    """Enumerate restricted growth strings of length ``m``.

    Returns ``(rgs, utility_gain)`` of the feasible partition with the
    largest summed block penalty (penalties are <= 0); ties go to fewer blocks,
    then to lexicographically smaller block content. ``rgs`` is all -1 when no
    partition is feasible.
    """
    best = np.full(m, -1, dtype=np.int64)
    best_gain = -np.inf
    best_blocks = m + 1
    a = np.zeros(m, dtype=np.int64)
    prefix_max = np.zeros(m, dtype=np.int64)
    masks = np.zeros(m, dtype=np.int64)
    while True:
        masks[:] = 0
        nblocks = 0
        for i in range(m):
            masks[a[i]] |= 1 << i
            if a[i] + 1 > nblocks:
                nblocks = a[i] + 1
        ok = True
        gain = 0.0
        for k in range(nblocks):
            if not feasible[masks[k]]:
                ok = False
                break
            gain += penalty[masks[k]]
        if ok:
            if (
                gain > best_gain
                or (gain == best_gain and nblocks < best_blocks)
                or (gain == best_gain and nblocks == best_blocks and _rgs_lex_less(a, best, m))
            ):
                best[:] = a
                best_gain = gain
                best_blocks = nblocks
        i = m - 1
        while i >= 1 and a[i] > prefix_max[i]:
            i -= 1
        if i < 1:
            break
        a[i] += 1
        for j in range(i + 1, m):
            a[j] = 0
            prefix_max[j] = max(prefix_max[j - 1], a[j - 1])
    return best, best_gain


NUMPY_KERNELS = SimpleNamespace(
    name="numpy",
    block_column=_np_block_column,
    column_omega=_np_column_omega,
    stacked_omegas=_np_stacked_omegas,
    best_partition=_np_best_partition,
)


# ---------------------------------------------------------------------------
# numba implementation
# ---------------------------------------------------------------------------

NUMBA_KERNELS = None

if numba is not None:
    _njit = numba.njit(cache=True)

    @_njit
    def _nb_block_column(mass, members):
        col = np.zeros(mass.shape[0])
        for x in members:
            for s in range(mass.shape[0]):
                col[s] += mass[s, x]
        return col

    @_njit
    def _nb_column_omega(col, ps):
        q = 0.0
        total = 0.0
        for s in range(col.shape[0]):
            if col[s] <= 0.0:
                return np.inf
            q += col[s]
            total += ps[s]
        shift = np.log(q / total)
        worst = 0.0
        for s in range(col.shape[0]):
            v = abs(np.log(col[s] / ps[s]) - shift)
            if v > worst:
                worst = v
        return worst

    @_njit
    def _nb_stacked_omegas(base, cols, ps):
        nsec, ncand = cols.shape
        total = 0.0
        for s in range(nsec):
            total += ps[s]
        out = np.empty(ncand)
        merged = np.empty(nsec)
        for c in range(ncand):
            q = 0.0
            dead = False
            for s in range(nsec):
                merged[s] = base[s] + cols[s, c]
                if merged[s] <= 0.0:
                    dead = True
                q += merged[s]
            if dead:
                out[c] = np.inf
                continue
            shift = np.log(q / total)
            worst = 0.0
            for s in range(nsec):
                v = abs(np.log(merged[s] / ps[s]) - shift)
                if v > worst:
                    worst = v
            out[c] = worst
        return out

    _nb_rgs_lex_less = _njit(_rgs_lex_less)

    @_njit
    def _nb_best_partition(penalty, feasible, m):
        best = np.full(m, -1, dtype=np.int64)
        best_gain = -np.inf
        best_blocks = m + 1
        a = np.zeros(m, dtype=np.int64)
        prefix_max = np.zeros(m, dtype=np.int64)
        masks = np.zeros(m, dtype=np.int64)
        while True:
            masks[:] = 0
            nblocks = 0
            for i in range(m):
                masks[a[i]] |= np.int64(1) << i
                if a[i] + 1 > nblocks:
                    nblocks = a[i] + 1
            ok = True
            gain = 0.0
            for k in range(nblocks):
                if not feasible[masks[k]]:
                    ok = False
                    break
                gain += penalty[masks[k]]
            if ok:
                if (
                    gain > best_gain
                    or (gain == best_gain and nblocks < best_blocks)
                    or (
                        gain == best_gain
                        and nblocks == best_blocks
                        and _nb_rgs_lex_less(a, best, m)
                    )
                ):
                    best[:] = a
                    best_gain = gain
                    best_blocks = nblocks
            i = m - 1
            while i >= 1 and a[i] > prefix_max[i]:
                i -= 1
            if i < 1:
                break
            a[i] += 1
            for j in range(i + 1, m):
                a[j] = 0
                prefix_max[j] = max(prefix_max[j - 1], a[j - 1])
        return best, best_gain

    NUMBA_KERNELS = SimpleNamespace(
        name="numba",
        block_column=_nb_block_column,
        column_omega=_nb_column_omega,
        stacked_omegas=_nb_stacked_omegas,
        best_partition=_nb_best_partition,
    )


def select_kernels():
    if NUMBA_KERNELS is None or _numba_disabled():
        return NUMPY_KERNELS
    return NUMBA_KERNELS


active = select_kernels()
BACKEND = active.name
