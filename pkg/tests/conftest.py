import numpy as np
import pytest

from liftwatchdog import _kernels, validate

# Three-symbol example used throughout; reference values from 30-digit mpmath.
J3 = [[0.25, 0.15, 0.10], [0.05, 0.15, 0.30]]
J3_OMEGA = [1.09861228866810969, 0.0, 0.693147180559945309]
J3_H = 1.08889997534522362
J3_MERGED_I = 0.610864302054893463
J3_MERGED_NMIL = 0.439007883289531958


@pytest.fixture
def j3():
    return validate(J3)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    kern = _kernels.NUMBA_KERNELS if request.param == "numba" else _kernels.NUMPY_KERNELS
    if kern is None:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_kernels, "active", kern)
    return kern


# ---------------------------------------------------------------------------
# oracles that do not touch the package's kernels
# ---------------------------------------------------------------------------


def set_partitions(items):
    """All set partitions of ``items``, by recursive insertion."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def random_partition(rng, symbols):
    symbols = list(symbols)
    if not symbols:
        return ()
    labels = rng.integers(0, len(symbols), size=len(symbols))
    blocks = {}
    for x, lab in zip(symbols, labels):
        blocks.setdefault(int(lab), []).append(x)
    return tuple(tuple(b) for _, b in sorted(blocks.items()))


def direct_mutual_information(px, transition):
    """sum_{x,y} p(x) p(y|x) ln(p(y|x) / p(y))."""
    py = px @ transition
    total = 0.0
    for x in range(transition.shape[0]):
        for y in range(transition.shape[1]):
            t = transition[x, y]
            if t > 0:
                total += px[x] * t * np.log(t / py[y])
    return total


def direct_leakage(mass, transition):
    """max_{y,s} |ln(p(y|s) / p(y))| from the transition matrix alone."""
    ps = mass.sum(axis=1)
    px = mass.sum(axis=0)
    py = px @ transition
    py_given_s = (mass / ps[:, None]) @ transition
    with np.errstate(divide="ignore"):
        return float(np.max(np.abs(np.log(py_given_s / py[None, :]))))


# ---------------------------------------------------------------------------
# acceptance reporting
# ---------------------------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    def _report(criterion, ok, detail):
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        ACCEPTANCE_LINES.append(f"criterion {criterion}: {status} - {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
