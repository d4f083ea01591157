import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import J3_OMEGA
from liftwatchdog import (
    EmptySubset,
    compute_lift_profile,
    risk_split,
    sample_random_joint,
    subset_omega,
    validate,
)
from liftwatchdog.lift import dump_profile_csv


def test_profile_symmetric():
    p = compute_lift_profile(validate([[0.4, 0.1], [0.1, 0.4]]))
    assert p.log_lift[0, 0] == pytest.approx(math.log(1.6), abs=1e-12)
    assert p.log_lift[1, 0] == pytest.approx(math.log(0.4), abs=1e-12)
    np.testing.assert_allclose(p.omega, [0.916290731874155, 0.916290731874155], atol=1e-12)


def test_profile_independent():
    p = compute_lift_profile(validate(np.full((2, 2), 0.25)))
    assert np.all(p.log_lift == 0)
    assert p.omega.tolist() == [0.0, 0.0]


def test_profile_three_symbols(j3):
    p = compute_lift_profile(j3)
    np.testing.assert_allclose(p.omega, J3_OMEGA, atol=1e-12)


def test_zero_cell_is_infinitely_risky():
    p = compute_lift_profile(validate([[0.5, 0.0], [0.25, 0.25]]))
    assert p.log_lift[0, 1] == -np.inf
    assert p.omega[1] == np.inf
    split = risk_split(p, 1e6)
    assert split.high_risk == (1,)


def test_subset_omega_examples(j3):
    assert subset_omega(j3, {0, 2}) == pytest.approx(0.0, abs=1e-15)
    assert subset_omega(j3, {0, 1, 2}) == 0.0
    with pytest.raises(EmptySubset):
        subset_omega(j3, set())
    with pytest.raises(IndexError):
        subset_omega(j3, {5})


def test_subset_omega_finite_after_absorbing_mass():
    j = validate([[0.3, 0.0, 0.2], [0.1, 0.2, 0.2]])
    assert subset_omega(j, {1}) == np.inf
    assert np.isfinite(subset_omega(j, {0, 1}))


@pytest.mark.parametrize(
    "eps, low, high",
    [(0.8, (1, 2), (0,)), (0.5, (1,), (0, 2)), (math.inf, (0, 1, 2), ()), (0.0, (1,), (0, 2))],
)
def test_risk_split(j3, eps, low, high):
    split = risk_split(compute_lift_profile(j3), eps)
    assert split.low_risk == low and split.high_risk == high


def test_risk_split_boundary_is_low_risk(j3):
    p = compute_lift_profile(j3)
    split = risk_split(p, p.omega[2])
    assert 2 in split.low_risk


def test_risk_split_rejects_negative(j3):
    with pytest.raises(ValueError):
        risk_split(compute_lift_profile(j3), -0.1)


def test_profile_csv(tmp_path, j3):
    path = tmp_path / "lift.csv"
    dump_profile_csv(compute_lift_profile(j3), path)
    rows = path.read_text().splitlines()
    assert len(rows) == 2 and all(len(r.split(",")) == 3 for r in rows)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 9), st.integers(0, 2**32 - 1), st.randoms())
def test_profile_properties(ns, nx, seed, rnd):
    j = sample_random_joint(ns, nx, seed)
    p = compute_lift_profile(j)
    assert np.all(p.omega >= 0)
    # posterior normalization: sum_s p(s) e^{i(s,x)} = 1
    np.testing.assert_allclose((j.ps[:, None] * np.exp(p.log_lift)).sum(axis=0), 1.0, atol=1e-9)
    for x in range(nx):
        assert abs(subset_omega(j, {x}) - p.omega[x]) <= 1e-12
        assert abs(p.omega[x] - np.abs(p.log_lift[:, x]).max()) <= 1e-12
    assert subset_omega(j, range(nx)) == 0.0
    subset = [x for x in range(nx) if rnd.random() < 0.5] or [0]
    shuffled = list(subset)
    rnd.shuffle(shuffled)
    assert subset_omega(j, shuffled) == subset_omega(j, subset)
    for eps in (0.0, 0.3, 1.0, np.inf):
        split = risk_split(p, eps)
        assert set(split.low_risk) | set(split.high_risk) == set(range(nx))
        assert not set(split.low_risk) & set(split.high_risk)
        assert all(p.omega[x] <= eps for x in split.low_risk)
        assert all(p.omega[x] > eps for x in split.high_risk)
