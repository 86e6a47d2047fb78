import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import ks_2samp

from qgnn_lab.experiments.stats import (EnergySampleSet, distribution_ks, energy_distribution,
                                        iso_pair_loss, ks_statistic)

samples = st.lists(st.integers(0, 8).map(float), min_size=1, max_size=40)


def test_ks_hand_examples():
    assert ks_statistic([1, 2, 3, 4], [3, 4, 5, 6]) == 0.5
    assert ks_statistic([2, 2, 5], [2, 2, 5]) == 0.0
    assert ks_statistic([0, 0], [5, 5]) == 1.0
    assert ks_statistic(EnergySampleSet([1, 2]), EnergySampleSet([1, 2])) == 0.0


def test_ks_empty():
    with pytest.raises(ValueError):
        ks_statistic([], [1.0])


@given(samples, samples)
def test_ks_matches_scipy(a, b):
    assert ks_statistic(a, b) == pytest.approx(ks_2samp(a, b).statistic, abs=1e-12)


@given(samples, samples)
def test_distribution_ks_equals_sample_ks(a, b):
    la, ma = energy_distribution(np.full(len(a), 1 / len(a)), a)
    lb, mb = energy_distribution(np.full(len(b), 1 / len(b)), b)
    assert distribution_ks(la, ma, lb, mb) == pytest.approx(ks_statistic(a, b), abs=1e-12)


def test_energy_distribution_merges_rounding_noise():
    levels, mass = energy_distribution([0.1, 0.2, 0.3, 0.4], [1.0, 1.0 + 1e-13, 0.0, 2.0])
    np.testing.assert_array_equal(levels, [0.0, 1.0, 2.0])
    np.testing.assert_allclose(mass, [0.3, 0.3, 0.4])


@pytest.mark.parametrize("y,ks,want", [(1, 0.0, 0.0), (0, 1.0, 0.0), (0, 0.3, 0.7),
                                       (1, 0.3, 0.3)])
def test_iso_pair_loss(y, ks, want):
    assert iso_pair_loss(y, ks) == pytest.approx(want)


@pytest.mark.parametrize("y,ks", [(2, 0.5), (0, -0.1), (1, 1.5)])
def test_iso_pair_loss_range(y, ks):
    with pytest.raises(ValueError):
        iso_pair_loss(y, ks)
