import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heraldmux.errors import DomainError, UndefinedPosteriorError
from heraldmux.statistics import (
    Kind,
    PhotonNumberDistribution as Dist,
    detector_fire_prob,
    p_no_fire,
    p_no_fire_series,
    p_some_photon_given_no_fire,
    p_some_photon_given_no_fire_series,
    pmf,
    pmf_array,
    posterior_given_fire,
    posterior_given_fire_series,
    truncation_bound,
)

from oracles import mode_pmf

BE, PO = Kind.BOSE_EINSTEIN, Kind.POISSON
GRID_M = (0.125, 0.5, 1.0, 2.0)
GRID_ETA = (0.25, 0.5, 0.75, 1.0)


def test_pmf_examples():
    assert pmf(Dist(BE, 0.0), 0) == 1.0
    assert pmf(Dist(BE, 1.0), 1) == 0.25
    assert pmf(Dist(PO, 1.0), 1) == pytest.approx(math.exp(-1), rel=1e-15)
    assert pmf(Dist(PO, 0.0), 3) == 0.0


@pytest.mark.parametrize("kind", ["bose-einstein", "poisson"])
@pytest.mark.parametrize("m", [0.01, 0.5, 1.0, 3.0, 16.0])
def test_pmf_matches_scipy(kind, m):
    n = np.arange(0, 90)
    ours = np.array([pmf(Dist(kind, m), int(k)) for k in n])
    np.testing.assert_allclose(ours, mode_pmf(kind, m, n), rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(pmf_array(Dist(kind, m), 89), ours, rtol=1e-12, atol=1e-300)


def test_pmf_domain_errors():
    with pytest.raises(DomainError):
        Dist(BE, -0.1)
    with pytest.raises(DomainError):
        Dist(BE, math.inf)
    with pytest.raises(DomainError):
        pmf(Dist(BE, 1.0), -1)
    with pytest.raises(DomainError):
        Dist("laser", 1.0)


@settings(max_examples=60, deadline=None)
@given(m=st.floats(0.0, 16.0), kind=st.sampled_from([BE, PO]))
def test_normalization_and_mean(m, kind):
    d = Dist(kind, m)
    p = pmf_array(d)
    assert np.all(p >= 0)
    assert 1 - 1e-12 <= p.sum() <= 1 + 1e-15
    mean = float(np.sum(np.arange(p.size) * p))
    assert mean == pytest.approx(m, rel=1e-9, abs=1e-12)


def test_truncation_bound_is_smallest():
    for kind in (BE, PO):
        for m in (0.1, 1.0, 8.0):
            d = Dist(kind, m)
            n = truncation_bound(d)
            tail = lambda k: 1.0 - float(np.sum(mode_pmf(kind.value, m, np.arange(k + 1))))
            assert tail(n) < 1e-13
            assert tail(n - 1) > 1e-15


def test_detector_fire_prob():
    assert detector_fire_prob(0.3, 0) == 0.0
    assert detector_fire_prob(0.0, 0) == 0.0
    assert detector_fire_prob(1.0, 3) == 1.0
    assert detector_fire_prob(0.5, 2) == 0.75
    with pytest.raises(DomainError):
        detector_fire_prob(1.2, 1)


def test_posterior_given_fire_examples():
    assert posterior_given_fire(Dist(BE, 1.0), 1.0, 1) == pytest.approx(0.5, abs=1e-15)
    # frozen from the truncated series in oracles: 0.5 * 0.25 / (1/3)
    assert posterior_given_fire(Dist(BE, 1.0), 0.5, 1) == pytest.approx(0.375, abs=1e-15)
    assert posterior_given_fire(Dist(PO, 1e-6), 1.0, 1) == pytest.approx(1.0, abs=1e-6)


def test_posterior_given_fire_undefined():
    with pytest.raises(UndefinedPosteriorError):
        posterior_given_fire(Dist(BE, 1.0), 0.0, 1)
    with pytest.raises(UndefinedPosteriorError):
        posterior_given_fire(Dist(BE, 0.0), 0.5, 1)
    with pytest.raises(DomainError):
        posterior_given_fire(Dist(BE, 1.0), 0.5, 0)


@pytest.mark.parametrize("kind", [BE, PO])
@pytest.mark.parametrize("m", GRID_M)
@pytest.mark.parametrize("eta", GRID_ETA)
def test_posterior_sums_to_one(kind, m, eta):
    d = Dist(kind, m)
    total = math.fsum(posterior_given_fire(d, eta, n) for n in range(1, truncation_bound(d) + 1))
    assert total == pytest.approx(1.0, abs=1e-10)
    for n in (1, 2, 5):
        assert posterior_given_fire(d, eta, n) == pytest.approx(posterior_given_fire_series(d, eta, n), abs=1e-12)


def test_p_some_photon_given_no_fire_examples():
    for kind in (BE, PO):
        assert p_some_photon_given_no_fire(Dist(kind, 1.3), 1.0) == 0.0
    assert p_some_photon_given_no_fire(Dist(BE, 1.0), 0.0) == 0.5
    assert p_some_photon_given_no_fire(Dist(BE, 1.0), 0.5) == 0.25


def test_p_no_fire_examples():
    assert p_no_fire(Dist(BE, 3.0), 0.0) == 1.0
    assert p_no_fire(Dist(PO, 3.0), 0.0) == 1.0
    assert p_no_fire(Dist(BE, 1.0), 1.0) == 0.5
    assert p_no_fire(Dist(PO, 2.0), 0.5) == pytest.approx(math.exp(-1), rel=1e-15)


@pytest.mark.parametrize("kind", [BE, PO])
@pytest.mark.parametrize("m", GRID_M)
@pytest.mark.parametrize("eta", GRID_ETA)
def test_closed_forms_match_series(kind, m, eta):
    d = Dist(kind, m)
    assert p_no_fire(d, eta) == pytest.approx(p_no_fire_series(d, eta), abs=1e-10)
    assert p_some_photon_given_no_fire(d, eta) == pytest.approx(p_some_photon_given_no_fire_series(d, eta), abs=1e-10)


@pytest.mark.parametrize("kind", [BE, PO])
@pytest.mark.parametrize("m", GRID_M)
@pytest.mark.parametrize("eta", (0.0,) + GRID_ETA)
def test_complementarity(kind, m, eta):
    d = Dist(kind, m)
    p = pmf_array(d)
    fire = math.fsum(detector_fire_prob(eta, n) * p[n] for n in range(p.size))
    assert p_no_fire(d, eta) + fire == pytest.approx(1.0, abs=1e-10)
