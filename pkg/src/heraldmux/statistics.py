"""Photon-number laws and the response of a single non-resolving detector.

Everything here is a pure function of its arguments. Closed forms are used for
the values that are returned; the truncated series helpers exist so the closed
forms can be cross-checked against direct summation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, pdtrc

from .errors import DomainError, UndefinedPosteriorError

__all__ = [
    "Kind",
    "PhotonNumberDistribution",
    "check_efficiency",
    "check_mean",
    "pmf",
    "pmf_array",
    "truncation_bound",
    "detector_fire_prob",
    "p_no_fire",
    "p_no_fire_series",
    "posterior_given_fire",
    "posterior_given_fire_series",
    "p_some_photon_given_no_fire",
    "p_some_photon_given_no_fire_series",
]

#: tail mass left outside the truncated support by :func:`truncation_bound`
SERIES_TAIL = 1e-14


class Kind(str, enum.Enum):
    BOSE_EINSTEIN = "bose-einstein"
    POISSON = "poisson"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"be": cls.BOSE_EINSTEIN, "thermal": cls.BOSE_EINSTEIN, "boseeinstein": cls.BOSE_EINSTEIN}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown photon statistics kind {value!r}") from None


def check_mean(m: float, name: str = "mean") -> float:
    m = float(m)
    if not math.isfinite(m) or m < 0:
        raise DomainError(f"{name} must be a finite nonnegative number, got {m!r}")
    return m


def check_efficiency(eta: float, name: str = "eta") -> float:
    eta = float(eta)
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {eta!r}")
    return eta


def _check_n(n: int) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"photon number must be a nonnegative integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Single-mode photon-number law with mean ``mean`` photons per pulse."""

    kind: Kind
    mean: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "mean", check_mean(self.mean))

    @classmethod
    def bose_einstein(cls, mean: float) -> "PhotonNumberDistribution":
        return cls(Kind.BOSE_EINSTEIN, mean)

    @classmethod
    def poisson(cls, mean: float) -> "PhotonNumberDistribution":
        return cls(Kind.POISSON, mean)


def pmf(dist: PhotonNumberDistribution, n: int) -> float:
    """Probability of exactly ``n`` photons in the mode.

    Bose-Einstein: ``m**n / (1 + m)**(n + 1)``; Poisson: ``m**n exp(-m) / n!``.
    """
    n = _check_n(n)
    m = dist.mean
    if m == 0.0:
        return 1.0 if n == 0 else 0.0
    if dist.kind is Kind.BOSE_EINSTEIN:
        if n < 64:
            return m**n / (1.0 + m) ** (n + 1)
        return math.exp(n * math.log(m) - (n + 1) * math.log1p(m))
    return math.exp(n * math.log(m) - m - math.lgamma(n + 1))


def truncation_bound(dist: PhotonNumberDistribution, tail: float = SERIES_TAIL) -> int:
    """Smallest N whose neglected tail P(n > N) is below ``tail``.

    The Bose-Einstein tail is exactly ``(m / (1 + m))**(N + 1)``; the Poisson
    tail is the regularized upper incomplete gamma function.
    """
    m = dist.mean
    if m == 0.0:
        return 0
    if dist.kind is Kind.BOSE_EINSTEIN:
        ratio = m / (1.0 + m)
        n = max(0, math.ceil(math.log(tail) / math.log(ratio)) - 1)
        while ratio ** (n + 1) >= tail:
            n += 1
        return n
    n = int(m)
    while pdtrc(n, m) >= tail:
        n += 1 + n // 8
    while n > 0 and pdtrc(n - 1, m) < tail:
        n -= 1
    return n


def pmf_array(dist: PhotonNumberDistribution, nmax: int | None = None) -> np.ndarray:
    """pmf values for n = 0..nmax (default: the truncation bound)."""
    if nmax is None:
        nmax = truncation_bound(dist)
    n = np.arange(_check_n(nmax) + 1, dtype=float)
    m = dist.mean
    if m == 0.0:
        out = np.zeros_like(n)
        out[0] = 1.0
        return out
    if dist.kind is Kind.BOSE_EINSTEIN:
        return np.exp(n * math.log(m) - (n + 1) * math.log1p(m))
    return np.exp(n * math.log(m) - m - gammaln(n + 1))


def detector_fire_prob(eta: float, n: int) -> float:
    """Click probability of a detector of efficiency ``eta`` hit by ``n`` photons."""
    eta = check_efficiency(eta)
    n = _check_n(n)
    if n == 0:
        return 0.0
    return 1.0 - (1.0 - eta) ** n


def p_no_fire(dist: PhotonNumberDistribution, eta: float) -> float:
    """Total probability that the detector stays silent, ``sum_k (1-eta)^k P(k)``."""
    eta = check_efficiency(eta)
    if dist.kind is Kind.BOSE_EINSTEIN:
        return 1.0 / (1.0 + eta * dist.mean)
    return math.exp(-eta * dist.mean)


def p_no_fire_series(dist: PhotonNumberDistribution, eta: float) -> float:
    eta = check_efficiency(eta)
    p = pmf_array(dist)
    return float(np.sum((1.0 - eta) ** np.arange(p.size) * p))


def _fire_norm(dist: PhotonNumberDistribution, eta: float) -> float:
    if eta == 0.0 or dist.mean == 0.0:
        raise UndefinedPosteriorError(
            f"detector can never fire (eta={eta}, mean={dist.mean}); posterior is undefined"
        )
    # 1 - p_no_fire without cancellation
    if dist.kind is Kind.BOSE_EINSTEIN:
        x = eta * dist.mean
        return x / (1.0 + x)
    return -math.expm1(-eta * dist.mean)


def posterior_given_fire(dist: PhotonNumberDistribution, eta: float, n: int) -> float:
    """Probability that ``n`` photons were incident given that the detector fired."""
    eta = check_efficiency(eta)
    n = _check_n(n)
    if n < 1:
        raise DomainError("posterior_given_fire needs n >= 1; a click excludes vacuum")
    return detector_fire_prob(eta, n) * pmf(dist, n) / _fire_norm(dist, eta)


def posterior_given_fire_series(dist: PhotonNumberDistribution, eta: float, n: int) -> float:
    eta = check_efficiency(eta)
    n = _check_n(n)
    if eta == 0.0 or dist.mean == 0.0:
        raise UndefinedPosteriorError("detector can never fire; posterior is undefined")
    p = pmf_array(dist, max(n, truncation_bound(dist)))
    fire = 1.0 - (1.0 - eta) ** np.arange(p.size)
    return float(fire[n] * p[n] / np.sum(fire * p))


def p_some_photon_given_no_fire(dist: PhotonNumberDistribution, eta: float) -> float:
    """Probability that at least one photon was present although the detector stayed silent.

    For Bose-Einstein this is ``m (1 - eta) / (1 + m)``; for Poisson
    ``1 - exp(-(1 - eta) m)``.
    """
    eta = check_efficiency(eta)
    m = dist.mean
    if dist.kind is Kind.BOSE_EINSTEIN:
        return m * (1.0 - eta) / (1.0 + m)
    return -math.expm1(-(1.0 - eta) * m)


def p_some_photon_given_no_fire_series(dist: PhotonNumberDistribution, eta: float) -> float:
    eta = check_efficiency(eta)
    p = pmf_array(dist)
    silent = (1.0 - eta) ** np.arange(p.size) * p
    return float(np.sum(silent[1:]) / np.sum(silent))
