"""Independent reference computations used to freeze and check expected values.

Nothing here imports the closed forms under test. Mode pmfs come from
scipy.stats; the trigger outcome of every photon-count vector is evaluated
directly from the first-click rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats


def mode_pmf(kind: str, m: float, n: np.ndarray) -> np.ndarray:
    if m == 0:
        return (n == 0).astype(float)
    if kind == "bose-einstein":
        return stats.geom.pmf(n + 1, 1.0 / (1.0 + m))
    return stats.poisson.pmf(n, m)


@lru_cache(maxsize=None)
def compositions(modes: int, max_total: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``modes`` with sum <= ``max_total``."""
    if modes == 1:
        return np.arange(max_total + 1, dtype=np.int16)[:, None]
    parts = []
    for k in range(max_total + 1):
        rest = compositions(modes - 1, max_total - k)
        parts.append(np.hstack([np.full((rest.shape[0], 1), k, dtype=np.int16), rest]))
    return np.vstack(parts)


@dataclass
class Enumerated:
    occurrence: np.ndarray       # P(event = i), i = 0..N_D
    single_and_event: np.ndarray  # P(event = i, total = 1)
    mass: float                   # probability covered by the enumeration

    @property
    def certification(self) -> np.ndarray:
        return self.single_and_event[1:] / self.occurrence[1:]

    @property
    def single(self) -> float:
        return float(self.single_and_event.sum())

    @property
    def single_given_trigger(self) -> float:
        return float(self.single_and_event[1:].sum() / self.occurrence[1:].sum())


def enumerate_trigger(kind: str, nbar: float, eta: float, nd: int, max_total: int) -> Enumerated:
    """Exact event probabilities by summing over photon configurations up to ``max_total`` photons."""
    n = compositions(nd, max_total).astype(np.int64)
    m = nbar / nd
    weight = np.prod(mode_pmf(kind, m, n), axis=1)
    silent = (1.0 - eta) ** n                     # per-mode no-click probability
    before = np.cumprod(np.hstack([np.ones((n.shape[0], 1)), silent[:, :-1]]), axis=1)
    p_event = before * (1.0 - silent)             # mode j clicks first
    p_none = np.prod(silent, axis=1)
    total = n.sum(axis=1)
    occ = np.concatenate([[np.sum(weight * p_none)], (weight[:, None] * p_event).sum(axis=0)])
    one = total == 1
    single = np.concatenate([[np.sum((weight * p_none)[one])], (weight[one, None] * p_event[one]).sum(axis=0)])
    return Enumerated(occ, single, float(weight.sum()))


def series_sum(terms) -> float:
    return float(np.sum(terms))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Plain golden-section maximizer, used to cross-check the optimum search."""
    g = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (a + b) / 2.0
