"""Closed-form model of a delay-multiplexed heralded downconversion source.

``N_D`` delay lines each carry one independent mode with mean ``nbar / N_D``
photons. They feed one trigger detector; the first line (shortest delay) that
delivers a detected photon fires it and dead time hides the rest. Delay index
``i`` runs from 1 to ``N_D``; index 0 means the trigger never fired.

Certification closed form
-------------------------
Writing ``m = nbar / N_D``, the certification of delay ``i`` is

    (P(0) / p_no_fire)**(i-1) * P_fire(1) * P(0)**(N_D - i)

With Bose-Einstein modes ``P(0) / p_no_fire = (1 + eta m) / (1 + m)`` and
``P_fire(1) = (1 + eta m) / (1 + m)**2``, so

    certification(i) = (N_D + eta nbar)**i * N_D**(N_D + 1 - i) / (nbar + N_D)**(N_D + 1)

The form sometimes quoted with exponents ``i - 1 + N_D`` and ``i`` on the two
factors decreases with ``i`` at ``eta = 1``; the expression above is the one
that agrees with the term-by-term composition (:func:`certification_compositional`)
and with the Monte Carlo estimates in :mod:`heraldmux.simulator`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, UndefinedConditioningError
from .statistics import (
    Kind,
    PhotonNumberDistribution,
    check_efficiency,
    check_mean,
    p_no_fire,
    p_some_photon_given_no_fire,
    pmf,
    posterior_given_fire,
)

__all__ = [
    "MultiplexConfig",
    "TriggerEvent",
    "DelayReport",
    "CertificationReport",
    "LossModel",
    "certification",
    "certification_compositional",
    "delay_fire_prob",
    "no_trigger_prob",
    "single_photon_prob",
    "single_photon_prob_compositional",
    "single_photon_prob_given_trigger",
    "single_photon_prob_given_trigger_compositional",
    "poisson_limit",
    "poisson_limit_given_trigger",
    "heralded_product",
    "certify",
    "optimal_mean",
    "source_comparison",
    "loss_budget",
    "reference_loss_model",
]


@dataclass(frozen=True)
class MultiplexConfig:
    nbar: float
    eta: float
    num_delays: int
    kind: Kind = Kind.BOSE_EINSTEIN

    def __post_init__(self):
        object.__setattr__(self, "nbar", check_mean(self.nbar, "nbar"))
        object.__setattr__(self, "eta", check_efficiency(self.eta))
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        nd = self.num_delays
        if int(nd) != nd or nd < 1:
            raise DomainError(f"num_delays must be a positive integer, got {nd!r}")
        object.__setattr__(self, "num_delays", int(nd))

    @property
    def mode_mean(self) -> float:
        return self.nbar / self.num_delays

    @property
    def mode(self) -> PhotonNumberDistribution:
        """Distribution of one delay line."""
        return PhotonNumberDistribution(self.kind, self.mode_mean)

    def replace(self, **changes) -> "MultiplexConfig":
        fields = dict(nbar=self.nbar, eta=self.eta, num_delays=self.num_delays, kind=self.kind)
        fields.update(changes)
        return MultiplexConfig(**fields)


@dataclass(frozen=True)
class TriggerEvent:
    delay_index: int
    num_delays: int

    def __post_init__(self):
        if not 0 <= self.delay_index <= self.num_delays:
            raise DomainError(f"delay index {self.delay_index} outside [0, {self.num_delays}]")

    @property
    def fired(self) -> bool:
        return self.delay_index > 0


def _check_delay(cfg: MultiplexConfig, i: int) -> int:
    if int(i) != i or not 1 <= i <= cfg.num_delays:
        raise DomainError(f"delay index must be in 1..{cfg.num_delays}, got {i!r}")
    return int(i)


def certification_compositional(cfg: MultiplexConfig, i: int) -> float:
    """Certification of delay ``i`` assembled factor by factor from single-mode quantities.

    Works for either statistics kind. Undefined (raises) when the trigger cannot fire.
    """
    i = _check_delay(cfg, i)
    mode = cfg.mode
    earlier_empty = 1.0 - p_some_photon_given_no_fire(mode, cfg.eta)
    return (
        earlier_empty ** (i - 1)
        * posterior_given_fire(mode, cfg.eta, 1)
        * pmf(mode, 0) ** (cfg.num_delays - i)
    )


def certification(cfg: MultiplexConfig, i: int) -> float:
    """Probability that exactly one pair existed, given that delay ``i`` fired the trigger."""
    i = _check_delay(cfg, i)
    if cfg.kind is not Kind.BOSE_EINSTEIN:
        return certification_compositional(cfg, i)
    if cfg.eta == 0.0 or cfg.nbar == 0.0:
        raise UndefinedConditioningError("trigger can never fire; certification is undefined")
    nd, nbar = cfg.num_delays, cfg.nbar
    # ratios keep every factor <= 1 and avoid N_D**N_D overflow
    return ((nd + cfg.eta * nbar) / (nbar + nd)) ** i * (nd / (nbar + nd)) ** (nd + 1 - i)


def delay_fire_prob(cfg: MultiplexConfig, i: int) -> float:
    """Probability that delay ``i`` is the one that fires the trigger."""
    i = _check_delay(cfg, i)
    m, eta = cfg.mode_mean, cfg.eta
    if cfg.kind is Kind.BOSE_EINSTEIN:
        x = eta * cfg.nbar
        return (x / (x + cfg.num_delays)) * (cfg.num_delays / (x + cfg.num_delays)) ** (i - 1)
    return math.exp(-eta * m * (i - 1)) * -math.expm1(-eta * m)


def no_trigger_prob(cfg: MultiplexConfig) -> float:
    if cfg.kind is Kind.BOSE_EINSTEIN:
        nd = cfg.num_delays
        return (nd / (cfg.eta * cfg.nbar + nd)) ** nd
    return math.exp(-cfg.eta * cfg.nbar)


def heralded_product(cfg: MultiplexConfig) -> float:
    """``certification(i) * delay_fire_prob(i)``, which does not depend on ``i``.

    Bose-Einstein: ``eta nbar N_D**N_D / (nbar + N_D)**(N_D + 1)``.
    """
    nd, nbar = cfg.num_delays, cfg.nbar
    if cfg.kind is Kind.BOSE_EINSTEIN:
        return cfg.eta * nbar / nd * (nd / (nbar + nd)) ** (nd + 1)
    return cfg.eta * cfg.mode_mean * math.exp(-nbar)


def single_photon_prob(cfg: MultiplexConfig) -> float:
    """Unconditional probability that the pulse contains exactly one pair (heralded or not)."""
    nd, nbar = cfg.num_delays, cfg.nbar
    if cfg.kind is Kind.BOSE_EINSTEIN:
        return nbar * (nd / (nbar + nd)) ** (1 + nd)
    return nbar * math.exp(-nbar)


def _heralded_sum(cfg: MultiplexConfig) -> float:
    if cfg.eta == 0.0 or cfg.nbar == 0.0:
        return 0.0
    return math.fsum(
        certification_compositional(cfg, i) * delay_fire_prob(cfg, i)
        for i in range(1, cfg.num_delays + 1)
    )


def single_photon_prob_compositional(cfg: MultiplexConfig) -> float:
    """Sum over trigger outcomes of certification x occurrence, plus the unheralded single pair."""
    mode, nd = cfg.mode, cfg.num_delays
    unheralded = nd * pmf(mode, 0) ** (nd - 1) * (1.0 - cfg.eta) * pmf(mode, 1)
    return _heralded_sum(cfg) + unheralded


def _fire_any(cfg: MultiplexConfig) -> float:
    if cfg.eta == 0.0 or cfg.nbar == 0.0:
        raise UndefinedConditioningError(
            f"trigger can never fire (eta={cfg.eta}, nbar={cfg.nbar}); conditioning on it is undefined"
        )
    if cfg.kind is Kind.BOSE_EINSTEIN:
        nd = cfg.num_delays
        return -math.expm1(nd * -math.log1p(cfg.eta * cfg.nbar / nd))
    return -math.expm1(-cfg.eta * cfg.nbar)


def single_photon_prob_given_trigger(cfg: MultiplexConfig) -> float:
    """Probability of exactly one pair given that some delay fired the trigger."""
    denom = _fire_any(cfg)
    nd, nbar = cfg.num_delays, cfg.nbar
    if cfg.kind is Kind.BOSE_EINSTEIN:
        return nbar * cfg.eta * (nd / (nbar + nd)) ** (1 + nd) / denom
    return nbar * cfg.eta * math.exp(-nbar) / denom


def single_photon_prob_given_trigger_compositional(cfg: MultiplexConfig) -> float:
    denom = _fire_any(cfg)
    return _heralded_sum(cfg) / denom


def poisson_limit(nbar: float) -> float:
    """Single-photon probability of a Poisson (faint laser) source."""
    nbar = check_mean(nbar, "nbar")
    return nbar * math.exp(-nbar)


def poisson_limit_given_trigger(nbar: float, eta: float) -> float:
    return single_photon_prob_given_trigger(MultiplexConfig(nbar, eta, 1, Kind.POISSON))


@dataclass(frozen=True)
class DelayReport:
    delay: int
    certification: float
    occurrence: float


@dataclass(frozen=True)
class CertificationReport:
    config: MultiplexConfig
    per_delay: tuple[DelayReport, ...]
    p_no_trigger: float
    p_single: float
    p_single_given_trigger: float
    poisson_limit_p_single: float
    poisson_limit_given_trigger: float


def certify(cfg: MultiplexConfig) -> CertificationReport:
    """All per-delay and aggregate quantities for one configuration.

    Requires ``eta > 0`` and ``nbar > 0``.
    """
    per_delay = tuple(
        DelayReport(i, certification(cfg, i), delay_fire_prob(cfg, i))
        for i in range(1, cfg.num_delays + 1)
    )
    return CertificationReport(
        config=cfg,
        per_delay=per_delay,
        p_no_trigger=no_trigger_prob(cfg),
        p_single=single_photon_prob(cfg),
        p_single_given_trigger=single_photon_prob_given_trigger(cfg),
        poisson_limit_p_single=poisson_limit(cfg.nbar),
        poisson_limit_given_trigger=poisson_limit_given_trigger(cfg.nbar, cfg.eta),
    )


def optimal_mean(eta: float, num_delays: int, kind: Kind | str = Kind.BOSE_EINSTEIN,
                 upper: float = 16.0, xatol: float = 1e-10) -> float:
    """System mean ``nbar`` in (0, upper] that maximizes :func:`single_photon_prob`.

    A coarse grid first checks that the objective rises then falls (one
    interior maximum); a bounded Brent search then refines inside the grid
    bracket around the best coarse point.
    """
    base = MultiplexConfig(1.0, eta, num_delays, kind)

    def objective(nbar: float) -> float:
        return single_photon_prob(base.replace(nbar=nbar))

    grid = np.linspace(1e-6, upper, 321)
    values = np.array([objective(x) for x in grid])
    k = int(np.argmax(values))
    diffs = np.diff(values)
    if np.any(diffs[:k] <= 0) or np.any(diffs[k:] >= 0):
        raise RuntimeError("single-photon probability is not unimodal on the search interval")
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(lambda x: -objective(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": xatol})
    return float(res.x)


def source_comparison(nbar: float, eta: float, num_delays: int) -> dict[str, float]:
    """Single-photon fractions of the four pulsed sources, keyed by source name."""
    return {
        "faint_laser": poisson_limit(nbar),
        "conventional_unheralded": single_photon_prob(MultiplexConfig(nbar, eta, 1)),
        "conventional_heralded": single_photon_prob_given_trigger(MultiplexConfig(nbar, eta, 1)),
        "multiplexed_heralded": single_photon_prob_given_trigger(MultiplexConfig(nbar, eta, num_delays)),
    }


@dataclass(frozen=True)
class LossModel:
    """Ordered optical surfaces seen by the output photon, as transmittances."""

    surfaces: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        surfaces = tuple(float(t) for t in self.surfaces)
        for t in surfaces:
            check_efficiency(t, "surface transmittance")
        object.__setattr__(self, "surfaces", surfaces)

    @classmethod
    def uniform(cls, count: int, transmittance: float) -> "LossModel":
        return cls((transmittance,) * count)

    def __add__(self, other: "LossModel") -> "LossModel":
        return LossModel(self.surfaces + other.surfaces)

    @property
    def transmittance(self) -> float:
        return math.prod(self.surfaces)


def loss_budget(model: LossModel | Sequence[float]) -> tuple[float, float]:
    """(net transmittance, net loss) of a chain of surfaces."""
    if not isinstance(model, LossModel):
        model = LossModel(tuple(model))
    t = model.transmittance
    return t, 1.0 - t


def reference_loss_model(num_delays: int = 8, per_surface: float = 0.995) -> tuple[LossModel, LossModel]:
    """Surfaces of the discrete-component array: (switch tree, crystal plus delay).

    The switch tree has ceil(log2 N_D) binary stages of 4 AR surfaces each; the
    crystal contributes one surface and a delay two. For N_D = 8 that is 12 + 3 = 15.
    """
    stages = max(0, math.ceil(math.log2(num_delays))) if num_delays > 1 else 0
    return LossModel.uniform(4 * stages, per_surface), LossModel.uniform(3, per_surface)
