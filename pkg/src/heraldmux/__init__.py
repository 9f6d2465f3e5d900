"""Photon statistics of delay-multiplexed heralded downconversion sources.

Closed forms live in :mod:`heraldmux.statistics` and :mod:`heraldmux.model`,
the Monte Carlo oracle in :mod:`heraldmux.simulator`, figure sweeps in
:mod:`heraldmux.sweep` and the command line in :mod:`heraldmux.cli`.
"""
from .errors import DomainError, HeraldMuxError, UndefinedConditioningError, UndefinedPosteriorError
from .model import (
    CertificationReport,
    LossModel,
    MultiplexConfig,
    certification,
    certify,
    delay_fire_prob,
    loss_budget,
    no_trigger_prob,
    optimal_mean,
    single_photon_prob,
    single_photon_prob_given_trigger,
    source_comparison,
)
from .simulator import SimulationEstimate, SimulationSpec, run_delay_multiplexed, run_switched_array
from .statistics import Kind, PhotonNumberDistribution

__version__ = "0.1.0"
