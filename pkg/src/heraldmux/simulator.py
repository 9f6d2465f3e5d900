"""Seeded Monte Carlo simulation of the multiplexed trigger and the switched array.

Random streams
--------------
Trials are cut into fixed-size chunks of ``CHUNK_TRIALS`` pulses. Chunk ``c``
of a run with seed ``s`` draws from
``np.random.Generator(np.random.PCG64(np.random.SeedSequence(s, spawn_key=(c,))))``,
so results depend only on ``(seed, trials)`` and not on how many workers ran
the chunks or in which order they finished. Each chunk returns integer
counts; merging is plain addition.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .model import MultiplexConfig
from .statistics import Kind, check_efficiency, check_mean

__all__ = [
    "CHUNK_TRIALS",
    "Mode",
    "SimulationSpec",
    "SimulationEstimate",
    "DelayCounts",
    "ArrayCounts",
    "DelayResult",
    "ArrayResult",
    "chunk_generator",
    "sample_mode_count",
    "DelayTrials",
    "simulate_delay_trials",
    "run_delay_multiplexed",
    "run_switched_array",
    "run",
]

CHUNK_TRIALS = 1 << 17
DEFAULT_TRIALS = 1_000_000


class Mode(str, enum.Enum):
    DELAY_MULTIPLEXED = "delay"
    SWITCHED_ARRAY = "array"


@dataclass(frozen=True)
class SimulationSpec:
    config: MultiplexConfig
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    mode: Mode = Mode.DELAY_MULTIPLEXED
    switch_transmittance: float = 1.0
    output_transmittance: float = 1.0

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "mode", Mode(self.mode))
        check_efficiency(self.switch_transmittance, "switch_transmittance")
        check_efficiency(self.output_transmittance, "output_transmittance")


@dataclass(frozen=True)
class SimulationEstimate:
    """Count ratio with its binomial standard error.

    ``estimate`` is NaN when the denominator is zero (the conditioning event never occurred).
    """

    name: str
    numerator: int
    denominator: int
    delay: int = 0

    @property
    def defined(self) -> bool:
        return self.denominator > 0

    @property
    def estimate(self) -> float:
        return self.numerator / self.denominator if self.denominator else math.nan

    @property
    def standard_error(self) -> float:
        if not self.denominator:
            return math.nan
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.denominator)

    def z_score(self, expected: float) -> float:
        """Deviation from ``expected`` in standard errors (0 when both coincide exactly)."""
        diff = self.estimate - expected
        se = self.standard_error
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return abs(diff) / se


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def sample_mode_count(kind: Kind | str, m: float, rng: np.random.Generator, size=None):
    """Photon counts of one mode with mean ``m``.

    Bose-Einstein counts are geometric: failures before the first success with
    success probability ``1 / (1 + m)``.
    """
    kind = Kind.parse(kind)
    m = check_mean(m)
    if kind is Kind.BOSE_EINSTEIN:
        # numpy's geometric counts trials (support >= 1)
        return rng.geometric(1.0 / (1.0 + m), size=size) - 1
    return rng.poisson(m, size=size)


def _detect(counts: np.ndarray, eta: float, rng: np.random.Generator) -> np.ndarray:
    if eta == 1.0:
        return counts.copy()
    if eta == 0.0:
        return np.zeros_like(counts)
    return rng.binomial(counts, eta)


def _first_fired(detected: np.ndarray) -> np.ndarray:
    """1-based index of the first mode with a detected photon, 0 if none (dead time)."""
    hit = detected > 0
    first = np.argmax(hit, axis=1) + 1
    first[~hit.any(axis=1)] = 0
    return first


class DelayTrials(NamedTuple):
    event: np.ndarray     # (n,) delay index that fired, 0 = none
    total: np.ndarray     # (n,) photons summed over all modes
    counts: np.ndarray    # (n, N_D) photons per mode
    detected: np.ndarray  # (n, N_D) photons that would click the trigger


def simulate_delay_trials(cfg: MultiplexConfig, n: int, rng: np.random.Generator) -> DelayTrials:
    counts = sample_mode_count(cfg.kind, cfg.mode_mean, rng, size=(n, cfg.num_delays))
    detected = _detect(counts, cfg.eta, rng)
    return DelayTrials(_first_fired(detected), counts.sum(axis=1), counts, detected)


@dataclass
class DelayCounts:
    """Additive tallies of a delay-multiplexed run. Index 0 of each array is 'no trigger'."""

    num_delays: int
    trials: int = 0
    events: np.ndarray = None
    single_by_event: np.ndarray = None

    def __post_init__(self):
        size = self.num_delays + 1
        if self.events is None:
            self.events = np.zeros(size, dtype=np.int64)
        if self.single_by_event is None:
            self.single_by_event = np.zeros(size, dtype=np.int64)

    def __add__(self, other: "DelayCounts") -> "DelayCounts":
        if other.num_delays != self.num_delays:
            raise ValueError("cannot merge counts of different N_D")
        return DelayCounts(self.num_delays, self.trials + other.trials,
                           self.events + other.events, self.single_by_event + other.single_by_event)

    def estimates(self) -> list[SimulationEstimate]:
        nd, ev, one = self.num_delays, self.events, self.single_by_event
        fired = int(ev[1:].sum())
        out = [SimulationEstimate("certification", int(one[i]), int(ev[i]), i) for i in range(1, nd + 1)]
        out += [SimulationEstimate("delay_fire_prob", int(ev[i]), self.trials, i) for i in range(1, nd + 1)]
        out += [
            SimulationEstimate("no_trigger_prob", int(ev[0]), self.trials, 0),
            SimulationEstimate("single_photon_prob", int(one.sum()), self.trials),
            SimulationEstimate("single_photon_prob_given_trigger", int(one[1:].sum()), fired),
        ]
        return out


@dataclass
class ArrayCounts:
    """Additive tallies of a switched-array run."""

    num_delays: int
    trials: int = 0
    heralded: int = 0
    # selected channel held exactly one pair
    heralded_single_pair: int = 0
    emitted_from_single_pair: int = 0
    emitted_hist: dict[int, int] = field(default_factory=dict)
    emitted_hist_heralded: dict[int, int] = field(default_factory=dict)

    def __add__(self, other: "ArrayCounts") -> "ArrayCounts":
        def merge(a, b):
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) + v
            return dict(sorted(out.items()))

        return ArrayCounts(
            self.num_delays,
            self.trials + other.trials,
            self.heralded + other.heralded,
            self.heralded_single_pair + other.heralded_single_pair,
            self.emitted_from_single_pair + other.emitted_from_single_pair,
            merge(self.emitted_hist, other.emitted_hist),
            merge(self.emitted_hist_heralded, other.emitted_hist_heralded),
        )

    def estimates(self) -> list[SimulationEstimate]:
        h, hh = self.emitted_hist, self.emitted_hist_heralded
        many = sum(v for k, v in h.items() if k > 1)
        return [
            SimulationEstimate("p_emit_one", h.get(1, 0), self.trials),
            SimulationEstimate("p_emit_many", many, self.trials),
            SimulationEstimate("p_herald", self.heralded, self.trials),
            SimulationEstimate("p_emit_one_given_herald", hh.get(1, 0), self.heralded),
            SimulationEstimate("p_emit_any_given_herald", self.heralded - hh.get(0, 0), self.heralded),
            SimulationEstimate("p_emit_given_single_pair_herald", self.emitted_from_single_pair,
                               self.heralded_single_pair),
        ]


@dataclass(frozen=True)
class DelayResult:
    spec: SimulationSpec
    counts: DelayCounts
    estimates: list[SimulationEstimate]

    def get(self, name: str, delay: int = 0) -> SimulationEstimate:
        for e in self.estimates:
            if e.name == name and e.delay == delay:
                return e
        raise KeyError((name, delay))


@dataclass(frozen=True)
class ArrayResult:
    spec: SimulationSpec
    counts: ArrayCounts
    estimates: list[SimulationEstimate]

    @property
    def histogram(self) -> dict[int, int]:
        return self.counts.emitted_hist

    def get(self, name: str) -> SimulationEstimate:
        for e in self.estimates:
            if e.name == name:
                return e
        raise KeyError(name)


def _chunks(trials: int):
    full, rest = divmod(trials, CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _delay_chunk(cfg: MultiplexConfig, seed: int, chunk: int, n: int) -> DelayCounts:
    rng = chunk_generator(seed, chunk)
    event, total, _, _ = simulate_delay_trials(cfg, n, rng)
    size = cfg.num_delays + 1
    return DelayCounts(
        cfg.num_delays,
        n,
        np.bincount(event, minlength=size).astype(np.int64),
        np.bincount(event[total == 1], minlength=size).astype(np.int64),
    )


def _array_chunk(spec: SimulationSpec, chunk: int, n: int) -> ArrayCounts:
    cfg = spec.config
    rng = chunk_generator(spec.seed, chunk)
    pairs = sample_mode_count(cfg.kind, cfg.mode_mean, rng, size=(n, cfg.num_delays))
    heralds = _detect(pairs, cfg.eta, rng) > 0
    any_herald = heralds.any(axis=1)
    # lowest-index heralded channel is routed to the output
    selected = np.where(any_herald, pairs[np.arange(n), np.argmax(heralds, axis=1)], 0)
    throughput = spec.switch_transmittance * spec.output_transmittance
    emitted = rng.binomial(selected, throughput)
    single = any_herald & (selected == 1)

    def hist(values):
        ks, vs = np.unique(values, return_counts=True)
        return {int(k): int(v) for k, v in zip(ks, vs)}

    return ArrayCounts(
        cfg.num_delays,
        n,
        int(any_herald.sum()),
        int(single.sum()),
        int(emitted[single].sum()),
        hist(emitted),
        hist(emitted[any_herald]),
    )


def _map_chunks(fn, chunks, workers: int | None):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: fn(*c), chunks))
    else:
        parts = [fn(*c) for c in chunks]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


def run_delay_multiplexed(spec: SimulationSpec, workers: int | None = None) -> DelayResult:
    if spec.mode is not Mode.DELAY_MULTIPLEXED:
        raise DomainError("run_delay_multiplexed needs mode=delay")
    cfg = spec.config
    counts = _map_chunks(lambda c, n: _delay_chunk(cfg, spec.seed, c, n), _chunks(spec.trials), workers)
    return DelayResult(spec, counts, counts.estimates())


def run_switched_array(spec: SimulationSpec, workers: int | None = None) -> ArrayResult:
    if spec.mode is not Mode.SWITCHED_ARRAY:
        raise DomainError("run_switched_array needs mode=array")
    counts = _map_chunks(lambda c, n: _array_chunk(spec, c, n), _chunks(spec.trials), workers)
    return ArrayResult(spec, counts, counts.estimates())


def run(spec: SimulationSpec, workers: int | None = None):
    if spec.mode is Mode.SWITCHED_ARRAY:
        return run_switched_array(spec, workers)
    return run_delay_multiplexed(spec, workers)
