"""Photon-counting Monte Carlo for the tunable-beamsplitter experiment.

Source model: attenuated laser pulses carry Poisson-distributed photon
numbers with mean ``mu`` per detection gate.  Detection efficiency and the
measurement-system loss thin the beam independently, so each detector's click
probability per pulse is

    c_j = 1 - exp(-mu_eff * p_j_raw) + dark_prob,   mu_eff = mu * eta * 10^(-L/10),

with ``p_j_raw`` the unconditional optics probability (half amplitude when a
path is blocked).  Counts over a point are binomial in the pulse number.  The
time-multiplexed single-detector readout assigns D1 to the early gate and D2
to the late gate; with afterpulsing off this is a pure relabeling and does
not change any statistic, so it is modeled as such.

Determinism contract: every grid cell draws from its own substream derived as
a pure function of (seed, block index, phi_s index, phi_x index).  Identical
plans produce bit-identical counts for any worker count and any evaluation
order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .estimators import FringeScan
from .optics import BLOCKS, CircuitConfig, raw_detection_probs

IDEAL_MODE = "ideal"
MONTECARLO_MODE = "montecarlo"
MODES = (IDEAL_MODE, MONTECARLO_MODE)

# Fitted maximum fringe contrast of the physical device; the pure-state model
# uses 1.0.  Plans may override either.
DEFAULT_COHERENCE_MC = 0.967
DEFAULT_COHERENCE_IDEAL = 1.0

DEFAULT_PULSES_PER_POINT = 120_000  # 0.8 s integration at the default repetition rate


@dataclass(frozen=True)
class SourceConfig:
    """Pulsed weak-coherent source: mean photons per gate, rep rate, pulse width."""

    mu: float = 0.2
    rep_rate: float = 150e3
    pulse_width: float = 40e-9

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ContractViolation(f"mu must be > 0, got {self.mu}")
        if self.rep_rate <= 0 or self.pulse_width <= 0:
            raise ContractViolation("rep_rate and pulse_width must be positive")


@dataclass(frozen=True)
class DetectorConfig:
    """Gated single-photon detection: efficiency, system loss, gate, dark counts."""

    efficiency: float = 0.10
    system_loss_db: float = 12.0
    gate_width: float = 3e-9
    dark_prob: float = 0.0
    multiplex_delay: float = 1.25e-6

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ContractViolation(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if self.system_loss_db < 0:
            raise ContractViolation("system_loss_db must be nonnegative")
        if not 0.0 <= self.dark_prob <= 1.0:
            raise ContractViolation("dark_prob must lie in [0, 1]")
        if self.gate_width <= 0 or self.multiplex_delay <= 0:
            raise ContractViolation("gate_width and multiplex_delay must be positive")


@dataclass(frozen=True)
class RunPlan:
    """A full sweep: phi_s values, phi_x grid, block settings, statistics, seed.

    ``coherence=None`` resolves to the mode default (1.0 ideal, 0.967 Monte
    Carlo).  ``phi_x_grid`` is (start, stop, steps) with a half-open range.
    """

    phi_s_values: tuple
    phi_x_grid: tuple = (0.0, 2.0 * math.pi, 32)
    blocks: tuple = BLOCKS
    pulses_per_point: int = DEFAULT_PULSES_PER_POINT
    coherence: float | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phi_s_values", tuple(float(p) for p in self.phi_s_values))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        start, stop, steps = self.phi_x_grid
        object.__setattr__(self, "phi_x_grid", (float(start), float(stop), int(steps)))
        if not self.phi_s_values:
            raise ContractViolation("phi_s_values must be non-empty")
        if int(steps) < 2:
            raise ContractViolation("phi_x grid needs at least 2 steps")
        if not float(stop) > float(start):
            raise ContractViolation("phi_x grid stop must exceed start")
        if self.pulses_per_point < 0:
            raise ContractViolation("pulses_per_point must be nonnegative")
        for b in self.blocks:
            if b not in BLOCKS:
                raise ContractViolation(f"unknown block setting {b!r}")
        if len(set(self.blocks)) != len(self.blocks) or not self.blocks:
            raise ContractViolation("blocks must be a non-empty set of distinct settings")
        if self.coherence is not None and not 0.0 <= self.coherence <= 1.0:
            raise ContractViolation("coherence must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ContractViolation("seed must be a 64-bit unsigned integer")

    def phi_x_values(self) -> np.ndarray:
        start, stop, steps = self.phi_x_grid
        return start + (stop - start) * np.arange(steps) / steps

    def resolved_coherence(self, mode: str) -> float:
        if self.coherence is not None:
            return self.coherence
        return DEFAULT_COHERENCE_IDEAL if mode == IDEAL_MODE else DEFAULT_COHERENCE_MC


def effective_mean_photons(source: SourceConfig, detector: DetectorConfig) -> float:
    """Detected mean photons per pulse after efficiency and system loss."""
    return source.mu * detector.efficiency * 10.0 ** (-detector.system_loss_db / 10.0)


def click_probabilities(cfg: CircuitConfig, source: SourceConfig, detector: DetectorConfig):
    """Per-pulse click probability at each detector (dark counts included, capped at 1)."""
    mu_eff = effective_mean_photons(source, detector)
    raw = raw_detection_probs(cfg)
    c1 = min(1.0, -math.expm1(-mu_eff * raw.p1) + detector.dark_prob)
    c2 = min(1.0, -math.expm1(-mu_eff * raw.p2) + detector.dark_prob)
    return c1, c2


def expected_counts(cfg: CircuitConfig, source: SourceConfig, detector: DetectorConfig, pulses: int):
    """Expected click counts over a point; the noiseless limit of simulate_point."""
    c1, c2 = click_probabilities(cfg, source, detector)
    return pulses * c1, pulses * c2


def simulate_point(
    cfg: CircuitConfig,
    source: SourceConfig,
    detector: DetectorConfig,
    pulses: int,
    rng: np.random.Generator,
):
    """Sampled (n1, n2) click counts for one grid cell.

    Binomial sampling over pulses is exactly equivalent to drawing Poisson
    photon numbers at the source and thinning through loss, efficiency and
    the Born splitting, because a thinned Poisson beam yields independent
    per-detector click probabilities 1 - exp(-mu_eff p_j).
    """
    if pulses < 0:
        raise ContractViolation("pulses must be nonnegative")
    if pulses == 0:
        return 0, 0
    c1, c2 = click_probabilities(cfg, source, detector)
    return int(rng.binomial(pulses, c1)), int(rng.binomial(pulses, c2))


def cell_rng(seed: int, block_index: int, phi_s_index: int, phi_x_index: int) -> np.random.Generator:
    """Substream for one grid cell; pure function of (seed, cell indices).

    Uses a SeedSequence spawn key, so substreams are independent and the same
    no matter which worker evaluates the cell.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(block_index, phi_s_index, phi_x_index))
    return np.random.Generator(np.random.PCG64(ss))


def sample_photon_numbers(mu: float, pulses: int, rng: np.random.Generator) -> np.ndarray:
    """Photon number per pulse at the source (before any loss)."""
    if mu <= 0:
        raise ContractViolation("mu must be positive")
    return rng.poisson(mu, size=pulses)


def multi_photon_fraction(mu: float, pulses: int, rng: np.random.Generator) -> float:
    """Sampled fraction of pulses carrying 2+ photons; expectation 1 - e^-mu (1 + mu)."""
    n = sample_photon_numbers(mu, pulses, rng)
    return float(np.count_nonzero(n >= 2)) / pulses


def time_multiplexed_counts(n1: int, n2: int, detector: DetectorConfig) -> dict:
    """Early/late gate assignment of the single-detector readout (pure relabeling)."""
    return {
        "early": {"detector": "D1", "counts": n1, "gate_offset_s": 0.0},
        "late": {"detector": "D2", "counts": n2, "gate_offset_s": detector.multiplex_delay},
    }


def _scan_cells(plan, source, detector, mode, coherence, block, s_idx, phi_s, phi_x):
    n1 = np.empty(phi_x.size, dtype=np.float64)
    n2 = np.empty(phi_x.size, dtype=np.float64)
    b_idx = BLOCKS.index(block)
    for x_idx, phi in enumerate(phi_x):
        cfg = CircuitConfig(float(phi), phi_s, block=block, coherence=coherence)
        if mode == IDEAL_MODE:
            # Noiseless expected probability mass; the click model and its
            # ~mu_eff/2 relative nonlinearity are deliberately bypassed so
            # the ideal route reproduces the closed forms exactly.
            raw = raw_detection_probs(cfg)
            n1[x_idx] = plan.pulses_per_point * raw.p1
            n2[x_idx] = plan.pulses_per_point * raw.p2
        else:
            rng = cell_rng(plan.seed, b_idx, s_idx, x_idx)
            a, b = simulate_point(cfg, source, detector, plan.pulses_per_point, rng)
            n1[x_idx], n2[x_idx] = a, b
    return FringeScan(
        phi_s=phi_s, block=block, phi_x=phi_x.copy(), n1=n1, n2=n2,
        pulses_per_point=plan.pulses_per_point, seed=plan.seed, mode=mode,
    )


def run_sweep(
    plan: RunPlan,
    source: SourceConfig | None = None,
    detector: DetectorConfig | None = None,
    mode: str = MONTECARLO_MODE,
    workers: int = 1,
) -> list:
    """One FringeScan per (phi_s, block) pair, in plan order.

    Deterministic for a fixed plan: cells draw from index-derived substreams,
    so results are identical across runs and across worker counts.
    """
    if mode not in MODES:
        raise ContractViolation(f"mode must be one of {MODES}")
    if workers < 1:
        raise ContractViolation("workers must be >= 1")
    source = source or SourceConfig()
    detector = detector or DetectorConfig()
    coherence = plan.resolved_coherence(mode)
    phi_x = plan.phi_x_values()
    tasks = [
        (block, s_idx, phi_s)
        for s_idx, phi_s in enumerate(plan.phi_s_values)
        for block in plan.blocks
    ]

    def job(task):
        block, s_idx, phi_s = task
        return _scan_cells(plan, source, detector, mode, coherence, block, s_idx, phi_s, phi_x)

    if workers == 1:
        return [job(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, tasks))


@dataclass(frozen=True)
class SwitchTrace:
    """Binned time series from the dynamic wave/particle switching run."""

    t: np.ndarray
    phi_s: np.ndarray
    phi_x: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    pulses_per_bin: int

    def __post_init__(self):
        sizes = {arr.size for arr in (self.t, self.phi_s, self.phi_x, self.n1, self.n2)}
        if len(sizes) != 1:
            raise ContractViolation("all trace arrays must have equal length")


def triangle_wave(t: np.ndarray, period: float, amplitude: float = 2.0 * math.pi) -> np.ndarray:
    """Symmetric triangle 0 -> amplitude -> 0 over one period."""
    frac = np.mod(t / period, 1.0)
    return amplitude * (1.0 - np.abs(2.0 * frac - 1.0))


def run_dynamic_switch(
    duration_s: float,
    toggle_period_s: float,
    triangle_period_s: float,
    source: SourceConfig,
    detector: DetectorConfig,
    rng: np.random.Generator | int,
    coherence: float = 1.0,
    bin_seconds: float = 0.2,
    chunk_pulses: int = 1_000_000,
) -> SwitchTrace:
    """Continuous phi_x triangle sweep while phi_s toggles between 0 and pi/2.

    phi_s starts at 0 (which-path segments with flat, balanced rates) and
    flips every ``toggle_period_s`` to pi/2 (full-contrast fringe segments).
    Clicks are sampled per pulse and binned into windows of ``bin_seconds``.
    """
    if min(duration_s, toggle_period_s, triangle_period_s, bin_seconds) <= 0:
        raise ContractViolation("durations and periods must be positive")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(rng))))
    mu_eff = effective_mean_photons(source, detector)
    n_pulses = int(duration_s * source.rep_rate)
    n_bins = int(math.ceil(duration_s / bin_seconds))
    counts = np.zeros((2, n_bins), dtype=np.int64)

    for start in range(0, n_pulses, chunk_pulses):
        idx = np.arange(start, min(start + chunk_pulses, n_pulses))
        t = (idx + 0.5) / source.rep_rate
        phi_x = triangle_wave(t, triangle_period_s)
        wave_segment = (np.floor(t / toggle_period_s).astype(np.int64) % 2) == 1
        sin_s = np.where(wave_segment, 1.0, 0.0)  # sin(phi_s) for phi_s in {0, pi/2}
        p1 = 0.5 * (1.0 + coherence * np.sin(phi_x) * sin_s)
        c1 = np.minimum(1.0, -np.expm1(-mu_eff * p1) + detector.dark_prob)
        c2 = np.minimum(1.0, -np.expm1(-mu_eff * (1.0 - p1)) + detector.dark_prob)
        click1 = rng.random(idx.size) < c1
        click2 = rng.random(idx.size) < c2
        bins = np.minimum((t / bin_seconds).astype(np.int64), n_bins - 1)
        counts[0] += np.bincount(bins[click1], minlength=n_bins)
        counts[1] += np.bincount(bins[click2], minlength=n_bins)

    t_bin = (np.arange(n_bins) + 0.5) * bin_seconds
    phi_s_bin = np.where((np.floor(t_bin / toggle_period_s).astype(np.int64) % 2) == 1, math.pi / 2.0, 0.0)
    return SwitchTrace(
        t=t_bin,
        phi_s=phi_s_bin,
        phi_x=triangle_wave(t_bin, triangle_period_s),
        n1=counts[0].astype(np.float64),
        n2=counts[1].astype(np.float64),
        pulses_per_bin=int(round(bin_seconds * source.rep_rate)),
    )
