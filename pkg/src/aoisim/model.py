"""Static system description: dimensions, slot costs, channels, arrivals.

A frame holds N transmission slots shared by one base station. The station
caches M sensor messages; refreshing message m over the uplink costs an
integer number of slots set by the sensor's channel, and serving one request
from bucket k costs k downlink slots. Requests arrive to the M x Kbar queues
as independent Poisson counts each frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import yaml

from .util import ConfigError, ceil_snap


def transmission_rate(bandwidth: float, power: float, gain: float,
                      noise: float, slot_duration: float) -> float:
    """Bits deliverable in one slot at the given link parameters."""
    for name, v in (("bandwidth", bandwidth), ("power", power), ("gain", gain),
                    ("noise", noise), ("slot_duration", slot_duration)):
        if v <= 0:
            raise ValueError(f"{name} must be positive")
    return bandwidth * math.log2(1.0 + power * gain / noise) * slot_duration


def uplink_slot_cost(length: float, bandwidth: float, power: float, gain: float,
                     noise: float, slot_duration: float) -> int:
    """Whole slots needed to push a message of `length` bits through the uplink."""
    if length <= 0:
        raise ValueError("length must be positive")
    per_slot = transmission_rate(bandwidth, power, gain, noise, slot_duration)
    return max(1, ceil_snap(length / per_slot))


def downlink_slot_cost(length: float, bandwidth: float, power: float, gain: float,
                       noise: float, slot_duration: float) -> int:
    """Whole slots needed to deliver a response of `length` bits downlink."""
    return uplink_slot_cost(length, bandwidth, power, gain, noise, slot_duration)


@dataclass
class SlotCostVector:
    """Current uplink slot costs, one per message, plus the running worst case.

    khat tracks the largest cost the process can emit, so reserving khat slots
    always leaves room for any single refresh.
    """
    kappas: Sequence[int]
    khat: int

    def __getitem__(self, m: int) -> int:
        return self.kappas[m]

    def __len__(self) -> int:
        return len(self.kappas)


@dataclass
class MarkovChannel:
    """Finite-state gain chain, one independent copy per sensor node.

    gains[i] is the channel gain in state i; transition is row stochastic.
    """
    gains: list
    transition: list
    states: list

    def __post_init__(self):
        S = len(self.gains)
        if S == 0:
            raise ConfigError("channel_states must be nonempty")
        if any(g <= 0 for g in self.gains):
            raise ConfigError("channel gains must be positive")
        if len(self.transition) != S or any(len(r) != S for r in self.transition):
            raise ConfigError("channel_transition must be square over the gain states")
        for i, row in enumerate(self.transition):
            if any(p < 0 for p in row):
                raise ConfigError(f"channel_transition row {i} has a negative entry")
            if abs(sum(row) - 1.0) > 1e-12:
                raise ConfigError(f"channel_transition row {i} does not sum to 1")
        if any(not (0 <= s < S) for s in self.states):
            raise ConfigError("channel state index out of range")
        self._cum = [np.cumsum(row) for row in self.transition]

    def current_gains(self) -> list:
        return [self.gains[s] for s in self.states]


def step_channel(channel: MarkovChannel, rng: np.random.Generator) -> list:
    """Advance every node's chain one frame; returns the new state indices."""
    u = rng.random(len(channel.states))
    new = []
    for i, s in enumerate(channel.states):
        new.append(int(np.searchsorted(channel._cum[s], u[i], side="right")))
    channel.states = new
    return new


class DirectCostProcess:
    """I.i.d. uplink slot costs drawn from a finite pmf of (cost, probability) pairs."""

    def __init__(self, M: int, pmf, N: int):
        if not pmf:
            raise ConfigError("uplink_kappa_pmf must be nonempty")
        vals, probs = [], []
        for pair in pmf:
            v, p = pair
            if int(v) != v or v < 1:
                raise ConfigError(f"uplink cost {v!r} is not a positive integer")
            if p < 0:
                raise ConfigError("uplink cost probabilities must be nonnegative")
            vals.append(int(v))
            probs.append(float(p))
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ConfigError("uplink_kappa_pmf probabilities must sum to 1")
        self.M = M
        self.values = vals
        self.probs = probs
        self._cum = np.cumsum(probs)
        self.khat = max(vals)
        if self.khat > N:
            raise ConfigError(f"largest uplink cost {self.khat} exceeds the frame budget {N}")

    def observe(self, rng: np.random.Generator) -> list:
        idx = np.searchsorted(self._cum, rng.random(self.M), side="right")
        idx[idx >= len(self.values)] = len(self.values) - 1
        return [self.values[i] for i in idx]

    def pregenerate(self, frames: int, rng: np.random.Generator) -> list:
        """Draw `frames` cost vectors at once; same stream order as repeated observe()."""
        idx = np.searchsorted(self._cum, rng.random((frames, self.M)), side="right")
        idx[idx >= len(self.values)] = len(self.values) - 1
        arr = np.asarray(self.values)[idx]
        return arr.tolist()

    def step(self, rng: np.random.Generator) -> None:
        pass


class PhysicalCostProcess:
    """Uplink slot costs induced by per-node Markov gain chains and link parameters."""

    def __init__(self, M: int, lengths, bandwidth, power, noise, slot_duration,
                 channel: MarkovChannel, N: int):
        if len(channel.states) != M:
            raise ConfigError("channel needs one state per message")
        self.M = M
        self.channel = channel
        self.cost_table = []
        for m in range(M):
            self.cost_table.append([
                uplink_slot_cost(lengths[m], bandwidth, power, g, noise, slot_duration)
                for g in channel.gains])
        self.khat = max(max(row) for row in self.cost_table)
        if self.khat > N:
            raise ConfigError(f"largest uplink cost {self.khat} exceeds the frame budget {N}")

    def observe(self, rng: np.random.Generator) -> list:
        return [self.cost_table[m][s] for m, s in enumerate(self.channel.states)]

    def step(self, rng: np.random.Generator) -> None:
        step_channel(self.channel, rng)


_CONFIG_KEYS = {
    "M", "N", "Kbar", "lambda", "V", "V0", "policy", "window_thresholds",
    "uplink_mode", "uplink_kappa_pmf", "lengths", "bandwidth", "slot_duration",
    "power_sn", "power_bs", "noise_bs", "noise_mu", "channel_states",
    "channel_transition",
}


class SystemConfig:
    """Everything fixed before the first frame."""

    def __init__(self, M, N, Kbar, lam, V=1.0, V0="auto", policy="dpp",
                 window_thresholds=None, uplink_mode="direct",
                 uplink_kappa_pmf=None, lengths=None, bandwidth=1.0,
                 slot_duration=1.0, power_sn=1.0, power_bs=1.0, noise_bs=1.0,
                 noise_mu=1.0, channel_states=None, channel_transition=None):
        self.M = int(M)
        self.N = int(N)
        self.Kbar = int(Kbar)
        self.lam = np.asarray(lam, dtype=float)
        self.V = float(V)
        self.V0 = V0
        self.policy = policy
        self.window_thresholds = window_thresholds
        self.uplink_mode = uplink_mode
        self.uplink_kappa_pmf = uplink_kappa_pmf if uplink_kappa_pmf is not None else [(1, 1.0)]
        self.lengths = lengths
        self.bandwidth = bandwidth
        self.slot_duration = slot_duration
        self.power_sn = power_sn
        self.power_bs = power_bs
        self.noise_bs = noise_bs
        self.noise_mu = noise_mu
        self.channel_states = channel_states
        self.channel_transition = channel_transition
        self.validate()

    def validate(self):
        if self.M < 1:
            raise ConfigError("M must be >= 1")
        if self.Kbar < 1:
            raise ConfigError("Kbar must be >= 1")
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if self.Kbar > self.N:
            raise ConfigError("Kbar cannot exceed N: the largest response must fit in a frame")
        if self.lam.shape != (self.M, self.Kbar):
            raise ConfigError(f"lambda must be an {self.M} x {self.Kbar} matrix")
        if np.any(self.lam < 0):
            raise ConfigError("lambda entries must be nonnegative")
        if self.V < 0:
            raise ConfigError("V must be nonnegative")
        if self.V0 != "auto":
            if not isinstance(self.V0, (int, float)) or self.V0 <= 0:
                raise ConfigError("V0 must be a positive number or 'auto'")
        if self.policy not in ("dpp", "stochastic", "fixed_window"):
            raise ConfigError(f"unknown policy {self.policy!r}")
        if self.uplink_mode not in ("direct", "physical"):
            raise ConfigError(f"unknown uplink_mode {self.uplink_mode!r}")
        if self.window_thresholds is not None:
            if len(self.window_thresholds) != self.M:
                raise ConfigError("window_thresholds needs one entry per message")
            if any(int(w) != w or w < 1 for w in self.window_thresholds):
                raise ConfigError("window thresholds must be integers >= 1")
        if self.uplink_mode == "physical":
            if self.channel_states is None or self.channel_transition is None:
                raise ConfigError("physical uplink_mode requires channel_states and channel_transition")


def make_cost_process(cfg: SystemConfig):
    """Instantiate the uplink cost process the config asks for."""
    if cfg.uplink_mode == "direct":
        return DirectCostProcess(cfg.M, cfg.uplink_kappa_pmf, cfg.N)
    lengths = cfg.lengths if cfg.lengths is not None else [1.0] * cfg.M
    if len(lengths) != cfg.M:
        raise ConfigError("lengths needs one entry per message")
    # every node's chain starts in the first listed gain state
    chan = MarkovChannel(list(cfg.channel_states), [list(r) for r in cfg.channel_transition],
                         [0] * cfg.M)
    return PhysicalCostProcess(cfg.M, lengths, cfg.bandwidth, cfg.power_sn,
                               cfg.noise_bs, cfg.slot_duration, chan, cfg.N)


def current_khat(cfg: SystemConfig) -> int:
    """Largest uplink slot cost the configured process can emit."""
    return make_cost_process(cfg).khat


def sample_arrivals(lam: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One frame of Poisson request counts, shaped like lam."""
    return rng.poisson(lam)


def config_from_dict(d: dict) -> SystemConfig:
    unknown = set(d) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key: {sorted(unknown)[0]!r}")
    for key in ("M", "N", "Kbar", "lambda"):
        if key not in d:
            raise ConfigError(f"missing config key: {key!r}")
    kwargs = {("lam" if k == "lambda" else k): v for k, v in d.items()}
    if "uplink_kappa_pmf" in kwargs:
        pmf = kwargs["uplink_kappa_pmf"]
        if not isinstance(pmf, (list, tuple)):
            raise ConfigError("uplink_kappa_pmf must be a list of [cost, probability] pairs")
        kwargs["uplink_kappa_pmf"] = [tuple(p) for p in pmf]
    return SystemConfig(**kwargs)


def load_config(path: str) -> SystemConfig:
    """Read a YAML config file; unknown keys are rejected by name."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return config_from_dict(raw)
