"""Shared helpers: error taxonomy, snap-guarded ceilings, seeded RNG streams."""

from __future__ import annotations

import math

import numpy as np

SNAP_EPS = 1e-9


class ConfigError(ValueError):
    """Configuration is malformed or inconsistent (CLI exit code 2)."""


class InfeasiblePolicyError(ValueError):
    """The requested policy cannot operate under this configuration (CLI exit code 3)."""


class PolicyViolationError(RuntimeError):
    """A policy emitted an allocation that fails feasibility validation (a policy bug)."""


def ceil_snap(x: float, eps: float = SNAP_EPS) -> int:
    """Ceiling that first snaps values within eps of an integer.

    Guards quantities like 1200/400.0000000001 from landing one unit too high
    purely through float rounding noise.
    """
    r = round(x)
    if abs(x - r) <= eps:
        return int(r)
    return int(math.ceil(x))


# Fixed labels keep the per-purpose sample paths decoupled: adding draws to one
# stream never perturbs another stream with the same master seed.
_STREAM_IDS = {"arrivals": 1, "channel": 2, "policy": 3, "lambda": 4, "mc": 5}


def stream(master_seed: int, label: str) -> np.random.Generator:
    """Independent generator for one purpose, derived from the master seed."""
    if master_seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    return np.random.default_rng([master_seed, _STREAM_IDS[label]])


def derived_seed(master_seed: int, *path: int) -> int:
    """Stable sub-seed for a grid point / repetition, usable as a new master seed."""
    ss = np.random.SeedSequence([int(master_seed), *[int(p) for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
