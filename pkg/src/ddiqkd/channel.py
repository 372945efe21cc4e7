"""Weak-coherent-pulse source and the lossy, misaligned fiber channel.

Phase randomization is not simulated; it is what justifies treating each
pulse as a Poisson mixture of photon-number states, which is all the decoy
analysis needs.  Misalignment acts as an independent per-photon flip to the
orthogonal polarization in the preparation basis, so the flip probability
e_mis is directly the single-photon error contribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoding import Bb84Setting

__all__ = [
    "ChannelParams",
    "SourceParams",
    "poisson_pn",
    "transmittance",
    "sample_pulse",
]


@dataclass(frozen=True)
class ChannelParams:
    """Fiber loss and alignment quality."""

    alpha_db_per_km: float = 0.2
    length_km: float = 0.0
    e_mis: float = 0.015

    def __post_init__(self):
        if self.alpha_db_per_km < 0 or self.length_km < 0:
            raise ValueError("loss coefficient and length must be nonnegative")
        if not 0.0 <= self.e_mis <= 0.5:
            raise ValueError("e_mis must be in [0, 0.5]")


@dataclass(frozen=True)
class SourceParams:
    """Signal intensity; yields are assumed known exactly (infinite decoy)."""

    mu: float
    infinite_decoy: bool = True

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")


def poisson_pn(mu: float, n: int) -> float:
    """Probability that a pulse of mean photon number mu carries n photons."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    if mu <= 0:
        raise ValueError("mu must be positive")
    return math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1))


def transmittance(ch: ChannelParams) -> float:
    """Channel transmittance 10^(-alpha L / 10)."""
    return 10.0 ** (-ch.alpha_db_per_km * ch.length_km / 10.0)


def sample_pulse(
    src: SourceParams,
    setting: Bb84Setting,
    ch: ChannelParams,
    rng: np.random.Generator,
) -> tuple[int, np.ndarray]:
    """Draw one pulse: surviving photon count and per-photon flip flags.

    The emitted photon number is Poisson(mu); each photon survives the
    channel independently with probability transmittance(ch), and each
    survivor independently carries a flip to the state orthogonal to
    setting within its basis, with probability e_mis.
    """
    n = int(rng.poisson(src.mu))
    t = transmittance(ch)
    survived = int(np.count_nonzero(rng.random(n) < t)) if n else 0
    flips = rng.random(survived) < ch.e_mis
    return survived, flips
