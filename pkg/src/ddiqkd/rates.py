"""Analytic yields, secret key rate, and the distance/intensity sweeps.

The device model is pinned as follows.  With eta = eta_det * transmittance
and flip probability e = e_mis, a photon that survives to the receiver is
routed, for a basis-matched setting pair, onto one detector of the
"agreement" pair if unflipped or of the "error" pair if flipped (half/half
within the pair).  Photons in a multi-photon pulse act independently.  Each
detector dark-fires independently with probability d per gate, and only
events where exactly one detector clicks are kept.

Averaged over the eight basis-matched setting pairs, every detector plays
the agreement role half the time, so all four detectors share the same
per-photon-number yield and error:

    Y_n   = (1-d)^3 [ (a^n + b^n)/2 - (1-eta)^n (1-d) ]
    e_nY_n= (1-d)^3 [ (b^n - (1-eta)^n)/2 + (1-eta)^n d/2 ]

with a = 1 - eta(1+e)/2 (nothing lands on the other three detectors when
this one is in the agreement pair) and b = 1 - eta(2-e)/2 (error-pair
role).  Gains and overall error rates are Poisson mixtures over n.

The per-pulse key contribution of detector i is

    R_i = q { p0 Y_i0 + p1 Y_i1 [1 - h(e_i1)] - Q_i f h(E_i) }

clamped at zero and summed over the four detectors.  A standard
two-detector active-receiver decoy system with the same eta, e and d per
detector serves as the reference curve; its double clicks are assigned a
random bit instead of being discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bsm import DetectorParams
from .channel import ChannelParams, poisson_pn, transmittance

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

MU_SEARCH_RANGE = (0.01, 2.0)
N_MAX = 20  # Poisson tail beyond this is < 6e-15 for mu <= 2

__all__ = [
    "RateParams",
    "YieldTable",
    "KeyRatePoint",
    "KeyRateCurve",
    "SecurityRegime",
    "binary_entropy",
    "yield_table",
    "key_rate",
    "optimize_mu",
    "bb84_reference_rate",
    "optimize_mu_bb84",
    "keyrate_curve",
    "security_regime",
]


@dataclass(frozen=True)
class RateParams:
    """Everything the rate formula needs except distance and intensity."""

    detector: DetectorParams = DetectorParams(eta_det=0.145, p_dark=3.01e-6)
    alpha_db_per_km: float = 0.2
    e_mis: float = 0.015
    q: float = 1.0
    f_ec: float = 1.16

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ValueError("q must be in (0, 1]")
        if self.f_ec < 1.0:
            raise ValueError("f_ec must be >= 1")
        if not 0.0 <= self.e_mis <= 0.5:
            raise ValueError("e_mis must be in [0, 0.5]")

    def channel(self, length_km: float) -> ChannelParams:
        return ChannelParams(self.alpha_db_per_km, length_km, self.e_mis)


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy h(x), with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must be in [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class YieldTable:
    """Per-detector yields/errors plus the gain and QBER as functions of mu.

    All four detectors are statistically identical in the pinned model, so
    the arrays hold four equal entries; they are kept per detector because
    the rate formula and the Monte Carlo tallies are per detector.
    """

    eta: float     # eta_det * channel transmittance
    e_mis: float
    p_dark: float
    n_max: int = N_MAX
    y0: np.ndarray = field(init=False)
    y1: np.ndarray = field(init=False)
    e1: np.ndarray = field(init=False)

    def __post_init__(self):
        d = self.p_dark
        cube = (1.0 - d) ** 3
        y0 = d * cube
        y1 = (self.eta / 4.0 + (1.0 - self.eta) * d) * cube
        e1y1 = (self.eta * self.e_mis / 4.0 + (1.0 - self.eta) * d / 2.0) * cube
        object.__setattr__(self, "y0", np.full(4, y0))
        object.__setattr__(self, "y1", np.full(4, y1))
        object.__setattr__(self, "e1", np.full(4, e1y1 / y1 if y1 > 0 else 0.5))

    def yield_n(self, n: int) -> float:
        """Probability one given detector alone clicks for an n-photon pulse."""
        d, eta, e = self.p_dark, self.eta, self.e_mis
        a = 1.0 - eta * (1.0 + e) / 2.0
        b = 1.0 - eta * (2.0 - e) / 2.0
        v = 1.0 - eta
        return (1.0 - d) ** 3 * ((a**n + b**n) / 2.0 - v**n * (1.0 - d))

    def error_yield_n(self, n: int) -> float:
        """Joint probability of a lone click on one detector and a bit error."""
        d, eta, e = self.p_dark, self.eta, self.e_mis
        b = 1.0 - eta * (2.0 - e) / 2.0
        v = 1.0 - eta
        return (1.0 - d) ** 3 * ((b**n - v**n) / 2.0 + v**n * d / 2.0)

    def gains(self, mu: float) -> np.ndarray:
        """Q_i(mu): Poisson mixture of yield_n, per detector."""
        q = sum(poisson_pn(mu, n) * self.yield_n(n) for n in range(self.n_max + 1))
        return np.full(4, q)

    def qbers(self, mu: float) -> np.ndarray:
        """E_i(mu) = sum_n p_n Y_n e_n / Q_i, per detector."""
        eq = sum(poisson_pn(mu, n) * self.error_yield_n(n) for n in range(self.n_max + 1))
        q = self.gains(mu)[0]
        return np.full(4, eq / q if q > 0 else 0.0)


def yield_table(params: RateParams, length_km: float) -> YieldTable:
    """Analytic yield table at a given channel length."""
    eta = params.detector.eta_det * transmittance(params.channel(length_km))
    return YieldTable(eta=eta, e_mis=params.e_mis, p_dark=params.detector.p_dark)


def key_rate(yields: YieldTable, params: RateParams, mu: float) -> float:
    """Lower bound on secret bits per pulse, summed over detectors.

    Gains and QBERs beyond the single-photon level come from the same
    yield table; vacuum errors are already folded into the error yields.
    """
    p0 = poisson_pn(mu, 0)
    p1 = poisson_pn(mu, 1)
    gains = yields.gains(mu)
    qbers = yields.qbers(mu)
    total = 0.0
    for i in range(4):
        privacy = p0 * yields.y0[i] + p1 * yields.y1[i] * (1.0 - binary_entropy(yields.e1[i]))
        correction = gains[i] * params.f_ec * binary_entropy(qbers[i])
        total += max(params.q * (privacy - correction), 0.0)
    return total


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _optimize(rate_of_mu, tol: float = 1e-4) -> tuple[float, float]:
    """Coarse bracket then golden-section refinement over the mu range."""
    lo, hi = MU_SEARCH_RANGE
    grid = np.linspace(lo, hi, 41)
    vals = [rate_of_mu(m) for m in grid]
    best = int(np.argmax(vals))
    if vals[best] <= 0.0:
        return lo, 0.0
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, len(grid) - 1)]
    return _golden_max(rate_of_mu, a, b, tol)


def optimize_mu(params: RateParams, length_km: float) -> tuple[float, float]:
    """(mu_opt, rate) maximizing the key rate at one distance."""
    yields = yield_table(params, length_km)
    return _optimize(lambda mu: key_rate(yields, params, mu))


def _bb84_yield_pair(n: int, eta: float, e: float, d: float) -> tuple[float, float]:
    """(Y_n, e_n Y_n) for the two-detector active receiver.

    A click is any detector firing; when both fire the bit is assigned at
    random.  Photons register independently with probability eta and land
    on the wrong detector with probability e.
    """
    no_click = (1.0 - eta) ** n * (1.0 - d) ** 2
    y = 1.0 - no_click
    wrong_only = (1.0 - eta * (1.0 - e)) ** n * (1.0 - d) - no_click
    correct_only = (1.0 - eta * e) ** n * (1.0 - d) - no_click
    both = y - wrong_only - correct_only
    return y, wrong_only + 0.5 * both


def bb84_reference_rate(params: RateParams, length_km: float, mu: float) -> float:
    """Asymptotic decoy rate of a standard two-detector active receiver."""
    eta = params.detector.eta_det * transmittance(params.channel(length_km))
    e, d = params.e_mis, params.detector.p_dark
    y0, e0y0 = _bb84_yield_pair(0, eta, e, d)
    y1, e1y1 = _bb84_yield_pair(1, eta, e, d)
    e1 = e1y1 / y1 if y1 > 0 else 0.5
    gain = 0.0
    err_gain = 0.0
    for n in range(N_MAX + 1):
        pn = poisson_pn(mu, n)
        yn, eyn = _bb84_yield_pair(n, eta, e, d)
        gain += pn * yn
        err_gain += pn * eyn
    qber = err_gain / gain if gain > 0 else 0.0
    p0 = poisson_pn(mu, 0)
    p1 = poisson_pn(mu, 1)
    rate = params.q * (
        p0 * y0
        + p1 * y1 * (1.0 - binary_entropy(e1))
        - gain * params.f_ec * binary_entropy(qber)
    )
    return max(rate, 0.0)


def optimize_mu_bb84(params: RateParams, length_km: float) -> tuple[float, float]:
    """(mu_opt, rate) for the two-detector reference at one distance."""
    return _optimize(lambda mu: bb84_reference_rate(params, length_km, mu))


@dataclass(frozen=True)
class KeyRatePoint:
    length_km: float
    mu_opt: float
    rate_proposal: float
    rate_bb84: float


@dataclass(frozen=True)
class KeyRateCurve:
    points: tuple[KeyRatePoint, ...]
    cutoff_proposal_km: float
    cutoff_bb84_km: float

    def summary(self) -> dict:
        return {
            "cutoff_proposal_km": self.cutoff_proposal_km,
            "cutoff_bb84_km": self.cutoff_bb84_km,
        }


def _cutoff(rate_at, lengths: list[float], extend_step: float = 25.0, cap: float = 1000.0) -> float:
    """Largest length with positive optimized rate, bisected to +-0.5 km."""
    positive = [length for length in lengths if rate_at(length) > 0.0]
    if not positive:
        return 0.0
    lo = positive[-1]
    hi = None
    for length in lengths:
        if length > lo and rate_at(length) <= 0.0:
            hi = length
            break
    if hi is None:
        hi = lo + extend_step
        while rate_at(hi) > 0.0 and hi < cap:
            lo = hi
            hi += extend_step
        if hi >= cap:
            return cap
    while hi - lo > 1.0:
        mid = 0.5 * (lo + hi)
        if rate_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def keyrate_curve(params: RateParams, lengths: list[float]) -> KeyRateCurve:
    """Optimized rates for both protocols over a sorted list of distances."""
    if sorted(lengths) != list(lengths):
        raise ValueError("lengths must be sorted ascending")
    points = []
    for length in lengths:
        mu_opt, rate = optimize_mu(params, length)
        _, rate_ref = optimize_mu_bb84(params, length)
        points.append(KeyRatePoint(length, mu_opt, rate, rate_ref))
    cut_prop = _cutoff(lambda L: optimize_mu(params, L)[1], list(lengths))
    cut_ref = _cutoff(lambda L: optimize_mu_bb84(params, L)[1], list(lengths))
    return KeyRateCurve(tuple(points), cut_prop, cut_ref)


class SecurityRegime(Enum):
    PROVEN_LOW_LOSS = "proven_low_loss"
    CONJECTURED_HIGH_LOSS = "conjectured_high_loss"


LOW_LOSS_THRESHOLD = 0.659


def security_regime(single_photon_transmittance: float) -> SecurityRegime:
    """Advisory: general-attack security is established at low loss only.

    The proven regime requires the overall transmittance of single-photon
    pulses to be at least 65.9%; below that, security is conjectured from
    the analysis of a restricted attack class.
    """
    if not 0.0 <= single_photon_transmittance <= 1.0:
        raise ValueError("transmittance must be in [0, 1]")
    if single_photon_transmittance >= LOW_LOSS_THRESHOLD:
        return SecurityRegime.PROVEN_LOW_LOSS
    return SecurityRegime.CONJECTURED_HIGH_LOSS
