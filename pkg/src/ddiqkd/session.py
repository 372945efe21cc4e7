"""End-to-end Monte Carlo of the protocol: settings, channel, measurement,
sifting, and asymptotic key accounting.

Large sessions are sharded; each shard draws from an independent stream
seeded by (seed, shard index) and tallies are merged by summation, so a
report depends only on the configuration and seed.  Error correction and
privacy amplification are accounted analytically (the sifted length is
shrunk by the usual f*h(E) and privacy terms), not executed as codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bsm import BsmOutcome, DetectorParams, detect, ideal_bsm_distribution
from .channel import ChannelParams, SourceParams, poisson_pn, sample_pulse, transmittance
from .encoding import (
    ALICE_SETTINGS,
    Basis,
    Bb84Setting,
    PathSetting,
    apply_lon,
    bb84_state,
    flip_detectors,
)
from .rates import YieldTable, binary_entropy

__all__ = [
    "PulseRecord",
    "SiftedBit",
    "sift",
    "run_pulse",
    "SessionParams",
    "SessionReport",
    "run_session",
    "projected_qber_from_visibility",
]

_PATH_ORDER = (PathSetting.A, PathSetting.C, PathSetting.B0, PathSetting.BPI)


@dataclass(frozen=True)
class PulseRecord:
    alice: Bb84Setting
    bob: PathSetting
    outcome: BsmOutcome


@dataclass(frozen=True)
class SiftedBit:
    alice_bit: int
    bob_bit: int  # after the flip rule
    basis: Basis
    detector: int


def sift(record: PulseRecord) -> SiftedBit | None:
    """Keep basis-matched successful events, applying Bob's bit flips.

    Bob flips his path bit when the clicking detector demands it for the
    announced basis (D3/D4 in the rectilinear basis, D2/D4 in the diagonal
    one); everything else is discarded.
    """
    if not record.outcome.successful:
        return None
    if record.alice.basis is not record.bob.basis:
        return None
    det = record.outcome.detector
    bob_bit = record.bob.bit
    if det in flip_detectors(record.alice.basis):
        bob_bit = 1 - bob_bit
    return SiftedBit(record.alice.bit, bob_bit, record.alice.basis, det)


def run_pulse(
    alice: Bb84Setting,
    bob: PathSetting,
    src: SourceParams,
    ch: ChannelParams,
    det: DetectorParams,
    rng: np.random.Generator,
) -> PulseRecord:
    """Simulate one pulse at fixed settings (narrative/scalar path).

    Each surviving photon is routed independently according to the ideal
    single-photon click distribution of its (possibly flipped) polarization
    and Bob's setting, then thresholded with dark counts.
    """
    survived, flips = sample_pulse(src, alice, ch, rng)
    assignments = []
    for flipped in flips:
        state = alice.flipped() if flipped else alice
        dist = ideal_bsm_distribution(apply_lon(bob, bb84_state(state)))
        assignments.append(1 + int(rng.choice(4, p=dist)))
    pattern = detect(assignments, det, rng)
    return PulseRecord(alice, bob, pattern.outcome())


def projected_qber_from_visibility(visibility: float) -> float:
    """Error rate (1-V)/2 implied by an interference visibility V."""
    if not 0.0 <= visibility <= 1.0:
        raise ValueError("visibility must be in [0, 1]")
    return (1.0 - visibility) / 2.0


@dataclass(frozen=True)
class SessionParams:
    """Configuration of one Monte Carlo session (signal intensity only)."""

    n_pulses: int
    mu: float
    channel: ChannelParams
    detector: DetectorParams
    q: float = 1.0
    f_ec: float = 1.16
    shard_size: int = 1_000_000

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be >= 1")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.shard_size < 1:
            raise ValueError("shard_size must be >= 1")


@dataclass
class SessionReport:
    """Tally sheet of one session plus asymptotic key accounting."""

    params: SessionParams
    seed: int
    matched_pulses: int = 0
    successes: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))
    errors: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))
    vacuum_pulses: int = 0
    vacuum_successes: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))
    single_pulses: int = 0
    single_successes: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))
    single_errors: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))

    @property
    def sifted_length(self) -> int:
        return int(self.successes.sum())

    def gains(self) -> np.ndarray:
        """Q_i estimates: lone-click fraction among basis-matched pulses."""
        if self.matched_pulses == 0:
            return np.zeros(4)
        return self.successes / self.matched_pulses

    def qbers(self) -> np.ndarray:
        """E_i estimates among sifted bits, per detector."""
        out = np.zeros(4)
        nz = self.successes > 0
        out[nz] = self.errors[nz] / self.successes[nz]
        return out

    def vacuum_yields(self) -> np.ndarray:
        if self.vacuum_pulses == 0:
            return np.zeros(4)
        return self.vacuum_successes / self.vacuum_pulses

    def single_yields(self) -> np.ndarray:
        if self.single_pulses == 0:
            return np.zeros(4)
        return self.single_successes / self.single_pulses

    def single_qbers(self) -> np.ndarray:
        out = np.zeros(4)
        nz = self.single_successes > 0
        out[nz] = self.single_errors[nz] / self.single_successes[nz]
        return out

    def _per_detector_rate_terms(self) -> np.ndarray:
        """max{.,0} key terms per detector with q=1, from tallies + exact yields."""
        eta = self.params.detector.eta_det * transmittance(self.params.channel)
        exact = YieldTable(eta=eta, e_mis=self.params.channel.e_mis,
                           p_dark=self.params.detector.p_dark)
        p0 = poisson_pn(self.params.mu, 0)
        p1 = poisson_pn(self.params.mu, 1)
        gains = self.gains()
        qbers = self.qbers()
        terms = np.zeros(4)
        for i in range(4):
            if gains[i] == 0.0:
                continue  # no observed detections, nothing to distill
            privacy = p0 * exact.y0[i] + p1 * exact.y1[i] * (1.0 - binary_entropy(exact.e1[i]))
            correction = gains[i] * self.params.f_ec * binary_entropy(float(qbers[i]))
            terms[i] = max(privacy - correction, 0.0)
        return terms

    @property
    def q_sift_effective(self) -> float:
        return self.matched_pulses / self.params.n_pulses

    @property
    def secret_key_length(self) -> float:
        """Asymptotic secret bits extractable from this session's tallies."""
        return float(self.matched_pulses * self._per_detector_rate_terms().sum())

    @property
    def rate_per_pulse(self) -> float:
        """Secret bits per emitted pulse at the configured protocol efficiency q."""
        return float(self.params.q * self._per_detector_rate_terms().sum())

    def to_dict(self) -> dict:
        ch, det = self.params.channel, self.params.detector
        return {
            "config": {
                "n_pulses": self.params.n_pulses,
                "mu": self.params.mu,
                "alpha_db_per_km": ch.alpha_db_per_km,
                "length_km": ch.length_km,
                "e_mis": ch.e_mis,
                "eta_det": det.eta_det,
                "p_dark_per_detector": det.p_dark,
                "q": self.params.q,
                "f_ec": self.params.f_ec,
                "shard_size": self.params.shard_size,
            },
            "seed": self.seed,
            "matched_pulses": self.matched_pulses,
            "sifted_length": self.sifted_length,
            "per_detector": {
                "successes": self.successes.tolist(),
                "errors": self.errors.tolist(),
                "gains": self.gains().tolist(),
                "qbers": self.qbers().tolist(),
                "vacuum": {
                    "pulses": self.vacuum_pulses,
                    "successes": self.vacuum_successes.tolist(),
                    "yields": self.vacuum_yields().tolist(),
                },
                "single_photon": {
                    "pulses": self.single_pulses,
                    "successes": self.single_successes.tolist(),
                    "errors": self.single_errors.tolist(),
                    "yields": self.single_yields().tolist(),
                    "qbers": self.single_qbers().tolist(),
                },
            },
            "key": {
                "q_config": self.params.q,
                "q_sift_effective": self.q_sift_effective,
                "secret_key_length": self.secret_key_length,
                "rate_per_pulse": self.rate_per_pulse,
            },
        }


def _routing_matrix() -> np.ndarray:
    """Ideal click distributions for all (Alice state, Bob setting) pairs."""
    route = np.zeros((4, 4, 4))
    for s, alice in enumerate(ALICE_SETTINGS):
        for p, bob in enumerate(_PATH_ORDER):
            dist = ideal_bsm_distribution(apply_lon(bob, bb84_state(alice)))
            dist[dist < 1e-12] = 0.0
            route[s, p] = dist / dist.sum()  # exact simplex row for multinomial
    return route


def _run_shard(report: SessionReport, n: int, rng: np.random.Generator, route: np.ndarray):
    params = report.params
    t = transmittance(params.channel)
    e_mis = params.channel.e_mis
    eta_det = params.detector.eta_det
    p_dark = params.detector.p_dark

    alice_basis = rng.integers(0, 2, n)
    alice_bit = rng.integers(0, 2, n)
    alice_state = 2 * alice_basis + alice_bit
    bob_setting = rng.integers(0, 4, n)  # order a, c, b0, bpi
    bob_basis = bob_setting // 2
    bob_bit = bob_setting % 2

    n_sent = rng.poisson(params.mu, n)
    survived = rng.binomial(n_sent, t)
    flipped = rng.binomial(survived, e_mis)
    registered_ok = rng.binomial(survived - flipped, eta_det)
    registered_flip = rng.binomial(flipped, eta_det)

    clicks = np.zeros((n, 4), dtype=bool)

    # route only the pulses with at least one registered photon
    active = np.flatnonzero((registered_ok + registered_flip) > 0)
    if active.size:
        counts = np.zeros((active.size, 4), dtype=np.int64)
        group = (4 * alice_state + bob_setting)[active]
        reg_ok = registered_ok[active]
        reg_flip = registered_flip[active]
        for g in np.unique(group):
            rows = np.flatnonzero(group == g)
            s, p = divmod(int(g), 4)
            counts[rows] += rng.multinomial(reg_ok[rows], route[s, p])
            # a flipped photon behaves as the orthogonal state in the basis
            counts[rows] += rng.multinomial(reg_flip[rows], route[s ^ 1, p])
        clicks[active] = counts > 0

    # dark counts: draw each detector's total, then scatter over pulses
    for col in range(4):
        k = int(rng.binomial(n, p_dark))
        if k:
            clicks[rng.integers(0, n, k), col] = True

    success = clicks.sum(axis=1) == 1
    detector = np.argmax(clicks, axis=1)  # 0-based; valid where success

    matched = alice_basis == bob_basis
    sifted = success & matched
    flip = np.where(
        bob_basis == 0,
        (detector == 2) | (detector == 3),  # rectilinear: D3, D4
        (detector == 1) | (detector == 3),  # diagonal:    D2, D4
    )
    bob_final = bob_bit ^ flip
    error = sifted & (bob_final != alice_bit)

    report.matched_pulses += int(matched.sum())
    report.successes += np.bincount(detector[sifted], minlength=4)
    report.errors += np.bincount(detector[error], minlength=4)

    vac = matched & (n_sent == 0)
    report.vacuum_pulses += int(vac.sum())
    report.vacuum_successes += np.bincount(detector[vac & success], minlength=4)

    single = matched & (n_sent == 1)
    report.single_pulses += int(single.sum())
    report.single_successes += np.bincount(detector[single & success], minlength=4)
    report.single_errors += np.bincount(detector[single & error], minlength=4)


def run_session(params: SessionParams, seed: int) -> SessionReport:
    """Run a full session; deterministic given (params, seed)."""
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    report = SessionReport(params=params, seed=seed)
    route = _routing_matrix()
    remaining = params.n_pulses
    shard = 0
    while remaining > 0:
        n = min(params.shard_size, remaining)
        rng = np.random.default_rng([seed, shard])
        _run_shard(report, n, rng, route)
        remaining -= n
        shard += 1
    return report
