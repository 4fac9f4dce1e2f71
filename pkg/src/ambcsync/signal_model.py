"""Stochastic primitives: ambient source samples, noise, and block-fading channels.

The ambient RF source and thermal noise are i.i.d. circularly-symmetric
complex Gaussian processes.  A coherence block is described by three fading
coefficients (direct link h, source-to-device zeta, device-to-receiver g);
the backscatter "on" state sees the composite coefficient mu = h + zeta*g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoisePowers:
    """Ambient source power and receiver noise power (linear scale)."""

    sigma_s_sq: float = 1.0
    sigma_w_sq: float = 1.0

    def __post_init__(self):
        if self.sigma_s_sq < 0:
            raise ValueError(f"source power must be >= 0, got {self.sigma_s_sq}")
        if self.sigma_w_sq < 0:
            raise ValueError(f"noise power must be >= 0, got {self.sigma_w_sq}")

    @classmethod
    def from_snr_db(cls, snr_db: float, sigma_s_sq: float = 1.0) -> "NoisePowers":
        """Hold the source power fixed and set the noise floor from an SNR in dB."""
        return cls(sigma_s_sq=sigma_s_sq, sigma_w_sq=sigma_s_sq * 10.0 ** (-snr_db / 10.0))

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.sigma_s_sq / self.sigma_w_sq)


@dataclass(frozen=True)
class ChannelState:
    """One coherence block's fading coefficients and derived symbol powers.

    ``mu = h + zeta * g`` is the composite coefficient seen while the
    backscatter device reflects; ``p0``/``p1`` are the received per-sample
    powers under the "absorb" and "reflect" hypotheses.
    """

    h: complex
    zeta: complex
    g: complex
    mu: complex
    p0: float
    p1: float

    @classmethod
    def from_coefficients(
        cls, h: complex, zeta: complex, g: complex, noise: NoisePowers
    ) -> "ChannelState":
        mu = h + zeta * g
        p0 = abs(h) ** 2 * noise.sigma_s_sq + noise.sigma_w_sq
        p1 = abs(mu) ** 2 * noise.sigma_s_sq + noise.sigma_w_sq
        return cls(h=h, zeta=zeta, g=g, mu=mu, p0=p0, p1=p1)


def draw_channel(rng: np.random.Generator, noise: NoisePowers) -> ChannelState:
    """Draw one coherence block: h, zeta, g i.i.d. unit-variance complex Gaussian.

    Args:
        rng: seeded generator; six normal deviates are consumed.
        noise: powers used to populate the derived p0/p1 fields.
    """
    z = rng.standard_normal(6) * np.sqrt(0.5)
    h = complex(z[0], z[1])
    zeta = complex(z[2], z[3])
    g = complex(z[4], z[5])
    return ChannelState.from_coefficients(h, zeta, g, noise)


def gen_cgn_block(count: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Generate ``count`` i.i.d. circularly-symmetric complex Gaussian samples.

    Per-sample E|x|^2 equals ``variance``; real and imaginary parts are
    independent with variance/2 each.

    Returns:
        complex128 array of shape (count,).
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    # one draw of interleaved (re, im) pairs, reinterpreted as complex
    z = rng.standard_normal(2 * count).view(np.complex128)
    z *= np.sqrt(variance / 2.0)
    return z


def symbol_variances(ch: ChannelState, noise: NoisePowers) -> tuple[float, float]:
    """Received per-sample power under each bit hypothesis.

    Returns (p0, p1) with p0 = |h|^2 sigma_s^2 + sigma_w^2 and
    p1 = |mu|^2 sigma_s^2 + sigma_w^2.
    """
    p0 = abs(ch.h) ** 2 * noise.sigma_s_sq + noise.sigma_w_sq
    p1 = abs(ch.mu) ** 2 * noise.sigma_s_sq + noise.sigma_w_sq
    return p0, p1


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent substream for one unit of work, derived from a root seed.

    The derivation is counter-based (root entropy plus a spawn key), so any
    (seed, key) pair yields the same stream regardless of how many other
    streams were created or in which order.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(ss))
