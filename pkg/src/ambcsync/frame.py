"""Device-side frame construction and receiver-side waveform synthesis.

A transmission is three phases back to back: an all-one wake-up preamble,
an alternating (0,1) pilot of L bit-pairs, and the data payload.  One
trailing "0" guard bit is appended so that a delayed sampling clock never
reads past the end of the frame.

Symbol timing offset is modelled on the receiver's sampling clock: the
window it takes for any symbol covers the true samples shifted by tau,
so a negative tau pulls in the tail of the previous symbol and a positive
tau the head of the next one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .signal_model import ChannelState, NoisePowers, gen_cgn_block


@dataclass(frozen=True)
class FrameConfig:
    """Sample-level frame geometry.

    Attributes:
        preamble_bits: number of all-one wake-up bits (N_p samples each).
        pilot_pairs: number L of alternating (0,1) pilot bit-pairs.
        pilot_bit_samples: samples per pilot bit, N_p.
        data_symbols: number K of payload bits.
        data_symbol_samples: samples per payload bit, N (also the guard length).
    """

    preamble_bits: int
    pilot_pairs: int
    pilot_bit_samples: int
    data_symbols: int
    data_symbol_samples: int

    def __post_init__(self):
        if self.preamble_bits < 1:
            raise ValueError("preamble_bits must be >= 1")
        if self.pilot_pairs < 1:
            raise ValueError("pilot_pairs must be >= 1")
        # the transition-point scan needs interior candidates {2..N_p-1}
        if self.pilot_bit_samples < 4:
            raise ValueError("pilot_bit_samples must be >= 4")
        if self.data_symbols < 0:
            raise ValueError("data_symbols must be >= 0")
        if self.data_symbol_samples < 1:
            raise ValueError("data_symbol_samples must be >= 1")

    @property
    def pilot_start(self) -> int:
        return self.preamble_bits * self.pilot_bit_samples

    @property
    def data_start(self) -> int:
        return self.pilot_start + 2 * self.pilot_pairs * self.pilot_bit_samples

    @property
    def total_samples(self) -> int:
        # payload plus one trailing guard bit of N samples
        return self.data_start + (self.data_symbols + 1) * self.data_symbol_samples

    @property
    def total_bits(self) -> int:
        return self.preamble_bits + 2 * self.pilot_pairs + self.data_symbols + 1

    def bit_durations(self) -> np.ndarray:
        """Per-bit sample counts, in transmission order (guard bit included)."""
        return np.concatenate(
            [
                np.full(self.preamble_bits + 2 * self.pilot_pairs, self.pilot_bit_samples),
                np.full(self.data_symbols + 1, self.data_symbol_samples),
            ]
        )


@dataclass(frozen=True)
class Waveform:
    """Received baseband samples plus the receiver's current symbol clock.

    ``pilot_start``/``data_start`` are the indices where the receiver
    believes the pilot and data phases begin; shifting them models a
    sampling clock offset without touching the samples.
    """

    samples: np.ndarray
    config: FrameConfig
    pilot_start: int
    data_start: int


def build_bit_sequence(
    cfg: FrameConfig,
    payload: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Assemble the transmitted bit sequence: preamble, pilot, payload, guard.

    If ``payload`` is None, K equiprobable bits are drawn from ``rng``.
    """
    if payload is None:
        if cfg.data_symbols > 0:
            if rng is None:
                raise ValueError("rng required to draw a random payload")
            payload = rng.integers(0, 2, size=cfg.data_symbols)
        else:
            payload = np.zeros(0, dtype=np.int64)
    else:
        payload = np.asarray(payload, dtype=np.int64)
        if payload.shape != (cfg.data_symbols,):
            raise ValueError(
                f"payload length {payload.size} != configured data_symbols {cfg.data_symbols}"
            )
    preamble = np.ones(cfg.preamble_bits, dtype=np.int64)
    pilot = np.tile(np.array([0, 1], dtype=np.int64), cfg.pilot_pairs)
    guard = np.zeros(1, dtype=np.int64)
    return np.concatenate([preamble, pilot, payload, guard])


def synthesize_received(
    bits: np.ndarray,
    cfg: FrameConfig,
    ch: ChannelState,
    noise: NoisePowers,
    rng: np.random.Generator,
) -> Waveform:
    """Synthesize the receiver's baseband stream for one frame.

    Every sample inside bit k is h*s + zeta*g*B(k)*s + w with fresh source
    and noise samples, i.e. a complex Gaussian of power p0 or p1 depending
    on the bit.
    """
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape != (cfg.total_bits,):
        raise ValueError(f"expected {cfg.total_bits} bits, got {bits.size}")
    durations = cfg.bit_durations()
    total = int(durations.sum())
    coeff_per_bit = ch.h + ch.zeta * ch.g * bits
    coeff = np.repeat(coeff_per_bit, durations)
    s = gen_cgn_block(total, noise.sigma_s_sq, rng)
    w = gen_cgn_block(total, noise.sigma_w_sq, rng)
    samples = coeff * s + w
    return Waveform(
        samples=samples,
        config=cfg,
        pilot_start=cfg.pilot_start,
        data_start=cfg.data_start,
    )


def _shift_clock(w: Waveform, delta: int) -> Waveform:
    """Shift the receiver's symbol clock by ``delta`` samples, with range checks."""
    cfg = w.config
    new_pilot = w.pilot_start + delta
    new_data = w.data_start + delta
    payload_end = new_data + cfg.data_symbols * cfg.data_symbol_samples
    if new_pilot < 0 or payload_end > w.samples.size:
        raise ValueError(
            f"clock shift {delta} exceeds available guard samples "
            f"(pilot start {new_pilot}, payload end {payload_end}, "
            f"have {w.samples.size})"
        )
    return replace(w, pilot_start=new_pilot, data_start=new_data)


def apply_sto(w: Waveform, tau: int) -> Waveform:
    """Offset the receiver's sampling clock by ``tau`` samples.

    The window for any symbol then covers true samples
    [start + tau, start + tau + len).  Requires N_p > 2|tau| so that the
    pilot windows keep a detectable transition, and enough preamble/guard
    samples to absorb the shift.
    """
    tau = int(tau)
    if 2 * abs(tau) >= w.config.pilot_bit_samples:
        raise ValueError(
            f"|tau|={abs(tau)} not detectable: need pilot_bit_samples > 2|tau|, "
            f"have {w.config.pilot_bit_samples}"
        )
    return _shift_clock(w, tau)
