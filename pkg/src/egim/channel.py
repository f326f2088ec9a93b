"""Block-fading Rayleigh / AWGN channel and per-subcarrier MMSE equalizer."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import CP_LEN, N_FFT


@dataclass(frozen=True)
class ChannelRealization:
    """Tap gains of shape (..., L) and their N-point frequency response."""

    taps: np.ndarray
    freq_response: np.ndarray

    @classmethod
    def from_taps(cls, taps, n_fft: int = N_FFT) -> ChannelRealization:
        taps = np.atleast_1d(np.asarray(taps, dtype=complex))
        return cls(taps, np.fft.fft(taps, n=n_fft, axis=-1))

    @classmethod
    def flat(cls, n_fft: int = N_FFT) -> ChannelRealization:
        return cls.from_taps([1.0], n_fft)

    @property
    def n_taps(self) -> int:
        return self.taps.shape[-1]


@dataclass(frozen=True)
class NoiseSpec:
    """Noise variance per complex sample, tied to the average SNR per subcarrier.

    ``symbol_energy`` is the energy of an active symbol as transmitted, so
    SNR = symbol_energy / n0.
    """

    n0: float
    symbol_energy: float = 1.0

    @classmethod
    def from_snr_db(cls, snr_db: float, symbol_energy: float = 1.0) -> NoiseSpec:
        return cls(symbol_energy / 10.0 ** (snr_db / 10.0), symbol_energy)

    @property
    def snr(self) -> float:
        return np.inf if self.n0 == 0 else self.symbol_energy / self.n0

    @property
    def snr_db(self) -> float:
        return float(10 * np.log10(self.snr))


def draw_channel(n_taps: int, rng: np.random.Generator, n_fft: int = N_FFT,
                 cp_len: int = CP_LEN, size: int | None = None) -> ChannelRealization:
    """Uniform power-delay profile, each tap CN(0, 1/L).

    With ``size`` set, draws that many independent realizations stacked on
    the leading axis.
    """
    if not 1 <= n_taps <= cp_len:
        raise ValueError(f"tap count {n_taps} must lie in [1, cp_len={cp_len}]")
    shape = (n_taps,) if size is None else (size, n_taps)
    taps = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2 * n_taps)
    return ChannelRealization.from_taps(taps, n_fft)


def complex_noise(shape, n0: float, rng: np.random.Generator) -> np.ndarray:
    return np.sqrt(n0 / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def propagate(time, ch: ChannelRealization, noise: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    """Linear convolution with the taps, truncated to frame length, plus AWGN.

    Batched frames of shape (B, S) pair with batched taps of shape (B, L).
    """
    time = np.asarray(time, dtype=complex)
    taps = ch.taps
    out = np.zeros_like(time)
    length = time.shape[-1]
    for delay in range(min(ch.n_taps, length)):
        out[..., delay:] += taps[..., delay, None] * time[..., :length - delay]
    if noise.n0 > 0:
        out = out + complex_noise(out.shape, noise.n0, rng)
    return out


def mmse_equalize(y, ch: ChannelRealization, noise: NoiseSpec) -> np.ndarray:
    h = ch.freq_response
    num = np.asarray(y) * np.conj(h)
    den = np.broadcast_to(np.abs(h) ** 2 + noise.n0 / noise.symbol_energy, num.shape)
    # den == 0 only when H = 0 with n0 = 0; the subcarrier carries nothing.
    return np.divide(num, den, out=np.zeros_like(num, dtype=complex), where=den > 0)
