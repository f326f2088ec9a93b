"""CP-OFDM modulation with a unitary DFT and fixed per-symbol power policy.

The transmitter never scales by the number of active subcarriers, so the
receiver stays blind to it. ``reinvest`` boosts every nonzero subcarrier by
sqrt(2), putting the saved off-symbol power back into the active ones.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

N_FFT = 64
CP_LEN = 16


class PowerPolicy(str, Enum):
    POWER_SAVING = "power-saving"
    REINVEST = "reinvest"

    @property
    def amplitude(self) -> float:
        return float(np.sqrt(2.0)) if self is PowerPolicy.REINVEST else 1.0

    @property
    def symbol_energy(self) -> float:
        """Energy of an active unit-magnitude point after policy scaling."""
        return self.amplitude**2


def apply_policy(frame: np.ndarray, policy: PowerPolicy | str) -> np.ndarray:
    policy = PowerPolicy(policy)
    return np.asarray(frame, dtype=complex) * policy.amplitude


def ofdm_modulate(frame, policy: PowerPolicy | str = PowerPolicy.POWER_SAVING,
                  cp_len: int = CP_LEN, n_fft: int | None = None) -> np.ndarray:
    """Frequency frame(s) of shape (..., N) -> time frame(s) of shape (..., N + cp)."""
    frame = np.asarray(frame, dtype=complex)
    n = frame.shape[-1]
    if n_fft is not None and n != n_fft:
        raise ValueError(f"frame has {n} subcarriers, expected {n_fft}")
    if not 0 <= cp_len <= n:
        raise ValueError(f"cyclic prefix {cp_len} must lie in [0, {n}]")
    body = np.fft.ifft(apply_policy(frame, policy), axis=-1, norm="ortho")
    return np.concatenate([body[..., n - cp_len:], body], axis=-1)


def ofdm_demodulate(time, cp_len: int = CP_LEN, n_fft: int = N_FFT) -> np.ndarray:
    time = np.asarray(time, dtype=complex)
    if time.shape[-1] != n_fft + cp_len:
        raise ValueError(f"time frame has {time.shape[-1]} samples, expected {n_fft + cp_len}")
    return np.fft.fft(time[..., cp_len:], axis=-1, norm="ortho")
