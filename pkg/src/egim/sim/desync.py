"""Single on/off flip injection: uncoded bit stuffing vs the autoencoder."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .. import codec
from ..mapping import bits_per_symbol, destuff, stuff


@dataclass
class DesyncReport:
    scheme: str
    trials: int
    injected: bool
    mean_downstream_ber: float
    max_error_bits: int
    max_error_span: int
    mean_error_bits: float
    trials_with_errors: int

    def to_dict(self) -> dict:
        return asdict(self)


def flip_on_off(cw: np.ndarray, pos: int, rng) -> None:
    """Turn an off codeword into a random active one, or an active one off."""
    if cw[pos, 0]:
        cw[pos] = 0
    else:
        cw[pos, 0] = 1
        cw[pos, 1:] = rng.integers(0, 2, size=cw.shape[1] - 1)


def _span(errors: np.ndarray) -> int:
    idx = np.flatnonzero(errors)
    return int(idx[-1] - idx[0] + 1) if idx.size else 0


def uncoded_trial(rng, n_codewords: int, m_order: int = 4, inject: bool = True):
    """Returns the positional error mask and the BER from the flip onward."""
    m = bits_per_symbol(m_order)
    source = rng.integers(0, 2, size=n_codewords * (m + 1), dtype=np.uint8)
    res = stuff(source, m_order, n_codewords)
    tx_bits = source[:res.consumed]
    cw = res.codewords.copy()
    start = 0
    if inject:
        pos = int(rng.integers(n_codewords))
        start = int(np.where(cw[:pos, 0] == 1, m + 1, 1).sum())
        flip_on_off(cw, pos, rng)
    rx_bits = destuff(cw, m_order)
    n = min(tx_bits.size, rx_bits.size)
    errors = tx_bits[:n] != rx_bits[:n]
    downstream = errors[start:]
    return errors, float(downstream.mean()) if downstream.size else 0.0


def coded_trials(rng, trials: int, n_bits: int, tb: int = codec.TRACEBACK, inject: bool = True):
    """Error masks (trials, n_bits) and per-trial downstream BER after hard Viterbi."""
    source = rng.integers(0, 2, size=(trials, n_bits), dtype=np.uint8)
    cw = codec.encode(source)
    starts = np.zeros(trials, dtype=np.int64)
    if inject:
        for t in range(trials):
            starts[t] = rng.integers(cw.shape[1])
            flip_on_off(cw[t], int(starts[t]), rng)
    errors = codec.viterbi_hard(cw, tb=tb) != source
    bers = [float(e[min(s, n_bits - 1):].mean()) for e, s in zip(errors, starts)]
    return errors, bers


def desync_experiment(scheme: str = "autoencoder", trials: int = 1000, n_codewords: int = 256,
                      seed: int = 0, inject: bool = True, tb: int = codec.TRACEBACK) -> DesyncReport:
    """Inject one on/off flip per trial and measure the bit-error footprint.

    ``scheme`` is ``egim4qam``/``egim8psk`` (uncoded, destuffed) or
    ``autoencoder`` (hard Viterbi, one terminated block of ``n_codewords``).
    """
    rng = np.random.default_rng(seed)
    if scheme in ("egim4qam", "egim8psk"):
        m_order = 4 if scheme == "egim4qam" else 8
        masks, bers = zip(*(uncoded_trial(rng, n_codewords, m_order, inject) for _ in range(trials)))
    elif scheme == "autoencoder":
        masks, bers = coded_trials(rng, trials, n_codewords - codec.MEMORY, tb, inject)
    else:
        raise ValueError(f"desync experiment supports egim4qam, egim8psk, autoencoder; got {scheme!r}")
    counts = [int(m.sum()) for m in masks]
    return DesyncReport(
        scheme=scheme,
        trials=trials,
        injected=inject,
        mean_downstream_ber=float(np.mean(bers)),
        max_error_bits=max(counts),
        max_error_span=max(_span(m) for m in masks),
        mean_error_bits=float(np.mean(counts)),
        trials_with_errors=int(np.count_nonzero(counts)),
    )
