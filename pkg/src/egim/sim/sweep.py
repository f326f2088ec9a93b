"""Monte Carlo sweep engine.

Frames are simulated in fixed-size blocks. Block ``b`` of SNR point ``p``
draws from ``SeedSequence(seed, spawn_key=(p, b))``, and blocks are reduced
in index order with the stopping rule checked after each one, so the result
does not depend on how many workers computed the blocks.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import codec
from ..channel import ChannelRealization, NoiseSpec, draw_channel, mmse_equalize, propagate
from ..detection import detect_codewords, llr_matrix, subblock_ml_detect
from ..mapping import (
    GroupSpec,
    bits_per_symbol,
    classical_im_map,
    egim_table,
    map_codewords,
    stuff,
)
from ..ofdm import PowerPolicy, ofdm_demodulate, ofdm_modulate
from .config import SimConfig

log = logging.getLogger(__name__)


@dataclass
class Counts:
    frames: int = 0
    symbols: int = 0
    bits: int = 0
    symbol_errors: int = 0
    bit_errors: int = 0

    def __add__(self, other: Counts) -> Counts:
        return Counts(
            self.frames + other.frames,
            self.symbols + other.symbols,
            self.bits + other.bits,
            self.symbol_errors + other.symbol_errors,
            self.bit_errors + other.bit_errors,
        )


@dataclass
class PointResult:
    snr_db: float
    frames: int
    symbols: int
    bits: int
    symbol_errors: int
    bit_errors: int
    elapsed: float = 0.0
    ser: float = field(default=None)
    ber: float = field(default=None)

    def __post_init__(self):
        if self.ser is None:
            self.ser = self.symbol_errors / self.symbols if self.symbols else float("nan")
        if self.ber is None:
            self.ber = self.bit_errors / self.bits if self.bits else float("nan")


@dataclass
class SweepResult:
    scheme: str
    channel: str
    policy: str
    points: list[PointResult]
    label: str = ""
    kind: str = "sim"

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    @property
    def ser(self) -> np.ndarray:
        return np.array([p.ser for p in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])


def block_rng(seed: int, point: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, block)))


# --- per-block physical layer --------------------------------------------------

def _channel_pass(freq, cfg: SimConfig, noise: NoiseSpec, rng):
    """Modulate, propagate and demodulate a batch of frames.

    Returns the received subcarriers and the channel realization (flat for AWGN).
    """
    tx = ofdm_modulate(freq, cfg.policy, cfg.cp_len)
    if cfg.channel == "rayleigh":
        ch = draw_channel(cfg.taps, rng, cfg.n_fft, cfg.cp_len, size=freq.shape[0])
    else:
        ch = ChannelRealization.flat(cfg.n_fft)
    rx = propagate(tx, ch, noise, rng)
    return ofdm_demodulate(rx, cfg.cp_len, cfg.n_fft), ch


def _equalize(y, ch, cfg: SimConfig, noise: NoiseSpec):
    """Equalized samples rescaled back onto the unit-power constellation."""
    amp = PowerPolicy(cfg.policy).amplitude
    if cfg.channel == "awgn":
        return y / amp
    return mmse_equalize(y, ch, noise) / amp


def _noise(cfg: SimConfig, snr_db: float) -> NoiseSpec:
    policy = PowerPolicy(cfg.policy)
    es = policy.symbol_energy
    if not cfg.coded:
        return NoiseSpec.from_snr_db(snr_db, es)
    # Eb/N0 with one information bit per subcarrier; Eb is the mean
    # transmitted energy per subcarrier.
    on_fraction = 0.5 if cfg.scheme == "autoencoder" else 1.0
    n0 = on_fraction * es / 10.0 ** (snr_db / 10.0)
    return NoiseSpec(n0, es)


def _block_egim(cfg: SimConfig, snr_db: float, frames: int, rng) -> Counts:
    m_order = 4 if cfg.scheme == "egim4qam" else 8
    m = bits_per_symbol(m_order)
    table = egim_table(m_order)
    n = cfg.n_fft
    noise = _noise(cfg, snr_db)

    source = rng.integers(0, 2, size=(frames, n * (m + 1)), dtype=np.uint8)
    tx_cw = np.empty((frames, n, m + 1), dtype=np.uint8)
    consumed = 0
    for f in range(frames):
        res = stuff(source[f], m_order, n)
        tx_cw[f] = res.codewords
        consumed += res.consumed
    y, ch = _channel_pass(map_codewords(tx_cw, table), cfg, noise, rng)
    rx_cw = detect_codewords(_equalize(y, ch, cfg, noise), table)

    wrong = tx_cw != rx_cw
    active = tx_cw[..., 0].astype(bool)
    # Positional accounting: the index bit always carries information, the
    # payload only when the transmitted codeword is active.
    bit_errors = int(wrong[..., 0].sum() + wrong[..., 1:][active].sum())
    return Counts(frames, frames * n, consumed, int(wrong.any(axis=-1).sum()), bit_errors)


def _block_classical(cfg: SimConfig, snr_db: float, frames: int, rng) -> Counts:
    spec = GroupSpec(cfg.im_n, cfg.im_k, cfg.im_order)
    groups = cfg.n_fft // spec.n
    noise = _noise(cfg, snr_db)

    source = rng.integers(0, 2, size=(frames, spec.p * groups), dtype=np.uint8)
    freq = np.stack([classical_im_map(row, spec, groups) for row in source])
    y, ch = _channel_pass(freq, cfg, noise, rng)
    y_hat = _equalize(y, ch, cfg, noise).reshape(frames, groups, spec.n)
    rx_bits = subblock_ml_detect(y_hat, spec).reshape(frames, -1)
    rx_freq = np.stack([classical_im_map(row, spec, groups) for row in rx_bits])

    symbol_errors = int((~np.isclose(freq, rx_freq)).sum())
    bit_errors = int((source != rx_bits).sum())
    return Counts(frames, frames * cfg.n_fft, source.size, symbol_errors, bit_errors)


def _block_coded(cfg: SimConfig, snr_db: float, frames: int, rng) -> Counts:
    scheme = codec.AUTOENCODER_SCHEME if cfg.scheme == "autoencoder" else codec.BENCHMARK_SCHEME
    table = scheme.table
    n = cfg.n_fft
    info = n - codec.MEMORY
    noise = _noise(cfg, snr_db)

    source = rng.integers(0, 2, size=(frames, info), dtype=np.uint8)
    tx_cw = codec.encode(source, scheme.trellis, terminate=True)
    y, ch = _channel_pass(map_codewords(tx_cw, table), cfg, noise, rng)
    rx_cw = detect_codewords(_equalize(y, ch, cfg, noise), table)

    if cfg.decoding == "soft":
        gains = PowerPolicy(cfg.policy).amplitude * ch.freq_response
        llrs = llr_matrix(y, noise.n0, table, gains=np.broadcast_to(gains, y.shape))
        decoded = codec.viterbi_soft(llrs, scheme.trellis, cfg.traceback)
    else:
        decoded = codec.viterbi_hard(rx_cw, scheme.trellis, cfg.traceback)

    symbol_errors = int((tx_cw != rx_cw).any(axis=-1).sum())
    bit_errors = int((decoded != source).sum())
    return Counts(frames, frames * n, source.size, symbol_errors, bit_errors)


_BLOCKS = {
    "egim4qam": _block_egim,
    "egim8psk": _block_egim,
    "classical-im": _block_classical,
    "autoencoder": _block_coded,
    "benchmark-codec": _block_coded,
}


def simulate_block(cfg: SimConfig, point: int, block: int) -> Counts:
    start = block * cfg.block_frames
    frames = min(cfg.block_frames, cfg.max_frames - start)
    rng = block_rng(cfg.seed, point, block)
    return _BLOCKS[cfg.scheme](cfg, cfg.snr_db[point], frames, rng)


def _error_count(cfg: SimConfig, c: Counts) -> int:
    return c.bit_errors if cfg.coded else c.symbol_errors


def _run_point(cfg: SimConfig, point: int, pool, workers: int) -> PointResult:
    t0 = time.perf_counter()
    n_blocks = -(-cfg.max_frames // cfg.block_frames)
    total = Counts()
    block = 0
    wave = 1 if pool is None else 2 * workers
    while block < n_blocks:
        ids = range(block, min(block + wave, n_blocks))
        if pool is None:
            parts = [simulate_block(cfg, point, b) for b in ids]
        else:
            parts = list(pool.map(simulate_block, [cfg] * len(ids), [point] * len(ids), ids))
        done = False
        for part in parts:
            total = total + part
            block += 1
            if _error_count(cfg, total) >= cfg.min_errors:
                done = True
                break
        if done:
            break
    elapsed = time.perf_counter() - t0
    log.info("%s %.1f dB: %d frames, %d symbol errors, %d bit errors (%.1fs)",
             cfg.name, cfg.snr_db[point], total.frames, total.symbol_errors,
             total.bit_errors, elapsed)
    return PointResult(cfg.snr_db[point], total.frames, total.symbols, total.bits,
                       total.symbol_errors, total.bit_errors, elapsed)


def run_sweep(cfg: SimConfig, workers: int = 1) -> SweepResult:
    cfg.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        points = [_run_point(cfg, i, None, 1) for i in range(len(cfg.snr_db))]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = [_run_point(cfg, i, pool, workers) for i in range(len(cfg.snr_db))]
    return SweepResult(cfg.scheme, cfg.channel, cfg.policy, points, label=cfg.name)


def theory_result(scheme: str, snr_db, channel: str = "rayleigh",
                  policy: str = "power-saving") -> SweepResult:
    from ..analysis import theory_curve

    points = [PointResult(s, 0, 0, 0, 0, 0, ser=v, ber=float("nan"))
              for s, v in theory_curve(scheme, snr_db)]
    return SweepResult(scheme, channel, policy, points, label=f"{scheme}-theory", kind="theory")


# --- frame-level ledgers ---------------------------------------------------------

def bits_per_subcarrier(m_order: int, frames: int, n_fft: int = 64, seed: int = 0) -> float:
    """Mean information bits per subcarrier when stuffing one shared bit queue."""
    rng = np.random.default_rng(seed)
    m = bits_per_symbol(m_order)
    stream = rng.integers(0, 2, size=frames * n_fft * (m + 1), dtype=np.uint8)
    pos = 0
    for _ in range(frames):
        res = stuff(stream[pos:], m_order, n_fft)
        pos += res.consumed
    return pos / (frames * n_fft)


def mean_subcarrier_energy(scheme: str, policy: str, frames: int, n_fft: int = 64,
                           cp_len: int = 16, seed: int = 0) -> float:
    """Average transmitted energy per subcarrier, measured on the time-domain body."""
    rng = np.random.default_rng(seed)
    if scheme in ("egim4qam", "egim8psk"):
        m_order = 4 if scheme == "egim4qam" else 8
        m = bits_per_symbol(m_order)
        source = rng.integers(0, 2, size=(frames, n_fft * (m + 1)), dtype=np.uint8)
        cw = np.stack([stuff(row, m_order, n_fft).codewords for row in source])
        freq = map_codewords(cw, egim_table(m_order))
    elif scheme in ("autoencoder", "benchmark-codec"):
        sch = codec.AUTOENCODER_SCHEME if scheme == "autoencoder" else codec.BENCHMARK_SCHEME
        source = rng.integers(0, 2, size=(frames, n_fft), dtype=np.uint8)
        freq = sch.modulate(source, terminate=False)
    else:
        raise ValueError(f"no power ledger for scheme {scheme!r}")
    body = ofdm_modulate(freq, policy, cp_len)[..., cp_len:]
    return float(np.mean(np.abs(body) ** 2))

