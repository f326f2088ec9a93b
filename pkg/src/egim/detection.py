"""Per-subcarrier ML detection, OOK radius decisions, max-log LLRs and
exhaustive sub-block ML for classical OFDM-IM."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .mapping import (
    ConstellationTable,
    GroupSpec,
    bits_per_symbol,
    combination_unrank,
    labels_to_bits,
    psk_table,
)


def nearest_index(y, points: np.ndarray) -> np.ndarray:
    """Index of the closest point for every sample; ties go to the lowest index."""
    y = np.asarray(y)
    d = np.abs(y[..., None] - points) ** 2
    return np.argmin(d, axis=-1)


def detect_codewords(y, table: ConstellationTable) -> np.ndarray:
    """Vectorized ML detection: samples (...,) -> codeword bits (..., width)."""
    idx = nearest_index(y, table.points)
    return labels_to_bits(table.labels[idx], table.width)


def ml_detect(y: complex, table: ConstellationTable) -> tuple[int, ...]:
    return tuple(int(b) for b in detect_codewords(y, table))


def default_radius(table: ConstellationTable) -> float:
    return 0.5 * float(np.min(np.abs(table.active_points)))


def ook_decide(y, threshold_radius: float) -> np.ndarray | bool:
    """True where the subcarrier is judged active (|y| >= radius)."""
    if threshold_radius <= 0:
        raise ValueError("threshold radius must be positive")
    active = np.abs(y) >= threshold_radius
    return bool(active) if np.ndim(active) == 0 else active


def llr_matrix(y, sigma2, table: ConstellationTable, gains=None) -> np.ndarray:
    """Max-log LLRs for every codeword bit, shape (..., width).

    Positive values favour bit 0. ``gains`` (per-sample complex channel
    coefficients) scales the table, i.e. metrics are |y - h s|^2.
    """
    sigma2 = np.asarray(sigma2, dtype=float)
    if np.any(sigma2 <= 0):
        raise ValueError("noise variance must be positive")
    y = np.asarray(y)
    ref = table.points if gains is None else np.asarray(gains)[..., None] * table.points
    d = np.abs(y[..., None] - ref) ** 2
    bits = table.codewords.astype(bool)
    out = np.empty(y.shape + (table.width,))
    for i in range(table.width):
        one = bits[:, i]
        d0 = d[..., ~one].min(axis=-1)
        d1 = d[..., one].min(axis=-1)
        out[..., i] = -(d0 - d1) / sigma2
    return out


def approx_llr(y: complex, sigma2: float, table: ConstellationTable, bit_index: int) -> float:
    if not 0 <= bit_index < table.width:
        raise ValueError(f"bit index {bit_index} outside codeword width {table.width}")
    return float(llr_matrix(y, sigma2, table)[bit_index])


@lru_cache(maxsize=None)
def _candidates(spec: GroupSpec):
    """All legal (pattern, payload) sub-blocks as point vectors and bit rows."""
    m = bits_per_symbol(spec.m_order)
    table = psk_table(spec.m_order).lookup()
    vectors, bit_rows = [], []
    for rank in range(1 << spec.p1):
        active = list(combination_unrank(rank, spec.n, spec.k))
        rank_bits = labels_to_bits(np.array(rank), spec.p1) if spec.p1 else np.zeros(0, np.uint8)
        for symbols in itertools.product(range(spec.m_order), repeat=spec.k):
            v = np.zeros(spec.n, dtype=complex)
            v[active] = table[list(symbols)]
            vectors.append(v)
            payload = labels_to_bits(np.array(symbols), m).ravel()
            bit_rows.append(np.concatenate([rank_bits, payload]))
    return np.array(vectors), np.array(bit_rows, dtype=np.uint8)


def subblock_ml_detect(y_hat, spec: GroupSpec, noise=None) -> np.ndarray:
    """Exhaustive ML over legal sub-blocks: (..., n) samples -> (..., p1 + p2) bits.

    ``noise`` is accepted for interface symmetry; the metric on equalized
    samples is plain Euclidean distance.
    """
    vectors, bit_rows = _candidates(spec)
    y_hat = np.asarray(y_hat)
    if y_hat.shape[-1] != spec.n:
        raise ValueError(f"sub-block has {y_hat.shape[-1]} samples, expected n={spec.n}")
    d = (np.abs(y_hat[..., None, :] - vectors) ** 2).sum(axis=-1)
    return bit_rows[np.argmin(d, axis=-1)]


def subblock_candidate_vectors(spec: GroupSpec) -> np.ndarray:
    return _candidates(spec)[0]
