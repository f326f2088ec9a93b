"""Bit stuffing mappers and the classical OFDM-IM group mapper.

Codewords are stored as ``uint8`` arrays of shape ``(count, width)`` with the
index bit in column 0. A codeword's integer label reads its bits MSB-first,
so ``(1, 1, 0)`` has label 6.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, log2
from typing import NamedTuple

import numpy as np

SQRT1_2 = 1.0 / np.sqrt(2.0)


def bits_per_symbol(m_order: int) -> int:
    m = int(round(log2(m_order)))
    if m_order < 2 or 2**m != m_order:
        raise ValueError(f"modulation order must be a power of two >= 2, got {m_order}")
    return m


def labels_to_bits(labels: np.ndarray, width: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return ((labels[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_labels(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits @ weights


@dataclass(frozen=True)
class ConstellationTable:
    """Bijection between codeword labels and complex points."""

    scheme: str
    labels: np.ndarray
    points: np.ndarray
    width: int

    def __post_init__(self):
        if len(set(self.labels.tolist())) != len(self.labels):
            raise ValueError("constellation labels must be unique")
        if len(self.labels) != len(self.points):
            raise ValueError("labels and points differ in length")

    @property
    def codewords(self) -> np.ndarray:
        return labels_to_bits(self.labels, self.width)

    @property
    def active_points(self) -> np.ndarray:
        return self.points[self.points != 0]

    def scaled(self, factor: float) -> ConstellationTable:
        return ConstellationTable(self.scheme, self.labels, self.points * factor, self.width)

    def lookup(self) -> np.ndarray:
        """Dense label -> point array; unknown labels hold NaN."""
        out = np.full(1 << self.width, np.nan + 0j, dtype=complex)
        out[self.labels] = self.points
        return out

    def position(self) -> np.ndarray:
        """Dense label -> symbol index array; unknown labels hold -1."""
        out = np.full(1 << self.width, -1, dtype=np.int64)
        out[self.labels] = np.arange(len(self.labels))
        return out


def _table(scheme, rows, width):
    labels = np.array([int(code, 2) for code, _ in rows], dtype=np.int64)
    points = np.array([p for _, p in rows], dtype=complex)
    return ConstellationTable(scheme, labels, points, width)


# Symbol order S_0..S_4 / S_0..S_8; ML tie-breaking relies on it.
EGIM_4QAM = _table(
    "EGIM-4QAM",
    [
        ("000", 0j),
        ("100", SQRT1_2 * (1 + 1j)),
        ("110", SQRT1_2 * (-1 + 1j)),
        ("111", SQRT1_2 * (-1 - 1j)),
        ("101", SQRT1_2 * (1 - 1j)),
    ],
    3,
)

EGIM_8PSK = _table(
    "EGIM-8PSK",
    [
        ("0000", 0j),
        ("1000", 1 + 0j),
        ("1001", 1j),
        ("1010", -1 + 0j),
        ("1011", -1j),
        ("1100", SQRT1_2 * (1 + 1j)),
        ("1110", SQRT1_2 * (-1 + 1j)),
        ("1111", SQRT1_2 * (-1 - 1j)),
        ("1101", SQRT1_2 * (1 - 1j)),
    ],
    4,
)

# Gray QPSK used by the rate-1/2 benchmark code: bit 0 -> +, bit 1 -> -.
QPSK = _table(
    "QPSK",
    [
        ("00", SQRT1_2 * (1 + 1j)),
        ("01", SQRT1_2 * (1 - 1j)),
        ("10", SQRT1_2 * (-1 + 1j)),
        ("11", SQRT1_2 * (-1 - 1j)),
    ],
    2,
)


def egim_table(m_order: int) -> ConstellationTable:
    if m_order == 4:
        return EGIM_4QAM
    if m_order == 8:
        return EGIM_8PSK
    raise ValueError(f"EGIM is defined for M in {{4, 8}}, got {m_order}")


def psk_table(m_order: int) -> ConstellationTable:
    """Gray-labelled M-PSK without an off point (classical OFDM-IM payload)."""
    m = bits_per_symbol(m_order)
    if m_order == 4:
        return QPSK
    k = np.arange(m_order)
    gray = k ^ (k >> 1)
    points = np.exp(2j * np.pi * k / m_order)
    return ConstellationTable(f"{m_order}-PSK", gray.astype(np.int64), points, m)


class StuffResult(NamedTuple):
    codewords: np.ndarray
    consumed: int
    padded: int


def stuff(bits, m_order: int, count: int) -> StuffResult:
    """Bit-stuff ``count`` codewords from the front of ``bits``.

    A 0 emits the off codeword; a 1 emits itself followed by the next
    log2(M) bits. Zeros are padded in when the stream runs out mid-frame and
    ``padded`` reports how many; ``consumed`` counts real bits only.
    """
    if m_order not in (4, 8):
        raise ValueError(f"bit stuffing is defined for M in {{4, 8}}, got {m_order}")
    m = bits_per_symbol(m_order)
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    # Worst case is every codeword active.
    need = count * (m + 1)
    avail = bits.size
    if avail < need:
        bits = np.concatenate([bits, np.zeros(need - avail, dtype=np.uint8)])

    out = np.zeros((count, m + 1), dtype=np.uint8)
    pos = 0
    for j in range(count):
        if bits[pos]:
            out[j] = bits[pos:pos + m + 1]
            pos += m + 1
        else:
            pos += 1
    return StuffResult(out, min(pos, avail), max(0, pos - avail))


def destuff(codewords, m_order: int) -> np.ndarray:
    m = bits_per_symbol(m_order)
    cw = np.asarray(codewords, dtype=np.uint8).reshape(-1, m + 1)
    index = cw[:, 0].astype(bool)
    if np.any(cw[~index, 1:]):
        bad = int(np.flatnonzero(~index & cw[:, 1:].any(axis=1))[0])
        raise ValueError(f"invalid codeword at position {bad}: index bit 0 with nonzero payload")
    keep = np.zeros_like(cw, dtype=bool)
    keep[:, 0] = True
    keep[index, 1:] = True
    return cw[keep]


def map_codewords(codewords, table: ConstellationTable) -> np.ndarray:
    cw = np.asarray(codewords, dtype=np.uint8)
    if cw.shape[-1] != table.width:
        raise ValueError(f"codeword width {cw.shape[-1]} does not match {table.scheme} width {table.width}")
    points = table.lookup()[bits_to_labels(cw)]
    if np.isnan(points).any():
        raise ValueError(f"codeword not in {table.scheme} table")
    return points


def combination_unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    """Return the ``rank``-th k-subset of range(n) in lexicographic order."""
    limit = 1 << index_bits(n, k)
    if not 0 <= rank < limit:
        raise ValueError(f"rank {rank} outside [0, {limit})")
    out = []
    start = 0
    for slots in range(k, 0, -1):
        for c in range(start, n):
            block = comb(n - c - 1, slots - 1)
            if rank < block:
                out.append(c)
                start = c + 1
                break
            rank -= block
    return tuple(out)


def combination_rank(subset, n: int) -> int:
    subset = sorted(subset)
    k = len(subset)
    rank = 0
    start = 0
    for i, c in enumerate(subset):
        for skipped in range(start, c):
            rank += comb(n - skipped - 1, k - i - 1)
        start = c + 1
    return rank


def index_bits(n: int, k: int) -> int:
    if not 0 < k <= n:
        raise ValueError(f"need 0 < k <= n, got n={n}, k={k}")
    return comb(n, k).bit_length() - 1


@dataclass(frozen=True)
class GroupSpec:
    n: int
    k: int
    m_order: int

    def __post_init__(self):
        index_bits(self.n, self.k)
        bits_per_symbol(self.m_order)

    @property
    def p1(self) -> int:
        return index_bits(self.n, self.k)

    @property
    def p2(self) -> int:
        return self.k * bits_per_symbol(self.m_order)

    @property
    def p(self) -> int:
        return self.p1 + self.p2


def classical_im_map(bits, spec: GroupSpec, groups: int) -> np.ndarray:
    """Map (p1 + p2) * groups bits onto an n * groups subcarrier frame."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    need = spec.p * groups
    if bits.size < need:
        raise ValueError(f"classical OFDM-IM needs {need} bits, got {bits.size}")
    table = psk_table(spec.m_order).lookup()
    m = bits_per_symbol(spec.m_order)
    chunks = bits[:need].reshape(groups, spec.p)
    frame = np.zeros((groups, spec.n), dtype=complex)
    for g, chunk in enumerate(chunks):
        rank = int(bits_to_labels(chunk[:spec.p1])) if spec.p1 else 0
        active = list(combination_unrank(rank, spec.n, spec.k))
        symbols = bits_to_labels(chunk[spec.p1:].reshape(spec.k, m))
        frame[g, active] = table[symbols]
    return frame.ravel()
