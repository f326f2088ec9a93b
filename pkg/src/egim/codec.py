"""Convolutional OFDM-IM autoencoder, rate-1/2 benchmark code, Viterbi decoding.

Tap convention: a polynomial term x^i taps the input delayed by i samples
(x^0 is the current bit). Encoder state packs the register as
``(m[t-1] << 2) | (m[t-2] << 1) | m[t-3]``.

The autoencoder's first output is the linear g1 parity. Outputs two and
three are parities over the h2 and h3 tap sets, each ANDed with output one,
so a zero first output always yields the off codeword 000.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mapping import EGIM_4QAM, QPSK, ConstellationTable, bits_per_symbol

MEMORY = 3
TRACEBACK = 12


def _taps(poly_degrees) -> tuple[int, ...]:
    coeffs = [0] * (MEMORY + 1)
    for d in poly_degrees:
        coeffs[d] = 1
    return tuple(coeffs)


def _parity(taps, bit, state) -> int:
    register = (bit, (state >> 2) & 1, (state >> 1) & 1, state & 1)
    return sum(t & r for t, r in zip(taps, register)) & 1


@dataclass(frozen=True)
class GeneratorSet:
    g1: tuple[int, ...] = _taps([3, 2, 1, 0])
    h2: tuple[int, ...] = _taps([3, 2, 1])
    h3: tuple[int, ...] = _taps([3, 1, 0])

    def step(self, state: int, bit: int) -> tuple[int, ...]:
        o1 = _parity(self.g1, bit, state)
        return (o1, _parity(self.h2, bit, state) & o1, _parity(self.h3, bit, state) & o1)


def octal_taps(octal: int) -> tuple[int, ...]:
    """(15)_8 -> taps on delays (0, 1, 3); the MSB taps the current bit."""
    return tuple((octal >> (MEMORY - d)) & 1 for d in range(MEMORY + 1))


@dataclass(frozen=True)
class LinearGenerators:
    polys: tuple[int, ...] = (0o15, 0o17)

    def step(self, state: int, bit: int) -> tuple[int, ...]:
        return tuple(_parity(octal_taps(p), bit, state) for p in self.polys)


@dataclass(frozen=True)
class Trellis:
    """Branch table indexed by (state, input bit)."""

    next_state: np.ndarray
    outputs: np.ndarray

    @property
    def n_states(self) -> int:
        return self.next_state.shape[0]

    @property
    def width(self) -> int:
        return self.outputs.shape[-1]

    def branches(self):
        for s in range(self.n_states):
            for u in (0, 1):
                yield s, u, int(self.next_state[s, u]), tuple(int(b) for b in self.outputs[s, u])

    def predecessors(self) -> tuple[np.ndarray, np.ndarray]:
        """(prev_state, input) per next state, two entries each, ascending prev_state."""
        prev = [[] for _ in range(self.n_states)]
        for s, u, ns, _ in self.branches():
            prev[ns].append((s, u))
        prev = [sorted(p) for p in prev]
        if any(len(p) != 2 for p in prev):
            raise ValueError("Viterbi expects exactly two branches into every state")
        arr = np.array(prev, dtype=np.int64)
        return arr[..., 0], arr[..., 1]


def build_trellis(gen: GeneratorSet | LinearGenerators | Callable = GeneratorSet()) -> Trellis:
    step = gen.step if hasattr(gen, "step") else gen
    n_states = 1 << MEMORY
    next_state = np.zeros((n_states, 2), dtype=np.int64)
    outputs = []
    for s in range(n_states):
        row = []
        for u in (0, 1):
            next_state[s, u] = (u << (MEMORY - 1)) | (s >> 1)
            row.append(step(s, u))
        outputs.append(row)
    return Trellis(next_state, np.array(outputs, dtype=np.uint8))


AUTOENCODER = build_trellis(GeneratorSet())
BENCHMARK = build_trellis(LinearGenerators())


class ConvEncoder:
    """Streaming encoder; keep one instance per stream."""

    def __init__(self, trellis: Trellis = AUTOENCODER):
        self.trellis = trellis
        self.state = 0

    def reset(self):
        self.state = 0

    def push(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64).ravel()
        out = np.empty((bits.size, self.trellis.width), dtype=np.uint8)
        for t, u in enumerate(bits):
            out[t] = self.trellis.outputs[self.state, u]
            self.state = int(self.trellis.next_state[self.state, u])
        return out

    def flush(self) -> np.ndarray:
        return self.push(np.zeros(MEMORY, dtype=np.int64))


def encode(bits, trellis: Trellis = AUTOENCODER, terminate: bool = True) -> np.ndarray:
    """Encode from the zero state. Bits (..., T) -> codewords (..., T [+3], width).

    Leading axes are independent streams.
    """
    bits = np.asarray(bits, dtype=np.int64)
    if terminate:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (MEMORY,), dtype=np.int64)], axis=-1)
    flat = bits.reshape(-1, bits.shape[-1])
    state = np.zeros(flat.shape[0], dtype=np.int64)
    out = np.empty(flat.shape + (trellis.width,), dtype=np.uint8)
    for t in range(flat.shape[1]):
        u = flat[:, t]
        out[:, t] = trellis.outputs[state, u]
        state = trellis.next_state[state, u]
    return out.reshape(bits.shape + (trellis.width,))


def _viterbi(costs: np.ndarray, trellis: Trellis, tb: int, terminated: bool) -> np.ndarray:
    """ACS over branch costs (B, T, S, 2) with a decision delay of ``tb``.

    Survivors are kept as register-exchange paths of the last tb + 1 input
    bits, which gives the same decisions as tracing back tb steps from the
    best state at every time step.
    """
    if tb < 1:
        raise ValueError("traceback length must be >= 1")
    n_batch, n_steps, n_states, _ = costs.shape
    prev_state, prev_input = trellis.predecessors()
    rows = np.arange(n_batch)[:, None]
    cols = np.arange(n_states)

    pm = np.full((n_batch, n_states), np.inf)
    pm[:, 0] = 0.0
    paths = np.zeros((n_batch, n_states, tb + 1), dtype=np.uint8)
    decoded = np.zeros((n_batch, n_steps), dtype=np.uint8)

    for t in range(n_steps):
        # cand[b, ns, j]: metric arriving at ns via its j-th predecessor
        cand = pm[:, prev_state] + costs[:, t][:, prev_state, prev_input]
        # argmin keeps j = 0 (older input bit 0) on ties
        choice = np.argmin(cand, axis=-1)
        pm = np.take_along_axis(cand, choice[..., None], axis=-1)[..., 0]
        pm -= pm.min(axis=1, keepdims=True)
        paths[:, :, :-1] = paths[rows, prev_state[cols, choice], 1:]
        paths[:, :, -1] = prev_input[cols, choice]
        if t >= tb:
            best = np.argmin(pm, axis=1)
            decoded[:, t - tb] = paths[rows[:, 0], best, 0]

    final = np.zeros(n_batch, dtype=np.int64) if terminated else np.argmin(pm, axis=1)
    tail = min(n_steps, tb)
    if tail:
        decoded[:, n_steps - tail:] = paths[rows[:, 0], final, tb + 1 - tail:]
    if terminated:
        decoded = decoded[:, :n_steps - MEMORY]
    return decoded


def _batched(x: np.ndarray) -> tuple[np.ndarray, tuple]:
    lead = x.shape[:-2]
    return x.reshape((-1,) + x.shape[-2:]), lead


def viterbi_hard(received, trellis: Trellis = AUTOENCODER, tb: int = TRACEBACK,
                 terminated: bool = True) -> np.ndarray:
    """Minimum-Hamming-distance decoding. Codeword bits (..., T, width) -> bits (..., T')."""
    r = np.asarray(received, dtype=np.int64)
    flat, lead = _batched(r)
    out = trellis.outputs.astype(np.int64)
    costs = np.abs(flat[:, :, None, None, :] - out).sum(axis=-1).astype(float)
    return _viterbi(costs, trellis, tb, terminated).reshape(lead + (-1,))


def viterbi_soft(llrs, trellis: Trellis = AUTOENCODER, tb: int = TRACEBACK,
                 terminated: bool = True) -> np.ndarray:
    """LLR-correlation decoding: a branch costs the sum of LLRs of its 1-bits.

    This differs from -sum((1 - 2b) L) / 2 by a per-step constant, so path
    ordering equals the bipolar correlation metric.
    """
    llrs = np.asarray(llrs, dtype=float)
    if not np.all(np.isfinite(llrs)):
        raise ValueError("LLRs must be finite")
    flat, lead = _batched(llrs)
    out = trellis.outputs.astype(float)
    costs = (flat[:, :, None, None, :] * out).sum(axis=-1)
    return _viterbi(costs, trellis, tb, terminated).reshape(lead + (-1,))


def effective_symbol_rate(code_rate: float, m_order: int) -> float:
    return code_rate * bits_per_symbol(m_order)

@dataclass(frozen=True)
class CodedScheme:
    """A trellis code paired with the constellation its codewords ride on."""

    name: str
    trellis: Trellis
    table: ConstellationTable

    def modulate(self, bits, terminate: bool = True) -> np.ndarray:
        from .mapping import map_codewords

        return map_codewords(encode(bits, self.trellis, terminate), self.table)


AUTOENCODER_SCHEME = CodedScheme("autoencoder", AUTOENCODER, EGIM_4QAM)
BENCHMARK_SCHEME = CodedScheme("benchmark-codec", BENCHMARK, QPSK)


def benchmark_encode(bits, terminate: bool = True) -> np.ndarray:
    """Rate-1/2 (15, 17)_8 code: bits -> coded bit pairs (T [+3], 2)."""
    return encode(bits, BENCHMARK, terminate)


def benchmark_decode(received, soft: bool = False, tb: int = TRACEBACK,
                     terminated: bool = True) -> np.ndarray:
    decoder = viterbi_soft if soft else viterbi_hard
    return decoder(received, BENCHMARK, tb, terminated)


def free_distance(trellis: Trellis = AUTOENCODER, pairwise: bool = False) -> int:
    """Minimum output Hamming distance of a detour that leaves and re-merges.

    By default detours are measured against the all-zero path. With
    ``pairwise`` every pair of paths splitting from a common state is
    searched, which is the relevant figure for a nonlinear code.
    """
    outputs = trellis.outputs.astype(np.int64)
    ns = trellis.next_state

    def dist(a, ua, b, ub):
        return int(np.abs(outputs[a, ua] - outputs[b, ub]).sum())

    heap = []
    starts = range(trellis.n_states) if pairwise else [0]
    for s in starts:
        heapq.heappush(heap, (dist(s, 0, s, 1), int(ns[s, 0]), int(ns[s, 1])))
    seen = set()
    while heap:
        d, a, b = heapq.heappop(heap)
        if a == b:
            return d
        if (a, b) in seen:
            continue
        seen.add((a, b))
        # Against the zero path the reference stays on state 0 with input 0.
        ref_inputs = (0, 1) if pairwise else (0,)
        for ua in ref_inputs:
            for ub in (0, 1):
                heapq.heappush(heap, (d + dist(a, ua, b, ub), int(ns[a, ua]), int(ns[b, ub])))
    raise RuntimeError("no re-merging detour found")
