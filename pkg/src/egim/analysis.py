"""Closed-form Rayleigh SER and spectral-efficiency formulas for EGIM.

Every closed form has a quadrature counterpart that averages the
conditional AWGN error probability over the exponential SNR density; the
two are kept deliberately independent so one checks the other.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate
from scipy.special import erfc

from .mapping import bits_per_symbol, index_bits


def _gamma(snr) -> np.ndarray:
    g = np.asarray(snr, dtype=float)
    if np.any(g < 0):
        raise ValueError("average SNR must be non-negative")
    return g


def db_to_linear(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def p_ook(snr):
    """Off/on decision error at half the average SNR per subcarrier."""
    g = _gamma(snr)
    return 0.5 * (1 - np.sqrt(0.5 * g / (1 + 0.5 * g)))


def p_qam4_rayleigh(snr):
    """QPSK symbol error over Rayleigh fading.

    3/4 - mu + (mu / pi) * arctan(1 / mu) with mu = sqrt(g / (2 + g)).
    """
    g = _gamma(snr)
    mu = np.sqrt(g / (2 + g))
    # arctan(1/mu) written as pi/2 - arctan(mu) so mu = 0 stays finite
    return 0.75 - mu + mu / np.pi * (np.pi / 2 - np.arctan(mu))


def p_mpsk_rayleigh(snr, m_order: int):
    if m_order < 2:
        raise ValueError(f"M-PSK needs M >= 2, got {m_order}")
    bits_per_symbol(m_order)
    g = _gamma(snr)
    s2 = np.sin(np.pi / m_order) ** 2
    mu = np.sqrt(g * s2 / (1 + g * s2))
    cot = np.cos(np.pi / m_order) / np.sin(np.pi / m_order)
    return (m_order - 1) / m_order - mu / np.pi * (np.pi / 2 + np.arctan(mu * cot))


def ser_egim_4qam(snr):
    return 0.5 * p_ook(snr) + 0.5 * p_qam4_rayleigh(snr)


def ser_egim_8psk(snr):
    return 0.5 * p_ook(snr) + 0.5 * p_mpsk_rayleigh(snr, 8)


THEORY = {
    "egim4qam": ser_egim_4qam,
    "egim8psk": ser_egim_8psk,
}


def se_classical(n: int, k: int, m_order: int) -> float:
    return (index_bits(n, k) + k * bits_per_symbol(m_order)) / n


def se_egim(m_order: int) -> float:
    return 1 + 0.5 * bits_per_symbol(m_order)


# --- quadrature oracle -------------------------------------------------------

def _q(x):
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2))


def conditional_ook(gamma):
    return _q(np.sqrt(gamma))


def conditional_qpsk(gamma):
    q = _q(np.sqrt(gamma))
    return 2 * q - q * q


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(400)


def conditional_mpsk(gamma, m_order: int):
    """Craig's integral for M-PSK in AWGN, evaluated by Gauss-Legendre."""
    upper = (m_order - 1) * np.pi / m_order
    theta = 0.5 * upper * (_GL_NODES + 1)
    s2 = np.sin(np.pi / m_order) ** 2
    vals = np.exp(-np.multiply.outer(np.asarray(gamma, dtype=float), s2 / np.sin(theta) ** 2))
    return 0.5 * upper * (vals @ _GL_WEIGHTS) / np.pi


def rayleigh_average(conditional, snr: float, tol: float = 1e-9) -> float:
    """Average conditional(gamma) over gamma ~ Exp(mean = snr)."""
    if snr == 0:
        return float(conditional(0.0))
    upper = 40.0 * snr
    # Most of the mass of P(e | gamma) sits at small gamma; split there.
    edges = sorted({0.0, *[e for e in (1.0, 10.0, 100.0, snr, 10 * snr) if e < upper], upper})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda x: float(conditional(x)) * np.exp(-x / snr) / snr, a, b,
                                epsabs=tol, epsrel=tol, limit=200)
        total += val
    return total


def oracle(name: str, snr: float, m_order: int | None = None) -> float:
    if name == "ook":
        return rayleigh_average(conditional_ook, snr)
    if name == "qam4":
        return rayleigh_average(conditional_qpsk, snr)
    if name == "mpsk":
        return rayleigh_average(lambda g: conditional_mpsk(g, m_order), snr)
    raise ValueError(f"unknown oracle {name!r}")


def theory_curve(scheme: str, snr_db) -> list[tuple[float, float]]:
    if scheme not in THEORY:
        raise ValueError(f"no closed-form SER for scheme {scheme!r}")
    snr_db = np.atleast_1d(np.asarray(snr_db, dtype=float))
    ser = THEORY[scheme](db_to_linear(snr_db))
    return list(zip(snr_db.tolist(), np.atleast_1d(ser).tolist()))
