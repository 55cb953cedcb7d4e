"""Per-arm joint law of correlated binary toxicity/efficacy outcomes.

A patient on one dose arm yields a pair ``(Y_T, Y_E)`` of binary events
whose marginals are the arm's toxicity and efficacy rates and whose
dependence comes from a Gaussian copula with latent correlation ``rho``:
``p11 = Phi2(Phi^-1(phi_T), Phi^-1(phi_E); rho)`` and the remaining cells
by marginal subtraction. Everything downstream (exact tail probabilities,
samplers) lives on top of the four cell probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr, ndtri
from scipy.stats import binom

from . import _kernels

_SUM_TOL = 1e-12
_MARGIN_TOL = 1e-10


@dataclass(frozen=True)
class CellProbs:
    """Joint probabilities of the four per-patient outcomes.

    ``p_te`` is the probability of toxicity indicator ``t`` and efficacy
    indicator ``e``. Cells are nonnegative, sum to one, and reproduce the
    marginals ``phi_T = p11 + p10`` and ``phi_E = p11 + p01``.
    """

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self) -> None:
        cells = (self.p00, self.p01, self.p10, self.p11)
        if any(c < 0.0 for c in cells):
            raise ValueError(f"negative cell probability in {cells}")
        if abs(sum(cells) - 1.0) > _SUM_TOL:
            raise ValueError(f"cell probabilities sum to {sum(cells)!r}, not 1")

    @property
    def phi_t(self) -> float:
        return self.p11 + self.p10

    @property
    def phi_e(self) -> float:
        return self.p11 + self.p01

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)


def _check_rho(rho: float) -> None:
    if not (-1.0 < rho < 1.0) or not math.isfinite(rho):
        raise ValueError(f"correlation must lie strictly inside (-1, 1), got {rho}")


def bivariate_normal_cdf(h: float, k: float, rho: float) -> float:
    """Pr(X <= h, Y <= k) for standard bivariate normal with correlation rho.

    Evaluated by adaptive quadrature of the identity
    ``Phi2(h, k; rho) = Phi(h) Phi(k) + int_0^rho phi2(h, k; r) dr``
    where ``phi2`` is the bivariate normal density at ``(h, k)``; absolute
    error is well below 1e-10 over the open correlation range.
    """
    _check_rho(rho)
    if not (math.isfinite(h) and math.isfinite(k)):
        raise ValueError("bounds h, k must be finite")
    base = float(ndtr(h)) * float(ndtr(k))
    if rho == 0.0:
        return base

    def density(r: float) -> float:
        om = 1.0 - r * r
        return math.exp(-(h * h - 2.0 * r * h * k + k * k) / (2.0 * om)) / (
            2.0 * math.pi * math.sqrt(om)
        )

    corr, _ = quad(density, 0.0, rho, epsabs=1e-13, epsrel=1e-13, limit=200)
    return min(1.0, max(0.0, base + corr))


@lru_cache(maxsize=4096)
def cell_probabilities(phi_t: float, phi_e: float, rho: float) -> CellProbs:
    """Gaussian-copula cell probabilities for marginal rates (phi_t, phi_e)."""
    if not (0.0 < phi_t < 1.0 and 0.0 < phi_e < 1.0):
        raise ValueError(
            f"degenerate marginal: rates must lie strictly inside (0, 1), got ({phi_t}, {phi_e})"
        )
    _check_rho(rho)
    p11 = bivariate_normal_cdf(float(ndtri(phi_t)), float(ndtri(phi_e)), rho)
    # Clamp to the Frechet-Hoeffding envelope so subtraction cells stay >= 0.
    p11 = min(min(phi_t, phi_e), max(p11, max(0.0, phi_t + phi_e - 1.0)))
    p10 = phi_t - p11
    p01 = phi_e - p11
    p00 = max(0.0, 1.0 - phi_t - phi_e + p11)
    return CellProbs(p00=p00, p01=p01, p10=p10, p11=p11)


@dataclass(frozen=True)
class ArmLaw:
    """One arm's marginal rates, latent correlation, and implied cells."""

    phi_t: float
    phi_e: float
    rho: float
    cells: CellProbs

    @classmethod
    def from_rates(cls, phi_t: float, phi_e: float, rho: float) -> "ArmLaw":
        return cls(phi_t=phi_t, phi_e=phi_e, rho=rho, cells=cell_probabilities(phi_t, phi_e, rho))


@lru_cache(maxsize=2048)
def _tail_grid_cached(n: int, cells_key: tuple[float, float, float, float]) -> np.ndarray:
    p00, p01, p10, p11 = cells_key
    pmf = _kernels.joint_pmf(n, p00, p01, p10, p11)
    # T[mt, me] = Pr(n_T <= mt, n_E >= me): prefix-sum over t, suffix over e.
    acc = np.cumsum(pmf, axis=0)
    acc = np.flip(np.cumsum(np.flip(acc, axis=1), axis=1), axis=1)
    acc.setflags(write=False)
    return acc


def joint_tail_grid(n: int, cells: CellProbs) -> np.ndarray:
    """All acceptance probabilities Pr(n_T <= m_T, n_E >= m_E) at once.

    Returns a read-only ``(n+1, n+1)`` array indexed by ``[m_T, m_E]``;
    computed once per (n, cells) and cached.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return _tail_grid_cached(int(n), cells.as_tuple())


def joint_tail(n: int, m_t: int, m_e: int, cells: CellProbs) -> float:
    """Exact Pr(n_T <= m_t and n_E >= m_e) for n iid patients."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not (0 <= m_t <= n and 0 <= m_e <= n):
        raise ValueError(f"thresholds must lie in [0, n]={n}, got m_t={m_t}, m_e={m_e}")
    return float(joint_tail_grid(n, cells)[m_t, m_e])


def marginal_tails(n: int, threshold: int, p: float, side: str) -> float:
    """Exact binomial tail: Pr(X <= threshold) or Pr(X >= threshold)."""
    if not (0 <= threshold <= n):
        raise ValueError(f"threshold must lie in [0, n]={n}, got {threshold}")
    if side == "lower":
        return float(binom.cdf(threshold, n, p))
    if side == "upper":
        return float(binom.sf(threshold - 1, n, p))
    raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")


def sample_arm(n: int, cells: CellProbs, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one arm's (n_T, n_E) as sums of n iid four-cell outcomes."""
    if n == 0:
        return (0, 0)
    counts = rng.multinomial(n, cells.as_tuple())
    return (int(counts[2] + counts[3]), int(counts[1] + counts[3]))


def sample_arm_counts(
    n: int, cells: CellProbs, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised sampler: arrays of n_T and n_E over ``size`` replicates."""
    if n == 0:
        zero = np.zeros(size, dtype=np.int64)
        return zero, zero.copy()
    counts = rng.multinomial(n, cells.as_tuple(), size=size)
    return counts[:, 2] + counts[:, 3], counts[:, 1] + counts[:, 3]
