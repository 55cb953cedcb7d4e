"""Operating characteristics of a boundary: type I error and power.

An arm "accepts" when its counts satisfy ``n_T <= m_T`` and
``n_E >= m_E``. Arms are independent across doses, so under a null
configuration the rejection probability is ``1 - prod_j (1 - q_j)`` with
``q_j`` the arm acceptance probability. Generalized power multiplies
marginal failure probabilities over the not-admissible arms:

* kind I:  ``prod_futile Pr(n_E < m_E) * [1 - prod_adm (1 - q)] *
  prod_toxic Pr(n_T > m_T)``
* kind II: the admissible-arm bracket alone.

Global alpha maximises over every null configuration; global power
minimises over the least favorable set only, an exact reduction that
``verify_lfs_reduction`` checks numerically against the full alternative
space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .backend import substream
from .copula import cell_probabilities, joint_tail, joint_tail_grid, sample_arm_counts
from .hypotheses import (
    ADMISSIBLE,
    SAFE_FUTILE,
    TOXIC_EFFICACIOUS,
    DesignRates,
    HypothesisConfig,
    enumerate_alternative,
    enumerate_null,
    least_favorable_set,
)

DEFAULT_MC_REPLICATES = 100_000


@dataclass(frozen=True)
class Boundary:
    """Design triple: per-arm sample size with decision thresholds."""

    n: int
    m_t: int
    m_e: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"per-arm sample size must be >= 1, got {self.n}")
        if not (0 <= self.m_t <= self.n):
            raise ValueError(f"m_t must lie in [0, n]={self.n}, got {self.m_t}")
        if not (0 <= self.m_e <= self.n):
            raise ValueError(f"m_e must lie in [0, n]={self.n}, got {self.m_e}")


@dataclass(frozen=True)
class OCResult:
    """Evaluated operating characteristics of one boundary.

    ``per_null_alpha`` maps every null label to its type I error and
    ``per_lfs_power`` every least-favorable label to its power; the global
    values are the max/min of those maps. ``replicates`` is 0 in exact
    mode, and the ``*_se`` maps carry per-entry Monte Carlo standard
    errors otherwise.
    """

    per_null_alpha: dict[str, float]
    per_lfs_power: dict[str, float]
    power_kind: int
    mode: str = "exact"
    replicates: int = 0
    per_null_alpha_se: dict[str, float] = field(default_factory=dict)
    per_lfs_power_se: dict[str, float] = field(default_factory=dict)

    @property
    def global_alpha(self) -> float:
        return max(self.per_null_alpha.values())

    @property
    def global_power(self) -> float:
        return min(self.per_lfs_power.values())

    @property
    def global_alpha_se(self) -> float | None:
        if self.mode != "mc":
            return None
        label = max(self.per_null_alpha, key=self.per_null_alpha.get)
        return self.per_null_alpha_se[label]

    @property
    def global_power_se(self) -> float | None:
        if self.mode != "mc":
            return None
        label = min(self.per_lfs_power, key=self.per_lfs_power.get)
        return self.per_lfs_power_se[label]

    @property
    def mc_standard_error(self) -> float | None:
        if self.mode != "mc":
            return None
        return max(self.global_alpha_se, self.global_power_se)


def _check_kind(kind: int) -> None:
    if kind not in (1, 2):
        raise ValueError(f"power kind must be 1 or 2, got {kind}")


def arm_acceptance(pi_t: float, pi_e: float, rho: float, b: Boundary) -> float:
    """Exact Pr(n_T <= m_t, n_E >= m_e) for one arm with rates (pi_t, pi_e)."""
    return joint_tail(b.n, b.m_t, b.m_e, cell_probabilities(pi_t, pi_e, rho))


def type1_error(config: HypothesisConfig, rho: float, b: Boundary) -> float:
    """Probability of rejecting the null (any arm accepting) under ``config``."""
    if config.kind != "null":
        raise ValueError(f"type I error needs a null configuration, got {config.label}")
    no_accept = 1.0
    for pi_t, pi_e in config.doses:
        no_accept *= 1.0 - arm_acceptance(pi_t, pi_e, rho, b)
    return 1.0 - no_accept


def power(config: HypothesisConfig, rho: float, b: Boundary, kind: int) -> float:
    """Generalized power of the given kind under an alternative configuration."""
    _check_kind(kind)
    if config.kind not in ("alt", "lfs"):
        raise ValueError(f"power needs an alternative configuration, got {config.label}")
    if not config.admissible_doses:
        raise ValueError(f"{config.label} has no admissible dose")
    bracket_miss = 1.0
    outer = 1.0
    for (pi_t, pi_e), code in zip(config.doses, config.truth):
        if code == ADMISSIBLE:
            bracket_miss *= 1.0 - arm_acceptance(pi_t, pi_e, rho, b)
        elif code == SAFE_FUTILE:
            outer *= float(binom.cdf(b.m_e - 1, b.n, pi_e))
        elif code == TOXIC_EFFICACIOUS:
            outer *= float(binom.sf(b.m_t, b.n, pi_t))
        else:
            raise ValueError(f"{config.label} contains a toxic-futile dose")
    bracket = 1.0 - bracket_miss
    return bracket if kind == 2 else outer * bracket


def _mc_null_alpha(
    config: HypothesisConfig, rho: float, b: Boundary, replicates: int, seed: int, cfg_idx: int
) -> tuple[float, float]:
    any_accept = np.zeros(replicates, dtype=bool)
    for a, (pi_t, pi_e) in enumerate(config.doses):
        rng = substream(seed, 0, cfg_idx, a)
        nt, ne = sample_arm_counts(b.n, cell_probabilities(pi_t, pi_e, rho), replicates, rng)
        any_accept |= (nt <= b.m_t) & (ne >= b.m_e)
    est = float(any_accept.mean())
    return est, float(np.sqrt(est * (1.0 - est) / replicates))


def _mc_power(
    config: HypothesisConfig,
    rho: float,
    b: Boundary,
    kind: int,
    replicates: int,
    seed: int,
    cfg_idx: int,
    path: int = 1,
) -> tuple[float, float]:
    any_adm = np.zeros(replicates, dtype=bool)
    outer_ok = np.ones(replicates, dtype=bool)
    for a, ((pi_t, pi_e), code) in enumerate(zip(config.doses, config.truth)):
        rng = substream(seed, path, cfg_idx, a)
        nt, ne = sample_arm_counts(b.n, cell_probabilities(pi_t, pi_e, rho), replicates, rng)
        if code == ADMISSIBLE:
            any_adm |= (nt <= b.m_t) & (ne >= b.m_e)
        elif code == SAFE_FUTILE:
            outer_ok &= ne < b.m_e
        elif code == TOXIC_EFFICACIOUS:
            outer_ok &= nt > b.m_t
        else:
            raise ValueError(f"{config.label} contains a toxic-futile dose")
    success = any_adm if kind == 2 else (any_adm & outer_ok)
    est = float(success.mean())
    return est, float(np.sqrt(est * (1.0 - est) / replicates))


def global_oc(
    b: Boundary,
    J: int,
    rates: DesignRates,
    rho: float,
    kind: int,
    mode: str = "exact",
    replicates: int = DEFAULT_MC_REPLICATES,
    seed: int = 0,
) -> OCResult:
    """Global alpha over all nulls and global power over the LFS.

    ``mode="mc"`` replaces every probability by a Monte Carlo estimate
    from ``replicates`` trials per configuration, with an independent
    substream per (configuration, arm) derived from ``seed``.
    """
    _check_kind(kind)
    nulls = enumerate_null(J, rates)
    lfs = least_favorable_set(J, rates)
    if mode == "exact":
        alpha = {c.label: type1_error(c, rho, b) for c in nulls}
        pw = {c.label: power(c, rho, b, kind) for c in lfs}
        return OCResult(per_null_alpha=alpha, per_lfs_power=pw, power_kind=kind)
    if mode != "mc":
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    alpha: dict[str, float] = {}
    alpha_se: dict[str, float] = {}
    for i, c in enumerate(nulls):
        alpha[c.label], alpha_se[c.label] = _mc_null_alpha(c, rho, b, replicates, seed, i)
    pw: dict[str, float] = {}
    pw_se: dict[str, float] = {}
    for i, c in enumerate(lfs):
        pw[c.label], pw_se[c.label] = _mc_power(c, rho, b, kind, replicates, seed, i)
    return OCResult(
        per_null_alpha=alpha,
        per_lfs_power=pw,
        power_kind=kind,
        mode="mc",
        replicates=replicates,
        per_null_alpha_se=alpha_se,
        per_lfs_power_se=pw_se,
    )


def power_over_all_alternatives(
    b: Boundary, J: int, rates: DesignRates, rho: float, kind: int
) -> dict[str, float]:
    """Exact power for every alternative configuration (not just the LFS)."""
    return {c.label: power(c, rho, b, kind) for c in enumerate_alternative(J, rates)}


# ---------------------------------------------------------------------------
# Whole-grid evaluation: every (m_t, m_e) pair at a fixed n in one shot.
# ---------------------------------------------------------------------------


def _law_grids(n: int, rates: DesignRates, rho: float) -> dict[str, np.ndarray]:
    return {
        "sf": joint_tail_grid(n, cell_probabilities(rates.phi_t1, rates.phi_e0, rho)),
        "tf": joint_tail_grid(n, cell_probabilities(rates.phi_t0, rates.phi_e0, rho)),
        "te": joint_tail_grid(n, cell_probabilities(rates.phi_t0, rates.phi_e1, rho)),
        "adm": joint_tail_grid(n, cell_probabilities(rates.phi_t1, rates.phi_e1, rho)),
    }


def _marginal_vectors(n: int, rates: DesignRates) -> tuple[np.ndarray, np.ndarray]:
    me = np.arange(n + 1)
    fut = binom.cdf(me - 1, n, rates.phi_e0)  # Pr(n_E < m_e) for a futile arm
    mt = np.arange(n + 1)
    tox = binom.sf(mt, n, rates.phi_t0)  # Pr(n_T > m_t) for a toxic arm
    return fut, tox


def alpha_grids(
    n: int, J: int, rates: DesignRates, rho: float, laws: dict[str, np.ndarray] | None = None
) -> tuple[np.ndarray, list[tuple[tuple[int, int], np.ndarray]]]:
    """Type I error for every boundary at sample size n.

    Returns ``(max_grid, per_config)`` where each grid is indexed by
    ``[m_t, m_e]`` and ``per_config`` pairs each null index (s, k) with
    its own grid.
    """
    laws = laws or _law_grids(n, rates, rho)
    miss_sf = 1.0 - laws["sf"]
    miss_tf = 1.0 - laws["tf"]
    miss_te = 1.0 - laws["te"]
    per_config = []
    for s in range(J + 1):
        for k in range(s, J + 1):
            grid = 1.0 - miss_sf**s * miss_tf ** (k - s) * miss_te ** (J - k)
            per_config.append(((s, k), grid))
    max_grid = np.maximum.reduce([g for _, g in per_config])
    return max_grid, per_config


def power_grids(
    n: int,
    J: int,
    rates: DesignRates,
    rho: float,
    kind: int,
    laws: dict[str, np.ndarray] | None = None,
    marginals: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[np.ndarray, list[tuple[int, np.ndarray]]]:
    """Least-favorable power for every boundary at sample size n.

    Returns ``(min_grid, per_config)`` with one grid per LFS index j.
    ``marginals`` overrides the futile/toxic marginal tail vectors
    (used by the Monte Carlo search path).
    """
    _check_kind(kind)
    laws = laws or _law_grids(n, rates, rho)
    q_adm = laws["adm"]
    per_config = []
    if kind == 2:
        per_config = [(j, q_adm) for j in range(1, J + 1)]
        return q_adm, per_config
    fut, tox = marginals if marginals is not None else _marginal_vectors(n, rates)
    for j in range(1, J + 1):
        grid = (tox[:, None] ** (J - j)) * (fut[None, :] ** (j - 1)) * q_adm
        per_config.append((j, grid))
    min_grid = np.minimum.reduce([g for _, g in per_config])
    return min_grid, per_config


def alternative_power_grid(
    n: int,
    J: int,
    rates: DesignRates,
    rho: float,
    kind: int,
    u: int,
    v: int,
    laws: dict[str, np.ndarray] | None = None,
    marginals: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """Power grid of one alternative configuration H1(u, v)."""
    _check_kind(kind)
    laws = laws or _law_grids(n, rates, rho)
    bracket = 1.0 - (1.0 - laws["adm"]) ** (v - u)
    if kind == 2:
        return bracket
    fut, tox = marginals if marginals is not None else _marginal_vectors(n, rates)
    return (tox[:, None] ** (J - v)) * (fut[None, :] ** u) * bracket


# ---------------------------------------------------------------------------
# Numerical check that the least favorable set attains the global minimum.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LfsCheckRow:
    boundary: Boundary
    kind: int
    u: int
    v: int
    power_uv: float
    lfs_min: float
    violated: bool


@dataclass(frozen=True)
class LfsCheckReport:
    rows: tuple[LfsCheckRow, ...]

    @property
    def violations(self) -> tuple[LfsCheckRow, ...]:
        return tuple(r for r in self.rows if r.violated)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_lfs_reduction(
    J: int,
    rates: DesignRates,
    rho: float,
    boundaries: list[Boundary],
    kinds: tuple[int, ...] = (1, 2),
    tol: float = 1e-12,
) -> LfsCheckReport:
    """Check min over LFS <= power(u, v) for every alternative and boundary.

    Every comparison appears as a row; a violation means the inequality
    failed by more than ``tol`` (slack for float roundoff).
    """
    by_n: dict[int, list[Boundary]] = {}
    for b in boundaries:
        by_n.setdefault(b.n, []).append(b)
    alt_indices = [(u, v) for u in range(J) for v in range(u + 1, J + 1)]
    rows: list[LfsCheckRow] = []
    for n, group in sorted(by_n.items()):
        laws = _law_grids(n, rates, rho)
        for kind in kinds:
            min_grid, _ = power_grids(n, J, rates, rho, kind, laws=laws)
            for u, v in alt_indices:
                uv_grid = alternative_power_grid(n, J, rates, rho, kind, u, v, laws=laws)
                for b in group:
                    lfs_min = float(min_grid[b.m_t, b.m_e])
                    power_uv = float(uv_grid[b.m_t, b.m_e])
                    rows.append(
                        LfsCheckRow(
                            boundary=b,
                            kind=kind,
                            u=u,
                            v=v,
                            power_uv=power_uv,
                            lfs_min=lfs_min,
                            violated=lfs_min > power_uv + tol,
                        )
                    )
    return LfsCheckReport(rows=tuple(rows))


def full_boundary_grid(n: int) -> list[Boundary]:
    """All (n+1)^2 boundaries at sample size n."""
    return [Boundary(n, mt, me) for mt in range(n + 1) for me in range(n + 1)]
