"""Search for the minimal sample size meeting alpha and power targets.

For each candidate n the whole (m_T, m_E) grid is evaluated at once
(every boundary's global alpha and least-favorable power), and the search
returns the smallest n with a nonempty feasible set. Ties among feasible
boundaries at that n break deterministically: maximal global power, then
minimal global alpha, then minimal m_E, then minimal m_T.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .backend import substream, thread_cap
from .copula import cell_probabilities, sample_arm_counts
from .hypotheses import DesignRates
from .oc import (
    DEFAULT_MC_REPLICATES,
    Boundary,
    OCResult,
    alpha_grids,
    global_oc,
    power_grids,
    _law_grids,
)
from .reference import (
    REFERENCE_ALPHAS,
    REFERENCE_BETAS,
    REFERENCE_EFF_PAIRS,
    REFERENCE_TOX_RATES,
    published_design,
)


@dataclass(frozen=True)
class DesignSpec:
    """Inputs of a design search: rates, dose count, targets, evaluation mode."""

    rates: DesignRates
    n_doses: int
    alpha_star: float
    beta_star: float
    power_kind: int
    rho: float = 0.5
    n_max: int = 100
    mode: str = "exact"
    replicates: int = DEFAULT_MC_REPLICATES
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_doses < 1:
            raise ValueError(f"n_doses must be >= 1, got {self.n_doses}")
        if not (0.0 < self.alpha_star < 1.0):
            raise ValueError(f"alpha_star must lie strictly inside (0, 1), got {self.alpha_star}")
        if not (0.0 < self.beta_star < 1.0):
            raise ValueError(f"beta_star must lie strictly inside (0, 1), got {self.beta_star}")
        if self.power_kind not in (1, 2):
            raise ValueError(f"power_kind must be 1 or 2, got {self.power_kind}")
        if not (-1.0 < self.rho < 1.0):
            raise ValueError(f"rho must lie strictly inside (-1, 1), got {self.rho}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.mode not in ("exact", "mc"):
            raise ValueError(f"mode must be 'exact' or 'mc', got {self.mode!r}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")


@dataclass(frozen=True)
class EvaluatedBoundary:
    boundary: Boundary
    oc: OCResult


@dataclass(frozen=True)
class DesignResult:
    """Outcome of a search: chosen boundary with its OC and alternatives.

    When ``feasible`` is false no n <= n_max met both constraints and
    ``boundary``/``oc`` describe the best near-miss (the boundary with the
    smallest total constraint violation, at the smallest such n).
    """

    spec: DesignSpec
    boundary: Boundary
    oc: OCResult
    feasible: bool
    alternatives_at_n: tuple[Boundary, ...]


def _empirical_tail_grid(n: int, nt: np.ndarray, ne: np.ndarray) -> np.ndarray:
    codes = nt.astype(np.int64) * (n + 1) + ne.astype(np.int64)
    pmf = np.bincount(codes, minlength=(n + 1) * (n + 1)).reshape(n + 1, n + 1)
    pmf = pmf / len(nt)
    acc = np.cumsum(pmf, axis=0)
    return np.flip(np.cumsum(np.flip(acc, axis=1), axis=1), axis=1)


def _mc_grids(n: int, spec: DesignSpec):
    """Empirical acceptance grids and marginal vectors from simulated counts.

    One batch of replicates per distinct arm law; every boundary is then
    scored against the same draws (common random numbers across the grid).
    """
    r = spec.rates
    law_rates = {
        "sf": (r.phi_t1, r.phi_e0),
        "tf": (r.phi_t0, r.phi_e0),
        "te": (r.phi_t0, r.phi_e1),
        "adm": (r.phi_t1, r.phi_e1),
    }
    laws = {}
    draws = {}
    for idx, (key, (pt, pe)) in enumerate(law_rates.items()):
        rng = substream(spec.seed, 3, n, idx)
        nt, ne = sample_arm_counts(n, cell_probabilities(pt, pe, spec.rho), spec.replicates, rng)
        draws[key] = (nt, ne)
        laws[key] = _empirical_tail_grid(n, nt, ne)
    thresholds = np.arange(n + 1)
    fut = np.searchsorted(np.sort(draws["sf"][1]), thresholds, side="left") / spec.replicates
    tox = 1.0 - np.searchsorted(np.sort(draws["te"][0]), thresholds, side="right") / spec.replicates
    return laws, (fut, tox)


def _grids_at_n(n: int, spec: DesignSpec):
    if spec.mode == "exact":
        laws = _law_grids(n, spec.rates, spec.rho)
        marginals = None
    else:
        laws, marginals = _mc_grids(n, spec)
    alpha_max, alpha_cfgs = alpha_grids(n, spec.n_doses, spec.rates, spec.rho, laws=laws)
    beta_min, beta_cfgs = power_grids(
        n, spec.n_doses, spec.rates, spec.rho, spec.power_kind, laws=laws, marginals=marginals
    )
    return alpha_max, alpha_cfgs, beta_min, beta_cfgs


def _oc_at(spec: DesignSpec, b: Boundary, alpha_cfgs, beta_cfgs) -> OCResult:
    per_null = {
        "H0({},{})".format(*idx): float(g[b.m_t, b.m_e]) for idx, g in alpha_cfgs
    }
    per_lfs = {f"LFS({j})": float(g[b.m_t, b.m_e]) for j, g in beta_cfgs}
    if spec.mode == "exact":
        return OCResult(per_null_alpha=per_null, per_lfs_power=per_lfs, power_kind=spec.power_kind)
    reps = spec.replicates
    return OCResult(
        per_null_alpha=per_null,
        per_lfs_power=per_lfs,
        power_kind=spec.power_kind,
        mode="mc",
        replicates=reps,
        per_null_alpha_se={k: float(np.sqrt(v * (1 - v) / reps)) for k, v in per_null.items()},
        per_lfs_power_se={k: float(np.sqrt(v * (1 - v) / reps)) for k, v in per_lfs.items()},
    )


def _selection_key(alpha_max, beta_min, mt, me):
    # max power, then min alpha, then min m_E, then min m_T
    return (-beta_min[mt, me], alpha_max[mt, me], me, mt)


def feasible_boundaries(n: int, spec: DesignSpec) -> list[EvaluatedBoundary]:
    """All boundaries at sample size n meeting both OC constraints."""
    if n > spec.n_max:
        raise ValueError(f"n={n} exceeds n_max={spec.n_max}")
    alpha_max, alpha_cfgs, beta_min, beta_cfgs = _grids_at_n(n, spec)
    mask = (alpha_max <= spec.alpha_star) & (beta_min >= spec.beta_star)
    out = []
    for mt, me in np.argwhere(mask):
        b = Boundary(n, int(mt), int(me))
        out.append(EvaluatedBoundary(boundary=b, oc=_oc_at(spec, b, alpha_cfgs, beta_cfgs)))
    return out


def find_optimal_design(spec: DesignSpec) -> DesignResult:
    """Smallest n (and boundary) with global alpha <= alpha* and power >= beta*."""
    best_miss = None  # (violation, n, key, boundary, oc)
    for n in range(1, spec.n_max + 1):
        alpha_max, alpha_cfgs, beta_min, beta_cfgs = _grids_at_n(n, spec)
        mask = (alpha_max <= spec.alpha_star) & (beta_min >= spec.beta_star)
        if mask.any():
            pairs = [(int(mt), int(me)) for mt, me in np.argwhere(mask)]
            mt, me = min(pairs, key=lambda p: _selection_key(alpha_max, beta_min, *p))
            chosen = Boundary(n, mt, me)
            return DesignResult(
                spec=spec,
                boundary=chosen,
                oc=_oc_at(spec, chosen, alpha_cfgs, beta_cfgs),
                feasible=True,
                alternatives_at_n=tuple(Boundary(n, mt, me) for mt, me in pairs),
            )
        violation = np.maximum(alpha_max - spec.alpha_star, 0.0) + np.maximum(
            spec.beta_star - beta_min, 0.0
        )
        mt, me = np.unravel_index(int(np.argmin(violation)), violation.shape)
        vio = float(violation[mt, me])
        if best_miss is None or vio < best_miss[0] - 1e-15:
            b = Boundary(n, int(mt), int(me))
            best_miss = (vio, n, b, _oc_at(spec, b, alpha_cfgs, beta_cfgs))
    _, _, b, oc = best_miss
    return DesignResult(spec=spec, boundary=b, oc=oc, feasible=False, alternatives_at_n=())


def sample_size_curve(
    spec: DesignSpec, alpha_grid: list[float]
) -> list[tuple[float, int | None]]:
    """Minimal n per target alpha at fixed power (None when infeasible)."""
    if not alpha_grid:
        raise ValueError("alpha_grid must be nonempty")
    out = []
    for alpha_star in alpha_grid:
        res = find_optimal_design(dataclasses.replace(spec, alpha_star=alpha_star))
        out.append((alpha_star, res.boundary.n if res.feasible else None))
    return out


@dataclass(frozen=True)
class ReferenceRow:
    """One cell of the published-grid reproduction."""

    rates: DesignRates
    n_doses: int
    power_kind: int
    alpha_star: float
    beta_star: float
    published: Boundary
    computed: Boundary | None
    alpha: float | None
    beta: float | None

    @property
    def n_deviation(self) -> int | None:
        if self.computed is None:
            return None
        return self.computed.n - self.published.n

    @property
    def exact_match(self) -> bool:
        return self.computed == self.published

    @property
    def within_one(self) -> bool:
        return self.computed is not None and abs(self.n_deviation) <= 1

    @property
    def revalidates(self) -> bool:
        return (
            self.computed is not None
            and self.alpha <= self.alpha_star
            and self.beta >= self.beta_star
        )


@dataclass(frozen=True)
class ReferenceReport:
    rows: tuple[ReferenceRow, ...]

    @property
    def exact_match_rate(self) -> float:
        return sum(r.exact_match for r in self.rows) / len(self.rows)

    @property
    def all_within_one(self) -> bool:
        return all(r.within_one for r in self.rows)

    @property
    def all_revalidate(self) -> bool:
        return all(r.revalidates for r in self.rows)


def _reference_cell(args) -> ReferenceRow:
    rates, J, kind, alpha_star, beta_star, rho, n_max = args
    spec = DesignSpec(
        rates=rates,
        n_doses=J,
        alpha_star=alpha_star,
        beta_star=beta_star,
        power_kind=kind,
        rho=rho,
        n_max=n_max,
    )
    res = find_optimal_design(spec)
    published = published_design(rates.phi_e0, rates.phi_e1, J, kind, alpha_star, beta_star)
    if not res.feasible:
        return ReferenceRow(rates, J, kind, alpha_star, beta_star, published, None, None, None)
    oc = global_oc(res.boundary, J, rates, rho, kind)
    return ReferenceRow(
        rates=rates,
        n_doses=J,
        power_kind=kind,
        alpha_star=alpha_star,
        beta_star=beta_star,
        published=published,
        computed=res.boundary,
        alpha=oc.global_alpha,
        beta=oc.global_power,
    )


def reproduce_reference_designs(
    eff_pairs: tuple = REFERENCE_EFF_PAIRS,
    j_list: tuple = (2, 3),
    alpha_list: tuple = REFERENCE_ALPHAS,
    beta_list: tuple = REFERENCE_BETAS,
    kinds: tuple = (1, 2),
    rho: float = 0.5,
    n_max: int = 100,
) -> ReferenceReport:
    """Recompute the full published design grid and compare cell by cell.

    Runs the exact-mode search over every combination and pairs each
    computed boundary with the published one. Cells fan out over a small
    thread pool capped by MERIT_THREADS.
    """
    if not eff_pairs:
        raise ValueError("eff_pairs must be nonempty")
    t0, t1 = REFERENCE_TOX_RATES
    cells = [
        (DesignRates(t0, t1, pe0, pe1), J, kind, a, bt, rho, n_max)
        for pe0, pe1 in eff_pairs
        for J in j_list
        for kind in kinds
        for a in alpha_list
        for bt in beta_list
    ]
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        rows = list(pool.map(_reference_cell, cells))
    return ReferenceReport(rows=tuple(rows))
