"""Executing and simulating the trial decision rule.

At the end of enrollment each surviving arm's counts are compared with
the boundary, optionally after isotonic (pool-adjacent-violators)
adjustment across arms so observed rates respect dose monotonicity.
Interim looks stop an arm early when the beta-binomial posterior says it
is too toxic, ``Pr(pi_T > phi_t1 | data) > C_T``, or too futile,
``Pr(pi_E < phi_e1 | data) > C_E``; safety is checked first.

The batched simulator pre-draws all cohort counts with NumPy and pushes
the per-replicate decision logic through the compiled kernel. Paired
with/without-interim summaries reuse the same draws, so reported deltas
are common-random-number comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from . import _kernels
from .backend import substream
from .copula import cell_probabilities, sample_arm
from .hypotheses import ADMISSIBLE, DesignRates, HypothesisConfig, scenario_number
from .oc import Boundary

ARM_STATUSES = ("active", "stopped_safety", "stopped_futility")


@dataclass(frozen=True)
class ArmData:
    """Observed state of one dose arm."""

    enrolled: int
    n_t: int
    n_e: int
    status: str = "active"

    def __post_init__(self) -> None:
        if self.enrolled < 0 or self.n_t < 0 or self.n_e < 0:
            raise ValueError("counts must be nonnegative")
        if self.n_t > self.enrolled or self.n_e > self.enrolled:
            raise ValueError(
                f"event counts ({self.n_t}, {self.n_e}) exceed enrollment {self.enrolled}"
            )
        if self.status not in ARM_STATUSES:
            raise ValueError(f"unknown arm status {self.status!r}")


@dataclass(frozen=True)
class TrialData:
    """Per-arm observed counts in dose order."""

    arms: tuple[ArmData, ...]

    @property
    def total_enrolled(self) -> int:
        return sum(a.enrolled for a in self.arms)


@dataclass(frozen=True)
class InterimPolicy:
    """Interim look schedule and Bayesian stopping parameters."""

    looks: tuple[float, ...] = (1 / 3, 2 / 3)
    c_t: float = 0.95
    c_e: float = 0.95
    prior_a: float = 0.1
    prior_b: float = 0.1

    def __post_init__(self) -> None:
        if any(not (0.0 < f < 1.0) for f in self.looks):
            raise ValueError(f"look fractions must lie strictly inside (0, 1), got {self.looks}")
        if list(self.looks) != sorted(set(self.looks)):
            raise ValueError(f"look fractions must be strictly increasing, got {self.looks}")
        for name in ("c_t", "c_e"):
            if not (0.0 < getattr(self, name) < 1.0):
                raise ValueError(f"{name} must lie strictly inside (0, 1)")
        if self.prior_a <= 0 or self.prior_b <= 0:
            raise ValueError("prior parameters must be positive")


@dataclass(frozen=True)
class TrialOutcome:
    """Final decision: the selected dose set plus bookkeeping."""

    admissible_set: tuple[int, ...]  # 0-based indices of selected arms
    rejected_h0: bool
    total_enrolled: int
    stop_reasons: tuple[str, ...]  # per arm: completed | stopped_safety | stopped_futility
    adjusted_tox: tuple[float | None, ...]
    adjusted_eff: tuple[float | None, ...]


def pava_adjust(values, weights) -> np.ndarray:
    """Weighted least-squares nondecreasing fit by pool-adjacent-violators.

    Pools adjacent blocks whose means violate monotonicity; the output is
    nondecreasing, preserves the weighted sum, and is idempotent.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("values must be a nonempty 1-D sequence")
    if w.shape != v.shape:
        raise ValueError(f"weights shape {w.shape} does not match values shape {v.shape}")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    sums = []  # per block: [weighted sum, weight, count]
    for x, wt in zip(v, w):
        sums.append([x * wt, wt, 1])
        while len(sums) >= 2 and sums[-2][0] * sums[-1][1] > sums[-1][0] * sums[-2][1]:
            top = sums.pop()
            sums[-1][0] += top[0]
            sums[-1][1] += top[1]
            sums[-1][2] += top[2]
    out = np.empty_like(v)
    pos = 0
    for total, weight, count in sums:
        out[pos : pos + count] = total / weight
        pos += count
    return out


def _iso_blocks(values: list[int]) -> list[tuple[int, int]]:
    """Per-position (block sum, block size) of the nondecreasing integer fit.

    Equal-weight specialisation of ``pava_adjust`` kept in integer
    arithmetic so threshold comparisons have no rounding at exact ties.
    """
    blocks: list[list[int]] = []
    for x in values:
        blocks.append([x, 1])
        while len(blocks) >= 2 and blocks[-2][0] * blocks[-1][1] > blocks[-1][0] * blocks[-2][1]:
            s, c = blocks.pop()
            blocks[-1][0] += s
            blocks[-1][1] += c
    out = []
    for s, c in blocks:
        out.extend([(s, c)] * c)
    return out


def admissible_set(
    data: TrialData, b: Boundary, isotonic_tox: bool = True, isotonic_eff: bool = True
) -> TrialOutcome:
    """Apply the final decision rule to fully enrolled arms.

    An active arm is selected when its (optionally isotonically adjusted)
    efficacy count reaches ``m_e`` and its adjusted toxicity count stays
    at or below ``m_t``. Adjustment pools over active arms only; with
    equal enrollment everywhere the weighted-rate fit equals the plain
    count fit, and comparisons against the integer thresholds are exact.
    """
    active = [i for i, arm in enumerate(data.arms) if arm.status == "active"]
    for i in active:
        if data.arms[i].enrolled != b.n:
            raise ValueError(
                f"arm {i} is active with {data.arms[i].enrolled} of {b.n} patients enrolled"
            )
    tox = [data.arms[i].n_t for i in active]
    eff = [data.arms[i].n_e for i in active]
    tox_blocks = _iso_blocks(tox) if isotonic_tox else [(x, 1) for x in tox]
    eff_blocks = _iso_blocks(eff) if isotonic_eff else [(x, 1) for x in eff]

    selected = []
    adj_t: list[float | None] = [None] * len(data.arms)
    adj_e: list[float | None] = [None] * len(data.arms)
    for pos, i in enumerate(active):
        ts, tc = tox_blocks[pos]
        es, ec = eff_blocks[pos]
        adj_t[i] = ts / tc
        adj_e[i] = es / ec
        if ts <= b.m_t * tc and es >= b.m_e * ec:
            selected.append(i)
    reasons = tuple(
        "completed" if arm.status == "active" else arm.status for arm in data.arms
    )
    return TrialOutcome(
        admissible_set=tuple(selected),
        rejected_h0=bool(selected),
        total_enrolled=data.total_enrolled,
        stop_reasons=reasons,
        adjusted_tox=tuple(adj_t),
        adjusted_eff=tuple(adj_e),
    )


def posterior_exceedance(
    x: int, n: int, threshold: float, a: float = 0.1, b: float = 0.1, direction: str = "above"
) -> float:
    """Beta-binomial posterior tail Pr(pi > threshold) or Pr(pi < threshold).

    The posterior after x events in n patients under a Beta(a, b) prior is
    Beta(a + x, b + n - x); tails come from the regularized incomplete
    beta function.
    """
    if not (0 <= x <= n):
        raise ValueError(f"need 0 <= x <= n, got x={x}, n={n}")
    if a <= 0 or b <= 0:
        raise ValueError("prior parameters must be positive")
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    below = float(betainc(a + x, b + n - x, threshold))
    if direction == "below":
        return below
    if direction == "above":
        return 1.0 - below
    raise ValueError(f"direction must be 'above' or 'below', got {direction!r}")


def interim_decision(arm: ArmData, rates: DesignRates, policy: InterimPolicy) -> str:
    """Stopping decision for one active arm at an interim look."""
    if arm.status != "active":
        raise ValueError(f"interim decision requires an active arm, got {arm.status!r}")
    if (
        posterior_exceedance(
            arm.n_t, arm.enrolled, rates.phi_t1, policy.prior_a, policy.prior_b, "above"
        )
        > policy.c_t
    ):
        return "stop_safety"
    if (
        posterior_exceedance(
            arm.n_e, arm.enrolled, rates.phi_e1, policy.prior_a, policy.prior_b, "below"
        )
        > policy.c_e
    ):
        return "stop_futility"
    return "continue"


def look_schedule(n: int, looks: tuple[float, ...]) -> list[int]:
    """Interim analysis sizes: round-half-up of fraction*n, within [1, n-1]."""
    sizes = []
    for f in looks:
        s = int(math.floor(f * n + 0.5))
        if 1 <= s < n and s not in sizes:
            sizes.append(s)
    return sorted(sizes)


def simulate_trial(
    config: HypothesisConfig,
    b: Boundary,
    rho: float,
    policy: InterimPolicy | None,
    rng: np.random.Generator,
    isotonic_tox: bool = True,
    isotonic_eff: bool = True,
) -> TrialOutcome:
    """Simulate one trial under the given true configuration.

    Arms enroll in cohorts between looks (draw order is arm-major), apply
    the interim rule at each look, and surviving arms face the final
    boundary rule.
    """
    sizes = look_schedule(b.n, policy.looks) if policy is not None else []
    stopped_status = {"stop_safety": "stopped_safety", "stop_futility": "stopped_futility"}
    arms = []
    for pi_t, pi_e in config.doses:
        cells = cell_probabilities(pi_t, pi_e, rho)
        arm = ArmData(enrolled=0, n_t=0, n_e=0)
        for target in sizes:
            dt, de = sample_arm(target - arm.enrolled, cells, rng)
            arm = ArmData(enrolled=target, n_t=arm.n_t + dt, n_e=arm.n_e + de)
            decision = interim_decision(arm, config.rates, policy)
            if decision != "continue":
                arm = ArmData(arm.enrolled, arm.n_t, arm.n_e, status=stopped_status[decision])
                break
        if arm.status == "active":
            dt, de = sample_arm(b.n - arm.enrolled, cells, rng)
            arm = ArmData(enrolled=b.n, n_t=arm.n_t + dt, n_e=arm.n_e + de)
        arms.append(arm)
    return admissible_set(TrialData(arms=tuple(arms)), b, isotonic_tox, isotonic_eff)


# ---------------------------------------------------------------------------
# Batched operating-characteristic simulation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OCPoint:
    estimate: float
    se: float
    expected_n: float
    expected_n_se: float


@dataclass(frozen=True)
class ScenarioInterimOC:
    """Paired with/without-interim summary for one scenario."""

    config: HypothesisConfig
    scenario: int
    metric: str  # "alpha" for null scenarios, "power" otherwise
    power_kind: int
    no_interim: OCPoint
    with_interim: OCPoint
    delta_estimate: float
    delta_se: float
    delta_expected_n: float


def _decision_tables(
    look_sizes: list[int], rates: DesignRates, policy: InterimPolicy, n: int
) -> tuple[np.ndarray, np.ndarray]:
    stop_tox = np.zeros((len(look_sizes), n + 1), dtype=np.bool_)
    stop_fut = np.zeros((len(look_sizes), n + 1), dtype=np.bool_)
    for t, s in enumerate(look_sizes):
        x = np.arange(s + 1)
        p_above = 1.0 - betainc(policy.prior_a + x, policy.prior_b + s - x, rates.phi_t1)
        stop_tox[t, : s + 1] = p_above > policy.c_t
        p_below = betainc(policy.prior_a + x, policy.prior_b + s - x, rates.phi_e1)
        stop_fut[t, : s + 1] = p_below > policy.c_e
    return stop_tox, stop_fut


def _draw_cumulative_counts(
    config: HypothesisConfig,
    n: int,
    look_sizes: list[int],
    rho: float,
    replicates: int,
    seed: int,
    scenario_code: int,
) -> tuple[np.ndarray, np.ndarray]:
    J = config.n_doses
    stages = look_sizes + [n]
    nt = np.empty((replicates, J, len(stages)), dtype=np.int64)
    ne = np.empty((replicates, J, len(stages)), dtype=np.int64)
    for j, (pi_t, pi_e) in enumerate(config.doses):
        cells = cell_probabilities(pi_t, pi_e, rho).as_tuple()
        rng = substream(seed, 4, scenario_code, j)
        prev = 0
        cum_t = np.zeros(replicates, dtype=np.int64)
        cum_e = np.zeros(replicates, dtype=np.int64)
        for s, size in enumerate(stages):
            cohort = size - prev
            if cohort > 0:
                draw = rng.multinomial(cohort, cells, size=replicates)
                cum_t = cum_t + draw[:, 2] + draw[:, 3]
                cum_e = cum_e + draw[:, 1] + draw[:, 3]
            nt[:, j, s] = cum_t
            ne[:, j, s] = cum_e
            prev = size
    return nt, ne


def _run_batch(
    nt: np.ndarray,
    ne: np.ndarray,
    look_sizes: list[int],
    stop_tox: np.ndarray,
    stop_fut: np.ndarray,
    b: Boundary,
    isotonic_tox: bool,
    isotonic_eff: bool,
    truth: np.ndarray,
):
    replicates, J = nt.shape[0], nt.shape[1]
    reject = np.zeros(replicates, dtype=np.bool_)
    succ1 = np.zeros(replicates, dtype=np.bool_)
    succ2 = np.zeros(replicates, dtype=np.bool_)
    total = np.zeros(replicates, dtype=np.int64)
    reasons = np.zeros((replicates, J), dtype=np.int64)
    _kernels.trial_batch(
        np.ascontiguousarray(nt),
        np.ascontiguousarray(ne),
        np.asarray(look_sizes, dtype=np.int64),
        stop_tox,
        stop_fut,
        b.n,
        b.m_t,
        b.m_e,
        isotonic_tox,
        isotonic_eff,
        truth,
        reject,
        succ1,
        succ2,
        total,
        reasons,
    )
    return reject, succ1, succ2, total, reasons


def _point(success: np.ndarray, total: np.ndarray) -> OCPoint:
    r = len(success)
    est = float(success.mean())
    en = float(total.mean())
    return OCPoint(
        estimate=est,
        se=float(np.sqrt(est * (1.0 - est) / r)),
        expected_n=en,
        expected_n_se=float(total.std(ddof=1) / np.sqrt(r)) if r > 1 else 0.0,
    )


def simulate_oc_with_interim(
    scenarios: list[HypothesisConfig],
    b: Boundary,
    rho: float,
    policy: InterimPolicy,
    kind: int,
    replicates: int,
    seed: int,
    isotonic_tox: bool = True,
    isotonic_eff: bool = True,
) -> list[ScenarioInterimOC]:
    """Monte Carlo scenario summaries, paired with and without interims.

    Both variants of each scenario run on the same drawn counts, so the
    reported deltas are paired (common random numbers). Null scenarios
    report the rejection probability; alternatives report generalized
    power of the requested kind.
    """
    if kind not in (1, 2):
        raise ValueError(f"power kind must be 1 or 2, got {kind}")
    if replicates < 2:
        raise ValueError("need at least 2 replicates")
    if not scenarios:
        raise ValueError("need at least one scenario")
    rates = scenarios[0].rates
    if any(c.rates != rates for c in scenarios):
        raise ValueError("all scenarios must share the same elicited rates")
    sizes = look_schedule(b.n, policy.looks)
    stop_tox, stop_fut = _decision_tables(sizes, rates, policy, b.n)
    out = []
    no_looks = np.zeros((0, b.n + 1), dtype=np.bool_)
    for idx, config in enumerate(scenarios):
        truth = np.asarray(config.truth, dtype=np.int64)
        nt, ne = _draw_cumulative_counts(config, b.n, sizes, rho, replicates, seed, idx)
        rej_w, s1_w, s2_w, tot_w, _ = _run_batch(
            nt, ne, sizes, stop_tox, stop_fut, b, isotonic_tox, isotonic_eff, truth
        )
        final = slice(len(sizes), len(sizes) + 1)
        rej_n, s1_n, s2_n, tot_n, _ = _run_batch(
            nt[:, :, final], ne[:, :, final], [], no_looks, no_looks, b,
            isotonic_tox, isotonic_eff, truth,
        )
        if config.kind == "null":
            metric = "alpha"
            win, wout = rej_w, rej_n
        else:
            metric = "power"
            win, wout = (s1_w, s1_n) if kind == 1 else (s2_w, s2_n)
        diff = win.astype(np.float64) - wout.astype(np.float64)
        out.append(
            ScenarioInterimOC(
                config=config,
                scenario=scenario_number(config),
                metric=metric,
                power_kind=kind,
                no_interim=_point(wout, tot_n),
                with_interim=_point(win, tot_w),
                delta_estimate=float(diff.mean()),
                delta_se=float(diff.std(ddof=1) / np.sqrt(replicates)),
                delta_expected_n=float(tot_w.mean() - tot_n.mean()),
            )
        )
    return out
