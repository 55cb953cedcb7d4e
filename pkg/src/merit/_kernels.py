"""Hot numeric kernels with numba-compiled and pure-NumPy variants.

Two kernels dominate runtime:

* the per-arm joint count distribution (dynamic program over patients), and
* the batched trial simulator (interim stopping, isotonic pooling,
  boundary decisions per replicate).

Both exist in a scalar-loop form that numba compiles verbatim; the plain
Python object is kept as the fallback so the two paths run identical
arithmetic. ``joint_pmf_numpy`` is an additional vectorised implementation
used when the numba backend is off. The selected callables are
``joint_pmf`` and ``trial_batch``.
"""

from __future__ import annotations

import numpy as np

from .backend import USE_NUMBA, jit_kernel


def joint_pmf_numpy(n: int, p00: float, p01: float, p10: float, p11: float) -> np.ndarray:
    """Joint pmf of (toxicity count, efficacy count) after ``n`` patients.

    Each patient lands in one of four cells; the returned array ``P`` has
    ``P[t, e] = Pr(n_T = t, n_E = e)`` with shape ``(n+1, n+1)``.
    """
    pmf = np.zeros((n + 1, n + 1))
    pmf[0, 0] = 1.0
    for _ in range(n):
        nxt = p00 * pmf
        nxt[1:, :] += p10 * pmf[:-1, :]
        nxt[:, 1:] += p01 * pmf[:, :-1]
        nxt[1:, 1:] += p11 * pmf[:-1, :-1]
        pmf = nxt
    return pmf


def _joint_pmf_loops(n, p00, p01, p10, p11):
    # Same recurrence and per-cell addition order as joint_pmf_numpy.
    pmf = np.zeros((n + 1, n + 1))
    pmf[0, 0] = 1.0
    nxt = np.zeros((n + 1, n + 1))
    for i in range(n):
        for t in range(i + 2):
            for e in range(i + 2):
                acc = p00 * pmf[t, e]
                if t > 0:
                    acc += p10 * pmf[t - 1, e]
                if e > 0:
                    acc += p01 * pmf[t, e - 1]
                if t > 0 and e > 0:
                    acc += p11 * pmf[t - 1, e - 1]
                nxt[t, e] = acc
        pmf, nxt = nxt, pmf
    return pmf


joint_pmf_numba = jit_kernel(_joint_pmf_loops)


def _trial_batch_impl(
    nt_cum,
    ne_cum,
    look_sizes,
    stop_tox,
    stop_fut,
    n,
    m_t,
    m_e,
    iso_tox,
    iso_eff,
    truth,
    out_reject,
    out_succ1,
    out_succ2,
    out_total,
    out_reasons,
):
    """Run the final/interim decision rule on pre-drawn counts.

    Parameters
    ----------
    nt_cum, ne_cum : int64[R, J, L+1]
        Cumulative toxicity/efficacy counts per replicate and arm at each
        of the L interim looks, with the full-enrollment counts at index L.
    look_sizes : int64[L]
        Patients enrolled per arm at each look (strictly increasing, < n).
    stop_tox, stop_fut : bool[L, n+1]
        Posterior stopping rules tabulated per look: entry [t, x] says
        whether a count of x at look t triggers the stop.
    truth : int64[J]
        Per-arm truth code: 0 safe-futile, 1 admissible (safe and
        efficacious), 2 toxic-efficacious, 3 toxic-futile.
    out_* : per-replicate outputs (reject flag, generalized power I and II
        success flags, total enrollment, per-arm stop reasons
        0=completed, 1=safety, 2=futility).

    All boundary comparisons after isotonic pooling are done in integer
    arithmetic (block sums against threshold*block size), so exact ties
    behave identically on every backend.
    """
    n_rep = nt_cum.shape[0]
    n_arms = nt_cum.shape[1]
    n_looks = look_sizes.shape[0]

    surv = np.empty(n_arms, dtype=np.int64)
    vt = np.empty(n_arms, dtype=np.int64)
    ve = np.empty(n_arms, dtype=np.int64)
    bsum_t = np.empty(n_arms, dtype=np.int64)
    bcnt_t = np.empty(n_arms, dtype=np.int64)
    bsum_e = np.empty(n_arms, dtype=np.int64)
    bcnt_e = np.empty(n_arms, dtype=np.int64)
    blk_t = np.empty(n_arms, dtype=np.int64)
    blk_e = np.empty(n_arms, dtype=np.int64)

    for r in range(n_rep):
        total = 0
        n_surv = 0
        for j in range(n_arms):
            reason = 0
            enrolled = n
            for t in range(n_looks):
                if stop_tox[t, nt_cum[r, j, t]]:
                    reason = 1
                    enrolled = look_sizes[t]
                    break
                if stop_fut[t, ne_cum[r, j, t]]:
                    reason = 2
                    enrolled = look_sizes[t]
                    break
            out_reasons[r, j] = reason
            total += enrolled
            if reason == 0:
                surv[n_surv] = j
                vt[n_surv] = nt_cum[r, j, n_looks]
                ve[n_surv] = ne_cum[r, j, n_looks]
                n_surv += 1
        out_total[r] = total

        # Isotonic (nondecreasing) pooling over surviving arms, kept as
        # block sums/sizes; equal per-arm enrollment makes this the
        # weighted-rate fit scaled back to counts.
        if iso_tox:
            nb = 0
            for i in range(n_surv):
                bsum_t[nb] = vt[i]
                bcnt_t[nb] = 1
                nb += 1
                while nb >= 2 and bsum_t[nb - 2] * bcnt_t[nb - 1] > bsum_t[nb - 1] * bcnt_t[nb - 2]:
                    bsum_t[nb - 2] += bsum_t[nb - 1]
                    bcnt_t[nb - 2] += bcnt_t[nb - 1]
                    nb -= 1
            pos = 0
            for b in range(nb):
                for _ in range(bcnt_t[b]):
                    blk_t[pos] = b
                    pos += 1
        else:
            for i in range(n_surv):
                bsum_t[i] = vt[i]
                bcnt_t[i] = 1
                blk_t[i] = i
        if iso_eff:
            nb = 0
            for i in range(n_surv):
                bsum_e[nb] = ve[i]
                bcnt_e[nb] = 1
                nb += 1
                while nb >= 2 and bsum_e[nb - 2] * bcnt_e[nb - 1] > bsum_e[nb - 1] * bcnt_e[nb - 2]:
                    bsum_e[nb - 2] += bsum_e[nb - 1]
                    bcnt_e[nb - 2] += bcnt_e[nb - 1]
                    nb -= 1
            pos = 0
            for b in range(nb):
                for _ in range(bcnt_e[b]):
                    blk_e[pos] = b
                    pos += 1
        else:
            for i in range(n_surv):
                bsum_e[i] = ve[i]
                bcnt_e[i] = 1
                blk_e[i] = i

        reject = False
        any_adm = False
        fut_ok = True
        tox_ok = True
        for i in range(n_surv):
            j = surv[i]
            bt = blk_t[i]
            be = blk_e[i]
            pass_t = bsum_t[bt] <= m_t * bcnt_t[bt]
            pass_e = bsum_e[be] >= m_e * bcnt_e[be]
            in_set = pass_t and pass_e
            if in_set:
                reject = True
                if truth[j] == 1:
                    any_adm = True
            if truth[j] == 0 and pass_e:
                fut_ok = False
            if truth[j] == 2 and pass_t:
                tox_ok = False
        for j in range(n_arms):
            if out_reasons[r, j] == 1 and truth[j] == 0:
                fut_ok = False
            if out_reasons[r, j] == 2 and truth[j] == 2:
                tox_ok = False

        out_reject[r] = reject
        out_succ2[r] = any_adm
        out_succ1[r] = any_adm and fut_ok and tox_ok


trial_batch_numba = jit_kernel(_trial_batch_impl)
trial_batch_numpy = _trial_batch_impl


def _staircase_outcome(
    t_counts,
    e_counts,
    truth,
    n,
    iso_tox,
    iso_eff,
    weight,
    bsum_t,
    bcnt_t,
    bsum_e,
    bcnt_e,
    lo_t,
    hi_e,
    acc_reject,
    acc_s1,
    acc_s2,
):
    """Score one trial outcome against every (m_t, m_e) boundary at once.

    After isotonic pooling, arm j enters the selected set iff
    ``m_t >= ceil(fit_t[j])`` and ``m_e <= floor(fit_e[j])``; both bound
    sequences are nondecreasing in j, so the rejection region in the
    (m_t, m_e) grid is a staircase union of quadrants. Each event region
    decomposes into at most J disjoint rectangles added to 2-D difference
    arrays (prefix-summing them afterwards yields event probabilities for
    the whole grid).

    ``acc_s1`` receives the generalized-power-I event (every safe-futile
    arm fails on efficacy, every toxic arm fails on toxicity, at least
    one admissible arm selected) and ``acc_s2`` the kind-II event (at
    least one admissible arm selected).
    """
    n_arms = t_counts.shape[0]

    # Isotonic fits as integer block sums/sizes (see _trial_batch_impl).
    if iso_tox:
        nb = 0
        for i in range(n_arms):
            bsum_t[nb] = t_counts[i]
            bcnt_t[nb] = 1
            nb += 1
            while nb >= 2 and bsum_t[nb - 2] * bcnt_t[nb - 1] > bsum_t[nb - 1] * bcnt_t[nb - 2]:
                bsum_t[nb - 2] += bsum_t[nb - 1]
                bcnt_t[nb - 2] += bcnt_t[nb - 1]
                nb -= 1
        pos = 0
        for bidx in range(nb):
            # lo_t[j]: smallest m_t with arm j passing toxicity.
            val = (bsum_t[bidx] + bcnt_t[bidx] - 1) // bcnt_t[bidx]
            for _ in range(bcnt_t[bidx]):
                lo_t[pos] = val
                pos += 1
    else:
        for i in range(n_arms):
            lo_t[i] = t_counts[i]
    if iso_eff:
        nb = 0
        for i in range(n_arms):
            bsum_e[nb] = e_counts[i]
            bcnt_e[nb] = 1
            nb += 1
            while nb >= 2 and bsum_e[nb - 2] * bcnt_e[nb - 1] > bsum_e[nb - 1] * bcnt_e[nb - 2]:
                bsum_e[nb - 2] += bsum_e[nb - 1]
                bcnt_e[nb - 2] += bcnt_e[nb - 1]
                nb -= 1
        pos = 0
        for bidx in range(nb):
            # hi_e[j]: largest m_e with arm j passing efficacy.
            val = bsum_e[bidx] // bcnt_e[bidx]
            for _ in range(bcnt_e[bidx]):
                hi_e[pos] = val
                pos += 1
    else:
        for i in range(n_arms):
            hi_e[i] = e_counts[i]

    # Rejection: union over all arms of [lo_t[j], n] x [0, hi_e[j]].
    for j in range(n_arms):
        r1 = lo_t[j]
        r2 = lo_t[j + 1] - 1 if j + 1 < n_arms else n
        if r1 <= r2 and hi_e[j] >= 0:
            c2 = hi_e[j]
            acc_reject[r1, 0] += weight
            acc_reject[r2 + 1, 0] -= weight
            acc_reject[r1, c2 + 1] -= weight
            acc_reject[r2 + 1, c2 + 1] += weight

    # Kind II: union over admissible arms only.
    prev_lo = -1
    for j in range(n_arms):
        if truth[j] != 1:
            continue
        r1 = lo_t[j] if lo_t[j] > prev_lo else prev_lo
        prev_lo = r1
        r2 = n
        for k in range(j + 1, n_arms):
            if truth[k] == 1:
                r2 = lo_t[k] - 1
                break
        if r1 <= r2 and hi_e[j] >= 0:
            c2 = hi_e[j]
            acc_s2[r1, 0] += weight
            acc_s2[r2 + 1, 0] -= weight
            acc_s2[r1, c2 + 1] -= weight
            acc_s2[r2 + 1, c2 + 1] += weight

    # Kind I: same union clipped to the box where every safe-futile arm
    # fails efficacy (m_e >= e_floor) and every toxic arm fails toxicity
    # (m_t <= t_cap).
    t_cap = n
    e_floor = 0
    for j in range(n_arms):
        if truth[j] == 0:
            if hi_e[j] + 1 > e_floor:
                e_floor = hi_e[j] + 1
        elif truth[j] == 2:
            if lo_t[j] - 1 < t_cap:
                t_cap = lo_t[j] - 1
    if t_cap >= 0 and e_floor <= n:
        prev_lo = -1
        for j in range(n_arms):
            if truth[j] != 1:
                continue
            r1 = lo_t[j] if lo_t[j] > prev_lo else prev_lo
            prev_lo = r1
            r2 = n
            for k in range(j + 1, n_arms):
                if truth[k] == 1:
                    r2 = lo_t[k] - 1
                    break
            if r2 > t_cap:
                r2 = t_cap
            c1 = e_floor
            c2 = hi_e[j]
            if r1 <= r2 and c1 <= c2:
                acc_s1[r1, c1] += weight
                acc_s1[r2 + 1, c1] -= weight
                acc_s1[r1, c2 + 1] -= weight
                acc_s1[r2 + 1, c2 + 1] += weight


def _adjusted_mc_impl(
    t_final, e_final, truth, n, iso_tox, iso_eff, acc_reject, acc_s1, acc_s2
):
    """Accumulate staircase regions for every Monte Carlo replicate.

    ``t_final``/``e_final`` are int64[R, J] final counts; accumulators are
    float64[n+2, n+2] difference arrays (weight 1 per replicate).
    """
    n_rep, n_arms = t_final.shape
    bsum_t = np.empty(n_arms, dtype=np.int64)
    bcnt_t = np.empty(n_arms, dtype=np.int64)
    bsum_e = np.empty(n_arms, dtype=np.int64)
    bcnt_e = np.empty(n_arms, dtype=np.int64)
    lo_t = np.empty(n_arms, dtype=np.int64)
    hi_e = np.empty(n_arms, dtype=np.int64)
    for r in range(n_rep):
        _staircase_outcome(
            t_final[r],
            e_final[r],
            truth,
            n,
            iso_tox,
            iso_eff,
            1.0,
            bsum_t,
            bcnt_t,
            bsum_e,
            bcnt_e,
            lo_t,
            hi_e,
            acc_reject,
            acc_s1,
            acc_s2,
        )


def _adjusted_exact2_impl(
    pmf_a, pmf_b, truth, n, iso_tox, iso_eff, acc_reject, acc_s1, acc_s2
):
    """Exact two-arm analogue: enumerate all (t1, e1, t2, e2) outcomes.

    ``pmf_a``/``pmf_b`` are the per-arm joint count pmfs; each outcome's
    probability weights its staircase region.
    """
    bsum_t = np.empty(2, dtype=np.int64)
    bcnt_t = np.empty(2, dtype=np.int64)
    bsum_e = np.empty(2, dtype=np.int64)
    bcnt_e = np.empty(2, dtype=np.int64)
    lo_t = np.empty(2, dtype=np.int64)
    hi_e = np.empty(2, dtype=np.int64)
    t_counts = np.empty(2, dtype=np.int64)
    e_counts = np.empty(2, dtype=np.int64)
    for t1 in range(n + 1):
        for e1 in range(n + 1):
            p1 = pmf_a[t1, e1]
            if p1 == 0.0:
                continue
            t_counts[0] = t1
            e_counts[0] = e1
            for t2 in range(n + 1):
                for e2 in range(n + 1):
                    w = p1 * pmf_b[t2, e2]
                    if w == 0.0:
                        continue
                    t_counts[1] = t2
                    e_counts[1] = e2
                    _staircase_outcome(
                        t_counts,
                        e_counts,
                        truth,
                        n,
                        iso_tox,
                        iso_eff,
                        w,
                        bsum_t,
                        bcnt_t,
                        bsum_e,
                        bcnt_e,
                        lo_t,
                        hi_e,
                        acc_reject,
                        acc_s1,
                        acc_s2,
                    )


_staircase_numba = jit_kernel(_staircase_outcome)


def _make_adjusted_mc(staircase):
    def impl(t_final, e_final, truth, n, iso_tox, iso_eff, acc_reject, acc_s1, acc_s2):
        n_rep, n_arms = t_final.shape
        bsum_t = np.empty(n_arms, dtype=np.int64)
        bcnt_t = np.empty(n_arms, dtype=np.int64)
        bsum_e = np.empty(n_arms, dtype=np.int64)
        bcnt_e = np.empty(n_arms, dtype=np.int64)
        lo_t = np.empty(n_arms, dtype=np.int64)
        hi_e = np.empty(n_arms, dtype=np.int64)
        for r in range(n_rep):
            staircase(
                t_final[r], e_final[r], truth, n, iso_tox, iso_eff, 1.0,
                bsum_t, bcnt_t, bsum_e, bcnt_e, lo_t, hi_e,
                acc_reject, acc_s1, acc_s2,
            )
    return impl


def _make_adjusted_exact2(staircase):
    def impl(pmf_a, pmf_b, truth, n, iso_tox, iso_eff, acc_reject, acc_s1, acc_s2):
        bsum_t = np.empty(2, dtype=np.int64)
        bcnt_t = np.empty(2, dtype=np.int64)
        bsum_e = np.empty(2, dtype=np.int64)
        bcnt_e = np.empty(2, dtype=np.int64)
        lo_t = np.empty(2, dtype=np.int64)
        hi_e = np.empty(2, dtype=np.int64)
        t_counts = np.empty(2, dtype=np.int64)
        e_counts = np.empty(2, dtype=np.int64)
        for t1 in range(n + 1):
            for e1 in range(n + 1):
                p1 = pmf_a[t1, e1]
                if p1 == 0.0:
                    continue
                t_counts[0] = t1
                e_counts[0] = e1
                for t2 in range(n + 1):
                    for e2 in range(n + 1):
                        w = p1 * pmf_b[t2, e2]
                        if w == 0.0:
                            continue
                        t_counts[1] = t2
                        e_counts[1] = e2
                        staircase(
                            t_counts, e_counts, truth, n, iso_tox, iso_eff, w,
                            bsum_t, bcnt_t, bsum_e, bcnt_e, lo_t, hi_e,
                            acc_reject, acc_s1, acc_s2,
                        )
    return impl


adjusted_mc_numba = jit_kernel(_make_adjusted_mc(_staircase_numba))
adjusted_mc_numpy = _adjusted_mc_impl
adjusted_exact2_numba = jit_kernel(_make_adjusted_exact2(_staircase_numba))
adjusted_exact2_numpy = _adjusted_exact2_impl

if USE_NUMBA:
    joint_pmf = joint_pmf_numba
    trial_batch = trial_batch_numba
    adjusted_mc = adjusted_mc_numba
    adjusted_exact2 = adjusted_exact2_numba
else:
    joint_pmf = joint_pmf_numpy
    trial_batch = trial_batch_numpy
    adjusted_mc = adjusted_mc_numpy
    adjusted_exact2 = adjusted_exact2_numpy
