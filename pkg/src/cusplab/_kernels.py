"""Compiled inner loops (numba) for long orbits, chains, and ladders.

Everything in this module is deterministic given ``(seed, trial)``: each
trial derives a private splitmix64 stream from the master seed, so results
never depend on scheduling or concurrency degree.  The splitmix64 mixer is
the standard Steele-Lea-Flood finalizer; we hand-roll it because numba
kernels cannot cheaply hold one numpy ``Generator`` per trial.

Float orbits near an indifferent fixed point eventually stagnate
(``x + a*x**(1+p)`` rounds back to ``x``).  When that happens the remaining
escape time provably exceeds ``2**53/(1+p)`` steps, far beyond any feasible
horizon, and every remaining iterate stays inside the same membership sets;
so continuing to iterate the frozen state is *exactly* the inverse-branch
jump-ahead evaluated in closed form.  The kernels therefore keep looping on
the frozen value and count those steps in a per-trial stagnation diagnostic.
"""

from __future__ import annotations

import warnings

import numpy as np
from numba import njit, prange

# the runtime picks whichever threading layer is available; the fallback
# notice about outdated TBB is irrelevant to correctness (outputs are
# concurrency-independent by construction)
warnings.filterwarnings("ignore",
                        message="The TBB threading layer requires")

__all__ = [
    "ladder",
    "occupation_batch",
    "returns_trial",
    "poly_partial_sums",
    "tower_trial",
    "base_chain_trial",
    "svm_same_power",
    "svm_pair_power",
]

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM_SALT = np.uint64(0xA3AAA15E6B8F0330)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, inline="always")
def _splitmix64(state):
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _trial_stream(seed, trial):
    """Private stream state for one trial; one warm-up round decorrelates
    small seeds."""
    s = np.uint64(seed) ^ (np.uint64(trial) * _STREAM_SALT)
    s, _ = _splitmix64(s)
    return s


@njit(cache=True, inline="always")
def _next_unit(state):
    """Uniform double in [0, 1) with 53 random bits."""
    state, z = _splitmix64(state)
    return state, float(z >> np.uint64(11)) * _INV53


@njit(cache=True, inline="always")
def _map_step(x, c, a0, p0, a1, p1):
    """One step of the two-branch cusp map; exponents 1 and 2 get
    multiply-only fast paths (they dominate every built-in experiment)."""
    if x <= c:
        if p0 == 1.0:
            t = x + a0 * x * x
        elif p0 == 2.0:
            t = x + a0 * x * x * x
        else:
            t = x + a0 * x ** (1.0 + p0)
        if t > 1.0:
            t = 1.0
    else:
        w = 1.0 - x
        if p1 == 1.0:
            t = x - a1 * w * w
        elif p1 == 2.0:
            t = x - a1 * w * w * w
        else:
            t = x - a1 * w ** (1.0 + p1)
        if t < 0.0:
            t = 0.0
    return t


# ---------------------------------------------------------------------------
# inverse-branch ladders
# ---------------------------------------------------------------------------

@njit(cache=True)
def ladder(a, p, start, n):
    """Iterates of the inverse branch: out[0] = start, out[k+1] solves
    s + a*s**(1+p) = out[k] by guarded Newton (monotone, smooth).

    Entries below 1e-300 are flushed to zero and stay there (never reached
    at polynomial decay within representable lengths).
    """
    out = np.empty(n + 1)
    out[0] = start
    e = 1.0 + p
    x = start
    for k in range(n):
        y = out[k]
        if y <= 1e-300:
            out[k + 1] = 0.0
            continue
        # initial guess: one explicit backward step from the previous root
        g = y - a * x ** e
        if g <= 0.0 or g >= y:
            g = 0.5 * y
        x = g
        for _ in range(80):
            f = x + a * x ** e - y
            fp = 1.0 + a * e * x ** (e - 1.0)
            dx = f / fp
            x -= dx
            if x <= 0.0:
                x = 0.5 * (x + dx)  # fall back toward the bracket interior
            if abs(dx) < 1e-16 * x:
                break
        out[k + 1] = x
    return out


# ---------------------------------------------------------------------------
# occupation statistics for orbit batches
# ---------------------------------------------------------------------------

@njit(cache=True)
def _occupation_trial(seed, trial, n_steps, c, a0, p0, a1, p1,
                      da, db, m_lo, m_hi, eps, init_lo, init_hi, chks,
                      sA, sB, sM, sMid, R, rmax, rmin):
    s = _trial_stream(seed, trial)
    s, u = _next_unit(s)
    x = init_lo + u * (init_hi - init_lo)
    x0 = x
    a_cnt = 0
    b_cnt = 0
    m_cnt = 0
    mid_cnt = 0
    run_max = np.nan
    run_min = np.nan
    stag = 0
    nm = m_lo.shape[0]
    nch = chks.shape[0]
    ci = 0
    for k in range(n_steps):
        if x < da:
            a_cnt += 1
        if x > 1.0 - db:
            b_cnt += 1
        for j in range(nm):
            if m_lo[j] < x <= m_hi[j]:
                m_cnt += 1
                break
        if eps < x < 1.0 - eps:
            mid_cnt += 1
        if a_cnt > 0 and b_cnt > 0:
            r = a_cnt / b_cnt
            if not run_max >= r:   # handles the initial NaN
                run_max = r
            if not run_min <= r:
                run_min = r
        t = _map_step(x, c, a0, p0, a1, p1)
        if t == x:
            stag += 1
        x = t
        if ci < nch and k + 1 == chks[ci]:
            sA[ci] = a_cnt
            sB[ci] = b_cnt
            sM[ci] = m_cnt
            sMid[ci] = mid_cnt
            if a_cnt > 0 and b_cnt > 0:
                R[ci] = a_cnt / b_cnt
            else:
                R[ci] = np.nan
            rmax[ci] = run_max
            rmin[ci] = run_min
            ci += 1
    return x0, stag


@njit(cache=True, parallel=True)
def occupation_batch(seed, n_trials, n_steps, c, a0, p0, a1, p1,
                     da, db, m_lo, m_hi, eps, init_lo, init_hi, chks):
    """Run ``n_trials`` independent orbits and record, at every checkpoint,
    the occupation counts of A=[0,da), B=(1-db,1], M (a union of intervals
    (lo, hi]), the middle band (eps, 1-eps), the ratio S(A)/S(B) and its
    running extremes (NaN until both counts are positive)."""
    nch = chks.shape[0]
    SA = np.zeros((n_trials, nch), dtype=np.int64)
    SB = np.zeros((n_trials, nch), dtype=np.int64)
    SM = np.zeros((n_trials, nch), dtype=np.int64)
    SMID = np.zeros((n_trials, nch), dtype=np.int64)
    R = np.full((n_trials, nch), np.nan)
    RMAX = np.full((n_trials, nch), np.nan)
    RMIN = np.full((n_trials, nch), np.nan)
    X0 = np.empty(n_trials)
    STAG = np.zeros(n_trials, dtype=np.int64)
    for tr in prange(n_trials):
        x0, stag = _occupation_trial(
            seed, tr, n_steps, c, a0, p0, a1, p1, da, db, m_lo, m_hi,
            eps, init_lo, init_hi, chks,
            SA[tr], SB[tr], SM[tr], SMID[tr], R[tr], RMAX[tr], RMIN[tr])
        X0[tr] = x0
        STAG[tr] = stag
    return SA, SB, SM, SMID, R, RMAX, RMIN, X0, STAG


@njit(cache=True)
def returns_trial(seed, trial, n_steps, c, a0, p0, a1, p1,
                  set_lo, set_hi, split_at_c, init_lo, init_hi, chks,
                  gaps, sides):
    """Record visits to the set ``union_j (set_lo[j], set_hi[j]]`` along one
    orbit: the first visit time, the gaps between consecutive visits, the
    visit side (1 when x > c, else 0; only meaningful with ``split_at_c``),
    plus per-checkpoint visit counts and occupation counts of the set.

    Returns (x0, first_visit_time, n_visits, counts_at_checkpoints,
    occupation_at_checkpoints).  Recording stops silently once ``gaps`` is
    full; the total visit count keeps counting.
    """
    s = _trial_stream(seed, trial)
    s, u = _next_unit(s)
    x = init_lo + u * (init_hi - init_lo)
    x0 = x
    cap = gaps.shape[0]
    nset = set_lo.shape[0]
    nch = chks.shape[0]
    counts = np.zeros(nch, dtype=np.int64)
    occ = np.zeros(nch, dtype=np.int64)
    n_visits = 0
    first_visit = np.int64(-1)
    last_visit = np.int64(-1)
    occ_cnt = 0
    ci = 0
    for k in range(n_steps):
        inside = False
        for j in range(nset):
            if set_lo[j] < x <= set_hi[j]:
                inside = True
                break
        if inside:
            occ_cnt += 1
            if n_visits == 0:
                first_visit = k
            elif n_visits - 1 < cap:
                # gap index j ends at visit j+1
                gaps[n_visits - 1] = k - last_visit
            if n_visits < cap:
                # side of visit j = side where gap j starts
                if split_at_c:
                    sides[n_visits] = 1 if x > c else 0
                else:
                    sides[n_visits] = -1
            last_visit = k
            n_visits += 1
        x = _map_step(x, c, a0, p0, a1, p1)
        if ci < nch and k + 1 == chks[ci]:
            counts[ci] = n_visits
            occ[ci] = occ_cnt
            ci += 1
    return x0, first_visit, n_visits, counts, occ


# ---------------------------------------------------------------------------
# fixed-point partial sums (two-fixed-point comparison)
# ---------------------------------------------------------------------------

@njit(cache=True)
def poly_partial_sums(b, p, kappa, n):
    """Partial sums S[m] = sum_{j<m} f^j(kappa) for f(x) = x - b*x**(1+p),
    m = 0..n.  Iteration stops adding once the iterate underflows below
    1e-300 (sums then stay constant)."""
    S = np.empty(n + 1)
    S[0] = 0.0
    x = kappa
    e = 1.0 + p
    acc = 0.0
    for m in range(n):
        acc += x
        S[m + 1] = acc
        if x > 1e-300:
            if p == 1.0:
                x = x - b * x * x
            elif p == 2.0:
                x = x - b * x * x * x
            else:
                x = x - b * x ** e
            if x < 0.0:
                x = 0.0
        else:
            x = 0.0
    return S


# ---------------------------------------------------------------------------
# renewal chain and its tower
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _em_tail(k, s_exp):
    """Euler-Maclaurin tail sum_{j>k} j**(-s); relative error O(k**-3) --
    used only beyond the tabulated head where that error is ~1e-20."""
    return (k ** (1.0 - s_exp) / (s_exp - 1.0)
            - 0.5 * k ** (-s_exp)
            + (s_exp / 12.0) * k ** (-s_exp - 1.0))


@njit(cache=True, inline="always")
def _draw_lifetime(u, head_cdf, s_exp):
    """Inverse-CDF lifetime draw: tabulated head (k = 1..len(head_cdf)),
    analytic ~k**-s tail beyond, matched to the head's remaining mass."""
    cutoff = head_cdf.shape[0]
    if u <= head_cdf[cutoff - 1]:
        lo = 0
        hi = cutoff - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if head_cdf[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        return lo + 1
    # tail: P[K > k] = rem * S(k)/S(cutoff) for k >= cutoff
    rem = 1.0 - head_cdf[cutoff - 1]
    target = (1.0 - u) / rem * _em_tail(float(cutoff), s_exp)
    lo_k = float(cutoff)
    hi_k = 2.0 * lo_k
    while _em_tail(hi_k, s_exp) > target:
        hi_k *= 2.0
        if hi_k > 1e18:
            break
    for _ in range(200):
        mid = 0.5 * (lo_k + hi_k)
        if _em_tail(mid, s_exp) > target:
            lo_k = mid
        else:
            hi_k = mid
        if hi_k - lo_k < 0.5:
            break
    k = int(np.ceil(hi_k))
    # smallest k with P[K > k] <= 1-u
    while k > cutoff and _em_tail(float(k - 1), s_exp) <= target:
        k -= 1
    return k


@njit(cache=True)
def tower_trial(seed, trial, n_steps, head_cdf, s_exp, chks,
                SA, SB, RATIO, LVL):
    """One trajectory of the tower chain from (0, 0).

    State (k, j), 0 <= j <= 2k+1; deterministic climb within a fiber, then
    drop to (k-1, 0); at the top of fiber 0 a fresh lifetime K is drawn and
    the state jumps to (K-1, 0).  A-states have 0 < j <= k, B-states have
    j > k+1.  Returns (bound_violations, n_renewals); the structural bound
    |S(A) - S(B)| <= (base-chain value at the latest renewal) is checked
    at every step.
    """
    s = _trial_stream(seed, trial)
    k = 0
    j = 0
    root = 0  # base-chain value at the latest renewal (drawn lifetime - 1)
    a_cnt = 0
    b_cnt = 0
    violations = 0
    renewals = 0
    nch = chks.shape[0]
    ci = 0
    for n in range(n_steps):
        if 0 < j <= k:
            a_cnt += 1
        elif j > k + 1:
            b_cnt += 1
        diff = a_cnt - b_cnt
        if diff < 0:
            diff = -diff
        if diff > root:
            violations += 1
        # advance
        if j < 2 * k + 1:
            j += 1
        elif k > 0:
            k -= 1
            j = 0
        else:
            s, u = _next_unit(s)
            if u <= 0.0:
                u = _INV53
            kk = _draw_lifetime(u, head_cdf, s_exp)
            renewals += 1
            root = kk - 1
            k = kk - 1
            j = 0
        if ci < nch and n + 1 == chks[ci]:
            SA[ci] = a_cnt
            SB[ci] = b_cnt
            RATIO[ci] = a_cnt / b_cnt if b_cnt > 0 else np.nan
            LVL[ci] = root
            ci += 1
    return violations, renewals


@njit(cache=True)
def base_chain_trial(seed, trial, n_steps, x_start, head_cdf, s_exp,
                     n_occup_states, chks, XRATIO):
    """One trajectory of the base renewal chain: X -> X-1 when X > 0, and
    from 0 a fresh lifetime K is drawn and X jumps to K-1.

    Records X_n/n at checkpoints, occupation counts of states
    0..n_occup_states-1, the overall max of X_n/n (n >= 1) and whether that
    max was attained at a renewal step (a step whose value was just drawn).
    """
    s = _trial_stream(seed, trial)
    x = x_start
    occup = np.zeros(n_occup_states, dtype=np.int64)
    best = -1.0
    best_at_renewal = False
    nch = chks.shape[0]
    ci = 0
    just_renewed = False
    for n in range(n_steps):
        if x < n_occup_states:
            occup[x] += 1
        if n >= 1:
            v = x / n
            if v > best:
                best = v
                best_at_renewal = just_renewed
        if x > 0:
            x -= 1
            just_renewed = False
        else:
            s, u = _next_unit(s)
            if u <= 0.0:
                u = _INV53
            x = _draw_lifetime(u, head_cdf, s_exp) - 1
            just_renewed = True
        if ci < nch and n + 1 == chks[ci]:
            XRATIO[ci] = x / (n + 1)
            ci += 1
    return occup, best, best_at_renewal


# ---------------------------------------------------------------------------
# sums versus maxima for heavy-tailed iid sequences
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _powerlog_tail(x, a, q, r, C):
    """P[phi > x] = C * x**-a * (1+ln x)**-q * (1+ln(1+ln x))**-r, clipped
    to <= 1, for continuous x >= 1."""
    if x < 1.0:
        return 1.0
    t = C * x ** (-a)
    if q != 0.0:
        t *= (1.0 + np.log(x)) ** (-q)
    if r != 0.0:
        t *= (1.0 + np.log(1.0 + np.log(x))) ** (-r)
    return t if t < 1.0 else 1.0


@njit(cache=True, inline="always")
def _powerlog_invert(u, a, q, r, C):
    """Smallest integer k with tail(k) < u (so that P[phi > k] = tail(k)
    exactly); solves the continuous equation in log space, then adjusts."""
    if u >= 1.0:
        return 1
    # solve a*y + q*ln(1+y) + r*ln(1+ln(1+y)) = ln(C/u),  y = ln x
    target = np.log(C / u)
    y = target / a
    if y < 0.0:
        y = 0.0
    for _ in range(60):
        ly = np.log1p(y)
        f = a * y + q * ly + r * np.log1p(ly) - target
        fp = a + q / (1.0 + y) + r / ((1.0 + np.log1p(y)) * (1.0 + y))
        dy = f / fp
        y -= dy
        if y < 0.0:
            y = 0.0
        if abs(dy) < 1e-14 * (1.0 + abs(y)):
            break
    k = int(np.ceil(np.exp(y)))
    if k < 1:
        k = 1
    while k > 1 and _powerlog_tail(float(k - 1), a, q, r, C) < u:
        k -= 1
    while _powerlog_tail(float(k), a, q, r, C) >= u:
        k += 1
    return k


@njit(cache=True)
def svm_same_power(seed, trial, n_steps, a, chks, RUNMAX, RAW):
    """phi = psi = ceil(u**(-1/a)) (exact tail P[phi > k] = k**-a): running
    max and raw value of phi_n / sum_{k<n} psi_k at checkpoints."""
    s = _trial_stream(seed, trial)
    inv_a = 1.0 / a
    ssum = 0.0
    run_max = 0.0
    nch = chks.shape[0]
    ci = 0
    for n in range(n_steps):
        s, u = _next_unit(s)
        if u <= 0.0:
            u = _INV53
        if a == 0.5:
            phi = np.ceil(1.0 / (u * u))
        elif a == 1.0:
            phi = np.ceil(1.0 / u)
        else:
            phi = np.ceil(u ** (-inv_a))
        raw = np.nan
        if n >= 1:
            raw = phi / ssum
            if raw > run_max:
                run_max = raw
        ssum += phi
        if ci < nch and n + 1 == chks[ci]:
            RUNMAX[ci] = run_max if n >= 1 else np.nan
            RAW[ci] = raw
            ci += 1
    return run_max


@njit(cache=True)
def svm_pair_power(seed, trial, n_steps, psi_a, phi_a, phi_q, phi_r, phi_C,
                   chks, RUNMAX, RAW):
    """Coupled pair phi_n = F_phi^{-1}(u_n), psi_n = F_psi^{-1}(u_n) driven
    by one uniform per step (two functions of the same iid sequence).

    psi is pure-power (tail k**-psi_a); phi is the power-log family.  The
    running max of phi_n / sum_{k<n} psi_k is maintained with a record
    filter: a step can set a record iff its uniform is below the tail
    probability at (current record) * (current sum), so the expensive exact
    inversion runs only on candidate steps and at checkpoints.
    """
    s = _trial_stream(seed, trial)
    inv_psi = 1.0 / psi_a
    ssum = 0.0
    run_max = 0.0
    u_thr = 2.0  # always triggers until first refresh
    nch = chks.shape[0]
    ci = 0
    refresh = 0
    for n in range(n_steps):
        s, u = _next_unit(s)
        if u <= 0.0:
            u = _INV53
        need_raw = ci < nch and n + 1 == chks[ci]
        if n >= 1 and (u < u_thr or need_raw):
            phi = float(_powerlog_invert(u, phi_a, phi_q, phi_r, phi_C))
            raw = phi / ssum
            if raw > run_max:
                run_max = raw
                refresh = 0
            if need_raw:
                RUNMAX[ci] = run_max
                RAW[ci] = raw
                ci += 1
        elif need_raw:
            RUNMAX[ci] = run_max if n >= 1 else np.nan
            RAW[ci] = np.nan
            ci += 1
        # psi from the same uniform
        if psi_a == 1.0:
            psi = np.ceil(1.0 / u)
        elif psi_a == 0.5:
            psi = np.ceil(1.0 / (u * u))
        else:
            psi = np.ceil(u ** (-inv_psi))
        ssum += psi
        refresh -= 1
        if refresh <= 0:
            # conservative (stale thresholds only over-trigger):
            # next record needs phi > run_max * ssum
            u_thr = _powerlog_tail(run_max * ssum, phi_a, phi_q, phi_r,
                                   phi_C) if run_max > 0.0 else 2.0
            refresh = 1024
    return run_max
