"""Calibration for chain tests: python mirrors of the compiled kernels plus
frozen-value measurement."""
import math
import time

import numpy as np
from scipy.special import zeta

from cusplab import (DiscreteHeavyTail, IidProcessSpec, RenewalChainSpec,
                     TowerChainState, classify_integral_criterion,
                     sums_vs_maxima_run, tanny_check, tower_ratio_run)

T0 = time.time()
MASK = (1 << 64) - 1


def log(msg):
    print(f"[{time.time()-T0:7.1f}s] {msg}", flush=True)


def sm64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def stream(seed, trial):
    s = (seed ^ ((trial * 0xA3AAA15E6B8F0330) & MASK)) & MASK
    s, _ = sm64(s)
    return s


def unit(state):
    state, z = sm64(state)
    return state, (z >> 11) * 2.0 ** -53


def em_tail(k, s):
    return k ** (1.0 - s) / (s - 1.0) - 0.5 * k ** (-s) \
        + (s / 12.0) * k ** (-s - 1.0)


def draw_lifetime(u, head_cdf, s_exp):
    cutoff = len(head_cdf)
    if u <= head_cdf[-1]:
        return int(np.searchsorted(head_cdf, u, side="left")) + 1
    rem = 1.0 - head_cdf[-1]
    target = (1.0 - u) / rem * em_tail(float(cutoff), s_exp)
    lo_k = float(cutoff)
    hi_k = 2.0 * lo_k
    while em_tail(hi_k, s_exp) > target:
        hi_k *= 2.0
        if hi_k > 1e18:
            break
    for _ in range(200):
        mid = 0.5 * (lo_k + hi_k)
        if em_tail(mid, s_exp) > target:
            lo_k = mid
        else:
            hi_k = mid
        if hi_k - lo_k < 0.5:
            break
    k = int(np.ceil(hi_k))
    while k > cutoff and em_tail(float(k - 1), s_exp) <= target:
        k -= 1
    return k


def mirror_tower(spec, n_steps, seed, trial, chks):
    st = TowerChainState(0, 0)
    s = stream(seed, trial)
    head = [float(v) for v in spec.head_cdf]
    root = a = b = viol = ren = 0
    SA, SB, LVL = [], [], []
    ci = 0
    for n in range(n_steps):
        if st.in_a:
            a += 1
        elif st.in_b:
            b += 1
        if abs(a - b) > root:
            viol += 1
        if st.j == 2 * st.k + 1 and st.k == 0:
            s, u = unit(s)
            if u <= 0.0:
                u = 2.0 ** -53
            kk = draw_lifetime(u, head, spec.s_exp)
            ren += 1
            root = kk - 1
            st = TowerChainState(kk - 1, 0)
        else:
            st = st.advance(None)
        if ci < len(chks) and n + 1 == chks[ci]:
            SA.append(a)
            SB.append(b)
            LVL.append(root)
            ci += 1
    return SA, SB, LVL, viol, ren


def mirror_svm_same(n_steps, seed, trial, chks):
    s = stream(seed, trial)
    ssum = 0.0
    run_max = 0.0
    RM, RAW = [], []
    ci = 0
    final = 0.0
    for n in range(n_steps):
        s, u = unit(s)
        if u <= 0.0:
            u = 2.0 ** -53
        phi = np.ceil(1.0 / (u * u))
        raw = math.nan
        if n >= 1:
            raw = phi / ssum
            if raw > run_max:
                run_max = raw
        ssum += phi
        if ci < len(chks) and n + 1 == chks[ci]:
            RM.append(run_max if n >= 1 else math.nan)
            RAW.append(raw)
            ci += 1
        final = run_max
    return RM, RAW, final


def pl_tail(x, a, q, r, C):
    if x < 1.0:
        return 1.0
    t = C * x ** (-a)
    if q != 0.0:
        t *= (1.0 + np.log(x)) ** (-q)
    if r != 0.0:
        t *= (1.0 + np.log(1.0 + np.log(x))) ** (-r)
    return t if t < 1.0 else 1.0


def pl_smallest_k(u, a, q, r, C):
    k = 1
    while pl_tail(float(k), a, q, r, C) >= u:
        k *= 2
        if k > 4e18:
            break
    lo, hi = max(k // 2, 1), k
    while lo < hi:
        mid = (lo + hi) // 2
        if pl_tail(float(mid), a, q, r, C) >= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


def mirror_svm_pair(n_steps, seed, trial, chks, psi_a, pa, pq, pr, pC):
    s = stream(seed, trial)
    ssum = 0.0
    run_max = 0.0
    RM, RAW = [], []
    ci = 0
    for n in range(n_steps):
        s, u = unit(s)
        if u <= 0.0:
            u = 2.0 ** -53
        raw = math.nan
        if n >= 1:
            phi = float(pl_smallest_k(u, pa, pq, pr, pC))
            raw = phi / ssum
            if raw > run_max:
                run_max = raw
        if ci < len(chks) and n + 1 == chks[ci]:
            RM.append(run_max if n >= 1 else math.nan)
            RAW.append(raw)
            ci += 1
        if psi_a == 1.0:
            psi = np.ceil(1.0 / u)
        elif psi_a == 0.5:
            psi = np.ceil(1.0 / (u * u))
        else:
            psi = np.ceil(u ** (-1.0 / psi_a))
        ssum += psi
    return RM, RAW, run_max


def mirror_base(spec, n_steps, seed, trial, x0, chks, n_occ):
    s = stream(seed, trial)
    head = [float(v) for v in spec.head_cdf]
    x = x0
    occ = [0] * n_occ
    best = -1.0
    best_ren = False
    just = False
    XR = []
    ci = 0
    for n in range(n_steps):
        if x < n_occ:
            occ[x] += 1
        if n >= 1:
            v = x / n
            if v > best:
                best = v
                best_ren = just
        if x > 0:
            x -= 1
            just = False
        else:
            s, u = unit(s)
            if u <= 0.0:
                u = 2.0 ** -53
            x = draw_lifetime(u, head, spec.s_exp) - 1
            just = True
        if ci < len(chks) and n + 1 == chks[ci]:
            XR.append(x / (n + 1))
            ci += 1
    return XR, occ, best, best_ren


# --- 1. mirror equality ---------------------------------------------------
spec50 = RenewalChainSpec.power_lifetime(2.5, cutoff=50)
chks = (10, 100, 1000, 4000)
run = tower_ratio_run(spec50, 4000, seed=11, checkpoints=chks)
SA, SB, LVL, viol, ren = mirror_tower(spec50, 4000, 11, 0, chks)
log(f"tower mirror: SA={np.array_equal(run.s_a, SA)} "
    f"SB={np.array_equal(run.s_b, SB)} LVL={np.array_equal(run.renewal_level, LVL)} "
    f"viol={run.violations == viol}({run.violations}) ren={run.renewals == ren}({run.renewals})")

phi_h = DiscreteHeavyTail.power_log(0.5)
svm_spec = IidProcessSpec.from_tails(phi_h, phi_h)
chks2 = (2, 10, 500, 2000)
r = sums_vs_maxima_run(svm_spec, 2000, seed=5, checkpoints=chks2)
RM, RAW, fin = mirror_svm_same(2000, 5, 0, chks2)
log(f"svm-same mirror: RM={np.array_equal(r.run_max, RM)} "
    f"RAW={np.allclose(r.raw, RAW, rtol=0, atol=0, equal_nan=True)} "
    f"final={r.final_run_max == fin} (final={fin:.4f}) class={svm_spec.classification}")

phi32 = DiscreteHeavyTail.power_log(1.0, 0.0, 1.0)
psi1 = DiscreteHeavyTail.power_log(1.0)
pair32 = IidProcessSpec.from_tails(phi32, psi1)
r2 = sums_vs_maxima_run(pair32, 2000, seed=7, checkpoints=chks2)
RM2, RAW2, fin2 = mirror_svm_pair(2000, 7, 0, chks2, 1.0, 1.0, 0.0, 1.0, 1.0)
log(f"svm-pair mirror: RM={np.array_equal(r2.run_max, RM2)} "
    f"RAW={np.allclose(r2.raw, RAW2, rtol=0, atol=0, equal_nan=True)} "
    f"final={r2.final_run_max == fin2} (final={fin2:.4f}) class={pair32.classification}")

spec_t = RenewalChainSpec.power_lifetime(2.5, cutoff=200)
tn = tanny_check(spec_t, 3000, seed=13, checkpoints=(10, 100, 3000),
                 n_occup_states=8, trial=2)
XR, occ, best, best_ren = mirror_base(spec_t, 3000, 13, 2, tn.x_start,
                                      (10, 100, 3000), 8)
log(f"base mirror: XR={np.array_equal(tn.x_over_n, XR)} "
    f"occ={np.array_equal(tn.occupation, occ)} best={tn.best_ratio == best} "
    f"ren={tn.best_at_renewal == best_ren} x0={tn.x_start}")

# --- 2. tower at scale ----------------------------------------------------
spec = RenewalChainSpec.power_lifetime(2.5)
for sd in (101, 102, 103, 104, 105):
    tw = tower_ratio_run(spec, 10**6, seed=sd)
    log(f"tower 1e6 seed {sd}: ratio={tw.ratio[-1]:.6f} viol={tw.violations} "
        f"ren={tw.renewals}")

# --- 3. svm same-power frozen seeds ----------------------------------------
for tr in range(5):
    rr = sums_vs_maxima_run(svm_spec, 10**6, seed=2026, trial=tr)
    log(f"svm a=1/2 seed 2026 trial {tr}: final={rr.final_run_max:.6f} "
        f"exceeds100={rr.final_run_max > 100}")

# --- 4. convergent pair ----------------------------------------------------
conv = IidProcessSpec.from_tails(DiscreteHeavyTail.power_log(1.0, 3.0), psi1)
log(f"convergent pair class={conv.classification}")
stuck = 0
finals = []
for sd in range(25):
    rc = sums_vs_maxima_run(conv, 10**5, seed=sd)
    finals.append(rc.raw[-1])
    if rc.run_max[-1] == rc.run_max[-2]:
        stuck += 1
log(f"convergent: stuck-final-decade {stuck}/25, "
    f"median raw final={np.median(finals):.6f}, "
    f"seed0 final raw={finals[0]:.10g}")

# --- 5. example-pair regression --------------------------------------------
r32 = sums_vs_maxima_run(pair32, 10**5, seed=7)
log(f"3.2 pair seed 7 n=1e5: final={r32.final_run_max:.10g}")

# --- 6. tanny at scale ------------------------------------------------------
viol6 = 0
for tr in range(100):
    t6 = tanny_check(spec, 10**5, seed=2027, trial=tr)
    ok = t6.best_at_renewal or t6.best_ratio == max(t6.x_start - 1, 0)
    if not ok:
        viol6 += 1
log(f"tanny disjunction violations: {viol6}/100")
small = 0
for tr in range(100):
    t7 = tanny_check(spec, 10**6, seed=2027, trial=tr)
    if t7.x_over_n[-1] <= 0.01:
        small += 1
log(f"tanny final<=0.01 at 1e6: {small}/100")
t8 = tanny_check(spec, 10**6, seed=2027, trial=0)
log(f"tanny seed 2027 trial 0: x0={t8.x_start} best={t8.best_ratio:.10g} "
    f"at_ren={t8.best_at_renewal} final={t8.x_over_n[-1]:.10g}")

# --- 7. occupation vs invariant pmf at 1e7 ---------------------------------
mu = spec.stationary_pmf(11)
for sd in (1, 2, 3):
    t9 = tanny_check(spec, 10**7, seed=sd, n_occup_states=11)
    emp = t9.occupation / 10**7
    se = np.sqrt(mu * (1 - mu) / 10**7)
    worst = float(np.max(np.abs(emp - mu) / se))
    log(f"occupation seed {sd}: worst |emp-mu|/se over k<=10 = {worst:.3f}")

# --- 8. exact constants -----------------------------------------------------
log(f"mean: {spec.mean():.16g} vs zeta ratio {zeta(1.5,1)/zeta(2.5,1):.16g}")
log(f"mu[0:3] = {mu[:3]}  sum(mu_0..10)={mu.sum():.6f}")
