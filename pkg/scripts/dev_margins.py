"""Development-time margin measurements for the acceptance thresholds.

Not part of the package or the test suite; results are recorded in the
working notes and pinned into test tolerances.
"""

import time

import numpy as np

from cusplab.chains import (IidProcessSpec, RenewalChainSpec,
                            sums_vs_maxima_run, tanny_check, tower_ratio_run)
from cusplab.distributions import EmpiricalDistribution, ks_two_sample
from cusplab.maps import MapParams, iterate_table
from cusplab.orbits import (OrbitConfig, dk_experiment, mass_escape,
                            ratio_experiment, run_orbits,
                            empirical_truncated_expectation)
from cusplab.regvar import (normalizing_sequence_abstract,
                            normalizing_sequence_cusps)


def clock(label, fn):
    t0 = time.perf_counter()
    out = fn()
    print(f"[{time.perf_counter() - t0:7.1f}s] {label}: {out}", flush=True)
    return out


def crit7_weak_law():
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 6, n_trials=2000, seed=77)
    d = dk_experiment(cfg)
    med = d.sample.median()
    return f"median={med:.4f} (need [0.7,1.3])"


def crit9_ratio_fall():
    p = MapParams(c=0.5, p0=1.5, p1=3.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 7, n_trials=500, seed=77,
                      checkpoints=(10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7))
    r = ratio_experiment(cfg)
    meds = {int(n): float(m) for n, m in zip(r.checkpoints, r.median_ratio)}
    fall = meds[10 ** 4] / meds[10 ** 7]
    return f"medians={meds} fall={fall:.2f} (need >=5)"


def crit10_tower():
    spec = RenewalChainSpec.power_lifetime()
    finals = []
    viol = 0
    for t in range(200):
        run = tower_ratio_run(spec, 10 ** 7, seed=77, trial=t,
                              checkpoints=(10 ** 7,))
        finals.append(float(run.ratio[-1]))
        viol += run.violations
    finals = np.array(finals)
    frac = float(np.mean(np.abs(finals - 1.0) <= 0.05))
    return f"frac|R-1|<=0.05: {frac:.3f} (need >=0.90), violations={viol}"


def crit11b_convergent():
    phi = __import__("cusplab.regvar", fromlist=["DiscreteHeavyTail"]) \
        .DiscreteHeavyTail.power_log(1.0, 3.0)
    psi = __import__("cusplab.regvar", fromlist=["DiscreteHeavyTail"]) \
        .DiscreteHeavyTail.power_log(1.0)
    spec = IidProcessSpec(phi=phi, psi=psi, classification="convergent")
    finals = []
    for t in range(200):
        run = sums_vs_maxima_run(spec, 10 ** 7, seed=77, trial=t,
                                 checkpoints=(10 ** 6, 10 ** 7))
        finals.append(float(run.raw[-1]))
    finals = np.array(finals)
    frac = float(np.mean(np.where(np.isfinite(finals), finals <= 0.1, False)))
    return f"frac raw<=0.1 at 1e7: {frac:.3f} (need >=0.90)"


def crit11a_divergent():
    phi = __import__("cusplab.regvar", fromlist=["DiscreteHeavyTail"]) \
        .DiscreteHeavyTail.power_log(0.5)
    spec = IidProcessSpec.from_tails(phi, phi)
    count = 0
    for t in range(200):
        run = sums_vs_maxima_run(spec, 10 ** 6, seed=77, trial=t,
                                 checkpoints=(10 ** 6,))
        if run.run_max[-1] > 100.0:
            count += 1
    return f"frac runmax>100 at 1e6: {count / 200:.3f} (need >=0.90)"


def crit13_cross():
    p = MapParams(c=0.5, p0=2.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 6, n_trials=60, seed=20)
    run = run_orbits(cfg, want_returns=True, returns_target="Y")
    grid = np.unique(np.geomspace(1, 10 ** 5, 200).astype(np.int64))
    LA = empirical_truncated_expectation(run.records, "A", grid)
    LB = empirical_truncated_expectation(run.records, "B", grid)
    cg = np.array([10 ** 5], dtype=np.int64)
    ca = normalizing_sequence_abstract(LA, LB, 0.5, cg)
    table = iterate_table(p, 10 ** 5)
    cc = normalizing_sequence_cusps(p, table, cg)
    ra = float(ca.c[-1])
    rc = float(cc.c[-1])
    return f"abstract={ra:.1f} cusps={rc:.1f} ratio={ra / rc:.3f} (need within 15%)"


def escape_fraction():
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 7, n_trials=20, seed=4,
                      eps_mid=0.1)
    vals = mass_escape(cfg)
    return f"mid fraction at 1e7 (eps=0.1): {vals[-1]:.4f} (need <=0.1)"


def ab_fraction():
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 6, n_trials=100, seed=4)
    run = run_orbits(cfg, want_returns=False)
    fr = np.mean([(t.s_a[-1] + t.s_b[-1]) / 10 ** 6 for t in run.traces])
    return f"mean S(A u B)/n at 1e6 (delta=0.01): {fr:.4f} (need >=0.9)"


def dk_m_variant():
    p = MapParams(c=0.5, p0=2.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 6, n_trials=2000, seed=77)
    d1 = dk_experiment(cfg)
    d2 = dk_experiment(cfg, m_sets=((p.c, 0.99),))
    ks = ks_two_sample(d1.sample, d2.sample)
    return f"two-sample KS M=(c,1) vs (c,0.99): {ks:.4f} (need <=0.1)"


def ratio_symmetry():
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 5, n_trials=1000, seed=9)
    r = ratio_experiment(cfg)
    fin = r.ratio_final[~np.isnan(r.ratio_final)]
    ks = ks_two_sample(EmpiricalDistribution(fin),
                       EmpiricalDistribution(1.0 / fin))
    return f"two-sample KS R vs 1/R: {ks:.4f} (need <=0.05)"


def tanny_margin():
    spec = RenewalChainSpec.power_lifetime()
    finals = []
    renew = 0
    for t in range(100):
        run = tanny_check(spec, 10 ** 7, seed=31, trial=t,
                          checkpoints=(10 ** 7,))
        finals.append(float(run.x_over_n[-1]))
        renew += int(run.best_at_renewal)
    frac = float(np.mean(np.array(finals) <= 0.01))
    return f"frac X/n<=0.01 at 1e7: {frac:.3f} (need >=0.95), best_at_renewal={renew}/100"


def ltails():
    p = MapParams(c=0.5, p0=2.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 6, n_trials=60, seed=20)
    run = run_orbits(cfg, want_returns=True, returns_target="Y")
    grid = np.unique(np.geomspace(1, 10 ** 4, 120).astype(np.int64))
    LA = empirical_truncated_expectation(run.records, "A", grid)
    LB = empirical_truncated_expectation(run.records, "B", grid)
    ra = LA.value(2 * 10 ** 3) / LA.value(10 ** 3)
    rb = LB.value(2 * 10 ** 3) / LB.value(10 ** 3)
    return (f"L_A(2t)/L_A(t)={ra:.3f} (target sqrt2~1.414 within 15%), "
            f"L_B(2t)/L_B(t)={rb:.3f} (target 1 within 10%)")


if __name__ == "__main__":
    clock("crit7 weak law", crit7_weak_law)
    clock("crit9 ratio fall", crit9_ratio_fall)
    clock("crit10 tower", crit10_tower)
    clock("crit11a divergent", crit11a_divergent)
    clock("crit11b convergent", crit11b_convergent)
    clock("crit13 cross-consistency", crit13_cross)
    clock("mass escape", escape_fraction)
    clock("A u B fraction", ab_fraction)
    clock("dk M-variant", dk_m_variant)
    clock("ratio symmetry", ratio_symmetry)
    clock("tanny margin", tanny_margin)
    clock("empirical L tails", ltails)
