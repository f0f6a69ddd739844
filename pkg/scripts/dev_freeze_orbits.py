"""One-off calibration for orbit-engine test expectations."""
import time

import numpy as np

from cusplab import (EmpiricalDistribution, MapParams, OrbitConfig,
                     dk_experiment, duality_experiment,
                     empirical_truncated_expectation, ks_two_sample,
                     mass_escape, ratio_experiment, run_orbits)

T0 = time.time()


def log(msg):
    print(f"[{time.time()-T0:7.1f}s] {msg}", flush=True)


sym = MapParams(c=0.5, p0=1.0, p1=1.0)
steep = MapParams(c=0.5, p0=2.0, p1=1.0)

# (a) empirical truncated-expectation ratios, steep map
cfg_a = OrbitConfig(map=steep, n_steps=10**6, n_trials=30, seed=11)
run_a = run_orbits(cfg_a, want_returns=True, returns_target="Y")
grid = np.geomspace(10.0, 1e4, 25)
LA = empirical_truncated_expectation(run_a.records, "A", grid,
                                     declared_index=0.5)
LB = empirical_truncated_expectation(run_a.records, "B", grid)
t_probe = grid[-1] / 2.0
ra = LA.value(2 * t_probe) / LA.value(t_probe)
rb = LB.value(2 * t_probe) / LB.value(t_probe)
log(f"(a) LA ratio={ra:.6f} (target sqrt2={np.sqrt(2):.4f}) "
    f"LB ratio={rb:.6f} massA={LA.mass:.6f} massB={LB.mass:.6f} "
    f"idxA={LA.empirical_index():.4f} idxB={LB.empirical_index():.4f}")

# (b) weak-law median at desk scale
cfg_b = OrbitConfig(map=sym, n_steps=10**5, n_trials=200, seed=5)
dk_b = dk_experiment(cfg_b)
log(f"(b) alpha=1 median={dk_b.sample.quantile(0.5):.6f} ks={dk_b.ks:.4f} "
    f"alpha={dk_b.alpha}")

# (c) M-variant separation (finite-symmetric-difference hypothesis matters)
for n in (10**4, 10**5):
    cfg_c = OrbitConfig(map=steep, n_steps=n, n_trials=400, seed=9)
    full = dk_experiment(cfg_c)
    trunc = dk_experiment(cfg_c, normalizer=full.normalizer,
                          m_sets=((0.5, 0.99),))
    d = ks_two_sample(full.sample, trunc.sample)
    log(f"(c) n={n}: two-sample KS full-vs-truncated = {d:.6f}")

# (d) ratio symmetry R vs 1/R
cfg_d = OrbitConfig(map=sym, n_steps=10**5, n_trials=1000, seed=13)
res_d = ratio_experiment(cfg_d)
fin = res_d.ratio_final
nan_d = int(np.sum(np.isnan(fin)))
ok = fin[~np.isnan(fin)]
ks_d = ks_two_sample(EmpiricalDistribution(ok), EmpiricalDistribution(1.0 / ok))
log(f"(d) undefined={nan_d} ks(R,1/R)={ks_d:.6f}")

# (e) mass escape decay
cfg_e = OrbitConfig(map=sym, n_steps=10**6, n_trials=100, seed=17)
esc = mass_escape(cfg_e, 0.1)
log(f"(e) eps=0.1 decades={[round(float(v), 6) for v in esc]}")
cfg_e2 = OrbitConfig(map=sym, n_steps=10**4, n_trials=20, seed=17)
esc2 = mass_escape(cfg_e2, 1e-9)
log(f"(e2) eps=1e-9 all-ones={bool(np.all(esc2 == 1.0))} vals={esc2}")

# (f) occupation additivity with matching partition
cfg_f = OrbitConfig(map=sym, n_steps=10**5, n_trials=10, seed=19,
                    delta_a=0.25, delta_b=0.25, eps_mid=0.25)
run_f = run_orbits(cfg_f, want_returns=False)
worst = 0
for t in run_f.traces:
    gap = t.s_a + t.s_b + t.s_mid - t.checkpoints
    worst = max(worst, int(np.max(np.abs(gap))))
log(f"(f) additivity worst |S_A+S_B+S_mid - n| = {worst}")

# (g) undefined-ratio bookkeeping at tiny horizons
cfg_g = OrbitConfig(map=sym, n_steps=300, n_trials=50, seed=23,
                    delta_a=0.001, delta_b=0.001,
                    checkpoints=(100, 300))
res_g = ratio_experiment(cfg_g)
nan_g = int(np.sum(np.isnan(res_g.run_max)))
jf = res_g.joint_fraction(1.0, 1.0)
log(f"(g) NaN trials={nan_g}/50 joint_fraction(1,1)={jf:.4f} "
    f"qmax(0.5)={res_g.quantile_run_max(0.5):.4f}")

# (h) duality
cfg_h = OrbitConfig(map=sym, n_steps=10**5, n_trials=50, seed=29)
log(f"(h) duality violations (M=(c,1]): {duality_experiment(cfg_h)}")
cfg_h2 = OrbitConfig(map=sym, n_steps=10**4, n_trials=5, seed=29,
                     m_sets=((0.0, 1.0),))
log(f"(h2) duality violations (M=(0,1]): {duality_experiment(cfg_h2)}")

# (i) A-union-B occupation at a feasible neighborhood size
cfg_i = OrbitConfig(map=sym, n_steps=10**5, n_trials=20, seed=31,
                    delta_a=0.4, delta_b=0.4)
run_i = run_orbits(cfg_i, want_returns=False)
fr = np.mean([(t.s_a[-1] + t.s_b[-1]) / t.checkpoints[-1]
              for t in run_i.traces])
log(f"(i) mean S(A u B)/n at delta=0.4, n=1e5: {fr:.6f}")

# (j) stagnation counter on ordinary runs
stag = max(t.stagnation for t in run_i.traces)
log(f"(j) max stagnation = {stag}")

# (k) alternation of Y-visit sides
alt = all(r.alternates() for r in run_a.records)
log(f"(k) all Y-records alternate (steep map, 30 trials): {alt}")
