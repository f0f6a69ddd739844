"""Second calibration pass: determinism, degenerate starts, cheap M-variant."""
import numpy as np

from cusplab import (EmpiricalDistribution, MapParams, OrbitConfig,
                     dk_experiment, ks_two_sample, run_orbits)

sym = MapParams(c=0.5, p0=1.0, p1=1.0)

# prefix property + bit-determinism
cfg3 = OrbitConfig(map=sym, n_steps=2000, n_trials=3, seed=41)
cfg5 = OrbitConfig(map=sym, n_steps=2000, n_trials=5, seed=41)
r3a = run_orbits(cfg3)
r3b = run_orbits(cfg3)
r5 = run_orbits(cfg5)
same = all(
    np.array_equal(a.s_a, b.s_a) and
    np.array_equal(a.ratio, b.ratio, equal_nan=True) and
    a.initial_point == b.initial_point
    for a, b in zip(r3a.traces, r3b.traces))
prefix = all(
    np.array_equal(a.s_a, b.s_a) and
    np.array_equal(a.ratio, b.ratio, equal_nan=True) and
    a.initial_point == b.initial_point
    for a, b in zip(r3a.traces, r5.traces[:3]))
print("rerun identical:", same, " prefix:", prefix)
print("record-x0 == trace-x0:",
      all(t.initial_point == r.initial_point
          for t, r in zip(r5.traces, r5.records)))

# degenerate start near the left fixed point
cfg0 = OrbitConfig(map=sym, n_steps=1000, n_trials=4, seed=7,
                   init_range=(0.0, 1e-15))
run0 = run_orbits(cfg0, want_returns=False)
t0 = run0.traces[0]
print("fixed-ish: s_a==chk", all(np.array_equal(t.s_a, t.checkpoints)
                                 for t in run0.traces),
      "s_b==0", all(np.all(t.s_b == 0) for t in run0.traces),
      "s_m==0", all(np.all(t.s_m == 0) for t in run0.traces),
      "ratio NaN", all(np.all(np.isnan(t.ratio)) for t in run0.traces),
      "runmax NaN", all(np.all(np.isnan(t.run_max)) for t in run0.traces))

# fully frozen floating point: increments beneath one ulp
cfgz = OrbitConfig(map=sym, n_steps=500, n_trials=3, seed=7,
                   init_range=(1e-20, 2e-20))
runz = run_orbits(cfgz, want_returns=False)
print("stagnation at sub-ulp start:", [t.stagnation for t in runz.traces])

# n_steps = 0
cfge = OrbitConfig(map=sym, n_steps=0, n_trials=2, seed=1)
rune = run_orbits(cfge)
print("n_steps=0: chk", cfge.checkpoints, "traces", len(rune.traces),
      "records", len(rune.records), "s_a shape", rune.traces[0].s_a.shape)

# symmetric-map M-variant (cheap route for the unit test)
for n in (10**4, 10**5):
    cfg = OrbitConfig(map=sym, n_steps=n, n_trials=400, seed=9)
    full = dk_experiment(cfg)
    trunc = dk_experiment(cfg, normalizer=full.normalizer,
                          m_sets=((0.5, 0.99),))
    print(f"sym M-variant n={n}: ks={ks_two_sample(full.sample, trunc.sample):.6f}")

# record truncation: cap well below the visit count
cfgt = OrbitConfig(map=sym, n_steps=10**4, n_trials=2, seed=3)
runt = run_orbits(cfgt, max_returns=50)
for r in runt.records:
    print(f"trunc trial {r.trial}: total={r.total_visits} kept={r.phis.size} "
          f"alternates={r.alternates()}")
