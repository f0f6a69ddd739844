"""Second margin pass: delta sweep for the ratio-extremes criterion,
re-powered cross-consistency, and oracle freezes for the log-slow examples."""

import time

import numpy as np

from cusplab.maps import MapParams, iterate_table
from cusplab.orbits import (OrbitConfig, dk_experiment, mass_escape,
                            ratio_experiment, run_orbits,
                            empirical_truncated_expectation)
from cusplab.distributions import EmpiricalDistribution, ks_two_sample
from cusplab.regvar import (normalizing_sequence_abstract,
                            normalizing_sequence_cusps)
from cusplab.chains import (RenewalChainSpec, tanny_check,
                            IidProcessSpec, sums_vs_maxima_run)
from cusplab.regvar import DiscreteHeavyTail


def clock(label, fn):
    t0 = time.perf_counter()
    out = fn()
    print(f"[{time.perf_counter() - t0:7.1f}s] {label}: {out}", flush=True)
    return out


def crit8_delta(delta, trials=500):
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 7, n_trials=trials, seed=77,
                      delta_a=delta, delta_b=delta)
    r = ratio_experiment(cfg)
    return f"delta={delta}: joint frac(max>=5, min<=0.2) = {r.joint_fraction(5.0, 0.2):.3f}"


def crit13_big():
    p = MapParams(c=0.5, p0=2.0, p1=1.0)
    out = []
    for seed in (20, 99):
        cfg = OrbitConfig(map=p, n_steps=10 ** 7, n_trials=100, seed=seed)
        run = run_orbits(cfg, want_returns=True, returns_target="Y")
        grid = np.unique(np.geomspace(1, 10 ** 5, 200).astype(np.int64))
        LA = empirical_truncated_expectation(run.records, "A", grid)
        LB = empirical_truncated_expectation(run.records, "B", grid)
        cg = np.array([10 ** 5], dtype=np.int64)
        ca = normalizing_sequence_abstract(LA, LB, 0.5, cg)
        table = iterate_table(p, 10 ** 5)
        cc = normalizing_sequence_cusps(p, table, cg)
        out.append(f"seed{seed}: ratio={float(ca.c[-1]) / float(cc.c[-1]):.3f}")
    return " | ".join(out)


def dk_variant_small():
    p = MapParams(c=0.5, p0=2.0, p1=1.0)
    rows = []
    for n in (10 ** 4, 10 ** 5, 10 ** 6):
        cfg = OrbitConfig(map=p, n_steps=n, n_trials=600, seed=77)
        d1 = dk_experiment(cfg)
        d2 = dk_experiment(cfg, m_sets=((p.c, 0.99),))
        rows.append(f"n={n}: KS={ks_two_sample(d1.sample, d2.sample):.3f}")
    return " | ".join(rows)


def ab_oracle():
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 6, n_trials=100, seed=4,
                      delta_a=0.1, delta_b=0.1)
    run = run_orbits(cfg, want_returns=False)
    fr = [np.mean([(t.s_a[i] + t.s_b[i]) / t.checkpoints[i]
                   for t in run.traces])
          for i in range(len(run.traces[0].checkpoints))]
    return "frac by checkpoint (delta=0.1): " + \
        ", ".join(f"{v:.3f}" for v in fr)


def escape_decades():
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=10 ** 7, n_trials=20, seed=4,
                      eps_mid=0.1)
    vals = mass_escape(cfg)
    return "mid fraction by decade: " + ", ".join(f"{v:.4f}" for v in vals)


def tanny_start_peak():
    spec = RenewalChainSpec.power_lifetime()
    bad = 0
    for t in range(100):
        run = tanny_check(spec, 10 ** 6, seed=31, trial=t)
        start_peak = max(run.x_start - 1, 0) / 1.0
        if not (run.best_at_renewal or run.best_ratio == start_peak):
            bad += 1
    return f"violations of (at renewal OR initial peak): {bad}/100"


def svm_seed_scan():
    phi = DiscreteHeavyTail.power_log(0.5)
    spec = IidProcessSpec.from_tails(phi, phi)
    hits = []
    for t in range(12):
        run = sums_vs_maxima_run(spec, 10 ** 6, seed=2026, trial=t)
        hits.append((t, float(run.final_run_max)))
    return "; ".join(f"t{t}:{v:.0f}" for t, v in hits)


if __name__ == "__main__":
    clock("crit8 delta=0.05", lambda: crit8_delta(0.05))
    clock("crit8 delta=0.1", lambda: crit8_delta(0.1))
    clock("crit8 delta=0.2", lambda: crit8_delta(0.2))
    clock("crit13 big", crit13_big)
    clock("dk variant by n", dk_variant_small)
    clock("A u B oracle", ab_oracle)
    clock("escape decades", escape_decades)
    clock("tanny start peak", tanny_start_peak)
    clock("svm seed scan", svm_seed_scan)
