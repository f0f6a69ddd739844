"""Freeze oracle values for module tests: oscillation extremes, normalizer
constants, distribution-builder asymptotics, CDF accuracy, and statistical
margins for the sampler contracts."""
import math
import time

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from cusplab import (DiscreteHeavyTail, EmpiricalDistribution, MapParams,
                     MLSpec, StableSpec, TruncatedExpectation,
                     construct_oscillating_pair, distribution_from_L,
                     iterate_table, ks_statistic, lil_normalizer, ml_cdf,
                     ml_moment, normalizing_sequence_abstract,
                     normalizing_sequence_cusps, oscillation_check,
                     sample_ml, sample_stable)
from cusplab.chains import IidProcessSpec, sums_vs_maxima_run

from cusplab.distributions import stream


def clock(label, fn):
    t0 = time.time()
    out = fn()
    print(f"[{time.time() - t0:7.1f}s] {label}: {out}", flush=True)
    return out


# 1-4: oscillating pair ------------------------------------------------------

def osc6():
    p = construct_oscillating_pair(6)
    mn, mx = oscillation_check(p)
    ge = p.dominance_gaps("even")
    go = p.dominance_gaps("odd")
    return (f"breakpoints={p.taus.size} min={mn!r} max={mx!r} "
            f"even_gaps={[(n, f'{g:.6f}') for n, g in ge]} "
            f"odd_gaps={[(n, f'{g:.6f}') for n, g in go]} taus={p.taus.tolist()}")


def osc_deep():
    for lv in (20, 30, 40, 50):
        p = construct_oscillating_pair(lv)
        mn, mx = oscillation_check(p)
        print(f"    levels={lv}: min={mn:.6f} max={mx:.6f} "
              f"tau_max={p.taus[-1]:.3e}", flush=True)
    return "done"


def osc9():
    p = construct_oscillating_pair(9)
    ge = p.dominance_gaps("even")
    sv = p.slow_variation_ratio(p.taus[-1] * 0.9, 2.0)
    return f"even_gaps={[(n, f'{g:.4f}') for n, g in ge]} ln3={math.log(3):.4f} sv={sv}"


# 5-6: cusp normalizers ------------------------------------------------------

def cusp_sym():
    par = MapParams(c=0.5, p0=1.0, p1=1.0)
    t = iterate_table(par, 10 ** 6)
    grid = np.array([10.0 ** k for k in range(2, 7)])
    ns = normalizing_sequence_cusps(par, t, grid)
    vals = [f"{n:.0e}:{c / n:.6f}" for n, c in zip(ns.grid, ns.c)]
    return f"c(n)/n by decade: {vals}"


def cusp_21():
    par = MapParams(c=0.5, p0=2.0, p1=1.0)
    t = iterate_table(par, 10 ** 6)
    grid = np.array([10.0 ** k for k in range(3, 7)])
    ns = normalizing_sequence_cusps(par, t, grid)
    vals = [f"{n:.0e}:{c / (math.sqrt(n) * math.log(n)):.6f}"
            for n, c in zip(ns.grid, ns.c)]
    limit = ((0.5 ** 0.5 * 0.5) / (math.gamma(1.5) ** 2)
             * (0.25 * 4 ** 0.5) / ((1 / 3) * 2))
    return f"c/(sqrt n log n) by decade: {vals}; limit={limit!r}"


# 7: abstract normalizer closed-form composition -----------------------------

def abstract_closed_form():
    tb = np.geomspace(3.0, 1e10, 6000)
    L_A = TruncatedExpectation(tb, np.sqrt(tb), declared_index=0.5)
    L_B = TruncatedExpectation(tb, np.log(tb), declared_index=0.0)
    grid = np.array([1e4, 1e5, 1e6])
    ns = normalizing_sequence_abstract(L_A, L_B, 0.5, grid)
    G = math.gamma(1.5) ** 2
    out = []
    for n, c in zip(grid, ns.c):
        y = n / (G * (math.sqrt(n) + math.log(n)))
        exact = brentq(lambda t: t / math.log(t) - y, 3.0, 1e9, xtol=1e-9,
                       rtol=1e-14)
        out.append(f"n={n:.0e}: c={c!r} exact={exact!r} "
                   f"rel={abs(c / exact - 1.0):.2e}")
    return " | ".join(out)


# 8: lil normalizer ----------------------------------------------------------

def lil():
    bgrid = np.geomspace(5.0, 1e9, 5000)
    from cusplab.regvar import TabulatedMonotone
    b = TabulatedMonotone(bgrid, bgrid ** 2)
    grid = np.sort(np.append(np.geomspace(16.0, 1e8, 4000), 100.0))
    bstar, astar = lil_normalizer(b, grid)
    v100 = bstar.value(100.0)
    hand = 1e4 / math.log(math.log(100.0))
    inner = grid[(grid > 50.0) & (grid < 1e7)]
    comp = astar.value(bstar.value(inner)) / inner
    return (f"b*(100)={v100!r} hand={hand!r} "
            f"comp range=({comp.min():.6f},{comp.max():.6f})")


# 9: distribution_from_L -----------------------------------------------------

def dist_from_L():
    d = distribution_from_L(lambda t: np.log1p(t), cutoff=10 ** 5)
    r = float(d.truncated_expectation(10 ** 6)) / math.log(10 ** 6)
    target = 1.0 / math.log(2.0)
    d2 = distribution_from_L(np.sqrt, cutoff=10 ** 5)
    k = 10 ** 4
    tr = float(d2.tail(np.array([k]))[0]) * 2.0 * math.sqrt(k)
    # round trip on the tabulated range
    ts = np.arange(2, 10 ** 5, 977)
    lt = np.log1p(ts) / math.log(2.0)
    rebuilt = np.array([float(d.truncated_expectation(float(t))) for t in ts])
    rt = np.max(np.abs(rebuilt / lt - 1.0))
    dm = distribution_from_L(lambda t: 0.7 * np.minimum(t, 1.0), cutoff=100)
    return (f"log: E[phi^t]/log t={r!r} target={target!r} "
            f"ratio={r / target:.4f}; sqrt tail*2sqrt(k)={tr!r}; "
            f"roundtrip max rel={rt:.3e}; min-case head={dm.head[:4]} "
            f"tail(1)={float(dm.tail(np.array([1.0]))[0])!r}")


# 10-11: ml_cdf accuracy and KS composition ----------------------------------

def cdf_accuracy():
    spec = MLSpec(0.5)
    ys = np.linspace(0.05, 5.0, 21)
    mine = np.array([ml_cdf(spec, float(y)) for y in ys])
    closed = erf(ys / math.sqrt(math.pi))
    import json
    with open("tests/data/ml_cdf_reference.json") as fh:
        ref = json.load(fh)
    tbl = np.array(ref["cdf"])
    return (f"max|cdf-erf|={np.max(np.abs(mine - closed)):.3e} "
            f"max|cdf-table|={np.max(np.abs(mine - tbl)):.3e}")


def ks_composition():
    spec = MLSpec(0.5)
    rng = stream(1234)
    draws = sample_ml(spec, rng, size=10 ** 5)
    grid = np.geomspace(1e-4, 60.0, 2048)
    vals = np.array([ml_cdf(spec, float(y)) for y in grid])

    def cdf(y):
        return float(np.interp(y, grid, vals, left=0.0, right=1.0))

    ks = ks_statistic(EmpiricalDistribution(draws), cdf)
    return f"ks={ks!r}"


# 12-13: sampler contract margins --------------------------------------------

def laplace_margin():
    worst = 0.0
    for alpha in (0.3, 0.5, 0.8):
        rng = stream(42)
        g = sample_stable(StableSpec(alpha), rng, size=10 ** 6)
        for t in (0.5, 1.0, 2.0):
            dev = abs(float(np.mean(np.exp(-t * g))) - math.exp(-t ** alpha))
            worst = max(worst, dev)
    return f"worst dev={worst:.5f} (<=0.01 needed)"


def moment_margin():
    worst = 0.0
    for alpha in (0.3, 0.5, 0.8):
        rng = stream(43)
        y = sample_ml(MLSpec(alpha), rng, size=10 ** 6)
        for n in (1, 2, 3):
            emp = float(np.mean(y ** n))
            se = float(np.std(y ** n, ddof=1)) / math.sqrt(y.size)
            z = abs(emp - ml_moment(MLSpec(alpha), n)) / se
            worst = max(worst, z)
    return f"worst z={worst:.3f} (<=3 needed)"


# 14: sums-vs-maxima divergent growth curve ----------------------------------

def svm_divergent_decades():
    phi = DiscreteHeavyTail.power_log(0.5)
    spec = IidProcessSpec.from_tails(phi, phi)
    chks = np.array([10 ** k for k in range(2, 8)], dtype=np.int64)
    hits = np.zeros(len(chks))
    for k in range(200):
        run = sums_vs_maxima_run(spec, 10 ** 7, seed=123, checkpoints=chks,
                                 trial=k)
        hits += (run.run_max > 100.0).astype(float)
    fr = hits / 200.0
    return "frac(runmax>100) by decade: " + ", ".join(
        f"1e{k + 2}:{f:.3f}" for k, f in enumerate(fr))


clock("osc6", osc6)
clock("osc deep", osc_deep)
clock("osc9", osc9)
clock("cusp sym", cusp_sym)
clock("cusp (2,1)", cusp_21)
clock("abstract closed form", abstract_closed_form)
clock("lil", lil)
clock("dist from L", dist_from_L)
clock("cdf accuracy", cdf_accuracy)
clock("ks composition", ks_composition)
clock("laplace margin", laplace_margin)
clock("moment margin", moment_margin)
clock("svm divergent decades", svm_divergent_decades)
