"""Final margin scan for the ratio-oscillation joint criterion: small-delta
sweep at n=1e7, with one-sided probabilities to locate the binding clause."""
import time

import numpy as np

from cusplab import MapParams, OrbitConfig
from cusplab.orbits import ratio_experiment


def clock(label, fn):
    t0 = time.time()
    out = fn()
    print(f"[{time.time() - t0:7.1f}s] {label}: {out}", flush=True)
    return out


def joint_at(delta, n=10**7, trials=500, seed=77):
    p = MapParams(c=0.5, p0=1.0, p1=1.0)
    cfg = OrbitConfig(map=p, n_steps=n, n_trials=trials, seed=seed,
                      delta_a=delta, delta_b=delta)
    res = ratio_experiment(cfg)
    rmax = res.run_max
    rmin = res.run_min
    ok = np.isfinite(rmax) & np.isfinite(rmin)
    joint = float(np.mean(ok & (rmax >= 5.0) & (rmin <= 0.2)))
    pmax = float(np.mean(ok & (rmax >= 5.0)))
    pmin = float(np.mean(ok & (rmin <= 0.2)))
    return (f"delta={delta}: joint={joint:.3f} p(max>=5)={pmax:.3f} "
            f"p(min<=0.2)={pmin:.3f} undefined={int((~ok).sum())}")


for d in (0.005, 0.002, 0.001, 0.0005):
    clock(f"crit8 delta={d}", lambda d=d: joint_at(d))
