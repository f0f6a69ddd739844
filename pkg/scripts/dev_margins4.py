"""Criterion-8 joint fraction for large delta (halves and near-halves)."""
import sys
import time

import numpy as np

from cusplab import MapParams, OrbitConfig, ratio_experiment


def joint_at(delta, n=10**7, trials=500, seed=77):
    cfg = OrbitConfig(map=MapParams(c=0.5, p0=1.0, p1=1.0),
                      n_steps=n, n_trials=trials, seed=seed,
                      delta_a=delta, delta_b=delta)
    res = ratio_experiment(cfg)
    mx = res.run_max
    mn = res.run_min
    ok_max = np.nan_to_num(mx, nan=-1.0) >= 5.0
    ok_min = np.nan_to_num(mn, nan=1e9) <= 0.2
    joint = float(np.mean(ok_max & ok_min))
    return joint, float(np.mean(ok_max)), float(np.mean(ok_min)), int(np.sum(np.isnan(mx)))


for d in (0.5, 0.4, 0.3):
    t0 = time.time()
    j, pmax, pmin, und = joint_at(d)
    print(f"[{time.time()-t0:7.1f}s] delta={d}: joint={j:.3f} "
          f"p(max>=5)={pmax:.3f} p(min<=0.2)={pmin:.3f} undefined={und}",
          flush=True)
