"""Long-orbit simulation for the two-cusp maps: occupation traces,
return-time records, duality verification, empirical truncated
expectations, normalized occupation experiments, ratio trajectories, and
mass-escape diagnostics.

Initial points are drawn from Uniform[0,1] (restrictable to a subinterval):
the distributional limits hold for every initial law absolutely continuous
with respect to the invariant measure, and the uniform law is the simplest
reproducible admissible choice.  Finite-horizon numbers do depend on the
initial law; the engine documents the choice rather than claiming
independence.

Every trial owns a private counter-derived RNG stream split from the master
seed, so runs are bit-reproducible per (seed, trial) and independent of the
concurrency degree; re-running any single trial reproduces its trace.

Near the indifferent fixed points the double-precision increment
T(x) - x can underflow to zero.  When that happens the orbit is pinned at
its machine fixed point for far longer than any representable horizon (the
remaining escape ladder from such a point exceeds 2^53/(1+p) steps), so
advancing in place is exactly the deterministic ladder jump at machine
resolution; the engine does that and counts the steps in a per-trial
stagnation diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .distributions import (EmpiricalDistribution, MLSpec, ks_statistic,
                            ml_cdf)
from .errors import (HypothesisError, InsufficientDataError, ValidationError)
from .maps import MapParams, inverse_branch
from .regvar import NormalizingSequence, TruncatedExpectation

__all__ = [
    "OrbitConfig",
    "OccupationTrace",
    "ReturnRecord",
    "OrbitRun",
    "default_checkpoints",
    "run_orbits",
    "verify_duality",
    "duality_experiment",
    "empirical_truncated_expectation",
    "DkResult",
    "dk_experiment",
    "RatioResult",
    "ratio_experiment",
    "mass_escape",
]


def default_checkpoints(n_steps: int) -> Tuple[int, ...]:
    """Geometric decade grid {100, 1000, ...} up to and including n_steps."""
    if n_steps < 1:
        return ()
    pts = []
    p = 100
    while p < n_steps:
        pts.append(p)
        p *= 10
    pts.append(n_steps)
    return tuple(dict.fromkeys(pts))


@dataclass(frozen=True)
class OrbitConfig:
    """Batch configuration: map, horizon, trials, seed, checkpoints and the
    monitored sets.

    A = [0, delta_a) and B = (1 - delta_b, 1] are the cusp neighborhoods
    whose occupation ratio is tracked; ``m_sets`` is a finite union of
    half-open intervals (lo, hi] whose occupation count S_n(M) feeds the
    normalized-occupation experiments; ``y_set`` is the separating interval
    (f0(c), f1(c)] by default, the carrier of return-time records;
    ``eps_mid`` bounds the middle band (eps, 1-eps) for the mass-escape
    diagnostic.  ``init_range`` restricts the uniform initial law.
    """

    map: MapParams
    n_steps: int
    n_trials: int
    seed: int
    checkpoints: Optional[Tuple[int, ...]] = None
    delta_a: float = 0.01
    delta_b: float = 0.01
    m_sets: Optional[Tuple[Tuple[float, float], ...]] = None
    y_set: Optional[Tuple[float, float]] = None
    eps_mid: float = 0.1
    init_range: Tuple[float, float] = (0.0, 1.0)

    def __post_init__(self) -> None:
        if self.n_steps < 0 or self.n_trials < 1:
            raise ValidationError("need n_steps >= 0 and n_trials >= 1")
        if self.checkpoints is None:
            object.__setattr__(self, "checkpoints",
                               default_checkpoints(self.n_steps))
        chks = tuple(int(k) for k in self.checkpoints)
        if any(k < 1 for k in chks) or any(
                b <= a for a, b in zip(chks, chks[1:])):
            raise ValidationError("checkpoints must be strictly increasing, >= 1")
        if chks and chks[-1] > self.n_steps:
            raise ValidationError("checkpoints may not exceed n_steps")
        object.__setattr__(self, "checkpoints", chks)
        if not (0.0 < self.delta_a < 1.0 and 0.0 < self.delta_b < 1.0):
            raise ValidationError("delta_a, delta_b must lie in (0, 1)")
        if self.delta_a + self.delta_b > 1.0:
            raise ValidationError("A and B must be disjoint "
                                  "(delta_a + delta_b <= 1)")
        c = self.map.c
        if self.m_sets is None:
            object.__setattr__(self, "m_sets", ((c, 1.0),))
        msets = tuple((float(lo), float(hi)) for lo, hi in self.m_sets)
        for lo, hi in msets:
            if not (0.0 <= lo < hi <= 1.0):
                raise ValidationError(f"bad M interval ({lo}, {hi}]")
        object.__setattr__(self, "m_sets", msets)
        if self.y_set is None:
            y = (inverse_branch(self.map, "left", c),
                 inverse_branch(self.map, "right", c))
            object.__setattr__(self, "y_set", y)
        ylo, yhi = self.y_set
        if not (0.0 <= ylo < c < yhi <= 1.0):
            raise ValidationError("y_set must straddle the branch point")
        if not (0.0 < self.eps_mid < 0.5):
            raise ValidationError("eps_mid must lie in (0, 1/2)")
        lo, hi = self.init_range
        if not (0.0 <= lo < hi <= 1.0):
            raise ValidationError("init_range must be a subinterval of [0,1]")

    def _chk_array(self) -> np.ndarray:
        return np.asarray(self.checkpoints, dtype=np.int64)


@dataclass(frozen=True)
class OccupationTrace:
    """Per-checkpoint occupation statistics of one trial.

    ``ratio`` is S(A)/S(B), NaN (the undefined sentinel) until both counts
    are positive; running extremes are likewise NaN until defined and never
    include sentinel values.
    """

    trial: int
    initial_point: float
    checkpoints: np.ndarray
    s_a: np.ndarray
    s_b: np.ndarray
    s_m: np.ndarray
    s_mid: np.ndarray
    ratio: np.ndarray
    run_max: np.ndarray
    run_min: np.ndarray
    stagnation: int

    def __post_init__(self) -> None:
        for name in ("s_a", "s_b", "s_m", "s_mid"):
            if np.any(np.diff(getattr(self, name)) < 0):
                raise ValidationError(f"{name} must be nondecreasing")
        both = ~np.isnan(self.ratio)
        if np.any(self.s_a[both] + self.s_b[both] > self.checkpoints[both]):
            raise ValidationError("S(A) + S(B) cannot exceed the time")
        ok = ~np.isnan(self.run_max)
        if np.any(self.run_max[ok] < self.ratio[ok]) or \
                np.any(self.run_min[ok] > self.ratio[ok]):
            raise ValidationError("running extremes must bracket the ratio")


@dataclass(frozen=True)
class ReturnRecord:
    """Return times into a target set along one orbit.

    ``sides[j]`` is the side (1 right of the branch point, 0 left) of the
    j-th recorded visit and ``phis[j]`` the return time from that visit to
    the next.  ``counts``/``occupation`` give the number of visits and the
    occupation count of the set at each checkpoint.  When the orbit visits
    more often than the record capacity, only the first ``phis.size`` gaps
    are kept (``total_visits`` keeps counting).
    """

    trial: int
    initial_point: float
    first_visit: int
    sides: np.ndarray
    phis: np.ndarray
    checkpoints: np.ndarray
    counts: np.ndarray
    occupation: np.ndarray
    total_visits: int

    def __post_init__(self) -> None:
        if self.phis.size and np.any(self.phis < 1):
            raise ValidationError("return times must be >= 1")

    def visit_times(self) -> np.ndarray:
        """Times t_0 < t_1 < ... of the recorded visits."""
        if self.first_visit < 0:
            return np.empty(0, dtype=np.int64)
        return self.first_visit + np.concatenate(
            ((0,), np.cumsum(self.phis, dtype=np.int64)))

    def alternates(self) -> bool:
        """Whether recorded visit sides strictly alternate."""
        s = self.sides
        return bool(s.size < 2 or np.all(s[1:] != s[:-1]))


@dataclass(frozen=True)
class OrbitRun:
    """Result of a batch run: one trace per trial plus (optionally) one
    return record per trial."""

    config: OrbitConfig
    traces: Tuple[OccupationTrace, ...]
    records: Tuple[ReturnRecord, ...] = ()

    def traces_to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "n", "S_A", "S_B", "S_M", "R",
                        "R_runmax", "R_runmin", "mid_fraction"])
            for t in self.traces:
                for i, n in enumerate(t.checkpoints):
                    w.writerow([t.trial, int(n), int(t.s_a[i]), int(t.s_b[i]),
                                int(t.s_m[i]), repr(float(t.ratio[i])),
                                repr(float(t.run_max[i])),
                                repr(float(t.run_min[i])),
                                repr(float(t.s_mid[i] / n))])

    def records_to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "visit", "side", "phi"])
            for r in self.records:
                for j in range(r.phis.size):
                    w.writerow([r.trial, j, int(r.sides[j]), int(r.phis[j])])


def _batch_traces(config: OrbitConfig) -> Tuple[OccupationTrace, ...]:
    p = config.map
    chks = config._chk_array()
    m_lo = np.array([lo for lo, _ in config.m_sets])
    m_hi = np.array([hi for _, hi in config.m_sets])
    lo, hi = config.init_range
    SA, SB, SM, SMID, R, RMAX, RMIN, X0, STAG = _kernels.occupation_batch(
        config.seed, config.n_trials, config.n_steps, p.c, p.a0, p.p0,
        p.a1, p.p1, config.delta_a, config.delta_b, m_lo, m_hi,
        config.eps_mid, lo, hi, chks)
    return tuple(
        OccupationTrace(trial=tr, initial_point=float(X0[tr]),
                        checkpoints=chks, s_a=SA[tr], s_b=SB[tr],
                        s_m=SM[tr], s_mid=SMID[tr], ratio=R[tr],
                        run_max=RMAX[tr], run_min=RMIN[tr],
                        stagnation=int(STAG[tr]))
        for tr in range(config.n_trials))


def _one_record(config: OrbitConfig, trial: int, target: str,
                max_returns: int) -> ReturnRecord:
    p = config.map
    chks = config._chk_array()
    if target == "Y":
        intervals = (config.y_set,)
    elif target == "M":
        intervals = config.m_sets
    else:
        raise ValidationError("returns target must be 'Y' or 'M'")
    set_lo = np.array([lo for lo, _ in intervals])
    set_hi = np.array([hi for _, hi in intervals])
    cap = int(min(max_returns, max(config.n_steps, 1)))
    gaps = np.zeros(cap, dtype=np.int64)
    sides = np.full(cap, -1, dtype=np.int64)
    lo, hi = config.init_range
    x0, first, n_visits, counts, occ = _kernels.returns_trial(
        config.seed, trial, config.n_steps, p.c, p.a0, p.p0, p.a1, p.p1,
        set_lo, set_hi, True, lo, hi, chks, gaps, sides)
    kept = min(max(int(n_visits) - 1, 0), cap)
    return ReturnRecord(trial=trial, initial_point=float(x0),
                        first_visit=int(first), sides=sides[:kept],
                        phis=gaps[:kept], checkpoints=chks, counts=counts,
                        occupation=occ, total_visits=int(n_visits))


def run_orbits(config: OrbitConfig, want_returns: bool = True,
               returns_target: str = "Y",
               max_returns: int = 200_000) -> OrbitRun:
    """Simulate the configured batch.

    Occupation traces are always produced; return records (against the
    separating set 'Y' or the occupation set 'M') are produced unless
    ``want_returns`` is false.  Each record keeps at most ``max_returns``
    gaps (counts keep counting past the cap).
    """
    traces = _batch_traces(config)
    records: Tuple[ReturnRecord, ...] = ()
    if want_returns and config.n_steps > 0:
        records = tuple(_one_record(config, tr, returns_target, max_returns)
                        for tr in range(config.n_trials))
    return OrbitRun(config=config, traces=traces, records=records)


# ---------------------------------------------------------------------------
# duality between occupation counts and return-time sums
# ---------------------------------------------------------------------------

def verify_duality(trace: OccupationTrace, record: ReturnRecord,
                   m_sets=None) -> int:
    """Count violations of the identity  S_k > n  <=>  t_n < k, where S_k
    is the occupation count of M at time k and t_n the time of the n-th
    M-visit (t_0 = 0 requires the orbit to start in M).

    For monotone visit times the identity holds for every n at a fixed k
    exactly when #{n : t_n < k} = S_k, so the count compares the two
    independently recorded quantities at every checkpoint; the contract is
    a violation count of zero.
    """
    if record.first_visit != 0:
        raise ValidationError(
            "duality requires the orbit to start inside M (t_0 = 0)")
    times = record.visit_times()
    violations = 0
    for i, k in enumerate(record.checkpoints):
        s_k = int(record.occupation[i])
        lhs = int(np.searchsorted(times, k, side="left"))
        if s_k > times.size:
            # record truncated before this checkpoint: only the untruncated
            # prefix is checkable
            continue
        violations += abs(lhs - s_k)
    # cross-check against the trace's own occupation counter when the trace
    # monitors the same set
    if m_sets is not None and trace is not None:
        for i in range(trace.checkpoints.size):
            if i < record.checkpoints.size and \
                    trace.checkpoints[i] == record.checkpoints[i]:
                violations += abs(int(trace.s_m[i]) - int(record.occupation[i]))
    return violations


def duality_experiment(config: OrbitConfig) -> int:
    """Total duality violations over all trials, with orbits started inside
    M (single-interval M required so the start law is plainly uniform)."""
    if len(config.m_sets) != 1:
        raise ValidationError("duality runs require a single-interval M")
    lo, hi = config.m_sets[0]
    cfg = replace(config, init_range=(lo + 1e-12, hi))
    total = 0
    for tr in range(cfg.n_trials):
        rec = _one_record(cfg, tr, "M", max_returns=max(cfg.n_steps, 1))
        total += verify_duality(None, rec, None)
    return total


# ---------------------------------------------------------------------------
# empirical truncated expectations
# ---------------------------------------------------------------------------

def empirical_truncated_expectation(records: Sequence[ReturnRecord],
                                    side: str, grid,
                                    declared_index: Optional[float] = None
                                    ) -> TruncatedExpectation:
    """Estimate L_side(t) = integral over Y_side of (phi ^ t) from pooled
    return records.

    side 'A' selects returns launched from the right component of the
    separating set (the one inside B whose next stop is the left cusp
    neighborhood); side 'B' the left component.  The set mass is estimated
    by the side's share of all recorded visits, which normalizes the
    invariant measure to mu(Y) = 1 -- the normalizing sequences are exactly
    invariant under that common rescaling.

    Requires >= 1000 recorded returns on the side.
    """
    if side not in ("A", "B"):
        raise ValidationError("side must be 'A' or 'B'")
    want = 1 if side == "A" else 0
    phis = []
    n_side = 0
    n_all = 0
    for r in records:
        sel = r.sides == want
        phis.append(r.phis[sel])
        n_side += int(np.count_nonzero(sel))
        n_all += int(r.phis.size)
    phi = np.concatenate(phis) if phis else np.empty(0, dtype=np.int64)
    if phi.size < 1000:
        raise InsufficientDataError(
            f"only {phi.size} returns recorded on side {side}; need >= 1000")
    grid = np.asarray(grid, dtype=float)
    mass = n_side / n_all
    vals = np.array([np.mean(np.minimum(phi, t)) for t in grid]) * mass
    # truncated means are concave nondecreasing by construction; the guard
    # below only clamps float wobble
    vals = np.maximum.accumulate(vals)
    return TruncatedExpectation(grid=grid, values=vals, mass=mass,
                                declared_index=declared_index)


# ---------------------------------------------------------------------------
# normalized occupation experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DkResult:
    """Normalized occupation sample S_n(M)/c(n) with its distance from the
    Mittag-Leffler target, at the final checkpoint and per checkpoint."""

    sample: EmpiricalDistribution
    alpha: float
    ks: float
    ks_by_checkpoint: Dict[int, float]
    normalizer: NormalizingSequence


class _CdfInterp:
    """Piecewise-linear cache of a smooth CDF on a log-spaced grid."""

    def __init__(self, cdf, lo: float, hi: float, n: int = 4096) -> None:
        lo = max(lo, 1e-12)
        hi = max(hi, lo * 10.0)
        self.xs = np.geomspace(lo / 4.0, hi * 4.0, n)
        self.ys = np.asarray(cdf(self.xs), dtype=float)

    def __call__(self, x: float) -> float:
        if x <= self.xs[0]:
            return float(self.ys[0] * (x / self.xs[0]))
        if x >= self.xs[-1]:
            return float(self.ys[-1])
        return float(np.interp(x, self.xs, self.ys))


def dk_experiment(config: OrbitConfig,
                  normalizer: Optional[NormalizingSequence] = None,
                  m_sets=None) -> DkResult:
    """Distribution of S_n(M)/c(n) across trials against the
    Mittag-Leffler law of order alpha = min(1, 1/p0).

    Requires a barely infinite right cusp (p1 = 1) and M within finite
    symmetric difference of (c, 1) -- the built-ins are M = (c, 1) and
    M = (c, 1-delta).  When no normalizer is passed, the ladder normalizer
    is built on the checkpoint grid.  The KS statistic against the target
    CDF is reported at the final checkpoint and per checkpoint.
    """
    p = config.map
    if p.p1 != 1.0:
        raise HypothesisError(
            f"the normalized-occupation limit needs p1 = 1, got {p.p1}")
    if m_sets is not None:
        config = replace(config, m_sets=tuple(m_sets))
    if normalizer is None:
        from .maps import iterate_table
        from .regvar import normalizing_sequence_cusps
        table = iterate_table(p, config.n_steps)
        normalizer = normalizing_sequence_cusps(
            p, table, np.asarray(config.checkpoints, dtype=np.int64))
    traces = _batch_traces(config)
    spec = MLSpec(p.alpha)
    ks_by: Dict[int, float] = {}
    sample = None
    for i, n in enumerate(config.checkpoints):
        c_n = normalizer.value(float(n))
        vals = np.array([t.s_m[i] for t in traces], dtype=float) / c_n
        emp = EmpiricalDistribution(vals)
        if p.alpha == 1.0:
            target = lambda x: ml_cdf(spec, x)
        else:
            target = _CdfInterp(lambda xs: ml_cdf(spec, xs),
                                float(max(vals.min(), 1e-9)),
                                float(vals.max()) + 1.0)
        ks_by[int(n)] = ks_statistic(emp, target)
        sample = emp
    if sample is None:
        raise ValidationError("dk experiment needs at least one checkpoint")
    return DkResult(sample=sample, alpha=p.alpha,
                    ks=ks_by[int(config.checkpoints[-1])],
                    ks_by_checkpoint=ks_by, normalizer=normalizer)


# ---------------------------------------------------------------------------
# occupation-ratio experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioResult:
    """Per-trial ratio statistics: final running extremes and per-checkpoint
    medians across trials (NaN entries excluded trial-wise)."""

    checkpoints: np.ndarray
    run_max: np.ndarray          # (n_trials,) at final checkpoint
    run_min: np.ndarray
    ratio_final: np.ndarray
    median_ratio: np.ndarray     # per checkpoint, across defined trials
    traces: Tuple[OccupationTrace, ...]

    def quantile_run_max(self, q: float) -> float:
        vals = self.run_max[~np.isnan(self.run_max)]
        return float(np.quantile(vals, q)) if vals.size else math.nan

    def joint_fraction(self, max_at_least: float, min_at_most: float) -> float:
        """Fraction of trials whose running max and min both cross the
        given thresholds (undefined-ratio trials count as failures)."""
        ok = (~np.isnan(self.run_max) & ~np.isnan(self.run_min)
              & (self.run_max >= max_at_least) & (self.run_min <= min_at_most))
        return float(np.mean(ok))


def ratio_experiment(config: OrbitConfig) -> RatioResult:
    """Running extremes of R_n = S_n(A)/S_n(B) per trial.

    The ratio is undefined (sentinel) until both occupation counts are
    positive; sentinel stretches never enter the extremes.
    """
    traces = _batch_traces(config)
    chks = config._chk_array()
    nch = chks.size
    rmax = np.array([t.run_max[-1] if nch else math.nan for t in traces])
    rmin = np.array([t.run_min[-1] if nch else math.nan for t in traces])
    rfin = np.array([t.ratio[-1] if nch else math.nan for t in traces])
    med = np.empty(nch)
    for i in range(nch):
        col = np.array([t.ratio[i] for t in traces])
        col = col[~np.isnan(col)]
        med[i] = np.median(col) if col.size else math.nan
    return RatioResult(checkpoints=chks, run_max=rmax, run_min=rmin,
                       ratio_final=rfin, median_ratio=med, traces=traces)


def mass_escape(config: OrbitConfig, epsilon: Optional[float] = None
                ) -> np.ndarray:
    """Mean fraction of time spent in the middle band (eps, 1-eps) at each
    checkpoint -- the observable-measure escape diagnostic (decays to 0,
    logarithmically slowly)."""
    if epsilon is not None:
        if not (0.0 < epsilon < 0.5):
            raise ValidationError("epsilon must lie in (0, 1/2)")
        config = replace(config, eps_mid=float(epsilon))
    traces = _batch_traces(config)
    chks = config._chk_array()
    out = np.zeros(chks.size)
    for i, n in enumerate(chks):
        out[i] = float(np.mean([t.s_mid[i] for t in traces])) / float(n)
    return out
