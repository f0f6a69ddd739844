"""Discrete-state processes: the renewal chain whose tower makes the
occupation ratio converge almost surely to 1, and iid realizations of the
sums-versus-maxima dichotomy for heavy-tailed sequences.

The base renewal chain on {0, 1, 2, ...} moves deterministically k -> k-1
and regenerates from 0 by drawing a lifetime K (p_{0,k-1} = f_k).  Its
tower doubles each fiber: state (k, j) with 0 <= j <= 2k+1 climbs j by one,
drops from (k, 2k+1) to (k-1, 0), and redraws at the fiber-0 top.  With
A = {(k, j) : 0 < j <= k} and B = {(k, j) : j > k+1} every completed fiber
contributes equally to both sets, so |S_n(A) - S_n(B)| never exceeds the
base-chain value at the latest renewal -- an exact structural bound checked
at every simulated step -- and the occupation ratio tends to 1 almost
surely once lifetimes have finite mean and infinite second moment.

The sums-versus-maxima runs track max-so-far of phi_n / sum_{k<n} psi_k for
pairs of N-valued functions phi, psi driven by one iid uniform sequence
(phi_n and psi_n are the two inverse CDFs of the same uniform -- two
functions on one underlying sequence, the canonical mixing case).  Whether
the running max explodes or the raw ratio dies is decided by the integral
criterion integral(a_psi o phi) with a_psi(t) = t / E[psi ^ t]; it is
classified in closed form via the iterated-logarithm series rules, never
from finite numeric evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import zeta

from . import _kernels
from .errors import HypothesisError, ValidationError
from .regvar import DiscreteHeavyTail

__all__ = [
    "RenewalChainSpec",
    "TowerChainState",
    "IidProcessSpec",
    "TowerRun",
    "TannyRun",
    "SvmRun",
    "default_chain_checkpoints",
    "tower_ratio_run",
    "tanny_check",
    "sums_vs_maxima_run",
    "classify_integral_criterion",
]


def default_chain_checkpoints(n_steps: int) -> Tuple[int, ...]:
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
class RenewalChainSpec:
    """Lifetime law of the renewal chain: tabulated pmf head (k = 1..cutoff)
    plus an analytic ~k**-s power tail beyond, with declared moment flags.

    ``head_cdf[k-1]`` is P[K <= k]; beyond the cutoff the tail continues as
    the Euler-Maclaurin evaluation of the same power sum, so the total mass
    is exactly 1 by construction.
    """

    head_cdf: np.ndarray
    s_exp: float
    finite_mean: bool
    infinite_second_moment: bool
    label: str = "power"

    def __post_init__(self) -> None:
        h = np.asarray(self.head_cdf, dtype=float)
        object.__setattr__(self, "head_cdf", h)
        if h.ndim != 1 or h.size < 1:
            raise ValidationError("head_cdf must be a nonempty 1-d array")
        if np.any(np.diff(h) < -1e-15) or h[0] < 0.0 or h[-1] > 1.0 + 1e-12:
            raise ValidationError("head_cdf must be a CDF head")
        if self.s_exp <= 2.0 and h[-1] < 1.0:
            raise ValidationError(
                "analytic tail needs s > 2 for a finite-mean lifetime")

    @property
    def cutoff(self) -> int:
        return int(self.head_cdf.size)

    def pmf(self, k: int) -> float:
        if k < 1:
            return 0.0
        if k <= self.cutoff:
            prev = self.head_cdf[k - 2] if k >= 2 else 0.0
            return float(self.head_cdf[k - 1] - prev)
        rem = 1.0 - float(self.head_cdf[-1])
        if rem <= 0.0:
            return 0.0
        base = _kernels._em_tail(float(self.cutoff), self.s_exp)
        return rem * float(k ** (-self.s_exp)) / base

    def tail(self, k: int) -> float:
        """P[K > k]."""
        if k < 1:
            return 1.0
        if k <= self.cutoff:
            return 1.0 - float(self.head_cdf[k - 1])
        rem = 1.0 - float(self.head_cdf[-1])
        if rem <= 0.0:
            return 0.0
        base = _kernels._em_tail(float(self.cutoff), self.s_exp)
        return rem * _kernels._em_tail(float(k), self.s_exp) / base

    def mean(self) -> float:
        """E[K] = sum_k P[K > k] over k >= 0 (head summed exactly, tail by
        the same analytic rule)."""
        head = float(np.sum(1.0 - self.head_cdf))
        rem = 1.0 - float(self.head_cdf[-1])
        if rem <= 0.0:
            return 1.0 + head
        s, c = self.s_exp, float(self.cutoff)
        base = _kernels._em_tail(c, s)
        # sum_{k>cutoff} S(k)/S(cutoff), S(k) ~ k^{1-s}/(s-1):
        tail_sum = (c ** (2.0 - s) / ((s - 1.0) * (s - 2.0))
                    - 0.5 * c ** (1.0 - s) / (s - 1.0)) / base
        return 1.0 + head + rem * tail_sum

    def stationary_pmf(self, n_states: int) -> np.ndarray:
        """Invariant pmf mu_k proportional to P[K > k], normalized over all
        states (finite total mass requires a finite-mean lifetime)."""
        if not self.finite_mean:
            raise ValidationError(
                "the invariant measure has finite mass only for finite-mean "
                "lifetimes")
        tails = np.array([self.tail(k) for k in range(n_states)])
        return tails / self.mean()

    def sample_stationary(self, rng: np.random.Generator) -> int:
        """One draw from the invariant pmf (inverse CDF on the head with a
        closed-form ~k**(2-s) continuation beyond the cutoff)."""
        if not self.finite_mean:
            raise ValidationError("stationary start needs a finite mean")
        u = float(rng.random())
        total = self.mean()
        # P[K > k] for k = 0..cutoff, cumulated and normalized by E[K]
        t = np.concatenate(((1.0,), 1.0 - self.head_cdf))
        cum = np.cumsum(t) / total
        if u < cum[-1]:
            return int(np.searchsorted(cum, u, side="right"))
        # beyond the head the stationary tail keeps the ~k**(2-s) shape:
        # P[X > k | X > cutoff] = (k / cutoff)**(2-s), inverted exactly
        v = float(rng.random())
        if v <= 0.0:
            v = 2.0 ** -53
        k = self.cutoff * v ** (1.0 / (2.0 - self.s_exp))
        return int(min(max(k, self.cutoff + 1.0), 4e18))

    @staticmethod
    def power_lifetime(s_exp: float = 2.5,
                       cutoff: int = 10 ** 6) -> "RenewalChainSpec":
        """f_k proportional to k**-s: finite mean, infinite second moment
        for 2 < s <= 3."""
        if s_exp <= 2.0:
            raise ValidationError("need s > 2 for a finite-mean lifetime")
        ks = np.arange(1, cutoff + 1, dtype=float)
        w = ks ** (-s_exp)
        z = float(zeta(s_exp, 1))
        head = np.cumsum(w) / z
        return RenewalChainSpec(head_cdf=head, s_exp=s_exp,
                                finite_mean=True,
                                infinite_second_moment=(s_exp <= 3.0),
                                label=f"power(s={s_exp})")

    @staticmethod
    def deterministic(k0: int) -> "RenewalChainSpec":
        """Point mass f_{k0} = 1 (the hand-checkable periodic tower)."""
        if k0 < 1:
            raise ValidationError("lifetime must be >= 1")
        head = np.zeros(k0)
        head[-1] = 1.0
        return RenewalChainSpec(head_cdf=head, s_exp=2.5, finite_mean=True,
                                infinite_second_moment=False,
                                label=f"deterministic({k0})")


@dataclass(frozen=True)
class TowerChainState:
    """Tower state (k, j), 0 <= j <= 2k+1; pure-python single-step rule
    used as a reference implementation for the fast trajectory kernel."""

    k: int
    j: int

    def __post_init__(self) -> None:
        if self.k < 0 or not (0 <= self.j <= 2 * self.k + 1):
            raise ValidationError(f"invalid tower state {(self.k, self.j)}")

    @property
    def in_a(self) -> bool:
        return 0 < self.j <= self.k

    @property
    def in_b(self) -> bool:
        return self.j > self.k + 1

    def advance(self, draw) -> "TowerChainState":
        """One transition; ``draw()`` supplies a lifetime when the chain
        regenerates."""
        if self.j < 2 * self.k + 1:
            return TowerChainState(self.k, self.j + 1)
        if self.k > 0:
            return TowerChainState(self.k - 1, 0)
        return TowerChainState(int(draw()) - 1, 0)


@dataclass(frozen=True)
class IidProcessSpec:
    """Pair of N-valued tails with the declared verdict of the integral
    criterion ('divergent' or 'convergent')."""

    phi: DiscreteHeavyTail
    psi: DiscreteHeavyTail
    classification: str

    def __post_init__(self) -> None:
        if self.classification not in ("divergent", "convergent"):
            raise ValidationError(
                "classification must be 'divergent' or 'convergent'")

    @staticmethod
    def from_tails(phi: DiscreteHeavyTail,
                   psi: DiscreteHeavyTail) -> "IidProcessSpec":
        """Build with the closed-form classification (catalogue tails with
        nonintegrable phi only)."""
        spec = IidProcessSpec(phi=phi, psi=psi, classification="divergent")
        verdict = classify_integral_criterion(spec)
        return IidProcessSpec(phi=phi, psi=psi, classification=verdict)


# ---------------------------------------------------------------------------
# tower / base-chain runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TowerRun:
    """Checkpointed tower occupation statistics of one trajectory, plus the
    per-step structural-bound violation count (contract: 0)."""

    checkpoints: np.ndarray
    s_a: np.ndarray
    s_b: np.ndarray
    ratio: np.ndarray
    renewal_level: np.ndarray
    violations: int
    renewals: int
    seed: int

    def to_csv(self, path, trial: int = 0) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "n", "S_A", "S_B", "ratio",
                        "renewal_level"])
            for i, n in enumerate(self.checkpoints):
                w.writerow([trial, int(n), int(self.s_a[i]),
                            int(self.s_b[i]), repr(float(self.ratio[i])),
                            int(self.renewal_level[i])])


def tower_ratio_run(spec: RenewalChainSpec, n_steps: int, seed: int,
                    checkpoints=None, trial: int = 0) -> TowerRun:
    """One tower trajectory from (0, 0): occupation counts of
    A = {0 < j <= k} and B = {j > k+1}, their ratio at checkpoints, and the
    exact structural bound |S(A) - S(B)| <= (base value at latest renewal)
    checked at every step."""
    if checkpoints is None:
        checkpoints = default_chain_checkpoints(n_steps)
    chks = np.asarray(checkpoints, dtype=np.int64)
    if chks.size and (np.any(np.diff(chks) <= 0) or chks[0] < 1
                      or chks[-1] > n_steps):
        raise ValidationError("bad checkpoint grid")
    SA = np.zeros(chks.size, dtype=np.int64)
    SB = np.zeros(chks.size, dtype=np.int64)
    RATIO = np.full(chks.size, np.nan)
    LVL = np.zeros(chks.size, dtype=np.int64)
    violations, renewals = _kernels.tower_trial(
        seed, trial, n_steps, spec.head_cdf, spec.s_exp, chks,
        SA, SB, RATIO, LVL)
    return TowerRun(checkpoints=chks, s_a=SA, s_b=SB, ratio=RATIO,
                    renewal_level=LVL, violations=int(violations),
                    renewals=int(renewals), seed=seed)


@dataclass(frozen=True)
class TannyRun:
    """Checkpointed X_n/n of the base chain from a stationary start, plus
    occupation counts of the low states and the trajectory maximum of
    X_n/n (with whether it was attained at a renewal step)."""

    checkpoints: np.ndarray
    x_over_n: np.ndarray
    occupation: np.ndarray
    best_ratio: float
    best_at_renewal: bool
    x_start: int
    seed: int

    def to_csv(self, path, trial: int = 0) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "n", "X_n", "X_over_n"])
            for i, n in enumerate(self.checkpoints):
                x = int(round(float(self.x_over_n[i]) * int(n)))
                w.writerow([trial, int(n), x,
                            repr(float(self.x_over_n[i]))])


def tanny_check(spec: RenewalChainSpec, n_steps: int, seed: int,
                checkpoints=None, n_occup_states: int = 32,
                trial: int = 0) -> TannyRun:
    """X_n/n along the base chain started from its invariant pmf -- the
    normalized position dies (X_n/n -> 0) even though X_n itself has
    infinite invariant mean fluctuations; the trajectory maximum of X_n/n
    is attained at a renewal step (off renewals X only decreases)."""
    if checkpoints is None:
        checkpoints = default_chain_checkpoints(n_steps)
    chks = np.asarray(checkpoints, dtype=np.int64)
    rng = np.random.default_rng([int(seed), int(trial), 0x5DEECE66D])
    x0 = int(spec.sample_stationary(rng))
    XR = np.full(chks.size, np.nan)
    occup, best, best_at_renewal = _kernels.base_chain_trial(
        seed, trial, n_steps, x0, spec.head_cdf, spec.s_exp, n_occup_states,
        chks, XR)
    return TannyRun(checkpoints=chks, x_over_n=XR, occupation=occup,
                    best_ratio=float(best),
                    best_at_renewal=bool(best_at_renewal), x_start=x0,
                    seed=seed)


# ---------------------------------------------------------------------------
# sums versus maxima
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SvmRun:
    """Running max of phi_n / sum_{k<n} psi_k at checkpoints, with the raw
    ratio at each checkpoint (NaN before the first ratio exists)."""

    checkpoints: np.ndarray
    run_max: np.ndarray
    raw: np.ndarray
    final_run_max: float
    seed: int

    def to_csv(self, path, trial: int = 0) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "n", "runmax", "ratio"])
            for i, n in enumerate(self.checkpoints):
                w.writerow([trial, int(n), repr(float(self.run_max[i])),
                            repr(float(self.raw[i]))])


def _is_pure_power(t: DiscreteHeavyTail) -> bool:
    return (t.family == "power-log" and t.q == 0.0 and t.r == 0.0
            and t.C == 1.0)


def sums_vs_maxima_run(spec: IidProcessSpec, n_steps: int, seed: int,
                       checkpoints=None, trial: int = 0) -> SvmRun:
    """Track max over n of phi_n / sum_{k<n} psi_k for the comonotone iid
    realization (phi_n, psi_n inverse CDFs of one uniform per step).

    In the divergent case the running max eventually exceeds any threshold;
    in the convergent case the raw ratio tends to 0.  Fast exact kernels
    cover pure-power pairs and (pure-power psi, power-log phi); other
    catalogue pairs run on a chunked vectorized path.
    """
    if checkpoints is None:
        checkpoints = default_chain_checkpoints(n_steps)
    chks = np.asarray(checkpoints, dtype=np.int64)
    RUNMAX = np.full(chks.size, np.nan)
    RAW = np.full(chks.size, np.nan)
    phi, psi = spec.phi, spec.psi
    if _is_pure_power(phi) and _is_pure_power(psi) and phi.a == psi.a:
        final = _kernels.svm_same_power(seed, trial, n_steps, phi.a,
                                        chks, RUNMAX, RAW)
    elif _is_pure_power(psi) and phi.family == "power-log":
        final = _kernels.svm_pair_power(seed, trial, n_steps, psi.a,
                                        phi.a, phi.q, phi.r, phi.C, chks,
                                        RUNMAX, RAW)
    else:
        final = _svm_generic(spec, n_steps, seed, trial, chks, RUNMAX, RAW)
    if n_steps < 2:
        final = math.nan
    return SvmRun(checkpoints=chks, run_max=RUNMAX, raw=RAW,
                  final_run_max=float(final), seed=seed)


def _svm_generic(spec: IidProcessSpec, n_steps: int, seed: int,
                 trial: int, chks: np.ndarray, RUNMAX: np.ndarray,
                 RAW: np.ndarray) -> float:
    """Chunked comonotone path for arbitrary catalogue pairs (vectorized;
    one uniform per step feeds both inverse CDFs)."""
    rng = np.random.default_rng([int(seed), int(trial)])
    run_max = 0.0
    ssum = 0.0
    done = 0
    chunk = 1 << 20
    while done < n_steps:
        m = min(chunk, n_steps - done)
        u = rng.random(m)
        np.clip(u, 1e-300, None, out=u)
        phis = spec.phi.quantile(u).astype(float)
        psis = spec.psi.quantile(u).astype(float)
        csum = ssum + np.concatenate(((0.0,), np.cumsum(psis[:-1])))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = phis / csum
        if done == 0:
            ratios[0] = math.nan  # no ratio at step 0 (empty sum)
        cmax = np.maximum(np.fmax.accumulate(np.nan_to_num(ratios, nan=0.0)),
                          run_max)
        lo = int(np.searchsorted(chks, done, side="right"))
        hi = int(np.searchsorted(chks, done + m, side="right"))
        for ci in range(lo, hi):
            idx = int(chks[ci]) - done - 1
            past_first = int(chks[ci]) >= 2
            RUNMAX[ci] = cmax[idx] if past_first else math.nan
            RAW[ci] = float(ratios[idx])
        run_max = float(cmax[-1])
        ssum = float(csum[-1] + psis[-1])
        done += m
    return run_max


# ---------------------------------------------------------------------------
# closed-form classification of the integral criterion
# ---------------------------------------------------------------------------

def _a_psi_exponents(psi: DiscreteHeavyTail) -> Tuple[float, float, float, float]:
    """Exponent 4-tuple (p, l1, l2, l3) of a_psi(t) = t / E[psi ^ t] up to
    constants: a_psi(t) ~ t**p (ln t)**l1 (lnln t)**l2 (lnlnln t)**l3."""
    a, q, r = psi.a, psi.q, psi.r
    if a < 1.0:
        return a, q, r, 0.0
    if a == 1.0 and q < 1.0:
        return 1.0, q - 1.0, r, 0.0
    if a == 1.0 and q == 1.0 and r < 1.0:
        return 1.0, 0.0, r - 1.0, 0.0
    if a == 1.0 and q == 1.0 and r == 1.0:
        return 1.0, 0.0, 0.0, -1.0
    # integrable psi: E[psi ^ t] -> E[psi], a_psi asymptotically linear
    return 1.0, 0.0, 0.0, 0.0


def classify_integral_criterion(spec: IidProcessSpec) -> str:
    """Closed-form verdict ('divergent' / 'convergent') for the series
    sum_n P[phi = n] * a_psi(n), a_psi(t) = t / E[psi ^ t], decided by the
    iterated-logarithm comparison rules on the power-log catalogue.

    Never decided numerically: series divergence is undecidable from finite
    evidence.  Tails outside the closed-form catalogue are an unsupported-
    family error; an integrable phi violates the dichotomy's hypothesis and
    is rejected.
    """
    phi, psi = spec.phi, spec.psi
    for t, name in ((phi, "phi"), (psi, "psi")):
        if t.family != "power-log":
            raise ValidationError(
                f"{name} is outside the closed-form tail catalogue; "
                f"no numeric divergence guessing is performed")
    if phi.is_integrable():
        raise HypothesisError(
            "phi is integrable; the dichotomy requires E[phi] = infinite "
            "(for integrable phi the ratio dies trivially)")
    p, l1, l2, l3 = _a_psi_exponents(psi)
    # summand ~ n^{-(1+a)+p} (ln n)^{-q+l1} (lnln n)^{-r+l2} (lnlnln n)^{l3}
    sigma = 1.0 + phi.a - p
    beta = phi.q - l1
    gamma = phi.r - l2
    delta = -l3
    if sigma < 1.0:
        return "divergent"
    if sigma > 1.0:
        return "convergent"
    if beta < 1.0:
        return "divergent"
    if beta > 1.0:
        return "convergent"
    if gamma < 1.0:
        return "divergent"
    if gamma > 1.0:
        return "convergent"
    return "divergent" if delta <= 1.0 else "convergent"
