"""Truncated expectations, asymptotic inversion, occupation normalizers,
the oscillating slowly-varying construction, and heavy-tail builders.

The truncated expectation L(t) = E[phi ^ t] of a return time phi is the
quantity whose regular variation drives every normalization here.  Two
normalizers are provided:

* ``normalizing_sequence_cusps`` -- the closed ladder form for the built-in
  two-cusp family with a barely infinite right cusp (p1 = 1):
  c(t) = inv_a( t / (G * (theta_plus*U_t + theta_minus*V_t)) ) with
  a(t) = t / (theta_minus * V_t) and G = Gamma(2-alpha)*Gamma(1+alpha).
* ``normalizing_sequence_abstract`` -- the two-set form
  c(t) = a_B^{-1}( t / (G * (L_A(t) + L_B(t))) ) with a_B(t) = t/L_B(t),
  for arbitrary tabulated truncated expectations.

Asymptotic inverses are computed on tabulated grids with log-linear
interpolation: all inputs are regularly varying, where log-linear
interpolation is asymptotically exact.  Regular-variation indices are
declared by callers, never estimated (an optional diagnostic reports the
empirical log-log slope over the top decade).

The oscillating pair realizes, for alpha = 1, normalizations with
liminf c(n)/n = 0 and limsup c(n)/n = 1: two slowly varying functions
L_A(t) = exp(integral_1^t eps_A(y)/y dy) with piecewise-constant eps built
so that dominance alternates, L_A/L_B swinging between >= n and <= 1/n.
Breakpoints grow doubly exponentially, so the pair is constructed and
evaluated entirely in log-log coordinates (tau = ln t, lambda = ln L);
linear-scale accessors overflow float range beyond the first few levels
and guard for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Optional, Tuple

import numpy as np

from .errors import (HypothesisError, NumericError, ValidationError)

__all__ = [
    "TabulatedMonotone",
    "TruncatedExpectation",
    "NormalizingSequence",
    "OscillatingPair",
    "DiscreteHeavyTail",
    "gamma_norm_constant",
    "asymptotic_inverse",
    "normalizing_sequence_cusps",
    "normalizing_sequence_abstract",
    "construct_oscillating_pair",
    "distribution_from_L",
    "oscillation_check",
    "lil_normalizer",
]


def gamma_norm_constant(alpha: float) -> float:
    """Gamma(2-alpha) * Gamma(1+alpha), the constant in front of every
    occupation normalizer."""
    return math.gamma(2.0 - alpha) * math.gamma(1.0 + alpha)


# ---------------------------------------------------------------------------
# tabulated monotone functions and asymptotic inversion
# ---------------------------------------------------------------------------

class TabulatedMonotone:
    """Strictly increasing positive function tabulated on a positive grid,
    evaluated and inverted by log-linear interpolation."""

    def __init__(self, grid, values) -> None:
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValidationError("grid/values must be equal-length 1-d, size >= 2")
        if np.any(g <= 0.0) or np.any(v <= 0.0):
            raise ValidationError("grid and values must be positive")
        if np.any(np.diff(g) <= 0.0):
            raise ValidationError("grid must be strictly increasing")
        if np.any(np.diff(v) <= 0.0):
            raise ValidationError("values must be strictly increasing")
        self.grid = g
        self.values = v
        self._lg = np.log(g)
        self._lv = np.log(v)

    def value(self, t) -> float:
        """Log-linear interpolation; out-of-range arguments are errors."""
        lt = np.log(np.asarray(t, dtype=float))
        if np.any(lt < self._lg[0] - 1e-12) or np.any(lt > self._lg[-1] + 1e-12):
            raise ValidationError("argument outside tabulated range")
        out = np.exp(np.interp(lt, self._lg, self._lv))
        return float(out) if np.ndim(t) == 0 else out

    def inverse(self, y) -> float:
        """Value t with f(t) = y on the interpolant (binary search on the
        grid plus log-linear interpolation)."""
        ly = np.log(np.asarray(y, dtype=float))
        if np.any(ly < self._lv[0] - 1e-12) or np.any(ly > self._lv[-1] + 1e-12):
            raise ValidationError("inverse argument outside tabulated range")
        out = np.exp(np.interp(ly, self._lv, self._lg))
        return float(out) if np.ndim(y) == 0 else out


def asymptotic_inverse(f: TabulatedMonotone, y):
    """t with f(t) ~ y; errors if y is outside the tabulated range.  Inside
    the grid the composition residual |f(result)/y - 1| is bounded by the
    interpolation error of the table (zero on the interpolant itself)."""
    return f.inverse(y)


# ---------------------------------------------------------------------------
# truncated expectations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedExpectation:
    """L(t) = integral over the set of (phi ^ t), tabulated on an
    increasing grid.

    ``mass`` is the total measure of the underlying set (so L(t) <= mass*t).
    ``declared_index`` is the caller-declared regular-variation index; it is
    carried, not certified.
    """

    grid: np.ndarray
    values: np.ndarray
    mass: float = 1.0
    declared_index: Optional[float] = None

    #: relative slack for the monotonicity/concavity checks
    TOL: ClassVar[float] = 1e-9

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValidationError("grid/values must be equal-length 1-d, size >= 2")
        if np.any(g <= 0.0) or np.any(np.diff(g) <= 0.0):
            raise ValidationError("grid must be positive and strictly increasing")
        if self.mass <= 0.0:
            raise ValidationError("mass must be positive")
        if np.any(v <= 0.0):
            raise ValidationError("L values must be positive")
        scale = float(np.max(v))
        if np.any(np.diff(v) < -self.TOL * scale):
            raise ValidationError("L must be nondecreasing")
        slopes = np.diff(v) / np.diff(g)
        if np.any(np.diff(slopes) > self.TOL * max(1.0, slopes[0])):
            raise ValidationError("L must be concave (nonincreasing slopes)")
        ratio = v / g
        if np.any(np.diff(ratio) > self.TOL * ratio[:-1]):
            raise ValidationError("L(t)/t must be nonincreasing")

    def value(self, t):
        """Log-linear interpolation inside the grid."""
        lt = np.log(np.asarray(t, dtype=float))
        lg, lv = np.log(self.grid), np.log(self.values)
        if np.any(lt < lg[0] - 1e-12) or np.any(lt > lg[-1] + 1e-12):
            raise ValidationError("argument outside tabulated range")
        out = np.exp(np.interp(lt, lg, lv))
        return float(out) if np.ndim(t) == 0 else out

    def empirical_index(self) -> float:
        """Diagnostic log-log slope over the top decade of the grid."""
        hi = self.grid[-1]
        sel = self.grid >= hi / 10.0
        if np.count_nonzero(sel) < 2:
            sel = slice(-2, None)
        lg = np.log(self.grid[sel])
        lv = np.log(self.values[sel])
        return float(np.polyfit(lg, lv, 1)[0])


@dataclass(frozen=True)
class NormalizingSequence:
    """c(n) on an increasing grid of times, with declared index alpha."""

    grid: np.ndarray
    c: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "c", c)
        if g.shape != c.shape or g.ndim != 1:
            raise ValidationError("grid/c must be equal-length 1-d arrays")
        if np.any(np.diff(g) <= 0.0):
            raise ValidationError("grid must be strictly increasing")
        if np.any(np.diff(c) < 0.0):
            raise ValidationError("c must be nondecreasing")
        if np.any(c > g * (1.0 + 1e-9)):
            raise ValidationError("c(n) may not exceed n (occupation bound)")

    def value(self, n) -> float:
        lt = np.log(np.asarray(n, dtype=float))
        out = np.exp(np.interp(lt, np.log(self.grid), np.log(self.c)))
        return float(out) if np.ndim(n) == 0 else out

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "c_n"])
            for n, c in zip(self.grid, self.c):
                w.writerow([repr(float(n)), repr(float(c))])


# ---------------------------------------------------------------------------
# normalizers
# ---------------------------------------------------------------------------

def normalizing_sequence_cusps(params, table, grid) -> NormalizingSequence:
    """Occupation normalizer for the built-in two-cusp family from its
    inverse-branch ladder table.

    Requires a barely infinite right cusp (p1 = 1); other p1 are a
    hypothesis violation, not a numeric failure.
    """
    if params.p1 != 1.0:
        raise HypothesisError(
            f"cusp normalizer requires p1 = 1 (barely infinite right cusp), "
            f"got p1={params.p1}")
    grid = np.asarray(grid, dtype=np.int64)
    if grid.size < 1 or np.any(grid < 1):
        raise ValidationError("grid times must be >= 1")
    if int(grid.max()) > table.n:
        raise ValidationError("iterate table shorter than the requested grid")
    alpha = params.alpha
    G = gamma_norm_constant(alpha)
    t_axis = np.arange(1, table.n + 1, dtype=float)
    a_tilde = t_axis / (params.theta_minus * table.V[1:])
    inv = TabulatedMonotone(t_axis, a_tilde)
    y = grid / (G * (params.theta_plus * table.U[grid]
                     + params.theta_minus * table.V[grid]))
    # tiny times can push the target below the tabulated floor; the
    # normalizer there is the time itself (c(n) <= n caps it anyway)
    y = np.maximum(y, a_tilde[0])
    c = np.minimum(inv.inverse(y), grid.astype(float))
    return NormalizingSequence(grid=grid.astype(float), c=np.atleast_1d(c),
                               alpha=alpha)


def normalizing_sequence_abstract(L_A: TruncatedExpectation,
                                  L_B: TruncatedExpectation,
                                  alpha: float, grid) -> NormalizingSequence:
    """Occupation normalizer from two tabulated truncated expectations:
    c(t) = a_B^{-1}( t / (G * (L_A(t) + L_B(t))) ), a_B(t) = t / L_B(t).

    L_A is declared regularly varying of index 1-alpha and L_B slowly
    varying by the caller; the declarations are not certified here.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any(np.diff(grid) <= 0.0) and grid.size > 1:
        raise ValidationError("grid must be strictly increasing")
    G = gamma_norm_constant(alpha)
    tb = L_B.grid
    a_vals = tb / L_B.values
    if np.any(np.diff(a_vals) <= 0.0):
        raise ValidationError(
            "a_B(t) = t/L_B(t) is not increasing on the tabulated grid")
    inv = TabulatedMonotone(tb, a_vals)
    y = np.maximum(grid / (G * (L_A.value(grid) + L_B.value(grid))),
                   a_vals[0])
    c = np.minimum(np.atleast_1d(inv.inverse(y)), grid)
    return NormalizingSequence(grid=grid, c=c, alpha=alpha)


# ---------------------------------------------------------------------------
# the oscillating pair (log-log coordinates throughout)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OscillatingPair:
    """Breakpoints and step values of the alternating-dominance pair.

    Internally everything lives in log-log coordinates: ``taus[i] = ln t_i``
    and ``lam_a[i] = ln L_A(t_i)`` (likewise ``lam_b``), because the
    breakpoints grow far beyond float range in linear scale.  ``k_a[i]`` is
    the log-log slope of L_A on the stretch [t_{i+1}, t_{i+2}) (1-based
    stretch i+1).

    Dominance alternates: at even breakpoints t_{2n+2} the construction
    guarantees ln L_A - ln L_B >= ln n, and at odd breakpoints t_{2n+1}
    it guarantees ln L_A - ln L_B <= -ln n (n >= 1).
    """

    taus: np.ndarray
    lam_a: np.ndarray
    lam_b: np.ndarray
    k_a: np.ndarray
    k_b: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.taus) <= 0.0):
            raise ValidationError("breakpoints must be strictly increasing")
        for name, k in (("K_A", self.k_a), ("K_B", self.k_b)):
            if np.any(k <= 0.0) or np.any(k >= 1.0):
                raise ValidationError(f"{name} values must lie in (0, 1)")
        # each K sequence repeats in pairs and decreases along its pairs
        for name, k in (("K_A", self.k_a), ("K_B", self.k_b)):
            pairs = k[np.concatenate(([True], np.diff(k) != 0.0))]
            if np.any(np.diff(pairs) >= 0.0):
                raise ValidationError(
                    f"{name} must be strictly decreasing along its pair "
                    f"subsequence")
        for n, gap in self.dominance_gaps("even"):
            if gap < math.log(max(n, 1)) - 1e-9:
                raise ValidationError(
                    f"even dominance inequality fails at level {n}")
        for n, gap in self.dominance_gaps("odd"):
            if gap > -math.log(max(n, 1)) + 1e-9:
                raise ValidationError(
                    f"odd dominance inequality fails at level {n}")

    @property
    def levels(self) -> int:
        """Number of constructed breakpoints."""
        return int(self.taus.size)

    # -- evaluation ---------------------------------------------------------

    def _ln_on(self, lam: np.ndarray, k: np.ndarray, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        lo = self.taus[0]
        idx = np.clip(np.searchsorted(self.taus, tau, side="right") - 1,
                      0, self.taus.size - 1)
        base = np.where(tau <= lo, 0.0, lam[idx])
        slope_idx = np.minimum(idx, k.size - 1)
        out = base + np.where(tau <= lo, 0.0,
                              k[slope_idx] * (tau - self.taus[idx]))
        return out

    def ln_L_A(self, tau):
        """ln L_A at tau = ln t (piecewise linear, exact)."""
        out = self._ln_on(self.lam_a, self.k_a, tau)
        return float(out) if np.ndim(tau) == 0 else out

    def ln_L_B(self, tau):
        out = self._ln_on(self.lam_b, self.k_b, tau)
        return float(out) if np.ndim(tau) == 0 else out

    def L_A(self, t):
        """Linear-scale value; errors if it would overflow float range."""
        out = self.ln_L_A(np.log(np.asarray(t, dtype=float)))
        if np.any(np.asarray(out) > 700.0):
            raise NumericError(
                "L_A overflows float range here; use ln_L_A (log-log scale)")
        res = np.exp(out)
        return float(res) if np.ndim(t) == 0 else res

    def L_B(self, t):
        out = self.ln_L_B(np.log(np.asarray(t, dtype=float)))
        if np.any(np.asarray(out) > 700.0):
            raise NumericError(
                "L_B overflows float range here; use ln_L_B (log-log scale)")
        res = np.exp(out)
        return float(res) if np.ndim(t) == 0 else res

    def slow_variation_ratio(self, tau, factor: float = 2.0) -> Tuple[float, float]:
        """(L_A(f*t)/L_A(t), L_B(f*t)/L_B(t)) at tau = ln t -- tends to 1."""
        lf = math.log(factor)
        ra = math.exp(self.ln_L_A(tau + lf) - self.ln_L_A(tau))
        rb = math.exp(self.ln_L_B(tau + lf) - self.ln_L_B(tau))
        return ra, rb

    # -- construction bookkeeping -------------------------------------------

    def dominance_gaps(self, which: str):
        """Per-level gaps ln L_A - ln L_B at the alternating breakpoints.

        which='even': pairs (n, gap at t_{2n+2}) for n >= 1 -- contract
        gap >= ln n.  which='odd': pairs (n, gap at t_{2n+1}) for n >= 1 --
        contract gap <= -ln n.  Breakpoint t_i is taus[i-1] (1-based).
        """
        out = []
        n = 1
        while True:
            i = (2 * n + 2 if which == "even" else 2 * n + 1) - 1
            if i >= self.taus.size:
                break
            out.append((n, float(self.lam_a[i] - self.lam_b[i])))
            n += 1
        return out

    def to_csv(self, path) -> None:
        """Breakpoint table; linear columns overflow to inf past the first
        few levels, so log10 columns are included alongside."""
        import csv

        ln10 = math.log(10.0)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "t_n", "K_A", "K_B", "L_A", "L_B",
                        "log10_t_n", "log10_L_A", "log10_L_B"])
            for i in range(self.taus.size):
                tau = self.taus[i]
                ka = self.k_a[min(i, self.k_a.size - 1)]
                kb = self.k_b[min(i, self.k_b.size - 1)]
                t_lin = math.exp(tau) if tau < 700.0 else math.inf
                la_lin = math.exp(self.lam_a[i]) if self.lam_a[i] < 700.0 else math.inf
                lb_lin = math.exp(self.lam_b[i]) if self.lam_b[i] < 700.0 else math.inf
                w.writerow([i + 1, repr(t_lin), repr(float(ka)), repr(float(kb)),
                            repr(la_lin), repr(lb_lin),
                            repr(float(tau / ln10)),
                            repr(float(self.lam_a[i] / ln10)),
                            repr(float(self.lam_b[i] / ln10))])


def _stretch_slopes(m: int) -> Tuple[float, float]:
    """(K_A, K_B) on the stretch [t_m, t_{m+1}), m >= 1: the step sequences
    K_A(2n) = K_A(2n+1) = 1/(2n+2) and K_B(2n+1) = K_B(2n+2) = 1/(2n+3)."""
    if m % 2 == 1:
        return 1.0 / (m + 1), 1.0 / (m + 2)
    return 1.0 / (m + 2), 1.0 / (m + 1)


def construct_oscillating_pair(levels: int,
                               tau2: float = math.log(10.0)) -> OscillatingPair:
    """Construct the alternating-dominance pair with the given number of
    breakpoints (levels >= 2).

    t_1 = 1; t_2 is a free choice (default 10).  Thereafter breakpoints are
    found by doubling-then-bisection on the dominance inequality evaluated
    in log space: the odd breakpoint t_{2n+1} is pushed until
    ln L_A - ln L_B <= -ln n, the even breakpoint t_{2n+2} until
    ln L_A - ln L_B >= ln n.  On each stretch the gap is linear in
    tau = ln t with nonzero slope, so the search always terminates; a tiny
    overshoot is added so the inequalities hold with strict slack.
    """
    if levels < 2:
        raise ValidationError("need at least 2 breakpoints")
    if tau2 <= 0.0:
        raise ValidationError("second breakpoint must exceed t_1 = 1")
    taus = [0.0, tau2]
    ka1, kb1 = _stretch_slopes(1)
    lam_a = [0.0, ka1 * tau2]
    lam_b = [0.0, kb1 * tau2]

    while len(taus) < levels:
        m = len(taus)  # choosing breakpoint t_{m+1}; active stretch is m
        ka, kb = _stretch_slopes(m)
        gap0 = lam_a[-1] - lam_b[-1]
        slope = ka - kb
        if m % 2 == 0:
            # odd breakpoint t_{m+1} = t_{2n+1}: drive gap down to -ln n
            n = (m + 1 - 1) // 2
            target = -math.log(n)
            want_ge = False
        else:
            # even breakpoint t_{m+1} = t_{2n+2}: drive gap up to +ln n
            n = (m + 1 - 2) // 2
            target = math.log(max(n, 1))
            want_ge = True

        def ok(dtau: float) -> bool:
            g = gap0 + slope * dtau
            return g >= target if want_ge else g <= target

        step = 1.0
        while not ok(step):
            step *= 2.0
            if step > 1e12:
                raise NumericError(
                    f"breakpoint search diverged at level {len(taus)} "
                    f"(achieved {len(taus)} breakpoints)")
        lo, hi = 0.0, step
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
        dtau = hi * (1.0 + 1e-12) + 1e-9
        tau_new = taus[-1] + dtau
        if not math.isfinite(tau_new) or tau_new > 1e300:
            raise NumericError(
                f"breakpoint exceeds representable range at level "
                f"{len(taus)} (achieved {len(taus)} breakpoints)")
        taus.append(tau_new)
        lam_a.append(lam_a[-1] + ka * dtau)
        lam_b.append(lam_b[-1] + kb * dtau)

    n_br = len(taus)
    k_a = np.array([_stretch_slopes(m)[0] for m in range(1, n_br + 1)])
    k_b = np.array([_stretch_slopes(m)[1] for m in range(1, n_br + 1)])
    return OscillatingPair(taus=np.array(taus), lam_a=np.array(lam_a),
                           lam_b=np.array(lam_b), k_a=k_a, k_b=k_b)


def oscillation_check(pair: OscillatingPair, grid=None,
                      points_per_stretch: int = 8) -> Tuple[float, float]:
    """Extremes of c(n)/n over a grid spanning the constructed breakpoints,
    for the alpha = 1 normalizer c(t) = a_B^{-1}(t / (L_A(t) + L_B(t))).

    This is the abstract normalizer specialized to alpha = 1 (the gamma
    constant is exactly 1), evaluated in log coordinates because the
    breakpoints leave float range: ln a_B(sigma) = sigma - ln L_B(sigma) is
    piecewise linear with slopes 1 - K_B > 0 and is inverted exactly per
    segment.  Returns (min, max) of c(n)/n.
    """
    if grid is not None:
        tau_grid = np.log(np.asarray(grid, dtype=float))
    else:
        pieces = [np.linspace(pair.taus[i], pair.taus[i + 1],
                              points_per_stretch, endpoint=False)
                  for i in range(pair.taus.size - 1)]
        tau_grid = np.concatenate(pieces + [pair.taus[-1:]])
    tau_grid = tau_grid[tau_grid >= pair.taus[0]]
    if tau_grid.size == 0:
        raise ValidationError("grid does not intersect the breakpoint range")

    # tabulate ln a_B at breakpoints; extend final segment far enough to
    # cover every inversion target (targets never exceed ln a_B(tau_max))
    br = pair.taus
    ln_ab_br = br - pair.lam_b
    slopes = 1.0 - pair.k_b[:br.size]

    ratios = np.empty(tau_grid.size)
    for j, tau in enumerate(tau_grid):
        la = pair.ln_L_A(tau)
        lb = pair.ln_L_B(tau)
        target = tau - np.logaddexp(la, lb)  # ln( t / (L_A + L_B) )
        if target <= ln_ab_br[0]:
            sigma = target  # below t_1 both L are 1: ln a_B(sigma) = sigma
        else:
            i = int(np.searchsorted(ln_ab_br, target, side="right") - 1)
            i = min(i, br.size - 1)
            sigma = br[i] + (target - ln_ab_br[i]) / slopes[min(i, slopes.size - 1)]
        ratios[j] = math.exp(min(sigma - tau, 0.0))
    return float(ratios.min()), float(ratios.max())


# ---------------------------------------------------------------------------
# heavy-tail builders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteHeavyTail:
    """N-valued random variable given by its tail P[phi > k]: a tabulated
    head for k <= cutoff and an analytic power-log rule
    C * k^{-a} * (1+ln k)^{-q} * (1+ln(1+ln k))^{-r} beyond it.

    ``family`` labels how the tail was built: 'power-log' marks the exact
    closed-form catalogue (classifiable); 'from-L' marks tails derived from
    a truncated-expectation rule (sampled exactly on the head, power-fit
    beyond the cutoff, not classifiable).
    """

    head: np.ndarray  # tail values P[phi > k], k = 0..cutoff
    a: float
    q: float = 0.0
    r: float = 0.0
    C: float = 1.0
    family: str = "power-log"

    def __post_init__(self) -> None:
        h = np.asarray(self.head, dtype=float)
        object.__setattr__(self, "head", h)
        if h.ndim != 1 or h.size < 2:
            raise ValidationError("head table must be 1-d with >= 2 entries")
        if h[0] > 1.0 + 1e-12 or np.any(h < 0.0):
            raise ValidationError("tail must satisfy 0 <= P[phi>k] <= 1")
        if np.any(np.diff(h) > 1e-15):
            raise ValidationError("tail must be nonincreasing")
        if self.a <= 0.0:
            raise ValidationError("tail exponent must be positive")

    @property
    def cutoff(self) -> int:
        return int(self.head.size - 1)

    def tail(self, k):
        """P[phi > k] (vectorized over integer k >= 0)."""
        kv = np.asarray(k, dtype=np.int64)
        out = np.empty(kv.shape, dtype=float)
        inside = kv <= self.cutoff
        out[inside] = self.head[kv[inside]]
        kk = kv[~inside].astype(float)
        if kk.size:
            out[~inside] = self._analytic_tail(kk)
        return float(out) if np.ndim(k) == 0 else out

    def _analytic_tail(self, k: np.ndarray) -> np.ndarray:
        lk = np.log(k)
        val = self.C * np.exp(-self.a * lk - self.q * np.log1p(lk)
                              - self.r * np.log1p(np.log1p(lk)))
        return np.minimum(val, 1.0)

    def truncated_expectation(self, t: int) -> float:
        """L_phi(t) = sum_{k<t} P[phi > k]; t may exceed the cutoff (the
        analytic rule is summed term by term past it)."""
        t = int(t)
        if t < 1:
            raise ValidationError("t must be >= 1")
        m = min(t, self.cutoff + 1)
        total = float(np.sum(self.head[:m]))
        if t > m:
            ks = np.arange(m, t, dtype=float)
            total += float(np.sum(self._analytic_tail(ks)))
        return total

    def is_integrable(self) -> bool:
        """Whether sum_k P[phi > k] converges, decided by the closed-form
        rule for the power-log catalogue (never numerically)."""
        if self.family != "power-log":
            raise ValidationError(
                "integrability is decided analytically and needs the "
                "power-log catalogue family")
        if self.a != 1.0:
            return self.a > 1.0
        if self.q != 1.0:
            return self.q > 1.0
        return self.r > 1.0

    def sample(self, rng, size: int) -> np.ndarray:
        """Inverse-CDF draws: phi = min{k >= 1 : P[phi > k] < u}, exact on
        the head, exact power-log inversion beyond the cutoff."""
        gen = rng if isinstance(rng, np.random.Generator) \
            else np.random.default_rng(rng)
        u = gen.random(int(size))
        return self.quantile(u)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """min{k >= 1 : P[phi > k] < u} for uniforms u in (0, 1] -- the
        inverse-CDF map used for comonotone couplings of two tails."""
        u = np.array(u, dtype=float, copy=True)
        np.clip(u, 1e-300, None, out=u)
        out = np.empty(u.shape, dtype=np.int64)
        deep = u <= self.head[self.cutoff]
        # head: first k with head[k] < u, via searchsorted on the negated
        # (nondecreasing) table
        neg = -self.head
        out[~deep] = np.searchsorted(neg, -u[~deep], side="right")
        if np.any(deep):
            out[deep] = self._invert_analytic(u[deep])
        return out

    def _invert_analytic(self, u: np.ndarray) -> np.ndarray:
        """Smallest integer k with the analytic tail < u (k > cutoff)."""
        # solve a*y + q*log1p(y) + r*log1p(log1p(y)) = ln(C/u) in y = ln k
        rhs = np.log(self.C) - np.log(u)
        y = np.maximum(rhs / self.a, math.log(self.cutoff + 1.0))
        # cap at 4e18 (int64-safe); the truncated mass is < 1e-9 per draw
        # for every catalogue tail used here
        y = np.minimum(y, math.log(4e18))
        for _ in range(60):
            f = self.a * y + self.q * np.log1p(y) + self.r * np.log1p(np.log1p(y)) - rhs
            fp = self.a + self.q / (1.0 + y) + self.r / ((1.0 + np.log1p(y)) * (1.0 + y))
            step = f / fp
            y = y - step
            if np.max(np.abs(step)) < 1e-13:
                break
        k = np.maximum(np.floor(np.exp(np.minimum(y, math.log(4e18)))),
                       float(self.cutoff + 1))
        # integer adjust: k must be the smallest integer with tail(k) < u
        for _ in range(4):
            too_high = self._analytic_tail(np.maximum(k - 1.0, 1.0)) < u
            too_high &= (k - 1.0 > self.cutoff)
            k = np.where(too_high, k - 1.0, k)
            too_low = self._analytic_tail(k) >= u
            k = np.where(too_low, k + 1.0, k)
        return k.astype(np.int64)

    @staticmethod
    def power_log(a: float, q: float = 0.0, r: float = 0.0, C: float = 1.0,
                  cutoff: int = 10 ** 6) -> "DiscreteHeavyTail":
        """Catalogue tail min(1, C*k^{-a}*(1+ln k)^{-q}*(1+ln(1+ln k))^{-r}),
        with P[phi > 0] = 1."""
        if cutoff < 1:
            raise ValidationError("cutoff must be >= 1")
        ks = np.arange(1, cutoff + 1, dtype=float)
        lk = np.log(ks)
        head = np.empty(cutoff + 1)
        head[0] = 1.0
        head[1:] = np.minimum(
            C * np.exp(-a * lk - q * np.log1p(lk) - r * np.log1p(np.log1p(lk))),
            1.0)
        return DiscreteHeavyTail(head=head, a=a, q=q, r=r, C=C,
                                 family="power-log")


def distribution_from_L(L: Callable[[float], float],
                        cutoff: int = 10 ** 5) -> DiscreteHeavyTail:
    """N-valued random variable whose truncated expectation reproduces a
    concave increasing rule L: tail P[phi > k] := (L(k+1) - L(k)) / L(1),
    so that sum_{k<t} P[phi>k] = L(t)/L(1) exactly on the head.

    L must be continuous, increasing, concave with L(t)/t -> 0 (declared);
    increasing increments are a concavity-violation error.  Beyond the
    cutoff the tail continues as a pure power fitted to the top decade of
    increments (log-log slope), keeping the sampler exact and the
    asymptotics close; such tails are labeled 'from-L' and are not
    classifiable by the closed-form catalogue rules.
    """
    if cutoff < 10:
        raise ValidationError("cutoff must be >= 10")
    try:
        l0 = float(L(0.0))
    except Exception:
        l0 = 0.0
    ts = np.arange(1, cutoff + 2, dtype=float)
    lv = np.array([float(L(t)) for t in ts])
    vals = np.concatenate(([l0], lv))
    if np.any(np.diff(vals) < -1e-12 * max(1.0, abs(vals[-1]))):
        raise ValidationError("L must be nondecreasing")
    inc = np.diff(vals)  # inc[k] = L(k+1) - L(k), k = 0..cutoff
    if np.any(np.diff(inc) > 1e-9 * max(inc[0], 1e-300)):
        raise ValidationError("concavity violation: increments increase")
    l1 = vals[1]
    if l1 <= 0.0:
        raise ValidationError("L(1) must be positive")
    head = np.minimum(np.maximum(inc / l1, 0.0), 1.0)
    head = np.minimum.accumulate(head)
    # pure-power continuation fitted over the top decade of increments
    k_hi = cutoff
    k_lo = max(2, cutoff // 10)
    with np.errstate(divide="ignore"):
        slope = (math.log(max(head[k_hi], 1e-300)) - math.log(max(head[k_lo], 1e-300))) \
            / (math.log(k_hi) - math.log(k_lo))
    a_fit = max(-slope, 1e-6)
    c_fit = head[k_hi] * k_hi ** a_fit
    return DiscreteHeavyTail(head=head, a=a_fit, q=0.0, r=0.0,
                             C=max(c_fit, 1e-300), family="from-L")


# ---------------------------------------------------------------------------
# iterated-logarithm normalizer
# ---------------------------------------------------------------------------

def lil_normalizer(b: TabulatedMonotone, grid):
    """b*(t) = b(t / loglog t) * loglog t on the grid, plus its inverse a*
    (a tabulated monotone built by exchanging grid and values, so the
    composition a*(b*(t)) = t holds exactly at the nodes).

    The grid must start above e^e so that loglog t > 1.
    """
    g = np.asarray(grid, dtype=float)
    if np.any(g <= math.exp(math.e)):
        raise ValidationError("grid must lie above e^e (loglog t > 1)")
    ll = np.log(np.log(g))
    args = g / ll
    if np.any(args < b.grid[0]) or np.any(args > b.grid[-1]):
        raise ValidationError("b table does not cover t/loglog t for the grid")
    bstar_vals = b.value(args) * ll
    bstar = TabulatedMonotone(g, bstar_vals)
    astar = TabulatedMonotone(bstar_vals, g)
    return bstar, astar
