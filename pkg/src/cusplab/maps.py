"""Two-full-branch interval maps with indifferent fixed points at 0 and 1.

The built-in family on [0, 1] with branch point ``c``:

    T(x) = x + a0 * x**(1+p0)                     on [0, c]
    T(x) = 1 - ((1-x) + a1 * (1-x)**(1+p1))       on (c, 1]

with ``a0 = (1-c)/c**(1+p0)`` and ``a1 = c/(1-c)**(1+p1)`` so that both
branches are onto: T(c-) = 1 and T(c+) = 0.  Both fixed points are
indifferent (T'(0) = T'(1) = 1); orbits escape the cusps at 0 and 1 only
polynomially, which makes the invariant density non-integrable and the
occupation statistics heavy-tailed.  The convention at the branch point is
that x = c belongs to the left branch.

Inverse branches ``f0 = (T|_(0,c))^{-1}`` and ``f1 = (T|_(c,1))^{-1}``
generate the ladder sequences

    u_k = f0^k(1),     v_k = 1 - f1^k(0)

whose partial sums drive every wandering-rate normalization in the package.

``compare_partial_sums`` implements the two-fixed-point comparison: for
increasing rules f, g with 0 <= f(x), g(x) < x near 0 and
x - f(x) ~ a**(-p) * (x - g(x)) with x - f(x) regularly varying of index
1 + p, the partial-sum ratio sum g^j / sum f^j tends to 1/a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ._kernels import ladder, poly_partial_sums
from .errors import NumericError, ValidationError

__all__ = [
    "TOL_ROOT",
    "MapParams",
    "IterateTable",
    "FixedPointFunction",
    "evaluate_map",
    "inverse_branch",
    "iterate_table",
    "compare_partial_sums",
]

#: residual tolerance |T(root) - y| for inverse-branch root finding
TOL_ROOT = 1e-14

#: iterates below this are flushed to zero (denormal guard)
UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class MapParams:
    """Parameters (c, p0, p1) of the built-in family plus derived constants.

    Attributes
    ----------
    a0, a1 : branch coefficients forced by surjectivity.
    theta_plus, theta_minus : reciprocal one-sided slopes at the branch
        point, 1/T'(c+) and 1/T'(c-).
    alpha : min(1, 1/p0) -- the order of the distributional limit attached
        to the left cusp; beta is the analogous right-side index 1/p1.
    """

    c: float
    p0: float = 1.0
    p1: float = 1.0
    a0: float = field(init=False, repr=False)
    a1: float = field(init=False, repr=False)
    theta_plus: float = field(init=False, repr=False)
    theta_minus: float = field(init=False, repr=False)
    alpha: float = field(init=False, repr=False)
    beta: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.c < 1.0):
            raise ValidationError(f"branch point c must be in (0,1), got {self.c}")
        if self.p0 < 1.0 or self.p1 < 1.0:
            raise ValidationError(
                f"cusp exponents must be >= 1, got p0={self.p0}, p1={self.p1}")
        c, p0, p1 = self.c, self.p0, self.p1
        a0 = (1.0 - c) / c ** (1.0 + p0)
        a1 = c / (1.0 - c) ** (1.0 + p1)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)
        # T'(c+) = 1 + (1+p1) a1 (1-c)**p1  (right branch, from the right)
        object.__setattr__(self, "theta_plus",
                           1.0 / (1.0 + (1.0 + p1) * a1 * (1.0 - c) ** p1))
        object.__setattr__(self, "theta_minus",
                           1.0 / (1.0 + (1.0 + p0) * a0 * c ** p0))
        object.__setattr__(self, "alpha", min(1.0, 1.0 / p0))
        object.__setattr__(self, "beta", min(1.0, 1.0 / p1))

    def as_dict(self) -> dict:
        return {"c": self.c, "p0": self.p0, "p1": self.p1, "a0": self.a0,
                "a1": self.a1, "theta_plus": self.theta_plus,
                "theta_minus": self.theta_minus, "alpha": self.alpha,
                "beta": self.beta}


def evaluate_map(params: MapParams, x):
    """Evaluate T(x); accepts scalars or arrays in [0, 1].

    x = c is resolved to the left branch (documented convention).
    """
    xv = np.asarray(x, dtype=float)
    if np.any(xv < 0.0) or np.any(xv > 1.0):
        raise ValidationError("map argument outside [0, 1]")
    left = xv <= params.c
    w = 1.0 - xv
    out = np.where(
        left,
        xv + params.a0 * xv ** (1.0 + params.p0),
        1.0 - (w + params.a1 * w ** (1.0 + params.p1)),
    )
    out = np.clip(out, 0.0, 1.0)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def _solve_increasing(a: float, p: float, y, hi: float):
    """Solve x + a*x**(1+p) = y for x in [0, hi] (vectorized bisection with
    a Newton polish).  The left-hand side is strictly increasing."""
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    lo = np.zeros_like(yv)
    up = np.full_like(yv, hi)
    e = 1.0 + p
    for _ in range(64):
        mid = 0.5 * (lo + up)
        fmid = mid + a * mid ** e
        high = fmid > yv
        up = np.where(high, mid, up)
        lo = np.where(high, lo, mid)
    x = 0.5 * (lo + up)
    for _ in range(3):
        f = x + a * x ** e - yv
        fp = 1.0 + a * e * x ** (e - 1.0)
        x = np.clip(x - f / fp, 0.0, hi)
    resid = np.abs(x + a * x ** e - yv)
    if np.any(resid > TOL_ROOT):
        raise NumericError(
            f"inverse-branch root finder residual {resid.max():.3e} exceeds "
            f"{TOL_ROOT}")
    return x


def inverse_branch(params: MapParams, side: str, y):
    """Inverse branch value f0(y) in [0, c] or f1(y) in [c, 1].

    Monotone in y; the result satisfies |T(result) - y| <= TOL_ROOT.
    """
    yv = np.asarray(y, dtype=float)
    if np.any(yv < 0.0) or np.any(yv > 1.0):
        raise ValidationError("inverse-branch argument outside [0, 1]")
    if side == "left":
        x = _solve_increasing(params.a0, params.p0, yv, params.c)
    elif side == "right":
        w = _solve_increasing(params.a1, params.p1, 1.0 - yv, 1.0 - params.c)
        x = 1.0 - w
    else:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    if np.isscalar(y) or np.ndim(y) == 0:
        return float(x[0] if x.ndim else x)
    return x


@dataclass(frozen=True)
class IterateTable:
    """Ladders u_k = f0^k(1), v_k = 1 - f1^k(0) for k = 0..n-1, plus their
    partial sums U[m] = sum_{k<m} u_k and V[m] = sum_{k<m} v_k, m = 0..n."""

    params: MapParams
    u: np.ndarray
    v: np.ndarray
    U: np.ndarray
    V: np.ndarray
    n: int

    def __post_init__(self) -> None:
        for name, seq in (("u", self.u), ("v", self.v)):
            if seq[0] != 1.0:
                raise ValidationError(f"{name}[0] must be 1")
            pos = seq[seq > 0.0]
            if np.any(np.diff(pos) >= 0.0):
                raise ValidationError(f"{name} must be strictly decreasing")
        if np.any(np.diff(self.U) < 0.0) or np.any(np.diff(self.V) < 0.0):
            raise ValidationError("partial sums must be nondecreasing")

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "u_k", "v_k", "U_k", "V_k"])
            for k in range(self.n):
                w.writerow([k, repr(float(self.u[k])), repr(float(self.v[k])),
                            repr(float(self.U[k])), repr(float(self.V[k]))])


def iterate_table(params: MapParams, n: int) -> IterateTable:
    """Tabulate the inverse-branch ladders to length n (u_k, v_k for
    k = 0..n-1).  Both ladders start at 1 and solve the one-step backward
    equation s + a*s**(1+p) = previous by guarded Newton."""
    if n < 1:
        raise ValidationError("table length must be >= 1")
    u = ladder(params.a0, params.p0, 1.0, n - 1)
    v = ladder(params.a1, params.p1, 1.0, n - 1)
    U = np.concatenate(((0.0,), np.cumsum(u)))
    V = np.concatenate(((0.0,), np.cumsum(v)))
    return IterateTable(params=params, u=u, v=v, U=U, V=V, n=n)


@dataclass(frozen=True)
class FixedPointFunction:
    """An increasing rule f on [0, kappa] with f(0) = 0, 0 <= f(x) < x on
    (0, kappa], f'(0) = 1 -- the hypotheses of the two-fixed-point
    comparison.

    ``poly`` marks the fast closed-form family f(x) = x - b*x**(1+p);
    arbitrary scalar callables are supported through ``func`` (slower,
    pure-Python iteration).
    """

    kappa: float
    label: str = "f"
    func: Optional[Callable[[float], float]] = None
    poly: Optional[Tuple[float, float]] = None  # (b, p)

    def __post_init__(self) -> None:
        if self.kappa <= 0.0:
            raise ValidationError("kappa must be positive")
        if (self.func is None) == (self.poly is None):
            raise ValidationError("supply exactly one of func or poly")
        self._validate()

    def __call__(self, x: float) -> float:
        if self.poly is not None:
            b, p = self.poly
            return x - b * x ** (1.0 + p)
        return self.func(x)

    def _validate(self) -> None:
        grid = np.linspace(0.0, self.kappa, 1001)[1:]
        vals = np.array([self(float(x)) for x in grid])
        if abs(self(0.0)) > 1e-15:
            raise ValidationError(f"{self.label}(0) must be 0")
        if np.any(vals < 0.0) or np.any(vals >= grid):
            raise ValidationError(
                f"{self.label} must satisfy 0 <= f(x) < x on (0, kappa]")
        diffs = np.diff(np.concatenate(((0.0,), vals)))
        if np.any(diffs < 0.0):
            # Monotonicity may fail near kappa itself (the comparison only
            # constrains behavior near 0); accept if the first iterate
            # re-enters the region where the rule is increasing.
            bad = grid[1:][diffs[1:] < 0.0]
            first = vals[-1]
            if bad.size and first > bad.min():
                raise ValidationError(
                    f"{self.label} is not increasing on (0, kappa] and its "
                    f"iterates do not re-enter the increasing region")


def _from_poly(b: float, p: float, kappa: float, label: str) -> FixedPointFunction:
    return FixedPointFunction(kappa=kappa, label=label, poly=(b, p))


def _from_inverse_branch(params: MapParams, side: str,
                         label: str = "") -> FixedPointFunction:
    kappa = params.c if side == "left" else 1.0 - params.c
    lbl = label or f"f_{side}"

    def rule(x: float) -> float:
        if x == 0.0:
            return 0.0
        if side == "left":
            return inverse_branch(params, "left", x)
        # conjugate the right branch to a fixed point at 0: distance from 1
        return 1.0 - inverse_branch(params, "right", 1.0 - x)

    return FixedPointFunction(kappa=kappa, label=lbl, func=rule)


FixedPointFunction.from_poly = staticmethod(_from_poly)
FixedPointFunction.from_inverse_branch = staticmethod(_from_inverse_branch)


def compare_partial_sums(f: FixedPointFunction, g: FixedPointFunction,
                         kappa: float, n: int) -> np.ndarray:
    """Ratio sequence sum_{j<m} g^j(kappa) / sum_{j<m} f^j(kappa) for
    m = 1..n.  Under x - f(x) ~ a**(-p) (x - g(x)) with x - f regularly
    varying of index 1+p (and divergent f-sums), the tail approaches 1/a.

    Iteration of either rule stops adding once its iterate underflows below
    1e-300; the sums then stay constant.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if kappa > f.kappa or kappa > g.kappa:
        raise ValidationError("kappa outside a rule's domain")

    def sums(rule: FixedPointFunction) -> np.ndarray:
        if rule.poly is not None:
            b, p = rule.poly
            return poly_partial_sums(b, p, kappa, n)
        out = np.empty(n + 1)
        out[0] = 0.0
        x = kappa
        acc = 0.0
        for m in range(n):
            acc += x
            out[m + 1] = acc
            x = rule(x) if x > UNDERFLOW_FLOOR else 0.0
        return out

    Sf = sums(f)
    Sg = sums(g)
    return Sg[1:] / Sf[1:]
