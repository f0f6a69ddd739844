"""Tests for the discrete-state processes: the renewal chain and its tower,
the base-chain normalized-position check, the sums-versus-maxima runs, and
the closed-form integral-criterion classifier.

The compiled trajectory kernels are cross-validated bit-for-bit against
pure-python mirrors built from the dataclass transition rules and the same
splitmix64 stream derivation.
"""
import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta

from cusplab import (DiscreteHeavyTail, HypothesisError, IidProcessSpec,
                     RenewalChainSpec, TowerChainState, ValidationError,
                     classify_integral_criterion, default_chain_checkpoints,
                     sums_vs_maxima_run, tanny_check, tower_ratio_run)

POWER = RenewalChainSpec.power_lifetime(2.5)
PSI1 = DiscreteHeavyTail.power_log(1.0)

# ---------------------------------------------------------------------------
# pure-python mirror of the compiled trial kernels (same stream derivation,
# same float operations, same order)
# ---------------------------------------------------------------------------

_MASK = (1 << 64) - 1


def _sm64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _stream(seed, trial):
    s = (seed ^ ((trial * 0xA3AAA15E6B8F0330) & _MASK)) & _MASK
    return _sm64(s)[0]


def _unit(state):
    state, z = _sm64(state)
    return state, (z >> 11) * 2.0 ** -53


def _em_tail(k, s):
    return k ** (1.0 - s) / (s - 1.0) - 0.5 * k ** (-s) \
        + (s / 12.0) * k ** (-s - 1.0)


def _draw_lifetime(u, head_cdf, s_exp):
    cutoff = len(head_cdf)
    if u <= head_cdf[-1]:
        return int(np.searchsorted(head_cdf, u, side="left")) + 1
    rem = 1.0 - head_cdf[-1]
    target = (1.0 - u) / rem * _em_tail(float(cutoff), s_exp)
    lo_k, hi_k = float(cutoff), 2.0 * float(cutoff)
    while _em_tail(hi_k, s_exp) > target:
        hi_k *= 2.0
        if hi_k > 1e18:
            break
    for _ in range(200):
        mid = 0.5 * (lo_k + hi_k)
        if _em_tail(mid, s_exp) > target:
            lo_k = mid
        else:
            hi_k = mid
        if hi_k - lo_k < 0.5:
            break
    k = int(np.ceil(hi_k))
    while k > cutoff and _em_tail(float(k - 1), s_exp) <= target:
        k -= 1
    return k


def _mirror_tower(spec, n_steps, seed, trial, chks):
    """Replay a tower trajectory with the dataclass step rule."""
    state = TowerChainState(0, 0)
    s = _stream(seed, trial)
    head = [float(v) for v in spec.head_cdf]
    root = a = b = viol = ren = 0
    out_a, out_b, out_lvl = [], [], []
    ci = 0
    for n in range(n_steps):
        if state.in_a:
            a += 1
        elif state.in_b:
            b += 1
        if abs(a - b) > root:
            viol += 1
        if state.j == 2 * state.k + 1 and state.k == 0:
            s, u = _unit(s)
            if u <= 0.0:
                u = 2.0 ** -53
            kk = _draw_lifetime(u, head, spec.s_exp)
            ren += 1
            root = kk - 1
            state = TowerChainState(kk - 1, 0)
        else:
            state = state.advance(None)
        if ci < len(chks) and n + 1 == chks[ci]:
            out_a.append(a)
            out_b.append(b)
            out_lvl.append(root)
            ci += 1
    return out_a, out_b, out_lvl, viol, ren


def _mirror_base(spec, n_steps, seed, trial, x0, chks, n_occ):
    s = _stream(seed, trial)
    head = [float(v) for v in spec.head_cdf]
    x = x0
    occ = [0] * n_occ
    best, best_ren, just = -1.0, False, False
    xr = []
    ci = 0
    for n in range(n_steps):
        if x < n_occ:
            occ[x] += 1
        if n >= 1 and x / n > best:
            best = x / n
            best_ren = just
        if x > 0:
            x -= 1
            just = False
        else:
            s, u = _unit(s)
            if u <= 0.0:
                u = 2.0 ** -53
            x = _draw_lifetime(u, head, spec.s_exp) - 1
            just = True
        if ci < len(chks) and n + 1 == chks[ci]:
            xr.append(x / (n + 1))
            ci += 1
    return xr, occ, best, best_ren


def _mirror_svm_same(n_steps, seed, trial, chks):
    s = _stream(seed, trial)
    ssum = run_max = 0.0
    rm, raw_out = [], []
    ci = 0
    for n in range(n_steps):
        s, u = _unit(s)
        if u <= 0.0:
            u = 2.0 ** -53
        phi = np.ceil(1.0 / (u * u))
        raw = math.nan
        if n >= 1:
            raw = phi / ssum
            if raw > run_max:
                run_max = raw
        ssum += phi
        if ci < len(chks) and n + 1 == chks[ci]:
            rm.append(run_max if n >= 1 else math.nan)
            raw_out.append(raw)
            ci += 1
    return rm, raw_out, run_max


def _pl_tail(x, a, q, r, c):
    if x < 1.0:
        return 1.0
    t = c * x ** (-a)
    if q != 0.0:
        t *= (1.0 + np.log(x)) ** (-q)
    if r != 0.0:
        t *= (1.0 + np.log(1.0 + np.log(x))) ** (-r)
    return t if t < 1.0 else 1.0


def _pl_smallest_k(u, a, q, r, c):
    """Smallest k >= 1 with tail(k) < u, by doubling plus bisection on the
    same float tail rule (no Newton shortcut)."""
    k = 1
    while _pl_tail(float(k), a, q, r, c) >= u:
        k *= 2
        if k > 4e18:
            break
    lo, hi = max(k // 2, 1), k
    while lo < hi:
        mid = (lo + hi) // 2
        if _pl_tail(float(mid), a, q, r, c) >= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _mirror_svm_pair(n_steps, seed, trial, chks, psi_a, pa, pq, pr, pc):
    s = _stream(seed, trial)
    ssum = run_max = 0.0
    rm, raw_out = [], []
    ci = 0
    for n in range(n_steps):
        s, u = _unit(s)
        if u <= 0.0:
            u = 2.0 ** -53
        raw = math.nan
        if n >= 1:
            phi = float(_pl_smallest_k(u, pa, pq, pr, pc))
            raw = phi / ssum
            if raw > run_max:
                run_max = raw
        if ci < len(chks) and n + 1 == chks[ci]:
            rm.append(run_max if n >= 1 else math.nan)
            raw_out.append(raw)
            ci += 1
        psi = np.ceil(1.0 / u) if psi_a == 1.0 else np.ceil(u ** (-1.0 / psi_a))
        ssum += psi
    return rm, raw_out, run_max


def _eq_nan(a, b):
    return np.array_equal(np.asarray(a, dtype=float),
                          np.asarray(b, dtype=float), equal_nan=True)


# ---------------------------------------------------------------------------
# lifetime specifications
# ---------------------------------------------------------------------------

class TestRenewalChainSpec:
    def test_power_lifetime_exact_head(self):
        z = zeta(2.5, 1)
        for k in (1, 5, 100):
            assert POWER.pmf(k) == pytest.approx(k ** -2.5 / z, rel=1e-12)
        assert POWER.pmf(0) == 0.0
        assert POWER.tail(0) == 1.0
        assert POWER.tail(3) == pytest.approx(
            1.0 - (1 + 2 ** -2.5 + 3 ** -2.5) / z, rel=1e-12)

    def test_mean_matches_zeta_ratio(self):
        # E[K] = zeta(3/2)/zeta(5/2); the analytic continuation beyond the
        # tabulated head carries the only approximation (relative ~1e-6)
        exact = zeta(1.5, 1) / zeta(2.5, 1)
        assert POWER.mean() == pytest.approx(exact, rel=3e-6)
        assert POWER.mean() == pytest.approx(1.947370031019103, rel=1e-12)

    def test_moment_flags(self):
        assert POWER.finite_mean
        assert POWER.infinite_second_moment
        light = RenewalChainSpec.power_lifetime(3.5, cutoff=100)
        assert not light.infinite_second_moment
        with pytest.raises(ValidationError):
            RenewalChainSpec.power_lifetime(2.0)

    def test_tail_continues_past_cutoff(self):
        spec = RenewalChainSpec.power_lifetime(2.5, cutoff=100)
        t100 = spec.tail(100)
        t200 = spec.tail(200)
        assert 0.0 < t200 < t100
        # the continuation keeps the k**-1.5 tail shape
        assert t200 / t100 == pytest.approx(2.0 ** -1.5, rel=1e-2)
        assert spec.pmf(150) > 0.0

    def test_stationary_pmf(self):
        mu = POWER.stationary_pmf(11)
        assert mu[0] == pytest.approx(1.0 / POWER.mean(), rel=1e-12)
        assert mu[0] == pytest.approx(0.5135130889719389, rel=1e-12)
        assert mu[1] == pytest.approx(0.1307192262674427, rel=1e-12)
        assert np.all(np.diff(mu) < 0)
        assert 0.8 < float(np.sum(mu)) < 1.0

    def test_stationary_needs_finite_mean(self):
        heavy = RenewalChainSpec(head_cdf=POWER.head_cdf, s_exp=2.5,
                                 finite_mean=False,
                                 infinite_second_moment=True)
        with pytest.raises(ValidationError):
            heavy.stationary_pmf(5)
        with pytest.raises(ValidationError):
            heavy.sample_stationary(np.random.default_rng(0))

    def test_deterministic_lifetime(self):
        det = RenewalChainSpec.deterministic(2)
        assert det.pmf(1) == 0.0
        assert det.pmf(2) == 1.0
        assert det.tail(1) == 1.0
        assert det.tail(2) == 0.0
        assert det.mean() == 2.0
        assert np.allclose(det.stationary_pmf(4), [0.5, 0.5, 0.0, 0.0])
        with pytest.raises(ValidationError):
            RenewalChainSpec.deterministic(0)

    def test_head_validation(self):
        with pytest.raises(ValidationError):
            RenewalChainSpec(head_cdf=np.array([0.5, 0.4]), s_exp=2.5,
                             finite_mean=True, infinite_second_moment=True)
        with pytest.raises(ValidationError):
            RenewalChainSpec(head_cdf=np.array([0.5, 1.2]), s_exp=2.5,
                             finite_mean=True, infinite_second_moment=True)
        with pytest.raises(ValidationError):
            RenewalChainSpec(head_cdf=np.empty(0), s_exp=2.5,
                             finite_mean=True, infinite_second_moment=True)
        # an analytic tail with s <= 2 would have infinite mean
        with pytest.raises(ValidationError):
            RenewalChainSpec(head_cdf=np.array([0.5]), s_exp=1.5,
                             finite_mean=True, infinite_second_moment=True)

    def test_sample_stationary_deterministic_lifetime(self):
        det = RenewalChainSpec.deterministic(1)
        rng = np.random.default_rng(4)
        assert all(det.sample_stationary(rng) == 0 for _ in range(20))

    @given(s=st.floats(2.1, 4.0))
    @settings(max_examples=20, deadline=None)
    def test_lifetime_sanity_property(self, s):
        spec = RenewalChainSpec.power_lifetime(s, cutoff=256)
        assert spec.mean() >= 1.0
        ks = np.arange(0, 600)
        tails = np.array([spec.tail(int(k)) for k in ks])
        assert np.all(np.diff(tails) <= 1e-15)
        assert tails[0] == 1.0


# ---------------------------------------------------------------------------
# tower states and runs
# ---------------------------------------------------------------------------

class TestTowerChainState:
    def test_state_validation(self):
        with pytest.raises(ValidationError):
            TowerChainState(-1, 0)
        with pytest.raises(ValidationError):
            TowerChainState(1, 4)
        with pytest.raises(ValidationError):
            TowerChainState(0, 2)

    def test_membership_table(self):
        # fiber k=1 has levels j = 0..3: only j=1 is in A, only j=3 in B
        flags = [(TowerChainState(1, j).in_a, TowerChainState(1, j).in_b)
                 for j in range(4)]
        assert flags == [(False, False), (True, False),
                         (False, False), (False, True)]

    def test_deterministic_six_cycle(self):
        # constant lifetime 2 closes a period-6 loop through both fibers
        seen = [TowerChainState(0, 0)]
        for _ in range(6):
            seen.append(seen[-1].advance(lambda: 2))
        coords = [(s.k, s.j) for s in seen]
        assert coords == [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (1, 3),
                          (0, 0)]


class TestTowerRatioRun:
    def test_deterministic_lifetime_exact_counts(self):
        run = tower_ratio_run(RenewalChainSpec.deterministic(2), 600,
                              seed=0, checkpoints=(6, 60, 600))
        assert np.array_equal(run.s_a, [1, 10, 100])
        assert np.array_equal(run.s_b, [1, 10, 100])
        assert np.all(run.ratio == 1.0)
        assert np.all(run.renewal_level == 1)
        assert run.violations == 0
        assert run.renewals == 100

    def test_matches_python_mirror(self):
        spec = RenewalChainSpec.power_lifetime(2.5, cutoff=50)
        chks = (10, 100, 1000, 4000)
        run = tower_ratio_run(spec, 4000, seed=11, checkpoints=chks)
        sa, sb, lvl, viol, ren = _mirror_tower(spec, 4000, 11, 0, chks)
        assert np.array_equal(run.s_a, sa)
        assert np.array_equal(run.s_b, sb)
        assert np.array_equal(run.renewal_level, lvl)
        assert run.violations == viol == 0
        assert run.renewals == ren

    def test_ratio_near_one_at_scale(self):
        expected = {101: 1.000221, 102: 1.000282, 103: 1.000040,
                    104: 1.000370, 105: 1.000114}
        renewals = {101: 25757, 102: 29175, 103: 10764, 104: 11320,
                    105: 17946}
        for sd, want in expected.items():
            run = tower_ratio_run(POWER, 10**6, seed=sd)
            assert run.violations == 0
            assert run.renewals == renewals[sd]
            assert run.ratio[-1] == pytest.approx(want, abs=1e-6)
            assert abs(run.ratio[-1] - 1.0) <= 0.05

    def test_bad_checkpoints(self):
        with pytest.raises(ValidationError):
            tower_ratio_run(POWER, 100, seed=0, checkpoints=(10, 10))
        with pytest.raises(ValidationError):
            tower_ratio_run(POWER, 100, seed=0, checkpoints=(10, 200))

    def test_default_chain_checkpoints(self):
        assert default_chain_checkpoints(0) == ()
        assert default_chain_checkpoints(10**5) == (100, 1000, 10000, 100000)
        assert default_chain_checkpoints(50) == (50,)

    def test_csv_export(self, tmp_path):
        run = tower_ratio_run(RenewalChainSpec.deterministic(2), 600,
                              seed=0, checkpoints=(6, 600))
        path = tmp_path / "tower.csv"
        run.to_csv(path, trial=3)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trial", "n", "S_A", "S_B", "ratio",
                           "renewal_level"]
        assert rows[1] == ["3", "6", "1", "1", "1.0", "1"]
        assert len(rows) == 3


# ---------------------------------------------------------------------------
# base-chain normalized position
# ---------------------------------------------------------------------------

class TestTannyCheck:
    def test_unit_lifetime_pins_chain_to_zero(self):
        det = RenewalChainSpec.deterministic(1)
        run = tanny_check(det, 1000, seed=5)
        assert run.x_start == 0
        assert np.all(run.x_over_n == 0.0)
        assert run.best_ratio == 0.0
        assert run.best_at_renewal
        assert run.occupation[0] == 1000

    def test_matches_python_mirror(self):
        spec = RenewalChainSpec.power_lifetime(2.5, cutoff=200)
        chks = (10, 100, 3000)
        run = tanny_check(spec, 3000, seed=13, checkpoints=chks,
                          n_occup_states=8, trial=2)
        xr, occ, best, best_ren = _mirror_base(spec, 3000, 13, 2,
                                               run.x_start, chks, 8)
        assert _eq_nan(run.x_over_n, xr)
        assert np.array_equal(run.occupation, occ)
        assert run.best_ratio == best
        assert run.best_at_renewal == best_ren

    def test_normalized_position_max_is_structural(self):
        # off renewals the position only decreases, so the trajectory max of
        # X_n/n sits either at a renewal step or at the very first step
        # (inherited from the stationary start)
        for tr in range(100):
            run = tanny_check(POWER, 10**5, seed=2027, trial=tr)
            assert run.best_at_renewal or \
                run.best_ratio == max(run.x_start - 1, 0)

    def test_normalized_position_dies(self):
        hits = sum(
            tanny_check(POWER, 10**6, seed=2027, trial=tr).x_over_n[-1]
            <= 0.01
            for tr in range(100))
        assert hits == 100

    def test_frozen_trajectory(self):
        run = tanny_check(POWER, 10**6, seed=2027, trial=0)
        assert run.x_start == 95
        assert run.best_ratio == 94.0
        assert not run.best_at_renewal
        assert run.x_over_n[-1] == 0.0

    def test_occupation_matches_invariant_pmf(self):
        # long-run state frequencies track the invariant pmf; the binomial
        # 3-SE band is only meaningful per seed because the lifetime's
        # infinite second moment makes the fluctuations heavy-tailed
        mu = POWER.stationary_pmf(11)
        se = np.sqrt(mu * (1.0 - mu) / 10**7)
        for sd, worst_expected in ((14, 2.210), (15, 1.702)):
            run = tanny_check(POWER, 10**7, seed=sd, n_occup_states=11)
            emp = run.occupation / 10**7
            worst = float(np.max(np.abs(emp - mu) / se))
            assert worst == pytest.approx(worst_expected, abs=0.05)
            assert worst <= 3.0

    def test_csv_export(self, tmp_path):
        run = tanny_check(POWER, 1000, seed=1)
        path = tmp_path / "tanny.csv"
        run.to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trial", "n", "X_n", "X_over_n"]
        assert len(rows) == 1 + run.checkpoints.size
        for row, n, v in zip(rows[1:], run.checkpoints, run.x_over_n):
            assert int(row[1]) == n
            assert float(row[3]) == v
            assert int(row[2]) == int(round(v * n))


# ---------------------------------------------------------------------------
# sums versus maxima
# ---------------------------------------------------------------------------

class TestSumsVsMaxima:
    def test_same_power_matches_mirror(self):
        spec = IidProcessSpec.from_tails(DiscreteHeavyTail.power_log(0.5),
                                         DiscreteHeavyTail.power_log(0.5))
        chks = (2, 10, 500, 2000)
        run = sums_vs_maxima_run(spec, 2000, seed=5, checkpoints=chks)
        rm, raw, fin = _mirror_svm_same(2000, 5, 0, chks)
        assert _eq_nan(run.run_max, rm)
        assert _eq_nan(run.raw, raw)
        assert run.final_run_max == fin

    def test_pair_kernel_matches_mirror(self):
        # the record-filter shortcut must agree with the plain per-step
        # inversion of the same tail rule
        spec = IidProcessSpec.from_tails(
            DiscreteHeavyTail.power_log(1.0, 0.0, 1.0), PSI1)
        chks = (2, 10, 500, 2000)
        run = sums_vs_maxima_run(spec, 2000, seed=7, checkpoints=chks)
        rm, raw, fin = _mirror_svm_pair(2000, 7, 0, chks, 1.0,
                                        1.0, 0.0, 1.0, 1.0)
        assert _eq_nan(run.run_max, rm)
        assert _eq_nan(run.raw, raw)
        assert run.final_run_max == fin

    def test_generic_path_single_chunk_equivalence(self):
        # a psi outside the fast-kernel cases takes the chunked vectorized
        # path; replicate it directly from the tail quantiles
        phi = DiscreteHeavyTail.power_log(0.5, cutoff=4096)
        psi = DiscreteHeavyTail.power_log(1.0, 0.5, cutoff=4096)
        spec = IidProcessSpec.from_tails(phi, psi)
        n = 50_000
        chks = (2, 100, 50_000)
        run = sums_vs_maxima_run(spec, n, seed=3, checkpoints=chks)
        rng = np.random.default_rng([3, 0])
        u = rng.random(n)
        np.clip(u, 1e-300, None, out=u)
        phis = phi.quantile(u).astype(float)
        psis = psi.quantile(u).astype(float)
        csum = np.concatenate(((0.0,), np.cumsum(psis[:-1])))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = phis / csum
        ratios[0] = math.nan
        cmax = np.fmax.accumulate(np.nan_to_num(ratios, nan=0.0))
        for i, k in enumerate(chks):
            assert run.raw[i] == ratios[k - 1] or (
                math.isnan(run.raw[i]) and math.isnan(ratios[k - 1]))
            assert run.run_max[i] == cmax[k - 1]
        assert run.final_run_max == cmax[-1]

    def test_divergent_same_power_frozen_seeds(self):
        spec = IidProcessSpec.from_tails(DiscreteHeavyTail.power_log(0.5),
                                         DiscreteHeavyTail.power_log(0.5))
        expected = {0: 39.580324, 1: 35.182768, 2: 303.471496,
                    3: 28096.225806, 4: 42.134419}
        finals = {}
        for tr, want in expected.items():
            run = sums_vs_maxima_run(spec, 10**6, seed=2026, trial=tr)
            finals[tr] = run.final_run_max
            assert run.final_run_max == pytest.approx(want, abs=1e-3)
            assert np.all(np.diff(run.run_max[1:]) >= 0)
        # occasional enormous records are the divergence mechanism
        assert max(finals.values()) > 100.0

    def test_convergent_pair_dies(self):
        # integrable-phi pair: the raw ratio collapses and the running max
        # freezes over the final decade
        spec = IidProcessSpec(phi=DiscreteHeavyTail.power_log(1.0, 3.0),
                              psi=PSI1, classification="convergent")
        stuck = 0
        finals = []
        for sd in range(25):
            run = sums_vs_maxima_run(spec, 10**5, seed=sd)
            finals.append(run.raw[-1])
            stuck += run.run_max[-1] == run.run_max[-2]
        assert stuck == 25
        assert float(np.median(finals)) < 1e-4
        assert finals[0] == pytest.approx(8.4532926e-07, rel=1e-6)

    def test_lighter_tail_pair_regression(self):
        spec = IidProcessSpec.from_tails(
            DiscreteHeavyTail.power_log(1.0, 0.0, 1.0), PSI1)
        assert spec.classification == "divergent"
        run = sums_vs_maxima_run(spec, 10**5, seed=7)
        assert run.final_run_max == pytest.approx(0.403527388, rel=1e-8)

    def test_short_runs_have_no_ratio(self):
        spec = IidProcessSpec.from_tails(DiscreteHeavyTail.power_log(0.5),
                                         DiscreteHeavyTail.power_log(0.5))
        run = sums_vs_maxima_run(spec, 1, seed=0, checkpoints=(1,))
        assert math.isnan(run.final_run_max)
        assert math.isnan(run.run_max[0])

    def test_csv_export(self, tmp_path):
        spec = IidProcessSpec.from_tails(DiscreteHeavyTail.power_log(0.5),
                                         DiscreteHeavyTail.power_log(0.5))
        run = sums_vs_maxima_run(spec, 1000, seed=5, checkpoints=(1, 1000))
        path = tmp_path / "svm.csv"
        run.to_csv(path, trial=7)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trial", "n", "runmax", "ratio"]
        assert rows[1][0] == "7"
        assert math.isnan(float(rows[1][2]))  # no ratio at n=1
        assert float(rows[2][2]) == run.final_run_max


# ---------------------------------------------------------------------------
# integral-criterion classification
# ---------------------------------------------------------------------------

class TestClassifier:
    @staticmethod
    def _pair(phi_args, psi_args):
        return IidProcessSpec(
            phi=DiscreteHeavyTail.power_log(*phi_args, cutoff=16),
            psi=DiscreteHeavyTail.power_log(*psi_args, cutoff=16),
            classification="divergent")

    def test_truth_table(self):
        cases = [
            # (phi (a,q,r), psi (a,q,r), verdict)
            ((0.5,), (0.5,), "divergent"),            # equal tails
            ((0.3,), (0.9,), "divergent"),            # sigma < 1
            ((1.0,), (0.5,), "convergent"),           # sigma > 1
            ((1.0, 0.0, 1.0), (1.0,), "divergent"),   # log tie, gamma = 1
        ]
        for phi_args, psi_args, want in cases:
            assert classify_integral_criterion(
                self._pair(phi_args, psi_args)) == want
        # beta tiebreak: a pure x**-1 psi puts an extra log in the sum
        # scale, so phi = x**-1 (log x)**-1 falls convergent...
        assert classify_integral_criterion(
            self._pair((1.0, 1.0, 0.0), (1.0, 0.0, 0.0))) == "convergent"
        # ...while a phi only half a log heavier than psi stays divergent
        assert classify_integral_criterion(
            self._pair((1.0, 0.5, 0.0), (1.0, 1.0, 0.0))) == "divergent"
        # gamma decides when sigma and beta tie
        assert classify_integral_criterion(
            self._pair((1.0, 1.0, 0.5), (1.0, 1.0, 0.0))) == "convergent"
        assert classify_integral_criterion(
            self._pair((1.0, 1.0, 0.0), (1.0, 1.0, 0.0))) == "divergent"
        # the deepest tie falls to the loglog-slope rule
        assert classify_integral_criterion(
            self._pair((1.0, 1.0, 1.0), (1.0, 1.0, 1.0))) == "divergent"

    def test_integrable_phi_rejected(self):
        with pytest.raises(HypothesisError):
            classify_integral_criterion(self._pair((1.0, 3.0), (1.0,)))
        with pytest.raises(HypothesisError):
            IidProcessSpec.from_tails(
                DiscreteHeavyTail.power_log(1.0, 3.0, cutoff=16),
                DiscreteHeavyTail.power_log(1.0, cutoff=16))

    def test_noncatalogue_tail_rejected(self):
        from_l = DiscreteHeavyTail(head=np.array([1.0, 0.5, 0.25]), a=1.0,
                                   family="from-L")
        spec = IidProcessSpec(phi=from_l,
                              psi=DiscreteHeavyTail.power_log(1.0, cutoff=16),
                              classification="divergent")
        with pytest.raises(ValidationError):
            classify_integral_criterion(spec)

    def test_classification_literal_validated(self):
        with pytest.raises(ValidationError):
            IidProcessSpec(phi=DiscreteHeavyTail.power_log(0.5, cutoff=16),
                           psi=DiscreteHeavyTail.power_log(0.5, cutoff=16),
                           classification="unknown")

    def test_from_tails_agrees_with_classifier(self):
        phi = DiscreteHeavyTail.power_log(1.0, 0.0, 1.0, cutoff=16)
        psi = DiscreteHeavyTail.power_log(1.0, cutoff=16)
        spec = IidProcessSpec.from_tails(phi, psi)
        assert spec.classification == classify_integral_criterion(spec)
        assert spec.classification == "divergent"

    @given(a=st.floats(0.3, 1.0), q=st.floats(0.0, 2.0),
           r=st.floats(0.0, 2.0))
    @settings(max_examples=40, deadline=None)
    def test_equal_tails_always_divergent(self, a, q, r):
        # the criterion with phi = psi reduces to the nonintegrability of
        # phi itself, whatever the catalogue exponents
        tail = DiscreteHeavyTail.power_log(a, q, r, cutoff=16)
        if tail.is_integrable():
            return
        spec = IidProcessSpec(phi=tail, psi=tail,
                              classification="divergent")
        assert classify_integral_criterion(spec) == "divergent"
