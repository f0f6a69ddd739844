"""Tests for the orbit engine: batch simulation, occupation statistics,
return records, duality checks, and the derived experiments."""
import csv
import math

import numpy as np
import pytest

from cusplab import (EmpiricalDistribution, HypothesisError,
                     InsufficientDataError, MapParams, OccupationTrace,
                     OrbitConfig, ReturnRecord, ValidationError,
                     default_checkpoints, dk_experiment, duality_experiment,
                     empirical_truncated_expectation, inverse_branch,
                     ks_two_sample, mass_escape, ratio_experiment, run_orbits,
                     verify_duality)

SYM = MapParams(c=0.5, p0=1.0, p1=1.0)
STEEP = MapParams(c=0.5, p0=2.0, p1=1.0)


@pytest.fixture(scope="module")
def steep_run():
    """One shared batch with return records against the separating set."""
    cfg = OrbitConfig(map=STEEP, n_steps=10**6, n_trials=30, seed=11)
    return run_orbits(cfg, want_returns=True, returns_target="Y")


# ---------------------------------------------------------------------------
# configuration validation and defaults
# ---------------------------------------------------------------------------

class TestDefaultCheckpoints:
    def test_frozen_grids(self):
        assert default_checkpoints(0) == ()
        assert default_checkpoints(50) == (50,)
        assert default_checkpoints(100) == (100,)
        assert default_checkpoints(150) == (100, 150)
        assert default_checkpoints(10**5) == (100, 1000, 10000, 100000)
        assert default_checkpoints(10**6) == (
            100, 1000, 10000, 100000, 1000000)

    def test_final_checkpoint_is_horizon(self):
        for n in (73, 999, 12345):
            pts = default_checkpoints(n)
            assert pts[-1] == n
            assert all(b > a for a, b in zip(pts, pts[1:]))


class TestOrbitConfigValidation:
    def test_defaults_filled_in(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=1, seed=0)
        assert cfg.checkpoints == (100, 1000, 10000, 100000)
        assert cfg.m_sets == ((0.5, 1.0),)
        lo, hi = cfg.y_set
        assert lo == inverse_branch(SYM, "left", 0.5)
        assert hi == inverse_branch(SYM, "right", 0.5)
        assert lo < 0.5 < hi

    def test_bad_counts(self):
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=-1, n_trials=1, seed=0)
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=0, seed=0)

    def test_bad_checkpoints(self):
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                        checkpoints=(0, 5))
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                        checkpoints=(5, 5))
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                        checkpoints=(5, 20))

    def test_bad_deltas(self):
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0, delta_a=0.0)
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0, delta_b=1.0)
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                        delta_a=0.7, delta_b=0.5)

    def test_bad_m_sets(self):
        for bad in (((0.5, 0.5),), ((-0.1, 0.5),), ((0.2, 1.1),)):
            with pytest.raises(ValidationError):
                OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                            m_sets=bad)

    def test_y_set_must_straddle_branch_point(self):
        with pytest.raises(ValidationError):
            OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                        y_set=(0.6, 0.7))

    def test_bad_eps_mid(self):
        for bad in (0.0, 0.5, 0.9):
            with pytest.raises(ValidationError):
                OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                            eps_mid=bad)

    def test_bad_init_range(self):
        for bad in ((0.8, 0.2), (-0.1, 0.5), (0.2, 1.5)):
            with pytest.raises(ValidationError):
                OrbitConfig(map=SYM, n_steps=10, n_trials=1, seed=0,
                            init_range=bad)


# ---------------------------------------------------------------------------
# batch mechanics: determinism, degenerate starts, invariants
# ---------------------------------------------------------------------------

class TestRunOrbits:
    def test_rerun_is_bit_identical(self):
        cfg = OrbitConfig(map=SYM, n_steps=2000, n_trials=3, seed=41)
        a = run_orbits(cfg)
        b = run_orbits(cfg)
        for ta, tb in zip(a.traces, b.traces):
            assert ta.initial_point == tb.initial_point
            assert np.array_equal(ta.s_a, tb.s_a)
            assert np.array_equal(ta.ratio, tb.ratio, equal_nan=True)
            assert np.array_equal(ta.run_max, tb.run_max, equal_nan=True)

    def test_trials_are_independent_streams(self):
        # trial k's trace does not depend on how many trials run alongside it
        small = run_orbits(OrbitConfig(map=SYM, n_steps=2000, n_trials=3,
                                       seed=41))
        large = run_orbits(OrbitConfig(map=SYM, n_steps=2000, n_trials=5,
                                       seed=41))
        for ta, tb in zip(small.traces, large.traces[:3]):
            assert ta.initial_point == tb.initial_point
            assert np.array_equal(ta.s_a, tb.s_a)
            assert np.array_equal(ta.ratio, tb.ratio, equal_nan=True)

    def test_record_and_trace_share_initial_point(self):
        run = run_orbits(OrbitConfig(map=SYM, n_steps=2000, n_trials=5,
                                     seed=41))
        for t, r in zip(run.traces, run.records):
            assert t.trial == r.trial
            assert t.initial_point == r.initial_point

    def test_zero_steps(self):
        cfg = OrbitConfig(map=SYM, n_steps=0, n_trials=2, seed=1)
        assert cfg.checkpoints == ()
        run = run_orbits(cfg)
        assert len(run.traces) == 2
        assert run.records == ()
        assert run.traces[0].s_a.shape == (0,)

    def test_want_returns_false(self):
        run = run_orbits(OrbitConfig(map=SYM, n_steps=100, n_trials=1,
                                     seed=1), want_returns=False)
        assert run.records == ()

    def test_left_fixed_point_basin(self):
        # starts glued to the left endpoint stay in the left cusp
        # neighborhood forever: S(A) counts every step, the ratio is never
        # defined, and nothing reaches the middle band or M
        cfg = OrbitConfig(map=SYM, n_steps=1000, n_trials=4, seed=7,
                          init_range=(0.0, 1e-15))
        run = run_orbits(cfg, want_returns=False)
        for t in run.traces:
            assert np.array_equal(t.s_a, t.checkpoints)
            assert np.all(t.s_b == 0)
            assert np.all(t.s_m == 0)
            assert np.all(t.s_mid == 0)
            assert np.all(np.isnan(t.ratio))
            assert np.all(np.isnan(t.run_max))
            assert np.all(np.isnan(t.run_min))

    def test_stagnation_counts_frozen_steps(self):
        # below one ulp of the start, x + a*x^2 rounds back to x: the orbit
        # is numerically frozen and every step is flagged
        cfg = OrbitConfig(map=SYM, n_steps=500, n_trials=3, seed=7,
                          init_range=(1e-20, 2e-20))
        run = run_orbits(cfg, want_returns=False)
        for t in run.traces:
            assert t.stagnation == 500

    def test_no_stagnation_on_generic_orbits(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=20, seed=31,
                          delta_a=0.4, delta_b=0.4)
        run = run_orbits(cfg, want_returns=False)
        assert all(t.stagnation == 0 for t in run.traces)

    def test_cusp_neighborhoods_dominate_time(self):
        # with delta = 0.4 the two neighborhoods swallow most of the orbit
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=20, seed=31,
                          delta_a=0.4, delta_b=0.4)
        run = run_orbits(cfg, want_returns=False)
        frac = np.mean([(t.s_a[-1] + t.s_b[-1]) / t.checkpoints[-1]
                        for t in run.traces])
        assert frac == pytest.approx(0.942422, abs=1e-4)
        assert frac > 0.85

    def test_occupation_additivity_with_exact_partition(self):
        # A = [0, 1/4), mid = (1/4, 3/4), B = (3/4, 1] tile [0, 1] up to the
        # two boundary points, which generic orbits never hit
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=10, seed=19,
                          delta_a=0.25, delta_b=0.25, eps_mid=0.25)
        run = run_orbits(cfg, want_returns=False)
        for t in run.traces:
            assert np.array_equal(t.s_a + t.s_b + t.s_mid, t.checkpoints)

    def test_counters_monotone_and_extremes_bracket(self, steep_run):
        for t in steep_run.traces:
            for arr in (t.s_a, t.s_b, t.s_m, t.s_mid):
                assert np.all(np.diff(arr) >= 0)
            ok = ~np.isnan(t.run_max)
            assert np.all(np.diff(t.run_max[ok]) >= 0)
            okn = ~np.isnan(t.run_min)
            assert np.all(np.diff(t.run_min[okn]) <= 0)
            both = ok & okn & ~np.isnan(t.ratio)
            assert np.all(t.run_max[both] >= t.ratio[both])
            assert np.all(t.run_min[both] <= t.ratio[both])

    def test_initial_points_respect_init_range(self):
        cfg = OrbitConfig(map=SYM, n_steps=100, n_trials=50, seed=3,
                          init_range=(0.25, 0.375))
        run = run_orbits(cfg, want_returns=False)
        for t in run.traces:
            assert 0.25 <= t.initial_point <= 0.375


class TestOccupationTraceInvariants:
    @staticmethod
    def _build(**kw):
        base = dict(trial=0, initial_point=0.5,
                    checkpoints=np.array([10, 20]),
                    s_a=np.array([3, 5]), s_b=np.array([2, 6]),
                    s_m=np.array([4, 9]), s_mid=np.array([1, 2]),
                    ratio=np.array([1.5, 5 / 6]),
                    run_max=np.array([2.0, 2.0]),
                    run_min=np.array([0.5, 0.5]), stagnation=0)
        base.update(kw)
        return OccupationTrace(**base)

    def test_consistent_trace_accepted(self):
        t = self._build()
        assert t.trial == 0

    def test_decreasing_counter_rejected(self):
        with pytest.raises(ValidationError):
            self._build(s_a=np.array([5, 3]))

    def test_overfull_occupation_rejected(self):
        with pytest.raises(ValidationError):
            self._build(s_a=np.array([8, 9]), s_b=np.array([5, 9]),
                        ratio=np.array([1.6, 1.0]))

    def test_extremes_must_bracket_ratio(self):
        with pytest.raises(ValidationError):
            self._build(run_max=np.array([1.0, 0.5]))


# ---------------------------------------------------------------------------
# return records and duality
# ---------------------------------------------------------------------------

class TestReturnRecords:
    def test_sides_alternate(self, steep_run):
        # the separating set straddles the branch point; leaving through one
        # side forces the next visit to enter from the other
        assert steep_run.records
        for r in steep_run.records:
            assert r.alternates()
            assert np.all((r.sides == 0) | (r.sides == 1))

    def test_visit_times_strictly_increase(self, steep_run):
        for r in steep_run.records[:5]:
            times = r.visit_times()
            assert times.size == r.phis.size + 1
            assert np.all(np.diff(times) >= 1)

    def test_truncation_keeps_prefix(self):
        run = run_orbits(OrbitConfig(map=SYM, n_steps=10**4, n_trials=2,
                                     seed=3), max_returns=50)
        for r in run.records:
            assert r.phis.size == 50
            assert r.total_visits > 50
            assert r.alternates()

    def test_return_times_must_be_positive(self):
        with pytest.raises(ValidationError):
            ReturnRecord(trial=0, initial_point=0.3, first_visit=0,
                         sides=np.array([1]), phis=np.array([0]),
                         checkpoints=np.array([10]), counts=np.array([1]),
                         occupation=np.array([1]), total_visits=2)

    def test_no_visit_sentinel(self):
        r = ReturnRecord(trial=0, initial_point=0.3, first_visit=-1,
                         sides=np.empty(0, dtype=np.int64),
                         phis=np.empty(0, dtype=np.int64),
                         checkpoints=np.array([10]), counts=np.array([0]),
                         occupation=np.array([0]), total_visits=0)
        assert r.visit_times().size == 0
        assert r.alternates()


class TestDuality:
    def test_no_violations_default_m(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=50, seed=29)
        assert duality_experiment(cfg) == 0

    def test_no_violations_full_interval(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**4, n_trials=5, seed=29,
                          m_sets=((0.0, 1.0),))
        assert duality_experiment(cfg) == 0

    def test_requires_single_interval(self):
        cfg = OrbitConfig(map=SYM, n_steps=100, n_trials=1, seed=0,
                          m_sets=((0.1, 0.2), (0.5, 0.9)))
        with pytest.raises(ValidationError):
            duality_experiment(cfg)

    def test_start_outside_target_rejected(self):
        rec = ReturnRecord(trial=0, initial_point=0.3, first_visit=5,
                           sides=np.array([1]), phis=np.array([2]),
                           checkpoints=np.array([10]), counts=np.array([1]),
                           occupation=np.array([1]), total_visits=2)
        with pytest.raises(ValidationError):
            verify_duality(None, rec, None)


# ---------------------------------------------------------------------------
# empirical truncated expectations from pooled returns
# ---------------------------------------------------------------------------

class TestEmpiricalTruncatedExpectation:
    def test_side_growth_rates(self, steep_run):
        # left-cusp excursions have square-root truncated growth, right-cusp
        # excursions a slowly varying one
        grid = np.geomspace(10.0, 1e4, 25)
        la = empirical_truncated_expectation(steep_run.records, "A", grid,
                                             declared_index=0.5)
        lb = empirical_truncated_expectation(steep_run.records, "B", grid)
        t = grid[-1] / 2.0
        ra = la.value(2 * t) / la.value(t)
        rb = lb.value(2 * t) / lb.value(t)
        assert ra == pytest.approx(1.353950, abs=1e-3)
        assert rb == pytest.approx(1.062661, abs=1e-3)
        assert abs(ra / math.sqrt(2.0) - 1.0) <= 0.15
        assert abs(rb - 1.0) <= 0.10

    def test_empirical_indexes(self, steep_run):
        grid = np.geomspace(10.0, 1e4, 25)
        la = empirical_truncated_expectation(steep_run.records, "A", grid)
        lb = empirical_truncated_expectation(steep_run.records, "B", grid)
        assert la.empirical_index() == pytest.approx(0.4517, abs=5e-3)
        assert lb.empirical_index() == pytest.approx(0.0709, abs=5e-3)

    def test_masses_split_the_visits(self, steep_run):
        grid = np.geomspace(10.0, 1e4, 25)
        la = empirical_truncated_expectation(steep_run.records, "A", grid)
        lb = empirical_truncated_expectation(steep_run.records, "B", grid)
        assert la.mass == pytest.approx(0.499875, abs=1e-4)
        assert la.mass + lb.mass == pytest.approx(1.0, abs=1e-12)

    def test_insufficient_data(self):
        run = run_orbits(OrbitConfig(map=SYM, n_steps=200, n_trials=2,
                                     seed=1))
        with pytest.raises(InsufficientDataError):
            empirical_truncated_expectation(run.records, "A",
                                            np.geomspace(2.0, 50.0, 5))

    def test_side_validated(self, steep_run):
        with pytest.raises(ValidationError):
            empirical_truncated_expectation(steep_run.records, "C",
                                            np.geomspace(10.0, 100.0, 5))


# ---------------------------------------------------------------------------
# normalized occupation distribution
# ---------------------------------------------------------------------------

class TestDkExperiment:
    def test_requires_barely_infinite_right_cusp(self):
        cfg = OrbitConfig(map=MapParams(c=0.5, p0=1.0, p1=2.0),
                          n_steps=1000, n_trials=2, seed=0)
        with pytest.raises(HypothesisError):
            dk_experiment(cfg)

    def test_degenerate_limit_concentrates_at_one(self):
        # for a barely infinite left cusp the limit law is the constant 1;
        # the sample median must already hug it at moderate horizons
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=200, seed=5)
        res = dk_experiment(cfg)
        assert res.alpha == 1.0
        med = res.sample.quantile(0.5)
        assert med == pytest.approx(1.067989, abs=1e-3)
        assert 0.7 <= med <= 1.3
        assert res.ks == pytest.approx(0.6250, abs=1e-3)
        assert list(res.ks_by_checkpoint) == [100, 1000, 10000, 100000]
        assert res.ks_by_checkpoint[100000] == res.ks
        assert res.normalizer.value(1e5) > 0.0

    def test_truncated_target_breaks_the_limit(self):
        # M = (c, 1 - delta) differs from (c, 1) by an infinite-measure
        # sliver; the normalized occupation laws separate and keep
        # separating as the horizon grows
        ks = {}
        norm = None
        for n in (10**4, 10**5):
            cfg = OrbitConfig(map=SYM, n_steps=n, n_trials=400, seed=9)
            full = dk_experiment(cfg, normalizer=norm)
            norm = norm or full.normalizer
            trunc = dk_experiment(cfg, normalizer=full.normalizer,
                                  m_sets=((0.5, 0.99),))
            ks[n] = ks_two_sample(full.sample, trunc.sample)
        assert ks[10**4] == pytest.approx(0.727500, abs=1e-6)
        assert ks[10**5] == pytest.approx(0.905000, abs=1e-6)
        assert ks[10**5] > ks[10**4] > 0.1

    def test_trimmed_target_keeps_the_limit(self):
        # M = (c + delta, 1) differs from (c, 1) only by a finite-measure
        # strip away from the cusp, so the normalized occupation laws stay
        # close and drift together rather than apart
        ks = {}
        norm = None
        for n in (10**4, 10**5):
            cfg = OrbitConfig(map=SYM, n_steps=n, n_trials=400, seed=9)
            full = dk_experiment(cfg, normalizer=norm)
            norm = norm or full.normalizer
            trimmed = dk_experiment(cfg, normalizer=full.normalizer,
                                    m_sets=((0.6, 1.0),))
            ks[n] = ks_two_sample(full.sample, trimmed.sample)
        assert ks[10**4] == pytest.approx(0.132500, abs=1e-6)
        assert ks[10**5] == pytest.approx(0.117500, abs=1e-6)
        assert ks[10**5] < ks[10**4] < 0.2


# ---------------------------------------------------------------------------
# occupation-ratio experiment
# ---------------------------------------------------------------------------

class TestRatioExperiment:
    def test_ratio_is_reciprocally_symmetric(self):
        # swapping the roles of the two cusp neighborhoods inverts the
        # ratio, and the symmetric map makes both labelings equally likely
        cfg = OrbitConfig(map=SYM, n_steps=10**5, n_trials=1000, seed=13)
        res = ratio_experiment(cfg)
        fin = res.ratio_final
        assert not np.any(np.isnan(fin))
        d = ks_two_sample(EmpiricalDistribution(fin),
                          EmpiricalDistribution(1.0 / fin))
        assert d == pytest.approx(0.022, abs=1e-6)
        assert d <= 0.05

    def test_shapes_and_medians(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**4, n_trials=64, seed=13)
        res = ratio_experiment(cfg)
        nch = len(cfg.checkpoints)
        assert res.checkpoints.shape == (nch,)
        assert res.run_max.shape == (64,)
        assert res.median_ratio.shape == (nch,)
        # the earliest checkpoint may predate any defined ratio; later ones
        # have seen both neighborhoods in at least one trial
        assert np.all(np.isfinite(res.median_ratio[1:]))
        assert len(res.traces) == 64

    def test_undefined_ratios_count_as_failures(self):
        # with hairline neighborhoods and a short horizon no trial ever
        # defines the ratio: quantiles are empty and joint fractions zero
        cfg = OrbitConfig(map=SYM, n_steps=300, n_trials=50, seed=23,
                          delta_a=0.001, delta_b=0.001,
                          checkpoints=(100, 300))
        res = ratio_experiment(cfg)
        assert np.all(np.isnan(res.run_max))
        assert res.joint_fraction(1.0, 1.0) == 0.0
        assert math.isnan(res.quantile_run_max(0.5))

    def test_joint_fraction_thresholds(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**4, n_trials=100, seed=13)
        res = ratio_experiment(cfg)
        # trivially satisfied thresholds count every defined trial
        loose = res.joint_fraction(0.0, math.inf)
        tight = res.joint_fraction(math.inf, 0.0)
        assert tight == 0.0
        defined = np.mean(~np.isnan(res.run_max) & ~np.isnan(res.run_min))
        assert loose == pytest.approx(defined)


# ---------------------------------------------------------------------------
# mass escape
# ---------------------------------------------------------------------------

class TestMassEscape:
    def test_middle_band_drains(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**6, n_trials=100, seed=17)
        esc = mass_escape(cfg, 0.1)
        assert esc.shape == (5,)
        assert np.all(np.diff(esc) < 0)
        assert esc[0] == pytest.approx(0.5115, abs=1e-4)
        assert esc[-1] == pytest.approx(0.192339, abs=1e-4)
        assert esc[-1] <= 0.25

    def test_hairline_band_holds_everything(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**4, n_trials=20, seed=17)
        esc = mass_escape(cfg, 1e-9)
        assert np.all(esc == 1.0)

    def test_default_epsilon_is_config_band(self):
        cfg = OrbitConfig(map=SYM, n_steps=10**4, n_trials=5, seed=17,
                          eps_mid=0.2)
        assert np.array_equal(mass_escape(cfg), mass_escape(cfg, 0.2))

    def test_epsilon_validated(self):
        cfg = OrbitConfig(map=SYM, n_steps=100, n_trials=1, seed=0)
        for bad in (0.0, 0.5, 0.7):
            with pytest.raises(ValidationError):
                mass_escape(cfg, bad)


# ---------------------------------------------------------------------------
# CSV exports
# ---------------------------------------------------------------------------

class TestCsvExports:
    def test_traces_roundtrip(self, tmp_path):
        cfg = OrbitConfig(map=SYM, n_steps=500, n_trials=2, seed=5,
                          checkpoints=(10, 500))
        run = run_orbits(cfg, want_returns=False)
        path = tmp_path / "traces.csv"
        run.traces_to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trial", "n", "S_A", "S_B", "S_M", "R",
                           "R_runmax", "R_runmin", "mid_fraction"]
        assert len(rows) == 1 + 2 * 2
        for row in rows[1:]:
            trial, n = int(row[0]), int(row[1])
            t = run.traces[trial]
            i = list(t.checkpoints).index(n)
            assert int(row[2]) == t.s_a[i]
            assert int(row[3]) == t.s_b[i]
            # float columns survive the trip exactly, NaN included
            r = float(row[5])
            assert (math.isnan(r) and math.isnan(t.ratio[i])) or \
                r == t.ratio[i]
            assert float(row[8]) == t.s_mid[i] / n

    def test_records_roundtrip(self, tmp_path):
        cfg = OrbitConfig(map=SYM, n_steps=2000, n_trials=2, seed=5)
        run = run_orbits(cfg)
        path = tmp_path / "records.csv"
        run.records_to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trial", "visit", "side", "phi"]
        assert len(rows) == 1 + sum(r.phis.size for r in run.records)
        for row in rows[1:4]:
            trial, j = int(row[0]), int(row[1])
            rec = run.records[trial]
            assert int(row[2]) == rec.sides[j]
            assert int(row[3]) == rec.phis[j]
            assert int(row[3]) >= 1
