import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfsda import (
    Dataset,
    InsufficientDistinctResponses,
    InsufficientSamples,
    InternalContractViolation,
    InvalidLevel,
    SplitFit,
    TransformSpec,
    fdp_threshold,
    fit_split,
    ranking_statistics,
    run_mfsda,
    split_data,
)


def brute_force_threshold(w, alpha, offset):
    """Exhaustive scan over every nonzero |w| candidate."""
    candidates = sorted({abs(v) for v in w if v != 0})
    for t in candidates:
        neg = sum(1 for v in w if v <= -t)
        pos = sum(1 for v in w if v >= t)
        if (offset + neg) / max(pos, 1) <= alpha:
            return t
    return math.inf


class TestSplitData:
    def make(self, n):
        rng = np.random.default_rng(42)
        return Dataset(rng.standard_normal((n, 3)), rng.standard_normal(n))

    def test_even_split(self):
        pair = split_data(self.make(10), seed=0)
        assert (pair.d1.n, pair.d2.n) == (5, 5)

    def test_odd_split_favors_first(self):
        pair = split_data(self.make(11), seed=0)
        assert (pair.d1.n, pair.d2.n) == (6, 5)

    def test_deterministic(self):
        a = split_data(self.make(20), seed=7)
        b = split_data(self.make(20), seed=7)
        np.testing.assert_array_equal(a.d1.x, b.d1.x)
        np.testing.assert_array_equal(a.d2.y, b.d2.y)

    def test_partition(self):
        data = self.make(15)
        pair = split_data(data, seed=3)
        combined = np.concatenate([pair.d1.y, pair.d2.y])
        np.testing.assert_array_equal(np.sort(combined), np.sort(data.y))

    def test_too_small(self):
        with pytest.raises(InsufficientSamples):
            split_data(self.make(3), seed=0)


class TestFitSplit:
    def test_univariate_slope(self):
        rng = np.random.default_rng(1)
        y = rng.standard_normal(60)
        x = rng.standard_normal((60, 1))
        spec = TransformSpec("indicator", 3)
        fit = fit_split(Dataset(x, y), spec)
        # direct least squares per transformed column
        from mfsda import apply_transform, center_columns, make_slice_boundaries

        xc, _ = center_columns(x)
        f = apply_transform(spec, y, make_slice_boundaries(y, 3))
        slope = (xc[:, 0] @ f) / (xc[:, 0] @ xc[:, 0])
        np.testing.assert_allclose(fit.coefficients[0], slope, atol=1e-10)
        assert fit.scales[0] == pytest.approx(1.0 / np.sqrt(xc[:, 0] @ xc[:, 0]))

    def test_constant_response(self):
        rng = np.random.default_rng(2)
        data = Dataset(rng.standard_normal((30, 2)), np.ones(30))
        with pytest.raises(InsufficientDistinctResponses):
            fit_split(data, TransformSpec())

    def test_too_many_features(self):
        rng = np.random.default_rng(3)
        data = Dataset(rng.standard_normal((10, 12)), rng.standard_normal(10))
        with pytest.raises(InsufficientSamples):
            fit_split(data, TransformSpec())

    def test_active_rows_dominate_in_noiseless_linear_model(self):
        # active coefficient rows should out-norm inactive ones nearly always
        spec = TransformSpec("indicator", 4)
        wins = 0
        runs = 40
        for seed in range(runs):
            rng = np.random.default_rng(seed)
            x = rng.standard_normal((200, 5))
            y = x[:, 0] + x[:, 1]  # features 2..4 inactive
            fit = fit_split(Dataset(x, y), spec)
            norms = np.linalg.norm(fit.coefficients, axis=1)
            wins += int(norms[:2].min() > norms[2:].max())
        assert wins >= 0.95 * runs


class TestRankingStatistics:
    def make_fit(self, coefs, scales):
        coefs = np.asarray(coefs, dtype=float)
        return SplitFit(
            coefficients=coefs,
            scales=np.asarray(scales, dtype=float),
            feature_indices=np.arange(coefs.shape[0]),
        )

    def test_aligned_vectors(self):
        f1 = self.make_fit([[1.0, 1.0]], [1.0])
        f2 = self.make_fit([[1.0, 1.0]], [1.0])
        stats = ranking_statistics(f1, f2, 1)
        assert stats.w[0] == pytest.approx(2.0)

    def test_antisymmetry_in_either_argument(self):
        f1 = self.make_fit([[1.0, 1.0]], [1.0])
        f2 = self.make_fit([[-1.0, -1.0]], [1.0])
        assert ranking_statistics(f1, f2, 1).w[0] == pytest.approx(-2.0)

    def test_zero_coefficients(self):
        f1 = self.make_fit([[1.0, 2.0]], [1.0])
        f2 = self.make_fit([[0.0, 0.0]], [1.0])
        assert ranking_statistics(f1, f2, 1).w[0] == 0.0

    def test_symmetric_in_split_order(self):
        rng = np.random.default_rng(4)
        c1, c2 = rng.standard_normal((2, 6, 3))
        s1, s2 = np.abs(rng.standard_normal((2, 6))) + 0.1
        f1, f2 = self.make_fit(c1, s1), self.make_fit(c2, s2)
        np.testing.assert_array_equal(
            ranking_statistics(f1, f2, 6).w, ranking_statistics(f2, f1, 6).w
        )

    def test_off_screen_is_exact_zero(self):
        fit = SplitFit(
            coefficients=np.ones((2, 3)),
            scales=np.ones(2),
            feature_indices=np.array([1, 4]),
        )
        stats = ranking_statistics(fit, fit, 6)
        assert set(np.flatnonzero(stats.w)) == {1, 4}

    def test_mismatched_features(self):
        f1 = SplitFit(np.ones((1, 2)), np.ones(1), np.array([0]))
        f2 = SplitFit(np.ones((1, 2)), np.ones(1), np.array([1]))
        with pytest.raises(InternalContractViolation):
            ranking_statistics(f1, f2, 2)


class TestThreshold:
    def test_basic_example(self):
        w = np.array([3.0, 2.0, 1.0, -1.0])
        assert fdp_threshold(w, 0.2) == 2.0

    def test_all_negative(self):
        assert fdp_threshold(np.array([-1.0, -2.0]), 0.2) == math.inf

    def test_zero_numerator_everywhere(self):
        w = np.array([5.0, 4.0, 3.0, 2.0, 1.0])
        assert fdp_threshold(w, 0.01) == 1.0

    def test_plus_rule_example(self):
        w = np.array([3.0, 2.0, 1.0, -1.0])
        assert fdp_threshold(w, 0.2, offset=1) == math.inf

    def test_plus_rule_all_positive(self):
        w = np.arange(1.0, 11.0)
        assert fdp_threshold(w, 0.2, offset=1) == 1.0

    def test_plus_rule_all_nonpositive(self):
        assert fdp_threshold(np.array([0.0, -3.0]), 0.2, offset=1) == math.inf

    def test_invalid_level(self):
        for alpha in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(InvalidLevel):
                fdp_threshold(np.ones(3), alpha)

    def test_monotone_in_offset(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            w = rng.standard_normal(int(rng.integers(1, 60)))
            l0 = fdp_threshold(w, 0.3)
            l1 = fdp_threshold(w, 0.3, offset=1)
            assert l1 >= l0
            sel0 = set(np.flatnonzero(w >= l0)) if math.isfinite(l0) else set()
            sel1 = set(np.flatnonzero(w >= l1)) if math.isfinite(l1) else set()
            assert sel1 <= sel0

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        w = rng.standard_normal(40)
        base = set(np.flatnonzero(w >= fdp_threshold(w, 0.25)))
        for c in (0.01, 3.0, 1e6):
            scaled = set(np.flatnonzero(c * w >= fdp_threshold(c * w, 0.25)))
            assert scaled == base

    def test_fdp_definition_consistency(self):
        # at the returned threshold the estimate is <= alpha; below it, above
        rng = np.random.default_rng(7)
        for _ in range(100):
            w = rng.standard_normal(50)
            alpha = float(rng.uniform(0.05, 0.5))
            thr = fdp_threshold(w, alpha)
            if not math.isfinite(thr):
                continue
            neg = np.sum(w <= -thr)
            pos = np.sum(w >= thr)
            assert neg / max(pos, 1) <= alpha
            for t in {abs(v) for v in w if v != 0 and abs(v) < thr}:
                assert np.sum(w <= -t) / max(np.sum(w >= t), 1) > alpha


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.one_of(
            st.floats(-10, 10, allow_nan=False),
            st.sampled_from([0.0, 1.0, -1.0, 2.0, -2.0]),
        ),
        min_size=1,
        max_size=60,
    ),
    st.floats(0.01, 0.99),
    st.sampled_from([0, 1]),
)
def test_threshold_matches_brute_force(w, alpha, offset):
    w = np.asarray(w)
    assert fdp_threshold(w, alpha, offset) == brute_force_threshold(w, alpha, offset)


def linear_dataset(seed, n=400, p=12, p1=4, noise=1.0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:p1] = 1.5
    y = x @ beta + noise * rng.standard_normal(n)
    return Dataset(x, y)


class TestRunMfsda:
    def test_lowdim_selects_signals(self):
        result = run_mfsda(linear_dataset(0), seed=1)
        assert result.mode == "lowdim"
        assert result.rule == "l"
        assert {0, 1, 2, 3}.issubset(set(result.selected.tolist()))
        assert result.diagnostics["d1_rows"] == 200

    def test_selected_matches_threshold(self):
        result = run_mfsda(linear_dataset(1), seed=2)
        expected = np.flatnonzero(result.stats.w >= result.threshold)
        np.testing.assert_array_equal(result.selected, expected)

    def test_forced_lowdim_with_wide_data_fails(self):
        rng = np.random.default_rng(3)
        data = Dataset(rng.standard_normal((40, 30)), rng.standard_normal(40))
        with pytest.raises(InsufficientSamples) as err:
            run_mfsda(data, mode="lowdim", seed=0)
        assert err.value.stage is not None

    def test_invalid_alpha(self):
        with pytest.raises(InvalidLevel):
            run_mfsda(linear_dataset(4), alpha=1.5)

    def test_highdim_mode_auto(self):
        rng = np.random.default_rng(5)
        n, p = 120, 80
        x = rng.standard_normal((n, p))
        beta = np.zeros(p)
        beta[:3] = 3.0
        y = x @ beta + rng.standard_normal(n)
        result = run_mfsda(Dataset(x, y), seed=6)
        assert result.mode == "highdim"
        assert result.rule == "lplus"
        # statistics vanish off the screened set
        off = np.setdiff1d(np.arange(p), result.stats.screened)
        assert np.all(result.stats.w[off] == 0.0)

    def test_highdim_empty_screen_gives_empty_selection(self):
        # pure-noise draw where cross-validation keeps the null model for
        # every transform column, so the screened set comes back empty
        x = np.random.default_rng([404, 0, 0]).standard_normal((400, 100))
        y = np.random.default_rng([404, 0, 1]).standard_normal(400)
        result = run_mfsda(
            Dataset(x, y), mode="highdim", rule="lplus",
            split_seed=np.random.SeedSequence([404, 0, 2]),
            screen_seed=np.random.SeedSequence([404, 0, 3]),
        )
        assert result.diagnostics["screened_size"] == 0
        assert math.isinf(result.threshold)
        assert result.selected.size == 0
        assert np.all(result.stats.w == 0.0)

    def test_deterministic_given_seed(self):
        a = run_mfsda(linear_dataset(7), seed=11)
        b = run_mfsda(linear_dataset(7), seed=11)
        np.testing.assert_array_equal(a.stats.w, b.stats.w)
        assert a.threshold == b.threshold

    def test_json_round_trip_fields(self):
        result = run_mfsda(linear_dataset(8), seed=3)
        doc = result.to_json_dict()
        assert set(doc) == {
            "threshold", "selected_indices", "w_statistics", "alpha",
            "mode", "rule", "screened_set", "diagnostics",
        }
        assert all(j >= 1 for j in doc["selected_indices"])
        assert len(doc["w_statistics"]) == 12
