import numpy as np
import pytest

from s2net import (
    DataError,
    FistaConfig,
    Hyperparams,
    NumericError,
    RawTable,
    SearchSpace,
    baseline_space,
    build_dataset,
    default_metric,
    fit,
    random_search,
    sample_hyperparams,
    score_model,
    sigmoid,
)

from conftest import make_rng


def _linear_pair(seed=0, n=40, p=6, n_valid=15):
    rng = make_rng(seed)
    x = rng.standard_normal((n + n_valid, p))
    beta = np.array([2.0, -1.0, 0.0, 0.0, 0.5, 0.0])
    y = x @ beta + 0.2 * rng.standard_normal(n + n_valid)
    train = build_dataset(RawTable.from_matrix(x[:n]), y[:n])
    return train, x[n:], y[n:]


def _logistic_pair(seed=1, n=80, p=5, n_valid=40):
    rng = make_rng(seed)
    x = rng.standard_normal((n + n_valid, p))
    beta = np.array([1.5, -1.5, 0.0, 0.8, 0.0])
    y = (rng.random(n + n_valid) < sigmoid(x @ beta)).astype(float)
    y[:2] = [0.0, 1.0]
    train = build_dataset(RawTable.from_matrix(x[:n]), y[:n],
                          response="logistic")
    return train, x[n:], y[n:]


class TestSearchSpace:
    def test_default_bounds(self):
        s = SearchSpace()
        assert s.lambda1 == (-8.0, 1.0)
        assert s.lambda2 == (-8.0, 1.0)
        assert s.gamma1 == (-8.0, 1.0)
        assert s.gamma2 == (-1.0, 10.0)
        assert s.gamma3 == (-8.0, 1.0)
        assert s.fixed == {}

    def test_baseline_pins_gamma1(self):
        base = baseline_space(SearchSpace(fixed={"lambda1": 0.5}))
        assert base.fixed["gamma1"] == 0.0
        assert base.fixed["lambda1"] == 0.5

    def test_bad_bounds_rejected(self):
        with pytest.raises(DataError):
            SearchSpace(lambda1=(2.0, 1.0))

    def test_bad_fixed_name_rejected(self):
        with pytest.raises(DataError):
            SearchSpace(fixed={"lambda9": 1.0})

    def test_negative_fixed_rejected(self):
        with pytest.raises(DataError):
            SearchSpace(fixed={"gamma1": -1.0})


class TestSampling:
    def test_samples_within_bounds(self):
        space = SearchSpace()
        rng = make_rng(0)
        for _ in range(200):
            h = sample_hyperparams(space, rng)
            d = h.as_dict()
            for name in ("lambda1", "lambda2", "gamma1", "gamma3"):
                assert 2.0 ** -8 <= d[name] <= 2.0 ** 1
            assert 2.0 ** -1 <= d["gamma2"] <= 2.0 ** 10

    def test_fixed_overrides_draw(self):
        space = SearchSpace(fixed={"gamma1": 0.0, "lambda2": 0.125})
        rng = make_rng(1)
        for _ in range(20):
            h = sample_hyperparams(space, rng)
            assert h.gamma1 == 0.0
            assert h.lambda2 == 0.125

    def test_fixed_does_not_shift_other_draws(self):
        # all five values are drawn before overrides, so the free
        # coordinates match between a full space and a pinned one
        full = [sample_hyperparams(SearchSpace(), make_rng(7))
                for _ in range(1)][0]
        pinned = [sample_hyperparams(SearchSpace(fixed={"gamma1": 0.0}),
                                     make_rng(7)) for _ in range(1)][0]
        assert pinned.gamma1 == 0.0
        assert pinned.lambda1 == full.lambda1
        assert pinned.lambda2 == full.lambda2
        assert pinned.gamma2 == full.gamma2
        assert pinned.gamma3 == full.gamma3


class TestScoring:
    def test_default_metric(self):
        assert default_metric("linear") == "mse"
        assert default_metric("logistic") == "auc"

    def test_metric_family_validation(self):
        train, xv, yv = _linear_pair()
        with pytest.raises(DataError):
            random_search(train, (xv, yv), iterations=1, metric="auc")

    def test_lower_is_better_for_auc(self):
        train, xv, yv = _logistic_pair()
        model = fit(train, Hyperparams(lambda1=0.01))
        score = score_model(model, xv, yv, "auc")
        # negated so that smaller means better
        assert -1.0 <= score <= 0.0

    def test_mse_score_matches_metric(self):
        from s2net import mse, predict

        train, xv, yv = _linear_pair()
        model = fit(train, Hyperparams(lambda1=0.01))
        score = score_model(model, xv, yv, "mse")
        assert abs(score - mse(yv, predict(model, xv))) < 1e-15


class TestRandomSearch:
    def test_single_iteration_returns_that_trial(self):
        train, xv, yv = _linear_pair()
        res = random_search(train, (xv, yv), iterations=1, seed=3)
        assert res.best_index == 0
        assert len(res.trials) == 1
        assert res.best_score == res.trials[0].score
        assert res.metric == "mse"

    def test_seed_reproducibility(self):
        train, xv, yv = _linear_pair()
        a = random_search(train, (xv, yv), iterations=8, seed=5)
        b = random_search(train, (xv, yv), iterations=8, seed=5)
        assert a.best_index == b.best_index
        assert a.best_score == b.best_score
        for ta, tb in zip(a.trials, b.trials):
            assert ta.hyper.as_dict() == tb.hyper.as_dict()
            assert ta.score == tb.score

    def test_different_seeds_differ(self):
        train, xv, yv = _linear_pair()
        a = random_search(train, (xv, yv), iterations=4, seed=0)
        b = random_search(train, (xv, yv), iterations=4, seed=1)
        assert any(
            ta.hyper.as_dict() != tb.hyper.as_dict()
            for ta, tb in zip(a.trials, b.trials)
        )

    def test_best_is_minimum_over_trials(self):
        train, xv, yv = _linear_pair()
        res = random_search(train, (xv, yv), iterations=12, seed=2)
        scores = [t.score for t in res.trials]
        assert res.best_score == min(scores)
        assert res.best_index == scores.index(min(scores))

    def test_degenerate_space_repeats_one_point(self):
        train, xv, yv = _linear_pair()
        space = SearchSpace(fixed={
            "lambda1": 0.1, "lambda2": 0.0, "gamma1": 0.0,
            "gamma2": 1.0, "gamma3": 0.0,
        })
        res = random_search(train, (xv, yv), space=space, iterations=3, seed=0)
        assert res.best_index == 0  # earliest tie wins
        assert len({t.score for t in res.trials}) == 1

    def test_draws_aligned_between_full_and_baseline(self):
        train, xv, yv = _linear_pair()
        space = SearchSpace()
        full = random_search(train, (xv, yv), space=space,
                             iterations=6, seed=11)
        base = random_search(train, (xv, yv), space=baseline_space(space),
                             iterations=6, seed=11)
        for tf, tb in zip(full.trials, base.trials):
            assert tb.hyper.gamma1 == 0.0
            assert tf.hyper.lambda1 == tb.hyper.lambda1
            assert tf.hyper.lambda2 == tb.hyper.lambda2
            assert tf.hyper.gamma2 == tb.hyper.gamma2
            assert tf.hyper.gamma3 == tb.hyper.gamma3

    def test_unlabeled_rows_used(self):
        rng = make_rng(9)
        x = rng.standard_normal((60, 5))
        beta = np.array([1.0, -1.0, 0.5, 0.0, 0.0])
        y = x @ beta + 0.2 * rng.standard_normal(60)
        xu = rng.standard_normal((30, 5)) + 1.0
        train_u = build_dataset(RawTable.from_matrix(x[:40]), y[:40],
                                unlabeled=RawTable.from_matrix(xu))
        res = random_search(train_u, (x[40:], y[40:]), iterations=5, seed=4)
        assert np.isfinite(res.best_score)
        assert res.n_failed == 0

    def test_failed_trials_counted_not_fatal(self, monkeypatch):
        import s2net.search as search_mod

        train, xv, yv = _linear_pair()
        real_fit = search_mod.fit
        calls = {"n": 0}

        def flaky(*a, **k):
            calls["n"] += 1
            if calls["n"] == 2:
                raise NumericError("forced failure")
            return real_fit(*a, **k)

        monkeypatch.setattr(search_mod, "fit", flaky)
        res = random_search(train, (xv, yv), iterations=4, seed=6)
        assert res.n_failed == 1
        assert np.isinf(res.trials[1].score)
        assert res.best_index != 1

    def test_all_failures_raise(self, monkeypatch):
        import s2net.search as search_mod

        train, xv, yv = _linear_pair()

        def always_bad(*a, **k):
            raise NumericError("no luck")

        monkeypatch.setattr(search_mod, "fit", always_bad)
        with pytest.raises(NumericError):
            random_search(train, (xv, yv), iterations=3, seed=0)

    def test_validation_table_replayed(self):
        from s2net import replay

        train, xv, yv = _linear_pair()
        table = RawTable.from_matrix(xv)
        res_m = random_search(train, (replay(train.preprocess, table), yv),
                              iterations=3, seed=8)
        res_t = random_search(train, (table, yv), iterations=3, seed=8)
        assert res_m.best_score == res_t.best_score

    def test_config_forwarded(self):
        train, xv, yv = _linear_pair()
        starved = random_search(train, (xv, yv), iterations=2, seed=0,
                                config=FistaConfig(max_iter=1))
        full = random_search(train, (xv, yv), iterations=2, seed=0)
        assert starved.trials[0].hyper.as_dict() == full.trials[0].hyper.as_dict()
        assert starved.trials[0].score != full.trials[0].score

    def test_bad_iterations_rejected(self):
        train, xv, yv = _linear_pair()
        with pytest.raises(DataError):
            random_search(train, (xv, yv), iterations=0)

    def test_logistic_auc_search(self):
        train, xv, yv = _logistic_pair()
        res = random_search(train, (xv, yv), iterations=5, seed=2)
        assert res.metric == "auc"
        assert -1.0 <= res.best_score <= 0.0
