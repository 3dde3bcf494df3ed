import math

import numpy as np
import pytest

import zipper


def test_detects_signal_covariate():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(400, 3))
    y = 1.0 + 2.0 * X[:, 0] + rng.normal(size=400)
    report = zipper.test(y, X, drop=["a"], columns=["a", "b", "c"], seed=3)
    assert report["schema"] == "zipper.test_report/1"
    assert report["reject"]
    assert report["p_value"] < 1e-6
    assert report["ci"]["lower"] <= report["gap_estimate"] <= report["ci"]["upper"]


def test_same_seed_same_report():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(200, 2))
    y = X[:, 0] + rng.normal(size=200)
    first = zipper.test(y, X, drop=[1], seed=11)
    second = zipper.test(y, X, drop=[1], seed=11)
    assert first == second


def test_mean_example_without_covariates():
    y = np.random.default_rng(2).normal(0.5, 1.0, size=300)
    report = zipper.test(y, learner="mean_only", restricted_learner="zero", tau=0.5, folds=2)
    assert report["p"] == 0
    assert report["gap_estimate"] > 0


def test_slider_rules():
    assert zipper.select_slider(500, 50) == pytest.approx(400 / 450)
    assert zipper.select_slider(90, 50) == 0.0
    assert zipper.select_slider(10**6, 50) == 0.9
    with pytest.raises(ValueError, match=r"\[0,1\)"):
        zipper.test(np.zeros(100) + np.arange(100), np.ones((100, 1)), drop=[0], tau=1.0)


def test_power_at_null_equals_level():
    assert zipper.analytic_power(0.0, 1.0, 1.0, 2.0, 500, 0.0, 0.05) == pytest.approx(0.05, abs=1e-12)
    assert zipper.normal_quantile(zipper.normal_cdf(1.3)) == pytest.approx(1.3)


def test_plan_geometry():
    plan = zipper.plan(100, 2, 0.5, seed=4)
    assert plan["tau_nominal"] == 0.5
    for split in plan["splits"]:
        assert len(split["a"]) == len(split["b"])
        assert len(split["a"]) + len(split["b"]) + len(split["o"]) == 50


def test_generate_and_simulate():
    scenario = {"name": "s", "family": "normal", "n": 200, "p": 5}
    y, X = zipper.generate(scenario, seed=1)
    assert y.shape == (200,) and X.shape == (200, 5)
    archive = zipper.simulate(scenario, reps=20, seed=5)
    result = archive["cells"][0]["result"]
    assert result["completed"] == 20
    assert 0.0 <= result["rejection_rate"] <= 1.0
    assert math.isclose(archive["scenario"]["true_gap"], 0.0)
