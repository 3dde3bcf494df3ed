"""Zipper goodness-of-fit test: variable-importance inference by cross-fitting
with overlapping evaluation splits."""

import json

import numpy as np

from . import _core
from ._core import ConfigError, DomainError, ZipperError, analytic_power, normal_cdf, normal_quantile, select_slider

__version__ = _core.__version__

__all__ = [
    "ConfigError",
    "DomainError",
    "ZipperError",
    "analytic_power",
    "generate",
    "normal_cdf",
    "normal_quantile",
    "plan",
    "select_slider",
    "simulate",
    "test",
]


def test(y, X=None, drop=(), *, columns=None, learner="ols", restricted_learner=None,
         criterion="squared", folds=5, tau=None, auto_tau=50, tau_cap=0.9, alpha=0.05,
         seed=0, mode="zipper"):
    """Run the test of whether dropping the columns in `drop` loses predictiveness.

    `tau=None` picks the slider automatically from `auto_tau`. Returns the
    report as a dict.
    """
    y = np.ascontiguousarray(y, dtype=float)
    if X is None:
        X = np.empty((y.shape[0], 0))
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be two-dimensional")
    if columns is None:
        columns = [f"x{j}" for j in range(X.shape[1])]
    index = {name: j for j, name in enumerate(columns)}
    drop = [index[d] if isinstance(d, str) else int(d) for d in drop]
    doc = _core.run_test(y, X, list(columns), drop, learner, restricted_learner, criterion,
                         folds, tau, auto_tau, tau_cap, alpha, seed, mode)
    return json.loads(doc)


# keep pytest from collecting the public function above as a test
test.__test__ = False


def simulate(scenario, reps=500, seed=0, threads=0):
    """Monte Carlo run of one scenario (same keys as a `zipper simulate` entry)."""
    return json.loads(_core.simulate(json.dumps(scenario), reps, seed, threads))


def generate(scenario, seed=0):
    """Draw one dataset from a scenario's data-generating process; returns (y, X)."""
    return _core.generate(json.dumps(scenario), seed)


def plan(n, folds, tau, seed=0):
    """Fold partition and per-fold overlapping splits, as a dict."""
    return json.loads(_core.plan(n, folds, tau, seed))
