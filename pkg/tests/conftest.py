"""Shared test helpers: independent oracles and probe machinery."""

import numpy as np
import pytest

from dstk.exceptions import EvalAtPole
from dstk.system import eval_tfm


def oracle_points(rng, count=5, radius=2.0):
    """Random complex probe points off the real axis (test-side, independent
    of the library's probe generator)."""
    pts = []
    while len(pts) < count:
        theta = rng.uniform(0.25, np.pi - 0.25) * rng.choice([-1.0, 1.0])
        r = radius * rng.uniform(0.5, 1.8)
        pts.append(r * np.exp(1j * theta))
    return pts


def safe_eval(sys, lam, rng, retries=10):
    """Evaluate, redrawing the probe if it happens to hit a pole."""
    for _ in range(retries):
        try:
            return lam, eval_tfm(sys, lam)
        except EvalAtPole:
            lam = lam * (1.0 + rng.uniform(0.05, 0.2)) + 1j * rng.uniform(0.01, 0.1)
    raise AssertionError("could not find a pole-free probe point")


def assert_tfm_match(sys, expect_fn, rng, count=5, rtol=1e-8, radius=2.0):
    """Check eval(sys, lam) against an oracle callable at random probes."""
    for lam in oracle_points(rng, count=count, radius=radius):
        lam, got = safe_eval(sys, lam, rng)
        want = np.atleast_2d(np.asarray(expect_fn(lam)))
        scale = 1.0 + np.linalg.norm(want)
        err = np.linalg.norm(got - want) / scale
        assert err <= rtol, f"TFM mismatch at {lam}: err={err:.3e}"


def assert_same_tfm(sys1, sys2, rng, count=5, rtol=1e-8, radius=2.0):
    assert_tfm_match(sys1, lambda lam: eval_tfm(sys2, lam), rng, count=count, rtol=rtol, radius=radius)


def ratval(num, den, lam):
    """Direct rational evaluation from ascending coefficient lists."""
    pv = np.polynomial.polynomial.polyval
    return pv(lam, np.asarray(num, dtype=float)) / pv(lam, np.asarray(den, dtype=float))


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
