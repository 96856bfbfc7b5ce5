from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from interp_lab import _kernels_py, eep, linalg
from interp_lab.geometry import InterpolationInstance

DATA = Path(__file__).resolve().parent / "data"

ACUTE_THETA = np.array([[-0.3, 1.0], [-1.1, -0.5], [1.0, 0.0]])
UNIT_THETA = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
OBTUSE_THETA = np.array([[0.0, 0.0], [2.0, 1.8], [-2.0, 0.0]])
# one point per obtuse zone: (region, labeling) -> x
OBTUSE_ZONES = {
    ("BivariateTriangleZone", (1, 2, 3)): (1.0, 0.5),
    ("BivariateTriangleZone", (1, 3, 2)): (-0.75, -0.25),
    ("BivariateConeZone", (1, 2, 3)): (3.0, 3.25),
    ("BivariateConeZone", (1, 3, 2)): (-4.0, 0.5),
}

try:
    from interp_lab import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

BACKENDS = [pytest.param(_kernels_py, id="python")]
BACKENDS.append(pytest.param(_kernels_c, id="cython",
                             marks=pytest.mark.skipif(_kernels_c is None, reason="extension not built")))


@pytest.fixture(params=BACKENDS)
def kern(request):
    return request.param


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call of the package through one backend."""
    monkeypatch.setattr(linalg, "kernels", request.param)
    monkeypatch.setattr(eep, "kernels", request.param)
    return request.param


def frac(s: str) -> float:
    return float(Fraction(s))


@pytest.fixture(scope="session")
def oracles():
    raw = json.loads((DATA / "oracles.json").read_text())
    conv = lambda pts: np.array([[frac(v) for v in p] for p in pts])
    for group in raw.values():
        for case in group:
            case["theta"] = conv(case["theta"])
            case["x"] = np.array([frac(v) for v in case["x"]])
    return raw


def instance_from_ell(theta, ell, nu=1.0) -> InterpolationInstance:
    """Query point with prescribed barycentric coordinates (summing to 1)."""
    theta = np.asarray(theta, dtype=float)
    return InterpolationInstance(theta, np.asarray(ell) @ theta, nu)


def random_simplex(rng, n, min_cond=1e-2):
    while True:
        theta = rng.standard_normal((n + 1, n))
        a = np.hstack([np.ones((n + 1, 1)), theta])
        s = np.linalg.svd(a, compute_uv=False)
        if s[-1] / s[0] > min_cond:
            return theta


def random_ell(rng, n, kind):
    """Barycentric vectors of a given sign pattern, bounded away from zero."""
    m = n + 1
    if kind == "inside":
        e = rng.uniform(0.05, 1.0, m)
        return e / e.sum()
    if kind == "cone":
        neg = -rng.uniform(0.1, 1.0, m - 1)
        apex = 1.0 - neg.sum()
        e = np.concatenate([[apex], neg])
        return rng.permutation(e)
    if kind == "mixed":
        k = int(rng.integers(2, m)) if m > 2 else 1
        while True:
            signs = np.array([1.0] * k + [-1.0] * (m - k))
            mags = rng.uniform(0.1, 1.5, m)
            e = signs * mags
            # rescale the negative part so the sum is one
            pos, neg = e[e > 0].sum(), -e[e < 0].sum()
            if pos - neg > 0.05:
                e = e / (pos - neg)
                if np.all(np.abs(e) > 0.02):
                    return rng.permutation(e)
    raise ValueError(kind)


def random_instance(rng, n, kind, nu=1.0):
    return instance_from_ell(random_simplex(rng, n), random_ell(rng, n, kind), nu)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
