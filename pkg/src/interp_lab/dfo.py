"""Reflection-only regular-simplex derivative-free optimizer.

Each iteration sorts the vertices by function value and reflects the worst
one through the centroid of the others, ``x = -x_{n+1} + (2/n) sum_{i<=n} x_i``.
The simplex therefore stays regular with fixed circumradius ``delta``.  In
gradient-stop mode the method halts as soon as

    f(x_{n+1}) - mean(f) <= 2 nu delta^2,

which guarantees ``||Df(c_k)|| <= eps`` at the centroid when
``delta = 2 eps / (5 n nu)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from interp_lab import linalg
from interp_lab.errors import BudgetExhausted

REPROJECT_EVERY = 100


class Mode(str, enum.Enum):
    FIXED_BUDGET = "FixedBudget"
    GRADIENT_STOP = "GradientStop"


def regular_simplex(center, delta: float, n: int | None = None) -> np.ndarray:
    """Vertices (rows) of a regular simplex with circumradius ``delta``.

    Built from the QR factorization of
    ``sqrt((n+1)/n) delta I - sqrt(1/(n(n+1))) delta 11^T`` (size n+1); the
    first n rows of R hold the vertex offsets as columns.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = center.shape[0] if n is None else int(n)
    if n < 1 or center.shape[0] != n:
        raise ValueError("center must have n >= 1 coordinates")
    if not delta > 0:
        raise ValueError("delta must be positive")
    m = n + 1
    a = math.sqrt(m / n) * delta * np.eye(m) - math.sqrt(1.0 / (n * m)) * delta * np.ones((m, m))
    _, r = linalg.qr(a)
    offsets = r[:n, :].T
    # exact arithmetic gives zero mean; remove the rounding residue
    offsets -= offsets.mean(axis=0)
    return center + offsets


@dataclass
class SimplexState:
    points: np.ndarray
    values: np.ndarray
    delta: float
    ages: np.ndarray
    iteration: int = 0
    next_age: int = 0

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    def sorted(self) -> "SimplexState":
        """Ascending values, ties broken by age (oldest first)."""
        order = np.lexsort((self.ages, self.values))
        return SimplexState(self.points[order], self.values[order], self.delta,
                            self.ages[order], self.iteration, self.next_age)

    @property
    def spread(self) -> float:
        """Stop quantity f(x_{n+1}) - mean f, for a sorted state."""
        return float(self.values[-1] - self.values.mean())


def initial_state(objective, center, delta) -> SimplexState:
    pts = regular_simplex(center, delta)
    vals = np.array([float(objective(p)) for p in pts])
    m = pts.shape[0]
    return SimplexState(pts, vals, float(delta), np.arange(m), 0, m)


def reflection_point(points_sorted: np.ndarray) -> np.ndarray:
    n = points_sorted.shape[1]
    return -points_sorted[-1] + (2.0 / n) * points_sorted[:-1].sum(axis=0)


def reflect(state: SimplexState, objective: Callable) -> tuple[np.ndarray, SimplexState]:
    """Replace the worst vertex of a sorted state by its reflection."""
    x = reflection_point(state.points)
    fx = float(objective(x))
    pts = state.points.copy()
    vals = state.values.copy()
    ages = state.ages.copy()
    pts[-1], vals[-1], ages[-1] = x, fx, state.next_age
    return x, SimplexState(pts, vals, state.delta, ages, state.iteration + 1, state.next_age + 1)


def simplex_gradient(state: SimplexState) -> np.ndarray:
    """Gradient of the affine interpolant of the vertex values."""
    c = state.centroid
    a = np.hstack([np.ones((state.n + 1, 1)), state.points - c])
    coef = linalg.solve(a, state.values)
    return coef[1:]


def reproject(state: SimplexState, objective: Callable) -> SimplexState:
    """Snap a drifted simplex back to exact regularity around its centroid.

    The template simplex is aligned to the current one by orthogonal
    Procrustes; the orthogonal factor is the polar factor of T^T D.
    """
    c = state.centroid
    d = state.points - c
    t = regular_simplex(np.zeros(state.n), state.delta)
    m = t.T @ d
    eig = linalg.sym_eigen(0.5 * (m.T @ m + (m.T @ m).T))
    inv_sqrt = (eig.vectors / np.sqrt(np.maximum(eig.values, 1e-300))) @ eig.vectors.T
    rot = m @ inv_sqrt
    pts = c + t @ rot
    vals = np.array([float(objective(p)) for p in pts])
    return SimplexState(pts, vals, state.delta, state.ages.copy(), state.iteration, state.next_age)


@dataclass
class DfoConfig:
    objective: Callable
    nu: float | None = None
    epsilon: float | None = None
    delta: float | str = "auto"
    max_iter: int = 10_000
    mode: Mode = Mode.GRADIENT_STOP
    f_star: float | None = None
    gradient: Callable | None = None   # analytic gradient, telemetry only

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if self.mode == Mode.GRADIENT_STOP:
            if self.epsilon is None or not self.epsilon > 0:
                raise ValueError("GradientStop mode needs epsilon > 0")
            if self.nu is None or not self.nu > 0:
                raise ValueError("GradientStop mode needs nu > 0")
        if self.delta == "auto":
            if self.epsilon is None or self.nu is None:
                raise ValueError("automatic delta needs epsilon and nu")
        elif not float(self.delta) > 0:
            raise ValueError("delta must be positive")

    def resolved_delta(self, n: int) -> float:
        if self.delta == "auto":
            return 2.0 * self.epsilon / (5.0 * n * self.nu)
        return float(self.delta)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    sorted_values: np.ndarray
    centroid: np.ndarray
    spread: float
    simplex_grad_norm: float
    reflection: np.ndarray
    f_reflection: float
    f_hat_reflection: float
    true_grad_norm: float | None = None


@dataclass
class DfoTrace:
    records: list = field(default_factory=list)
    initial_mean: float = float("nan")
    delta: float = float("nan")
    budget: int | None = None
    stopped: bool = False
    final_spread: float = float("nan")

    def __len__(self):
        return len(self.records)

    def running_average(self) -> np.ndarray:
        g = np.array([r.true_grad_norm for r in self.records], dtype=float)
        return np.cumsum(g) / np.arange(1, g.size + 1)


def complexity_budget(n: int, nu: float, eps: float, mean_f0: float, f_star: float) -> int:
    """ceil(25 n^3 nu / (8 eps^2) (mean f(Theta_0) - f*))."""
    return int(math.ceil(25.0 * n ** 3 * nu / (8.0 * eps ** 2) * (mean_f0 - f_star)))


def average_gradient_bound(n, nu, delta, k, mean_f0, f_star) -> float:
    """Right-hand side of the running-average gradient inequality after k steps."""
    return n * n / (2.0 * delta * k) * (mean_f0 - f_star) + (n + math.sqrt(n) / 2.0) * nu * delta


def run(config: DfoConfig, start) -> tuple[SimplexState, DfoTrace]:
    """Run the reflection method from a regular simplex centred at ``start``.

    Raises
    ------
    BudgetExhausted
        In GradientStop mode when the stop test has not fired within the
        complexity budget (if ``f_star`` is known) or ``max_iter``.
    """
    start = np.atleast_1d(np.asarray(start, dtype=float))
    n = start.shape[0]
    delta = config.resolved_delta(n)
    f = config.objective
    state = initial_state(f, start, delta)
    trace = DfoTrace(initial_mean=float(state.values.mean()), delta=delta)
    budget = None
    if config.mode == Mode.GRADIENT_STOP and config.f_star is not None:
        budget = complexity_budget(n, config.nu, config.epsilon, trace.initial_mean, config.f_star)
        trace.budget = budget
    threshold = 2.0 * config.nu * delta ** 2 if config.nu is not None else None

    while True:
        state = state.sorted()
        spread = state.spread
        trace.final_spread = spread
        if config.mode == Mode.GRADIENT_STOP:
            if spread <= threshold:
                trace.stopped = True
                return state, trace
            if budget is not None and state.iteration >= budget:
                raise BudgetExhausted(
                    f"stop test not met within the complexity budget of {budget} iterations")
            if state.iteration >= config.max_iter:
                raise BudgetExhausted(f"stop test not met within max_iter = {config.max_iter}")
        elif state.iteration >= config.max_iter:
            return state, trace

        c = state.centroid
        sg = simplex_gradient(state)
        true_g = None if config.gradient is None else float(np.linalg.norm(config.gradient(c)))
        f_hat = -state.values[-1] + (2.0 / n) * state.values[:-1].sum()
        x, state = reflect(state, f)
        trace.records.append(IterationRecord(
            state.iteration, state.values.copy(), c, spread, float(np.linalg.norm(sg)),
            x, float(state.values[-1]), float(f_hat), true_g))
        if state.iteration % REPROJECT_EVERY == 0:
            state = reproject(state, f)


# Test-function suite: each entry has exact nu, f* and analytic gradient.

@dataclass(frozen=True)
class SuiteFunction:
    name: str
    n: int
    nu: float
    f_star: float
    f: Callable
    grad: Callable


def sphere(n: int) -> SuiteFunction:
    return SuiteFunction("sphere", n, 1.0, 0.0,
                        lambda u: 0.5 * float(np.dot(u, u)), lambda u: np.asarray(u, dtype=float))


def ellipsoid(n: int) -> SuiteFunction:
    """1/2 u^T A u with A = diag(linspace(0.1, 1, n)), so ||A||_2 = 1."""
    a = np.linspace(0.1, 1.0, n) if n > 1 else np.ones(1)
    return SuiteFunction("ellipsoid", n, 1.0, 0.0,
                        lambda u: 0.5 * float(np.dot(a * u, u)), lambda u: a * np.asarray(u, dtype=float))


def smooth_abs(n: int) -> SuiteFunction:
    """sum_i sqrt(u_i^2 + 1) - 1; second derivative (u^2+1)^{-3/2} <= 1."""
    return SuiteFunction("smooth-abs", n, 1.0, 0.0,
                        lambda u: float(np.sum(np.sqrt(np.asarray(u) ** 2 + 1.0) - 1.0)),
                        lambda u: np.asarray(u, dtype=float) / np.sqrt(np.asarray(u) ** 2 + 1.0))


SUITE = {"sphere": sphere, "ellipsoid": ellipsoid, "smooth-abs": smooth_abs}
