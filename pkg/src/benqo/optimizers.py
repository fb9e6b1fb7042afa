"""Classical parameter optimizers producing per-iteration traces.

All optimizers take a loss ``f(theta) -> float`` and return an
:class:`OptimizationTrace`. The gradient-free methods are thin wrappers over
``scipy.optimize.minimize`` with their tolerances pinned.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError
from .problems import make_rng

LossFunction = Callable[[np.ndarray], float]
GradientRule = Callable[[LossFunction, np.ndarray], np.ndarray]

SHIFT = math.pi / 2
DEGENERATE_GRAD = 1e-12
DEFAULT_BUDGET = 1000
BENQO_INIT_SIGMA = 0.1


@dataclass
class TraceStep:
    k: int
    theta: np.ndarray
    loss: float
    evals: int

    def to_dict(self) -> dict:
        return {"k": self.k, "theta": self.theta.tolist(), "loss": self.loss, "evals": self.evals}


@dataclass
class OptimizationTrace:
    """Iterates of one optimizer run.

    ``iterations`` holds the points after each update (``k >= 1``), or a
    single ``k = 0`` entry when nothing moved. The starting point is kept in
    ``theta0``/``loss0``.

    ``status`` is one of ``completed`` (fixed step count reached),
    ``converged``, ``budget-limited``, ``degenerate-gradient``, ``failed``.
    """

    theta0: np.ndarray
    loss0: float
    iterations: list[TraceStep] = field(default_factory=list)
    status: str = "completed"
    wall_time: float = 0.0
    cpu_time: float = 0.0

    @property
    def final_theta(self) -> np.ndarray:
        return self.iterations[-1].theta

    @property
    def final_loss(self) -> float:
        return self.iterations[-1].loss

    @property
    def evals(self) -> int:
        return self.iterations[-1].evals

    def __len__(self) -> int:
        return len(self.iterations)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s.to_dict()) + "\n" for s in self.iterations)


class _Counted:
    def __init__(self, f: LossFunction):
        self.f = f
        self.calls = 0

    def __call__(self, theta) -> float:
        self.calls += 1
        return float(self.f(np.asarray(theta, dtype=float)))


def parameter_shift_gradient(f: LossFunction, theta) -> np.ndarray:
    """``(f(theta + pi/2 e_i) - f(theta - pi/2 e_i)) / 2`` for every component; ``2n`` calls."""
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        shifted = theta.copy()
        shifted[i] = theta[i] + SHIFT
        plus = f(shifted)
        shifted[i] = theta[i] - SHIFT
        minus = f(shifted)
        grad[i] = (plus - minus) / 2.0
    return grad


def chain_rule_gradient(K: float) -> GradientRule:
    """Gradient rule for a loss of the form ``K asin(u)``.

    Recovers ``u = sin(loss / K)``, applies the shift rule to ``u`` (where it
    is exact) and multiplies by ``dloss/du = K / sqrt(1 - u**2)``.
    """

    def rule(f: LossFunction, theta) -> np.ndarray:
        def u(t):
            return math.sin(f(t) / K)

        u0 = u(theta)
        return K / math.sqrt(max(1e-300, 1.0 - u0 * u0)) * parameter_shift_gradient(u, theta)

    return rule


def ngd_step_size(k: int, k_max: int, n: int) -> float:
    return math.sqrt(math.pi * n / 2.0) * math.exp(-4.0 * k * k / (k_max * k_max))


def ngd_minimize(
    f: LossFunction,
    theta0,
    k_max: int = 20,
    gradient: GradientRule = parameter_shift_gradient,
) -> OptimizationTrace:
    """Normalized gradient descent with the decaying step ``sqrt(pi n / 2) exp(-4 k^2 / k_max^2)``.

    Runs exactly ``k_max`` updates with no early stopping. If the gradient
    norm drops below 1e-12 the run stops there, records the unchanged point
    and sets ``status = "degenerate-gradient"``.
    """
    if k_max < 1:
        raise InvalidInputError(f"k_max must be >= 1, got {k_max}")
    fc = _Counted(f)
    theta = np.array(theta0, dtype=float).reshape(-1)
    n = theta.size
    t_wall, t_cpu = time.perf_counter(), time.process_time()
    loss = fc(theta)
    trace = OptimizationTrace(theta.copy(), loss)
    for k in range(1, k_max + 1):
        g = gradient(fc, theta)
        norm = float(np.linalg.norm(g))
        if not norm >= DEGENERATE_GRAD:
            trace.status = "degenerate-gradient"
            trace.iterations.append(TraceStep(k, theta.copy(), loss, fc.calls))
            break
        theta = theta - ngd_step_size(k, k_max, n) * g / norm
        loss = fc(theta)
        trace.iterations.append(TraceStep(k, theta.copy(), loss, fc.calls))
    trace.wall_time = time.perf_counter() - t_wall
    trace.cpu_time = time.process_time() - t_cpu
    return trace


def _scipy_minimize(f: LossFunction, theta0, method: str, options: dict) -> OptimizationTrace:
    fc = _Counted(f)
    theta0 = np.array(theta0, dtype=float).reshape(-1)
    t_wall, t_cpu = time.perf_counter(), time.process_time()
    loss0 = fc(theta0)
    trace = OptimizationTrace(theta0.copy(), loss0)

    def callback(intermediate_result):
        trace.iterations.append(
            TraceStep(len(trace.iterations) + 1, np.array(intermediate_result.x, dtype=float),
                      float(intermediate_result.fun), fc.calls)
        )

    res = minimize(fc, theta0, method=method, callback=callback, options=options)
    x, fun = np.array(res.x, dtype=float).reshape(-1), float(res.fun)
    if not trace.iterations:
        trace.iterations.append(TraceStep(0, x, fun, fc.calls))
    elif not np.array_equal(trace.iterations[-1].theta, x):
        trace.iterations.append(TraceStep(len(trace.iterations) + 1, x, fun, fc.calls))
    if res.status == 0:
        trace.status = "converged"
    elif res.status in (1, 2):
        trace.status = "budget-limited"
    else:
        trace.status = "failed"
    trace.wall_time = time.perf_counter() - t_wall
    trace.cpu_time = time.process_time() - t_cpu
    return trace


def powell_minimize(f: LossFunction, theta0, budget: int = DEFAULT_BUDGET) -> OptimizationTrace:
    """Powell's conjugate-direction method (Brent line searches).

    Stops when the relative improvement of one sweep falls below 1e-6 or
    after ``budget`` evaluations; the budget is checked between line
    searches, so it can be overshot by a few calls.
    """
    n = np.size(theta0)
    if budget < n:
        raise InvalidInputError(f"budget {budget} smaller than parameter count {n}")
    return _scipy_minimize(f, theta0, "Powell", {"maxfev": budget, "maxiter": budget, "ftol": 1e-6, "xtol": 1e-6})


def nelder_mead_minimize(f: LossFunction, theta0, budget: int = DEFAULT_BUDGET) -> OptimizationTrace:
    """Standard simplex method (reflection 1, expansion 2, contraction 0.5, shrink 0.5).

    Stops once every vertex lies within 1e-8 of the best one (per
    coordinate) or after ``budget`` evaluations.
    """
    n = np.size(theta0)
    if budget < n + 1:
        raise InvalidInputError(f"budget {budget} smaller than simplex size {n + 1}")
    options = {"maxfev": budget, "maxiter": budget, "xatol": 1e-8, "fatol": np.inf, "adaptive": False}
    return _scipy_minimize(f, theta0, "Nelder-Mead", options)


def initial_parameters(
    strategy: Literal["benqo-normal", "uniform"],
    n: int,
    seed: int,
    sigma: float = BENQO_INIT_SIGMA,
) -> np.ndarray:
    """Starting point: ``Normal(0, sigma)`` around the all-zero point, or ``Uniform(-pi, pi)``."""
    if n < 1:
        raise InvalidInputError(f"parameter count must be >= 1, got {n}")
    rng = make_rng(seed)
    if strategy == "benqo-normal":
        return rng.normal(0.0, sigma, size=n)
    if strategy == "uniform":
        return rng.uniform(-math.pi, math.pi, size=n)
    raise InvalidInputError(f"unknown strategy {strategy!r}")
