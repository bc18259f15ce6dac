"""Derivative-free minimizers used by the VQE driver.

Both methods keep an incumbent (best point seen so far) and log one trace
record per iteration holding that incumbent at the start of the iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OptimizationError, SpecError

METHODS = ("simplex", "stochastic-perturbation")
DEFAULT_MAX_ITERATIONS = {"simplex": 10_000, "stochastic-perturbation": 500}
_ALIASES = {"spsa": "stochastic-perturbation", "nelder-mead": "simplex"}


@dataclass
class OptimizerConfig:
    method: str = "simplex"
    max_iterations: int | None = None
    tolerance: float = 1e-8
    seed: int = 0
    # simplex
    initial_step: float = 0.5
    # stochastic perturbation gains
    a: float = 0.2
    c: float = 0.1
    stability: float = 10.0
    alpha: float = 0.602
    gamma: float = 0.101

    def __post_init__(self):
        self.method = _ALIASES.get(self.method, self.method)
        if self.method not in METHODS:
            raise SpecError(f"unknown optimizer {self.method!r}; choose from {METHODS}")
        if self.max_iterations is None:
            self.max_iterations = DEFAULT_MAX_ITERATIONS[self.method]
        if not self.tolerance > 0:
            raise SpecError("tolerance must be positive")
        if self.max_iterations < 1:
            raise SpecError("max_iterations must be >= 1")


@dataclass
class IterationRecord:
    iteration: int
    theta: np.ndarray
    energy: float


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    converged: bool
    trace: list = field(default_factory=list)
    evaluations: list = field(default_factory=list)


class _Counted:
    def __init__(self, fun):
        self.fun = fun
        self.evaluations = []
        self.best_x = None
        self.best_f = math.inf

    def __call__(self, x):
        x = np.array(x, dtype=float)
        f = float(self.fun(x))
        if not math.isfinite(f):
            raise OptimizationError(
                f"objective returned {f} at evaluation {len(self.evaluations) + 1}, theta={x.tolist()}"
            )
        self.evaluations.append((x, f))
        if f < self.best_f:
            self.best_f = f
            self.best_x = x
        return f


def _nelder_mead(f: _Counted, x0, cfg: OptimizerConfig, trace):
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    dim = len(x0)
    simplex = [x0.copy()]
    for i in range(dim):
        x = x0.copy()
        x[i] += cfg.initial_step
        simplex.append(x)
    values = None
    converged = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        trace.append(IterationRecord(it, f.best_x.copy(), f.best_f))
        if values is None:
            values = [f.best_f] + [f(x) for x in simplex[1:]]
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        if values[-1] - values[0] < cfg.tolerance:
            converged = True
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = f(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, dim + 1):
            simplex[i] = best + sigma * (simplex[i] - best)
            values[i] = f(simplex[i])
    return it, converged


def _spsa(f: _Counted, x0, cfg: OptimizerConfig, trace):
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    x = x0.copy()
    converged = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        trace.append(IterationRecord(it, f.best_x.copy(), f.best_f))
        k = it - 1
        ak = cfg.a / (k + 1 + cfg.stability) ** cfg.alpha
        ck = cfg.c / (k + 1) ** cfg.gamma
        delta = rng.choice(np.array([-1.0, 1.0]), size=len(x))
        fp = f(x + ck * delta)
        fm = f(x - ck * delta)
        grad = (fp - fm) / (2 * ck) * delta
        step = ak * grad
        x = x - step
        f(x)
        if np.max(np.abs(step), initial=0.0) < cfg.tolerance:
            converged = True
            break
    return it, converged


def minimize(objective: Callable[[np.ndarray], float], theta0, cfg: OptimizerConfig | None = None):
    """Minimize ``objective`` from ``theta0``.

    ``simplex`` is Nelder-Mead with reflection/expansion/contraction/shrink
    coefficients (1, 2, 0.5, 0.5), stopping when the spread of simplex values
    drops below ``tolerance``.  ``stochastic-perturbation`` is SPSA with gains
    a_k = a / (k + 1 + A)^0.602 and c_k = c / (k + 1)^0.101, stopping when a
    step moves every coordinate less than ``tolerance``.
    """
    cfg = cfg or OptimizerConfig()
    x0 = np.atleast_1d(np.array(theta0, dtype=float))
    f = _Counted(objective)
    f(x0)
    trace = []
    if cfg.method == "simplex":
        nit, converged = _nelder_mead(f, x0, cfg, trace)
    else:
        nit, converged = _spsa(f, x0, cfg, trace)
    return MinimizeResult(
        x=f.best_x.copy(),
        fun=f.best_f,
        nfev=len(f.evaluations),
        nit=nit,
        converged=converged,
        trace=trace,
        evaluations=f.evaluations,
    )
