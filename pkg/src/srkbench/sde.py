"""Additive-noise SDE models and benchmark problems with known expectations.

A model is dX = g0(t, X) dt + G dW with a state-independent noise matrix G
whose columns weight the components of an m-dimensional Wiener process.
Drift callables must be vectorized over leading axes: they receive arrays
of shape (..., d) and return the same shape, which lets the Monte Carlo
driver evaluate whole path blocks at once.

The three benchmark problems pair a model with a scalar functional f and
the exact map t -> E f(X(t)).  Each closed form is cross-checked in the
test suite against an independent integration of the corresponding moment
ODE system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class AdditiveNoiseSde:
    """State model: drift g0, constant d x m noise matrix, initial data."""

    d: int
    m: int
    drift: Callable[[float, np.ndarray], np.ndarray]
    noise: np.ndarray
    t0: float
    x0: np.ndarray

    def __post_init__(self):
        noise = np.asarray(self.noise, dtype=float)
        if noise.ndim == 0 and self.d == 1 and self.m == 1:
            noise = noise.reshape(1, 1)
        if noise.shape != (self.d, self.m):
            raise ValueError(
                f"noise matrix must have shape ({self.d}, {self.m}), got {noise.shape}")
        x0 = np.asarray(self.x0, dtype=float).reshape(-1)
        if x0.shape != (self.d,):
            raise ValueError(f"x0 must have length {self.d}, got {x0.shape}")
        noise.setflags(write=False)
        x0.setflags(write=False)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "t0", float(self.t0))


def custom_sde(d, m, drift, noise, t0=0.0, x0=None) -> AdditiveNoiseSde:
    """Construct a model, validating shapes."""
    if x0 is None:
        raise ValueError("x0 is required")
    return AdditiveNoiseSde(d=d, m=m, drift=drift, noise=noise, t0=t0, x0=x0)


@dataclass(frozen=True, eq=False)
class ReferenceProblem:
    """A model together with a test functional and its exact expectation.

    ``functional`` maps state arrays of shape (..., d) to shape (...);
    ``exact(t)`` is E f(X(t)).  At the initial time the exact value must
    reproduce f(x0).
    """

    label: str
    sde: AdditiveNoiseSde
    functional: Callable[[np.ndarray], np.ndarray]
    exact: Callable[[float], float]
    T: float

    def __post_init__(self):
        f0 = float(self.functional(self.sde.x0[None, :])[0])
        if abs(self.exact(self.sde.t0) - f0) > 1e-12:
            raise ValueError(
                f"{self.label}: exact(t0)={self.exact(self.sde.t0)!r} does not match "
                f"f(x0)={f0!r}")


def ex1() -> ReferenceProblem:
    """Scalar linear SDE with constant forcing; functional is the second moment.

    dX = (3/2 X + 1) dt + 1/10 dW, X(0) = 1/10, on [0, 2].  With
    m(t) = E X(t) solving m' = 3/2 m + 1, the second moment solves
    u' = 3 u + 2 m + 1/100, which gives the closed form below.
    """

    def drift(t, x):
        return 1.5 * x + 1.0

    def functional(x):
        return x[..., 0] ** 2

    def exact(t):
        return (2 / 9) * (397 / 200
                          - (23 / 5) * math.exp(1.5 * t)
                          + (133 / 50) * math.exp(3.0 * t))

    model = AdditiveNoiseSde(d=1, m=1, drift=drift, noise=[[0.1]], t0=0.0, x0=[0.1])
    return ReferenceProblem(label="ex1", sde=model, functional=functional,
                            exact=exact, T=2.0)


def ex2() -> ReferenceProblem:
    """Nonlinear scalar SDE; functional is E exp(2 X(t)).

    dX = (3/2 exp(-2X) + 1) dt + 1/10 dW, X(0) = 1/10, on [0, 2].  By Ito's
    formula Y = exp(2X) satisfies dY = (3 + 101/50 Y) dt + 1/5 Y dW, so E Y
    is the solution of a scalar linear ODE.
    """

    def drift(t, x):
        return 1.5 * np.exp(-2.0 * x) + 1.0

    def functional(x):
        return np.exp(2.0 * x[..., 0])

    def exact(t):
        return (math.exp(0.2) + 150 / 101) * math.exp(2.02 * t) - 150 / 101

    model = AdditiveNoiseSde(d=1, m=1, drift=drift, noise=[[0.1]], t0=0.0, x0=[0.1])
    return ReferenceProblem(label="ex2", sde=model, functional=functional,
                            exact=exact, T=2.0)


_EX3_DRIFT_MATRIX = np.array([[-0.5, 0.0], [-0.01, -0.75]])
_EX3_DRIFT_MATRIX.setflags(write=False)


def ex3() -> ReferenceProblem:
    """Linear two-dimensional system driven by two-dimensional noise.

    dX = L X dt + G dW with L = ((-1/2, 0), (-1/100, -3/4)) and
    G = ((-1/10, 1/20), (0, 1/30)), X(0) = (1, 1), on [0, 2].  The
    functional is the second moment of the slow component, f(x) = x2^2.
    Solving the coupled mean/second-moment ODE chain P11 -> P12 -> P22 in
    closed form gives

        E X2^2(t) = 4889/6750000 - 31148/375000 e^(-5t/4)
                    + 79/50000 e^(-t) + 729511/675000 e^(-3t/2).
    """

    def drift(t, x):
        # elementwise form of x @ L.T, bitwise independent of batch shape
        return (x[..., None, :] * _EX3_DRIFT_MATRIX).sum(axis=-1)

    def functional(x):
        return x[..., 1] ** 2

    def exact(t):
        return (4889 / 6750000
                - (31148 / 375000) * math.exp(-1.25 * t)
                + (79 / 50000) * math.exp(-t)
                + (729511 / 675000) * math.exp(-1.5 * t))

    model = AdditiveNoiseSde(
        d=2, m=2, drift=drift,
        noise=[[-0.1, 0.05], [0.0, 1 / 30]],
        t0=0.0, x0=[1.0, 1.0],
    )
    return ReferenceProblem(label="ex3", sde=model, functional=functional,
                            exact=exact, T=2.0)


_PROBLEMS = {"ex1": ex1, "ex2": ex2, "ex3": ex3}


def get_problem(name: str) -> ReferenceProblem:
    """Look up a benchmark problem by CLI name."""
    try:
        return _PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(_PROBLEMS)}") from None
