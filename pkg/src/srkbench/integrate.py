"""One-step maps and path simulation for additive-noise SDEs.

The stochastic Runge-Kutta step with tableau (alpha, A, c, b1, b2) reads

    H_i   = Y_n + h sum_j a_ij g0(t_n + c_j h, H_j)
                + sqrt(h) sum_l g_l (b1_i xi_l + b2_i xi_{m+l})
    Y_n+1 = Y_n + h sum_i alpha_i g0(t_n + c_i h, H_i)
                + sqrt(h) sum_l g_l xi_l

with g_l the columns of the noise matrix and xi_1..xi_2m the step's driver
variables.  For strictly lower triangular A the stages are computed in
index order.  Euler-Maruyama is the one-stage special case with b1 = b2 = 0.

The batch kernels below operate on whole blocks of paths at once; the
public single-path functions wrap the same kernels with a leading axis of
one, so scalar and vectorized use produce bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tableau import SrkTableau


@dataclass
class PathState:
    """Current time and state along one trajectory."""

    t: float
    y: np.ndarray


@dataclass
class StepCounters:
    """Work accounting: drift evaluations and random variates consumed."""

    drift_evals: int = 0
    rv_draws: int = 0


class DivergenceError(RuntimeError):
    """A stage or state became non-finite.

    ``step`` is the zero-based index of the offending step when known.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


def _apply_noise(G, xi):
    """sum_l xi_l g_l for a batch of draw vectors: (B, m) -> (B, d).

    Written as an elementwise product with a last-axis reduction rather
    than a matmul: BLAS kernels round differently depending on the batch
    shape, and path trajectories must not depend on block size.
    """
    return (xi[..., None, :] * G).sum(axis=-1)


def _srk_step_batch(tab, sde, t, y, h, sqrt_h, xi1, xi2):
    """Advance a block of states one step.

    ``y`` has shape (B, d); ``xi1``/``xi2`` have shape (B, m).  Returns the
    new states and a boolean mask of paths whose stages or output went
    non-finite.
    """
    G = sde.noise
    base1 = _apply_noise(G, xi1)
    base2 = _apply_noise(G, xi2)
    bad = np.zeros(y.shape[0], dtype=bool)
    ks = []
    for i in range(tab.s):
        Hi = y + (sqrt_h * tab.b1[i]) * base1 + (sqrt_h * tab.b2[i]) * base2
        for j in range(i):
            aij = tab.A[i, j]
            if aij != 0.0:
                Hi = Hi + (h * aij) * ks[j]
        bad |= ~np.isfinite(Hi).all(axis=-1)
        ks.append(sde.drift(t + tab.c[i] * h, Hi))
    out = y
    for i in range(tab.s):
        out = out + (h * tab.alpha[i]) * ks[i]
    out = out + sqrt_h * base1
    bad |= ~np.isfinite(out).all(axis=-1)
    return out, bad


def _euler_step_batch(sde, t, y, h, sqrt_h, xi1):
    """Euler-Maruyama over a block: one drift evaluation per path."""
    out = y + h * sde.drift(t, y) + sqrt_h * _apply_noise(sde.noise, xi1)
    bad = ~np.isfinite(out).all(axis=-1)
    return out, bad


def srk_step(tab: SrkTableau, sde, state: PathState, h: float, xi) -> PathState:
    """One explicit SRK step from ``state`` with the 2m draws in ``xi``."""
    if not tab.explicit:
        raise ValueError(f"tableau {tab.name!r} is not explicit; "
                         "the stepper requires strictly lower triangular A")
    if h <= 0:
        raise ValueError("step size must be positive")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (2 * sde.m,):
        raise ValueError(f"expected {2 * sde.m} increment draws, got {xi.shape}")
    y = np.asarray(state.y, dtype=float).reshape(1, -1)
    with np.errstate(over="ignore", invalid="ignore"):
        out, bad = _srk_step_batch(tab, sde, state.t, y, h, math.sqrt(h),
                                   xi[None, :sde.m], xi[None, sde.m:])
    if bad[0]:
        raise DivergenceError("non-finite stage or output in SRK step")
    return PathState(t=state.t + h, y=out[0])


def euler_maruyama_step(sde, state: PathState, h: float, xi) -> PathState:
    """One Euler-Maruyama step with the m draws in ``xi``."""
    if h <= 0:
        raise ValueError("step size must be positive")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (sde.m,):
        raise ValueError(f"expected {sde.m} increment draws, got {xi.shape}")
    y = np.asarray(state.y, dtype=float).reshape(1, -1)
    with np.errstate(over="ignore", invalid="ignore"):
        out, bad = _euler_step_batch(sde, state.t, y, h, math.sqrt(h), xi[None, :])
    if bad[0]:
        raise DivergenceError("non-finite output in Euler-Maruyama step")
    return PathState(t=state.t + h, y=out[0])


def simulate_path(method, sde, h, n_steps, dists, stream):
    """Iterate the step map over a uniform grid of ``n_steps`` steps.

    ``method`` is either an explicit SrkTableau or the string "euler".
    ``dists`` is the pair of increment distributions; the SRK step draws m
    variates from the first and m from the second per step, Euler-Maruyama
    draws m from the first.  Draws are consumed from ``stream`` in that
    fixed order, so the trajectory matches the vectorized Monte Carlo
    driver path for path.

    Returns the final PathState and the exact work counters.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    dist1, dist2 = dists
    state = PathState(t=sde.t0, y=np.array(sde.x0, dtype=float))
    counters = StepCounters()
    for n in range(n_steps):
        try:
            if method == "euler":
                xi = dist1.transform(stream.take(sde.m))
                counters.drift_evals += 1
                counters.rv_draws += sde.m
                state = euler_maruyama_step(sde, state, h, xi)
            else:
                u = stream.take(2 * sde.m)
                xi = np.concatenate([dist1.transform(u[:sde.m]),
                                     dist2.transform(u[sde.m:])])
                counters.drift_evals += method.s
                counters.rv_draws += 2 * sde.m
                state = srk_step(method, sde, state, h, xi)
        except DivergenceError:
            raise DivergenceError(f"path diverged at step {n}", step=n) from None
    return state, counters
