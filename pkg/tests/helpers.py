"""Shared test oracles, independent of the integrator under test.

For a linear SDE dX = (L X + v) dt + G dW, one explicit SRK step is an
affine map Y' = Phi Y + psi + U xi1 + V xi2 in the step's driver variable
blocks.  Iterating the induced recursions for the mean and the second
moment matrix gives the exact weak moments of the numerical process, with
no sampling anywhere.  Only the first two moments of the increments enter,
so the oracle is valid for Gaussian and moment-matched discrete drivers
alike.
"""

from __future__ import annotations

import math

import numpy as np

from srkbench.tableau import SrkTableau, euler_maruyama_tableau


def step_maps(tab: SrkTableau, L, v, G, h):
    """Affine one-step map (Phi, psi, U, V) of the scheme on drift Lx+v."""
    L = np.atleast_2d(np.asarray(L, float))
    G = np.atleast_2d(np.asarray(G, float))
    v = np.atleast_1d(np.asarray(v, float))
    d = L.shape[0]
    s = tab.s
    sq = math.sqrt(h)
    P, q, R, S = [], [], [], []
    for i in range(s):
        Pi = np.eye(d)
        qi = np.zeros(d)
        Ri = sq * tab.b1[i] * G
        Si = sq * tab.b2[i] * G
        for j in range(i):
            aij = tab.A[i, j]
            if aij != 0.0:
                Pi = Pi + h * aij * (L @ P[j])
                qi = qi + h * aij * (L @ q[j] + v)
                Ri = Ri + h * aij * (L @ R[j])
                Si = Si + h * aij * (L @ S[j])
        P.append(Pi), q.append(qi), R.append(Ri), S.append(Si)
    Phi = np.eye(d)
    psi = np.zeros(d)
    U = sq * G
    V = np.zeros_like(U)
    for i in range(s):
        Phi = Phi + h * tab.alpha[i] * (L @ P[i])
        psi = psi + h * tab.alpha[i] * (L @ q[i] + v)
        U = U + h * tab.alpha[i] * (L @ R[i])
        V = V + h * tab.alpha[i] * (L @ S[i])
    return Phi, psi, U, V


def exact_weak_moments(tab: SrkTableau, L, v, G, x0, h, n_steps):
    """Exact (mean vector, second moment matrix) of Y_n for the scheme."""
    Phi, psi, U, V = step_maps(tab, L, v, G, h)
    mean = np.atleast_1d(np.asarray(x0, float)).copy()
    second = np.outer(mean, mean)
    for _ in range(n_steps):
        second = (Phi @ second @ Phi.T
                  + np.outer(Phi @ mean, psi) + np.outer(psi, Phi @ mean)
                  + np.outer(psi, psi) + U @ U.T + V @ V.T)
        mean = Phi @ mean + psi
    return mean, second


def euler_weak_moments(L, v, G, x0, h, n_steps):
    return exact_weak_moments(euler_maruyama_tableau(), L, v, G, x0, h, n_steps)


def exem_exact_second_moment(L, v, G, x0, h, n_steps, component=(0, 0)):
    """Exact extrapolated-Euler value 2 E f(Z^(h/2)) - E f(Z^h) for a
    second-moment functional."""
    i, j = component
    _, fine = euler_weak_moments(L, v, G, x0, h / 2, 2 * n_steps)
    _, coarse = euler_weak_moments(L, v, G, x0, h, n_steps)
    return 2 * fine[i, j] - coarse[i, j]


EX1_LINEAR = dict(L=[[1.5]], v=[1.0], G=[[0.1]], x0=[0.1])
EX3_LINEAR = dict(L=[[-0.5, 0.0], [-0.01, -0.75]],
                  v=[0.0, 0.0],
                  G=[[-0.1, 0.05], [0.0, 1.0 / 30.0]],
                  x0=[1.0, 1.0])


def classical_rk4() -> SrkTableau:
    """The classical fourth order Runge-Kutta tableau with zero noise weights."""
    return SrkTableau(
        name="RK4",
        alpha=[1 / 6, 1 / 3, 1 / 3, 1 / 6],
        A=[[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]],
        b1=[0.0, 0.0, 0.0, 0.0],
        b2=[0.0, 0.0, 0.0, 0.0],
    )
