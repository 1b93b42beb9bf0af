"""Monte Carlo estimation of E f(Y(T)) with reproducible parallel streams.

Estimates are averages over M independent paths.  Path k draws its
variates from the counter-based substream keyed on (seed, k), and sums are
accumulated pairwise inside fixed blocks of 2^16 paths which are then
combined in block index order.  Together these make every estimate a pure
function of (method, problem, h, M, seed, distributions), independent of
the worker count: threads only decide who computes which block.

Error records report

    mu_hat     = sample mean of f at T minus the exact expectation
    sigma2_mu  = unbiased sample variance of the f values divided by M
    ci_lo/hi   = mu_hat -+ 1.6449 sqrt(sigma2_mu)   (two-sided 90% interval)
    effort     = drift evaluations plus random variates drawn, per path

Paths whose states or f values go non-finite are counted and flag the
whole record as divergent rather than being dropped silently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .increments import GAUSSIAN, IncrementDistribution
from .integrate import _euler_step_batch, _srk_step_batch
from .sde import ReferenceProblem, get_problem
from .tableau import SrkTableau, an3d1

BLOCK_SIZE = 1 << 16
Z90 = 1.6449  # two-sided 90% standard normal quantile
# Path-index offset separating the substreams of paired experiments (the
# two grids of the extrapolated estimator).
SUBSTREAM_STRIDE = 1 << 62


@dataclass(frozen=True)
class McEstimate:
    """Mean functional estimate with its variance and work accounting."""

    mean: float
    var_of_mean: float
    effort_per_path: float
    n_paths: int
    n_diverged: int


@dataclass(frozen=True)
class WeakErrorRecord:
    """One benchmark table row: a weak-error measurement at one step size."""

    method: str
    problem: str
    h: float
    n_paths: int
    seed: int
    mu_hat: float
    sigma2_mu: float
    ci_lo: float
    ci_hi: float
    effort_per_path: float
    n_diverged: int

    @property
    def diverged(self) -> bool:
        return self.n_diverged > 0

    @property
    def ci_half_width(self) -> float:
        return 0.5 * (self.ci_hi - self.ci_lo)


def resolve_method(method):
    """Normalize a method selector to an SrkTableau or the string 'euler'."""
    if isinstance(method, SrkTableau):
        return method
    if method == "an3d1":
        return an3d1()
    if method == "euler":
        return "euler"
    raise ValueError(f"unknown method {method!r}; expected 'an3d1', 'euler', "
                     "or an SrkTableau")


def method_label(method) -> str:
    m = resolve_method(method)
    return "euler" if m == "euler" else m.name.lower()


def _steps_for(problem: ReferenceProblem, h: float) -> int:
    span = problem.T - problem.sde.t0
    n = span / h
    n_int = round(n)
    if n_int < 1 or abs(n - n_int) > 1e-9 * max(1.0, abs(n)):
        raise ValueError(
            f"(T - t0)/h = {n!r} is not a positive integer for h = {h!r}")
    return int(n_int)


def effort(method, problem, h) -> float:
    """Per-path work: drift evaluations plus random variates drawn.

    For an s-stage SRK scheme each step costs s drift evaluations and 2m
    draws; Euler-Maruyama costs 1 and m; the extrapolated Euler pair at
    (h, h/2) totals 3 n_steps of each.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    n = _steps_for(problem, h)
    m = problem.sde.m
    if method == "exem":
        return 3 * n * (1 + m)
    resolved = resolve_method(method)
    if resolved == "euler":
        return n * (1 + m)
    return n * (resolved.s + 2 * m)


def _block_stats(tab, problem, h, n_steps, dist1, dist2, seed, lo, hi, offset):
    """Simulate paths [lo, hi) and reduce them to (count, mean, m2, bad).

    ``m2`` is the sum of squared deviations from the block mean; sums use
    numpy's pairwise summation.
    """
    sde = problem.sde
    m = sde.m
    n_paths = hi - lo
    draws_per_step = 2 * m if tab != "euler" else m
    paths = np.arange(lo, hi, dtype=np.uint64) + np.uint64(offset)
    u = rng.uniforms(seed, paths, 0, n_steps * draws_per_step)

    # transform all first-block and second-block uniforms in one call each
    if tab == "euler":
        xi1_all = dist1.transform(u)
        xi2_all = None
    else:
        cols = np.arange(n_steps * 2 * m).reshape(n_steps, 2 * m)
        xi1_all = dist1.transform(u[:, cols[:, :m].ravel()])
        xi2_all = dist2.transform(u[:, cols[:, m:].ravel()])

    y = np.broadcast_to(sde.x0, (n_paths, sde.d)).copy()
    t = sde.t0
    sqrt_h = math.sqrt(h)
    bad = np.zeros(n_paths, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(n_steps):
            if tab == "euler":
                xi1 = xi1_all[:, n * m:(n + 1) * m]
                y, step_bad = _euler_step_batch(sde, t, y, h, sqrt_h, xi1)
            else:
                xi1 = xi1_all[:, n * m:(n + 1) * m]
                xi2 = xi2_all[:, n * m:(n + 1) * m]
                y, step_bad = _srk_step_batch(tab, sde, t, y, h, sqrt_h, xi1, xi2)
            bad |= step_bad
            t = t + h
        f = np.asarray(problem.functional(y), dtype=float)
        bad |= ~np.isfinite(f)
        # divergent paths poison the reduction by design: the record then
        # reports a non-finite estimate together with the diverged count
        mean = np.sum(f) / n_paths
        m2 = np.sum((f - mean) ** 2)
    return n_paths, mean, m2, int(bad.sum())


def _combine(blocks):
    """Merge per-block (count, mean, m2, bad) statistics in index order."""
    n_tot, mean_tot, m2_tot, bad_tot = 0, 0.0, 0.0, 0
    with np.errstate(invalid="ignore"):
        for count, mean, m2, bad in blocks:
            if n_tot == 0:
                n_tot, mean_tot, m2_tot = count, mean, m2
            else:
                delta = mean - mean_tot
                new_n = n_tot + count
                mean_tot = mean_tot + delta * (count / new_n)
                m2_tot = m2_tot + m2 + delta * delta * (n_tot * count / new_n)
                n_tot = new_n
            bad_tot += bad
    return n_tot, mean_tot, m2_tot, bad_tot


def estimate_functional(method, problem, h, n_paths, dists=None, seed=0,
                        threads=1, path_offset=0) -> McEstimate:
    """Estimate E f(Y(T)) over ``n_paths`` independent paths.

    ``dists`` is the increment distribution pair (defaults to Gaussian for
    both blocks).  ``path_offset`` shifts the substream indices and exists
    for estimators that pair several independent experiments under one
    master seed.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    if n_paths < 2:
        raise ValueError("need at least 2 paths for a variance estimate")
    tab = resolve_method(method)
    if tab != "euler" and not tab.explicit:
        raise ValueError(f"tableau {tab.name!r} is not explicit")
    n_steps = _steps_for(problem, h)
    if dists is None:
        dists = (GAUSSIAN, GAUSSIAN)
    dist1, dist2 = dists
    if not isinstance(dist1, IncrementDistribution) or not isinstance(dist2, IncrementDistribution):
        raise TypeError("dists must be a pair of IncrementDistribution")

    bounds = [(lo, min(lo + BLOCK_SIZE, n_paths))
              for lo in range(0, n_paths, BLOCK_SIZE)]

    def work(bound):
        lo, hi = bound
        return _block_stats(tab, problem, h, n_steps, dist1, dist2, seed,
                            lo, hi, path_offset)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, bounds))
    else:
        results = [work(b) for b in bounds]

    count, mean, m2, bad = _combine(results)
    var_of_mean = m2 / (count - 1) / count
    m = problem.sde.m
    per_step = (1 + m) if tab == "euler" else (tab.s + 2 * m)
    return McEstimate(mean=float(mean), var_of_mean=float(var_of_mean),
                      effort_per_path=float(n_steps * per_step),
                      n_paths=count, n_diverged=bad)


def _record(method_name, problem, h, seed, est: McEstimate) -> WeakErrorRecord:
    mu = est.mean - problem.exact(problem.T)
    half = Z90 * math.sqrt(est.var_of_mean) if est.var_of_mean >= 0 else math.nan
    return WeakErrorRecord(
        method=method_name, problem=problem.label, h=h, n_paths=est.n_paths,
        seed=seed, mu_hat=mu, sigma2_mu=est.var_of_mean,
        ci_lo=mu - half, ci_hi=mu + half,
        effort_per_path=est.effort_per_path, n_diverged=est.n_diverged,
    )


def weak_error(method, problem, h, n_paths, dists=None, seed=0,
               threads=1) -> WeakErrorRecord:
    """Weak-error record mu_hat = estimate - exact with its 90% interval."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    if method == "exem":
        return exem_weak_error(problem, h, n_paths, dists=dists, seed=seed,
                               threads=threads)
    est = estimate_functional(method, problem, h, n_paths, dists=dists,
                              seed=seed, threads=threads)
    return _record(method_label(method), problem, h, seed, est)


def exem_weak_error(problem, h, n_paths, dists=None, seed=0,
                    threads=1) -> WeakErrorRecord:
    """Extrapolated Euler-Maruyama record at step size h.

    Runs two independent Euler estimations on disjoint substreams, with
    steps h/2 and h, and combines them as 2 E f(Z^(h/2)) - E f(Z^h).  The
    estimates are uncoupled, so the combined variance is exactly
    4 var_fine + var_coarse.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    n = _steps_for(problem, h)
    fine = estimate_functional("euler", problem, h / 2, n_paths, dists=dists,
                               seed=seed, threads=threads, path_offset=0)
    coarse = estimate_functional("euler", problem, h, n_paths, dists=dists,
                                 seed=seed, threads=threads,
                                 path_offset=SUBSTREAM_STRIDE)
    m = problem.sde.m
    est = McEstimate(
        mean=2.0 * fine.mean - coarse.mean,
        var_of_mean=4.0 * fine.var_of_mean + coarse.var_of_mean,
        effort_per_path=float(3 * n * (1 + m)),
        n_paths=n_paths,
        n_diverged=fine.n_diverged + coarse.n_diverged,
    )
    return _record("exem", problem, h, seed, est)


def fit_order(records) -> float | None:
    """Least-squares slope of log2 |mu_hat| against log2 h.

    Only statistically resolved records enter the fit: those with finite
    nonzero mu_hat exceeding three CI half-widths.  Returns None when fewer
    than two records qualify.
    """
    pts = [(math.log2(r.h), math.log2(abs(r.mu_hat))) for r in records
           if math.isfinite(r.mu_hat) and r.mu_hat != 0.0
           and abs(r.mu_hat) > 3.0 * r.ci_half_width]
    if len(pts) < 2:
        return None
    xs, ys = zip(*pts)
    slope = np.polyfit(np.array(xs), np.array(ys), 1)[0]
    return float(slope)


def convergence_study(method, problem, h_list, n_paths, dists=None, seed=0,
                      threads=1):
    """Weak-error records over a descending step-size list plus a fitted order.

    Returns ``(records, fitted_order)`` with ``fitted_order`` None when too
    few points are statistically resolved.
    """
    h_list = list(h_list)
    if len(h_list) < 2:
        raise ValueError("need at least two step sizes")
    if any(h2 >= h1 for h1, h2 in zip(h_list, h_list[1:])):
        raise ValueError("step sizes must be strictly descending")
    records = [weak_error(method, problem, h, n_paths, dists=dists, seed=seed,
                          threads=threads) for h in h_list]
    return records, fit_order(records)
