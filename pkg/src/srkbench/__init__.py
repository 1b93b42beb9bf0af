"""Stochastic Runge-Kutta methods for weak approximation of SDEs with
additive noise: schemes and order-condition checks, increment laws, the
benchmark problems, and a reproducible Monte Carlo error harness."""

from .increments import (GAUSSIAN, D3, D5, D7, ZERO, IncrementDistribution,
                         distribution_pair, moment, required_distributions,
                         sample)
from .integrate import (DivergenceError, PathState, StepCounters,
                        euler_maruyama_step, simulate_path, srk_step)
from .rng import PathStream, uniforms
from .sde import (AdditiveNoiseSde, ReferenceProblem, custom_sde, ex1, ex2,
                  ex3, get_problem)
from .tableau import (OrderReport, SrkTableau, TableauParseError, an3d1,
                      check_deterministic_order, check_stochastic_order,
                      euler_maruyama_tableau, load_tableau)
from .trees import (ColoredTree, density, enumerate_tadd, f_root, format_tree,
                    leaf, relevant_f_trees, rho, shape_families)
from .weak_mc import (McEstimate, WeakErrorRecord, convergence_study, effort,
                      estimate_functional, exem_weak_error, fit_order,
                      weak_error)

__version__ = "0.1.0"

__all__ = [
    "AdditiveNoiseSde", "ColoredTree", "D3", "D5", "D7", "DivergenceError",
    "GAUSSIAN", "IncrementDistribution", "McEstimate", "OrderReport",
    "PathState", "PathStream", "ReferenceProblem", "SrkTableau",
    "StepCounters", "TableauParseError", "WeakErrorRecord", "ZERO", "an3d1",
    "check_deterministic_order", "check_stochastic_order",
    "convergence_study", "custom_sde", "density", "distribution_pair",
    "effort", "enumerate_tadd", "estimate_functional",
    "euler_maruyama_step", "euler_maruyama_tableau", "ex1", "ex2", "ex3",
    "exem_weak_error", "f_root", "fit_order", "format_tree", "get_problem",
    "leaf", "load_tableau", "moment", "relevant_f_trees",
    "required_distributions", "rho", "sample", "shape_families",
    "simulate_path", "srk_step", "uniforms", "weak_error",
]
