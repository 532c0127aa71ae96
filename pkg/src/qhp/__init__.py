"""Hitting probabilities of nearest-neighbor random walks in the quarter plane.

The package computes the probability that a walk started at ``(i0, j0)``
reaches the vertical axis (origin included) strictly before the
horizontal axis minus the origin, by four independent routes:

* exact Dirichlet solves on truncated grids with rigorous two-sided
  truncation brackets (:mod:`qhp.oracle`),
* a contour-integral representation built from the kernel's branch
  structure and a conformal gluing function (:mod:`qhp.integral`),
* closed-form asymptotic laws in the large-``i0`` regimes
  (:mod:`qhp.asymptotics`),
* reproducible Monte Carlo with censoring-aware brackets
  (:mod:`qhp.montecarlo`).

The routes cross-validate each other; see the test suite and the
``demos/`` scripts for worked examples.
"""

from .errors import (ClassError, DomainError, NoExplicitGluing,
                     NonConvergence, PoleError, PoleOnPath, QhpError,
                     ValidationError)
from .walk import (AssumptionReport, DriftVector, Regime, StepDistribution,
                   WalkClass, classify, drift, dumps_walk, load_walk,
                   loads_walk, preset, random_zero_drift, validate)
from .kernel import (Approach, BranchPoints, BranchValue, KernelAlgebra,
                     algebra, beta_ratio, branch_points, branch_X, branch_Y,
                     kernel_eval, mu, second_moments, theta)
from .gluing import (GluingFunction, GluingKind, GluingReport, build_gluing,
                     pole_exponent_estimate, pole_limit_at_x2,
                     unit_disc_gluing, verify_gluing, w_derivative, w_eval)
from .integral import (HittingResult, QuadratureConfig, QuadratureRule,
                       h_at_one, h_at_x, hit_probability)
from .asymptotics import (AsymptoticLaw, asymptotic_law,
                          asymptotic_probability, beta0_constant, constant_A,
                          constant_B, constant_D, continuum_constant,
                          continuum_probability, rho)
from .oracle import (ExitDistribution, GridSolution, GridSolve,
                     bracket_probability, exit_distribution, solve_bracket,
                     solve_dp)
from .montecarlo import SimulationEstimate, simulate

__version__ = "0.1.0"
