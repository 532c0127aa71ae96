"""Ground-truth solver on a truncated quadrant.

The hitting probability ``u(i, j) = P[(X,Y) hits the vertical axis before
the horizontal axis minus the origin | start (i, j)]`` is the discrete
harmonic function with boundary data ``u(0, j) = 1`` and ``u(i, 0) = 0``
for ``i >= 1``.  Truncating the quadrant at ``i = nx`` / ``j = ny`` and
clamping the artificial far boundary once to 0 and once to 1 yields grids
that bracket the infinite-domain value from below and above (monotone
coupling in the boundary data), so the truncation error is rigorously
two-sided without any tail analysis.

The linear systems are assembled sparsely and solved either directly
(small grids) or by algebraic multigrid with a Krylov accelerator; the
reported residual is the maximum harmonicity defect of the returned grid,
which is what the bracket argument needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, NonConvergence
from .walk import StepDistribution

_DIRECT_LIMIT = 150_000   # unknown count up to which a direct factorization is used


@dataclass(frozen=True)
class GridSolve:
    """One Dirichlet solve: full value grid plus solver diagnostics."""

    values: np.ndarray        # shape (nx+1, ny+1), boundary rows filled in
    iterations: int
    residual: float           # max interior harmonicity defect


@dataclass(frozen=True)
class GridSolution:
    """Bracketing pair of Dirichlet solves on the same truncation."""

    nx: int
    ny: int
    lower: np.ndarray         # far boundary clamped to 0
    upper: np.ndarray         # far boundary clamped to 1
    iterations: int
    residual: float

    def bracket(self, i0: int, j0: int) -> tuple[float, float]:
        if not (1 <= i0 < self.nx and 1 <= j0 < self.ny):
            raise DomainError(
                f"start ({i0},{j0}) outside the interior of a "
                f"{self.nx}x{self.ny} truncation")
        return float(self.lower[i0, j0]), float(self.upper[i0, j0])

    def midpoint(self, i0: int, j0: int) -> float:
        lo, hi = self.bracket(i0, j0)
        return 0.5 * (lo + hi)

    def width(self, i0: int, j0: int) -> float:
        lo, hi = self.bracket(i0, j0)
        return hi - lo


def _is_symmetric_walk(p: StepDistribution) -> bool:
    return all(abs(p.prob(di, dj) - p.prob(-di, -dj)) == 0.0 for (di, dj), _ in p.steps)


def _assemble(p: StepDistribution, nx: int, ny: int):
    """Sparse interior operator ``I - Q`` plus boundary accumulators.

    Returns ``(A, b_axis, b_far)`` where the right-hand side of a solve
    with far boundary value ``v`` is ``b_axis + v * b_far``.
    """
    mi, mj = nx - 1, ny - 1
    n = mi * mj
    ii, jj = np.meshgrid(np.arange(1, nx), np.arange(1, ny), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    k = (ii - 1) * mj + (jj - 1)

    rows, cols, data = [np.arange(n)], [np.arange(n)], [np.ones(n)]
    b_axis = np.zeros(n)
    b_far = np.zeros(n)

    for (di, dj), prob in p.steps:
        if prob == 0.0:
            continue
        ni, nj = ii + di, jj + dj
        interior = (ni >= 1) & (ni <= mi) & (nj >= 1) & (nj <= mj)
        rows.append(k[interior])
        cols.append((ni[interior] - 1) * mj + (nj[interior] - 1))
        data.append(np.full(interior.sum(), -prob))
        boundary = ~interior
        hit_v = boundary & (ni == 0)                     # vertical axis: value 1
        hit_far = boundary & ~hit_v & ((ni == nx) | (nj == ny)) & (nj != 0)
        # horizontal axis (nj == 0, ni >= 1) contributes value 0
        np.add.at(b_axis, k[hit_v], prob)
        np.add.at(b_far, k[hit_far], prob)

    A = sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n))
    return A, b_axis, b_far


class _LinearSolver:
    """Direct factorization for small systems, AMG + Krylov for large."""

    def __init__(self, A: sp.csr_matrix, symmetric: bool):
        self.A = A
        self.n = A.shape[0]
        self.symmetric = symmetric
        if self.n <= _DIRECT_LIMIT:
            self._lu = spla.splu(A.tocsc())
            self._ml = None
        else:
            import pyamg

            self._lu = None
            # classical AMG coarsens well for the symmetric (diffusive)
            # stencils; the transport-dominated nonsymmetric ones need AIR
            if symmetric:
                self._ml = pyamg.ruge_stuben_solver(A)
            else:
                self._ml = pyamg.air_solver(A)

    def solve(self, b: np.ndarray, tol: float) -> tuple[np.ndarray, int]:
        if self._lu is not None:
            return self._lu.solve(b), 1
        scale = max(np.linalg.norm(b), 1e-300)
        rel_tol = min(1e-12, 0.01 * tol / scale)
        accels = ("cg",) if self.symmetric else ("bicgstab", "gmres")
        best = None
        for accel in accels:
            residuals: list[float] = []
            with np.errstate(invalid="ignore", divide="ignore"):
                x = self._ml.solve(b, tol=rel_tol, maxiter=400, accel=accel,
                                   residuals=residuals)
            if not np.all(np.isfinite(x)):
                continue  # Krylov breakdown; retry with the next accelerator
            res = float(np.max(np.abs(b - self.A @ x)))
            if best is None or res < best[2]:
                best = (x, len(residuals), res)
            if res <= tol:
                break
        if best is None:
            raise NonConvergence(
                f"all Krylov accelerators broke down on a {self.n}-unknown system")
        return best[0], best[1]


def _residual(A, x, b) -> float:
    return float(np.max(np.abs(b - A @ x))) if len(b) else 0.0


def _fill_grid(x: np.ndarray, nx: int, ny: int, far_bc: float) -> np.ndarray:
    grid = np.empty((nx + 1, ny + 1))
    grid[0, :] = 1.0
    grid[1:, 0] = 0.0
    grid[1:, ny] = far_bc
    grid[nx, 1:] = far_bc
    grid[1:nx, 1:ny] = x.reshape(nx - 1, ny - 1)
    return grid


def _check_sizes(nx: int, ny: int, tol: float):
    if nx < 4 or ny < 4:
        raise DomainError("truncation sizes must be at least 4")
    if not (0.0 < tol <= 1e-8):
        raise DomainError("tolerance must lie in (0, 1e-8]")


def solve_dp(p: StepDistribution, nx: int, ny: int, far_bc: float,
             tol: float = 1e-10) -> GridSolve:
    """Solve the discrete Dirichlet problem on one truncated quadrant.

    ``far_bc`` (0 or 1) is the value clamped on the artificial boundary
    rows ``i = nx`` and ``j = ny``.  Raises ``NonConvergence`` when the
    harmonicity residual cannot be pushed below ``tol``.
    """
    _check_sizes(nx, ny, tol)
    if far_bc not in (0, 1, 0.0, 1.0):
        raise DomainError("far boundary value must be 0 or 1")
    A, b_axis, b_far = _assemble(p, nx, ny)
    solver = _LinearSolver(A, _is_symmetric_walk(p))
    b = b_axis + float(far_bc) * b_far
    x, iters = solver.solve(b, tol)
    res = _residual(A, x, b)
    if res > tol:
        raise NonConvergence(
            f"harmonicity residual {res:.3e} above tolerance {tol:.1e} "
            f"on a {nx}x{ny} grid")
    return GridSolve(values=_fill_grid(x, nx, ny, float(far_bc)),
                     iterations=iters, residual=res)


def solve_bracket(p: StepDistribution, nx: int, ny: int,
                  tol: float = 1e-10) -> GridSolution:
    """Both bracketing solves; the assembly and factorization are shared."""
    _check_sizes(nx, ny, tol)
    A, b_axis, b_far = _assemble(p, nx, ny)
    solver = _LinearSolver(A, _is_symmetric_walk(p))
    x_lo, it_lo = solver.solve(b_axis, tol)
    x_hi, it_hi = solver.solve(b_axis + b_far, tol)
    res = max(_residual(A, x_lo, b_axis), _residual(A, x_hi, b_axis + b_far))
    if res > tol:
        raise NonConvergence(
            f"harmonicity residual {res:.3e} above tolerance {tol:.1e} "
            f"on a {nx}x{ny} grid")
    lower = _fill_grid(x_lo, nx, ny, 0.0)
    upper = _fill_grid(x_hi, nx, ny, 1.0)
    return GridSolution(nx=nx, ny=ny, lower=lower, upper=upper,
                        iterations=it_lo + it_hi, residual=res)


def _sizes(n) -> tuple[int, int]:
    if isinstance(n, tuple):
        return int(n[0]), int(n[1])
    return int(n), int(n)


def bracket_probability(p: StepDistribution, i0: int, j0: int, n,
                        tol: float = 1e-10) -> tuple[float, float]:
    """Rigorous two-sided bounds on the hitting probability from (i0, j0).

    ``n`` is the truncation size (an integer for a square grid or an
    ``(nx, ny)`` pair); the start must be interior to the truncation.
    """
    nx, ny = _sizes(n)
    if not (1 <= i0 < nx and 1 <= j0 < ny):
        raise DomainError(f"start ({i0},{j0}) must satisfy 1 <= i0 < nx, 1 <= j0 < ny")
    return solve_bracket(p, nx, ny, tol).bracket(i0, j0)


# ---------------------------------------------------------------------------
# Exit distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExitDistribution:
    """Exit-point masses of the absorbed walk from a fixed start.

    ``h[i]`` is the probability of first hitting the boundary at ``(i, 0)``
    (horizontal axis, ``i >= 1``); ``htilde[j]`` of first hitting at
    ``(0, j)`` (vertical axis, ``j >= 1``); ``h00`` at the origin.  Index 0
    of both arrays is unused.  ``far_loss`` is the mass absorbed by the
    artificial far boundary, which bounds the truncation deficit of every
    reported mass.
    """

    h: np.ndarray
    htilde: np.ndarray
    h00: float
    far_loss: float

    def h_gen(self, x):
        """Generating function ``sum_i h[i] x^i`` of horizontal exits.

        The masses are attached to ``x^i`` (not ``x^(i-1)``); this is the
        convention under which the kernel functional equation
        ``h(x) + htilde(y) + h00 = x^i0 y^j0`` holds on the zero set of
        the kernel, and the one the contour representation produces.
        """
        powers = np.power(np.asarray(x, dtype=complex), np.arange(1, len(self.h)))
        return np.dot(self.h[1:], powers)

    def htilde_gen(self, y):
        """Generating function ``sum_j htilde[j] y^j`` of vertical exits."""
        powers = np.power(np.asarray(y, dtype=complex), np.arange(1, len(self.htilde)))
        return np.dot(self.htilde[1:], powers)

    def total_mass(self) -> float:
        return float(self.h[1:].sum() + self.htilde[1:].sum() + self.h00)


def exit_distribution(p: StepDistribution, i0: int, j0: int, n,
                      tol: float = 1e-10) -> ExitDistribution:
    """Full exit-point distribution from ``(i0, j0)`` on a truncation.

    Solves the transposed system once for the expected-visits (Green)
    row of the start state and pushes it through one boundary step.
    """
    nx, ny = _sizes(n)
    if not (1 <= i0 < nx and 1 <= j0 < ny):
        raise DomainError(f"start ({i0},{j0}) must satisfy 1 <= i0 < nx, 1 <= j0 < ny")
    _check_sizes(nx, ny, tol)
    A, _, _ = _assemble(p, nx, ny)
    At = A.T.tocsr()
    solver = _LinearSolver(At, _is_symmetric_walk(p))
    mj = ny - 1
    e = np.zeros(A.shape[0])
    e[(i0 - 1) * mj + (j0 - 1)] = 1.0
    visits, _ = solver.solve(e, tol)
    res = _residual(At, visits, e)
    if res > tol:
        raise NonConvergence(f"Green-row residual {res:.3e} above {tol:.1e}")
    # zero-padded visit grid over states (i, j), interior occupied
    vg = np.zeros((nx + 1, ny + 1))
    vg[1:nx, 1:ny] = visits.reshape(nx - 1, mj)

    h = np.zeros(nx + 1)
    idx = np.arange(1, nx + 1)
    h[idx] = (p.prob(1, -1) * vg[np.clip(idx - 1, 0, nx), 1]
              + p.prob(0, -1) * vg[np.clip(idx, 0, nx), 1]
              + p.prob(-1, -1) * vg[np.clip(idx + 1, 0, nx), 1])

    htilde = np.zeros(ny + 1)
    jdx = np.arange(1, ny + 1)
    htilde[jdx] = (p.prob(-1, 1) * vg[1, np.clip(jdx - 1, 0, ny)]
                   + p.prob(-1, 0) * vg[1, np.clip(jdx, 0, ny)]
                   + p.prob(-1, -1) * vg[1, np.clip(jdx + 1, 0, ny)])

    h00 = float(p.prob(-1, -1) * vg[1, 1])
    total = float(h[1:].sum() + htilde[1:].sum() + h00)
    return ExitDistribution(h=h, htilde=htilde, h00=h00,
                            far_loss=max(0.0, 1.0 - total))
