"""Reference solutions and convergence-bound evaluators used by the tests.

Everything here is independent of the relaxation drivers: a monolithic
backward-Euler solve of the undecomposed problem, a truncated Fourier series
for the benchmark initial condition, and closed-form superlinear bound
right-hand sides for both relaxation variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .grid import ConfigurationError, SpaceTimeGrid
from .heat_core import SubdomainState, advance_block, assemble_factor
from .problem import HeatProblem


def solve_monolithic(problem: HeatProblem, grid: SpaceTimeGrid) -> np.ndarray:
    """Backward-Euler solve on the whole domain.

    Returns an array of shape (Nt+1, Nx+2); row 0 is the initial condition.
    Uses the same stepping kernel as the subdomain sweeps, so a one-subdomain
    relaxation run reproduces it bitwise.
    """
    x = grid.x()
    state = SubdomainState(np.asarray(problem.ic(x), dtype=float))
    factor = assemble_factor(grid.dx, grid.dt, grid.n_nodes, "DD")
    t = grid.times()
    gl = np.asarray(problem.g_left(t), dtype=float) * np.ones_like(t)
    gr = np.asarray(problem.g_right(t), dtype=float) * np.ones_like(t)
    forcing = None
    if problem.forcing is not None:
        forcing = np.asarray(problem.forcing(x[None, :], t[:, None]), dtype=float)
    res = advance_block(state, factor, gl, gr, grid.Nt, forcing=forcing,
                        store_solution=True)
    out = np.empty((grid.Nt + 1, grid.n_nodes))
    out[0] = np.asarray(problem.ic(x), dtype=float)
    out[1:] = res.solution
    return out


@dataclass(frozen=True)
class FourierSolution:
    """Truncated sine series for the benchmark problem on [0,1]:
    u(x,0) = (x-0.5)^2 - 0.25 with homogeneous Dirichlet ends."""

    M: int

    def coefficient(self, n: int) -> float:
        # b_n = 2 * integral_0^1 ((x-1/2)^2 - 1/4) sin(n pi x) dx
        #     = -8/(n pi)^3 for odd n, 0 for even n
        if n % 2 == 0:
            return 0.0
        return -8.0 / (n * math.pi) ** 3

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.zeros(np.broadcast(x, t).shape)
        for n in range(1, self.M + 1, 2):
            out += self.coefficient(n) * np.exp(-((n * math.pi) ** 2) * t) * np.sin(n * math.pi * x)
        return out

    def tail_bound(self) -> float:
        """Upper bound on the dropped modes' magnitude at t=0."""
        # sum over odd n > M of 8/(n pi)^3 <= (8/pi^3) * integral
        return 8.0 / math.pi**3 / (2 * max(self.M, 1) ** 2)


def fourier_exact(x, t, M: int = 201):
    if M < 1:
        raise ConfigurationError(f"need M >= 1 Fourier modes, got {M}")
    return FourierSolution(M)(x, t)


def nnwr_bound(k: int, h_tilde: float, T: float, err0: float) -> float:
    """Superlinear error bound for the Neumann-Neumann variant at theta=1/4:
    (sqrt(6) / (1 - e^{-(2k+1) h^2 / T}))^{2k} * e^{-k^2 h^2 / T} * err0,
    evaluated in log space to survive extreme arguments."""
    if k < 1 or h_tilde <= 0 or T <= 0:
        raise ConfigurationError(f"bad bound arguments k={k}, h={h_tilde}, T={T}")
    if err0 == 0.0:
        return 0.0
    a = h_tilde**2 / T
    log_val = 2 * k * (0.5 * math.log(6.0) - math.log1p(-math.exp(-(2 * k + 1) * a)))
    log_val -= k * k * a
    return math.exp(log_val) * err0


def dnwr_bound(k: int, N: int, h_min: float, h_max: float, h_m: float,
               T: float, err0: float) -> float:
    """Superlinear error bound for the Dirichlet-Neumann variant at
    theta=1/2 with the middle pivot: (N - 4 + 2 h_max/h_m)^k *
    erfc(k h_min / (2 sqrt(T))) * err0.  Only stated for N > 2."""
    if N <= 2:
        raise ConfigurationError(f"the bound is stated for N > 2, got N={N}")
    if k < 0 or min(h_min, h_max, h_m) <= 0 or T <= 0:
        raise ConfigurationError("bad bound arguments")
    if err0 == 0.0:
        return 0.0
    base = N - 4.0 + 2.0 * h_max / h_m
    return base**k * float(erfc(k * h_min / (2.0 * math.sqrt(T)))) * err0
