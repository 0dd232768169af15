"""Backward-Euler kernels for one subdomain of the 1D heat equation.

A subdomain owns a contiguous run of global grid nodes including both of its
endpoint nodes.  Each endpoint carries either a Dirichlet condition (value
series, endpoint excluded from the unknowns) or a Neumann condition (flux
series signed in +x, endpoint kept as an unknown via ghost-point elimination).
The implicit matrix (I - dt*A) is tridiagonal and pre-factored once per
boundary pattern; every step is a forward/backward substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

DIRICHLET = 0
NEUMANN = 1

_PATTERNS = ("DD", "DN", "ND", "NN")


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class TriFactor:
    """Prefactored LU of the implicit tridiagonal matrix for one pattern.

    ``low`` holds the forward-elimination multipliers, ``diag`` the pivots,
    ``sup`` the (unchanged) superdiagonal.  ``lo``/``hi`` are the local node
    indices of the first/last unknown.
    """

    pattern: str
    n_loc: int
    dx: float
    dt: float
    low: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    @property
    def r(self) -> float:
        return self.dt / self.dx**2

    @property
    def left_code(self) -> int:
        return DIRICHLET if self.pattern[0] == "D" else NEUMANN

    @property
    def right_code(self) -> int:
        return DIRICHLET if self.pattern[1] == "D" else NEUMANN

    @property
    def lo(self) -> int:
        return 1 if self.left_code == DIRICHLET else 0

    @property
    def hi(self) -> int:
        return self.n_loc - 2 if self.right_code == DIRICHLET else self.n_loc - 1


@dataclass
class SubdomainState:
    """Current node values on a subdomain's local grid (endpoints included)."""

    u: np.ndarray
    t_index: int = 0


def assemble_matrix(dx: float, dt: float, n_loc: int, pattern: str) -> tuple[np.ndarray, ...]:
    """Raw (sub, diag, sup) bands of (I - dt*A) over the unknown nodes."""
    if pattern not in _PATTERNS:
        raise KernelError(f"unknown boundary pattern {pattern!r}")
    if n_loc < 3:
        raise KernelError(f"subdomain needs >= 3 local nodes, got {n_loc}")
    m = n_loc - (pattern[0] == "D") - (pattern[1] == "D")
    if m < 1:
        raise KernelError(f"no unknowns for pattern {pattern} with {n_loc} nodes")
    r = dt / dx**2
    diag = np.full(m, 1.0 + 2.0 * r)
    sub = np.full(m, -r)
    sup = np.full(m, -r)
    if pattern[0] == "N":
        sup[0] = -2.0 * r  # ghost-point elimination doubles the coupling
    if pattern[1] == "N":
        sub[m - 1] = -2.0 * r
    sub[0] = 0.0
    sup[m - 1] = 0.0
    return sub, diag, sup


def assemble_factor(dx: float, dt: float, n_loc: int, pattern: str) -> TriFactor:
    sub, diag, sup = assemble_matrix(dx, dt, n_loc, pattern)
    m = diag.shape[0]
    low = np.zeros(m)
    piv = diag.copy()
    for p in range(1, m):
        low[p] = sub[p] / piv[p - 1]
        piv[p] = diag[p] - low[p] * sup[p - 1]
    if np.any(piv <= 0):
        raise KernelError("non-positive pivot in tridiagonal factorization")
    return TriFactor(pattern=pattern, n_loc=n_loc, dx=dx, dt=dt, low=low, diag=piv, sup=sup)


@njit(cache=True, nogil=True)
def _advance_kernel(
    u,
    nsteps,
    lo,
    hi,
    low,
    diag,
    sup,
    r,
    dx,
    dt,
    left_code,
    right_code,
    left_series,
    right_series,
    f_series,
    use_forcing,
    lval,
    rval,
    lflux,
    rflux,
    sol,
    store_sol,
):
    n = u.shape[0]
    m = hi - lo + 1
    y = np.empty(m)
    two_dt_over_dx = 2.0 * dt / dx
    for s in range(nsteps):
        for p in range(m):
            y[p] = u[lo + p]
        if use_forcing:
            for p in range(m):
                y[p] += dt * f_series[s, lo + p]
        gl = left_series[s]
        gr = right_series[s]
        if left_code == 0:
            y[0] += r * gl
        else:
            y[0] -= two_dt_over_dx * gl
        if right_code == 0:
            y[m - 1] += r * gr
        else:
            y[m - 1] += two_dt_over_dx * gr
        for p in range(1, m):
            y[p] -= low[p] * y[p - 1]
        y[m - 1] /= diag[m - 1]
        for p in range(m - 2, -1, -1):
            y[p] = (y[p] - sup[p] * y[p + 1]) / diag[p]
        for p in range(m):
            u[lo + p] = y[p]
        if left_code == 0:
            u[0] = gl
        if right_code == 0:
            u[n - 1] = gr
        lval[s] = u[0]
        rval[s] = u[n - 1]
        lflux[s] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
        rflux[s] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx)
        if store_sol:
            for p in range(n):
                sol[s, p] = u[p]


@dataclass
class BlockResult:
    """Per-step endpoint values and one-sided fluxes over one time block."""

    left_values: np.ndarray
    right_values: np.ndarray
    left_flux: np.ndarray
    right_flux: np.ndarray
    solution: np.ndarray | None = None


def advance_block(
    state: SubdomainState,
    factor: TriFactor,
    bc_left: np.ndarray,
    bc_right: np.ndarray,
    nsteps: int,
    forcing: np.ndarray | None = None,
    store_solution: bool = False,
) -> BlockResult:
    """Advance ``nsteps`` backward-Euler steps in place.

    ``bc_left``/``bc_right`` are per-step series: Dirichlet values or signed
    +x Neumann fluxes depending on the factor's pattern.
    """
    n = factor.n_loc
    if state.u.shape[0] != n:
        raise KernelError(f"state has {state.u.shape[0]} nodes, factor expects {n}")
    bc_left = np.ascontiguousarray(bc_left, dtype=np.float64)
    bc_right = np.ascontiguousarray(bc_right, dtype=np.float64)
    if bc_left.shape[0] != nsteps or bc_right.shape[0] != nsteps:
        raise KernelError(
            f"boundary series length mismatch: need {nsteps}, "
            f"got {bc_left.shape[0]} / {bc_right.shape[0]}"
        )
    use_forcing = forcing is not None
    if use_forcing:
        forcing = np.ascontiguousarray(forcing, dtype=np.float64)
        if forcing.shape != (nsteps, n):
            raise KernelError(f"forcing must have shape {(nsteps, n)}, got {forcing.shape}")
    else:
        forcing = np.zeros((1, 1))
    lval = np.empty(nsteps)
    rval = np.empty(nsteps)
    lflux = np.empty(nsteps)
    rflux = np.empty(nsteps)
    sol = np.empty((nsteps, n)) if store_solution else np.empty((1, 1))
    _advance_kernel(
        state.u,
        nsteps,
        factor.lo,
        factor.hi,
        factor.low,
        factor.diag,
        factor.sup,
        factor.r,
        factor.dx,
        factor.dt,
        factor.left_code,
        factor.right_code,
        bc_left,
        bc_right,
        forcing,
        use_forcing,
        lval,
        rval,
        lflux,
        rflux,
        sol,
        store_solution,
    )
    state.t_index += nsteps
    return BlockResult(
        left_values=lval,
        right_values=rval,
        left_flux=lflux,
        right_flux=rflux,
        solution=sol if store_solution else None,
    )


def extract_flux(u: np.ndarray, side: str, dx: float) -> float:
    """Second-order one-sided du/dx at an endpoint, signed in +x."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] < 3:
        raise KernelError("flux stencil needs >= 3 nodes")
    if side == "left":
        return (-3.0 * u[..., 0] + 4.0 * u[..., 1] - u[..., 2]) / (2.0 * dx)
    if side == "right":
        return (3.0 * u[..., -1] - 4.0 * u[..., -2] + u[..., -3]) / (2.0 * dx)
    raise KernelError(f"side must be 'left' or 'right', got {side!r}")
