"""Space-time discretization and its decomposition into subdomains and time blocks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Invalid grid / decomposition parameters."""


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform grid on [0,L]x[0,T]: Nx interior space nodes, Nt time steps.

    Space nodes are indexed 0..Nx+1 with x_i = i*dx; nodes 0 and Nx+1 are the
    physical boundaries.  Time levels are t_l = l*dt for l = 0..Nt.
    """

    L: float
    T: float
    Nx: int
    Nt: int

    @property
    def dx(self) -> float:
        return self.L / (self.Nx + 1)

    @property
    def dt(self) -> float:
        return self.T / self.Nt

    @property
    def n_nodes(self) -> int:
        return self.Nx + 2

    def x(self) -> np.ndarray:
        return np.arange(self.Nx + 2) * self.dx

    def times(self, j: int = 1, J: int = 1) -> np.ndarray:
        """Time samples t_l for block j of J: l in ((j-1)*Nt/J, j*Nt/J]."""
        b = self.Nt // J
        lo = (j - 1) * b
        return (np.arange(lo + 1, lo + b + 1)) * self.dt


def build_grid(L: float, T: float, Nx: int, Nt: int) -> SpaceTimeGrid:
    if L <= 0 or T <= 0:
        raise ConfigurationError(f"domain extents must be positive, got L={L}, T={T}")
    if Nx < 1 or Nt < 1:
        raise ConfigurationError(f"need Nx >= 1 and Nt >= 1, got Nx={Nx}, Nt={Nt}")
    return SpaceTimeGrid(L=float(L), T=float(T), Nx=int(Nx), Nt=int(Nt))


@dataclass(frozen=True)
class Decomposition:
    """N spatial subdomains (interfaces on grid nodes) x J uniform time blocks.

    ``boundary_nodes`` has length N+1: subdomain i (1-based) spans grid nodes
    boundary_nodes[i-1] .. boundary_nodes[i] inclusive, so adjacent subdomains
    share their interface node.
    """

    grid: SpaceTimeGrid
    N: int
    J: int
    boundary_nodes: tuple[int, ...]
    m: int

    @property
    def block_len(self) -> int:
        return self.grid.Nt // self.J

    @property
    def interfaces(self) -> np.ndarray:
        """Interface coordinates x_1 < ... < x_{N-1}."""
        return np.array(self.boundary_nodes[1:-1]) * self.grid.dx

    @property
    def interface_nodes(self) -> tuple[int, ...]:
        return self.boundary_nodes[1:-1]

    def node_span(self, i: int) -> tuple[int, int]:
        """Inclusive global node index range of subdomain i (1-based)."""
        return self.boundary_nodes[i - 1], self.boundary_nodes[i]

    def widths(self) -> np.ndarray:
        b = np.asarray(self.boundary_nodes)
        return np.diff(b) * self.grid.dx

    @property
    def h_min(self) -> float:
        return float(self.widths().min())

    @property
    def h_max(self) -> float:
        return float(self.widths().max())

    @property
    def h_tilde(self) -> float:
        """Minimum subdomain width (used by the convergence bound)."""
        return self.h_min

    @property
    def h_m(self) -> float:
        return float(self.widths()[self.m - 1])


def balanced_interface_nodes(grid: SpaceTimeGrid, N: int) -> tuple[int, ...]:
    """Near-uniform node-aligned interfaces; exact when (Nx+1) % N == 0."""
    return tuple(int(round(i * (grid.Nx + 1) / N)) for i in range(1, N))


def decompose(
    grid: SpaceTimeGrid,
    N: int,
    J: int,
    m_policy: int | str = "middle",
    interface_nodes: tuple[int, ...] | list[int] | None = None,
) -> Decomposition:
    """Split the grid into N subdomains and J time blocks.

    Without an explicit ``interface_nodes`` list the split is uniform, which
    requires (Nx+1) divisible by N.  Explicit interfaces must be strictly
    increasing interior grid node indices.
    """
    if N < 1:
        raise ConfigurationError(f"need N >= 1, got {N}")
    if J < 1 or grid.Nt % J != 0:
        raise ConfigurationError(f"J must divide Nt: J={J}, Nt={grid.Nt}")
    if interface_nodes is None:
        if (grid.Nx + 1) % N != 0:
            raise ConfigurationError(
                f"uniform split needs (Nx+1) % N == 0 (Nx={grid.Nx}, N={N}); "
                "pass explicit interface_nodes otherwise"
            )
        step = (grid.Nx + 1) // N
        nodes = tuple(i * step for i in range(1, N))
    else:
        nodes = tuple(int(v) for v in interface_nodes)
        if len(nodes) != N - 1:
            raise ConfigurationError(f"expected {N - 1} interfaces, got {len(nodes)}")
        if any(not (0 < v < grid.Nx + 1) for v in nodes) or any(
            b <= a for a, b in zip(nodes, nodes[1:])
        ):
            raise ConfigurationError(f"interface nodes must be increasing interior nodes: {nodes}")
    boundary = (0,) + nodes + (grid.Nx + 1,)
    # every subdomain needs >= 3 local nodes for the one-sided flux stencil
    if any(b - a < 2 for a, b in zip(boundary, boundary[1:])):
        raise ConfigurationError(f"subdomain too narrow for 3-node stencils: {boundary}")
    if m_policy == "middle":
        m = math.ceil(N / 2)
    else:
        m = int(m_policy)
        if not 1 <= m <= N:
            raise ConfigurationError(f"pivot m={m} outside 1..{N}")
    return Decomposition(grid=grid, N=N, J=J, boundary_nodes=boundary, m=m)
