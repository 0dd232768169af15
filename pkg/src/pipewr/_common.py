"""Shared pieces of the two waveform-relaxation drivers."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .grid import ConfigurationError, Decomposition
from .problem import HeatProblem


class InitialGuess(Enum):
    INITIAL_CONDITION = "initial-condition"
    ZERO = "zero"
    CUSTOM = "custom"


def initial_trace_block(
    problem: HeatProblem,
    dec: Decomposition,
    iface: int,
    j: int,
    guess: InitialGuess,
    custom=None,
) -> np.ndarray:
    """Samples of the initial interface guess w^[0] over time block j."""
    b = dec.block_len
    if guess is InitialGuess.ZERO:
        return np.zeros(b)
    if guess is InitialGuess.INITIAL_CONDITION:
        xi = dec.interfaces[iface - 1]
        return np.full(b, float(problem.ic(np.array([xi]))[0]))
    if custom is None:
        raise ConfigurationError("custom initial guess requires a callable (iface, t) -> values")
    vals = np.asarray(custom(iface, dec.grid.times(j, dec.J)), dtype=float)
    if vals.shape != (b,):
        raise ConfigurationError(f"custom guess returned shape {vals.shape}, expected ({b},)")
    return vals


class SubdomainGeometry:
    """Local grid, initial data, and boundary samplers for one subdomain."""

    def __init__(self, problem: HeatProblem, dec: Decomposition, i: int):
        a, b = dec.node_span(i)
        self.i = i
        self.problem = problem
        self.dec = dec
        self.x = dec.grid.x()[a : b + 1]
        self.n_loc = b - a + 1
        self.u0 = np.asarray(problem.ic(self.x), dtype=float)

    def g_left(self, j: int) -> np.ndarray:
        t = self.dec.grid.times(j, self.dec.J)
        return np.asarray(self.problem.g_left(t), dtype=float) * np.ones_like(t)

    def g_right(self, j: int) -> np.ndarray:
        t = self.dec.grid.times(j, self.dec.J)
        return np.asarray(self.problem.g_right(t), dtype=float) * np.ones_like(t)

    def forcing_block(self, j: int) -> np.ndarray | None:
        f = self.problem.forcing
        if f is None:
            return None
        t = self.dec.grid.times(j, self.dec.J)
        return np.asarray(f(self.x[None, :], t[:, None]), dtype=float)
