"""Problem definition for the 1D heat equation u_t = u_xx on [0,L]x[0,T]."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class HeatProblem:
    """Initial/boundary data for u_t - u_xx = f on [0,L]x[0,T].

    ``ic``, ``g_left``, ``g_right`` are vectorized callables; ``forcing`` is
    either None (no forcing) or a callable f(x, t) accepting arrays.
    """

    L: float
    T: float
    ic: Callable[[np.ndarray], np.ndarray]
    g_left: Callable[[np.ndarray], np.ndarray] = field(default=_zero)
    g_right: Callable[[np.ndarray], np.ndarray] = field(default=_zero)
    forcing: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None


def model_problem() -> HeatProblem:
    """The reference benchmark: u(x,0) = (x-0.5)^2 - 0.25 on [0,1]x[0,0.1],
    homogeneous Dirichlet boundaries, no forcing."""
    return HeatProblem(
        L=1.0,
        T=0.1,
        ic=lambda x: (x - 0.5) ** 2 - 0.25,
    )
