"""Waveform-relaxation solvers for the 1D heat equation, in classical and
pipeline-parallel orderings, with message accounting and an exact schedule
simulator."""

from ._common import InitialGuess
from .dnwr import DnwrConfig, DnwrMode, efficiency_dnwr, packed_schedule, run_dnwr, update_trace_dnwr
from .grid import ConfigurationError, Decomposition, SpaceTimeGrid, balanced_interface_nodes, build_grid, decompose
from .heat_core import BlockResult, KernelError, SubdomainState, TriFactor, advance_block, assemble_factor, extract_flux
from .nnwr import NnwrConfig, NnwrMode, peak_efficiency_nnwr, run_classical, run_pipeline, update_traces
from .oracle import FourierSolution, dnwr_bound, fourier_exact, nnwr_bound, solve_monolithic
from .problem import HeatProblem, model_problem
from .report import Collector, RunReport, TaskSpan
from .schedule import ScheduleError, TaskDag, build_dag, canonical_assignment, efficiency_sweep, simulate, theoretical_efficiency, theoretical_vs_simulated
from .transport import DeadlockError, MsgCounter, MsgKind, Router, TransportError, WorkerPool, WrMessage

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
