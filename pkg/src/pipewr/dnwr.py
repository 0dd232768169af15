"""Dirichlet-Neumann waveform relaxation on the 1D heat equation.

A pivot subdomain m solves a Dirichlet problem on both interfaces; its
one-sided fluxes feed Neumann conditions that propagate outward, while the
computed interface values propagate back inward and are relaxed,

    w_i <- theta * u(x_i) + (1 - theta) * w_i,

where u comes from the subdomain on the Neumann side of the interface.
Three orderings share one per-(subdomain, iterate) task routine and differ
only in which worker runs which task: Naive (one worker per subdomain),
ClassicalPacked (ceil(N/2) or 2K workers running a precomputed schedule
table), and Pipeline (one worker per (subdomain, iterate) streaming J time
blocks).  All orderings perform identical arithmetic in identical order, so
their trace sets agree bitwise.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._common import InitialGuess, SubdomainGeometry, initial_trace_block
from .grid import ConfigurationError, Decomposition, SpaceTimeGrid, decompose
from .heat_core import SubdomainState, advance_block, assemble_factor
from .report import Collector, RunReport, TaskSpan
from .transport import MsgKind, Router, WorkerPool, WrMessage


class DnwrMode(Enum):
    NAIVE = "naive"
    CLASSICAL_PACKED = "classical-packed"
    PIPELINE = "pipeline"


@dataclass(frozen=True)
class DnwrConfig:
    K: int
    theta: float = 0.5
    m: int | None = None  # None -> ceil(N/2)
    tol: float = 1e-8  # reporting only; DNWR always runs all K iterates
    mode: DnwrMode = DnwrMode.NAIVE
    initial_guess: InitialGuess = InitialGuess.INITIAL_CONDITION
    custom_guess: object = None
    timeout: float = 120.0
    record_trace: bool = False
    jitter_seed: int | None = None

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ConfigurationError(f"theta must be in (0, 1], got {self.theta}")
        if self.K < 1:
            raise ConfigurationError(f"need K >= 1, got {self.K}")
        if self.tol < 0.0:
            raise ConfigurationError(f"tol must be >= 0, got {self.tol}")


def update_trace_dnwr(w_old, u_trace, theta, side=None):
    """Relax one interface trace toward the computed interface values.

    ``side`` documents which subdomain supplied ``u_trace`` ("left-of-m"
    means the left subdomain's right edge, "right-of-m" the right
    subdomain's left edge); the arithmetic is the same either way.
    """
    if side not in (None, "left-of-m", "right-of-m"):
        raise ConfigurationError(f"unknown side {side!r}")
    w_old = np.asarray(w_old, dtype=float)
    u_trace = np.asarray(u_trace, dtype=float)
    if w_old.shape != u_trace.shape:
        raise ConfigurationError(f"trace length mismatch: {w_old.shape} vs {u_trace.shape}")
    return theta * u_trace + (1.0 - theta) * w_old


def efficiency_dnwr(N: int, K: int, J: int) -> float:
    """Parallel efficiency of the pipeline ordering with NK cores."""
    _check_pipeline_bound(N, K, J)
    return J / (J + N // 2 + 2 * (K - 1))


def _check_pipeline_bound(N: int, K: int, J: int) -> None:
    bound = math.ceil(N / 2) + (2 * K - 1)
    if J <= bound:
        raise ConfigurationError(
            f"pipeline ordering needs J > ceil(N/2) + (2K-1) = {bound}, got J={J}"
        )


def _held_ifaces(i: int, N: int, m: int) -> list[int]:
    """Interfaces whose trace this subdomain stores and relaxes: the ones it
    uses as its own Dirichlet data."""
    out = []
    if i > 1 and i <= m:
        out.append(i - 1)
    if i < N and i >= m:
        out.append(i)
    return out


def _producer(iface: int, m: int) -> int:
    """Subdomain whose computed values relax the trace at this interface."""
    return iface if iface < m else iface + 1


def _sname(i: int, k: int) -> str:
    return f"S{i}.{k}"


def _dnwr_task(geom: SubdomainGeometry, k: int, cfg: DnwrConfig,
               router: Router, collector: Collector):
    """Solve subdomain i at iterate k over all J time blocks."""
    dec = geom.dec
    i, N, m, K = geom.i, dec.N, dec.m, cfg.K
    J, b = dec.J, dec.block_len
    grid = dec.grid
    me = _sname(i, k)
    held = _held_ifaces(i, N, m)
    left_d = i <= m
    right_d = i >= m
    pattern = ("D" if left_d else "N") + ("D" if right_d else "N")
    factor = assemble_factor(grid.dx, grid.dt, geom.n_loc, pattern)
    state = SubdomainState(geom.u0.copy())
    for j in range(1, J + 1):
        ev0, t0 = collector.next_event(), time.perf_counter()
        w: dict[int, np.ndarray] = {}
        for iface in held:
            if k == 1:
                w[iface] = initial_trace_block(geom.problem, dec, iface, j,
                                               cfg.initial_guess, cfg.custom_guess)
                collector.record_trace(iface, 0, j, w[iface])
            else:
                w_prev = router.recv_match(me, MsgKind.PREV_TRACE, k - 2, j, iface,
                                           _sname(i, k - 1)).payload
                u_raw = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k - 1, j, iface,
                                          _sname(_producer(iface, m), k - 1)).payload
                w[iface] = update_trace_dnwr(w_prev, u_raw, cfg.theta)
                collector.record_trace(iface, k - 1, j, w[iface])
                collector.record_residual(iface, k - 1, j,
                                          float(np.max(np.abs(w[iface] - w_prev))))
        flux_l = flux_r = None
        if i > m:
            flux_l = router.recv_match(me, MsgKind.NEUMANN_FLUX, k, j, i - 1,
                                       _sname(i - 1, k)).payload
        if i < m:
            flux_r = router.recv_match(me, MsgKind.NEUMANN_FLUX, k, j, i,
                                       _sname(i + 1, k)).payload
        if left_d:
            bcl = w[i - 1] if i > 1 else geom.g_left(j)
        else:
            bcl = flux_l
        if right_d:
            bcr = w[i] if i < N else geom.g_right(j)
        else:
            bcr = flux_r
        res = advance_block(state, factor, bcl, bcr, b, forcing=geom.forcing_block(j))

        # fluxes flow outward from the pivot
        if i == m:
            if i > 1:
                router.send(WrMessage(MsgKind.NEUMANN_FLUX, k, j, i - 1,
                                      me, _sname(i - 1, k), res.left_flux))
            if i < N:
                router.send(WrMessage(MsgKind.NEUMANN_FLUX, k, j, i,
                                      me, _sname(i + 1, k), res.right_flux))
        elif i < m:
            if i > 1:
                router.send(WrMessage(MsgKind.NEUMANN_FLUX, k, j, i - 1,
                                      me, _sname(i - 1, k), res.left_flux))
            # computed interface values flow back inward
            if k < K:
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i,
                                      me, _sname(i + 1, k + 1), res.right_values))
            else:
                collector.record_raw(i, k, j, res.right_values)
        else:  # i > m
            if i < N:
                router.send(WrMessage(MsgKind.NEUMANN_FLUX, k, j, i,
                                      me, _sname(i + 1, k), res.right_flux))
            if k < K:
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i - 1,
                                      me, _sname(i - 1, k + 1), res.left_values))
            else:
                collector.record_raw(i - 1, k, j, res.left_values)

        if k < K:
            for iface in held:
                router.send(WrMessage(MsgKind.PREV_TRACE, k - 1, j, iface,
                                      me, _sname(i, k + 1), w[iface]))
        collector.record_span(TaskSpan(me, i, k, j, ev0, collector.next_event(),
                                       t0, time.perf_counter()))


def packed_schedule(N: int, K: int, m: int | None = None) -> list[list[tuple[int, int]]]:
    """Worker-to-task table for the packed classical ordering.

    With 2K >= ceil(N/2) each of ceil(N/2) workers handles two subdomains per
    iterate, pivot-side task first.  Otherwise 2K workers sweep outward from
    the pivot in rounds of 2K subdomains per side.
    """
    if m is None:
        m = math.ceil(N / 2)
    half = math.ceil(N / 2)
    lists: list[list[tuple[int, int]]] = []
    if 2 * K >= half:
        for p in range(1, half + 1):
            tasks: list[tuple[int, int]] = []
            for k in range(1, K + 1):
                if 2 * p < m:
                    first, second = 2 * p, 2 * p - 1
                elif 2 * p - 1 > m:
                    first, second = 2 * p - 1, 2 * p
                elif 2 * p == m:
                    first, second = 2 * p, 2 * p - 1
                else:
                    first, second = 2 * p - 1, 2 * p
                for i in (first, second):
                    if 1 <= i <= N:
                        tasks.append((i, k))
            lists.append(tasks)
    else:
        niter = max(math.ceil((m - 1) / (2 * K)), math.ceil((N - m + 1) / (2 * K)))
        for p in range(1, 2 * K + 1):
            tasks = []
            for r in range(1, niter + 1):
                for k in range(1, K + 1):
                    if p > K:
                        first = m + (r - 1) * 2 * K + 2 * (p - K - 1)
                        second = first + 1
                    else:
                        first = m - (r - 1) * 2 * K + 2 * (p - K - 1) + 1
                        second = first - 1
                    for i in (first, second):
                        if 1 <= i <= N:
                            tasks.append((i, k))
            lists.append(tasks)
    return lists


def run_dnwr(problem, grid: SpaceTimeGrid, N: int, cfg: DnwrConfig, J: int = 1,
             interface_nodes=None) -> RunReport:
    """Run DNWR in the ordering selected by cfg.mode.

    Naive and ClassicalPacked sweep the whole horizon (J must be 1); the
    pipeline ordering streams J time blocks and requires
    J > ceil(N/2) + (2K - 1).
    """
    if N == 1:
        from dataclasses import replace

        from .nnwr import _monolithic_report

        return replace(_monolithic_report(problem, grid, cfg, cfg.mode.value),
                       method="dnwr")
    if cfg.mode is DnwrMode.PIPELINE:
        _check_pipeline_bound(N, cfg.K, J)
    elif J != 1:
        raise ConfigurationError(f"{cfg.mode.value} ordering sweeps the whole horizon; J must be 1")
    m_policy = cfg.m if cfg.m is not None else "middle"
    dec = decompose(grid, N, J, m_policy=m_policy, interface_nodes=interface_nodes)
    K = cfg.K
    router = Router(timeout=cfg.timeout, record_trace=cfg.record_trace,
                    jitter_seed=cfg.jitter_seed)
    collector = Collector(N - 1, K, J, dec.block_len)
    for i in range(1, N + 1):
        for k in range(1, K + 1):
            router.register(_sname(i, k), column=i)
    geoms = {i: SubdomainGeometry(problem, dec, i) for i in range(1, N + 1)}
    pool = WorkerPool(router)

    def run_tasks(tasks):
        for i, k in tasks:
            _dnwr_task(geoms[i], k, cfg, router, collector)

    t0 = time.perf_counter()
    if cfg.mode is DnwrMode.NAIVE:
        for i in range(1, N + 1):
            pool.spawn(f"P{i}", run_tasks, [(i, k) for k in range(1, K + 1)])
    elif cfg.mode is DnwrMode.CLASSICAL_PACKED:
        for p, tasks in enumerate(packed_schedule(N, K, dec.m), start=1):
            pool.spawn(f"P{p}", run_tasks, tasks)
    else:
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                pool.spawn(_sname(i, k), run_tasks, [(i, k)])
    pool.join_all()
    walltime = time.perf_counter() - t0
    router.assert_drained()

    # final relaxation step, assembled from the recorded raw interface values
    for iface in range(1, N):
        for j in range(1, J + 1):
            w_prev = collector.trace_block(iface, K - 1, j)
            u_raw = collector.raw_block(iface, K, j)
            w_fin = update_trace_dnwr(w_prev, u_raw, cfg.theta)
            collector.record_trace(iface, K, j, w_fin)
            collector.record_residual(iface, K, j, float(np.max(np.abs(w_fin - w_prev))))

    residuals = collector.residual_history(K)
    traces = {(iface, k): collector.trace_series(iface, k)
              for iface in range(1, N) for k in range(0, K + 1)}
    return RunReport(
        method="dnwr",
        variant=cfg.mode.value,
        N=N,
        K=K,
        J=J,
        Nx=grid.Nx,
        Nt=grid.Nt,
        theta=cfg.theta,
        tol=cfg.tol,
        iterations=K,
        converged=bool(residuals[-1] < cfg.tol),
        residuals=residuals,
        traces=traces,
        counters=router.counter.as_dict(),
        walltime=walltime,
        timeline=collector.timeline,
        msg_trace=router.trace or [],
    )
