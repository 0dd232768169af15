"""Neumann-Neumann waveform relaxation on the 1D heat equation.

Each iterate solves a Dirichlet subproblem per subdomain using the current
interface traces, then an auxiliary Neumann subproblem driven by the jump in
the one-sided interface fluxes, and relaxes the traces

    w_i <- w_i - theta * (psi_i(x_i) + psi_{i+1}(x_i)).

Two orderings are provided: classical (one worker per subdomain, whole time
horizon per iterate, optional early stopping) and pipeline (the time window
is cut into J blocks and iterates overlap; 2NK logical workers when J >= 2K,
NJ workers otherwise).  Both orderings perform the identical arithmetic in
the identical order per subdomain, so their results agree bitwise.
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

J_END = 0  # block tag used for whole-horizon (classical) messages


class NnwrMode(Enum):
    CLASSICAL = "classical"
    PIPELINE = "pipeline"


@dataclass(frozen=True)
class NnwrConfig:
    K: int
    theta: float = 0.25
    tol: float = 1e-8
    mode: NnwrMode = NnwrMode.CLASSICAL
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
            raise ConfigurationError(f"tol must be >= 0 (0 forces all K iterates), got {self.tol}")


def update_traces(w_old, psi_left_at_xi, psi_right_at_xi, theta):
    """Relax one interface trace: w - theta*(psi from the left subdomain +
    psi from the right subdomain), both evaluated at the interface."""
    w_old = np.asarray(w_old, dtype=float)
    pl = np.asarray(psi_left_at_xi, dtype=float)
    pr = np.asarray(psi_right_at_xi, dtype=float)
    if w_old.shape != pl.shape or w_old.shape != pr.shape:
        raise ConfigurationError(
            f"trace/psi length mismatch: {w_old.shape}, {pl.shape}, {pr.shape}"
        )
    return w_old - theta * (pl + pr)


def peak_efficiency_nnwr(K: int, J: int) -> float:
    """Best-case parallel efficiency of the pipeline ordering with 2NK cores."""
    if K < 1 or J < 1:
        raise ConfigurationError(f"need K >= 1 and J >= 1, got K={K}, J={J}")
    if 2 * K >= J:
        return 2 * K / (2 * K + J - 1)
    return J / (2 * K + J - 1)


def _aux_pattern(i: int, N: int) -> str:
    # auxiliary problem: homogeneous Dirichlet at physical ends, Neumann
    # (jump data) at interfaces
    return ("D" if i == 1 else "N") + ("D" if i == N else "N")


def _sub(i: int) -> str:
    return f"sub{i}"


def _monolithic_report(problem, grid, cfg, variant: str) -> RunReport:
    from .oracle import solve_monolithic

    t0 = time.perf_counter()
    sol = solve_monolithic(problem, grid)
    return RunReport(
        method="nnwr",
        variant=variant,
        N=1,
        K=cfg.K,
        J=1,
        Nx=grid.Nx,
        Nt=grid.Nt,
        theta=cfg.theta,
        tol=cfg.tol,
        iterations=0,
        converged=True,
        residuals=np.zeros(0),
        traces={},
        counters={"data_messages": 0, "data_words": 0, "local_messages": 0,
                  "local_words": 0, "flag_messages": 0},
        walltime=time.perf_counter() - t0,
        solution=sol,
    )


# ---------------------------------------------------------------------------
# classical ordering

def _classical_worker(geom: SubdomainGeometry, cfg: NnwrConfig, router: Router,
                      collector: Collector):
    dec = geom.dec
    i, N, K = geom.i, dec.N, cfg.K
    grid = dec.grid
    Nt = grid.Nt
    me = _sub(i)
    factor_dd = assemble_factor(grid.dx, grid.dt, geom.n_loc, "DD")
    factor_aux = assemble_factor(grid.dx, grid.dt, geom.n_loc, _aux_pattern(i, N))
    zero_series = np.zeros(Nt)

    w: dict[int, np.ndarray] = {}
    if i > 1:
        w[i - 1] = initial_trace_block(geom.problem, dec, i - 1, 1,
                                       cfg.initial_guess, cfg.custom_guess)
    if i < N:
        w[i] = initial_trace_block(geom.problem, dec, i, 1,
                                   cfg.initial_guess, cfg.custom_guess)
        collector.record_trace(i, 0, 1, w[i])

    for k in range(1, K + 1):
        ev0, t0 = collector.next_event(), time.perf_counter()
        state = SubdomainState(geom.u0.copy())
        bcl = w[i - 1] if i > 1 else geom.g_left(1)
        bcr = w[i] if i < N else geom.g_right(1)
        res = advance_block(state, factor_dd, bcl, bcr, Nt, forcing=geom.forcing_block(1))

        # exchange one-sided fluxes across each interface
        if i > 1:
            router.send(WrMessage(MsgKind.NEUMANN_JUMP_HALF, k, J_END, i - 1,
                                  me, _sub(i - 1), res.left_flux))
        if i < N:
            router.send(WrMessage(MsgKind.NEUMANN_JUMP_HALF, k, J_END, i,
                                  me, _sub(i + 1), res.right_flux))
        jumps: dict[int, np.ndarray] = {}
        if i > 1:
            nb = router.recv_match(me, MsgKind.NEUMANN_JUMP_HALF, k, J_END, i - 1,
                                   _sub(i - 1)).payload
            jumps[i - 1] = nb - res.left_flux
        if i < N:
            nb = router.recv_match(me, MsgKind.NEUMANN_JUMP_HALF, k, J_END, i,
                                   _sub(i + 1)).payload
            jumps[i] = res.right_flux - nb

        # the verdict on iterate k-1 arrives after this iterate's Neumann
        # exchange, matching the early-stopped message count
        if k > 1:
            verdict = router.recv_match(me, MsgKind.CONVERGENCE_FLAG, k - 1, J_END,
                                        0, "coord").payload
            if verdict:
                collector.record_span(TaskSpan(me, i, k, 1, ev0, collector.next_event(),
                                               t0, time.perf_counter()))
                return

        psi_state = SubdomainState(np.zeros(geom.n_loc))
        bcl_aux = -jumps[i - 1] if i > 1 else zero_series
        bcr_aux = jumps[i] if i < N else zero_series
        aux = advance_block(psi_state, factor_aux, bcl_aux, bcr_aux, Nt)

        if i > 1:
            router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, J_END, i - 1,
                                  me, _sub(i - 1), aux.left_values))
        if i < N:
            router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, J_END, i,
                                  me, _sub(i + 1), aux.right_values))
        if i > 1:
            psi_nb = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k, J_END, i - 1,
                                       _sub(i - 1)).payload
            w[i - 1] = update_traces(w[i - 1], psi_nb, aux.left_values, cfg.theta)
        if i < N:
            psi_nb = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k, J_END, i,
                                       _sub(i + 1)).payload
            w_new = update_traces(w[i], aux.right_values, psi_nb, cfg.theta)
            resid = float(np.max(np.abs(w_new - w[i])))
            w[i] = w_new
            collector.record_trace(i, k, 1, w[i])
            collector.record_residual(i, k, 1, resid)
            router.send(WrMessage(MsgKind.CONVERGENCE_FLAG, k, J_END, i,
                                  me, "coord", resid))
        collector.record_span(TaskSpan(me, i, k, 1, ev0, collector.next_event(),
                                       t0, time.perf_counter()))


def _classical_coordinator(N: int, cfg: NnwrConfig, router: Router):
    for k in range(1, cfg.K + 1):
        res_k = 0.0
        for iface in range(1, N):
            msg = router.recv_match("coord", MsgKind.CONVERGENCE_FLAG, k, J_END,
                                    iface, _sub(iface))
            res_k = max(res_k, msg.payload)
        conv = res_k < cfg.tol
        if k < cfg.K:
            for i in range(1, N + 1):
                router.send(WrMessage(MsgKind.CONVERGENCE_FLAG, k, J_END, 0,
                                      "coord", _sub(i), conv))
            if conv:
                return


def run_classical(problem, grid: SpaceTimeGrid, N: int, cfg: NnwrConfig,
                  interface_nodes=None) -> RunReport:
    """Classical NNWR: N workers, whole-horizon sweeps, early stop on tol."""
    if N == 1:
        return _monolithic_report(problem, grid, cfg, "classical")
    dec = decompose(grid, N, 1, interface_nodes=interface_nodes)
    router = Router(timeout=cfg.timeout, record_trace=cfg.record_trace,
                    jitter_seed=cfg.jitter_seed)
    collector = Collector(N - 1, cfg.K, 1, grid.Nt)
    router.register("coord")
    for i in range(1, N + 1):
        router.register(_sub(i), column=i)
    pool = WorkerPool(router)
    t0 = time.perf_counter()
    for i in range(1, N + 1):
        pool.spawn(_sub(i), _classical_worker,
                   SubdomainGeometry(problem, dec, i), cfg, router, collector)
    _classical_coordinator(N, cfg, router)
    pool.join_all()
    walltime = time.perf_counter() - t0
    router.assert_drained()
    return _finish_report(dec, cfg, "classical", router, collector, walltime)


def _finish_report(dec: Decomposition, cfg: NnwrConfig, variant: str,
                   router: Router, collector: Collector, walltime: float) -> RunReport:
    N, K = dec.N, cfg.K
    # the run may have stopped early: the last iterate with a full trace set
    iterations = K
    while iterations > 0:
        try:
            collector.trace_series(1, iterations)
            break
        except KeyError:
            iterations -= 1
    residuals = collector.residual_history(iterations)
    traces = {(iface, k): collector.trace_series(iface, k)
              for iface in range(1, N) for k in range(0, iterations + 1)}
    converged = bool(iterations >= 1 and residuals[-1] < cfg.tol)
    return RunReport(
        method="nnwr",
        variant=variant,
        N=N,
        K=K,
        J=dec.J,
        Nx=dec.grid.Nx,
        Nt=dec.grid.Nt,
        theta=cfg.theta,
        tol=cfg.tol,
        iterations=iterations,
        converged=converged,
        residuals=residuals,
        traces=traces,
        counters=router.counter.as_dict(),
        walltime=walltime,
        timeline=collector.timeline,
        msg_trace=router.trace or [],
    )


# ---------------------------------------------------------------------------
# pipeline ordering

def _dname(i, k):
    return f"D{i}.{k}"


def _aname(i, k):
    return f"A{i}.{k}"


def _dirichlet_stage(geom: SubdomainGeometry, k: int, cfg: NnwrConfig,
                     router: Router, collector: Collector):
    dec = geom.dec
    i, N, K, J, b = geom.i, dec.N, cfg.K, dec.J, dec.block_len
    grid = dec.grid
    me = _dname(i, k)
    factor = assemble_factor(grid.dx, grid.dt, geom.n_loc, "DD")
    state = SubdomainState(geom.u0.copy())
    prev_a = _aname(i, k - 1)
    for j in range(1, J + 1):
        ev0, t0 = collector.next_event(), time.perf_counter()
        wl = wr = None
        if k == 1:
            if i > 1:
                wl = initial_trace_block(geom.problem, dec, i - 1, j,
                                         cfg.initial_guess, cfg.custom_guess)
            if i < N:
                wr = initial_trace_block(geom.problem, dec, i, j,
                                         cfg.initial_guess, cfg.custom_guess)
                collector.record_trace(i, 0, j, wr)
        else:
            # reconstruct w^[k-1] from w^[k-2] and the psi traces of the
            # previous iterate, exactly as the classical worker does
            if i > 1:
                w_prev = router.recv_match(me, MsgKind.PREV_TRACE, k - 2, j, i - 1,
                                           prev_a).payload
                psi_own = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k - 1, j,
                                            i - 1, prev_a).payload
                psi_nb = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k - 1, j,
                                           i - 1, _aname(i - 1, k - 1)).payload
                wl = update_traces(w_prev, psi_nb, psi_own, cfg.theta)
            if i < N:
                w_prev = router.recv_match(me, MsgKind.PREV_TRACE, k - 2, j, i,
                                           prev_a).payload
                psi_own = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k - 1, j,
                                            i, prev_a).payload
                psi_nb = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k - 1, j,
                                           i, _aname(i + 1, k - 1)).payload
                wr = update_traces(w_prev, psi_own, psi_nb, cfg.theta)
                collector.record_trace(i, k - 1, j, wr)
                collector.record_residual(i, k - 1, j, float(np.max(np.abs(wr - w_prev))))
        bcl = wl if i > 1 else geom.g_left(j)
        bcr = wr if i < N else geom.g_right(j)
        res = advance_block(state, factor, bcl, bcr, b, forcing=geom.forcing_block(j))
        if i > 1:
            router.send(WrMessage(MsgKind.NEUMANN_JUMP_HALF, k, j, i - 1,
                                  me, _aname(i - 1, k), res.left_flux))
            router.send(WrMessage(MsgKind.NEUMANN_JUMP_HALF, k, j, i - 1,
                                  me, _aname(i, k), res.left_flux))
            router.send(WrMessage(MsgKind.PREV_TRACE, k - 1, j, i - 1,
                                  me, _aname(i, k), wl))
        if i < N:
            router.send(WrMessage(MsgKind.NEUMANN_JUMP_HALF, k, j, i,
                                  me, _aname(i + 1, k), res.right_flux))
            router.send(WrMessage(MsgKind.NEUMANN_JUMP_HALF, k, j, i,
                                  me, _aname(i, k), res.right_flux))
            router.send(WrMessage(MsgKind.PREV_TRACE, k - 1, j, i,
                                  me, _aname(i, k), wr))
        collector.record_span(TaskSpan(me, i, k, j, ev0, collector.next_event(),
                                       t0, time.perf_counter()))


def _auxiliary_stage(geom: SubdomainGeometry, k: int, cfg: NnwrConfig,
                     router: Router, collector: Collector):
    dec = geom.dec
    i, N, K, J, b = geom.i, dec.N, cfg.K, dec.J, dec.block_len
    grid = dec.grid
    me = _aname(i, k)
    factor = assemble_factor(grid.dx, grid.dt, geom.n_loc, _aux_pattern(i, N))
    psi_state = SubdomainState(np.zeros(geom.n_loc))
    my_d = _dname(i, k)
    zero_series = np.zeros(b)
    for j in range(1, J + 1):
        ev0, t0 = collector.next_event(), time.perf_counter()
        jump_l = jump_r = None
        w_prev_l = w_prev_r = None
        if i > 1:
            own = router.recv_match(me, MsgKind.NEUMANN_JUMP_HALF, k, j, i - 1,
                                    my_d).payload
            nb = router.recv_match(me, MsgKind.NEUMANN_JUMP_HALF, k, j, i - 1,
                                   _dname(i - 1, k)).payload
            jump_l = nb - own
            w_prev_l = router.recv_match(me, MsgKind.PREV_TRACE, k - 1, j, i - 1,
                                         my_d).payload
        if i < N:
            own = router.recv_match(me, MsgKind.NEUMANN_JUMP_HALF, k, j, i,
                                    my_d).payload
            nb = router.recv_match(me, MsgKind.NEUMANN_JUMP_HALF, k, j, i,
                                   _dname(i + 1, k)).payload
            jump_r = own - nb
            w_prev_r = router.recv_match(me, MsgKind.PREV_TRACE, k - 1, j, i,
                                         my_d).payload
        bcl = -jump_l if i > 1 else zero_series
        bcr = jump_r if i < N else zero_series
        aux = advance_block(psi_state, factor, bcl, bcr, b)
        if k < K:
            if i > 1:
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i - 1,
                                      me, _dname(i - 1, k + 1), aux.left_values))
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i - 1,
                                      me, _dname(i, k + 1), aux.left_values))
                router.send(WrMessage(MsgKind.PREV_TRACE, k - 1, j, i - 1,
                                      me, _dname(i, k + 1), w_prev_l))
            if i < N:
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i,
                                      me, _dname(i + 1, k + 1), aux.right_values))
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i,
                                      me, _dname(i, k + 1), aux.right_values))
                router.send(WrMessage(MsgKind.PREV_TRACE, k - 1, j, i,
                                      me, _dname(i, k + 1), w_prev_r))
        else:
            # final iterate: exchange psi interface values with the neighbor
            # auxiliary workers so the interface owners can finish the traces
            if i > 1:
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i - 1,
                                      me, _aname(i - 1, k), aux.left_values))
            if i < N:
                router.send(WrMessage(MsgKind.DIRICHLET_TRACE, k, j, i,
                                      me, _aname(i + 1, k), aux.right_values))
            if i < N:
                psi_nb = router.recv_match(me, MsgKind.DIRICHLET_TRACE, k, j, i,
                                           _aname(i + 1, k)).payload
                w_fin = update_traces(w_prev_r, aux.right_values, psi_nb, cfg.theta)
                collector.record_trace(i, k, j, w_fin)
                collector.record_residual(i, k, j, float(np.max(np.abs(w_fin - w_prev_r))))
            if i > 1:
                # consume the mirror half of the exchange (the owner of
                # interface i-1 is the left subdomain)
                router.recv_match(me, MsgKind.DIRICHLET_TRACE, k, j, i - 1,
                                  _aname(i - 1, k))
        collector.record_span(TaskSpan(me, i, k, j, ev0, collector.next_event(),
                                       t0, time.perf_counter()))


def run_pipeline(problem, grid: SpaceTimeGrid, N: int, cfg: NnwrConfig, J: int,
                 interface_nodes=None) -> RunReport:
    """Pipeline NNWR over J time blocks with a fixed iterate count K."""
    if N == 1:
        return _monolithic_report(problem, grid, cfg, "pipeline")
    dec = decompose(grid, N, J, interface_nodes=interface_nodes)
    K = cfg.K
    router = Router(timeout=cfg.timeout, record_trace=cfg.record_trace,
                    jitter_seed=cfg.jitter_seed)
    collector = Collector(N - 1, K, J, dec.block_len)
    for i in range(1, N + 1):
        for k in range(1, K + 1):
            router.register(_dname(i, k), column=i)
            router.register(_aname(i, k), column=i)
    pool = WorkerPool(router)
    geoms = {i: SubdomainGeometry(problem, dec, i) for i in range(1, N + 1)}
    t0 = time.perf_counter()
    if J >= 2 * K:
        # one worker per (subdomain, iterate, stage)
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                pool.spawn(_dname(i, k), _dirichlet_stage, geoms[i], k, cfg,
                           router, collector)
                pool.spawn(_aname(i, k), _auxiliary_stage, geoms[i], k, cfg,
                           router, collector)
    else:
        # NJ workers; worker (i, l) runs stages a = l, l+J, l+2J, ... <= 2K
        def staged(i, l):
            a = l
            while a <= 2 * K:
                k = math.ceil(a / 2)
                if a % 2 == 1:
                    _dirichlet_stage(geoms[i], k, cfg, router, collector)
                else:
                    _auxiliary_stage(geoms[i], k, cfg, router, collector)
                a += J

        for i in range(1, N + 1):
            for l in range(1, J + 1):
                pool.spawn(f"W{i}.{l}", staged, i, l)
    pool.join_all()
    walltime = time.perf_counter() - t0
    router.assert_drained()
    return _finish_report(dec, cfg, "pipeline", router, collector, walltime)
