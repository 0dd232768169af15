"""Command-line front end: run solvers, validate orderings against each
other, and emit efficiency tables (simulated or measured)."""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from ._common import InitialGuess
from .dnwr import DnwrConfig, DnwrMode, run_dnwr
from .grid import ConfigurationError, balanced_interface_nodes, build_grid
from .nnwr import NnwrConfig, NnwrMode, run_classical, run_pipeline
from .problem import HeatProblem, model_problem
from .schedule import ScheduleError, efficiency_sweep, theoretical_efficiency

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNCONVERGED = 2

_GUESSES = {
    "initial-condition": InitialGuess.INITIAL_CONDITION,
    "zero": InitialGuess.ZERO,
}


def _add_common(sub):
    sub.add_argument("--method", choices=["nnwr", "dnwr"], default=None)
    sub.add_argument("--mode", choices=["classical", "pipeline", "naive"], default=None)
    sub.add_argument("--L", type=float, default=None)
    sub.add_argument("--T", type=float, default=None)
    sub.add_argument("--Nx", type=int, default=None)
    sub.add_argument("--Nt", type=int, default=None)
    sub.add_argument("--N", type=int, default=None)
    sub.add_argument("--J", type=int, default=None)
    sub.add_argument("--K", type=int, default=None)
    sub.add_argument("--theta", type=float, default=None)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--initial-guess", choices=sorted(_GUESSES), default=None)
    sub.add_argument("--seed", type=int, default=None,
                     help="randomized message-delay seed (equivalence testing)")
    sub.add_argument("--config", default=None, help="flat key=value file; flags win")


_DEFAULTS = {
    "method": "nnwr", "mode": "classical", "L": 1.0, "T": 0.1, "Nx": 200,
    "Nt": 128, "N": 2, "J": 1, "K": 4, "theta": None, "tol": 1e-8, "m": None,
    "initial_guess": "initial-condition", "seed": None,
}


def _resolve(args) -> dict:
    """Merge flags over config-file entries over defaults."""
    cfg = dict(_DEFAULTS)
    if args.config:
        if not os.path.exists(args.config):
            raise ConfigurationError(f"config file not found: {args.config}")
        with open(args.config) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(
                        f"{args.config}:{lineno}: expected key=value, got {line!r}")
                key, val = (s.strip() for s in line.split("=", 1))
                key = key.replace("-", "_")
                if key not in cfg:
                    raise ConfigurationError(f"{args.config}:{lineno}: unknown key {key!r}")
                cfg[key] = val
    for key in _DEFAULTS:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            cfg[key] = flag_val
    # config-file values arrive as strings
    for key in ("L", "T", "theta", "tol"):
        if isinstance(cfg[key], str):
            cfg[key] = float(cfg[key])
    for key in ("Nx", "Nt", "N", "J", "K", "m", "seed"):
        if isinstance(cfg[key], str):
            cfg[key] = int(cfg[key])
    if cfg["theta"] is None:
        cfg["theta"] = 0.25 if cfg["method"] == "nnwr" else 0.5
    if cfg["initial_guess"] not in _GUESSES:
        raise ConfigurationError(f"unknown initial guess {cfg['initial_guess']!r}")
    return cfg


def _problem_and_grid(cfg):
    problem = model_problem() if (cfg["L"], cfg["T"]) == (1.0, 0.1) else HeatProblem(
        L=cfg["L"], T=cfg["T"], ic=lambda x: (x - cfg["L"] / 2) ** 2 - (cfg["L"] / 2) ** 2)
    grid = build_grid(cfg["L"], cfg["T"], cfg["Nx"], cfg["Nt"])
    ifaces = None
    if cfg["N"] > 1 and (cfg["Nx"] + 1) % cfg["N"] != 0:
        ifaces = balanced_interface_nodes(grid, cfg["N"])
    return problem, grid, ifaces


def _run(cfg, mode_override=None, j_override=None, tol_override=None):
    problem, grid, ifaces = _problem_and_grid(cfg)
    mode = mode_override or cfg["mode"]
    J = j_override if j_override is not None else cfg["J"]
    tol = tol_override if tol_override is not None else cfg["tol"]
    guess = _GUESSES[cfg["initial_guess"]]
    if cfg["method"] == "nnwr":
        ncfg = NnwrConfig(K=cfg["K"], theta=cfg["theta"], tol=tol,
                          mode=NnwrMode(mode), initial_guess=guess,
                          jitter_seed=cfg["seed"])
        if mode == "classical":
            if J != 1:
                raise ConfigurationError("classical ordering sweeps the whole horizon; J must be 1")
            return run_classical(problem, grid, cfg["N"], ncfg, interface_nodes=ifaces)
        return run_pipeline(problem, grid, cfg["N"], ncfg, J, interface_nodes=ifaces)
    dmode = {"naive": DnwrMode.NAIVE, "classical": DnwrMode.CLASSICAL_PACKED,
             "pipeline": DnwrMode.PIPELINE}[mode]
    dcfg = DnwrConfig(K=cfg["K"], theta=cfg["theta"], m=cfg["m"], tol=tol,
                      mode=dmode, initial_guess=guess, jitter_seed=cfg["seed"])
    return run_dnwr(problem, grid, cfg["N"], dcfg,
                    J=J if dmode is DnwrMode.PIPELINE else 1,
                    interface_nodes=ifaces)


def cmd_solve(args) -> int:
    cfg = _resolve(args)
    report = _run(cfg)
    report.to_json(args.out_json)
    report.residuals_csv(args.out_residuals)
    if args.out_timeline:
        report.timeline_csv(args.out_timeline)
    print(f"{report.method}/{report.variant}: N={report.N} K={report.K} J={report.J} "
          f"iterations={report.iterations} converged={report.converged} "
          f"data_messages={report.counters['data_messages']}")
    if cfg["tol"] > 0 and not report.converged:
        print("flagged unconverged", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _resolve(args)
    base_mode = "classical" if cfg["method"] == "nnwr" else "naive"
    ref = _run(cfg, mode_override=base_mode, j_override=1, tol_override=0.0)
    pipe = _run(cfg, mode_override="pipeline", tol_override=0.0)
    if ref.iterations != pipe.iterations:
        raise ConfigurationError(
            f"orderings ran different iterate counts: {ref.iterations} vs {pipe.iterations}")
    diff = 0.0
    for key, series in ref.traces.items():
        diff = max(diff, float(np.max(np.abs(series - pipe.traces[key]))))
    print(f"max |classical - pipeline| over all traces: {diff:.3e}")
    if diff > 1e-13:
        print("VALIDATION FAILED", file=sys.stderr)
        return EXIT_UNCONVERGED
    print("PASS")
    return EXIT_OK


def measure_efficiency(method: str, N: int, K: int, Js, Nx: int, Nt: int):
    """Walltime-derived pipeline efficiency against a classical baseline.

    Efficiency of a J-block run is T_classical / (2K * T_pipeline) for the
    two-stage method (2NK workers vs N) and T_classical_naive / (K * T_pipeline)
    for the single-stage one (NK workers vs N).  Returns (rows, ncores,
    nworkers) where rows are (J, measured, theoretical) triples.
    """
    problem = model_problem()
    grid = build_grid(1.0, 0.1, Nx, Nt)
    ifaces = None
    if (Nx + 1) % N != 0:
        ifaces = balanced_interface_nodes(grid, N)
    ncores = os.cpu_count() or 1
    if method == "nnwr":
        cfg = NnwrConfig(K=K, tol=0.0)
        run_classical(problem, build_grid(1.0, 0.1, 63, 16), 2, NnwrConfig(K=1, tol=0.0))  # jit warmup
        t0 = time.perf_counter()
        run_classical(problem, grid, N, cfg, interface_nodes=ifaces)
        t_base = time.perf_counter() - t0
        rows = []
        for J in Js:
            t0 = time.perf_counter()
            run_pipeline(problem, grid, N, cfg, J, interface_nodes=ifaces)
            t_pipe = time.perf_counter() - t0
            rows.append((J, t_base / (2 * K * t_pipe),
                         float(theoretical_efficiency("nnwr", N, K, J))))
        return rows, ncores, 2 * N * K
    cfg = DnwrConfig(K=K, mode=DnwrMode.NAIVE)
    run_dnwr(problem, build_grid(1.0, 0.1, 63, 16), 2, DnwrConfig(K=1))  # jit warmup
    t0 = time.perf_counter()
    run_dnwr(problem, grid, N, cfg, interface_nodes=ifaces)
    t_base = time.perf_counter() - t0
    rows = []
    pcfg = DnwrConfig(K=K, mode=DnwrMode.PIPELINE)
    for J in Js:
        t0 = time.perf_counter()
        run_dnwr(problem, grid, N, pcfg, J=J, interface_nodes=ifaces)
        t_pipe = time.perf_counter() - t0
        rows.append((J, t_base / (K * t_pipe),
                     float(theoretical_efficiency("dnwr", N, K, J))))
    return rows, ncores, N * K


def cmd_efficiency_table(args) -> int:
    Js = [int(s) for s in args.J_list.split(",") if s.strip()]
    if not Js:
        raise ConfigurationError("empty J list")
    method = args.method or "nnwr"
    N = args.N or 8
    K = args.K or 4
    if args.measure:
        rows, ncores, nworkers = measure_efficiency(method, N, K, Js,
                                                    args.Nx or 2000, args.Nt or 1024)
        header = "J,actual_efficiency,theoretical_efficiency"
        if nworkers > ncores:
            print(f"note: {nworkers} logical workers oversubscribe {ncores} "
                  f"hardware threads; measured efficiencies are not peak",
                  file=sys.stderr)
    else:
        # efficiency is independent of N for the two-stage method; simulate
        # small N so huge J sweeps stay cheap
        simN = 2 if method == "nnwr" else N
        rows = [(J, float(sim), float(theo))
                for J, sim, theo in efficiency_sweep(method, simN, K, Js)]
        header = "J,simulated_efficiency,theoretical_efficiency"
    lines = [header] + [f"{J},{a:.6f},{b:.6f}" for J, a, b in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipewr",
        description="waveform-relaxation solvers for the 1D heat equation")
    subs = parser.add_subparsers(dest="command", required=True)

    p_solve = subs.add_parser("solve", help="run one solver configuration")
    _add_common(p_solve)
    p_solve.add_argument("--out-json", default="report.json")
    p_solve.add_argument("--out-residuals", default="residuals.csv")
    p_solve.add_argument("--out-timeline", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_val = subs.add_parser("validate",
                            help="compare classical and pipeline orderings")
    _add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_eff = subs.add_parser("efficiency-table",
                            help="emit a J vs efficiency CSV")
    p_eff.add_argument("--method", choices=["nnwr", "dnwr"], default="nnwr")
    p_eff.add_argument("--N", type=int, default=8)
    p_eff.add_argument("--K", type=int, default=4)
    p_eff.add_argument("--J-list", required=True,
                       help="comma-separated block counts")
    group = p_eff.add_mutually_exclusive_group()
    group.add_argument("--simulate", action="store_true", default=True)
    group.add_argument("--measure", action="store_true", default=False)
    p_eff.add_argument("--Nx", type=int, default=None)
    p_eff.add_argument("--Nt", type=int, default=None)
    p_eff.add_argument("--out", default=None)
    p_eff.set_defaults(func=cmd_efficiency_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
