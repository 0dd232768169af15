"""Deterministic simulator of the block-task DAGs behind both pipelines.

Tasks are unit-cost block solves; edges are the data dependencies the
message protocol realizes.  Simulating a DAG under a worker assignment gives
exact (rational) makespan and efficiency figures, which the closed-form peak
formulas must match for the canonical assignments.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction


class ScheduleError(RuntimeError):
    pass


@dataclass
class TaskDag:
    """Nodes are (i, k, q, j) tuples for the two-stage method (q=1 Dirichlet,
    q=0 auxiliary) and (i, k, j) for the single-stage one."""

    nodes: list
    edges: list
    cost: dict = field(default_factory=dict)  # task -> int cost, default 1

    def task_cost(self, t) -> int:
        return self.cost.get(t, 1)


def _neighbors(i: int, N: int):
    return [i2 for i2 in (i - 1, i, i + 1) if 1 <= i2 <= N]


def build_dag(method: str, N: int, K: int, J: int, m: int | None = None) -> TaskDag:
    if min(N, K, J) < 1:
        raise ScheduleError(f"parameters must be >= 1: N={N}, K={K}, J={J}")
    method = method.lower()
    nodes: list = []
    edges: list = []
    if method == "nnwr":
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                for q in (1, 0):
                    for j in range(1, J + 1):
                        nodes.append((i, k, q, j))
                        if j > 1:
                            edges.append(((i, k, q, j - 1), (i, k, q, j)))
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                for j in range(1, J + 1):
                    for i2 in _neighbors(i, N):
                        edges.append(((i, k, 1, j), (i2, k, 0, j)))
                        if k < K:
                            edges.append(((i, k, 0, j), (i2, k + 1, 1, j)))
    elif method == "dnwr":
        if m is None:
            m = math.ceil(N / 2)
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                for j in range(1, J + 1):
                    nodes.append((i, k, j))
                    if j > 1:
                        edges.append(((i, k, j - 1), (i, k, j)))
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                for j in range(1, J + 1):
                    # flux moves away from the pivot within an iterate
                    if i < m:
                        edges.append(((i + 1, k, j), (i, k, j)))
                    elif i > m:
                        edges.append(((i - 1, k, j), (i, k, j)))
                    if k < K:
                        # relaxed traces move back toward the pivot
                        if i < m:
                            edges.append(((i, k, j), (i + 1, k + 1, j)))
                        elif i > m:
                            edges.append(((i, k, j), (i - 1, k + 1, j)))
                        # each subdomain hands its trace state to its next iterate
                        edges.append(((i, k, j), (i, k + 1, j)))
    else:
        raise ScheduleError(f"unknown method {method!r}")
    return TaskDag(nodes=nodes, edges=edges)


def canonical_assignment(method: str, N: int, K: int, J: int) -> dict:
    """Worker -> ordered task list matching the real implementations."""
    method = method.lower()
    assignment: dict = {}
    if method == "nnwr":
        if J >= 2 * K:
            for i in range(1, N + 1):
                for k in range(1, K + 1):
                    assignment[f"D{i}.{k}"] = [(i, k, 1, j) for j in range(1, J + 1)]
                    assignment[f"A{i}.{k}"] = [(i, k, 0, j) for j in range(1, J + 1)]
        else:
            for i in range(1, N + 1):
                for l in range(1, J + 1):
                    tasks = []
                    a = l
                    while a <= 2 * K:
                        k, q = math.ceil(a / 2), a % 2
                        tasks.extend((i, k, q, j) for j in range(1, J + 1))
                        a += J
                    assignment[f"W{i}.{l}"] = tasks
    elif method == "dnwr":
        for i in range(1, N + 1):
            for k in range(1, K + 1):
                assignment[f"S{i}.{k}"] = [(i, k, j) for j in range(1, J + 1)]
    else:
        raise ScheduleError(f"unknown method {method!r}")
    return assignment


def simulate(dag: TaskDag, assignment: dict, latency: int = 0):
    """Run the DAG to completion under a worker assignment.

    ``assignment`` maps worker id -> ordered task list; every task must be
    covered exactly once.  Returns (makespan, per-worker busy, efficiency)
    with the efficiency an exact Fraction.
    """
    owner: dict = {}
    for w, tasks in assignment.items():
        for t in tasks:
            if t in owner:
                raise ScheduleError(f"task {t} assigned twice")
            owner[t] = w
    missing = [t for t in dag.nodes if t not in owner]
    if missing:
        raise ScheduleError(f"{len(missing)} unassigned tasks, first: {missing[0]}")

    # serialize each worker's list with zero-latency chain edges, then take
    # the longest path through the combined graph
    preds: dict = {t: [] for t in dag.nodes}
    succs: dict = {t: [] for t in dag.nodes}
    for a, b in dag.edges:
        preds[b].append((a, latency))
        succs[a].append(b)
    for w, tasks in assignment.items():
        for prev, cur in zip(tasks, tasks[1:]):
            preds[cur].append((prev, 0))
            succs[prev].append(cur)

    indeg = {t: len(preds[t]) for t in dag.nodes}
    ready = deque(t for t in dag.nodes if indeg[t] == 0)
    start: dict = {}
    end: dict = {}
    done = 0
    while ready:
        t = ready.popleft()
        s = 0
        for p, lat in preds[t]:
            s = max(s, end[p] + lat)
        start[t] = s
        end[t] = s + dag.task_cost(t)
        done += 1
        for n in succs[t]:
            indeg[n] -= 1
            if indeg[n] == 0:
                ready.append(n)
    if done != len(dag.nodes):
        raise ScheduleError("cyclic dependencies or inconsistent worker order")

    busy = {w: sum(dag.task_cost(t) for t in tasks) for w, tasks in assignment.items()}
    makespan = max(end.values()) if end else 0
    total = sum(busy.values())
    eff = Fraction(total, len(assignment) * makespan) if makespan else Fraction(1)
    return makespan, busy, eff, start, end


def theoretical_efficiency(method: str, N: int, K: int, J: int) -> Fraction:
    method = method.lower()
    if method == "nnwr":
        if 2 * K >= J:
            return Fraction(2 * K, 2 * K + J - 1)
        return Fraction(J, 2 * K + J - 1)
    if method == "dnwr":
        if J <= math.ceil(N / 2) + (2 * K - 1):
            raise ScheduleError(
                f"efficiency formula needs J > ceil(N/2) + (2K-1), got J={J}")
        return Fraction(J, J + N // 2 + 2 * (K - 1))
    raise ScheduleError(f"unknown method {method!r}")


def theoretical_vs_simulated(method: str, N: int, K: int, J: int) -> dict:
    """Simulate the canonical assignment and demand exact agreement with the
    closed-form peak efficiency."""
    dag = build_dag(method, N, K, J)
    assignment = canonical_assignment(method, N, K, J)
    makespan, busy, eff, start, end = simulate(dag, assignment)
    theo = theoretical_efficiency(method, N, K, J)
    report = {
        "method": method,
        "N": N,
        "K": K,
        "J": J,
        "makespan": makespan,
        "simulated": eff,
        "theoretical": theo,
    }
    if eff != theo:
        gap = _first_idle_gap(assignment, start, end)
        raise ScheduleError(
            f"simulated efficiency {eff} != theoretical {theo} for "
            f"{method} N={N} K={K} J={J}; first idle gap: {gap}"
        )
    return report


def _first_idle_gap(assignment, start, end):
    gaps = []
    for w, tasks in assignment.items():
        for prev, cur in zip(tasks, tasks[1:]):
            if start[cur] > end[prev]:
                gaps.append((start[cur], w, prev, cur))
    return min(gaps) if gaps else None


def efficiency_sweep(method: str, N: int, K: int, Js) -> list[tuple]:
    """(J, simulated, theoretical) triples over a list of block counts."""
    out = []
    for J in Js:
        dag = build_dag(method, N, K, J)
        assignment = canonical_assignment(method, N, K, J)
        _, _, eff, _, _ = simulate(dag, assignment)
        out.append((J, eff, theoretical_efficiency(method, N, K, J)))
    return out
