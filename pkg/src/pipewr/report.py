"""Run results: interface trace collection, residual history, task timeline."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TaskSpan:
    worker: str
    i: int
    k: int
    j: int
    start_event: int
    end_event: int
    t_start: float = 0.0
    t_end: float = 0.0


class Collector:
    """Thread-safe sink for per-(interface, iterate, block) results.

    Workers report interface-trace segments, residual contributions, and
    task start/end events ordered by a global counter.  Reporting is out of
    band: it models each worker writing to its own output file, so nothing
    here shows up in the transport counters.
    """

    def __init__(self, n_ifaces: int, K: int, J: int, block_len: int):
        self._lock = threading.Lock()
        self.n_ifaces = n_ifaces
        self.K = K
        self.J = J
        self.block_len = block_len
        # traces[(iface, k)][j] -> ndarray of block_len values
        self._traces: dict[tuple[int, int], dict[int, np.ndarray]] = {}
        # raw (unrelaxed) interface values, keyed the same way
        self._raw: dict[tuple[int, int], dict[int, np.ndarray]] = {}
        self._residuals: dict[tuple[int, int, int], float] = {}
        self.timeline: list[TaskSpan] = []
        self._event = 0

    def next_event(self) -> int:
        with self._lock:
            self._event += 1
            return self._event

    def record_trace(self, iface: int, k: int, j: int, values: np.ndarray) -> None:
        with self._lock:
            self._traces.setdefault((iface, k), {})[j] = np.asarray(values, dtype=float).copy()

    def record_raw(self, iface: int, k: int, j: int, values: np.ndarray) -> None:
        with self._lock:
            self._raw.setdefault((iface, k), {})[j] = np.asarray(values, dtype=float).copy()

    def raw_block(self, iface: int, k: int, j: int) -> np.ndarray:
        return self._raw[(iface, k)][j]

    def trace_block(self, iface: int, k: int, j: int) -> np.ndarray:
        return self._traces[(iface, k)][j]

    def record_residual(self, iface: int, k: int, j: int, value: float) -> None:
        with self._lock:
            self._residuals[(iface, k, j)] = float(value)

    def record_span(self, span: TaskSpan) -> None:
        with self._lock:
            self.timeline.append(span)

    def trace_series(self, iface: int, k: int) -> np.ndarray:
        """Full-window trace w_iface^k, concatenated over blocks."""
        blocks = self._traces[(iface, k)]
        if sorted(blocks) != list(range(1, self.J + 1)):
            raise KeyError(f"incomplete trace (iface={iface}, k={k}): blocks {sorted(blocks)}")
        return np.concatenate([blocks[j] for j in range(1, self.J + 1)])

    def residual_history(self, K: int) -> np.ndarray:
        """L-infinity residual over all interfaces and blocks, per iterate."""
        out = np.zeros(K)
        for (iface, k, j), v in self._residuals.items():
            if 1 <= k <= K:
                out[k - 1] = max(out[k - 1], v)
        return out


@dataclass
class RunReport:
    method: str
    variant: str
    N: int
    K: int
    J: int
    Nx: int
    Nt: int
    theta: float
    tol: float
    iterations: int
    converged: bool
    residuals: np.ndarray
    traces: dict[tuple[int, int], np.ndarray]  # (iface, k) -> series over window
    counters: dict
    walltime: float
    timeline: list[TaskSpan] = field(default_factory=list)
    msg_trace: list = field(default_factory=list)  # TraceRecords when traced
    solution: np.ndarray | None = None

    def final_trace(self, iface: int) -> np.ndarray:
        return self.traces[(iface, self.iterations)]

    def worker_busy(self) -> dict[str, float]:
        busy: dict[str, float] = {}
        for s in self.timeline:
            busy[s.worker] = busy.get(s.worker, 0.0) + (s.t_end - s.t_start)
        return busy

    def to_json(self, path=None) -> str:
        doc = {
            "method": self.method,
            "variant": self.variant,
            "N": self.N,
            "K": self.K,
            "J": self.J,
            "Nx": self.Nx,
            "Nt": self.Nt,
            "theta": self.theta,
            "tol": self.tol,
            "iterations": self.iterations,
            "converged": self.converged,
            "residuals": [float(r) for r in self.residuals],
            "counters": self.counters,
            "walltime_s": self.walltime,
            "worker_busy_s": {w: round(t, 6) for w, t in sorted(self.worker_busy().items())},
        }
        text = json.dumps(doc, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    def residuals_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("k,residual_Linf\n")
            for k, r in enumerate(self.residuals, start=1):
                fh.write(f"{k},{r:.16e}\n")

    def timeline_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("worker,i,k,j,start_event,end_event\n")
            for s in sorted(self.timeline, key=lambda s: s.start_event):
                fh.write(f"{s.worker},{s.i},{s.k},{s.j},{s.start_event},{s.end_event}\n")
