"""In-process message transport between subdomain workers.

Channels are tag-matched mailboxes: a receiver blocks until a message with
the expected (kind, k, j, interface, sender) tag arrives; unrelated messages
buffer without stalling it.  Delivery per (sender, receiver) pair is FIFO.
Counters separate interface-crossing data messages (the quantity the
message-count formulas refer to) from intra-column transfers and convergence
flags.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from enum import Enum


class TransportError(RuntimeError):
    pass


class DeadlockError(TransportError):
    """recv_match timed out: names the tag the receiver was waiting for."""


class RunAborted(TransportError):
    """Another worker failed; unblock everyone."""


class MsgKind(Enum):
    NEUMANN_JUMP_HALF = "neumann_jump_half"  # one-sided u flux (NNWR)
    NEUMANN_FLUX = "neumann_flux"            # transmitted flux (DNWR)
    DIRICHLET_TRACE = "dirichlet_trace"      # interface value series
    PREV_TRACE = "prev_trace"                # trace forwarding between iterates
    CONVERGENCE_FLAG = "convergence_flag"


@dataclass(frozen=True)
class WrMessage:
    kind: MsgKind
    k: int
    j: int
    iface: int
    sender: str
    receiver: str
    payload: object = None  # ndarray for data kinds, None/float for flags

    def tag(self):
        return (self.kind, self.k, self.j, self.iface, self.sender)


@dataclass
class MsgCounter:
    """Message/word accounting split by category."""

    data_messages: int = 0
    data_words: int = 0
    local_messages: int = 0
    local_words: int = 0
    flag_messages: int = 0

    @property
    def total_messages(self) -> int:
        return self.data_messages

    @property
    def total_words(self) -> int:
        return self.data_words

    def as_dict(self) -> dict:
        return {
            "data_messages": self.data_messages,
            "data_words": self.data_words,
            "local_messages": self.local_messages,
            "local_words": self.local_words,
            "flag_messages": self.flag_messages,
        }


@dataclass
class TraceRecord:
    k: int
    j: int
    iface: int
    kind: str
    sender: str
    receiver: str
    words: int


class _Mailbox:
    def __init__(self, lock: threading.Lock):
        self.cond = threading.Condition(lock)
        self.messages: list[WrMessage] = []


class Router:
    """Multi-producer / single-consumer mailboxes with tag matching."""

    def __init__(self, timeout: float = 60.0, record_trace: bool = False,
                 jitter_seed: int | None = None):
        self._lock = threading.Lock()
        self._boxes: dict[str, _Mailbox] = {}
        self._columns: dict[str, int | None] = {}
        self.counter = MsgCounter()
        self.timeout = timeout
        self.trace: list[TraceRecord] | None = [] if record_trace else None
        self._aborted: Exception | None = None
        self._rng = random.Random(jitter_seed) if jitter_seed is not None else None

    def register(self, worker_id: str, column: int | None = None) -> None:
        with self._lock:
            if worker_id in self._boxes:
                raise TransportError(f"worker {worker_id!r} already registered")
            self._boxes[worker_id] = _Mailbox(self._lock)
            self._columns[worker_id] = column

    def send(self, msg: WrMessage) -> None:
        if self._rng is not None:
            # scheduling jitter for schedule-independence tests
            time.sleep(self._rng.random() * 1e-4)
        with self._lock:
            if self._aborted is not None:
                raise RunAborted(str(self._aborted))
            box = self._boxes.get(msg.receiver)
            if box is None:
                raise TransportError(f"send to unregistered endpoint {msg.receiver!r}")
            words = 0 if msg.kind is MsgKind.CONVERGENCE_FLAG else len(msg.payload)
            if msg.kind is MsgKind.CONVERGENCE_FLAG:
                self.counter.flag_messages += 1
            elif self._columns.get(msg.sender) == self._columns.get(msg.receiver):
                self.counter.local_messages += 1
                self.counter.local_words += words
            else:
                self.counter.data_messages += 1
                self.counter.data_words += words
            if self.trace is not None:
                self.trace.append(
                    TraceRecord(msg.k, msg.j, msg.iface, msg.kind.value,
                                msg.sender, msg.receiver, words)
                )
            box.messages.append(msg)
            box.cond.notify_all()

    def recv_match(self, worker_id: str, kind: MsgKind, k: int, j: int, iface: int,
                   sender: str | None = None) -> WrMessage:
        deadline = time.monotonic() + self.timeout
        with self._lock:
            box = self._boxes[worker_id]
            while True:
                if self._aborted is not None:
                    raise RunAborted(str(self._aborted))
                for idx, msg in enumerate(box.messages):
                    if (msg.kind is kind and msg.k == k and msg.j == j
                            and msg.iface == iface
                            and (sender is None or msg.sender == sender)):
                        return box.messages.pop(idx)
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise DeadlockError(
                        f"{worker_id} timed out waiting for "
                        f"(kind={kind.value}, k={k}, j={j}, iface={iface}, sender={sender})"
                    )
                box.cond.wait(remaining)

    def abort(self, exc: Exception) -> None:
        with self._lock:
            self._aborted = exc
            for box in self._boxes.values():
                box.cond.notify_all()

    def assert_drained(self) -> None:
        with self._lock:
            leftovers = {wid: len(b.messages) for wid, b in self._boxes.items() if b.messages}
        if leftovers:
            raise TransportError(f"unconsumed messages at shutdown: {leftovers}")

    def dump_trace_csv(self, path) -> None:
        if self.trace is None:
            raise TransportError("run was not traced; pass record_trace=True")
        with open(path, "w") as fh:
            fh.write("k,j,i,kind,sender,receiver,words\n")
            for r in self.trace:
                fh.write(f"{r.k},{r.j},{r.iface},{r.kind},{r.sender},{r.receiver},{r.words}\n")


class WorkerPool:
    """Spawns worker threads; any failure aborts the router and re-raises."""

    def __init__(self, router: Router):
        self.router = router
        self._threads: list[threading.Thread] = []
        self._errors: list[Exception] = []
        self._err_lock = threading.Lock()

    def spawn(self, name: str, fn, *args) -> None:
        def run():
            try:
                fn(*args)
            except RunAborted:
                pass
            except Exception as exc:  # noqa: BLE001 - propagate to caller
                with self._err_lock:
                    self._errors.append(exc)
                self.router.abort(exc)

        t = threading.Thread(target=run, name=name, daemon=True)
        self._threads.append(t)
        t.start()

    def join_all(self) -> None:
        for t in self._threads:
            t.join()
        if self._errors:
            raise self._errors[0]
