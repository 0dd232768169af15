import numpy as np
import pytest

from pipewr.transport import (
    DeadlockError,
    MsgKind,
    Router,
    TransportError,
    WorkerPool,
    WrMessage,
)


def _msg(kind, k, j, iface, sender, receiver, payload):
    return WrMessage(kind=kind, k=k, j=j, iface=iface, sender=sender,
                     receiver=receiver, payload=payload)


def test_loopback_identity():
    r = Router()
    r.register("a", column=1)
    r.register("b", column=2)
    payload = np.array([1.0, 2.0, 3.0])
    r.send(_msg(MsgKind.DIRICHLET_TRACE, 1, 1, 1, "a", "b", payload))
    got = r.recv_match("b", MsgKind.DIRICHLET_TRACE, 1, 1, 1)
    assert np.array_equal(got.payload, payload)


def test_fifo_per_sender_receiver_pair():
    r = Router()
    r.register("a", column=1)
    r.register("b", column=2)
    r.send(_msg(MsgKind.NEUMANN_FLUX, 1, 1, 1, "a", "b", np.array([1.0])))
    r.send(_msg(MsgKind.NEUMANN_FLUX, 1, 2, 1, "a", "b", np.array([2.0])))
    first = r.recv_match("b", MsgKind.NEUMANN_FLUX, 1, 1, 1)
    second = r.recv_match("b", MsgKind.NEUMANN_FLUX, 1, 2, 1)
    assert first.payload[0] == 1.0 and second.payload[0] == 2.0


def test_out_of_order_match_does_not_stall():
    r = Router()
    r.register("a", column=1)
    r.register("b", column=2)
    r.send(_msg(MsgKind.NEUMANN_FLUX, 2, 1, 1, "a", "b", np.array([9.0])))
    r.send(_msg(MsgKind.DIRICHLET_TRACE, 1, 1, 1, "a", "b", np.array([5.0])))
    # match the later-sent message first
    got = r.recv_match("b", MsgKind.DIRICHLET_TRACE, 1, 1, 1)
    assert got.payload[0] == 5.0
    got = r.recv_match("b", MsgKind.NEUMANN_FLUX, 2, 1, 1)
    assert got.payload[0] == 9.0


def test_flag_message_counts_zero_words():
    r = Router()
    r.register("a", column=1)
    r.register("b", column=2)
    r.send(_msg(MsgKind.CONVERGENCE_FLAG, 1, 0, 1, "a", "b", None))
    got = r.recv_match("b", MsgKind.CONVERGENCE_FLAG, 1, 0, 1)
    assert got.payload is None
    d = r.counter.as_dict()
    assert d["flag_messages"] == 1
    assert d["data_messages"] == 0
    assert d["data_words"] == 0


def test_cross_column_vs_local_accounting():
    r = Router()
    r.register("a", column=1)
    r.register("b", column=2)
    r.register("a2", column=1)
    r.send(_msg(MsgKind.DIRICHLET_TRACE, 1, 1, 1, "a", "b", np.zeros(4)))
    r.send(_msg(MsgKind.PREV_TRACE, 1, 1, 1, "a", "a2", np.zeros(4)))
    d = r.counter.as_dict()
    assert d["data_messages"] == 1 and d["data_words"] == 4
    assert d["local_messages"] == 1 and d["local_words"] == 4


def test_unregistered_endpoint_rejected():
    r = Router()
    r.register("a", column=1)
    with pytest.raises(TransportError):
        r.send(_msg(MsgKind.DIRICHLET_TRACE, 1, 1, 1, "a", "nobody", np.zeros(2)))


def test_deadlock_diagnostic_names_expected_tag():
    r = Router(timeout=0.05)
    r.register("a", column=1)
    with pytest.raises(DeadlockError) as exc:
        r.recv_match("a", MsgKind.NEUMANN_FLUX, 3, 7, 2)
    text = str(exc.value)
    assert "neumann_flux" in text and "k=3" in text and "j=7" in text


def test_drained_check():
    r = Router()
    r.register("a", column=1)
    r.register("b", column=2)
    r.send(_msg(MsgKind.DIRICHLET_TRACE, 1, 1, 1, "a", "b", np.zeros(2)))
    with pytest.raises(TransportError):
        r.assert_drained()
    r.recv_match("b", MsgKind.DIRICHLET_TRACE, 1, 1, 1)
    r.assert_drained()


def test_trace_csv_header_and_rows(tmp_path):
    r = Router(record_trace=True)
    r.register("a", column=1)
    r.register("b", column=2)
    r.send(_msg(MsgKind.NEUMANN_FLUX, 2, 3, 1, "a", "b", np.zeros(5)))
    r.recv_match("b", MsgKind.NEUMANN_FLUX, 2, 3, 1)
    out = tmp_path / "trace.csv"
    r.dump_trace_csv(out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "k,j,i,kind,sender,receiver,words"
    assert lines[1] == "2,3,1,neumann_flux,a,b,5"


def test_worker_failure_aborts_run():
    r = Router(timeout=5.0)
    r.register("good", column=1)
    r.register("bad", column=2)
    pool = WorkerPool(r)

    def bad_worker():
        raise ValueError("boom")

    def good_worker():
        # would block forever if the failure were not propagated
        r.recv_match("good", MsgKind.DIRICHLET_TRACE, 1, 1, 1)

    pool.spawn("good", good_worker)
    pool.spawn("bad", bad_worker)
    with pytest.raises(ValueError, match="boom"):
        pool.join_all()
