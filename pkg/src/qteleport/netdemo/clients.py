"""Alice and Bob protocol clients.

Alice drives the fabric through the same per-bit circuits as the in-process
protocols and signals Bob over a direct peer link. That link carries
control-plane coordination (session info, per-qubit READY, ACK) plus, for
the standard protocol only, one CLASSICAL message with the two
disambiguation payload bits per teleported qubit. The fabric never sees
classical traffic; the audit counts CLASSICAL payloads alone, which is
exactly where the two protocols differ.

Per-bit command order matches `protocols.teleport_bit` draw-for-draw, so a
fabric seeded like an in-process run reproduces its bits exactly.
"""
from __future__ import annotations

import socket
from dataclasses import dataclass, field

from .framing import recv_msg, send_msg

IO_TIMEOUT = 60.0


class SessionAborted(RuntimeError):
    """Connection loss or peer failure; carries the partial transcript."""

    def __init__(self, message: str, transcript: list):
        super().__init__(message)
        self.transcript = transcript


def _parse_addr(addr) -> tuple[str, int]:
    if isinstance(addr, tuple):
        return addr
    host, _, port = str(addr).rpartition(":")
    return (host or "127.0.0.1", int(port))


class _Link:
    """Socket wrapper that records every message into a transcript."""

    def __init__(self, sock: socket.socket, name: str, transcript: list):
        sock.settimeout(IO_TIMEOUT)
        self.sock = sock
        self.name = name
        self.transcript = transcript

    def send(self, msg: dict) -> None:
        try:
            send_msg(self.sock, msg)
        except OSError as exc:
            self.transcript.append({"event": "aborted", "link": self.name, "reason": str(exc)})
            raise SessionAborted(f"{self.name} link lost: {exc}", self.transcript) from exc
        self.transcript.append({"link": self.name, "dir": "send", "msg": msg})

    def recv(self) -> dict:
        try:
            msg = recv_msg(self.sock)
        except OSError as exc:
            self.transcript.append({"event": "aborted", "link": self.name, "reason": str(exc)})
            raise SessionAborted(f"{self.name} link lost: {exc}", self.transcript) from exc
        if msg is None:
            self.transcript.append({"event": "aborted", "link": self.name, "reason": "closed"})
            raise SessionAborted(f"{self.name} link closed early", self.transcript)
        self.transcript.append({"link": self.name, "dir": "recv", "msg": msg})
        return msg

    def request(self, msg: dict) -> dict:
        self.send(msg)
        reply = self.recv()
        if reply.get("type") == "ERROR":
            raise SessionAborted(f"fabric error: {reply.get('error')}", self.transcript)
        return reply

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


@dataclass
class ClientResult:
    role: str
    session: int
    bits: list[int]
    transcript: list = field(default_factory=list)


def run_alice(fabric_addr, bob_addr, protocol: str, bits, noise_a: float | None = None) -> ClientResult:
    """Teleport a bit sequence; returns the transcript and the sent bits."""
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0/1")
    transcript: list = []
    fabric = _Link(socket.create_connection(_parse_addr(fabric_addr)), "fabric", transcript)
    peer = _Link(socket.create_connection(_parse_addr(bob_addr)), "peer", transcript)
    try:
        fabric.request({"type": "HELLO", "role": "alice"})
        reply = fabric.request(
            {"type": "NEW_SESSION", "protocol": protocol, "noise_A": noise_a}
        )
        session = reply["session"]
        peer.send(
            {"type": "SESSION_INFO", "session": session, "protocol": protocol, "count": len(bits)}
        )
        for i, bit in enumerate(bits):
            if protocol == "standard":
                q_psi = fabric.request(
                    {
                        "type": "ALLOC_QUBIT",
                        "session": session,
                        "alpha_re": 1.0 - bit,
                        "alpha_im": 0.0,
                        "beta_re": float(bit),
                        "beta_im": 0.0,
                    }
                )["q"]
                epr = fabric.request({"type": "ALLOC_EPR", "session": session})
                q_alice, q_bob = epr["q_alice"], epr["q_bob"]
                fabric.request(
                    {"type": "APPLY", "session": session, "gate": "CNOT", "qubits": [q_psi, q_alice]}
                )
                fabric.request(
                    {"type": "APPLY", "session": session, "gate": "H", "qubits": [q_psi]}
                )
                m0 = fabric.request({"type": "MEASURE", "session": session, "qubit": q_psi})["bit"]
                m1 = fabric.request({"type": "MEASURE", "session": session, "qubit": q_alice})["bit"]
                peer.send({"type": "READY", "index": i, "qubit": q_bob})
                peer.send({"type": "CLASSICAL", "b1": m1, "b2": m0})
            else:
                epr = fabric.request({"type": "ALLOC_EPR", "session": session})
                q0, q1 = epr["q_alice"], epr["q_bob"]
                q_psi = fabric.request(
                    {
                        "type": "ALLOC_QUBIT",
                        "session": session,
                        "alpha_re": 1.0 - bit,
                        "alpha_im": 0.0,
                        "beta_re": float(bit),
                        "beta_im": 0.0,
                    }
                )["q"]
                fabric.request({"type": "APPLY", "session": session, "gate": "H", "qubits": [q0]})
                fabric.request({"type": "RESET", "session": session, "qubit": q0})
                fabric.request({"type": "RESET", "session": session, "qubit": q1})
                peer.send({"type": "READY", "index": i, "qubit": q_psi})
            ack = peer.recv()
            if ack.get("type") != "ACK" or ack.get("index") != i:
                raise SessionAborted(f"bad ack for qubit {i}: {ack}", transcript)
        peer.send({"type": "DONE"})
        fabric.request({"type": "BYE"})
        return ClientResult("alice", session, bits, transcript)
    finally:
        fabric.close()
        peer.close()


def run_bob(listen, fabric_addr, protocol: str) -> ClientResult:
    """Receive one session of teleported bits.

    `listen` is a `host:port` string or an already-bound listening socket
    (handy for ephemeral ports in tests).
    """
    transcript: list = []
    if isinstance(listen, socket.socket):
        server = listen
        own_server = False
    else:
        server = socket.create_server(_parse_addr(listen))
        own_server = True
    server.settimeout(IO_TIMEOUT)
    try:
        conn, _ = server.accept()
    finally:
        if own_server:
            server.close()
    peer = _Link(conn, "peer", transcript)
    fabric = _Link(socket.create_connection(_parse_addr(fabric_addr)), "fabric", transcript)
    try:
        info = peer.recv()
        if info.get("type") != "SESSION_INFO":
            raise SessionAborted(f"expected SESSION_INFO, got {info}", transcript)
        if info.get("protocol") != protocol:
            raise SessionAborted(
                f"protocol mismatch: peer runs {info.get('protocol')!r}, we run {protocol!r}",
                transcript,
            )
        session = info["session"]
        count = info["count"]
        fabric.request({"type": "HELLO", "role": "bob"})
        received: list[int] = []
        for i in range(count):
            ready = peer.recv()
            if ready.get("type") != "READY" or ready.get("index") != i:
                raise SessionAborted(f"expected READY {i}, got {ready}", transcript)
            qubit = ready["qubit"]
            if protocol == "standard":
                classical = peer.recv()
                if classical.get("type") != "CLASSICAL":
                    raise SessionAborted(f"expected CLASSICAL, got {classical}", transcript)
                b1, b2 = classical["b1"], classical["b2"]
                if b2:
                    fabric.request(
                        {"type": "APPLY", "session": session, "gate": "Z", "qubits": [qubit]}
                    )
                if b1:
                    fabric.request(
                        {"type": "APPLY", "session": session, "gate": "X", "qubits": [qubit]}
                    )
            bit = fabric.request({"type": "MEASURE", "session": session, "qubit": qubit})["bit"]
            received.append(bit)
            peer.send({"type": "ACK", "index": i})
        done = peer.recv()
        if done.get("type") != "DONE":
            raise SessionAborted(f"expected DONE, got {done}", transcript)
        fabric.request({"type": "BYE"})
        return ClientResult("bob", session, received, transcript)
    finally:
        fabric.close()
        peer.close()
