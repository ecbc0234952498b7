"""Entanglement-fabric broker: owns each session's joint statevector and
enforces locality (a client may only drive qubits it owns).

Sessions keep at most one in-flight 3-qubit register: a measured or reset
qubit collapses to a basis state, is recorded, and its axis is dropped, so
arbitrarily many payload qubits stream through one session.

For simplified-protocol sessions the pair-internal CNOT is not local to
either party, so the fabric applies it itself while embedding the payload
(entanglement distribution with embedding); ownership is assigned only
afterwards, which keeps the locality audit meaningful.
"""
from __future__ import annotations

import os
import random
import socketserver
import threading

import numpy as np

from ..core import (
    GATES,
    StateVector,
    apply_1q,
    apply_cnot,
    measure_qubit,
    reduced_density,
    tensor,
)
from ..protocols import NoisyEprParams, balanced_epr, noisy_epr
from ..seeding import derive_seed
from .framing import recv_msg, send_msg

ENV_SEED = "QTELEPORT_SEED"


class FabricError(Exception):
    """Raised by session handlers; reported to the client as an error reply."""


class Session:
    """One protocol session: joint state, ownership ledger, seeded rng."""

    def __init__(self, session_id: int, protocol: str, noise_a: float | None, seed: int):
        if protocol not in ("standard", "simplified"):
            raise FabricError(f"unknown protocol {protocol!r}")
        if noise_a is not None and not 0.0 < noise_a <= 1.0:
            raise FabricError(f"noise amplitude {noise_a} outside (0, 1]")
        self.session_id = session_id
        self.protocol = protocol
        self.noise_a = noise_a
        self.rng = random.Random(seed)
        self.state: StateVector | None = None
        self.handles: list[int] = []  # live handles in axis order
        self.owner: dict[int, str] = {}
        self.retired: dict[int, int] = {}
        self.pending_pair: tuple[int, int] | None = None
        self.classical_bits_observed = 0  # filled from transcripts, never by the fabric
        self._next_handle = 0
        self.lock = threading.Lock()

    # -- register plumbing -------------------------------------------------

    def _new_handle(self) -> int:
        h = self._next_handle
        self._next_handle += 1
        return h

    def _extend(self, piece: StateVector, count: int) -> list[int]:
        self.state = piece if self.state is None else tensor(self.state, piece)
        new = [self._new_handle() for _ in range(count)]
        self.handles.extend(new)
        return new

    def _axis(self, handle: int) -> int:
        try:
            return self.handles.index(handle)
        except ValueError:
            raise FabricError(f"unknown or retired qubit {handle}") from None

    def _retire(self, handle: int, value: int) -> None:
        axis = self._axis(handle)
        assert self.state is not None
        n = self.state.n
        if n == 1:
            self.state = None
        else:
            t = self.state.amps.reshape([2] * n)
            self.state = StateVector(np.take(t, value, axis=axis).reshape(-1), copy=True)
        self.handles.remove(handle)
        self.retired[handle] = value
        self.owner.pop(handle, None)

    def _check_owner(self, role: str, handles) -> None:
        for h in handles:
            if self.owner.get(h) != role:
                raise FabricError(
                    f"locality violation: {role} does not own qubit {h}"
                )

    # -- commands ----------------------------------------------------------

    def epr_state(self) -> StateVector:
        if self.noise_a is None:
            return balanced_epr()
        return noisy_epr(NoisyEprParams.from_a(self.noise_a))

    def alloc_epr(self, role: str) -> dict:
        q0, q1 = self._extend(self.epr_state(), 2)
        if self.protocol == "simplified":
            # Both halves end up on Alice's side; she blocks them by reset.
            self.owner[q0] = "alice"
            self.owner[q1] = "alice"
            self.pending_pair = (q0, q1)
        else:
            self.owner[q0] = "alice"
            self.owner[q1] = "bob"
        return {"type": "EPR", "q_alice": q0, "q_bob": q1}

    def alloc_qubit(self, role: str, alpha: complex, beta: complex) -> dict:
        if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-9:
            raise FabricError("payload amplitudes are not normalized")
        (q,) = self._extend(StateVector([alpha, beta]), 1)
        if self.protocol == "simplified":
            if self.pending_pair is None:
                raise FabricError("no pair awaiting embedding")
            p0, p1 = self.pending_pair
            assert self.state is not None
            self.state = apply_cnot(self.state, self._axis(p0), self._axis(p1))
            self.pending_pair = None
            self.owner[q] = "bob"  # delivery slot
        else:
            self.owner[q] = role
        return {"type": "QUBIT", "q": q}

    def apply_gate(self, role: str, gate: str, qubits) -> dict:
        if self.state is None:
            raise FabricError("no live qubits")
        self._check_owner(role, qubits)
        if gate == "CNOT":
            if len(qubits) != 2:
                raise FabricError("CNOT takes exactly two qubits")
            self.state = apply_cnot(self.state, self._axis(qubits[0]), self._axis(qubits[1]))
        elif gate in GATES and gate != "I":
            if len(qubits) != 1:
                raise FabricError(f"{gate} takes exactly one qubit")
            self.state = apply_1q(self.state, GATES[gate], self._axis(qubits[0]))
        else:
            raise FabricError(f"unknown gate {gate!r}")
        return {"type": "OK"}

    def measure(self, role: str, handle: int) -> dict:
        if handle in self.retired:
            # Re-reading a collapsed qubit is deterministic.
            return {"type": "RESULT", "bit": self.retired[handle]}
        self._check_owner(role, [handle])
        assert self.state is not None
        bit, self.state = measure_qubit(self.state, self._axis(handle), self.rng)
        self._retire(handle, bit)
        return {"type": "RESULT", "bit": bit}

    def reset(self, role: str, handle: int) -> dict:
        if handle in self.retired:
            raise FabricError(f"qubit {handle} already retired")
        self._check_owner(role, [handle])
        assert self.state is not None
        bit, self.state = measure_qubit(self.state, self._axis(handle), self.rng)
        # measure-then-flip; the retired record is |0> either way
        self._retire(handle, bit)
        self.retired[handle] = 0
        return {"type": "OK"}

    def read_rho(self, handle: int) -> dict:
        if handle in self.retired:
            bit = self.retired[handle]
            rho = np.zeros((2, 2), dtype=complex)
            rho[bit, bit] = 1.0
        else:
            assert self.state is not None
            rho = reduced_density(self.state, self._axis(handle)).mat
        flat = [[float(z.real), float(z.imag)] for z in rho.reshape(-1)]
        return {"type": "RHO", "rho": flat}


class Fabric:
    """Session registry plus the request dispatcher."""

    def __init__(self, master_seed: int | None = None):
        if master_seed is None:
            env = os.environ.get(ENV_SEED)
            master_seed = int(env) if env else random.SystemRandom().getrandbits(62)
        self.master_seed = master_seed
        self.sessions: dict[int, Session] = {}
        self._next_session = 0
        self._lock = threading.Lock()

    def new_session(self, protocol: str, noise_a: float | None) -> Session:
        with self._lock:
            sid = self._next_session
            self._next_session += 1
        session = Session(sid, protocol, noise_a, derive_seed(self.master_seed, "session", sid))
        with self._lock:
            self.sessions[sid] = session
        return session

    def _session(self, msg: dict) -> Session:
        sid = msg.get("session")
        with self._lock:
            session = self.sessions.get(sid)
        if session is None:
            raise FabricError(f"unknown session {sid!r}")
        return session

    def handle(self, msg: dict, conn: dict) -> dict:
        """Process one request; always returns exactly one reply object."""
        try:
            mtype = msg.get("type")
            if mtype == "HELLO":
                role = msg.get("role")
                if role not in ("alice", "bob"):
                    raise FabricError(f"unknown role {role!r}")
                conn["role"] = role
                return {"type": "WELCOME"}
            if mtype == "BYE":
                conn["done"] = True
                return {"type": "BYE"}
            role = conn.get("role")
            if role is None:
                raise FabricError("HELLO required before other commands")
            if mtype == "NEW_SESSION":
                session = self.new_session(msg.get("protocol"), msg.get("noise_A"))
                return {"type": "SESSION", "session": session.session_id}
            if mtype not in ("ALLOC_EPR", "ALLOC_QUBIT", "APPLY", "MEASURE", "RESET", "READ_RHO"):
                raise FabricError(f"unknown message type {mtype!r}")
            session = self._session(msg)
            with session.lock:
                if mtype == "ALLOC_EPR":
                    return session.alloc_epr(role)
                if mtype == "ALLOC_QUBIT":
                    alpha = complex(msg.get("alpha_re", 0.0), msg.get("alpha_im", 0.0))
                    beta = complex(msg.get("beta_re", 0.0), msg.get("beta_im", 0.0))
                    return session.alloc_qubit(role, alpha, beta)
                if mtype == "APPLY":
                    return session.apply_gate(role, msg.get("gate"), msg.get("qubits", []))
                if mtype == "MEASURE":
                    return session.measure(role, msg.get("qubit"))
                if mtype == "RESET":
                    return session.reset(role, msg.get("qubit"))
                if mtype == "READ_RHO":
                    return session.read_rho(msg.get("qubit"))
            raise AssertionError("unreachable")
        except FabricError as exc:
            return {"type": "ERROR", "error": str(exc)}
        except Exception as exc:  # keep the connection alive on bad input
            return {"type": "ERROR", "error": f"internal: {exc}"}


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        conn: dict = {}
        fabric: Fabric = self.server.fabric  # type: ignore[attr-defined]
        while not conn.get("done"):
            try:
                msg = recv_msg(self.request)
            except Exception:
                break
            if msg is None:
                break
            send_msg(self.request, fabric.handle(msg, conn))


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class FabricServer:
    """TCP front end; `start()` serves on a background thread."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, master_seed: int | None = None):
        self.fabric = Fabric(master_seed)
        self._server = _Server((host, port), _Handler)
        self._server.fabric = self.fabric  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> "FabricServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def shutdown(self) -> None:
        self._server.shutdown()
        self._server.server_close()


def serve_fabric(bind: str, master_seed: int | None = None) -> FabricServer:
    """Bind and return a running fabric (`host:port`, port 0 = ephemeral)."""
    host, _, port = bind.rpartition(":")
    server = FabricServer(host or "127.0.0.1", int(port), master_seed)
    return server.start()
