"""Bell pairs, amplitude-imbalanced (noisy) EPR pairs, and the two
teleportation protocols.

Standard protocol register: [q0 = payload, q1 = Alice's pair half,
q2 = Bob's pair half]; circuit CNOT(q0->q1), H(q0), measure q0 and q1,
then a conditional Z/X correction on q2 driven by the two transmitted
disambiguation bits.

Simplified protocol register: [q0, q1 = pair, q2 = payload]; circuit
CNOT(q0->q1), H(q0), then strict resets of q0 and q1. No classical bits
travel and Bob applies nothing.

Disambiguation-bit naming: b1 is the measurement of q1 and drives the X
correction; b2 is the measurement of q0 and drives the Z correction. The
mapping is pinned by the correctness property (corrected state equals the
payload for every outcome) and exercised branch-by-branch in the tests.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CORRUPT_NORM,
    GATE_H,
    GATE_X,
    GATE_Z,
    SQRT2_INV,
    DensityMatrix2,
    PureQubit,
    RandomSource,
    StateVector,
    apply_1q,
    apply_cnot,
    fidelity,
    measure_qubit,
    reduced_density,
    reset_qubit,
    tensor,
)


class BellLabel(enum.Enum):
    """The four Bell basis states, keyed by their (b1, b2) bit labels."""

    PHI_PLUS = (0, 0)
    PHI_MINUS = (1, 0)
    PSI_PLUS = (0, 1)
    PSI_MINUS = (1, 1)


_BELL_AMPS = {
    BellLabel.PHI_PLUS: (SQRT2_INV, 0.0, 0.0, SQRT2_INV),
    BellLabel.PHI_MINUS: (SQRT2_INV, 0.0, 0.0, -SQRT2_INV),
    BellLabel.PSI_PLUS: (0.0, SQRT2_INV, SQRT2_INV, 0.0),
    BellLabel.PSI_MINUS: (0.0, SQRT2_INV, -SQRT2_INV, 0.0),
}


def bell_state(label: BellLabel) -> StateVector:
    """One of the four maximally entangled two-qubit states."""
    return StateVector(_BELL_AMPS[label])


@dataclass(frozen=True)
class NoisyEprParams:
    """Amplitudes of an imbalanced pair A|00> + B|11> with |A|^2+|B|^2 = 1."""

    a: complex
    b: complex

    def __post_init__(self):
        s = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(s - 1.0) > CORRUPT_NORM:
            raise ValueError(f"|A|^2 + |B|^2 = {s}, expected 1")

    @classmethod
    def from_a(cls, a: float) -> "NoisyEprParams":
        """Real-positive completion B = sqrt(1 - A^2) for A in (0, 1]."""
        if not 0.0 < a <= 1.0:
            raise ValueError(f"A = {a} outside (0, 1]")
        return cls(a, math.sqrt(max(0.0, 1.0 - a * a)))

    @property
    def is_noisy(self) -> bool:
        return abs(self.a - SQRT2_INV) > 1e-12 or abs(self.b - SQRT2_INV) > 1e-12


def noisy_epr(params: NoisyEprParams) -> StateVector:
    """The pair A|00> + B|11>."""
    return StateVector([params.a, 0.0, 0.0, params.b])


def balanced_epr() -> StateVector:
    """The default resource pair (|00> + |11>)/sqrt(2)."""
    return bell_state(BellLabel.PHI_PLUS)


@dataclass
class TeleportOutcome:
    """Result of one standard-protocol run, with every intermediate state."""

    b1: int
    b2: int
    bob_pre_correction: DensityMatrix2
    bob_final: DensityMatrix2
    fidelity_vs_input: float
    trace: list[tuple[str, StateVector]]
    classical_bits_sent: int = 2


@dataclass
class SimplifiedTrace:
    """Result of one simplified-protocol run."""

    psi0: StateVector
    psi1: StateVector
    post_hadamard: StateVector
    post_reset: StateVector
    bob_final: DensityMatrix2
    fidelity_vs_input: float
    unnormalized_factor_note: str
    classical_bits_sent: int = 0


def _require_pair(epr: StateVector) -> None:
    if epr.n != 2:
        raise ValueError(f"resource pair must be a 2-qubit state, got {epr.n} qubits")


def _project_outcome(state: StateVector, qubit: int, value: int) -> StateVector:
    """Force one measurement branch. Errors on a zero-norm branch."""
    t = state.amps.reshape(1 << qubit, 2, -1).copy()
    t[:, 1 - value, :] = 0.0
    flat = t.reshape(-1)
    nrm = np.linalg.norm(flat)
    if nrm < CORRUPT_NORM:
        raise ValueError(f"forced outcome {value} on qubit {qubit} has zero probability")
    return StateVector(flat / nrm, copy=False)


def standard_correction(bob, b1: int, b2: int, qubit: int = -1):
    """Bob's conditional recovery: Z if b2, then X if b1.

    Accepts either a full register (correction applied to `qubit`, default
    the last one) or a bare PureQubit; returns the same kind.
    """
    if b1 not in (0, 1) or b2 not in (0, 1):
        raise ValueError("disambiguation bits must be 0 or 1")
    if isinstance(bob, PureQubit):
        alpha, beta = bob.alpha, bob.beta
        if b2:
            beta = -beta
        if b1:
            alpha, beta = beta, alpha
        return PureQubit(alpha, beta)
    q = qubit % bob.n
    out = bob
    if b2:
        out = apply_1q(out, GATE_Z, q)
    if b1:
        out = apply_1q(out, GATE_X, q)
    return out


def teleport_standard(
    psi: PureQubit,
    epr: StateVector,
    rng: RandomSource | None = None,
    forced_outcome: tuple[int, int] | None = None,
) -> TeleportOutcome:
    """Run the standard protocol once.

    Measurement results are sampled from `rng` unless `forced_outcome`
    injects a specific (b1, b2) branch, which the tests use to enumerate
    all four corrections.
    """
    _require_pair(epr)
    psi0 = tensor(psi.as_state(), epr)
    psi1 = apply_cnot(psi0, 0, 1)
    psi2 = apply_1q(psi1, GATE_H, 0)

    if forced_outcome is not None:
        b1, b2 = forced_outcome
        post = _project_outcome(psi2, 0, b2)
        post = _project_outcome(post, 1, b1)
    else:
        if rng is None:
            raise ValueError("either rng or forced_outcome is required")
        m0, post = measure_qubit(psi2, 0, rng)
        m1, post = measure_qubit(post, 1, rng)
        b1, b2 = m1, m0

    bob_pre = reduced_density(post, 2)
    corrected = standard_correction(post, b1, b2, qubit=2)
    bob_final = reduced_density(corrected, 2)
    return TeleportOutcome(
        b1=b1,
        b2=b2,
        bob_pre_correction=bob_pre,
        bob_final=bob_final,
        fidelity_vs_input=fidelity(psi, bob_final),
        trace=[
            ("psi0", psi0),
            ("psi1", psi1),
            ("psi2", psi2),
            ("post-measure", post),
            ("post-correction", corrected),
        ],
    )


def teleport_simplified(psi: PureQubit, epr: StateVector, rng: RandomSource) -> SimplifiedTrace:
    """Run the simplified protocol once. Sends zero classical bits."""
    _require_pair(epr)
    psi0 = tensor(epr, psi.as_state())
    psi1 = apply_cnot(psi0, 0, 1)
    post_h = apply_1q(psi1, GATE_H, 0)
    post_reset = reset_qubit(post_h, 0, rng)
    post_reset = reset_qubit(post_reset, 1, rng)

    a, b = complex(epr.amps[0]), complex(epr.amps[3])
    fmt = lambda z: f"{z.real:.6g}" if abs(z.imag) < 1e-15 else f"({z.real:.6g}{z.imag:+.6g}j)"
    note = (
        f"pair branch factor C = {fmt(a)}|00> + {fmt(b)}|10> before the resets; "
        f"{'imbalanced' if abs(a - b) > 1e-12 else 'balanced'} resource"
    )
    bob_final = reduced_density(post_reset, 2)
    return SimplifiedTrace(
        psi0=psi0,
        psi1=psi1,
        post_hadamard=post_h,
        post_reset=post_reset,
        bob_final=bob_final,
        fidelity_vs_input=fidelity(psi, bob_final),
        unnormalized_factor_note=note,
    )


def standard_noisy_fidelity_oracle(
    psi: PureQubit, params: NoisyEprParams, outcome: tuple[int, int]
) -> float:
    """Closed-form branch fidelity of the corrected standard protocol.

    Independent of the simulator: evaluated directly from the collapsed
    branch amplitudes for real alpha, beta, A, B. The fidelity depends only
    on b1 (the X-driving bit); the Z correction cancels the branch sign.
    """
    for name, v in (("alpha", psi.alpha), ("beta", psi.beta), ("A", params.a), ("B", params.b)):
        if abs(complex(v).imag) > 1e-12:
            raise ValueError(f"oracle requires real {name}")
    alpha, beta = complex(psi.alpha).real, complex(psi.beta).real
    a, b = complex(params.a).real, complex(params.b).real
    b1, b2 = outcome
    if b1 not in (0, 1) or b2 not in (0, 1):
        raise ValueError("outcome bits must be 0 or 1")
    if b1 == 0:
        num = a * alpha**2 + b * beta**2
        den = a**2 * alpha**2 + b**2 * beta**2
    else:
        num = b * alpha**2 + a * beta**2
        den = b**2 * alpha**2 + a**2 * beta**2
    if den < 1e-18:
        raise ValueError(f"outcome {outcome} is a zero-norm branch for this input")
    return num**2 / den


@dataclass
class TeleportedBit:
    """One payload bit pushed through a protocol and read out by Bob."""

    sent: int
    received: int
    disambiguation: tuple[int, int] | None  # None for the simplified protocol


def teleport_bit(bit: int, protocol: str, epr: StateVector, rng: RandomSource) -> TeleportedBit:
    """Teleport a single classical bit embedded as the basis state |bit>.

    This is the canonical per-bit circuit the networked demo replays
    command-for-command: it consumes exactly three rng draws (two Alice
    measurements plus Bob's readout for `standard`; two resets plus the
    readout for `simplified`).
    """
    if bit not in (0, 1):
        raise ValueError(f"bit value {bit!r} is not 0 or 1")
    _require_pair(epr)
    psi = PureQubit(1.0 - bit, bit)
    if protocol == "standard":
        state = tensor(psi.as_state(), epr)
        state = apply_cnot(state, 0, 1)
        state = apply_1q(state, GATE_H, 0)
        m0, state = measure_qubit(state, 0, rng)
        m1, state = measure_qubit(state, 1, rng)
        b1, b2 = m1, m0
        state = standard_correction(state, b1, b2, qubit=2)
        received, _ = measure_qubit(state, 2, rng)
        return TeleportedBit(bit, received, (b1, b2))
    if protocol == "simplified":
        state = tensor(epr, psi.as_state())
        state = apply_cnot(state, 0, 1)
        state = apply_1q(state, GATE_H, 0)
        state = reset_qubit(state, 0, rng)
        state = reset_qubit(state, 1, rng)
        received, _ = measure_qubit(state, 2, rng)
        return TeleportedBit(bit, received, None)
    raise ValueError(f"unknown protocol {protocol!r}")


def export_trace(snapshots: list[tuple[str, StateVector]]) -> str:
    """Concatenated debug dumps of named snapshots, for golden-file tests."""
    from .core import dump_state

    parts = []
    for name, sv in snapshots:
        parts.append(f"# {name}\n{dump_state(sv)}")
    return "".join(parts)
