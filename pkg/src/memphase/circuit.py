"""Minimal density-matrix circuit layer for the three-qubit phase code.

Register layout is fixed as (R, Q, A, B) = positions (0, 1, 2, 3): R is the
reference qubit purifying the source and is never touched by gates or by the
channel; Q carries the logical qubit; A and B are the code ancillas.

Encoding copies Q onto A and B with CNOTs and rotates all three code qubits
to the +/- basis with Hadamards, so that dephasing during transmission acts
like bit flips on the codewords.  Decoding rotates back, uncopies, and
applies a Toffoli that coherently corrects the single-flip syndromes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DensityMatrix
from .errors import DimensionMismatch, PositionOutOfRange

__all__ = [
    "Gate",
    "hadamard",
    "cnot",
    "toffoli",
    "gate_unitary",
    "JointState",
    "prepare_bell_with_ancillas",
    "apply_gate",
    "apply_pauli_z",
    "tqc_encode",
    "tqc_decode",
    "partial_trace",
    "bell_state_rq",
    "entanglement_fidelity",
]

_H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One of Hadamard / CNOT / Toffoli at explicit register positions."""

    kind: str
    target: int
    controls: tuple[int, ...] = ()

    _N_CONTROLS = {"h": 0, "cnot": 1, "toffoli": 2}

    def __post_init__(self):
        if self.kind not in self._N_CONTROLS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if len(self.controls) != self._N_CONTROLS[self.kind]:
            raise ValueError(
                f"{self.kind} takes {self._N_CONTROLS[self.kind]} controls, "
                f"got {self.controls}"
            )
        if len({self.target, *self.controls}) != 1 + len(self.controls):
            raise ValueError(f"gate positions must be distinct: {self}")


def hadamard(target: int) -> Gate:
    return Gate("h", target)


def cnot(control: int, target: int) -> Gate:
    return Gate("cnot", target, (control,))


def toffoli(control1: int, control2: int, target: int) -> Gate:
    return Gate("toffoli", target, (control1, control2))


def gate_unitary(gate: Gate, n_qubits: int) -> np.ndarray:
    """Dense 2^n x 2^n unitary of the gate embedded at its positions."""
    for p in (gate.target, *gate.controls):
        if not 0 <= p < n_qubits:
            raise PositionOutOfRange(f"position {p} outside register of {n_qubits}")
    dim = 1 << n_qubits
    if gate.kind == "h":
        u = np.array([[1.0 + 0j]])
        for p in range(n_qubits):
            u = np.kron(u, _H2 if p == gate.target else np.eye(2))
        return u
    # controlled flips are permutations of the basis
    u = np.zeros((dim, dim))
    t_bit = n_qubits - 1 - gate.target
    c_mask = 0
    for c in gate.controls:
        c_mask |= 1 << (n_qubits - 1 - c)
    for i in range(dim):
        j = i ^ (1 << t_bit) if (i & c_mask) == c_mask else i
        u[j, i] = 1.0
    return u


@dataclass(frozen=True)
class JointState:
    """Density matrix over the fixed (R, Q, A, B) register."""

    rho: DensityMatrix

    R = 0
    Q = 1
    A = 2
    B = 3

    def __post_init__(self):
        if self.rho.n_qubits != 4:
            raise DimensionMismatch(
                f"joint register has 4 qubits, got {self.rho.n_qubits}"
            )


def prepare_bell_with_ancillas() -> JointState:
    """|bell>_RQ (x) |00>_AB: the purified maximally mixed source plus ancillas."""
    psi = np.zeros(16, dtype=complex)
    psi[0b0000] = 1.0 / math.sqrt(2.0)
    psi[0b1100] = 1.0 / math.sqrt(2.0)
    return JointState(DensityMatrix.from_state_vector(psi))


def apply_gate(state: JointState, gate: Gate) -> JointState:
    """Conjugate the joint state by the gate unitary; R must stay untouched."""
    if JointState.R in (gate.target, *gate.controls):
        raise PositionOutOfRange("the reference qubit R is never acted on")
    u = gate_unitary(gate, 4)
    return JointState(DensityMatrix(u @ state.rho.matrix @ u.conj().T))


def apply_pauli_z(state: JointState, position: int) -> JointState:
    """Deterministic phase flip on one code qubit (error injection)."""
    if position == JointState.R:
        raise PositionOutOfRange("the reference qubit R is never acted on")
    if not 0 <= position < 4:
        raise PositionOutOfRange(f"position {position} outside register")
    signs = np.array(
        [1.0 if not (i >> (3 - position)) & 1 else -1.0 for i in range(16)]
    )
    return JointState(DensityMatrix(state.rho.matrix * np.outer(signs, signs)))


ENCODE_GATES = (
    cnot(JointState.Q, JointState.A),
    cnot(JointState.Q, JointState.B),
    hadamard(JointState.Q),
    hadamard(JointState.A),
    hadamard(JointState.B),
)

DECODE_GATES = (
    hadamard(JointState.Q),
    hadamard(JointState.A),
    hadamard(JointState.B),
    cnot(JointState.Q, JointState.A),
    cnot(JointState.Q, JointState.B),
    toffoli(JointState.A, JointState.B, JointState.Q),
)


def tqc_encode(state: JointState) -> JointState:
    for gate in ENCODE_GATES:
        state = apply_gate(state, gate)
    return state


def tqc_decode(state: JointState) -> JointState:
    for gate in DECODE_GATES:
        state = apply_gate(state, gate)
    return state


def partial_trace(matrix: np.ndarray, keep, n_qubits: int) -> np.ndarray:
    """Trace out every qubit not in ``keep`` (positions, ascending output order)."""
    keep = sorted(keep)
    traced = [p for p in range(n_qubits) if p not in keep]
    t = matrix.reshape((2,) * (2 * n_qubits))
    for offset, p in enumerate(traced):
        n_now = t.ndim // 2
        t = np.trace(t, axis1=p - offset, axis2=p - offset + n_now)
    dim = 1 << len(keep)
    return t.reshape(dim, dim)


def bell_state_rq() -> np.ndarray:
    psi = np.zeros(4, dtype=complex)
    psi[0b00] = 1.0 / math.sqrt(2.0)
    psi[0b11] = 1.0 / math.sqrt(2.0)
    return psi


def entanglement_fidelity(state: JointState, reference: np.ndarray | None = None) -> float:
    """<psi|rho_RQ|psi> after tracing out the ancillas.

    ``reference`` is a pure state vector on (R, Q); defaults to the Bell pair
    used by ``prepare_bell_with_ancillas``.
    """
    psi = bell_state_rq() if reference is None else np.asarray(reference, dtype=complex)
    if psi.shape != (4,):
        raise DimensionMismatch(f"reference must be a 4-vector, got {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-12:
        psi = psi / norm
    rho_rq = partial_trace(state.rho.matrix, (JointState.R, JointState.Q), 4)
    value = np.real_if_close(psi.conj() @ rho_rq @ psi, tol=1000)
    return float(np.real(value))
