"""
Three-wire circuit intermediate representation and unitary equivalence.

Gates act on the wires p, P, M and are listed in application order: the
first gate in a circuit is the first one the beam meets, so the composed
matrix is gates[-1] * ... * gates[0].

Gate kinds:
    H            Hadamard on one wire
    P_PHI        diag(1, e^(i*phi)) on one wire (phase, parameter in radians)
    CZ           controlled-Z between two wires (symmetric)
    CNOT         wires = (control, target)
    U2           arbitrary single-wire 2x2 unitary (matrix carried along)
    CU2          path-conditioned 2x2 unitary; wires = (control, target),
                 fires when the control wire equals `control_value`
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import (
    Gate2,
    Operator8,
    check_wire,
    controlled,
    hadamard,
    lift,
    pauli_x,
    pauli_z,
    phase_gate,
)

GATE_KINDS = ("H", "P_PHI", "CZ", "CNOT", "U2", "CU2")


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple[str, ...]
    param: float | None = None
    matrix: np.ndarray | None = None
    control_value: int | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        for w in self.wires:
            check_wire(w)
        n_wires = 2 if self.kind in ("CZ", "CNOT", "CU2") else 1
        if len(self.wires) != n_wires:
            raise ValueError(f"{self.kind} takes {n_wires} wire(s), got {self.wires}")
        if n_wires == 2 and self.wires[0] == self.wires[1]:
            raise ValueError(f"{self.kind} needs two distinct wires")
        if self.kind == "P_PHI" and self.param is None:
            raise ValueError("P_PHI requires a phase parameter")
        if self.kind in ("U2", "CU2"):
            if self.matrix is None:
                raise ValueError(f"{self.kind} requires a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2, 2):
                raise ValueError("gate matrix must be 2x2")
            m = np.ascontiguousarray(m)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        if self.kind == "CU2" and self.control_value not in (0, 1):
            raise ValueError("CU2 requires control_value 0 or 1")

    def unitary(self) -> Operator8:
        if self.kind == "H":
            return lift(hadamard(self.wires[0]))
        if self.kind == "P_PHI":
            return lift(phase_gate(self.param, self.wires[0]))
        if self.kind == "CZ":
            return controlled(self.wires[0], pauli_z(self.wires[1]))
        if self.kind == "CNOT":
            return controlled(self.wires[0], pauli_x(self.wires[1]))
        if self.kind == "U2":
            return lift(Gate2(self.matrix, self.wires[0]))
        return controlled(self.wires[0], Gate2(self.matrix, self.wires[1]),
                          value=self.control_value)

    def dump(self) -> str:
        wires = ",".join(self.wires)
        if self.kind == "P_PHI":
            return f"P_PHI {wires} {self.param:.12g}"
        if self.kind == "U2":
            return f"U2 {wires} {_fmt_matrix(self.matrix)}"
        if self.kind == "CU2":
            return f"CU2 {wires} value={self.control_value} {_fmt_matrix(self.matrix)}"
        return f"{self.kind} {wires}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _fmt_matrix(m: np.ndarray) -> str:
    return ",".join(_fmt_complex(complex(z)) for z in np.asarray(m).reshape(-1))


def h(wire: str) -> Gate:
    return Gate("H", (wire,))


def p_phi(phi: float, wire: str = "p") -> Gate:
    return Gate("P_PHI", (wire,), param=float(phi))


def cz(a: str, b: str) -> Gate:
    return Gate("CZ", (a, b))


def cnot(control: str, target: str) -> Gate:
    return Gate("CNOT", (control, target))


def u2(matrix: np.ndarray, wire: str) -> Gate:
    return Gate("U2", (wire,), matrix=matrix)


def cu2(control: str, target: str, matrix: np.ndarray, value: int) -> Gate:
    return Gate("CU2", (control, target), matrix=matrix, control_value=value)


@dataclass(frozen=True)
class CircuitIR:
    """An ordered gate list (application order)."""

    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def unitary(self) -> Operator8:
        u = Operator8.identity()
        for g in self.gates:
            u = g.unitary() @ u
        return u

    def dump(self) -> str:
        if not self.gates:
            return "(identity)"
        return "\n".join(g.dump() for g in self.gates)


@dataclass(frozen=True)
class Equivalence:
    """Result of comparing two circuits up to a global phase."""

    equal: bool
    phase: complex | None
    max_abs_diff: float


def equivalent(a: CircuitIR, b: CircuitIR, tol: float = 1e-12) -> Equivalence:
    """Check whether two circuits implement the same unitary up to phase.

    When they match, the reported phase z satisfies U_b = z * U_a.
    """
    ua = a.unitary().matrix
    ub = b.unitary().matrix
    idx = np.unravel_index(np.argmax(np.abs(ua)), ua.shape)
    ref = ua[idx]
    if abs(ub[idx]) <= tol:
        return Equivalence(False, None, float(np.abs(ub - ua).max()))
    phase = ub[idx] / ref
    phase /= abs(phase)
    diff = float(np.abs(ub - phase * ua).max())
    if diff <= tol:
        return Equivalence(True, complex(phase), diff)
    return Equivalence(False, None, diff)
