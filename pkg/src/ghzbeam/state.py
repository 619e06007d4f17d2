"""
Amplitudes and operators for a beam with three dichotomic degrees of freedom.

The three wires are the propagation path ``p``, the polarization ``P`` and the
first-order transverse mode ``M``. Every pure beam configuration is an
8-component complex vector indexed as

    index = 4*p + 2*P + M,   p, P, M in {0, 1}

with the labelling |0>_P = horizontal, |1>_P = vertical, |0>_M = HG01,
|1>_M = HG10. All modules in this package use this ordering; do not permute.

Global phase carries no physical meaning here. Compare states with
`fidelity`, or operators with `ghzbeam.circuit.equivalent` (up to phase).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WIRES = ("p", "P", "M")
_AXIS = {"p": 0, "P": 1, "M": 2}

DIM = 8
UNITARY_ATOL = 1e-12
NORM_ATOL = 1e-6  # constructor accepts this much drift, then renormalizes

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def phase_matrix(phi: float) -> np.ndarray:
    """diag(1, e^(i*phi)) as a 2x2 array."""
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def check_wire(wire: str) -> str:
    if wire not in _AXIS:
        raise ValueError(f"unknown wire {wire!r}; expected one of {WIRES}")
    return wire


@dataclass(frozen=True)
class TriState:
    """Normalized 8-component amplitude vector over |p P M>."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex).reshape(-1)
        if a.shape != (DIM,):
            raise ValueError(f"expected {DIM} amplitudes, got shape {a.shape}")
        n = np.linalg.norm(a)
        if abs(n - 1.0) > NORM_ATOL:
            raise ValueError(f"amplitudes not normalized (norm={n!r}); use TriState.normalize")
        object.__setattr__(self, "amps", _frozen(a / n))

    @classmethod
    def normalize(cls, amps: np.ndarray) -> "TriState":
        a = np.asarray(amps, dtype=complex).reshape(-1)
        n = np.linalg.norm(a)
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a / n)

    def amplitude(self, p: int, pol: int, mode: int) -> complex:
        return complex(self.amps[4 * p + 2 * pol + mode])

    def path_probabilities(self) -> tuple[float, float]:
        pr = np.abs(self.amps) ** 2
        return float(pr[:4].sum()), float(pr[4:].sum())

    def port_amplitudes(self, path: int) -> np.ndarray:
        """The four (P, M) amplitudes on one path, indexed 2*P + M."""
        if path not in (0, 1):
            raise ValueError("path must be 0 or 1")
        return self.amps[4 * path : 4 * path + 4].copy()


@dataclass(frozen=True)
class Gate2:
    """Unitary 2x2 gate acting on a single wire."""

    matrix: np.ndarray
    target: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.abs(m.conj().T @ m - np.eye(2)).max() > UNITARY_ATOL:
            raise ValueError("gate matrix is not unitary")
        check_wire(self.target)
        object.__setattr__(self, "matrix", _frozen(m))


@dataclass(frozen=True)
class Operator8:
    """8x8 complex operator on the full (p, P, M) space."""

    matrix: np.ndarray
    unitary: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (DIM, DIM):
            raise ValueError(f"expected an {DIM}x{DIM} matrix, got shape {m.shape}")
        u = bool(np.abs(m.conj().T @ m - np.eye(DIM)).max() <= UNITARY_ATOL)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "unitary", u)

    @classmethod
    def identity(cls) -> "Operator8":
        return cls(np.eye(DIM, dtype=complex))

    def is_hermitian(self, atol: float = 1e-10) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= atol)

    def dagger(self) -> "Operator8":
        return Operator8(self.matrix.conj().T)

    def __matmul__(self, other: "Operator8") -> "Operator8":
        return Operator8(self.matrix @ other.matrix)


def hadamard(wire: str) -> Gate2:
    return Gate2(HADAMARD, wire)


def pauli_x(wire: str) -> Gate2:
    return Gate2(PAULI_X, wire)


def pauli_z(wire: str) -> Gate2:
    return Gate2(PAULI_Z, wire)


def phase_gate(phi: float, wire: str = "p") -> Gate2:
    return Gate2(phase_matrix(phi), wire)


def lift(g: Gate2) -> Operator8:
    """Embed a single-wire gate into the 8-dim space (identity elsewhere)."""
    mats = [ID2, ID2, ID2]
    mats[_AXIS[g.target]] = g.matrix
    return Operator8(np.kron(np.kron(mats[0], mats[1]), mats[2]))


_PROJ = (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex))


def controlled(control: str, target_gate: Gate2, value: int = 1) -> Operator8:
    """Apply `target_gate` only on the subspace where `control` equals `value`.

    The default value=1 gives the usual controlled gate, e.g.
    controlled("p", pauli_z("P")) is CZ between path and polarization.
    """
    check_wire(control)
    if value not in (0, 1):
        raise ValueError("control value must be 0 or 1")
    if control == target_gate.target:
        raise ValueError("control and target must be distinct wires")
    idle = [ID2, ID2, ID2]
    idle[_AXIS[control]] = _PROJ[1 - value]
    act = [ID2, ID2, ID2]
    act[_AXIS[control]] = _PROJ[value]
    act[_AXIS[target_gate.target]] = target_gate.matrix
    m = np.kron(np.kron(idle[0], idle[1]), idle[2]) + np.kron(np.kron(act[0], act[1]), act[2])
    return Operator8(m)


def apply(u: Operator8, s: TriState) -> TriState:
    """Act with a unitary on a state; the result is renormalized exactly."""
    if not u.unitary:
        raise ValueError("apply expects a unitary operator")
    return TriState(u.matrix @ s.amps)


def expectation(s: TriState, o: Operator8) -> float:
    """Real expectation value <s|O|s> of a Hermitian operator."""
    if not o.is_hermitian():
        raise ValueError("expectation expects a Hermitian operator")
    return float(np.real(np.vdot(s.amps, o.matrix @ s.amps)))


def fidelity(a: TriState, b: TriState) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


_PAULI_BY_NAME = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z, "I": ID2}


def pauli_string(labels: str) -> Operator8:
    """Tensor product like "ZXX" in wire order (p, P, M)."""
    if len(labels) != 3 or any(c not in _PAULI_BY_NAME for c in labels):
        raise ValueError(f"bad Pauli string {labels!r}; need 3 chars from I, X, Y, Z")
    a, b, c = (_PAULI_BY_NAME[ch] for ch in labels)
    return Operator8(np.kron(np.kron(a, b), c))


def basis_state(label: int | str) -> TriState:
    """Computational basis state, from an index 0..7 or a label like "101"."""
    if isinstance(label, str):
        if len(label) != 3 or any(c not in "01" for c in label):
            raise ValueError(f"bad basis label {label!r}")
        idx = int(label, 2)
    else:
        idx = int(label)
    if not 0 <= idx < DIM:
        raise ValueError(f"basis index {idx} out of range")
    a = np.zeros(DIM, dtype=complex)
    a[idx] = 1.0
    return TriState(a)


def ghz_state() -> TriState:
    """The target non-separable state (|000> - |011> - |101> - |110>)/2.

    Its parity correlations are <ZZZ> = +1 and <ZXX> = <XZX> = <XXZ> = -1.
    """
    a = np.zeros(DIM, dtype=complex)
    a[0b000] = 0.5
    a[0b011] = -0.5
    a[0b101] = -0.5
    a[0b110] = -0.5
    return TriState(a)


def random_state(rng: np.random.Generator) -> TriState:
    """Haar-ish random pure state (Gaussian amplitudes, normalized)."""
    a = rng.standard_normal(DIM) + 1j * rng.standard_normal(DIM)
    return TriState.normalize(a)
