"""
Compilation of bench programs to circuits, and circuit simplification.

`compile_bench` translates each element statement into gates on the wires
p / P / M. Arm-conditioned waveplates become path-controlled gates, and a
pair of identical gates covering both arms is factored back into one
unconditional gate. The interferometer macro expands into its five-gate
direct translation; `rewrite` then simplifies circuits with three rules:

    hh_cancel      H(a) H(a)            ->  (nothing)
    hczh_fuse      H(a) CZ(a,b) H(a)    ->  CNOT(b -> a)
    czh_commute    CZ(a,b) H(a)         ->  H(a) CNOT(b -> a)

The third rule is the second one with a single Hadamard multiplied through;
it is what lets the five-gate interferometer reach its compact form without
inserting gate pairs. Every rule is checked for unitary equality (up to a
global phase) over all wire assignments when the module is imported.

Termination: rules one and two strictly reduce the gate count, rule three
strictly reduces the number of CZ gates while preserving length, so the
pair (CZ count, gate count) decreases lexicographically at every step.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .bench import BenchProgram, Statement
from .circuit import CircuitIR, Gate, cnot, cz, equivalent, h, p_phi, u2, cu2
from .elements import ElementOp
from .state import HADAMARD, WIRES

_MATRIX_ATOL = 1e-12


class CompileError(Exception):
    """A statement that parses but cannot be turned into a unitary circuit."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        if line:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


def _single_dof_gate(matrix: np.ndarray, wire: str) -> Gate:
    """Use the named H kind when the matrix is exactly a Hadamard."""
    if np.allclose(matrix, HADAMARD, atol=_MATRIX_ATOL):
        return h(wire)
    return u2(matrix, wire)


_STMT_KIND_TO_ELEMENT = {
    "swp": "SWP",
    "bs": "BS",
    "hwp": "HWP",
    "dp": "DP",
    "phase": "PhaseShifter",
    "mirrors": "MirrorPair",
    "block": "Blocker",
}


def element_for(stmt: Statement) -> ElementOp:
    """The optical element a statement places (mzim is a macro, not one element)."""
    if stmt.kind == "mzim":
        raise ValueError("mzim is a macro; expand it with compile_bench")
    return ElementOp(
        kind=_STMT_KIND_TO_ELEMENT[stmt.kind],
        angle_deg=stmt.angle_deg,
        phi=stmt.phi,
        arm=stmt.arm,
    )


def mzim_gates(phi: float) -> tuple[Gate, ...]:
    """Direct translation of the interferometer: BS, phase, double mirror, BS."""
    return (h("p"), p_phi(phi, "p"), cz("p", "P"), cz("p", "M"), h("p"))


def _statement_gates(stmt: Statement) -> tuple[Gate, ...]:
    if stmt.kind == "mzim":
        return mzim_gates(stmt.phi)
    if stmt.kind == "block":
        raise CompileError(
            "block is not unitary and cannot be compiled; apply it with the experiment driver",
            stmt.line, stmt.col,
        )
    if stmt.kind == "swp":
        return (h("P"), cnot("P", "M"))
    if stmt.kind == "bs":
        return (h("p"),)
    if stmt.kind == "mirrors":
        return (cz("p", "P"), cz("p", "M"))
    if stmt.kind == "phase":
        if stmt.arm == 0:
            m = np.array([[np.exp(1j * stmt.phi), 0], [0, 1]], dtype=complex)
            return (u2(m, "p"),)
        return (p_phi(stmt.phi, "p"),)

    # hwp / dp
    gate2 = element_for(stmt).gate()
    if stmt.arm is None:
        return (_single_dof_gate(gate2.matrix, gate2.target),)
    return (cu2("p", gate2.target, gate2.matrix, value=stmt.arm),)


def _factor_arm_pairs(gates: list[Gate]) -> list[Gate]:
    """Merge adjacent identical gates that cover both arms into one gate."""
    out: list[Gate] = []
    for g in gates:
        prev = out[-1] if out else None
        if (
            prev is not None
            and g.kind == "CU2" == prev.kind
            and g.wires == prev.wires
            and g.control_value == 1 - prev.control_value
            and np.allclose(g.matrix, prev.matrix, atol=_MATRIX_ATOL)
        ):
            out[-1] = _single_dof_gate(g.matrix, g.wires[1])
        else:
            out.append(g)
    return out


def compile_bench(bp: BenchProgram) -> CircuitIR:
    """Translate a parsed bench into a circuit whose unitary equals the
    product of the placed elements' operators."""
    gates: list[Gate] = []
    for stmt in bp:
        gates.extend(_statement_gates(stmt))
    return CircuitIR(tuple(_factor_arm_pairs(gates)))


# --- rewriting ---------------------------------------------------------

@dataclass(frozen=True)
class RewriteRule:
    """Pattern and replacement over wire variables ("a", "b").

    Template gates are (kind, wire_vars) pairs; CZ patterns match either
    wire order. Registration validates that pattern and replacement build
    equal unitaries (up to global phase) for every wire assignment.
    """

    name: str
    pattern: tuple[tuple[str, tuple[str, ...]], ...]
    replacement: tuple[tuple[str, tuple[str, ...]], ...]

    def match(self, gates: tuple[Gate, ...], at: int) -> dict[str, str] | None:
        if at + len(self.pattern) > len(gates):
            return None
        binding: dict[str, str] = {}
        for (kind, wire_vars), gate in zip(self.pattern, gates[at:]):
            if gate.kind != kind:
                return None
            orders = [gate.wires]
            if kind == "CZ":
                orders.append(gate.wires[::-1])
            bound = None
            for wires in orders:
                trial = dict(binding)
                if _unify(wire_vars, wires, trial):
                    bound = trial
                    break
            if bound is None:
                return None
            binding = bound
        return binding

    def instantiate(self, binding: dict[str, str]) -> tuple[Gate, ...]:
        return tuple(_template_gate(kind, tuple(binding[v] for v in wire_vars))
                     for kind, wire_vars in self.replacement)


def _unify(wire_vars: tuple[str, ...], wires: tuple[str, ...],
           binding: dict[str, str]) -> bool:
    for var, wire in zip(wire_vars, wires):
        if binding.setdefault(var, wire) != wire:
            return False
    return True


def _template_gate(kind: str, wires: tuple[str, ...]) -> Gate:
    if kind == "H":
        return h(wires[0])
    if kind == "CZ":
        return cz(wires[0], wires[1])
    if kind == "CNOT":
        return cnot(wires[0], wires[1])
    raise ValueError(f"rule templates do not support kind {kind!r}")


def _validate_rule(rule: RewriteRule) -> RewriteRule:
    variables = sorted({v for _, wv in rule.pattern + rule.replacement for v in wv})
    for wires in permutations(WIRES, len(variables)):
        binding = dict(zip(variables, wires))
        lhs = CircuitIR(tuple(_template_gate(k, tuple(binding[v] for v in wv))
                              for k, wv in rule.pattern))
        rhs = CircuitIR(rule.instantiate(binding))
        report = equivalent(lhs, rhs)
        if not report.equal:
            raise AssertionError(f"rewrite rule {rule.name} is not semantics-preserving")
    return rule


RULES: tuple[RewriteRule, ...] = tuple(
    _validate_rule(r)
    for r in (
        RewriteRule(
            name="hh_cancel",
            pattern=(("H", ("a",)), ("H", ("a",))),
            replacement=(),
        ),
        RewriteRule(
            name="hczh_fuse",
            pattern=(("H", ("a",)), ("CZ", ("a", "b")), ("H", ("a",))),
            replacement=(("CNOT", ("b", "a")),),
        ),
        RewriteRule(
            name="czh_commute",
            pattern=(("CZ", ("a", "b")), ("H", ("a",))),
            replacement=(("H", ("a",)), ("CNOT", ("b", "a"))),
        ),
    )
)


def rewrite(ir: CircuitIR) -> CircuitIR:
    """Apply the registered rules left to right until no rule matches.

    Deterministic: at each pass the leftmost position wins, and rules are
    tried in registration order at that position.
    """
    gates = list(ir.gates)
    changed = True
    while changed:
        changed = False
        snapshot = tuple(gates)
        for i in range(len(snapshot)):
            for rule in RULES:
                binding = rule.match(snapshot, i)
                if binding is not None:
                    gates[i : i + len(rule.pattern)] = rule.instantiate(binding)
                    changed = True
                    break
            if changed:
                break
    return CircuitIR(tuple(gates))
