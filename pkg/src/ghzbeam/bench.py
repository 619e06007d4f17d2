"""
Parser for the textual bench description language.

Grammar (one statement per line, or several separated by semicolons;
comments run from '#' to end of line):

    statement := name [param] ["on" arm]
    param     := "@" NUMBER            angle in degrees   (hwp, dp)
               | "@" "phi=" NUMBER     phase in radians   (phase)
               | "(" "phi=" NUMBER ")" macro argument     (mzim)
    arm       := "arm0" | "arm1"

Element names: swp, bs, hwp, dp, phase, mirrors, block, mzim.
`mzim(phi=...)` is a macro that the compiler expands into the five-gate
interferometer sequence. `block` requires an arm and is accepted by the
parser but rejected by the compiler (it is not unitary).

Example:

    # non-separable beam preparation
    swp; bs
    hwp@0 on arm0
    hwp@-45 on arm1
"""
from __future__ import annotations

import re
from dataclasses import dataclass

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"

_STMT_RE = re.compile(
    rf"""^(?P<name>[A-Za-z_]\w*)
         (?:
            @\s*(?:phi\s*=\s*(?P<phi>{_NUMBER})|(?P<angle>{_NUMBER}))
          | \(\s*phi\s*=\s*(?P<mphi>{_NUMBER})\s*\)
         )?
         (?:\s+on\s+(?P<arm>\S+))?
         $""",
    re.VERBOSE,
)

ARMS = ("arm0", "arm1")

# name -> (wants_angle, wants_phi, arm_allowed, arm_required)
_ELEMENTS = {
    "swp": (False, False, False, False),
    "bs": (False, False, False, False),
    "hwp": (True, False, True, False),
    "dp": (True, False, True, False),
    "phase": (False, True, True, False),
    "mirrors": (False, False, False, False),
    "block": (False, False, True, True),
    "mzim": (False, True, False, False),
}


class BenchParseError(Exception):
    """Syntax or semantic error in a bench source, with position info."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Statement:
    """One parsed element placement."""

    kind: str
    angle_deg: float | None = None
    phi: float | None = None
    arm: int | None = None
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class BenchProgram:
    """Ordered element statements plus the (fixed) port names."""

    statements: tuple[Statement, ...]
    input_ports: tuple[str, str] = ("in0", "in1")
    output_ports: tuple[str, str] = ("out0", "out1")

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)


def _parse_statement(text: str, line: int, col: int) -> Statement:
    m = _STMT_RE.match(text)
    if m is None:
        raise BenchParseError(f"cannot parse statement {text!r}", line, col)
    name = m.group("name").lower()
    if name not in _ELEMENTS:
        raise BenchParseError(f"unknown element {name!r}", line, col)
    wants_angle, wants_phi, arm_allowed, arm_required = _ELEMENTS[name]

    angle = m.group("angle")
    phi = m.group("phi") or m.group("mphi")
    if wants_angle and angle is None:
        raise BenchParseError(f"{name} requires an angle, e.g. {name}@22.5", line, col)
    if wants_phi and phi is None:
        hint = "mzim(phi=0)" if name == "mzim" else f"{name}@phi=0"
        raise BenchParseError(f"{name} requires a phase, e.g. {hint}", line, col)
    if not wants_angle and angle is not None:
        raise BenchParseError(f"{name} takes no angle", line, col)
    if not wants_phi and phi is not None:
        raise BenchParseError(f"{name} takes no phase", line, col)
    if m.group("mphi") is not None and name != "mzim":
        raise BenchParseError(f"call syntax is only valid for mzim, not {name}", line, col)

    arm_name = m.group("arm")
    arm: int | None = None
    if arm_name is not None:
        if not arm_allowed:
            raise BenchParseError(f"{name} acts on the whole bench; 'on {arm_name}' is not allowed",
                                  line, col)
        if arm_name not in ARMS:
            raise BenchParseError(f"undeclared arm {arm_name!r}; declared arms are {ARMS}", line, col)
        arm = ARMS.index(arm_name)
    elif arm_required:
        raise BenchParseError(f"{name} requires an arm, e.g. {name} on arm1", line, col)

    return Statement(
        kind=name,
        angle_deg=float(angle) if angle is not None else None,
        phi=float(phi) if phi is not None else None,
        arm=arm,
        line=line,
        col=col,
    )


def parse(text: str) -> BenchProgram:
    """Parse bench source text; raises BenchParseError with position info."""
    statements: list[Statement] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for chunk in line.split(";"):
            stripped = chunk.strip()
            if stripped:
                col = offset + chunk.index(stripped[0]) + 1
                statements.append(_parse_statement(stripped, lineno, col))
            offset += len(chunk) + 1
    return BenchProgram(tuple(statements))
