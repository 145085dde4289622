"""Line-oriented text serialization for adaptive circuits.

Grammar (one op per line, '#' comments, blank lines ignored):

    qubits 12
    init 3 +
    init 0 ?
    CX 0 3
    X 4 if m1 ^ m2&m3
    measure 3 m1 z
    measure 4 m2 x flip_if m1
    frame z 0 if m1&m2

`init` defaults every qubit to 0. Conditions are xor-of-ands over earlier
measurement keys.
"""

from __future__ import annotations

from .circuit import (CGate, Circuit, FrameUpdate, Gate, Measure, TRUE,
                      format_condition, parse_condition)
from .gates import GATE_ARITY


def parse_circuit(text: str) -> Circuit:
    num_qubits: int | None = None
    inits: list[str] = []
    ops: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "qubits":
                if num_qubits is not None:
                    raise ValueError("duplicate qubits line")
                num_qubits = int(fields[1])
                inits = ["0"] * num_qubits
            elif num_qubits is None:
                raise ValueError("first line must declare qubits")
            elif fields[0] == "init":
                if ops:
                    raise ValueError("init after operations")
                inits[int(fields[1])] = fields[2]
            elif fields[0] == "measure":
                qubit, key = int(fields[1]), fields[2]
                basis = "z"
                flip = parse_condition("0")
                rest = fields[3:]
                if rest and rest[0] in ("x", "z"):
                    basis = rest[0]
                    rest = rest[1:]
                if rest:
                    if rest[0] != "flip_if":
                        raise ValueError(f"unexpected token {rest[0]!r}")
                    flip = parse_condition(" ".join(rest[1:]))
                ops.append(Measure(qubit, key, basis, flip))
            elif fields[0] == "frame":
                pauli = fields[1].upper()
                qubit = int(fields[2])
                cond = TRUE
                if len(fields) > 3:
                    if fields[3] != "if":
                        raise ValueError(f"unexpected token {fields[3]!r}")
                    cond = parse_condition(" ".join(fields[4:]))
                ops.append(FrameUpdate(qubit, pauli, cond))
            elif fields[0] in GATE_ARITY:
                arity = GATE_ARITY[fields[0]]
                qubits = tuple(int(f) for f in fields[1:1 + arity])
                rest = fields[1 + arity:]
                if rest:
                    if rest[0] != "if":
                        raise ValueError(f"unexpected token {rest[0]!r}")
                    cond = parse_condition(" ".join(rest[1:]))
                    ops.append(CGate(fields[0], qubits, cond))
                else:
                    ops.append(Gate(fields[0], qubits))
            else:
                raise ValueError(f"unknown directive {fields[0]!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {raw.strip()!r}: {exc}") \
                from None
    if num_qubits is None:
        raise ValueError("empty circuit text")
    return Circuit(num_qubits, tuple(ops), tuple(inits))


def format_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    inits = circuit.initial_states or ("0",) * circuit.num_qubits
    for q, s in enumerate(inits):
        if s != "0":
            lines.append(f"init {q} {s}")
    for op in circuit.operations:
        if isinstance(op, Gate):
            lines.append(f"{op.name} {' '.join(map(str, op.qubits))}")
        elif isinstance(op, CGate):
            lines.append(f"{op.name} {' '.join(map(str, op.qubits))} "
                         f"if {format_condition(op.condition)}")
        elif isinstance(op, Measure):
            line = f"measure {op.qubit} {op.key} {op.basis}"
            if op.flip_basis_if:
                line += f" flip_if {format_condition(op.flip_basis_if)}"
            lines.append(line)
        else:
            line = f"frame {op.pauli.lower()} {op.qubit}"
            if op.condition != TRUE:
                line += f" if {format_condition(op.condition)}"
            lines.append(line)
    return "\n".join(lines) + "\n"
