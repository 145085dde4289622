"""Text-format parsing, printing, and error reporting."""

import numpy as np
import pytest

from latticeplan.circuits import (Circuit, Gate, Measure, enumerate_branches,
                                  format_circuit, parse_circuit, plus_state)

SAMPLE = """qubits 3
init 0 ?
init 1 +
CX 0 2
measure 1 m1 x
measure 2 m2 z flip_if m1
X 0 if m1 ^ m1&m2
frame z 0 if m1&m2
frame x 0
"""


def test_round_trip_is_stable():
    printed = format_circuit(parse_circuit(SAMPLE))
    assert printed == SAMPLE
    assert format_circuit(parse_circuit(printed)) == printed


def test_parsed_circuit_matches_hand_built():
    text = "qubits 2\ninit 0 +\ninit 1 +\nCZ 0 1\nmeasure 1 k z\n"
    parsed = parse_circuit(text)
    built = Circuit(2, (Gate("CZ", (0, 1)), Measure(1, "k")),
                    ("+", "+"))
    got = enumerate_branches(parsed, None)
    want = enumerate_branches(built, None)
    assert [b.outcomes for b in got] == [b.outcomes for b in want]
    for g, w in zip(got, want):
        assert g.probability == pytest.approx(w.probability)
        assert np.allclose(g.final_state.amplitudes, w.final_state.amplitudes)


def test_comments_and_blank_lines_ignored():
    text = "# header\n\nqubits 1\nH 0   # rotate\n\n"
    circuit = parse_circuit(text)
    assert [op.name for op in circuit.operations] == ["H"]


def test_measure_defaults_to_z_basis():
    circuit = parse_circuit("qubits 1\nmeasure 0 k\n")
    op = circuit.operations[0]
    assert op.basis == "z"


def test_init_defaults_to_zero():
    circuit = parse_circuit("qubits 2\ninit 1 +\nH 0\n")
    assert circuit.initial_states == ("0", "+")


@pytest.mark.parametrize("text,fragment", [
    ("H 0\n", "line 1"),                              # qubits not declared
    ("qubits 1\nqubits 2\n", "duplicate qubits"),
    ("qubits 1\nH 0\ninit 0 +\n", "init after operations"),
    ("qubits 1\nSPIN 0\n", "unknown directive"),
    ("qubits 2\nCX 0 1 unless k\n", "unexpected token"),
    ("qubits 1\nmeasure 0 k y\n", "unexpected token"),
    ("", "empty circuit"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ValueError, match=fragment):
        parse_circuit(text)


def test_parse_error_carries_line_number():
    with pytest.raises(ValueError, match="line 3"):
        parse_circuit("qubits 2\nH 0\nBAD 1\n")


def test_condition_spacing_is_canonicalized():
    loose = parse_circuit("qubits 2\nmeasure 1 a\nframe z 0 if  a\n")
    tight = parse_circuit("qubits 2\nmeasure 1 a\nframe z 0 if a\n")
    assert format_circuit(loose) == format_circuit(tight)
