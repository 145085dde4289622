"""Channel checks and structural invariants of the adaptive constructions."""

import numpy as np
import pytest

from latticeplan import constructions as C
from latticeplan.circuits import (CGate, Circuit, basis_inputs,
                                  channel_equals_unitary_mod_frame,
                                  check_channel, check_channel_by_linearity,
                                  enumerate_branches, random_inputs,
                                  run_reversible, run_reversible_table)


def test_registry_names():
    assert set(C.CONSTRUCTIONS) == {"cz-apply", "cz-skip", "autoccz",
                                    "toffoli", "mux-apply", "mux-skip"}


@pytest.mark.parametrize("name,count", [
    ("cz-apply", 2), ("cz-skip", 2),
    ("autoccz", 6), ("toffoli", 6),
    ("mux-apply", 8), ("mux-skip", 8),
])
def test_routing_qubit_counts(name, count):
    assert len(C.CONSTRUCTIONS[name]().routing_qubits) == count


@pytest.mark.parametrize("name", sorted(C.CONSTRUCTIONS))
def test_channel_equals_target(name):
    report = C.verify_construction(C.CONSTRUCTIONS[name](), random_count=5,
                                   seed=23)
    assert report.ok, report.failures[:3]
    assert report.max_amplitude_error < 1e-9


@pytest.mark.parametrize("name", ["autoccz", "toffoli"])
def test_consumption_needs_no_conditional_gates(name):
    """Consuming the state takes only measurements and frame updates; all
    adaptivity rides on measurement-basis choices."""
    circuit = C.CONSTRUCTIONS[name]().circuit
    assert not any(isinstance(op, CGate) for op in circuit.operations)


@pytest.mark.parametrize("apply_mode", [True, False])
def test_delayed_choice_cz_branch_count(apply_mode):
    # two routing measurements -> four branches per input state
    cons = C.build_delayed_choice_cz(apply_mode)
    for _, state in basis_inputs(2):
        branches = enumerate_branches(cons.circuit, state)
        assert len(branches) == 4


def test_toffoli_branch_count():
    # three CCZ-half measurements plus three embedded two-measurement CZ
    # fixups -> 2^9 outcome patterns per input state
    cons = C.CONSTRUCTIONS["toffoli"]()
    assert len(cons.circuit.measured_qubits) == 9
    _, state = basis_inputs(3)[0]
    assert len(enumerate_branches(cons.circuit, state)) == 512


def test_boolean_channel_check():
    cons = C.CONSTRUCTIONS["toffoli"]()
    assert channel_equals_unitary_mod_frame(
        cons.circuit, cons.target, output_qubits=cons.output_qubits)
    assert not channel_equals_unitary_mod_frame(
        cons.circuit, np.eye(8), output_qubits=cons.output_qubits)


def test_direct_and_linearity_paths_agree():
    cons = C.build_autoccz()
    inputs = basis_inputs(3) + random_inputs(3, 3, seed=4)
    direct = check_channel(cons.circuit, cons.target, inputs=inputs,
                           output_qubits=cons.output_qubits)
    linear = check_channel_by_linearity(cons.circuit, cons.target,
                                        inputs=inputs,
                                        output_qubits=cons.output_qubits)
    assert direct.ok and linear.ok
    assert direct.branches_checked == linear.branches_checked


def test_ring_resource_op_shape():
    ops = C.ring_resource_ops()
    names = [g.name for g in ops]
    assert names.count("CCZ") == 1
    assert names.count("CZ") == 9


@pytest.mark.parametrize("bits", range(8))
def test_maj_computes_majority(bits):
    c, b, a = (bits >> 2) & 1, (bits >> 1) & 1, bits & 1
    out = run_reversible(C.build_maj(), f"{c}{b}{a}")
    assert int(out[2]) == C.majority(a, b, c)
    assert int(out[0]) == c ^ a
    assert int(out[1]) == b ^ a


@pytest.mark.parametrize("bits", range(8))
def test_maj_then_uma_restores_carry_and_a(bits):
    c, b, a = (bits >> 2) & 1, (bits >> 1) & 1, bits & 1
    circuit = Circuit(3, C.build_maj().operations + C.build_uma().operations)
    out = run_reversible(circuit, f"{c}{b}{a}")
    assert out == f"{c}{a ^ b ^ c}{a}"


def test_majority_truth_table():
    assert C.majority(0, 0, 0) == 0
    assert C.majority(0, 1, 1) == 1
    assert C.majority(1, 0, 1) == 1
    assert C.majority(1, 1, 1) == 1
    assert C.majority(1, 0, 0) == 0


@pytest.mark.parametrize("m", range(2, 11))
def test_adder_toffoli_count(m):
    circuit, spec = C.build_cuccaro_adder(m)
    assert spec.toffoli_count == 2 * m - 3
    assert circuit.gate_count("CCZ") == 2 * m - 3


def test_adder_wire_assignment():
    _, spec = C.build_cuccaro_adder(3)
    assert spec.c_wire == 0
    assert spec.t_wires == (1, 3, 5)
    assert spec.i_wires == (2, 4)
    assert spec.num_qubits == 6


@pytest.mark.parametrize("m", [2, 3, 4])
def test_adder_exhaustive(m):
    ok, msg = C.verify_adder(m)
    assert ok, msg


def test_adder_vectorized_oracle():
    """Whole-table comparison against integer addition done in numpy."""
    m = 5
    circuit, spec = C.build_cuccaro_adder(m)
    table = run_reversible_table(circuit)
    n = spec.num_qubits
    idx = np.arange(1 << n)

    def field(wires):
        out = np.zeros_like(idx)
        for k, w in enumerate(wires):
            out |= ((idx >> (n - 1 - w)) & 1) << k
        return out

    c_in = field([spec.c_wire])
    a = field(spec.i_wires)
    b = field(spec.t_wires)
    s = (a + b + c_in) % (1 << m)
    expect = np.zeros_like(idx)
    for k, w in enumerate([spec.c_wire]):
        expect |= ((c_in >> k) & 1) << (n - 1 - w)
    for k, w in enumerate(spec.i_wires):
        expect |= ((a >> k) & 1) << (n - 1 - w)
    for k, w in enumerate(spec.t_wires):
        expect |= ((s >> k) & 1) << (n - 1 - w)
    assert np.array_equal(table, expect)


def test_adder_pack_unpack_round_trip():
    _, spec = C.build_cuccaro_adder(4)
    bits = C.pack_adder_input(spec, 1, 5, 9)
    assert C.unpack_adder_output(spec, bits) == (1, 5, 9)


def test_adder_worked_example():
    circuit, spec = C.build_cuccaro_adder(3)
    out = run_reversible(circuit, C.pack_adder_input(spec, 1, 2, 5))
    c, a, s = C.unpack_adder_output(spec, out)
    assert (c, a, s) == (1, 2, (2 + 5 + 1) % 8)


def test_adder_rejects_tiny_register():
    with pytest.raises(ValueError):
        C.build_cuccaro_adder(1)


@pytest.mark.parametrize("name", sorted(C.CONSTRUCTIONS))
def test_io_declared_consistently(name):
    cons = C.CONSTRUCTIONS[name]()
    circuit = cons.circuit
    inits = circuit.initial_states
    assert all(inits[q] == "?" for q in cons.input_qubits)
    assert set(cons.output_qubits) == set(circuit.surviving_qubits)
    for q in cons.routing_qubits:
        assert q in circuit.measured_qubits
