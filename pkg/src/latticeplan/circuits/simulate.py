"""Exhaustive enumeration of adaptive-circuit measurement branches.

Measured qubits are removed from the simulated register, so the state
dimension halves at every measurement; a 16-qubit circuit with 14
measurements stays cheap. Branches are explored depth first with the 0
outcome first, so the emitted order is lexicographic in the outcome bits.

The channel checks compare every branch, after applying its Pauli frame,
against a target unitary on the data qubits, up to a per-branch global
phase.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from ..exceptions import CapacityError, ContractError
from .circuit import (CGate, Circuit, FrameUpdate, Gate, Measure,
                      evaluate_condition)
from .frame import PauliFrame
from .gates import (MAX_QUBITS, StateVector, apply_gate, basis_state,
                    kron_with_ancillas)

PROB_FLOOR = 1e-12
ATOL = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class Branch:
    """One measurement history.

    ``truncated`` marks a zero-probability prefix: the subtree below it was
    not explored and ``final_state``/``final_frame`` are None.
    """

    outcome_bits: str
    outcomes: dict[str, int]
    probability: float
    surviving_qubits: tuple[int, ...]
    final_state: StateVector | None
    final_frame: PauliFrame | None
    truncated: bool = False

    def unnormalized(self) -> np.ndarray:
        if self.final_state is None:
            raise ValueError("truncated branch has no state")
        return math.sqrt(self.probability) * self.final_state.amplitudes


def input_qubits_of(circuit: Circuit) -> tuple[int, ...]:
    if not circuit.initial_states:
        return ()
    return tuple(q for q, s in enumerate(circuit.initial_states) if s == "?")


def initial_vector(circuit: Circuit,
                   input_state: np.ndarray | None) -> np.ndarray:
    n = circuit.num_qubits
    inits = circuit.initial_states or ("0",) * n
    data_qubits = tuple(q for q, s in enumerate(inits) if s == "?")
    if data_qubits:
        if input_state is None:
            raise ValueError("circuit has input qubits but no input given")
        if input_state.shape != (1 << len(data_qubits),):
            raise ValueError("input state has wrong dimension")
        ancillas = {q: s for q, s in enumerate(inits) if s != "?"}
        return kron_with_ancillas(input_state, data_qubits, ancillas, n)
    if input_state is not None:
        raise ValueError("circuit has no input qubits")
    return kron_with_ancillas(basis_state(""), (), dict(enumerate(inits)), n)


def enumerate_branches(circuit: Circuit,
                       input_state: np.ndarray | None = None,
                       prob_floor: float = PROB_FLOOR) -> list[Branch]:
    """Run every measurement branch of the circuit on one input.

    The input covers the circuit's "?" qubits in ascending order and must
    be normalized; branch probabilities then sum to 1 (truncated stubs
    report probability 0.0).
    """
    if circuit.num_qubits > MAX_QUBITS:
        raise CapacityError(f"{circuit.num_qubits} qubits exceeds the "
                            f"cap of {MAX_QUBITS}")
    vec = initial_vector(circuit, input_state)
    branches: list[Branch] = []
    survivors = circuit.surviving_qubits

    def walk(vec: np.ndarray, alive: tuple[int, ...], op_index: int,
             outcomes: dict[str, int], bits: str,
             flips: tuple[tuple[int, str], ...]) -> None:
        k = len(alive)
        while op_index < len(circuit.operations):
            op = circuit.operations[op_index]
            op_index += 1
            if isinstance(op, Gate):
                pos = [alive.index(q) for q in op.qubits]
                vec = apply_gate(vec, op.name, pos, k)
            elif isinstance(op, CGate):
                if evaluate_condition(op.condition, outcomes):
                    pos = [alive.index(q) for q in op.qubits]
                    vec = apply_gate(vec, op.name, pos, k)
            elif isinstance(op, FrameUpdate):
                if evaluate_condition(op.condition, outcomes):
                    flips = flips + ((op.qubit, op.pauli),)
            else:
                pos = alive.index(op.qubit)
                basis = op.basis
                if evaluate_condition(op.flip_basis_if, outcomes):
                    basis = "x" if basis == "z" else "z"
                if basis == "x":
                    vec = apply_gate(vec, "H", [pos], k)
                t = vec.reshape((2,) * k)
                rest = alive[:alive.index(op.qubit)] \
                    + alive[alive.index(op.qubit) + 1:]
                for m in (0, 1):
                    child = np.ascontiguousarray(
                        np.take(t, m, axis=pos).reshape(-1))
                    p = float(np.vdot(child, child).real)
                    new_outcomes = dict(outcomes)
                    new_outcomes[op.key] = m
                    if p <= prob_floor:
                        branches.append(Branch(
                            outcome_bits=bits + str(m),
                            outcomes=new_outcomes,
                            probability=0.0,
                            surviving_qubits=survivors,
                            final_state=None,
                            final_frame=None,
                            truncated=True,
                        ))
                    else:
                        walk(child, rest, op_index, new_outcomes,
                             bits + str(m), flips)
                return
        p = float(np.vdot(vec, vec).real)
        frame = PauliFrame.identity(alive)
        for qubit, pauli in flips:
            if qubit not in alive:
                raise ValueError(
                    f"frame update on measured qubit {qubit}")
            frame = frame.flipped(qubit, pauli)
        branches.append(Branch(
            outcome_bits=bits,
            outcomes=outcomes,
            probability=p,
            surviving_qubits=alive,
            final_state=StateVector(alive, vec / math.sqrt(p)),
            final_frame=frame,
            truncated=False,
        ))

    walk(vec, tuple(range(circuit.num_qubits)), 0, {}, "", ())
    return branches


def basis_inputs(k: int) -> list[tuple[str, np.ndarray]]:
    return [(format(i, f"0{k}b"), basis_state(format(i, f"0{k}b")))
            for i in range(1 << k)]


def random_inputs(k: int, count: int,
                  seed: int = 7) -> list[tuple[str, np.ndarray]]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        vec = rng.normal(size=1 << k) + 1j * rng.normal(size=1 << k)
        out.append((f"random{i}", vec / np.linalg.norm(vec)))
    return out


@dataclasses.dataclass(frozen=True)
class ChannelReport:
    ok: bool
    inputs_checked: int
    branches_checked: int
    truncated_branches: int
    max_amplitude_error: float
    failures: tuple[str, ...]


def _frame_corrected(branch: Branch) -> np.ndarray:
    assert branch.final_state is not None and branch.final_frame is not None
    return branch.final_frame.apply(branch.final_state.amplitudes)


def _reorder(vec: np.ndarray, current: tuple[int, ...],
             wanted: tuple[int, ...]) -> np.ndarray:
    if current == wanted:
        return vec
    n = len(current)
    perm = [current.index(q) for q in wanted]
    return np.ascontiguousarray(vec.reshape((2,) * n).transpose(perm)
                                .reshape(-1))


def _compare_mod_phase(actual: np.ndarray, expected: np.ndarray,
                       atol: float) -> float:
    j = int(np.argmax(np.abs(expected)))
    ref = actual[j]
    if abs(ref) < atol:
        return float(np.max(np.abs(expected)))
    phase = (expected[j] / ref)
    phase /= abs(phase)
    return float(np.max(np.abs(actual * phase - expected)))


def check_channel(circuit: Circuit, unitary: np.ndarray, *,
                  inputs: Sequence[tuple[str, np.ndarray]] | None = None,
                  output_qubits: tuple[int, ...] | None = None,
                  atol: float = ATOL) -> ChannelReport:
    """Verify that every branch implements ``unitary`` on the data, after
    frame correction, up to a per-branch global phase.

    Raises ContractError if a branch's surviving qubits are not exactly
    the expected outputs. Amplitude mismatches are reported, not raised.
    """
    in_qubits = input_qubits_of(circuit)
    outs = output_qubits if output_qubits is not None \
        else in_qubits
    k = len(in_qubits)
    if unitary.shape != (1 << len(outs), 1 << k):
        raise ValueError("unitary shape does not match data qubits")
    if inputs is None:
        inputs = basis_inputs(k)
    failures: list[str] = []
    checked = 0
    truncated = 0
    worst = 0.0
    for label, state in inputs:
        expected = unitary @ state
        for branch in enumerate_branches(circuit, state):
            if branch.truncated:
                truncated += 1
                continue
            if set(branch.surviving_qubits) != set(outs):
                raise ContractError(
                    f"branch {branch.outcome_bits} leaves qubits "
                    f"{branch.surviving_qubits}, expected {tuple(outs)}")
            actual = _reorder(_frame_corrected(branch),
                              branch.surviving_qubits, tuple(outs))
            err = _compare_mod_phase(actual, expected, atol)
            worst = max(worst, err)
            checked += 1
            if err > atol:
                failures.append(
                    f"input {label} branch {branch.outcome_bits}: "
                    f"max amplitude error {err:.3e}")
    return ChannelReport(
        ok=not failures,
        inputs_checked=len(inputs),
        branches_checked=checked,
        truncated_branches=truncated,
        max_amplitude_error=worst,
        failures=tuple(failures),
    )


def channel_equals_unitary_mod_frame(
        circuit: Circuit, unitary: np.ndarray, *,
        inputs: Sequence[tuple[str, np.ndarray]] | None = None,
        output_qubits: tuple[int, ...] | None = None,
        atol: float = ATOL) -> bool:
    return check_channel(circuit, unitary, inputs=inputs,
                         output_qubits=output_qubits, atol=atol).ok


def check_channel_by_linearity(
        circuit: Circuit, unitary: np.ndarray, *,
        inputs: Sequence[tuple[str, np.ndarray]],
        output_qubits: tuple[int, ...] | None = None,
        atol: float = ATOL) -> ChannelReport:
    """Channel check that enumerates branches only for basis inputs and
    reconstructs other inputs linearly.

    For a fixed outcome string the map from input to unnormalized branch
    output is linear, because every basis flip and conditional gate depends
    on the outcome prefix alone. Enumerating the 2^k basis inputs once is
    then enough to evaluate any input, which matters for wide circuits.
    """
    in_qubits = input_qubits_of(circuit)
    outs = output_qubits if output_qubits is not None else in_qubits
    k = len(in_qubits)
    if unitary.shape != (1 << len(outs), 1 << k):
        raise ValueError("unitary shape does not match data qubits")

    per_basis: list[dict[str, Branch]] = []
    frames: dict[str, PauliFrame] = {}
    survivors: tuple[int, ...] | None = None
    truncated = 0
    for _, state in basis_inputs(k):
        table: dict[str, Branch] = {}
        for branch in enumerate_branches(circuit, state):
            if branch.truncated:
                truncated += 1
                continue
            if set(branch.surviving_qubits) != set(outs):
                raise ContractError(
                    f"branch {branch.outcome_bits} leaves qubits "
                    f"{branch.surviving_qubits}, expected {tuple(outs)}")
            survivors = branch.surviving_qubits
            table[branch.outcome_bits] = branch
            prev = frames.get(branch.outcome_bits)
            assert branch.final_frame is not None
            if prev is None:
                frames[branch.outcome_bits] = branch.final_frame
            elif prev != branch.final_frame:
                raise ContractError(
                    f"frame for branch {branch.outcome_bits} depends on "
                    "the input state")
        per_basis.append(table)
    assert survivors is not None

    # Precompute everything indexed by outcome string: the unnormalized
    # output of each basis input (zero when the outcome is unreachable
    # from that basis state) and the frame correction plus axis reorder
    # as one matrix per distinct frame.
    dim = 1 << len(outs)
    keys = sorted(frames)
    table_of: dict[PauliFrame, np.ndarray] = {}
    eye = np.eye(dim, dtype=np.complex128)
    for frame in frames.values():
        if frame not in table_of:
            cols = [_reorder(frame.apply(eye[c]), survivors, tuple(outs))
                    for c in range(dim)]
            table_of[frame] = np.stack(cols, axis=1)
    correct = np.stack([table_of[frames[key]] for key in keys])
    basis_out = np.zeros((1 << k, len(keys), dim), dtype=np.complex128)
    for j, table in enumerate(per_basis):
        for r, key in enumerate(keys):
            hit = table.get(key)
            if hit is not None:
                basis_out[j, r] = hit.unnormalized()

    failures: list[str] = []
    checked = 0
    worst = 0.0
    for label, state in inputs:
        expected = unitary @ state
        raw = np.tensordot(state, basis_out, axes=1)
        probs = np.einsum("rd,rd->r", raw.conj(), raw).real
        live = probs > PROB_FLOOR
        actual = np.einsum("rij,rj->ri", correct[live], raw[live])
        actual /= np.sqrt(probs[live])[:, None]
        j0 = int(np.argmax(np.abs(expected)))
        refs = actual[:, j0]
        degenerate = np.abs(refs) < atol
        phase = expected[j0] / np.where(degenerate, 1.0, refs)
        phase /= np.abs(phase)
        errs = np.max(np.abs(actual * phase[:, None]
                             - expected[None, :]), axis=1)
        errs = np.where(degenerate, float(np.max(np.abs(expected))), errs)
        checked += int(live.sum())
        if len(errs):
            worst = max(worst, float(errs.max()))
        for r in np.nonzero(errs > atol)[0]:
            bits = [keys[i] for i in np.nonzero(live)[0]][r]
            failures.append(f"input {label} branch {bits}: "
                            f"max amplitude error {errs[r]:.3e}")
        total_p = float(probs[live].sum())
        if abs(total_p - 1.0) > 1e-6:
            failures.append(
                f"input {label}: branch probabilities sum to {total_p:.9f}")
    return ChannelReport(
        ok=not failures,
        inputs_checked=len(inputs),
        branches_checked=checked,
        truncated_branches=truncated,
        max_amplitude_error=worst,
        failures=tuple(failures),
    )
