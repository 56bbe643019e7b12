"""Gate-list circuits, qubit-ordering conventions, permutation lowering and QASM export."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import statevec as sv
from .errors import DomainError, ExportError

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


class Convention(str, Enum):
    """Qubit ordering.

    ``QISKIT`` puts qubit 0 on the top wire as the least significant bit.
    ``PHYSMATH`` puts the most significant bit on the top wire.
    Converting between the two maps wire ``q`` to ``num_qubits - 1 - q``.
    """

    QISKIT = "qiskit"
    PHYSMATH = "physmath"

    @property
    def other(self) -> "Convention":
        return Convention.PHYSMATH if self is Convention.QISKIT else Convention.QISKIT


class GateKind(str, Enum):
    H = "h"
    X = "x"
    PHASE = "p"
    CPHASE = "cp"
    SWAP = "swap"
    MCX = "mcx"
    CPERM = "cperm"


@dataclass(frozen=True)
class Gate:
    """One circuit instruction.

    Operand layout in ``qubits`` depends on ``kind``: ``(control, target)``
    for CPHASE, ``(*controls, target)`` for MCX and ``(control, *work)`` for
    CPERM, where ``work[j]`` holds bit ``j`` of the permuted sub-index.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    theta: float | None = None
    polarities: tuple[int, ...] | None = None
    perm: tuple[int, ...] | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        if len(set(self.qubits)) != len(self.qubits):
            raise DomainError(f"{self.kind.value} gate has repeated operands {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise DomainError("negative qubit index")
        if self.theta is not None and not math.isfinite(self.theta):
            raise DomainError("phase angle must be finite")
        if self.kind is GateKind.MCX and len(self.polarities or ()) != len(self.qubits) - 1:
            raise DomainError("one polarity per control is required")
        if self.kind is GateKind.CPERM and (self.perm is None or len(self.perm) != 1 << (len(self.qubits) - 1)):
            raise DomainError("permutation size does not match the work register")

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind in (GateKind.CPHASE, GateKind.CPERM):
            return self.qubits[:1]
        if self.kind is GateKind.MCX:
            return self.qubits[:-1]
        return ()

    def remapped(self, mapping: Sequence[int]) -> "Gate":
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))

    def inverse(self) -> "Gate":
        if self.kind in (GateKind.PHASE, GateKind.CPHASE):
            return replace(self, theta=-self.theta)
        if self.kind is GateKind.CPERM:
            inv = [0] * len(self.perm)
            for w, image in enumerate(self.perm):
                inv[image] = w
            label = None if self.label is None else f"{self.label}^-1"
            return replace(self, perm=tuple(inv), label=label)
        return self


def h(q: int) -> Gate:
    return Gate(GateKind.H, (q,))


def x(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def phase(theta: float, q: int) -> Gate:
    return Gate(GateKind.PHASE, (q,), theta=float(theta))


def cphase(theta: float, control: int, target: int) -> Gate:
    return Gate(GateKind.CPHASE, (control, target), theta=float(theta))


def swap(q1: int, q2: int) -> Gate:
    return Gate(GateKind.SWAP, (q1, q2))


def mcx(controls: Sequence[int], target: int, polarities: Sequence[int] | None = None) -> Gate:
    if polarities is None:
        polarities = (1,) * len(controls)
    return Gate(GateKind.MCX, (*controls, target), polarities=tuple(int(p) for p in polarities))


def controlled_permutation(control: int, work: Sequence[int], perm: Sequence[int], label: str) -> Gate:
    return Gate(GateKind.CPERM, (control, *work), perm=tuple(int(v) for v in perm), label=label)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    convention: Convention = Convention.QISKIT

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise DomainError("a circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise DomainError(f"gate {g.kind.value} on {g.qubits} exceeds {self.num_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def extended(self, gates: Iterable[Gate]) -> "Circuit":
        return replace(self, gates=self.gates + tuple(gates))

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Gates of ``a`` followed by gates of ``b``."""
    if a.num_qubits != b.num_qubits:
        raise DomainError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    if a.convention is not b.convention:
        raise DomainError("cannot compose circuits written in different conventions")
    return a.extended(b.gates)


def embed(c: Circuit, wires: Sequence[int], num_qubits: int) -> Circuit:
    """Place ``c`` onto a wider circuit, sending its qubit ``q`` to ``wires[q]``."""
    if len(wires) != c.num_qubits:
        raise DomainError("one target wire per qubit is required")
    return Circuit(num_qubits, tuple(g.remapped(wires) for g in c.gates), c.convention)


def inverse(c: Circuit) -> Circuit:
    return replace(c, gates=tuple(g.inverse() for g in reversed(c.gates)))


def convert_convention(c: Circuit, target: Convention) -> Circuit:
    """Relabel wires ``q -> num_qubits-1-q`` when ``target`` differs from the circuit's convention."""
    if c.convention is target:
        return c
    n = c.num_qubits
    mapping = [n - 1 - q for q in range(n)]
    return Circuit(n, tuple(g.remapped(mapping) for g in c.gates), target)


def apply_gate(state: sv.StateVector, g: Gate) -> sv.StateVector:
    k = g.kind
    if k is GateKind.H:
        return sv.apply_single_qubit(state, _H, g.qubits[0])
    if k is GateKind.X:
        return sv.apply_single_qubit(state, _X, g.qubits[0])
    if k is GateKind.PHASE:
        return sv.apply_single_qubit(state, np.diag([1.0, np.exp(1j * g.theta)]), g.qubits[0])
    if k is GateKind.CPHASE:
        return sv.apply_controlled_phase(state, g.theta, *g.qubits)
    if k is GateKind.SWAP:
        return sv.apply_swap(state, *g.qubits)
    if k is GateKind.MCX:
        return sv.apply_multi_controlled_x(state, g.qubits[:-1], g.qubits[-1], g.polarities)
    if k is GateKind.CPERM:
        return sv.apply_controlled_work_permutation(state, g.qubits[0], g.qubits[1:], g.perm)
    raise DomainError(f"unknown gate kind {k}")


def simulate(c: Circuit, state: sv.StateVector | None = None) -> sv.StateVector:
    """Run ``c`` on ``state`` (a copy is taken) or on ``|0...0>``."""
    if state is None:
        state = sv.new_basis_state(c.num_qubits, 0)
    else:
        if state.num_qubits != c.num_qubits:
            raise DomainError("state and circuit sizes differ")
        state = state.copy()
    for g in c.gates:
        apply_gate(state, g)
    return state


def unitary(c: Circuit) -> np.ndarray:
    """Dense matrix of ``c`` in raw bit order. Column ``j`` is the image of ``|j>``."""
    if c.num_qubits > 12:
        raise DomainError("dense unitaries are limited to 12 qubits")
    dim = 1 << c.num_qubits
    out = np.empty((dim, dim), dtype=np.complex128)
    for j in range(dim):
        out[:, j] = simulate(c, sv.new_basis_state(c.num_qubits, j)).amplitudes
    return out


def _cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = []
        w = start
        while not seen[w]:
            seen[w] = True
            cyc.append(w)
            w = perm[w]
        cycles.append(cyc)
    return cycles


def _transposition(u: int, v: int, work: Sequence[int]) -> list[Gate]:
    """Swap basis states ``u`` and ``v`` with fully controlled bit flips along a Gray path."""
    k = len(work)
    path = [u]
    cur = u
    for bit in range(k):
        if (u ^ v) >> bit & 1:
            cur ^= 1 << bit
            path.append(cur)

    def flip(a: int, b: int) -> Gate:
        bit = (a ^ b).bit_length() - 1
        others = [j for j in range(k) if j != bit]
        return mcx([work[j] for j in others], work[bit], [(a >> j) & 1 for j in others])

    steps = [flip(path[i], path[i + 1]) for i in range(len(path) - 1)]
    return steps[:-1] + steps[-1:] + steps[-2::-1]


def lower_permutation(perm: Sequence[int], work_qubits: Sequence[int]) -> list[Gate]:
    """Express a basis permutation of ``work_qubits`` with X and multi-controlled X gates.

    Each cycle is split into transpositions sharing its first element and each
    transposition becomes a palindrome of single-bit flips controlled on the
    full pattern of the remaining work bits.
    """
    size = 1 << len(work_qubits)
    perm = [int(v) for v in perm]
    if len(perm) != size or sorted(perm) != list(range(size)):
        raise DomainError("perm must be a bijection on the work register")
    gates: list[Gate] = []
    for cyc in _cycles(perm):
        head = cyc[0]
        for other in cyc[1:]:
            gates.extend(_transposition(head, other, work_qubits))
    return [x(g.qubits[-1]) if len(g.qubits) == 1 else g for g in gates]


def lower_circuit(c: Circuit) -> Circuit:
    """Replace every controlled work permutation by its lowered gate sequence."""
    out: list[Gate] = []
    for g in c.gates:
        if g.kind is not GateKind.CPERM:
            out.append(g)
            continue
        control, work = g.qubits[0], g.qubits[1:]
        for low in lower_permutation(g.perm, work):
            ctrls = low.controls if low.kind is GateKind.MCX else ()
            pols = low.polarities if low.kind is GateKind.MCX else ()
            out.append(mcx((control, *ctrls), low.qubits[-1], (1, *pols)))
    return replace(c, gates=tuple(out))


# --- OpenQASM 2.0 text -------------------------------------------------------


def _angle(theta: float) -> str:
    return repr(float(theta))


def _q(i: int) -> str:
    return f"q[{i}]"


def _mcp_lines(theta: float, controls: Sequence[int], target: int) -> list[str]:
    """Multi-controlled phase via the square-root recursion (no ancillas)."""
    if len(controls) == 1:
        return [f"cp({_angle(theta)}) {_q(controls[0])},{_q(target)};"]
    last, rest = controls[-1], controls[:-1]
    half = theta / 2
    return (
        [f"cp({_angle(half)}) {_q(last)},{_q(target)};"]
        + _mcx_lines(rest, last)
        + [f"cp({_angle(-half)}) {_q(last)},{_q(target)};"]
        + _mcx_lines(rest, last)
        + _mcp_lines(half, rest, target)
    )


def _mcx_lines(controls: Sequence[int], target: int) -> list[str]:
    k = len(controls)
    if k == 0:
        return [f"x {_q(target)};"]
    if k == 1:
        return [f"cx {_q(controls[0])},{_q(target)};"]
    if k == 2:
        return [f"ccx {_q(controls[0])},{_q(controls[1])},{_q(target)};"]
    return [f"h {_q(target)};"] + _mcp_lines(math.pi, controls, target) + [f"h {_q(target)};"]


def _gate_lines(g: Gate) -> list[str]:
    k = g.kind
    q = g.qubits
    if k is GateKind.H:
        return [f"h {_q(q[0])};"]
    if k is GateKind.X:
        return [f"x {_q(q[0])};"]
    if k is GateKind.PHASE:
        return [f"p({_angle(g.theta)}) {_q(q[0])};"]
    if k is GateKind.CPHASE:
        return [f"cp({_angle(g.theta)}) {_q(q[0])},{_q(q[1])};"]
    if k is GateKind.SWAP:
        return [f"swap {_q(q[0])},{_q(q[1])};"]
    if k is GateKind.MCX:
        flips = [f"x {_q(c)};" for c, pol in zip(q[:-1], g.polarities) if pol == 0]
        return flips + _mcx_lines(q[:-1], q[-1]) + flips
    raise ExportError(f"unlowered permutation gate '{g.label}' cannot be exported; lower it first")


def export_circuit_text(c: Circuit) -> str:
    """OpenQASM 2.0 text for ``c`` using Qiskit wire order."""
    c = convert_convention(c, Convention.QISKIT)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for g in c.gates:
        lines.extend(_gate_lines(g))
    return "\n".join(lines) + "\n"
