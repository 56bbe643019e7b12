"""Dense state vectors and the gate kernels that act on them.

Bit ``q`` of a basis index is qubit ``q``. Which physical wire that is
depends on the circuit convention, which this module does not care about.
All kernels mutate the state in place and return it for chaining.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import ContractViolation, DomainError

UNITARY_TOL = 1e-12


@dataclass
class StateVector:
    """Amplitudes over the ``2**num_qubits`` computational basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.num_qubits < 1:
            raise DomainError("a state needs at least one qubit")
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise DomainError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self, low: "StateVector") -> "StateVector":
        """Return ``self ⊗ low``, with ``low`` occupying the low-order bits."""
        amps = np.kron(self.amplitudes, low.amplitudes)
        return StateVector(self.num_qubits + low.num_qubits, amps)


@lru_cache(maxsize=8)
def _indices(num_qubits: int) -> np.ndarray:
    idx = np.arange(1 << num_qubits, dtype=np.int64)
    idx.flags.writeable = False
    return idx


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.num_qubits:
        raise DomainError(f"qubit {q} out of range for {state.num_qubits} qubits")


def new_basis_state(num_qubits: int, index: int) -> StateVector:
    """Return ``|index>`` on ``num_qubits`` qubits."""
    if num_qubits < 1:
        raise DomainError("a state needs at least one qubit")
    if not 0 <= index < (1 << num_qubits):
        raise DomainError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def apply_single_qubit(state: StateVector, gate: np.ndarray, target: int) -> StateVector:
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ContractViolation("single-qubit gate must be 2x2")
    if not np.allclose(gate @ gate.conj().T, np.eye(2), rtol=0.0, atol=UNITARY_TOL):
        raise ContractViolation("single-qubit gate is not unitary")
    _check_qubit(state, target)
    n = state.num_qubits
    view = state.amplitudes.reshape(1 << (n - 1 - target), 2, 1 << target)
    view[:] = np.einsum("ij,ajb->aib", gate, view)
    return state


def apply_controlled_phase(state: StateVector, theta: float, control: int, target: int) -> StateVector:
    """Multiply amplitudes with both ``control`` and ``target`` set by ``e^{i theta}``."""
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise DomainError("control and target must differ")
    if not np.isfinite(theta):
        raise DomainError("phase angle must be finite")
    mask = (1 << control) | (1 << target)
    idx = _indices(state.num_qubits)
    state.amplitudes[(idx & mask) == mask] *= np.exp(1j * theta)
    return state


def apply_swap(state: StateVector, q1: int, q2: int) -> StateVector:
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise DomainError("cannot swap a qubit with itself")
    n = state.num_qubits
    t = state.amplitudes.reshape((2,) * n)
    state.amplitudes[:] = np.swapaxes(t, n - 1 - q1, n - 1 - q2).reshape(-1)
    return state


def apply_multi_controlled_x(
    state: StateVector,
    controls: Sequence[int],
    target: int,
    polarities: Sequence[int] | None = None,
) -> StateVector:
    """Flip ``target`` where every control bit equals its polarity (default 1)."""
    _check_qubit(state, target)
    for c in controls:
        _check_qubit(state, c)
    if target in controls or len(set(controls)) != len(controls):
        raise DomainError("controls and target must be distinct")
    if polarities is None:
        polarities = [1] * len(controls)
    idx = _indices(state.num_qubits)
    ctrl_mask = 0
    ctrl_value = 0
    for c, pol in zip(controls, polarities, strict=True):
        ctrl_mask |= 1 << c
        ctrl_value |= (pol & 1) << c
    tbit = 1 << target
    src = idx[((idx & ctrl_mask) == ctrl_value) & ((idx & tbit) == 0)]
    dst = src | tbit
    amps = state.amplitudes
    amps[src], amps[dst] = amps[dst], amps[src].copy()
    return state


def _as_bijection(perm: Union[Sequence[int], np.ndarray], size: int) -> np.ndarray:
    arr = np.asarray(perm, dtype=np.int64)
    if arr.shape != (size,):
        raise ContractViolation(f"permutation must have {size} entries, got {arr.shape}")
    if arr.min() < 0 or arr.max() >= size or np.unique(arr).size != size:
        raise ContractViolation("permutation is not a bijection")
    return arr


def apply_controlled_work_permutation(
    state: StateVector,
    control: int | None,
    work_qubits: Sequence[int],
    perm: Union[Sequence[int], np.ndarray],
) -> StateVector:
    """Map work sub-index ``w`` to ``perm[w]`` on components whose control bit is set.

    ``work_qubits[j]`` carries bit ``j`` of ``w``. A ``control`` of ``None``
    applies the permutation unconditionally.
    """
    k = len(work_qubits)
    if k == 0 or len(set(work_qubits)) != k:
        raise DomainError("work qubits must be a non-empty list of distinct qubits")
    for q in work_qubits:
        _check_qubit(state, q)
    if control is not None:
        _check_qubit(state, control)
        if control in work_qubits:
            raise DomainError("control qubit overlaps the work register")
    mapping = _as_bijection(perm, 1 << k)

    idx = _indices(state.num_qubits)
    w = np.zeros_like(idx)
    work_mask = 0
    for j, q in enumerate(work_qubits):
        w |= ((idx >> q) & 1) << j
        work_mask |= 1 << q
    image = mapping[w]
    dest = idx & ~work_mask
    for j, q in enumerate(work_qubits):
        dest |= ((image >> j) & 1) << q
    if control is not None:
        dest = np.where((idx >> control) & 1 == 1, dest, idx)

    out = np.empty_like(state.amplitudes)
    out[dest] = state.amplitudes
    state.amplitudes[:] = out
    return state


def probabilities(state: StateVector) -> np.ndarray:
    """Return ``|amplitude|**2`` indexed by basis state."""
    return np.abs(state.amplitudes) ** 2


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Distribution of the sub-register ``qubits``; ``qubits[j]`` is bit ``j`` of the result index."""
    if len(qubits) == 0:
        raise DomainError("qubit subset must be non-empty")
    if len(set(qubits)) != len(qubits):
        raise DomainError("qubit subset has duplicates")
    for q in qubits:
        _check_qubit(state, q)
    n = state.num_qubits
    t = probabilities(state).reshape((2,) * n)
    keep_axes = [n - 1 - q for q in qubits]
    drop = tuple(ax for ax in range(n) if ax not in keep_axes)
    reduced = t.sum(axis=drop) if drop else t
    # Remaining axes are in increasing axis order; put qubits[-1] first so
    # that qubits[0] lands on the least significant bit after flattening.
    remaining = sorted(keep_axes)
    order = [remaining.index(n - 1 - q) for q in reversed(qubits)]
    return np.transpose(reduced, order).reshape(-1)


def sample(
    source: Union[StateVector, np.ndarray],
    shots: int,
    seed: int | None = None,
) -> np.ndarray:
    """Draw ``shots`` i.i.d. basis indices from a state or a probability vector."""
    if shots < 1:
        raise DomainError("shots must be at least 1")
    p = probabilities(source) if isinstance(source, StateVector) else np.asarray(source, float)
    p = np.clip(p, 0.0, None)
    rng = np.random.default_rng(seed)
    return rng.choice(p.size, size=shots, p=p / p.sum())


def counts(samples: np.ndarray, size: int) -> np.ndarray:
    """Histogram of sampled indices over ``range(size)``."""
    return np.bincount(np.asarray(samples, dtype=np.int64), minlength=size)
