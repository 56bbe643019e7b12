"""Phase estimation: circuit assembly and the closed-form output distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import statevec as sv
from .circuit import Circuit, Convention, Gate, controlled_permutation, embed, h, simulate, x
from .errors import DomainError
from .modexp import MESpec, Permutation, build_me_operator
from .qft import QftParams, build_iqft

PhaseAngle = Union[float, Fraction]
INTEGER_PHASE_TOL = 1e-12


def _check_power_of_two(M: int) -> None:
    if M < 1 or M & (M - 1):
        raise DomainError(f"M={M} is not a power of two")


def _integer_position(theta: PhaseAngle, M: int) -> int | None:
    """``M*theta`` as an integer when it is one (exactly for fractions, within tolerance for floats)."""
    if isinstance(theta, Fraction):
        pos = theta * M
        return int(pos) % M if pos.denominator == 1 else None
    pos = float(theta) * M
    nearest = round(pos)
    return nearest % M if abs(pos - nearest) <= INTEGER_PHASE_TOL else None


def analytic_amplitude(theta: PhaseAngle, ell: int, M: int) -> complex:
    """Amplitude of ``|ell>`` after phase estimation of an eigenphase ``theta`` (in cycles).

    Uses the geometric-sum closed form and its limit ``delta(ell, M*theta)``
    when ``M*theta`` is an integer.
    """
    _check_power_of_two(M)
    hit = _integer_position(theta, M)
    if hit is not None:
        return 1.0 + 0j if ell == hit else 0j
    d = float(Fraction(theta) - Fraction(ell, M)) if isinstance(theta, Fraction) else float(theta) - ell / M
    return complex((1 - np.exp(2j * np.pi * d * M)) / (M * (1 - np.exp(2j * np.pi * d))))


def _amplitude_row(theta: PhaseAngle, M: int) -> np.ndarray:
    hit = _integer_position(theta, M)
    if hit is not None:
        row = np.zeros(M, dtype=np.complex128)
        row[hit] = 1.0
        return row
    ell = np.arange(M)
    if isinstance(theta, Fraction):
        # Shift the numerator first so that d carries no rounding from theta.
        d = (theta.numerator * M - ell * theta.denominator) / (theta.denominator * M)
    else:
        d = float(theta) - ell / M
    return (1 - np.exp(2j * np.pi * d * M)) / (M * (1 - np.exp(2j * np.pi * d)))


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Work-register input ``sum_s a_s |u_s>`` read out with ``M = 2**m`` phase bins."""

    M: int
    weights: tuple[complex, ...]
    phases: tuple[PhaseAngle, ...]

    def __post_init__(self) -> None:
        _check_power_of_two(self.M)
        if len(self.weights) != len(self.phases):
            raise DomainError("one weight per phase is required")
        total = sum(abs(w) ** 2 for w in self.weights)
        if abs(total - 1.0) > 1e-10:
            raise DomainError(f"weights are not normalised: sum |a_s|^2 = {total}")

    def amplitudes(self) -> np.ndarray:
        """Rows indexed by source ``s``, columns by ``ell``: ``A_ell(phi_s)``."""
        return np.array([_amplitude_row(phi, self.M) for phi in self.phases])

    def probabilities(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.complex128)[:, None]
        return (np.abs(w * self.amplitudes()) ** 2).sum(axis=0)


def analytic_distribution(inputs: Sequence[tuple[complex, PhaseAngle]], M: int) -> np.ndarray:
    """``P_ell = sum_s |a_s A_ell(phi_s)|**2`` for ``inputs = [(a_s, phi_s), ...]``."""
    weights = tuple(complex(a) for a, _ in inputs)
    phases = tuple(phi for _, phi in inputs)
    return AnalyticSpectrum(M, weights, phases).probabilities()


def period_inputs(r: int) -> list[tuple[complex, Fraction]]:
    """Equal superposition of the ``r`` eigenphases ``s/r``, which is what ``|1>`` decomposes into."""
    if r < 1:
        raise DomainError("period must be >= 1")
    return [(1 / math.sqrt(r), Fraction(s, r)) for s in range(r)]


@dataclass(frozen=True)
class QpeCircuit:
    """A phase-estimation circuit plus its register layout.

    ``control_qubits[k]`` carries bit ``k`` of the readout ``ell`` and drives
    ``U^(2**k)``. ``work_qubits[j]`` carries bit ``j`` of the work value.
    """

    circuit: Circuit
    m: int
    n: int
    control_qubits: tuple[int, ...]
    work_qubits: tuple[int, ...]
    work_init: sv.StateVector | None = None

    def initial_state(self) -> sv.StateVector:
        total = self.m + self.n
        if self.work_init is None:
            return sv.new_basis_state(total, 0)
        amps = np.zeros(1 << total, dtype=np.complex128)
        for w in np.flatnonzero(self.work_init.amplitudes):
            idx = sum(((int(w) >> j) & 1) << q for j, q in enumerate(self.work_qubits))
            amps[idx] = self.work_init.amplitudes[w]
        return sv.StateVector(total, amps)

    def run(self) -> sv.StateVector:
        return simulate(self.circuit, self.initial_state())

    def control_distribution(self, final: sv.StateVector | None = None) -> np.ndarray:
        state = self.run() if final is None else final
        return sv.marginal_probabilities(state, self.control_qubits)


def _basis_index(state: sv.StateVector) -> int | None:
    nz = np.flatnonzero(np.abs(state.amplitudes) > 1e-15)
    if nz.size == 1 and abs(state.amplitudes[nz[0]] - 1.0) <= 1e-12:
        return int(nz[0])
    return None


def assemble_qpe(
    m: int,
    work_init: sv.StateVector,
    powers: Sequence[Union[MESpec, Permutation]],
    convention: Convention = Convention.QISKIT,
) -> QpeCircuit:
    """Hadamards on the controls, controlled ``U^(2**k)`` from control bit ``k``, then the inverse QFT.

    ``powers[k]`` is ``U^(2**k)``; the controlled powers are applied from
    ``k = m-1`` down to ``k = 0``.

    A computational-basis ``work_init`` is prepared with X gates inside the
    circuit; any other work state is carried as the initial state.
    """
    if m < 1:
        raise DomainError("need at least one control qubit")
    if len(powers) != m:
        raise DomainError(f"expected {m} controlled powers, got {len(powers)}")
    n = work_init.num_qubits
    total = m + n
    if convention is Convention.QISKIT:
        controls = tuple(range(m))
        work = tuple(m + j for j in range(n))
        iqft_wires = list(controls)
    else:
        controls = tuple(m - 1 - k for k in range(m))
        work = tuple(total - 1 - j for j in range(n))
        iqft_wires = [controls[m - 1 - t] for t in range(m)]

    gates: list[Gate] = []
    basis = _basis_index(work_init)
    if basis is not None:
        gates.extend(x(work[j]) for j in range(n) if (basis >> j) & 1)
        carried = None
    else:
        carried = work_init
    gates.extend(h(q) for q in controls)
    # Largest power first. Exact powers commute, but truncated ones do not, and
    # this order keeps the work register inside the retained cycles longest.
    for k in reversed(range(m)):
        op = powers[k]
        perm = build_me_operator(op, n) if isinstance(op, MESpec) else op
        if perm.size != 1 << n:
            raise DomainError(f"power {k} acts on {perm.size} states, work register has {1 << n}")
        gates.append(controlled_permutation(controls[k], work, perm.mapping, f"U^{1 << k}"))
    front = Circuit(total, tuple(gates), convention)
    back = embed(build_iqft(QftParams(m, convention)), iqft_wires, total)
    return QpeCircuit(front.extended(back.gates), m, n, controls, work, carried)
