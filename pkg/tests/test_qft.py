import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import bit_reversal, dft_matrix, random_state
from shorsim import statevec as sv
from shorsim.circuit import Convention, GateKind, compose, simulate, unitary
from shorsim.errors import DomainError
from shorsim.qft import QftParams, build_iqft, build_qft, partial_phases


class TestBuildQft:
    def test_m1_is_hadamard(self):
        c = build_qft(QftParams(1))
        assert [g.kind for g in c] == [GateKind.H]
        np.testing.assert_allclose(unitary(c), np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)

    def test_m2_entries(self):
        u = unitary(build_qft(QftParams(2)))
        for k in range(4):
            for ell in range(4):
                assert abs(u[k, ell] - 0.5 * np.exp(2j * np.pi * k * ell / 4)) < 1e-12

    def test_m3_gate_count(self):
        c = build_qft(QftParams(3))
        assert c.count(GateKind.H) + c.count(GateKind.CPHASE) == 6
        assert c.count(GateKind.SWAP) == 1

    @pytest.mark.parametrize("m", range(1, 9))
    def test_gate_count_formula(self, m):
        c = build_qft(QftParams(m))
        assert c.count(GateKind.H) + c.count(GateKind.CPHASE) == m * (m + 1) // 2
        assert c.count(GateKind.SWAP) == m // 2

    @pytest.mark.parametrize("m", range(1, 7))
    @pytest.mark.parametrize("conv", list(Convention))
    def test_dft_matrix(self, m, conv):
        u = unitary(build_qft(QftParams(m, conv)))
        target = dft_matrix(m)
        if conv is Convention.PHYSMATH:
            R = bit_reversal(m)
            target = R @ target @ R
        assert np.max(np.abs(u - target)) <= 1e-12

    @pytest.mark.parametrize("m", range(1, 6))
    def test_convention_duality(self, m):
        R = bit_reversal(m)
        q1 = unitary(build_qft(QftParams(m, Convention.QISKIT)))
        q2 = unitary(build_qft(QftParams(m, Convention.PHYSMATH)))
        np.testing.assert_allclose(q1, R @ q2 @ R, atol=1e-12)

    def test_without_swaps_is_bit_reversed(self):
        m = 4
        u = unitary(build_qft(QftParams(m, swaps=False)))
        np.testing.assert_allclose(bit_reversal(m) @ u, dft_matrix(m), atol=1e-12)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            QftParams(0)
        with pytest.raises(DomainError):
            QftParams(3, angle_cutoff_k=0)


class TestInverse:
    @pytest.mark.parametrize("m", range(1, 9))
    def test_qft_then_iqft_is_identity(self, m):
        p = QftParams(m)
        c = compose(build_qft(p), build_iqft(p))
        vec = random_state(m, np.random.default_rng(m))
        out = simulate(c, sv.StateVector(m, vec))
        assert np.max(np.abs(out.amplitudes - vec)) <= 1e-10

    @pytest.mark.parametrize("m", [9, 10, 11, 12])
    def test_unitarity_on_random_states_large(self, m):
        p = QftParams(m)
        vec = random_state(m, np.random.default_rng(100 + m))
        out = simulate(build_iqft(p), simulate(build_qft(p), sv.StateVector(m, vec)))
        assert np.max(np.abs(out.amplitudes - vec)) <= 1e-10

    def test_m1_is_self_inverse(self):
        assert [g.kind for g in build_iqft(QftParams(1))] == [GateKind.H]

    def test_reverse_with_negated_angles(self):
        fwd = build_qft(QftParams(4)).gates
        inv = build_iqft(QftParams(4)).gates
        for g, gi in zip(fwd, reversed(inv)):
            assert g.qubits == gi.qubits
            assert (g.theta is None and gi.theta is None) or g.theta == -gi.theta

    def test_exhaustive_basis_m4(self):
        p = QftParams(4)
        for ell in range(16):
            out = simulate(build_iqft(p), simulate(build_qft(p), sv.new_basis_state(4, ell)))
            assert abs(out.amplitudes[ell] - 1) < 1e-12

    @pytest.mark.parametrize("m", range(1, 7))
    def test_iqft_is_conjugate_transpose(self, m):
        u = unitary(build_qft(QftParams(m)))
        ui = unitary(build_iqft(QftParams(m)))
        np.testing.assert_allclose(ui, u.conj().T, atol=1e-12)


class TestCutoff:
    def test_cutoff_m_equals_exact(self):
        assert build_qft(QftParams(5, angle_cutoff_k=5)) == build_qft(QftParams(5))

    @pytest.mark.parametrize("m", [4, 5, 6])
    def test_error_shrinks_with_k(self, m):
        exact = dft_matrix(m)
        errs = [np.max(np.abs(unitary(build_qft(QftParams(m, angle_cutoff_k=k))) - exact)) for k in range(1, m + 1)]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-12 < errs[-2] < errs[0]


class TestPartialPhases:
    def test_zero(self):
        assert all(p.value == 0 for p in partial_phases(0, 5))

    def test_m2_ell1(self):
        assert [p.value for p in partial_phases(1, 2)] == [Fraction(1, 2), Fraction(1, 4)]

    @given(st.integers(1, 10), st.data())
    def test_last_stage_is_full_phase(self, m, data):
        ell = data.draw(st.integers(0, (1 << m) - 1))
        assert partial_phases(ell, m)[-1].value == Fraction(ell, 1 << m)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            partial_phases(4, 2)

    @pytest.mark.parametrize("ell", range(16))
    def test_product_form_equals_qft_state(self, ell):
        # The r-th factor, counted from the most significant qubit, carries Omega_r.
        m = 4
        phases = partial_phases(ell, m)
        prod = np.array([1.0 + 0j])
        for ph in phases:
            prod = np.kron(prod, np.array([1, np.exp(2j * np.pi * float(ph.value))]) / math.sqrt(2))
        # prod is ordered MSB first; the QFT output is raw little-endian.
        qft_state = simulate(build_qft(QftParams(m)), sv.new_basis_state(m, ell)).amplitudes
        np.testing.assert_allclose(prod, qft_state, atol=1e-12)
