import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import orbit
from shorsim.errors import ContractViolation, DomainError
from shorsim.modexp import (
    MESpec,
    MEVersion,
    Permutation,
    build_me_operator,
    cycle_of_one,
    default_truncation,
    eigenstate,
    full_me_permutation,
    make_me_spec,
    mod_exp,
    order_bruteforce,
    power_cycles,
)

# (a, N) pairs used by the end-to-end runs.
ACCEPTANCE_BASES = [(8, 15), (4, 15), (2, 21), (13, 21), (4, 35), (7, 33), (5, 143), (2, 247)]


def n_for(N):
    return (N - 1).bit_length()


class TestModExp:
    def test_small(self):
        assert mod_exp(8, 2, 15) == 4

    def test_zero_exponent(self):
        assert mod_exp(7, 0, 33) == 1

    def test_2_36_247(self):
        assert mod_exp(2, 36, 247) == 1

    def test_large_modulus(self):
        N = (1 << 2048) + 981
        assert mod_exp(3, 1 << 1000, N) == pow(3, 1 << 1000, N)

    @given(st.integers(0, 10**6), st.integers(0, 500), st.integers(2, 10**6))
    def test_matches_repeated_multiplication(self, a, x, N):
        acc = 1 % N
        for _ in range(x):
            acc = acc * a % N
        assert mod_exp(a, x, N) == acc


class TestOrder:
    @pytest.mark.parametrize("a,N,r", [(4, 15, 2), (8, 15, 4), (7, 33, 10), (5, 143, 20), (2, 247, 36), (2, 21, 6)])
    def test_known(self, a, N, r):
        assert order_bruteforce(a, N) == r

    def test_not_coprime(self):
        with pytest.raises(DomainError):
            order_bruteforce(6, 15)


class TestFullPermutation:
    def test_known_images(self):
        assert full_me_permutation(4, 15, 4)(7) == 13
        assert full_me_permutation(8, 15, 4)(14) == 7

    def test_fixes_zero_and_padding(self):
        perm = full_me_permutation(2, 21, 5)
        assert perm(0) == 0
        assert all(perm(w) == w for w in range(21, 32))

    def test_register_too_small(self):
        with pytest.raises(DomainError):
            full_me_permutation(2, 21, 4)

    @pytest.mark.parametrize("a,N", ACCEPTANCE_BASES)
    def test_bijective(self, a, N):
        perm = full_me_permutation(a, N, n_for(N))
        assert sorted(perm.mapping) == list(range(1 << n_for(N)))


class TestCycles:
    def test_cycle_of_one_21(self):
        assert cycle_of_one(2, 21) == [1, 2, 4, 8, 16, 11]

    def test_cycle_of_one_35_includes_29(self):
        assert cycle_of_one(4, 35) == [1, 4, 16, 29, 11, 9]

    def test_cycle_of_one_13_21(self):
        assert cycle_of_one(13, 21) == [1, 13]

    def test_power_cycles_examples(self):
        assert power_cycles(2, 21, 2, [1, 2]) == [[1, 4, 16], [2, 8, 11]]
        assert power_cycles(4, 35, 4, [1, 4]) == [[1, 11, 16], [4, 9, 29]]
        assert power_cycles(5, 143, 8, [1]) == [[1, 92, 27, 53, 14]]

    def test_repeated_seed_skipped(self):
        assert power_cycles(2, 21, 2, [1, 4, 16]) == [[1, 4, 16]]

    @pytest.mark.parametrize("a,N", ACCEPTANCE_BASES)
    def test_cycle_of_one_matches_oracle(self, a, N):
        assert cycle_of_one(a, N) == orbit(a, N, 1)
        assert len(cycle_of_one(a, N)) == order_bruteforce(a, N)

    @given(st.sampled_from(ACCEPTANCE_BASES), st.integers(0, 9), st.lists(st.integers(1, 300), min_size=1, max_size=6))
    def test_disjoint_and_closed(self, base, k, seeds):
        a, N = base
        p = 1 << k
        cycles = power_cycles(a, N, p, [s for s in seeds if math.gcd(s, N) == 1] or [1])
        flat = [v for c in cycles for v in c]
        assert len(flat) == len(set(flat))
        mult = pow(a, p, N)
        assert {v * mult % N for v in flat} == set(flat)


class TestPermutation:
    def test_from_cycles(self):
        perm = Permutation.from_cycles(8, [[1, 2, 4]])
        assert perm.mapping == (0, 2, 4, 3, 1, 5, 6, 7)

    def test_overlapping_cycles(self):
        with pytest.raises(DomainError):
            Permutation.from_cycles(8, [[1, 2], [2, 3]])

    def test_not_bijective(self):
        with pytest.raises(ContractViolation):
            Permutation((0, 0, 1))

    def test_power_and_inverse(self):
        perm = full_me_permutation(2, 21, 5)
        assert perm.power(6).is_identity()
        assert perm.then(perm.inverse()).is_identity()

    def test_cycles_roundtrip(self):
        perm = full_me_permutation(7, 33, 6)
        assert Permutation.from_cycles(perm.size, perm.cycles()) == perm

    def test_matrix_is_permutation(self):
        mat = full_me_permutation(8, 15, 4).matrix()
        np.testing.assert_array_equal(mat @ mat.T, np.eye(16))
        assert mat[9, 3] == 1  # 8*3 mod 15 = 9


class TestMESpec:
    def test_u4_21_per_power(self):
        spec = make_me_spec(2, 21, 4, MEVersion.PER_POWER_CYCLES)
        assert build_me_operator(spec, 5)(1) == 16

    def test_truncated_33(self):
        spec = make_me_spec(7, 33, 2, MEVersion.TRUNCATED)
        assert spec.cycles == ((1, 16, 25, 4, 31),)
        perm = build_me_operator(spec, 6)
        assert perm(1) == 16
        assert all(perm(w) == w for w in range(64) if w not in spec.cycles[0])

    def test_truncated_preset_closes_open_chain(self):
        chain = default_truncation(7, 33, 1)[0]
        perm = build_me_operator(make_me_spec(7, 33, 1, MEVersion.TRUNCATED), 6)
        assert perm(chain[-1]) == chain[0]

    def test_concatenated_p1_is_full(self):
        spec = make_me_spec(8, 15, 1, MEVersion.CONCATENATED)
        assert build_me_operator(spec, 4) == full_me_permutation(8, 15, 4)

    def test_247_per_power_seed_preset(self):
        spec = make_me_spec(2, 247, 64, MEVersion.PER_POWER_CYCLES)
        mult = pow(2, 64, 247)
        assert [c[0] for c in spec.cycles] == [1, 2, 4, 8]
        for cyc in spec.cycles:
            assert all(cyc[(i + 1) % len(cyc)] == cyc[i] * mult % 247 for i in range(len(cyc)))
        assert 220 * mult % 247 == 244

    def test_overlap_rejected(self):
        with pytest.raises(DomainError):
            MESpec(2, 21, 2, MEVersion.PER_POWER_CYCLES, ((1, 4, 16), (16, 1, 4)))

    def test_wrong_transition_rejected(self):
        with pytest.raises(DomainError):
            MESpec(2, 21, 2, MEVersion.PER_POWER_CYCLES, ((1, 2, 4),))

    def test_element_out_of_range(self):
        with pytest.raises(DomainError):
            MESpec(2, 21, 1, MEVersion.TRUNCATED, ((1, 22),))

    def test_not_coprime(self):
        with pytest.raises(DomainError):
            make_me_spec(3, 21, 1)

    def test_json_fields(self):
        spec = make_me_spec(2, 21, 2, MEVersion.PER_POWER_CYCLES)
        doc = json.loads(spec.to_json())
        assert set(doc) == {"a", "N", "p", "version", "cycles"}
        assert doc["cycles"] == [[1, 4, 16], [2, 8, 11]]

    @pytest.mark.parametrize("version", list(MEVersion))
    def test_json_roundtrip(self, version):
        spec = make_me_spec(7, 33, 4, version)
        assert MESpec.from_json(spec.to_json()) == spec

    def test_json_extra_field(self):
        doc = json.loads(make_me_spec(2, 21, 1).to_json())
        doc["extra"] = 1
        with pytest.raises(DomainError):
            MESpec.from_json(json.dumps(doc))

    @pytest.mark.parametrize("a,N", ACCEPTANCE_BASES)
    @pytest.mark.parametrize("k", range(0, 8))
    def test_per_power_agrees_with_iterated_full(self, a, N, k):
        p = 1 << k
        n = n_for(N)
        ours = build_me_operator(make_me_spec(a, N, p, MEVersion.PER_POWER_CYCLES), n)
        full = full_me_permutation(a, N, n)
        for cyc in make_me_spec(a, N, p, MEVersion.PER_POWER_CYCLES).cycles:
            for w in cyc:
                target = w
                for _ in range(p):
                    target = full(target)
                assert ours(w) == target


class TestEigenstate:
    def test_s0_a8(self):
        amps = eigenstate(8, 15, 0, 4).amplitudes
        expect = np.zeros(16)
        expect[[1, 8, 4, 2]] = 0.5
        np.testing.assert_allclose(amps, expect, atol=1e-15)

    def test_s_out_of_range(self):
        with pytest.raises(DomainError):
            eigenstate(8, 15, 4, 4)

    @pytest.mark.parametrize("a,N", ACCEPTANCE_BASES)
    def test_eigen_relation(self, a, N):
        n = n_for(N)
        perm = full_me_permutation(a, N, n)
        r = order_bruteforce(a, N)
        for s in range(r):
            u = eigenstate(a, N, s, n).amplitudes
            image = np.zeros_like(u)
            image[list(perm.mapping)] = u
            assert np.max(np.abs(image - cmath.exp(2j * math.pi * s / r) * u)) <= 1e-10

    @pytest.mark.parametrize("a,N", [(7, 33), (8, 15), (2, 21), (5, 143)])
    def test_phase_weighted_sums(self, a, N):
        n = n_for(N)
        r = order_bruteforce(a, N)
        us = [eigenstate(a, N, s, n).amplitudes for s in range(r)]
        for k in range(r):
            total = sum(cmath.exp(2j * math.pi * k * s / r) * u for s, u in enumerate(us)) / math.sqrt(r)
            expect = np.zeros(1 << n)
            expect[pow(a, k, N)] = 1
            np.testing.assert_allclose(total, expect, atol=1e-10)

    @pytest.mark.parametrize("a,N", ACCEPTANCE_BASES)
    def test_unit_norm(self, a, N):
        for s in range(order_bruteforce(a, N)):
            assert abs(eigenstate(a, N, s, n_for(N)).norm() - 1) <= 1e-12
