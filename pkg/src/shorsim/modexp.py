"""Modular exponentiation: arithmetic, ME permutations and their eigenstates.

The ME operator ``U_{a,N}`` sends ``|w>`` to ``|a*w mod N>``. Three ways of
building the power ``U^p`` are supported, selected by :class:`MEVersion`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DomainError
from .statevec import StateVector


def _require_coprime(a: int, N: int) -> None:
    if N < 2:
        raise DomainError("modulus must be at least 2")
    if math.gcd(a, N) != 1:
        raise DomainError(f"gcd({a}, {N}) = {math.gcd(a, N)} != 1")


def mod_exp(a: int, x: int, N: int) -> int:
    """``a**x mod N`` by square-and-multiply (Python's three-argument ``pow``)."""
    if N < 2:
        raise DomainError("modulus must be at least 2")
    if x < 0:
        raise DomainError("exponent must be non-negative")
    return pow(a, x, N)


def order_bruteforce(a: int, N: int) -> int:
    """Smallest ``r >= 1`` with ``a**r = 1 (mod N)``, found by a linear scan."""
    _require_coprime(a, N)
    r, acc = 1, a % N
    while acc != 1 % N:
        acc = acc * a % N
        r += 1
    return r


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``range(size)``; ``mapping[w]`` is the image of ``w``."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        m = tuple(int(v) for v in self.mapping)
        object.__setattr__(self, "mapping", m)
        if sorted(m) != list(range(len(m))):
            raise ContractViolation("mapping is not a bijection")

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(tuple(range(size)))

    @classmethod
    def from_cycles(cls, size: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Each cycle ``[c0, c1, ..., ck]`` maps ``c_i -> c_{i+1}`` and ``ck -> c0``."""
        mapping = list(range(size))
        used: set[int] = set()
        for cyc in cycles:
            for v in cyc:
                if not 0 <= v < size:
                    raise DomainError(f"cycle element {v} outside [0, {size})")
                if v in used:
                    raise DomainError(f"cycles overlap at {v}")
                used.add(v)
            for i, v in enumerate(cyc):
                mapping[v] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(mapping))

    @property
    def size(self) -> int:
        return len(self.mapping)

    def __call__(self, w: int) -> int:
        return self.mapping[w]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=np.int64)

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other``."""
        return Permutation(tuple(other.mapping[v] for v in self.mapping))

    def power(self, p: int) -> "Permutation":
        if p < 0:
            raise DomainError("negative powers are not supported")
        arr = self.as_array()
        out = np.arange(self.size)
        while p:
            if p & 1:
                out = arr[out]
            arr = arr[arr]
            p >>= 1
        return Permutation(tuple(out.tolist()))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for w, v in enumerate(self.mapping):
            inv[v] = w
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(v == w for w, v in enumerate(self.mapping))

    def cycles(self) -> list[list[int]]:
        """Non-trivial cycles, each starting from its smallest element."""
        seen = [False] * self.size
        out = []
        for start in range(self.size):
            if seen[start] or self.mapping[start] == start:
                continue
            cyc = []
            w = start
            while not seen[w]:
                seen[w] = True
                cyc.append(w)
                w = self.mapping[w]
            out.append(cyc)
        return out

    def matrix(self) -> np.ndarray:
        """Dense 0/1 matrix with ``M[perm(w), w] = 1``."""
        mat = np.zeros((self.size, self.size))
        mat[list(self.mapping), list(range(self.size))] = 1.0
        return mat


def full_me_permutation(a: int, N: int, n: int) -> Permutation:
    """``w -> a*w mod N`` for ``w < N``; ``w`` is fixed for ``w >= N``."""
    _require_coprime(a, N)
    if (1 << n) < N:
        raise DomainError(f"{n} work qubits cannot hold residues mod {N}")
    return Permutation(tuple(a * w % N if w < N else w for w in range(1 << n)))


def cycle_of_one(a: int, N: int) -> list[int]:
    """Orbit ``[1, a, a**2, ...] mod N`` of 1 under multiplication by ``a``."""
    _require_coprime(a, N)
    out = [1 % N]
    w = a % N
    while w != out[0]:
        out.append(w)
        w = w * a % N
    return out


def power_cycles(a: int, N: int, p: int, seeds: Iterable[int]) -> list[list[int]]:
    """Disjoint orbits of ``seeds`` under ``w -> a**p * w mod N``; repeats are skipped."""
    _require_coprime(a, N)
    if p < 1:
        raise DomainError("power must be >= 1")
    mult = pow(a, p, N)
    found: set[int] = set()
    out = []
    for seed in seeds:
        seed %= N
        if seed in found:
            continue
        cyc = [seed]
        w = seed * mult % N
        while w != seed:
            cyc.append(w)
            w = w * mult % N
        found.update(cyc)
        out.append(cyc)
    return out


class MEVersion(IntEnum):
    CONCATENATED = 0
    PER_POWER_CYCLES = 1
    TRUNCATED = 2


# Seeds for the per-power cycle construction where the default {1, a} is not used.
_SEED_PRESETS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 247): (1, 2, 4, 8),
}

# Retained chains for the truncated construction, keyed by (a, N, p).
# An open chain is closed by mapping its last element back to its first.
_TRUNCATION_PRESETS: dict[tuple[int, int, int], tuple[tuple[int, ...], ...]] = {
    (7, 33, 1): ((1, 7, 16, 13, 25, 10, 4),),
}


@dataclass(frozen=True)
class MESpec:
    """Description of ``U_{a,N}^p``.

    ``cycles`` lists the orbits the operator must realise. Every listed
    transition must agree with multiplication by ``a**p``, except the closing
    step of a truncated chain.
    """

    a: int
    N: int
    p: int
    version: MEVersion
    cycles: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "version", MEVersion(self.version))
        object.__setattr__(self, "cycles", tuple(tuple(int(v) for v in c) for c in self.cycles))
        _require_coprime(self.a, self.N)
        if self.p < 1:
            raise DomainError("power must be >= 1")
        seen: set[int] = set()
        mult = pow(self.a, self.p, self.N)
        for cyc in self.cycles:
            if not cyc:
                raise DomainError("empty cycle")
            for v in cyc:
                if not 0 <= v < self.N:
                    raise DomainError(f"cycle element {v} not in [0, {self.N})")
                if v in seen:
                    raise DomainError(f"cycles overlap at {v}")
                seen.add(v)
            steps = list(zip(cyc, cyc[1:] + cyc[:1]))
            if self.version is MEVersion.TRUNCATED:
                steps = steps[:-1]
            for src, dst in steps:
                if src * mult % self.N != dst:
                    raise DomainError(
                        f"transition {src}->{dst} disagrees with {self.a}^{self.p} mod {self.N}"
                    )

    def to_json(self) -> str:
        return json.dumps(
            {"a": self.a, "N": self.N, "p": self.p, "version": int(self.version),
             "cycles": [list(c) for c in self.cycles]}
        )

    @classmethod
    def from_json(cls, text: str) -> "MESpec":
        doc = json.loads(text)
        if set(doc) != {"a", "N", "p", "version", "cycles"}:
            raise DomainError(f"unexpected MESpec fields: {sorted(doc)}")
        return cls(doc["a"], doc["N"], doc["p"], MEVersion(doc["version"]), tuple(map(tuple, doc["cycles"])))


def default_seeds(a: int, N: int) -> tuple[int, ...]:
    return _SEED_PRESETS.get((a, N), (1, a % N))


def default_truncation(a: int, N: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Retained chains for the truncated operator: a preset or the cycle through 1."""
    preset = _TRUNCATION_PRESETS.get((a, N, p))
    if preset is not None:
        return preset
    return tuple(map(tuple, power_cycles(a, N, p, [1])))


def make_me_spec(
    a: int,
    N: int,
    p: int,
    version: MEVersion | int = MEVersion.CONCATENATED,
    seeds: Sequence[int] | None = None,
    cycles: Sequence[Sequence[int]] | None = None,
) -> MESpec:
    """Build an :class:`MESpec` filling in the default cycles for ``version``."""
    version = MEVersion(version)
    if cycles is None:
        if version is MEVersion.CONCATENATED:
            cycles = power_cycles(a, N, p, range(1, N))
            cycles = [c for c in cycles if len(c) > 1]
        elif version is MEVersion.PER_POWER_CYCLES:
            cycles = power_cycles(a, N, p, seeds if seeds is not None else default_seeds(a, N))
        else:
            cycles = default_truncation(a, N, p)
    return MESpec(a, N, p, version, tuple(map(tuple, cycles)))


def build_me_operator(spec: MESpec, n: int) -> Permutation:
    """Permutation on ``2**n`` work states realising ``spec``."""
    if (1 << n) < spec.N:
        raise DomainError(f"{n} work qubits cannot hold residues mod {spec.N}")
    if spec.version is MEVersion.CONCATENATED:
        return full_me_permutation(spec.a, spec.N, n).power(spec.p)
    return Permutation.from_cycles(1 << n, spec.cycles)


def eigenstate(a: int, N: int, s: int, n: int) -> StateVector:
    """``|u_s> = r**-0.5 * sum_k exp(-2*pi*i*k*s/r) |a**k mod N>`` on ``n`` work qubits."""
    orbit = cycle_of_one(a, N)
    r = len(orbit)
    if not 0 <= s < r:
        raise DomainError(f"s={s} outside [0, {r})")
    if (1 << n) < N:
        raise DomainError(f"{n} work qubits cannot hold residues mod {N}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    k = np.arange(r)
    amps[orbit] = np.exp(-2j * np.pi * k * s / r) / math.sqrt(r)
    return StateVector(n, amps)
