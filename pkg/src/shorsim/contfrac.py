"""Continued fractions and recovery of the period from a measured phase.

All arithmetic is exact; measured phases are handled as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

from .errors import ContractViolation, DomainError

RationalLike = Union[Fraction, int, tuple[int, int]]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, tuple):
        num, den = x
        if den <= 0:
            raise DomainError("denominator must be positive")
        return Fraction(num, den)
    return Fraction(x)


@dataclass(frozen=True)
class ContinuedFraction:
    """Coefficients ``[a0; a1, ..., aR]`` with ``a1..aR`` positive."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise DomainError("a continued fraction needs at least one coefficient")
        if any(c <= 0 for c in self.coefficients[1:]):
            raise DomainError("coefficients after the first must be positive")

    def value(self) -> Fraction:
        acc = Fraction(self.coefficients[-1])
        for c in reversed(self.coefficients[:-1]):
            acc = c + 1 / acc
        return acc


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.p, self.q)


def expand(x: RationalLike) -> ContinuedFraction:
    """Euclidean expansion. The last coefficient exceeds 1 unless there is only one."""
    frac = _as_fraction(x)
    num, den = frac.numerator, frac.denominator
    coeffs = []
    while den:
        q, rem = divmod(num, den)
        coeffs.append(q)
        num, den = den, rem
    return ContinuedFraction(tuple(coeffs))


def convergents(cf: ContinuedFraction) -> list[Convergent]:
    """``p_n = a_n p_{n-1} + p_{n-2}`` and likewise for ``q_n``, seeded with ``p_{-1}=1, q_{-1}=0``."""
    out = []
    p_prev, p = 1, cf.coefficients[0]
    q_prev, q = 0, 1
    out.append(Convergent(p, q, 0))
    for n, a in enumerate(cf.coefficients[1:], start=1):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(Convergent(p, q, n))
    return out


class Verdict(str, Enum):
    FACTORS = "factors"
    ODD_PERIOD = "odd_period"
    TRIVIAL_ROOT = "trivial_root"
    NOT_PERIOD = "not_period"


@dataclass(frozen=True)
class PeriodCheck:
    r: int
    verdict: Verdict
    factors: tuple[int, int] | None = None
    root: int | None = None


def factor_from_root(b: int, N: int) -> tuple[int, int]:
    """``(gcd(b-1, N), gcd(b+1, N))`` for a proper square root of unity ``b``."""
    b %= N
    if b * b % N != 1:
        raise ContractViolation(f"{b}^2 is not 1 mod {N}")
    if b in (1, N - 1):
        raise ContractViolation(f"{b} is a trivial square root of unity mod {N}")
    return math.gcd(b - 1, N), math.gcd(b + 1, N)


def check_period(a: int, N: int, r: int) -> PeriodCheck:
    """Decide whether ``r`` is a period of ``a**x mod N`` that yields factors."""
    if r < 1:
        raise DomainError("candidate period must be >= 1")
    if r % 2:
        c = math.isqrt(a)
        if c * c != a:
            return PeriodCheck(r, Verdict.ODD_PERIOD)
        if pow(a, r, N) != 1 % N:
            return PeriodCheck(r, Verdict.NOT_PERIOD)
        b = pow(c, r, N)
    else:
        if pow(a, r, N) != 1 % N:
            return PeriodCheck(r, Verdict.NOT_PERIOD)
        b = pow(a, r // 2, N)
    if b in (1 % N, N - 1):
        return PeriodCheck(r, Verdict.TRIVIAL_ROOT, root=b)
    return PeriodCheck(r, Verdict.FACTORS, factor_from_root(b, N), root=b)


def epsilon_qubits(epsilon: float) -> int:
    """Extra control qubits ``ceil(log2(2 + 1/(2*epsilon)))`` for failure probability ``epsilon``."""
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    target = 2 + 1 / (2 * Fraction(epsilon))
    k = 0
    while (1 << k) < target:
        k += 1
    return k


@dataclass(frozen=True)
class TraceRow:
    """One convergent tried during extraction. ``check`` is ``None`` for the skipped ``s = 0`` entry."""

    convergent: tuple[int, int]
    check: PeriodCheck | None

    @property
    def r(self) -> int:
        return self.convergent[1]

    @property
    def has_factors(self) -> bool:
        return self.check is not None and self.check.verdict is Verdict.FACTORS

    def to_dict(self) -> dict:
        return {
            "convergent": list(self.convergent),
            "r": self.r,
            "verdict": "skipped" if self.check is None else self.check.verdict.value,
            "factors": list(self.check.factors) if self.has_factors else None,
        }


@dataclass(frozen=True)
class Extraction:
    ell: int
    m: int
    phase: Fraction
    expansion: ContinuedFraction
    convergents: tuple[Convergent, ...]
    rows: tuple[TraceRow, ...] = field(default=())
    r: int | None = None
    factors: tuple[int, int] | None = None

    @property
    def succeeded(self) -> bool:
        return self.r is not None

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "bits": format(self.ell, f"0{self.m}b"),
            "phi": [self.phase.numerator, self.phase.denominator],
            "cont_frac": list(self.expansion.coefficients),
            "convergents": [list(c.as_tuple()) for c in self.convergents],
            "rows": [row.to_dict() for row in self.rows],
            "r": self.r,
            "factors": list(self.factors) if self.factors else None,
        }


def extract_period(ell: int, m: int, a: int, N: int) -> Extraction:
    """Try every convergent of ``ell / 2**m`` in increasing denominator order.

    The ``s = 0`` convergent is recorded but not tested. The smallest
    denominator that passes :func:`check_period` is returned as ``r``.
    """
    if m < 1 or not 0 <= ell < (1 << m):
        raise DomainError(f"ell={ell} is not an {m}-bit value")
    phase = Fraction(ell, 1 << m)
    cf = expand(phase)
    convs = sorted(convergents(cf), key=lambda c: (c.q, c.index))
    rows = []
    found_r = found_factors = None
    for c in convs:
        if c.p == 0:
            rows.append(TraceRow(c.as_tuple(), None))
            continue
        check = check_period(a, N, c.q)
        rows.append(TraceRow(c.as_tuple(), check))
        if found_r is None and check.verdict is Verdict.FACTORS:
            found_r, found_factors = c.q, check.factors
    return Extraction(ell, m, phase, cf, tuple(convs), tuple(rows), found_r, found_factors)


def binary_decimal(ell: int, m: int) -> str:
    """Exact decimal expansion of ``ell / 2**m`` (always terminating)."""
    if ell == 0:
        return "0.0"
    digits = str(ell * 5**m).rjust(m, "0").rstrip("0")
    return "0." + digits


def format_trace(ex: Extraction, frequency: int | None = None, show_res: bool = True) -> str:
    """Plain-text trace: bits, phase, expansion, convergents and a verdict per convergent."""
    bits = format(ex.ell, f"0{ex.m}b")
    dec = binary_decimal(ex.ell, ex.m)
    head = f"l_measured   : {bits} {ex.ell}"
    if frequency is not None:
        head += f" frequency: {frequency}"
    lines = [head, f"phi_phase_bin: 0.{bits}", f"phi_phase_dec: {dec}"]
    if show_res:
        lines.append(f"res: {len(dec) - 2}")
    lines.append(f"phi: ({ex.phase.numerator}, {ex.phase.denominator})")
    lines.append(f"cont frac of phi  : {list(ex.expansion.coefficients)}")
    lines.append(f"convergents of phi: {[c.as_tuple() for c in ex.convergents]}")
    for row in ex.rows:
        if row.has_factors:
            f1, f2 = row.check.factors
            lines += [f"conv: {row.convergent} r = {row.r} : factors", f"factor1: {f1}", f"factor2: {f2}"]
        else:
            lines.append(f"conv: {row.convergent} r = {row.r} : no factors found")
    return "\n".join(lines)


def reconstruct(coefficients: Sequence[int]) -> Fraction:
    return ContinuedFraction(tuple(coefficients)).value()
