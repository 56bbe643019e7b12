"""End-to-end factoring runs on the state-vector simulator."""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Iterable, TextIO

import numpy as np
from sympy import isprime, perfect_power

from . import statevec as sv
from .circuit import Convention
from .contfrac import Extraction, extract_period, format_trace
from .errors import DomainError
from .modexp import MEVersion, make_me_spec, order_bruteforce
from .qpe import QpeCircuit, analytic_distribution, assemble_qpe, period_inputs

DOMINANT_FRACTION = 0.5
SUBDOMINANT_FRACTION = 0.1
# Probabilities below this are treated as simulation round-off, not peaks.
PEAK_FLOOR = 1e-12


class InvalidModulus(DomainError):
    """``N`` cannot be factored by period finding (even, prime, prime power or too small)."""

    def __init__(self, N: int, reason: str):
        super().__init__(f"N={N} is rejected: {reason}")
        self.N = N
        self.reason = reason


def classical_precheck(N: int) -> None:
    """Raise :class:`InvalidModulus` unless ``N`` is an odd composite with two distinct prime factors."""
    if N < 3:
        raise InvalidModulus(N, "too small")
    if N % 2 == 0:
        raise InvalidModulus(N, "even")
    if isprime(N):
        raise InvalidModulus(N, "prime")
    pp = perfect_power(N)
    if pp and isprime(pp[0]):
        raise InvalidModulus(N, f"prime power {pp[0]}^{pp[1]}")


def work_qubits(N: int) -> int:
    """``ceil(log2 N)``."""
    return (N - 1).bit_length()


@dataclass(frozen=True)
class ShorConfig:
    N: int
    a: int | None = None
    m: int | None = None
    n_epsilon: int = 0
    me_version: MEVersion = MEVersion.CONCATENATED
    shots: int | None = None
    seed: int | None = None
    error_inject: bool = False
    max_attempts: int = 10
    convention: Convention = Convention.QISKIT

    def __post_init__(self) -> None:
        object.__setattr__(self, "me_version", MEVersion(self.me_version))
        classical_precheck(self.N)
        if self.a is not None:
            if not 1 < self.a < self.N:
                raise DomainError(f"base a={self.a} must satisfy 1 < a < N")
            if math.gcd(self.a, self.N) != 1:
                raise DomainError(f"base a={self.a} shares the factor {math.gcd(self.a, self.N)} with N")
        if self.m is not None and self.m < 1:
            raise DomainError("m must be >= 1")
        if self.n_epsilon < 0:
            raise DomainError("n_epsilon must be >= 0")
        if self.shots is not None and self.shots < 1:
            raise DomainError("shots must be >= 1")
        if self.max_attempts < 1:
            raise DomainError("max_attempts must be >= 1")

    @property
    def n(self) -> int:
        return work_qubits(self.N)

    @property
    def control_qubits(self) -> int:
        return self.m if self.m is not None else 2 * self.n + 1 + self.n_epsilon

    def to_dict(self) -> dict:
        d = asdict(self)
        d["me_version"] = int(self.me_version)
        d["convention"] = self.convention.value
        return d


@dataclass(frozen=True)
class BaseChoice:
    a: int
    factor: int | None = None


def choose_base(N: int, seed: int | None = None) -> BaseChoice:
    """Uniform ``a`` in ``[2, N-1]``; a shared factor with ``N`` is reported directly."""
    if N < 4:
        raise DomainError("N too small to choose a base")
    a = random.Random(seed).randrange(2, N)
    g = math.gcd(a, N)
    return BaseChoice(a, g if g > 1 else None)


def inject_lsb_error(ell: int, m: int) -> int:
    """Add one to the least significant bit, wrapping ``2**m - 1`` to 0."""
    if not 0 <= ell < (1 << m):
        raise DomainError(f"ell={ell} is not an {m}-bit value")
    return (ell + 1) % (1 << m)


def build_shor_circuit(
    a: int,
    N: int,
    m: int,
    version: MEVersion | int = MEVersion.CONCATENATED,
    convention: Convention = Convention.QISKIT,
) -> QpeCircuit:
    """Period-finding circuit with the work register prepared in ``|1>``."""
    n = work_qubits(N)
    powers = [make_me_spec(a, N, 1 << k, version) for k in range(m)]
    return assemble_qpe(m, sv.new_basis_state(n, 1), powers, convention)


def simulated_histogram(
    a: int,
    N: int,
    m: int,
    version: MEVersion | int = MEVersion.CONCATENATED,
    convention: Convention = Convention.QISKIT,
) -> np.ndarray:
    """Exact control-register distribution from the state-vector simulation."""
    return build_shor_circuit(a, N, m, version, convention).control_distribution()


def theoretical_histogram(a: int, N: int, m: int) -> np.ndarray:
    """Closed-form distribution using the classically computed order of ``a``."""
    return analytic_distribution(period_inputs(order_bruteforce(a, N)), 1 << m)


def ranked_indices(values: np.ndarray) -> list[int]:
    """Indices with non-negligible weight, largest first, ties broken by index."""
    vals = np.asarray(values, dtype=float)
    keep = np.flatnonzero(vals > PEAK_FLOOR * max(vals.max(), 1.0))
    return sorted(keep.tolist(), key=lambda i: (-round(float(vals[i]), 12), i))


def dominant_peaks(probs: np.ndarray, fraction: float = DOMINANT_FRACTION) -> list[int]:
    """Indices whose probability is at least ``fraction`` of the maximum, ascending."""
    probs = np.asarray(probs, dtype=float)
    return np.flatnonzero(probs >= fraction * probs.max() - PEAK_FLOOR).tolist()


def subdominant_peaks(
    probs: np.ndarray,
    dominant: Iterable[int] | None = None,
    fraction: float = SUBDOMINANT_FRACTION,
) -> list[int]:
    """Non-dominant neighbours (within one bin) of dominant peaks above ``fraction`` of the maximum."""
    probs = np.asarray(probs, dtype=float)
    dom = set(dominant_peaks(probs) if dominant is None else dominant)
    M = probs.size
    floor = fraction * probs.max()
    out = set()
    for d in dom:
        for nb in ((d - 1) % M, (d + 1) % M):
            if nb not in dom and probs[nb] > floor:
                out.add(nb)
    return sorted(out)


@dataclass(frozen=True)
class PeakTrace:
    ell: int
    measured: int
    probability: float
    count: int | None
    extraction: Extraction

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "measured": self.measured,
            "probability": self.probability,
            "count": self.count,
            "extraction": self.extraction.to_dict(),
        }


@dataclass(frozen=True)
class Outcome:
    success: bool
    factors: tuple[int, int] | None = None
    period: int | None = None
    reason: str | None = None


@dataclass
class RunReport:
    config: ShorConfig
    a: int | None
    m: int
    n: int
    probabilities: np.ndarray | None
    counts: np.ndarray | None
    traces: list[PeakTrace] = field(default_factory=list)
    outcome: Outcome = field(default_factory=lambda: Outcome(False, reason="not run"))
    attempts: int = 0

    @property
    def peaks(self) -> list[int]:
        """Dominant peaks of the final attempt, most probable first."""
        if self.probabilities is None:
            return []
        dom = set(dominant_peaks(self.probabilities))
        return [i for i in ranked_indices(self.probabilities) if i in dom]

    def histogram_rows(self) -> list[tuple[int, str, float, int | None]]:
        if self.probabilities is None:
            return []
        return histogram_rows(self.probabilities, self.counts, self.m)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "a": self.a,
            "m": self.m,
            "n": self.n,
            "attempts": self.attempts,
            "outcome": {
                "success": self.outcome.success,
                "factors": list(self.outcome.factors) if self.outcome.factors else None,
                "period": self.outcome.period,
                "reason": self.outcome.reason,
            },
            "peaks": self.peaks,
            "traces": [t.to_dict() for t in self.traces],
            "histogram": [
                {"index": i, "bitstring": b, "probability": p, "count": c}
                for i, b, p, c in self.histogram_rows()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def trace_text(self) -> str:
        sampled = self.counts is not None
        blocks = [
            format_trace(t.extraction, frequency=t.count if sampled else None, show_res=not sampled)
            for t in self.traces
        ]
        if self.outcome.success:
            f1, f2 = self.outcome.factors
            tail = f"result: N = {self.config.N} = {f1} x {f2} (a = {self.a}, r = {self.outcome.period})"
        else:
            tail = f"result: no factors ({self.outcome.reason})"
        return "\n\n".join(blocks + [tail]) + "\n"


def run(config: ShorConfig) -> RunReport:
    """Factor ``config.N``: simulate, then post-process peaks until one yields factors."""
    N, n, m = config.N, config.n, config.control_qubits
    attempts = config.max_attempts if config.a is None else 1
    report = RunReport(config, config.a, m, n, None, None)
    for attempt in range(attempts):
        report.attempts = attempt + 1
        if config.a is not None:
            a = config.a
        else:
            seed = None if config.seed is None else config.seed + attempt
            choice = choose_base(N, seed)
            if choice.factor is not None:
                report.a = choice.a
                report.outcome = Outcome(True, (choice.factor, N // choice.factor), None,
                                         "base shares a factor with N")
                return report
            a = choice.a
        report.a = a
        probs = simulated_histogram(a, N, m, config.me_version, config.convention)
        counts = None
        if config.shots is not None:
            counts = sv.counts(sv.sample(probs, config.shots, config.seed), probs.size)
        report.probabilities, report.counts = probs, counts
        report.traces = []
        order = ranked_indices(counts if counts is not None else probs)
        for ell in order:
            measured = inject_lsb_error(ell, m) if config.error_inject else ell
            ex = extract_period(measured, m, a, N)
            report.traces.append(PeakTrace(
                ell, measured, float(probs[ell]), None if counts is None else int(counts[ell]), ex))
            if ex.succeeded:
                report.outcome = Outcome(True, ex.factors, ex.r)
                return report
        report.outcome = Outcome(False, reason=f"no peak yielded factors for a={a}")
    return report


# --- histogram artefacts -----------------------------------------------------


def histogram_rows(probs: np.ndarray, counts: np.ndarray | None, m: int) -> list[tuple[int, str, float, int | None]]:
    return [
        (i, format(i, f"0{m}b"), float(p), None if counts is None else int(counts[i]))
        for i, p in enumerate(probs)
    ]


def write_histogram_csv(out: TextIO, probs: np.ndarray, counts: np.ndarray | None, m: int) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["index", "bitstring", "probability", "count"])
    for i, bits, p, c in histogram_rows(probs, counts, m):
        writer.writerow([i, bits, repr(p), "" if c is None else c])


def read_histogram_csv(text: str) -> tuple[np.ndarray, np.ndarray | None]:
    rows = list(csv.DictReader(io.StringIO(text)))
    probs = np.array([float(r["probability"]) for r in rows])
    if all(r["count"] == "" for r in rows):
        return probs, None
    return probs, np.array([int(r["count"]) for r in rows])


def ascii_histogram(values: np.ndarray, m: int, width: int = 60, min_fraction: float = 0.01) -> str:
    """One row per index holding at least ``min_fraction`` of the maximum; bars scale to ``width``."""
    values = np.asarray(values, dtype=float)
    top = values.max()
    lines = []
    for i in np.flatnonzero(values >= min_fraction * top):
        bar = "#" * max(1, round(width * values[i] / top))
        lines.append(f"{i:>{len(str(values.size - 1))}} {i:0{m}b} {bar} {values[i]:.6g}")
    return "\n".join(lines)
