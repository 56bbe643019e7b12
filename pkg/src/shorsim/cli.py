"""Command-line front end: ``python -m shorsim <subcommand> ...``.

Relative output paths are resolved against ``$SHORSIM_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import contfrac, shor
from . import statevec as sv
from .circuit import export_circuit_text, lower_circuit, lower_permutation
from .errors import ContractViolation, DomainError, ExportError
from .modexp import MESpec, MEVersion, build_me_operator, make_me_spec, order_bruteforce
from .qft import QftParams, build_iqft, build_qft

OUTPUT_DIR_ENV = "SHORSIM_OUTPUT_DIR"
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _out_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _fail(kind: str, message: str, code: int = EXIT_USAGE) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def cmd_factor(args: argparse.Namespace) -> int:
    config = shor.ShorConfig(
        N=args.n, a=args.a, m=args.m, n_epsilon=args.n_epsilon, me_version=args.uver,
        shots=args.shots, seed=args.seed, error_inject=args.error_inject,
    )
    report = shor.run(config)
    sys.stdout.write(report.trace_text())
    if args.json:
        _out_path(args.json).write_text(report.to_json() + "\n")
    return 0 if report.outcome.success else EXIT_FAILURE


def cmd_histogram(args: argparse.Namespace) -> int:
    shor.classical_precheck(args.n)
    simulate = args.simulate or not args.theory
    sim = shor.simulated_histogram(args.a, args.n, args.m, args.uver) if simulate else None
    theory = shor.theoretical_histogram(args.a, args.n, args.m) if args.theory else None
    probs = sim if sim is not None else theory
    counts = None
    if args.shots:
        counts = sv.counts(sv.sample(probs, args.shots, args.seed), probs.size)
    if args.csv:
        with _out_path(args.csv).open("w", newline="") as fh:
            shor.write_histogram_csv(fh, probs, counts, args.m)
    if args.ascii:
        print(shor.ascii_histogram(counts if counts is not None else probs, args.m))
    if not args.csv and not args.ascii:
        buf = io.StringIO()
        shor.write_histogram_csv(buf, probs, counts, args.m)
        sys.stdout.write(buf.getvalue())
    if sim is not None and theory is not None:
        print(f"max_abs_diff: {float(np.abs(sim - theory).max()):.3e}")
    return 0


def cmd_contfrac(args: argparse.Namespace) -> int:
    if args.den <= 0:
        return _fail("domain_error", "denominator must be positive")
    cf = contfrac.expand((args.num, args.den))
    convs = contfrac.convergents(cf)
    print(f"cont frac of phi  : {list(cf.coefficients)}")
    print(f"convergents of phi: {[c.as_tuple() for c in convs]}")
    if args.a is not None and args.N is not None:
        for c in convs:
            if c.p == 0:
                print(f"conv: {c.as_tuple()} r = {c.q} : no factors found")
                continue
            check = contfrac.check_period(args.a, args.N, c.q)
            if check.verdict is contfrac.Verdict.FACTORS:
                print(f"conv: {c.as_tuple()} r = {c.q} : factors")
                print(f"factor1: {check.factors[0]}\nfactor2: {check.factors[1]}")
            else:
                print(f"conv: {c.as_tuple()} r = {c.q} : no factors found")
    return 0


def cmd_order(args: argparse.Namespace) -> int:
    r = order_bruteforce(args.a, args.n)
    check = contfrac.check_period(args.a, args.n, r)
    print(f"r = {r}")
    line = f"verdict: {check.verdict.value}"
    if check.factors:
        line += f" {check.factors[0]} {check.factors[1]}"
    print(line)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = make_me_spec(args.a, args.n, args.p, args.uver, seeds=args.seeds)
    print(" ".join(str(list(c)) for c in spec.cycles))
    if args.lower:
        perm = build_me_operator(spec, shor.work_qubits(args.n))
        gates = lower_permutation(perm.mapping, list(range(shor.work_qubits(args.n))))
        print(f"lowered gates: {len(gates)}")
    if args.json:
        _out_path(args.json).write_text(spec.to_json() + "\n")
    return 0


def cmd_export_qasm(args: argparse.Namespace) -> int:
    if args.qft is not None:
        params = QftParams(args.qft)
        circuit = build_iqft(params) if args.inverse else build_qft(params)
    else:
        if args.n is None or args.a is None or args.m is None:
            return _fail("usage", "export-qasm needs --qft M or all of --n, --a, --m")
        shor.classical_precheck(args.n)
        circuit = lower_circuit(shor.build_shor_circuit(args.a, args.n, args.m, args.uver).circuit)
    text = export_circuit_text(circuit)
    if args.out:
        _out_path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    if args.spec:
        spec = MESpec.from_json(Path(args.spec).read_text())
        perm = build_me_operator(spec, shor.work_qubits(spec.N))
        print(f"valid: a={spec.a} N={spec.N} p={spec.p} version={int(spec.version)} "
              f"cycles={len(spec.cycles)} moved={sum(1 for w, v in enumerate(perm.mapping) if v != w)}")
        return 0
    if args.n is None or args.a is None or args.m is None:
        return _fail("usage", "validate needs --spec PATH or all of --n, --a, --m")
    shor.classical_precheck(args.n)
    sim = shor.simulated_histogram(args.a, args.n, args.m, args.uver)
    theory = shor.theoretical_histogram(args.a, args.n, args.m)
    diff = float(np.abs(sim - theory).max())
    print(f"max_abs_diff: {diff:.3e}")
    if args.uver == MEVersion.CONCATENATED and diff > args.tol:
        print(f"FAIL: exceeds {args.tol:g}")
        return EXIT_FAILURE
    print("OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shorsim", description="Shor's algorithm on a state-vector simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def uver(p: argparse.ArgumentParser, default: int = 0) -> None:
        p.add_argument("--uver", type=int, choices=[0, 1, 2], default=default,
                       help="ME operator construction: 0 concatenated, 1 per-power cycles, 2 truncated")

    p = sub.add_parser("factor", help="run the full factoring pipeline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n-epsilon", type=int, default=0)
    uver(p)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--error-inject", action="store_true", help="add 1 to the measured LSB")
    p.add_argument("--json", help="write the run report as JSON")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("histogram", help="control-register distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    uver(p)
    p.add_argument("--theory", action="store_true")
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--csv")
    p.add_argument("--ascii", action="store_true")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("contfrac", help="continued fraction and convergents of num/den")
    p.add_argument("--num", type=int, required=True)
    p.add_argument("--den", type=int, required=True)
    p.add_argument("--a", type=int)
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_contfrac)

    p = sub.add_parser("order", help="classical order of a mod N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("synth", help="cycles of U^p")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    uver(p, default=1)
    p.add_argument("--seeds", type=int, nargs="+")
    p.add_argument("--lower", action="store_true", help="also report the lowered gate count")
    p.add_argument("--json", help="write the MESpec document")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export-qasm", help="write OpenQASM 2.0")
    p.add_argument("--qft", type=int, metavar="M", help="export an M-qubit QFT instead of a Shor circuit")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--m", type=int)
    uver(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_qasm)

    p = sub.add_parser("validate", help="check an MESpec file or simulated-vs-analytic agreement")
    p.add_argument("--spec")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--m", type=int)
    uver(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except shor.InvalidModulus as exc:
        print(json.dumps({"error": "invalid_modulus", "N": exc.N, "reason": exc.reason}), file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ContractViolation) as exc:
        return _fail(type(exc).__name__, str(exc))
    except ExportError as exc:
        return _fail("export_error", str(exc))
    except (OSError, json.JSONDecodeError) as exc:
        return _fail("io_error", str(exc))


if __name__ == "__main__":
    sys.exit(main())
