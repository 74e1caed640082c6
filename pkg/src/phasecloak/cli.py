"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 parse, 4 IO, 5 verification/fingerprint.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from . import corpus
from .keys import CONTINUOUS, EIGHTH_TURNS, MASK64, KeySpec, derive_position_seed
from .metrics import tvd_counts
from .obfuscation import (BarrierStructureError, FingerprintMismatch, ObfuscationError,
                          PhaseRecord, deobfuscate, key_bits, obfuscate)
from .qasm import QasmError, emit_qasm, parse_qasm
from .sim import (MAX_UNITARY_QUBITS, CountsDistribution, NoiseSpec, sample_counts,
                  strip_measures, unitary, unitary_distance)
from .transpile import DEFAULT_BASIS, TranspileError, transpile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_IO = 4
EXIT_VERIFY = 5

VERIFY_TOL = 1e-9


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError(f"{text} is outside the unsigned 64-bit range")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability")
    return value


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}")


def _load_circuit(path: str):
    text = _read_text(path)
    try:
        return parse_qasm(text)
    except QasmError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}")


def _load_json(path: str, loader):
    text = _read_text(path)
    try:
        return loader(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}")


def _seed_from_args(args) -> int:
    if args.seed is not None:
        return args.seed
    text = _read_text(args.key_file).strip()
    try:
        return _u64(text if text.lower().startswith("0x") else "0x" + text)
    except argparse.ArgumentTypeError as exc:
        raise CliError(EXIT_PARSE, f"{args.key_file}: {exc}")


def _add_key_flags(p: argparse.ArgumentParser, with_defaults: bool) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--seed", type=_u64, help="key seed, an unsigned 64-bit integer")
    src.add_argument("--key-file", help="file holding the key seed in hex")
    hint = "" if with_defaults else " (default: taken from the record)"
    p.add_argument("--quantization", choices=[EIGHTH_TURNS, CONTINUOUS],
                   default=EIGHTH_TURNS if with_defaults else None,
                   help="phase-shift alphabet" + hint)
    p.add_argument("--dummy-layers", type=int, default=0 if with_defaults else None,
                   help="number of full-width dummy phase layers" + hint)
    p.add_argument("--position-seed", type=_u64, default=None,
                   help="seed for dummy-layer placement (default: derived from the key seed"
                        + ("" if with_defaults else ", or taken from the record") + ")")


def _default_out(path: str, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def cmd_obfuscate(args) -> int:
    circuit = _load_circuit(args.input)
    seed = _seed_from_args(args)
    pos = derive_position_seed(seed) if args.position_seed is None else args.position_seed
    try:
        key = KeySpec(seed, args.quantization, args.dummy_layers, pos)
        obf, record = obfuscate(circuit, key)
    except ValueError as exc:  # includes ObfuscationError
        raise CliError(EXIT_USAGE, str(exc))
    out = Path(args.output) if args.output else _default_out(args.input, ".obf.qasm")
    rec = Path(args.record) if args.record else out.with_name(out.stem + ".record.json")
    _write_text(out, emit_qasm(obf))
    _write_text(rec, record.to_json())
    bits = key_bits(record)
    print(f"wrote {out}")
    print(f"wrote {rec}")
    print(f"phase gates: {len(record.entries)}  dummy phase gates: {record.dummy_gate_count}")
    print(f"equiv key bits: {bits}")
    if bits == 0:
        print("warning: zero key bits, the obfuscated circuit hides nothing", file=sys.stderr)
    return EXIT_OK


def cmd_deobfuscate(args) -> int:
    circuit = _load_circuit(args.input)
    record = _load_json(args.record, PhaseRecord.from_json)
    seed = _seed_from_args(args)
    params = record.key_params or {}
    quant = args.quantization or params.get("quantization", EIGHTH_TURNS)
    dummies = args.dummy_layers
    if dummies is None:
        dummies = params.get("dummy_layer_count", len(record.dummy_layers))
    pos = args.position_seed
    if pos is None:
        pos = params.get("dummy_position_seed", derive_position_seed(seed))
    try:
        key = KeySpec(seed, quant, int(dummies), int(pos))
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    try:
        restored = deobfuscate(circuit, record, key)
    except (FingerprintMismatch, BarrierStructureError) as exc:
        raise CliError(EXIT_VERIFY, str(exc))
    out = Path(args.output) if args.output else _default_out(args.input, ".deobf.qasm")
    _write_text(out, emit_qasm(restored))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_transpile(args) -> int:
    circuit = _load_circuit(args.input)
    basis = frozenset(b.strip() for b in args.basis.split(",") if b.strip())
    try:
        compiled = transpile(circuit, basis, optimize=not args.no_optimize)
    except TranspileError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    text = emit_qasm(compiled)
    if args.output:
        _write_text(Path(args.output), text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    circuit = _load_circuit(args.input)
    noise = NoiseSpec(args.noise, args.virtual_phase) if args.noise > 0 else None
    try:
        counts = sample_counts(circuit, args.shots, args.rng_seed, noise)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    text = counts.to_json()
    if args.output:
        _write_text(Path(args.output), text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_tvd(args) -> int:
    a = _load_json(args.a, CountsDistribution.from_json)
    b = _load_json(args.b, CountsDistribution.from_json)
    try:
        print(tvd_counts(a, b))
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    return EXIT_OK


def cmd_verify(args) -> int:
    a = _load_circuit(args.a)
    b = _load_circuit(args.b)
    if a.qubit_count != b.qubit_count:
        print(f"not equal: {a.qubit_count} vs {b.qubit_count} qubits")
        return EXIT_VERIFY
    if a.qubit_count > MAX_UNITARY_QUBITS:
        raise CliError(EXIT_USAGE, f"verify supports at most {MAX_UNITARY_QUBITS} qubits")
    dist = unitary_distance(unitary(strip_measures(a)), unitary(strip_measures(b)))
    if dist < args.tol:
        print(f"unitary-equal (distance {dist:.3e})")
        return EXIT_OK
    print(f"not equal (distance {dist:.3e})")
    return EXIT_VERIFY


def cmd_bench(args) -> int:
    if args.corpus != "bundled":
        raise CliError(EXIT_USAGE, "only the bundled corpus is available")
    names = args.benchmarks.split(",") if args.benchmarks else None
    if names:
        unknown = set(names) - set(corpus.names(include_synthetic=True))
        if unknown:
            raise CliError(EXIT_USAGE, f"unknown benchmarks: {sorted(unknown)}")
    try:
        rows, meta = bench_mod.bench(names, seed=args.seed, dummy_layers=args.dummy_layers,
                                     position_seed=args.position_seed, shots=args.shots,
                                     rng_seed=args.rng_seed, noise_p=args.noise,
                                     virtual_phase=not args.noisy_phase_gates)
    except ObfuscationError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    text, doc = bench_mod.render(rows, meta)
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create {out_dir}: {exc.strerror or exc}")
    _write_text(out_dir / "report.txt", text)
    _write_text(out_dir / "report.json", doc)
    sys.stdout.write(text)
    print(f"wrote {out_dir / 'report.txt'}")
    print(f"wrote {out_dir / 'report.json'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasecloak",
        description="Hide the phase gates of an OpenQASM 2.0 circuit from an untrusted compiler.",
        epilog="exit codes: 0 success, 2 usage, 3 parse, 4 IO, 5 verification/fingerprint",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("obfuscate", help="lock the phase gates of a circuit with a key")
    p.add_argument("input", help="input QASM file")
    p.add_argument("-o", "--output", help="obfuscated QASM (default: <input>.obf.qasm)")
    p.add_argument("--record", help="phase record sidecar (default: <output>.record.json)")
    _add_key_flags(p, with_defaults=True)
    p.set_defaults(func=cmd_obfuscate)

    p = sub.add_parser("deobfuscate", help="restore a (compiled) obfuscated circuit")
    p.add_argument("input", help="obfuscated or compiled QASM file")
    p.add_argument("--record", required=True, help="phase record written by obfuscate")
    p.add_argument("-o", "--output", help="restored QASM (default: <input>.deobf.qasm)")
    _add_key_flags(p, with_defaults=False)
    p.set_defaults(func=cmd_deobfuscate)

    p = sub.add_parser("transpile", help="lower to a gate basis and run peephole passes")
    p.add_argument("input", help="input QASM file")
    p.add_argument("-o", "--output", help="output QASM (default: stdout)")
    p.add_argument("--basis", default=",".join(sorted(DEFAULT_BASIS)),
                   help="comma-separated target gates (default: %(default)s)")
    p.add_argument("--no-optimize", action="store_true", help="skip the peephole pass")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("simulate", help="sample measurement counts")
    p.add_argument("input", help="input QASM file")
    p.add_argument("-o", "--output", help="counts JSON (default: stdout)")
    p.add_argument("--shots", type=int, default=1000, help="number of shots (default: 1000)")
    p.add_argument("--rng-seed", type=_u64, default=0, help="sampling seed (default: 0)")
    p.add_argument("--noise", type=_probability, default=0.0,
                   help="depolarizing probability per touched qubit per gate (default: 0)")
    p.add_argument("--virtual-phase", action="store_true",
                   help="treat phase-class gates as noise-free frame changes")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tvd", help="total variation distance of two counts files")
    p.add_argument("a", help="counts JSON")
    p.add_argument("b", help="counts JSON")
    p.set_defaults(func=cmd_tvd)

    p = sub.add_parser("verify", help="check two circuits are unitary-equal up to global phase")
    p.add_argument("a", help="QASM file")
    p.add_argument("b", help="QASM file")
    p.add_argument("--tol", type=float, default=VERIFY_TOL,
                   help="Frobenius distance tolerance (default: %(default)s)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run the full pipeline over the bundled corpus")
    p.add_argument("--corpus", default="bundled", help="corpus to use (only 'bundled')")
    p.add_argument("--benchmarks", help="comma-separated subset (default: the five benchmarks)")
    p.add_argument("--seed", type=_u64, default=7, help="key seed (default: 7)")
    p.add_argument("--dummy-layers", type=int, default=4, help="dummy layers (default: 4)")
    p.add_argument("--position-seed", type=_u64, default=None,
                   help="dummy placement seed (default: derived from the key seed)")
    p.add_argument("--shots", type=int, default=1000, help="shots per run (default: 1000)")
    p.add_argument("--rng-seed", type=_u64, default=0, help="sampling seed (default: 0)")
    p.add_argument("--noise", type=_probability, default=0.01,
                   help="depolarizing probability (default: 0.01)")
    p.add_argument("--noisy-phase-gates", action="store_true",
                   help="also apply noise after phase-class gates")
    p.add_argument("--out-dir", default=".", help="directory for report.txt and report.json")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
