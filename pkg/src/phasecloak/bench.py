"""Full obfuscate -> compile -> deobfuscate pipeline over the bundled corpus."""
from __future__ import annotations

from dataclasses import dataclass

from . import corpus
from .keys import BITS_PER_PHASE_GATE, KeySpec, derive_position_seed
from .metrics import SimConfig, TvdReport, build_report, format_table, report_json
from .obfuscation import PhaseRecord, deobfuscate, obfuscate
from .qasm import Circuit
from .sim import MAX_UNITARY_QUBITS, NoiseSpec, strip_measures, unitary, unitary_distance
from .transpile import DEFAULT_BASIS, transpile

EQUIVALENCE_TOL = 1e-9


@dataclass
class PipelineRun:
    original: Circuit
    obfuscated: Circuit
    record: PhaseRecord
    compiled: Circuit
    deobfuscated: Circuit


def run_pipeline(circuit: Circuit, key: KeySpec, basis=DEFAULT_BASIS) -> PipelineRun:
    obf, record = obfuscate(circuit, key)
    compiled = transpile(obf, basis)
    return PipelineRun(circuit, obf, record, compiled, deobfuscate(compiled, record, key))


def equivalence_distance(a: Circuit, b: Circuit) -> float | None:
    """Global-phase-aligned Frobenius distance, or None when too wide."""
    if a.qubit_count > MAX_UNITARY_QUBITS:
        return None
    return unitary_distance(unitary(strip_measures(a)), unitary(strip_measures(b)))


def bench(names=None, seed: int = 7, dummy_layers: int = 4, position_seed: int | None = None,
          shots: int = 1000, rng_seed: int = 0, noise_p: float = 0.01,
          virtual_phase: bool = True, basis=DEFAULT_BASIS) -> tuple[list[TvdReport], dict]:
    names = list(names or corpus.BENCHMARKS)
    pos_seed = derive_position_seed(seed) if position_seed is None else position_seed
    key = KeySpec(seed, dummy_layer_count=dummy_layers, dummy_position_seed=pos_seed)
    noise = NoiseSpec(noise_p, virtual_phase) if noise_p > 0 else None
    cfg = SimConfig(shots, rng_seed, noise)
    refs = corpus.reference()
    rows = []
    for i, name in enumerate(names):
        run = run_pipeline(corpus.load(name), key, basis)
        row_cfg = SimConfig(cfg.shots, cfg.rng_seed + 1000 * i, cfg.noise)
        rep = build_report(run.original, run.obfuscated, run.deobfuscated, run.record,
                           row_cfg, name=name, compiled_original=transpile(run.original, basis),
                           compiled_obfuscated=run.compiled)
        dist = equivalence_distance(run.original, run.deobfuscated)
        rep.extras = {
            "compiled_gate_count": len(run.compiled),
            "deobf_equiv_distance": dist,
            "deobf_equivalent": dist is not None and dist < EQUIVALENCE_TOL,
        }
        ref = refs.get(name)
        if ref is not None:
            rep.extras["reference"] = ref
            rep.extras["key_bits_from_reference_counts"] = BITS_PER_PHASE_GATE * (
                ref["phase_gates_orig"] + ref["dummy_phase_gates"])
        rows.append(rep)
    meta = {"dummy_layers": dummy_layers, "shots": shots,
            "rng_seed": rng_seed, "noise_p": noise_p, "virtual_phase": virtual_phase,
            "basis": sorted(basis), "benchmarks": names}
    return rows, meta


def reference_table(rows: list[TvdReport]) -> str:
    """Side-by-side of measured vs reference figures for the same columns."""
    cols = ["depth_orig", "depth_obf", "phase_gates_orig", "equiv_key_bits",
            "tvd_obf", "tvd_deobf", "tvd_orig"]
    header = ["Name"] + [f"{c} (ours/ref)" for c in cols]
    body = []
    for r in rows:
        ref = r.extras.get("reference")
        if not ref:
            continue
        cells = [r.name]
        for c in cols:
            ours, theirs = getattr(r, c), ref[c]
            fmt = "{:.2f}" if isinstance(theirs, float) else "{}"
            cells.append(f"{fmt.format(ours)}/{fmt.format(theirs)}")
        body.append(cells)
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in body]
    return "\n".join(lines) + "\n"


def render(rows: list[TvdReport], meta: dict) -> tuple[str, str]:
    """(text report, JSON report)."""
    text = format_table(rows) + "\nReference figures for comparison:\n" + reference_table(rows)
    return text, report_json(rows, meta)
