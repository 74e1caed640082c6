"""Total variation distance and benchmark reports."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .ir import depth, phase_gate_count
from .obfuscation import PhaseRecord, key_bits
from .qasm import Circuit
from .sim import CountsDistribution, NoiseSpec, exact_distribution, sample_counts

REPORT_FORMAT = "phasecloak.report"
REPORT_VERSION = 1


def tvd_counts(a: CountsDistribution, b: CountsDistribution) -> float:
    """sum_i |y_i,a - y_i,b| / (2N) over every outcome of the common width."""
    if a.shots != b.shots:
        raise ValueError(f"shot counts differ: {a.shots} vs {b.shots}")
    if a.bit_width != b.bit_width:
        raise ValueError(f"bit widths differ: {a.bit_width} vs {b.bit_width}")
    keys = a.counts.keys() | b.counts.keys()
    diff = sum(abs(a.counts.get(k, 0) - b.counts.get(k, 0)) for k in keys)
    return diff / (2 * a.shots)


def tvd_exact(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution lengths differ: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


@dataclass(frozen=True)
class SimConfig:
    """``shots=None`` compares exact distributions (noise then must be off)."""

    shots: int | None = 1000
    rng_seed: int = 0
    noise: NoiseSpec | None = None

    def __post_init__(self):
        if self.shots is None and self.noise is not None and self.noise.p > 0:
            raise ValueError("noisy simulation needs a shot count")


@dataclass
class TvdReport:
    name: str
    qubits: int
    depth_orig: int
    depth_obf: int
    phase_gates_orig: int
    dummy_phase_gates: int
    equiv_key_bits: int
    tvd_obf: float
    tvd_deobf: float
    tvd_orig: float
    tvd_loss: float
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("tvd_obf", "tvd_deobf", "tvd_orig"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")


def _observed(circuit: Circuit, cfg: SimConfig, salt: int) -> np.ndarray:
    if cfg.shots is None:
        return exact_distribution(circuit)
    return sample_counts(circuit, cfg.shots, cfg.rng_seed + salt, cfg.noise).probabilities()


def build_report(original: Circuit, obfuscated: Circuit, deobfuscated: Circuit,
                 record: PhaseRecord, cfg: SimConfig, name: str = "",
                 compiled_original: Circuit | None = None,
                 compiled_obfuscated: Circuit | None = None) -> TvdReport:
    """TVDs are taken against the noiseless exact distribution of ``original``.

    When compiled versions are given, those are what get simulated (what a
    backend would actually run); depths always describe the uncompiled
    original and obfuscated circuits.
    """
    theory = exact_distribution(original)
    run_orig = original if compiled_original is None else compiled_original
    run_obf = obfuscated if compiled_obfuscated is None else compiled_obfuscated
    tvd_orig = tvd_exact(_observed(run_orig, cfg, 0), theory)
    tvd_obf = tvd_exact(_observed(run_obf, cfg, 1), theory)
    tvd_deobf = tvd_exact(_observed(deobfuscated, cfg, 2), theory)
    return TvdReport(
        name=name,
        qubits=original.qubit_count,
        depth_orig=depth(original),
        depth_obf=depth(obfuscated),
        phase_gates_orig=phase_gate_count(original),
        dummy_phase_gates=record.dummy_gate_count,
        equiv_key_bits=key_bits(record),
        tvd_obf=tvd_obf,
        tvd_deobf=tvd_deobf,
        tvd_orig=tvd_orig,
        tvd_loss=tvd_deobf - tvd_orig,
    )


_COLUMNS = [
    ("Name", "name", "{}"),
    ("Qubits", "qubits", "{}"),
    ("Depth Orig.", "depth_orig", "{}"),
    ("Depth Obf.", "depth_obf", "{}"),
    ("Phase Orig.", "phase_gates_orig", "{}"),
    ("Dummy Phase", "dummy_phase_gates", "{}"),
    ("Key Bits", "equiv_key_bits", "{}"),
    ("TVD Obf.", "tvd_obf", "{:.4f}"),
    ("TVD Deobf.", "tvd_deobf", "{:.4f}"),
    ("TVD Orig.", "tvd_orig", "{:.4f}"),
    ("TVD Loss", "tvd_loss", "{:+.4f}"),
]


def format_table(rows: list[TvdReport]) -> str:
    header = [c[0] for c in _COLUMNS]
    body = [[fmt.format(getattr(r, attr)) for _, attr, fmt in _COLUMNS] for r in rows]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(v.rjust(w) if i else v.ljust(w)
                               for i, (v, w) in enumerate(zip(row, widths))))
    return "\n".join(lines) + "\n"


def report_json(rows: list[TvdReport], meta: dict | None = None) -> str:
    doc = {"format": REPORT_FORMAT, "version": REPORT_VERSION, "meta": meta or {},
           "rows": [asdict(r) for r in rows]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
