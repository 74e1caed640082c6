"""Key-driven phase locking of circuits and its inverse.

Obfuscated circuit layout: the circuit is cut into ASAP layers, each layer is
split into a non-phase part and a phase part, and every phase layer sits
alone between two barriers.  Numbering the barrier-delimited segments of the
obfuscated circuit gives each phase layer a stable address that survives any
compiler which respects barriers, and the :class:`PhaseRecord` refers to phase
gates by (segment, qubit).

Every phase gate gets ``angle + shift`` where the shifts come from
:func:`derive_keystream`: existing gates first (in segment, then qubit order),
then the dummy gates.  Dummy layers are identity layers ``rz(0)`` on every
qubit before keying, so with a wrong key they leave a residual phase behind.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .ir import (BARRIER, DUMMY, PHASE, Layer, LayerList, circuit_layers,
                 extract_layers, build_dag, merge_layers, segments, split_phase_layers)
from .keys import BITS_PER_PHASE_GATE, KeySpec, derive_keystream, sample_positions
from .qasm import PHASE_KINDS, Circuit, GateApp

RECORD_FORMAT = "phasecloak.phase-record"
RECORD_VERSION = 1

FIXED_PHASE = {"s": math.pi / 2, "sdg": -math.pi / 2, "t": math.pi / 4, "tdg": -math.pi / 4}

ANGLE_TOL = 1e-9


class ObfuscationError(ValueError):
    pass


class FingerprintMismatch(ObfuscationError):
    pass


class BarrierStructureError(ObfuscationError):
    """The circuit's barrier layout no longer matches the record."""


@dataclass(frozen=True)
class PhaseEntry:
    layer_index: int
    qubit: int
    original_kind: str
    original_angle: float


@dataclass(frozen=True)
class DummyLayer:
    insertion_index: int
    angles: tuple[float, ...]


@dataclass(frozen=True)
class PhaseRecord:
    qubit_count: int
    segment_count: int
    entries: tuple[PhaseEntry, ...]
    dummy_layers: tuple[DummyLayer, ...]
    key_fingerprint: str
    # public key parameters (everything but the seed), so a holder of the
    # seed alone can rebuild the full KeySpec
    key_params: dict | None = None

    def __post_init__(self):
        idx = [d.insertion_index for d in self.dummy_layers]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("dummy layer indices must be strictly increasing")

    @property
    def dummy_gate_count(self) -> int:
        return sum(len(d.angles) for d in self.dummy_layers)

    def to_dict(self) -> dict:
        return {
            "format": RECORD_FORMAT,
            "version": RECORD_VERSION,
            **_record_body(self.qubit_count, self.segment_count, self.entries,
                           self.dummy_layers),
            "key_fingerprint": self.key_fingerprint,
            "key_params": self.key_params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseRecord":
        if data.get("format") != RECORD_FORMAT:
            raise ValueError("not a phase record")
        if data.get("version") != RECORD_VERSION:
            raise ValueError(f"unsupported phase record version {data.get('version')}")
        entries = tuple(
            PhaseEntry(int(e["layer_index"]), int(e["qubit"]), str(e["original_kind"]),
                       float(e["original_angle"]))
            for e in data["entries"]
        )
        dummies = tuple(
            DummyLayer(int(d["insertion_index"]), tuple(float(a) for a in d["angles"]))
            for d in data["dummy_layers"]
        )
        return cls(int(data["qubit_count"]), int(data["segment_count"]), entries,
                   dummies, str(data["key_fingerprint"]), data.get("key_params"))

    @classmethod
    def from_json(cls, text: str) -> "PhaseRecord":
        return cls.from_dict(json.loads(text))

    def dump(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "PhaseRecord":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _record_body(qubit_count, segment_count, entries, dummy_layers) -> dict:
    # json floats are repr()-formatted: shortest exact round-trip (up to 17 digits)
    return {
        "qubit_count": qubit_count,
        "segment_count": segment_count,
        "entries": [
            {"layer_index": e.layer_index, "qubit": e.qubit,
             "original_kind": e.original_kind, "original_angle": e.original_angle}
            for e in entries
        ],
        "dummy_layers": [
            {"insertion_index": d.insertion_index, "angles": list(d.angles)}
            for d in dummy_layers
        ],
    }


def fingerprint(key: KeySpec, qubit_count, segment_count, entries, dummy_layers) -> str:
    """SHA-256 over the key's public parameters and the record body.

    The seed is deliberately left out: a wrong seed is not detectable here.
    """
    payload = {"key": key.public_params(),
               "record": _record_body(qubit_count, segment_count, entries, dummy_layers)}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def key_bits(record: PhaseRecord) -> int:
    return BITS_PER_PHASE_GATE * (len(record.entries) + record.dummy_gate_count)


def phase_angle(gate: GateApp) -> float:
    if gate.kind in FIXED_PHASE:
        return FIXED_PHASE[gate.kind]
    if gate.kind in ("rz", "p"):
        return gate.angle
    raise ObfuscationError(f"{gate.kind} is not a phase gate")


def _split_measures(circuit: Circuit) -> tuple[list[GateApp], list[GateApp]]:
    measured: set[int] = set()
    body, tail = [], []
    for g in circuit.gates:
        if g.kind == "measure":
            measured.add(g.qubits[0])
            tail.append(g)
        elif g.kind == "barrier":
            body.append(g)
        else:
            hit = measured.intersection(g.qubits)
            if hit:
                raise ObfuscationError(
                    f"{g.kind} on qubit {min(hit)} after it was measured; "
                    "mid-circuit measurement is not supported"
                )
            body.append(g)
    return body, tail


def _keyed_kind(gate: GateApp) -> str:
    return "rz" if gate.kind == "rz" else "p"


def _enclose(layers: LayerList) -> list[Layer]:
    """Barrier before every phase layer, and one keyed kind per phase layer
    (a layer mixing rz with p-family gates is cut in two)."""
    out: list[Layer] = []
    for layer in layers:
        if layer.tag != PHASE:
            out.append(layer)
            continue
        groups = [tuple(g for g in layer.gates if _keyed_kind(g) == k) for k in ("rz", "p")]
        for i, gates in enumerate(x for x in groups if x):
            if i or not out or out[-1].tag != BARRIER:
                out.append(layers.barrier_layer())
            out.append(Layer(gates, PHASE))
    return out


def _insert_dummies(items: list[Layer], layers: LayerList, count: int,
                    position_seed: int) -> list[Layer]:
    """Place ``count`` dummy layers in distinct gaps between content layers."""
    if count == 0:
        return items
    # content layers and the (barrier-only) gaps around them
    gaps: list[list[Layer]] = [[]]
    content: list[Layer] = []
    for layer in items:
        if layer.tag == BARRIER:
            gaps[-1].append(layer)
        else:
            content.append(layer)
            gaps.append([])
    m = len(content)
    # interior gaps first; the outer two are inert on |0...0> and before readout
    slots = list(range(1, m)) if count <= m - 1 else list(range(m + 1))
    if count > len(slots):
        raise ObfuscationError(
            f"cannot place {count} dummy layers: circuit offers {len(slots)} positions"
        )
    chosen = [slots[i] for i in sample_positions(position_seed, len(slots), count)]
    placeholder = Layer(tuple(GateApp("rz", (q,), (0.0,)) for q in range(layers.qubit_count)),
                        DUMMY)
    bar = layers.barrier_layer()
    for j in chosen:
        gap = gaps[j]
        if gap:
            gaps[j] = [gap[0], placeholder, bar] + gap[1:]
        else:
            gaps[j] = [bar, placeholder, bar]
    out = list(gaps[0])
    for layer, gap in zip(content, gaps[1:]):
        out.append(layer)
        out.extend(gap)
    return out


def obfuscate(circuit: Circuit, key: KeySpec, *,
              keystream: Sequence[float] | None = None) -> tuple[Circuit, PhaseRecord]:
    """Lock the phases of ``circuit`` under ``key``.

    ``keystream`` overrides the key-derived shifts (analysis and tests only);
    it must supply one shift per phase gate, dummies included.
    """
    body, tail = _split_measures(circuit)
    body_circuit = circuit.with_gates(body)
    layered = split_phase_layers(circuit_layers(body_circuit))
    items = _enclose(layered)
    items = _insert_dummies(items, layered, key.dummy_layer_count, key.dummy_position_seed)

    # segment address of every phase / dummy layer
    seg = 0
    phase_slots: list[tuple[int, Layer]] = []
    dummy_slots: list[tuple[int, int]] = []
    for i, layer in enumerate(items):
        if layer.tag == BARRIER:
            seg += 1
        elif layer.tag == PHASE:
            phase_slots.append((seg, layer))
        elif layer.tag == DUMMY:
            dummy_slots.append((seg, i))
    segment_count = seg + 1

    entries = [
        PhaseEntry(s, g.qubits[0], g.kind, phase_angle(g))
        for s, layer in phase_slots
        for g in sorted(layer.gates, key=lambda g: g.qubits[0])
    ]
    n = circuit.qubit_count
    total = len(entries) + n * len(dummy_slots)
    if keystream is None:
        shifts = derive_keystream(key, total)
    else:
        shifts = [float(x) for x in keystream]
        if len(shifts) != total:
            raise ValueError(f"keystream needs {total} shifts, got {len(shifts)}")

    keyed: dict[tuple[int, int], GateApp] = {}
    for k, e in enumerate(entries):
        kind = "rz" if e.original_kind == "rz" else "p"
        keyed[(e.layer_index, e.qubit)] = GateApp(kind, (e.qubit,), (e.original_angle + shifts[k],))

    dummy_layers = []
    out_items = list(items)
    k = len(entries)
    for s, i in dummy_slots:
        gates = tuple(GateApp("rz", (q,), (shifts[k + q],)) for q in range(n))
        k += n
        out_items[i] = Layer(gates, DUMMY)
        dummy_layers.append(DummyLayer(s, (0.0,) * n))

    gates: list[GateApp] = []
    seg = 0
    for layer in out_items:
        if layer.tag == BARRIER:
            seg += 1
            gates.extend(layer.gates)
        elif layer.tag == PHASE:
            gates.extend(keyed[(seg, g.qubits[0])]
                         for g in sorted(layer.gates, key=lambda g: g.qubits[0]))
        else:
            gates.extend(layer.gates)
    gates.extend(tail)

    entries_t = tuple(entries)
    dummies_t = tuple(dummy_layers)
    record = PhaseRecord(n, segment_count, entries_t, dummies_t,
                         fingerprint(key, n, segment_count, entries_t, dummies_t),
                         key.public_params())
    return circuit.with_gates(gates), record


def _congruent(a: float, b: float) -> bool:
    return abs(math.remainder(a - b, 2 * math.pi)) <= ANGLE_TOL


def _restore(entry: PhaseEntry, residual: float) -> GateApp:
    if _congruent(residual, entry.original_angle):
        if entry.original_kind in FIXED_PHASE:
            return GateApp(entry.original_kind, (entry.qubit,))
        return GateApp(entry.original_kind, (entry.qubit,), (entry.original_angle,))
    kind = "rz" if entry.original_kind == "rz" else "p"
    return GateApp(kind, (entry.qubit,), (residual,))


def _phase_by_qubit(seg_gates: list[GateApp], seg: int, allowed: set[int]) -> dict[int, GateApp]:
    by_qubit: dict[int, GateApp] = {}
    for g in seg_gates:
        if g.kind not in PHASE_KINDS:
            raise BarrierStructureError(
                f"segment {seg} should hold only phase gates, found {g.kind}"
            )
        q = g.qubits[0]
        if q in by_qubit or q not in allowed:
            raise BarrierStructureError(f"unexpected phase gate on qubit {q} in segment {seg}")
        by_qubit[q] = g
    return by_qubit


def deobfuscate(circuit: Circuit, record: PhaseRecord, key: KeySpec) -> Circuit:
    """Undo :func:`obfuscate` on a (possibly compiled) obfuscated circuit.

    Dummy layers are located through the record and their key shift removed;
    a layer that cancels to the identity is dropped.  Existing phase gates
    get their shift subtracted and, when the result matches the recorded
    original, their original kind back.  A wrong seed is *not* detected:
    the result is simply a different circuit.
    """
    expected = fingerprint(key, record.qubit_count, record.segment_count,
                           record.entries, record.dummy_layers)
    if expected != record.key_fingerprint:
        raise FingerprintMismatch("phase record does not match the key parameters")
    if circuit.qubit_count != record.qubit_count:
        raise BarrierStructureError(
            f"circuit has {circuit.qubit_count} qubits, record expects {record.qubit_count}"
        )
    segs = segments(circuit)
    if len(segs) != record.segment_count:
        raise BarrierStructureError(
            f"circuit has {len(segs)} barrier segments, record expects {record.segment_count}"
        )

    n = record.qubit_count
    shifts = derive_keystream(key, len(record.entries) + record.dummy_gate_count)
    by_seg: dict[int, list[tuple[int, PhaseEntry]]] = {}
    for k, e in enumerate(record.entries):
        by_seg.setdefault(e.layer_index, []).append((k, e))
    dummy_at: dict[int, tuple[int, DummyLayer]] = {}
    k = len(record.entries)
    for d in record.dummy_layers:
        dummy_at[d.insertion_index] = (k, d)
        k += len(d.angles)
    if set(by_seg) & set(dummy_at) or max(list(by_seg) + list(dummy_at), default=0) >= len(segs):
        raise BarrierStructureError("record addresses segments that do not exist")

    layers: list[Layer] = []
    bar = Layer((GateApp("barrier", tuple(range(n))),), BARRIER)
    for s, seg_gates in enumerate(segs):
        if s:
            layers.append(bar)
        if s in by_seg:
            found = _phase_by_qubit(seg_gates, s, {e.qubit for _, e in by_seg[s]})
            restored = []
            for k, e in by_seg[s]:
                g = found.get(e.qubit)
                # a compiler may drop a zero-angle gate
                angle = phase_angle(g) if g is not None else 0.0
                restored.append(_restore(e, angle - shifts[k]))
            layers.append(Layer(tuple(restored), PHASE))
        elif s in dummy_at:
            k0, d = dummy_at[s]
            found = _phase_by_qubit(seg_gates, s, set(range(len(d.angles))))
            residue = []
            for q, base in enumerate(d.angles):
                g = found.get(q)
                angle = phase_angle(g) if g is not None else 0.0
                r = angle - shifts[k0 + q] - base
                if not _congruent(r, 0.0):
                    residue.append(GateApp("rz", (q,), (r,)))
            layers.append(Layer(tuple(residue), DUMMY))
        elif seg_gates:
            # compiled regions may mix rz into non-phase work; leave untagged
            sub = circuit.with_gates(seg_gates)
            layers.extend(extract_layers(build_dag(sub), sub))

    # dummy layers that fully cancelled vanish; residues (wrong key) stay in
    kept = [layer for layer in layers if not (layer.tag == DUMMY and not layer.gates)]
    ll = LayerList(tuple(kept), n, dict(circuit.register_names), dict(circuit.creg_names))
    return merge_layers(ll)
