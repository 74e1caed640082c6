"""Dependency DAG, ASAP layering and phase/non-phase layer splitting."""
from __future__ import annotations

from dataclasses import dataclass, field

from .qasm import PHASE_KINDS, Circuit, GateApp

NONPHASE, PHASE, DUMMY, BARRIER = "nonphase", "phase", "dummy", "barrier"
LAYER_TAGS = (NONPHASE, PHASE, DUMMY, BARRIER)


def gate_wires(gate: GateApp, qubit_count: int) -> tuple[int, ...]:
    """Qubits a gate orders against; barriers span the whole register."""
    if gate.kind == "barrier":
        return tuple(range(qubit_count))
    return gate.qubits


def full_barrier(qubit_count: int) -> GateApp:
    return GateApp("barrier", tuple(range(qubit_count)))


@dataclass(frozen=True)
class Dag:
    """Gates as nodes (indexed in program order), edges between consecutive
    gates that share a qubit."""

    qubit_count: int
    nodes: tuple[GateApp, ...]
    preds: tuple[frozenset[int], ...]

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(p, i) for i, ps in enumerate(self.preds) for p in ps}

    def succs(self) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in self.nodes]
        for i, ps in enumerate(self.preds):
            for p in ps:
                out[p].add(i)
        return out

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class Layer:
    gates: tuple[GateApp, ...]
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.tag is not None and self.tag not in LAYER_TAGS:
            raise ValueError(f"unknown layer tag {self.tag!r}")
        seen: set[int] = set()
        for g in self.gates:
            if seen.intersection(g.qubits):
                raise ValueError(f"layer gates overlap on qubits: {self.gates}")
            seen.update(g.qubits)
        if self.tag in (PHASE, DUMMY) and any(not g.is_phase for g in self.gates):
            raise ValueError(f"{self.tag} layer holds a non-phase gate")
        if self.tag == NONPHASE and any(g.is_phase for g in self.gates):
            raise ValueError("nonphase layer holds a phase gate")

    @property
    def is_mixed(self) -> bool:
        kinds = {g.is_phase for g in self.gates if g.kind != "barrier"}
        return len(kinds) > 1


@dataclass(frozen=True)
class LayerList:
    layers: tuple[Layer, ...]
    qubit_count: int
    register_names: dict[str, tuple[int, int]] = field(default_factory=dict, compare=False)
    creg_names: dict[str, tuple[int, int]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def replace(self, layers) -> "LayerList":
        return LayerList(tuple(layers), self.qubit_count, dict(self.register_names),
                         dict(self.creg_names))

    def barrier_layer(self) -> Layer:
        return Layer((full_barrier(self.qubit_count),), BARRIER)


def build_dag(circuit: Circuit) -> Dag:
    last: dict[int, int] = {}
    preds = []
    for i, g in enumerate(circuit.gates):
        ps = set()
        for q in gate_wires(g, circuit.qubit_count):
            if q in last:
                ps.add(last[q])
            last[q] = i
        preds.append(frozenset(ps))
    return Dag(circuit.qubit_count, circuit.gates, tuple(preds))


def asap_levels(dag: Dag) -> list[int]:
    levels: list[int] = []
    for ps in dag.preds:
        levels.append(1 + max((levels[p] for p in ps), default=-1))
    return levels


def extract_layers(dag: Dag, circuit: Circuit | None = None) -> LayerList:
    """ASAP leveling: a gate sits one layer after its latest predecessor.

    Barrier nodes always end up alone in their layer and are tagged ``barrier``;
    other layers are left untagged.
    """
    levels = asap_levels(dag)
    buckets: list[list[GateApp]] = [[] for _ in range(max(levels, default=-1) + 1)]
    for g, lvl in zip(dag.nodes, levels):
        buckets[lvl].append(g)
    layers = []
    for gates in buckets:
        tag = BARRIER if gates[0].kind == "barrier" else None
        layers.append(Layer(tuple(gates), tag))
    regs = dict(circuit.register_names) if circuit else {}
    cregs = dict(circuit.creg_names) if circuit else {}
    return LayerList(tuple(layers), dag.qubit_count, regs, cregs)


def circuit_layers(circuit: Circuit) -> LayerList:
    return extract_layers(build_dag(circuit), circuit)


def split_phase_layers(layers: LayerList) -> LayerList:
    """Split every mixed layer into a non-phase layer followed by a phase
    layer, and put a barrier after each phase layer."""
    out: list[Layer] = []
    for layer in layers:
        if layer.tag == BARRIER:
            out.append(layer)
            continue
        if layer.tag in (PHASE, DUMMY, NONPHASE):
            out.append(layer)
            if layer.tag != NONPHASE:
                out.append(layers.barrier_layer())
            continue
        nonphase = tuple(g for g in layer.gates if not g.is_phase)
        phase = tuple(g for g in layer.gates if g.is_phase)
        if nonphase:
            out.append(Layer(nonphase, NONPHASE))
        if phase:
            out.append(Layer(phase, PHASE))
            out.append(layers.barrier_layer())
    return layers.replace(out)


def merge_layers(layers: LayerList) -> Circuit:
    """Flatten layers back into a circuit, dropping barrier layers."""
    gates = [g for layer in layers if layer.tag != BARRIER
             for g in layer.gates if g.kind != "barrier"]
    return Circuit(layers.qubit_count, tuple(gates), dict(layers.register_names),
                   dict(layers.creg_names))


def flatten(layers: LayerList) -> Circuit:
    """Flatten layers keeping barriers."""
    gates = [g for layer in layers for g in layer.gates]
    return Circuit(layers.qubit_count, tuple(gates), dict(layers.register_names),
                   dict(layers.creg_names))


def depth(circuit: Circuit, count_barriers: bool = False) -> int:
    """ASAP layer count.  Measures count as a layer; barriers synchronise
    their qubits but only add a layer when ``count_barriers`` is set."""
    level = [0] * circuit.qubit_count
    best = 0
    for g in circuit.gates:
        wires = gate_wires(g, circuit.qubit_count)
        if not wires:
            continue
        weight = 1 if (g.kind != "barrier" or count_barriers) else 0
        lvl = max(level[q] for q in wires) + weight
        for q in wires:
            level[q] = lvl
        best = max(best, lvl)
    return best


def segments(circuit: Circuit) -> list[list[GateApp]]:
    """Split a gate sequence at barriers; ``k`` barriers give ``k + 1``
    (possibly empty) segments."""
    segs: list[list[GateApp]] = [[]]
    for g in circuit.gates:
        if g.kind == "barrier":
            segs.append([])
        else:
            segs[-1].append(g)
    return segs


def phase_gate_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind in PHASE_KINDS)
