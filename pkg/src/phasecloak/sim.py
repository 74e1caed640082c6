"""Dense statevector simulation.

Qubit 0 is the least significant bit of a basis index and the *rightmost*
character of an outcome string.  Multi-qubit gate matrices are written with
the first listed qubit as the most significant bit (control first).

All kernels accept a leading batch axis, which ``unitary`` uses to push every
basis vector through at once and the noisy sampler uses for trajectories.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .qasm import Circuit, GateApp

MAX_QUBITS = 20
MAX_UNITARY_QUBITS = 10

COUNTS_FORMAT = "phasecloak.counts"
COUNTS_VERSION = 1

_S2 = 1 / math.sqrt(2)
_FIXED = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
    "sx": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_ccx = np.eye(8, dtype=complex)
_ccx[6:, 6:] = [[0, 1], [1, 0]]
_FIXED["ccx"] = _ccx

_PAULIS = (_FIXED["x"], _FIXED["y"], _FIXED["z"])


def rz_matrix(delta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * delta), 0], [0, np.exp(0.5j * delta)]])


def gate_matrix(gate: GateApp) -> np.ndarray:
    k = gate.kind
    if k in _FIXED:
        return _FIXED[k]
    if k == "rz":
        return rz_matrix(gate.angle)
    if k == "p":
        return np.array([[1, 0], [0, np.exp(1j * gate.angle)]])
    c, s = math.cos(gate.angle / 2), math.sin(gate.angle / 2)
    if k == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    raise ValueError(f"no matrix for {k}")


def zero_state(n: int) -> np.ndarray:
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit simulator limit")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return psi


def _apply_matrix(states: np.ndarray, matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    """Apply ``matrix`` to ``qubits`` of a batch of states shaped (B, 2**n)."""
    batch = states.shape[0]
    k = len(qubits)
    t = states.reshape((batch,) + (2,) * n)
    # axis 1 holds the most significant qubit, n - 1
    axes = [1 + (n - 1 - q) for q in qubits]
    t = np.moveaxis(t, axes, range(1, k + 1))
    shape = t.shape
    t = t.reshape(batch, 1 << k, -1)
    t = np.einsum("ij,bjr->bir", matrix, t)
    t = np.moveaxis(t.reshape(shape), range(1, k + 1), axes)
    return t.reshape(batch, 1 << n)


def _check(gate: GateApp, n: int) -> None:
    for q in gate.qubits:
        if not 0 <= q < n:
            raise IndexError(f"{gate.kind} on qubit {q} of a {n}-qubit state")


def apply_gate(state: np.ndarray, gate: GateApp) -> np.ndarray:
    """Return the state after ``gate``; barriers and measures are no-ops."""
    n = int(state.shape[-1]).bit_length() - 1
    _check(gate, n)
    if gate.kind in ("barrier", "measure"):
        return state
    single = state.ndim == 1
    batch = state.reshape(1, -1) if single else state
    out = _apply_matrix(batch, gate_matrix(gate), gate.qubits, n)
    return out[0] if single else out


def statevector(circuit: Circuit) -> np.ndarray:
    psi = zero_state(circuit.qubit_count)
    for g in circuit.gates:
        psi = apply_gate(psi, g)
    return psi


def unitary(circuit: Circuit) -> np.ndarray:
    n = circuit.qubit_count
    if n > MAX_UNITARY_QUBITS:
        raise ValueError(f"unitary limited to {MAX_UNITARY_QUBITS} qubits, got {n}")
    if any(g.kind == "measure" for g in circuit.gates):
        raise ValueError("unitary() needs a measurement-free circuit")
    # row j starts as e_j and ends as U e_j
    rows = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        rows = apply_gate(rows, g) if n else rows
    return rows.T


def strip_measures(circuit: Circuit) -> Circuit:
    return circuit.with_gates(g for g in circuit.gates if g.kind != "measure")


def unitary_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Frobenius distance after removing the best global phase."""
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.linalg.norm(u - phase * v))


def measured_qubits(circuit: Circuit) -> list[int]:
    """Qubits read out, ordered by classical bit; all qubits if none measured."""
    pairs = {}
    for g in circuit.gates:
        if g.kind == "measure":
            pairs[g.clbits[0]] = g.qubits[0]
    if not pairs:
        return list(range(circuit.qubit_count))
    return [pairs[c] for c in sorted(pairs)]


def _marginal(probs: np.ndarray, n: int, qubits: list[int]) -> np.ndarray:
    """Distribution over ``qubits`` (outcome bit i = qubits[i])."""
    if qubits == list(range(n)):
        return probs
    t = probs.reshape((2,) * n)
    keep_axes = [n - 1 - q for q in reversed(qubits)]
    drop = tuple(a for a in range(n) if a not in keep_axes)
    t = t.sum(axis=drop) if drop else t
    remaining = sorted(keep_axes)
    t = np.transpose(t, [remaining.index(a) for a in keep_axes])
    return t.reshape(-1)


def exact_distribution(circuit: Circuit) -> np.ndarray:
    """Outcome probabilities, index i <-> outcome bits of i over the measured
    qubits.  Renormalised by the total so rounding never leaks mass: a point
    mass stays exactly 1.0 whatever phases were applied."""
    psi = statevector(strip_measures(circuit))
    probs = psi.real ** 2 + psi.imag ** 2
    dist = _marginal(probs, circuit.qubit_count, measured_qubits(circuit))
    return dist / dist.sum()


def distribution_dict(probs: np.ndarray, width: int, cutoff: float = 0.0) -> dict[str, float]:
    return {format(i, f"0{width}b"): float(p) for i, p in enumerate(probs) if p > cutoff}


@dataclass(frozen=True)
class NoiseSpec:
    """Symmetric depolarizing noise: after each gate, every qubit it touched
    suffers X, Y or Z with probability p/3 each.

    ``virtual_phase`` exempts phase-class gates, which hardware implements as
    frame changes rather than pulses.
    """

    p: float
    virtual_phase: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("noise probability must lie in [0, 1]")


@dataclass(frozen=True)
class CountsDistribution:
    counts: dict[str, int]
    shots: int
    bit_width: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")
        for key in self.counts:
            if len(key) != self.bit_width or set(key) - {"0", "1"}:
                raise ValueError(f"bad outcome key {key!r} for width {self.bit_width}")

    def probabilities(self) -> np.ndarray:
        p = np.zeros(1 << self.bit_width)
        for key, c in self.counts.items():
            p[int(key, 2)] = c
        return p / self.shots

    def to_json(self) -> str:
        doc = {"format": COUNTS_FORMAT, "version": COUNTS_VERSION, "shots": self.shots,
               "bit_width": self.bit_width, "counts": dict(sorted(self.counts.items()))}
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CountsDistribution":
        doc = json.loads(text)
        if doc.get("format") != COUNTS_FORMAT or doc.get("version") != COUNTS_VERSION:
            raise ValueError("not a counts document")
        return cls({str(k): int(v) for k, v in doc["counts"].items()}, int(doc["shots"]),
                   int(doc["bit_width"]))

    def dump(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "CountsDistribution":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _counts_from_indices(indices, width: int, shots: int) -> CountsDistribution:
    values, freq = np.unique(np.asarray(indices), return_counts=True)
    counts = {format(int(v), f"0{width}b"): int(c) for v, c in zip(values, freq)}
    return CountsDistribution(counts, shots, width)


def _shot_rngs(rng_seed: int, shots: int) -> list[np.random.Generator]:
    # one substream per shot: results do not depend on how shots are batched
    root = np.random.SeedSequence(rng_seed)
    return [np.random.default_rng(s) for s in root.spawn(shots)]


def sample_counts(circuit: Circuit, shots: int, rng_seed: int = 0,
                  noise: NoiseSpec | None = None) -> CountsDistribution:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    qubits = measured_qubits(circuit)
    width = len(qubits)
    if noise is None or noise.p == 0.0:
        probs = exact_distribution(circuit)
        rng = np.random.default_rng(rng_seed)
        return _counts_from_indices(rng.choice(len(probs), size=shots, p=probs), width, shots)
    return _sample_noisy(circuit, shots, rng_seed, noise, qubits)


def _noisy_slots(circuit: Circuit, noise: NoiseSpec) -> list[tuple[int, int]]:
    slots = []
    for i, g in enumerate(circuit.gates):
        if g.kind in ("barrier", "measure"):
            continue
        if noise.virtual_phase and g.is_phase:
            continue
        slots.extend((i, q) for q in g.qubits)
    return slots


def _sample_noisy(circuit: Circuit, shots: int, rng_seed: int, noise: NoiseSpec,
                  qubits: list[int]) -> CountsDistribution:
    n = circuit.qubit_count
    body = strip_measures(circuit)
    slots = _noisy_slots(body, noise)
    rngs = _shot_rngs(rng_seed, shots)
    # per shot: which slots fault and with which Pauli (0=X, 1=Y, 2=Z)
    fault = np.zeros((shots, len(slots)), dtype=np.int8)
    for s, rng in enumerate(rngs):
        hit = rng.random(len(slots)) < noise.p
        fault[s] = np.where(hit, rng.integers(0, 3, len(slots)) + 1, 0)
    by_gate: dict[int, list[tuple[int, int]]] = {}
    for col, (gi, q) in enumerate(slots):
        by_gate.setdefault(gi, []).append((col, q))

    states = np.zeros((shots, 1 << n), dtype=complex)
    states[:, 0] = 1.0
    for gi, g in enumerate(body.gates):
        if g.kind == "barrier":
            continue
        states = _apply_matrix(states, gate_matrix(g), g.qubits, n)
        for col, q in by_gate.get(gi, ()):
            kinds = fault[:, col]
            for pk in (1, 2, 3):
                rows = np.nonzero(kinds == pk)[0]
                if rows.size:
                    states[rows] = _apply_matrix(states[rows], _PAULIS[pk - 1], (q,), n)

    probs = states.real ** 2 + states.imag ** 2
    outcomes = np.empty(shots, dtype=np.int64)
    for s in range(shots):
        p = _marginal(probs[s], n, qubits)
        outcomes[s] = rngs[s].choice(len(p), p=p / p.sum())
    return _counts_from_indices(outcomes, len(qubits), shots)
