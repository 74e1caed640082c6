"""A small, barrier-respecting stand-in for a third-party compiler.

Lowering uses fixed decomposition tables (each exact up to global phase) and
is followed by a peephole pass that cancels adjacent inverse pairs and fuses
neighbouring ``rz`` gates.  Nothing ever moves or merges across a barrier.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable

from .qasm import Circuit, GateApp

DEFAULT_BASIS = frozenset({"rz", "sx", "x", "cx"})
PASSTHROUGH = frozenset({"barrier", "measure"})

PI = math.pi
_HALF = PI / 2


class TranspileError(ValueError):
    pass


def _g(kind, *qubits, angle=None) -> GateApp:
    return GateApp(kind, qubits, () if angle is None else (angle,))


Rule = Callable[[GateApp], list[GateApp]]

# kind -> alternative rewrites; each is (kinds it produces, rewrite)
RULES: dict[str, list[tuple[frozenset[str], Rule]]] = {
    "h": [
        (frozenset({"rz", "sx"}),
         lambda g: [_g("rz", *g.qubits, angle=_HALF), _g("sx", *g.qubits),
                    _g("rz", *g.qubits, angle=_HALF)]),
    ],
    "sx": [
        (frozenset({"h", "s"}),
         lambda g: [_g("h", *g.qubits), _g("s", *g.qubits), _g("h", *g.qubits)]),
    ],
    "x": [
        (frozenset({"sx"}), lambda g: [_g("sx", *g.qubits), _g("sx", *g.qubits)]),
        (frozenset({"h", "z"}),
         lambda g: [_g("h", *g.qubits), _g("z", *g.qubits), _g("h", *g.qubits)]),
    ],
    "y": [
        (frozenset({"rz", "x"}), lambda g: [_g("rz", *g.qubits, angle=PI), _g("x", *g.qubits)]),
    ],
    "z": [(frozenset({"rz"}), lambda g: [_g("rz", *g.qubits, angle=PI)])],
    "s": [(frozenset({"rz"}), lambda g: [_g("rz", *g.qubits, angle=_HALF)])],
    "sdg": [(frozenset({"rz"}), lambda g: [_g("rz", *g.qubits, angle=-_HALF)])],
    "t": [(frozenset({"rz"}), lambda g: [_g("rz", *g.qubits, angle=PI / 4)])],
    "tdg": [(frozenset({"rz"}), lambda g: [_g("rz", *g.qubits, angle=-PI / 4)])],
    "p": [(frozenset({"rz"}), lambda g: [_g("rz", *g.qubits, angle=g.angle)])],
    "rz": [(frozenset({"p"}), lambda g: [_g("p", *g.qubits, angle=g.angle)])],
    "rx": [
        (frozenset({"h", "rz"}),
         lambda g: [_g("h", *g.qubits), _g("rz", *g.qubits, angle=g.angle), _g("h", *g.qubits)]),
    ],
    "ry": [
        (frozenset({"sdg", "rx", "s"}),
         lambda g: [_g("sdg", *g.qubits), _g("rx", *g.qubits, angle=g.angle), _g("s", *g.qubits)]),
    ],
    "cz": [
        (frozenset({"h", "cx"}),
         lambda g: [_g("h", g.qubits[1]), _g("cx", *g.qubits), _g("h", g.qubits[1])]),
    ],
    "swap": [
        (frozenset({"cx"}),
         lambda g: [_g("cx", g.qubits[0], g.qubits[1]), _g("cx", g.qubits[1], g.qubits[0]),
                    _g("cx", g.qubits[0], g.qubits[1])]),
    ],
    "ccx": [
        (frozenset({"h", "t", "tdg", "cx"}), lambda g: _toffoli(*g.qubits)),
    ],
}


def _toffoli(a: int, b: int, c: int) -> list[GateApp]:
    return [
        _g("h", c), _g("cx", b, c), _g("tdg", c), _g("cx", a, c), _g("t", c),
        _g("cx", b, c), _g("tdg", c), _g("cx", a, c), _g("t", b), _g("t", c),
        _g("h", c), _g("cx", a, b), _g("t", a), _g("tdg", b), _g("cx", a, b),
    ]


def _plan(basis: frozenset[str]) -> dict[str, Rule | None]:
    """For every reachable kind, the rewrite to use (None = native)."""
    plan: dict[str, Rule | None] = {k: None for k in basis}
    changed = True
    while changed:
        changed = False
        for kind, options in RULES.items():
            if kind in plan:
                continue
            for produces, rule in options:
                if produces <= plan.keys():
                    plan[kind] = rule
                    changed = True
                    break
    return plan


def decompose(gates: Iterable[GateApp], basis: frozenset[str]) -> list[GateApp]:
    plan = _plan(frozenset(basis))
    out: list[GateApp] = []
    stack = list(reversed(list(gates)))
    while stack:
        g = stack.pop()
        if g.kind in PASSTHROUGH or plan.get(g.kind, False) is None:
            out.append(g)
            continue
        if g.kind not in plan:
            raise TranspileError(f"gate '{g.kind}' cannot be lowered to basis {sorted(basis)}")
        stack.extend(reversed(plan[g.kind](g)))
    return out


_SELF_INVERSE = frozenset({"x", "y", "z", "h", "cx", "cz", "swap", "ccx"})
_INVERSE_PAIRS = {("s", "sdg"), ("sdg", "s"), ("t", "tdg"), ("tdg", "t")}
_FUSABLE = frozenset({"rz", "p", "rx", "ry"})


def _cancels(a: GateApp, b: GateApp) -> bool:
    if a.qubits != b.qubits:
        return False
    if a.kind == b.kind and a.kind in _SELF_INVERSE:
        return True
    return (a.kind, b.kind) in _INVERSE_PAIRS


def _is_identity_rotation(kind: str, angle: float) -> bool:
    # rz/rx/ry have period 4*pi but 2*pi is a global phase; p has period 2*pi
    return abs(math.remainder(angle, 2 * PI)) < 1e-12


def peephole(gates: Iterable[GateApp], qubit_count: int) -> list[GateApp]:
    """Cancel adjacent inverses and fuse adjacent rotations, within
    barrier-free regions only."""
    out: list[GateApp | None] = []
    top: list[list[int]] = [[] for _ in range(qubit_count)]

    def last_common(g: GateApp) -> int | None:
        idx = {top[q][-1] if top[q] else None for q in g.qubits}
        if len(idx) != 1:
            return None
        j = idx.pop()
        if j is None or out[j] is None or out[j].qubits != g.qubits:
            return None
        return j

    def drop(j: int) -> None:
        for q in out[j].qubits:
            top[q].pop()
        out[j] = None

    def push(g: GateApp) -> None:
        out.append(g)
        for q in g.qubits:
            top[q].append(len(out) - 1)

    for g in gates:
        if g.kind == "barrier":
            # fence: nothing before it may pair with anything after
            out.append(g)
            top = [[] for _ in range(qubit_count)]
            continue
        if g.kind == "measure":
            push(g)
            continue
        j = last_common(g)
        if j is not None:
            prev = out[j]
            if _cancels(prev, g):
                drop(j)
                continue
            if prev.kind == g.kind and g.kind in _FUSABLE:
                angle = prev.angle + g.angle
                drop(j)
                if not _is_identity_rotation(g.kind, angle):
                    push(GateApp(g.kind, g.qubits, (angle,)))
                continue
        push(g)
    return [g for g in out if g is not None]


def transpile(circuit: Circuit, basis: Iterable[str] = DEFAULT_BASIS,
              optimize: bool = True) -> Circuit:
    basis = frozenset(basis)
    unknown = basis - set(RULES) - {"cx", "rz", "sx", "x"}
    if unknown:
        raise TranspileError(f"unknown basis gates {sorted(unknown)}")
    gates = decompose(circuit.gates, basis)
    if optimize:
        gates = peephole(gates, circuit.qubit_count)
    return circuit.with_gates(gates)
