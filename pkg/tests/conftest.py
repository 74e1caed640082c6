from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import strategies as st

from phasecloak.qasm import GATE_ARITY, Circuit, GateApp
from phasecloak.sim import strip_measures, unitary, unitary_distance

ALL_KINDS = sorted(GATE_ARITY)


def unitary_equal(a: Circuit, b: Circuit, tol: float = 1e-9) -> bool:
    return unitary_distance(unitary(strip_measures(a)), unitary(strip_measures(b))) < tol


@st.composite
def circuits(draw, min_qubits=1, max_qubits=4, kinds=ALL_KINDS, max_gates=25,
             barriers=False, measure=False):
    n = draw(st.integers(min_qubits, max_qubits))
    usable = [k for k in kinds if GATE_ARITY[k][0] <= n]
    angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        if barriers and draw(st.integers(0, 9)) == 0:
            gates.append(GateApp("barrier", tuple(range(n))))
            continue
        kind = draw(st.sampled_from(usable))
        nq, npar = GATE_ARITY[kind]
        qubits = draw(st.permutations(range(n)))[:nq]
        params = tuple(draw(angle) for _ in range(npar))
        gates.append(GateApp(kind, tuple(qubits), params))
    if measure:
        gates.extend(GateApp("measure", (q,), clbits=(q,)) for q in range(n))
    return Circuit(n, tuple(gates))


def random_circuit(rng: np.random.Generator, n: int, count: int, kinds=ALL_KINDS) -> Circuit:
    usable = [k for k in kinds if GATE_ARITY[k][0] <= n]
    gates = []
    for _ in range(count):
        kind = usable[rng.integers(len(usable))]
        nq, npar = GATE_ARITY[kind]
        qubits = tuple(int(q) for q in rng.permutation(n)[:nq])
        params = tuple(float(a) for a in rng.uniform(-math.pi, math.pi, npar))
        gates.append(GateApp(kind, qubits, params))
    return Circuit(n, tuple(gates))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
