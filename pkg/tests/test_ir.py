from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import circuits, unitary_equal
from phasecloak import corpus
from phasecloak.ir import (BARRIER, NONPHASE, PHASE, Layer, LayerList, build_dag,
                           circuit_layers, depth, extract_layers, full_barrier, merge_layers,
                           segments, split_phase_layers)
from phasecloak.qasm import Circuit, GateApp


def g(kind, *qubits, angle=None):
    return GateApp(kind, qubits, () if angle is None else (angle,))


def test_dag_disjoint_gates_have_no_edge():
    dag = build_dag(Circuit(2, (g("h", 0), g("x", 1))))
    assert len(dag) == 2 and dag.edges == set()


def test_dag_chain():
    dag = build_dag(Circuit(2, (g("h", 0), g("cx", 0, 1), g("x", 1))))
    assert dag.edges == {(0, 1), (1, 2)}


def test_dag_only_links_consecutive_gates_on_a_wire():
    dag = build_dag(Circuit(1, (g("h", 0), g("x", 0), g("z", 0))))
    assert dag.edges == {(0, 1), (1, 2)}


def test_dag_barrier_touches_all_qubits():
    dag = build_dag(Circuit(3, (g("h", 0), g("x", 2), full_barrier(3), g("y", 1))))
    assert dag.edges == {(0, 2), (1, 2), (2, 3)}


def test_fredkin_node_count():
    c = corpus.load("fredkin_n3")
    assert len(build_dag(c)) == len(c)


def test_parallel_gates_one_layer():
    assert len(circuit_layers(Circuit(2, (g("h", 0), g("x", 1))))) == 1


def test_chain_two_layers():
    assert len(circuit_layers(Circuit(2, (g("h", 0), g("cx", 0, 1))))) == 2


@pytest.mark.parametrize("name, expected", [
    ("adder_n4", 12), ("fredkin_n3", 12), ("wstate_n3", 6), ("basis_change_n3", 22),
])
def test_corpus_depths(name, expected):
    c = corpus.load(name)
    assert depth(c) == expected
    assert len(circuit_layers(c)) == expected


def test_layer_rejects_overlap():
    with pytest.raises(ValueError):
        Layer((g("h", 0), g("cx", 0, 1)))


def test_layer_tag_checks():
    with pytest.raises(ValueError):
        Layer((g("h", 0),), PHASE)
    with pytest.raises(ValueError):
        Layer((g("t", 0),), NONPHASE)


def test_split_mixed_layer():
    layers = split_phase_layers(circuit_layers(Circuit(2, (g("h", 0), g("t", 1)))))
    assert [layer.tag for layer in layers] == [NONPHASE, PHASE, BARRIER]
    assert layers.layers[0].gates == (g("h", 0),)
    assert layers.layers[1].gates == (g("t", 1),)


def test_split_all_nonphase_adds_nothing():
    c = Circuit(2, (g("h", 0), g("cx", 0, 1), g("z", 1)))
    layers = split_phase_layers(circuit_layers(c))
    assert all(layer.tag == NONPHASE for layer in layers)
    assert merge_layers(layers).gates == c.gates


def test_basis_change_has_no_phase_layers():
    layers = split_phase_layers(circuit_layers(corpus.load("basis_change_n3")))
    assert not any(layer.tag == PHASE for layer in layers)


def test_merge_empty_and_barrier_only():
    assert merge_layers(LayerList((), 2)).gates == ()
    ll = LayerList((Layer((full_barrier(2),), BARRIER),), 2)
    assert merge_layers(ll).gates == ()


@pytest.mark.parametrize("name", corpus.names(include_synthetic=True))
def test_split_merge_corpus(name):
    c = corpus.load(name)
    layers = split_phase_layers(circuit_layers(c))
    assert not any(layer.is_mixed for layer in layers)
    assert unitary_equal(merge_layers(layers), c)


@settings(max_examples=120, deadline=None)
@given(circuits(max_qubits=4, barriers=True))
def test_split_merge_property(c):
    layers = split_phase_layers(extract_layers(build_dag(c), c))
    assert not any(layer.is_mixed for layer in layers)
    for i, layer in enumerate(layers.layers):
        if layer.tag == PHASE:
            assert layers.layers[i + 1].tag == BARRIER
    merged = merge_layers(layers)
    assert unitary_equal(merged, c)
    assert depth(merged) >= depth(Circuit(c.qubit_count, tuple(x for x in c.gates
                                                          if x.kind != "barrier")))


@given(circuits(max_qubits=4))
def test_layer_count_is_depth(c):
    assert len(circuit_layers(c)) == depth(c)


def test_depth_conventions():
    assert depth(Circuit(2)) == 0
    c = Circuit(2, (g("h", 0), full_barrier(2), g("x", 1)))
    assert depth(c) == 2
    assert depth(c, count_barriers=True) == 3
    m = Circuit(1, (g("h", 0), GateApp("measure", (0,), clbits=(0,))))
    assert depth(m) == 2


def test_full_width_layer_adds_one():
    c = corpus.load("adder_n4")
    extra = tuple(g("rz", q, angle=0.3) for q in range(c.qubit_count))
    body = tuple(x for x in c.gates if x.kind != "measure")
    tail = tuple(x for x in c.gates if x.kind == "measure")
    bar = (full_barrier(c.qubit_count),)
    assert depth(c.with_gates(body + bar + extra + bar + tail)) == depth(c) + 1


def test_segments():
    c = Circuit(2, (g("h", 0), full_barrier(2), full_barrier(2), g("x", 1)))
    assert segments(c) == [[g("h", 0)], [], [g("x", 1)]]
