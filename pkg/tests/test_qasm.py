from __future__ import annotations

import math

import pytest
from hypothesis import given, settings

from conftest import circuits
from phasecloak import corpus
from phasecloak.qasm import (Circuit, GateApp, QasmIndexError, QasmSyntaxError,
                             UnsupportedGateError, emit_qasm, parse_qasm)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def parse(body: str) -> Circuit:
    return parse_qasm(HEADER + body)


def test_single_gate():
    c = parse("qreg q[1]; h q[0];")
    assert c.qubit_count == 1
    assert c.gates == (GateApp("h", (0,)),)


def test_two_qubit_gate():
    c = parse("qreg q[2]; cx q[0],q[1];")
    assert c.gates == (GateApp("cx", (0, 1)),)


def test_angle_literal():
    c = parse("qreg q[1]; rz(0.785398163) q[0];")
    assert abs(c.gates[0].angle - math.pi / 4) < 1e-9


def test_angle_expressions():
    c = parse("qreg q[1]; rz(-pi/4) q[0]; p(2*pi) q[0]; rx(pi^2/(1+1)) q[0]; ry(sqrt(4)-cos(0)) q[0];")
    angles = [g.angle for g in c.gates]
    assert angles == pytest.approx([-math.pi / 4, 2 * math.pi, math.pi ** 2 / 2, 1.0])


def test_registers_flatten_in_declaration_order():
    c = parse("qreg a[2]; qreg b[3]; cx a[1],b[2]; x b[0];")
    assert c.qubit_count == 5
    assert c.gates[0].qubits == (1, 4)
    assert c.gates[1].qubits == (2,)
    assert c.register_names == {"a": (0, 2), "b": (2, 3)}


def test_broadcast():
    c = parse("qreg q[3]; qreg r[3]; h q; cx q,r; cx q[0],r;")
    kinds = [(g.kind, g.qubits) for g in c.gates]
    assert kinds[:3] == [("h", (0,)), ("h", (1,)), ("h", (2,))]
    assert kinds[3:6] == [("cx", (0, 3)), ("cx", (1, 4)), ("cx", (2, 5))]
    assert kinds[6:] == [("cx", (0, 3)), ("cx", (0, 4)), ("cx", (0, 5))]


def test_broadcast_size_mismatch():
    with pytest.raises(QasmSyntaxError, match="different sizes"):
        parse("qreg q[2]; qreg r[3]; cx q,r;")


def test_u1_and_phase_spellings_normalise_to_p():
    c = parse("qreg q[1]; u1(0.5) q[0]; p(0.25) q[0];")
    assert [g.kind for g in c.gates] == ["p", "p"]


def test_measure_and_barrier():
    c = parse("qreg q[2]; creg c[2]; h q[0]; barrier q; measure q -> c;")
    assert [g.kind for g in c.gates] == ["h", "barrier", "measure", "measure"]
    assert c.gates[1].qubits == (0, 1)
    assert c.gates[3].qubits == (1,) and c.gates[3].clbits == (1,)


def test_comments_anywhere():
    c = parse("qreg q[1]; // a register\nx q[0]; // flip\n")
    assert len(c) == 1


@pytest.mark.parametrize("body, exc, gate", [
    ("qreg q[1]; foo q[0];", UnsupportedGateError, "foo"),
    ("qreg q[1]; creg c[1]; if(c==1) x q[0];", UnsupportedGateError, "if"),
    ("qreg q[1]; gate g a { x a; }", UnsupportedGateError, "gate"),
    ("qreg q[1]; reset q[0];", UnsupportedGateError, "reset"),
])
def test_unsupported(body, exc, gate):
    with pytest.raises(exc, match=gate):
        parse(body)


def test_unknown_include():
    with pytest.raises(UnsupportedGateError):
        parse_qasm('OPENQASM 2.0;\ninclude "other.inc";\n')


def test_syntax_error_has_position():
    with pytest.raises(QasmSyntaxError) as info:
        parse("qreg q[1];\nh q[0]")
    assert info.value.line == 4


def test_missing_header():
    with pytest.raises(QasmSyntaxError):
        parse_qasm("qreg q[1]; h q[0];")


def test_index_out_of_range():
    with pytest.raises(QasmIndexError, match="out of range"):
        parse("qreg q[2]; x q[2];")


def test_wrong_qubit_count():
    with pytest.raises(QasmSyntaxError, match="qubit argument"):
        parse("qreg q[2]; x q[0],q[1];")


def test_wrong_parameter_count():
    with pytest.raises(QasmSyntaxError):
        parse("qreg q[1]; rz q[0];")


def test_repeated_qubit():
    with pytest.raises(QasmSyntaxError):
        parse("qreg q[2]; cx q[1],q[1];")


def test_emit_contains_statement():
    assert "x q[0];" in emit_qasm(Circuit(1, (GateApp("x", (0,)),)))


def test_unreduced_angle_round_trip():
    c = Circuit(1, (GateApp("rz", (0,), (2 * math.pi,)),))
    assert parse_qasm(emit_qasm(c)).gates[0].angle == 2 * math.pi


@pytest.mark.parametrize("name", corpus.names(include_synthetic=True))
def test_corpus_round_trip(name):
    c = corpus.load(name)
    again = parse_qasm(emit_qasm(c))
    assert again == c
    assert again.register_names == c.register_names


@settings(max_examples=150, deadline=None)
@given(circuits(max_qubits=5, barriers=True, measure=True))
def test_round_trip_property(c):
    again = parse_qasm(emit_qasm(c))
    assert again.qubit_count == c.qubit_count
    assert len(again) == len(c)
    for a, b in zip(again.gates, c.gates):
        assert (a.kind, a.qubits, a.clbits) == (b.kind, b.qubits, b.clbits)
        assert a.params == b.params  # .17g is exact for doubles
