from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from conftest import circuits, random_circuit
from phasecloak import corpus
from phasecloak.qasm import Circuit, GateApp
from phasecloak.sim import (CountsDistribution, NoiseSpec, apply_gate, exact_distribution,
                            sample_counts, statevector, unitary, zero_state)


def g(kind, *qubits, angle=None):
    return GateApp(kind, qubits, () if angle is None else (angle,))


def close_up_to_phase(a, b, tol=1e-12):
    k = np.vdot(b, a)
    return abs(abs(k) - 1) < tol and np.allclose(a, k * b, atol=tol)


def test_rz_zero_is_identity():
    psi = np.array([0.6, 0.8j])
    assert np.array_equal(apply_gate(psi, g("rz", 0, angle=0.0)), psi)


def test_rz_matrix_convention():
    psi = np.array([1, 1]) / math.sqrt(2)
    out = apply_gate(psi, g("rz", 0, angle=0.8))
    assert np.allclose(out, psi * np.array([np.exp(-0.4j), np.exp(0.4j)]))


def test_h_rz_pi_h_flips():
    c = Circuit(1, (g("h", 0), g("rz", 0, angle=math.pi), g("h", 0)))
    assert close_up_to_phase(statevector(c), np.array([0, 1]))


def test_hadamard_on_zero():
    assert np.allclose(statevector(Circuit(1, (g("h", 0),))), [1 / math.sqrt(2)] * 2)


def test_qubit_zero_is_least_significant():
    psi = statevector(Circuit(3, (g("x", 0),)))
    assert psi[1] == 1
    psi = statevector(Circuit(2, (g("x", 0), g("cx", 0, 1))))
    assert psi[3] == 1
    psi = statevector(Circuit(2, (g("x", 1), g("cx", 0, 1))))
    assert psi[2] == 1


def test_bell_state():
    psi = statevector(Circuit(2, (g("h", 0), g("cx", 0, 1))))
    assert np.allclose(psi, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)])


def test_index_error():
    with pytest.raises(IndexError):
        apply_gate(zero_state(1), GateApp("x", (1,)))


def test_size_limit():
    with pytest.raises(ValueError):
        zero_state(21)
    with pytest.raises(ValueError):
        unitary(Circuit(11))


def test_unitary_basics():
    assert np.array_equal(unitary(Circuit(2)), np.eye(4))
    assert np.allclose(unitary(Circuit(1, (g("h", 0), g("h", 0)))), np.eye(2), atol=1e-12)


def test_unitary_matches_statevector_columns(rng):
    c = random_circuit(rng, 3, 30)
    u = unitary(c)
    assert np.allclose(u[:, 0], statevector(c))
    assert np.linalg.norm(u.conj().T @ u - np.eye(8)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(circuits(max_qubits=5))
def test_norm_preserved(c):
    psi = zero_state(c.qubit_count)
    for gate in c.gates:
        psi = apply_gate(psi, gate)
        assert abs(np.linalg.norm(psi) - 1) < 1e-9


def test_empty_distribution():
    assert exact_distribution(Circuit(2)).tolist() == [1.0, 0.0, 0.0, 0.0]


def test_hadamard_distribution():
    assert np.allclose(exact_distribution(Circuit(1, (g("h", 0),))), [0.5, 0.5])


def test_wstate_distribution():
    p = exact_distribution(corpus.load("wstate_n3"))
    for i in range(8):
        expected = 1 / 3 if i in (1, 2, 4) else 0.0
        assert abs(p[i] - expected) < 1e-12


def test_distribution_sums_to_one():
    for name in corpus.names(include_synthetic=True):
        assert abs(exact_distribution(corpus.load(name)).sum() - 1) < 1e-12


def test_marginal_over_measured_qubits():
    meas = (GateApp("measure", (2,), clbits=(0,)), GateApp("measure", (0,), clbits=(1,)))
    c = Circuit(3, (g("x", 2), g("h", 1)) + meas)
    # bit 0 <- qubit 2 (=1), bit 1 <- qubit 0 (=0)
    assert exact_distribution(c).tolist() == [0.0, 1.0, 0.0, 0.0]


def test_deterministic_counts():
    c = Circuit(1, (g("x", 0),))
    assert sample_counts(c, 1000).counts == {"1": 1000}


def test_hadamard_counts_binomial():
    n = 100_000
    counts = sample_counts(Circuit(1, (g("h", 0),)), n, rng_seed=1).counts
    assert abs(counts["0"] - n / 2) < 3 * math.sqrt(n / 4)


@pytest.mark.parametrize("name", corpus.BENCHMARKS)
def test_chi_square_goodness_of_fit(name):
    c = corpus.load(name)
    p = exact_distribution(c)
    n = 100_000
    counts = sample_counts(c, n, rng_seed=11)
    obs = counts.probabilities() * n
    support = p > 0
    assert obs[~support].sum() == 0
    if support.sum() > 1:
        assert chisquare(obs[support], p[support] * n).pvalue > 0.001


def test_sampling_is_seeded():
    c = corpus.load("basis_change_n3")
    assert sample_counts(c, 500, 4).counts == sample_counts(c, 500, 4).counts
    noise = NoiseSpec(0.05)
    assert sample_counts(c, 200, 4, noise).counts == sample_counts(c, 200, 4, noise).counts
    assert sample_counts(c, 500, 4).counts != sample_counts(c, 500, 5).counts


def test_noisy_flip_rate():
    p, n = 0.01, 100_000
    counts = sample_counts(Circuit(1, (g("x", 0),)), n, rng_seed=5, noise=NoiseSpec(p))
    rate = 2 * p / 3
    observed = counts.counts.get("0", 0) / n
    assert 0 < observed
    assert abs(observed - rate) < 3 * math.sqrt(rate * (1 - rate) / n)


def test_virtual_phase_exempts_phase_gates():
    c = Circuit(1, (g("x", 0),) + (g("rz", 0, angle=0.1),) * 20)
    quiet = sample_counts(c, 2000, 2, NoiseSpec(0.5, virtual_phase=True))
    loud = sample_counts(c, 2000, 2, NoiseSpec(0.5, virtual_phase=False))
    assert quiet.counts.get("0", 0) < loud.counts.get("0", 0)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(1.5)


def test_shots_validation():
    with pytest.raises(ValueError):
        sample_counts(Circuit(1), 0)


def test_counts_json_round_trip(tmp_path):
    counts = sample_counts(corpus.load("wstate_n3"), 300, 3)
    path = tmp_path / "c.json"
    counts.dump(path)
    assert CountsDistribution.load(path) == counts


def test_counts_validation():
    with pytest.raises(ValueError):
        CountsDistribution({"0": 3}, 4, 1)
    with pytest.raises(ValueError):
        CountsDistribution({"01": 4}, 4, 1)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_phase_gates_inert_on_classical_circuits(data):
    n = data.draw(st.integers(1, 4))
    base = data.draw(circuits(min_qubits=n, max_qubits=n, kinds=["x", "cx", "ccx", "swap"]))
    p = exact_distribution(base)
    assert sorted(p.tolist()).count(1.0) == 1
    gates = list(base.gates)
    for _ in range(data.draw(st.integers(1, 8))):
        pos = data.draw(st.integers(0, len(gates)))
        kind = data.draw(st.sampled_from(["rz", "p", "s", "sdg", "t", "tdg"]))
        angle = (data.draw(st.floats(-10, 10)),) if kind in ("rz", "p") else ()
        gates.insert(pos, GateApp(kind, (data.draw(st.integers(0, n - 1)),), angle))
    assert np.array_equal(exact_distribution(base.with_gates(gates)), p)
