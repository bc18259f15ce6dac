import math

import numpy as np
import pytest

from heqvpe.errors import BindingError, NumericError, SpecError
from heqvpe.jw import PauliSum, pauli_to_matrix
from heqvpe.qsim import (
    CNOT_MATRIX,
    H_MATRIX,
    Circuit,
    Gate,
    apply_gate,
    basis_state,
    expectation,
    fidelity,
    random_state,
    rz_matrix,
    sample_energy,
    simulate,
    u3_matrix,
    zero_state,
)

S2 = 1 / math.sqrt(2)


def residual(m):
    return np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))


@pytest.mark.parametrize(
    "gate",
    [Gate.h(0), Gate.cnot(0, 1), Gate.rz(0, 0.37), Gate.u3(0, 1.1, -0.4, 2.3), Gate.coupler(0, 0.3, 0.2, 0.1)],
)
def test_gates_unitary(gate):
    assert residual(gate.matrix()) < 1e-12


def test_u3_closed_form(rng):
    for _ in range(20):
        t, p, l = rng.uniform(-2 * np.pi, 2 * np.pi, size=3)
        c, s = math.cos(t / 2), math.sin(t / 2)
        expected = np.array([[c, -np.exp(1j * l) * s], [np.exp(1j * p) * s, np.exp(1j * (p + l)) * c]])
        assert np.array_equal(u3_matrix(t, p, l), expected)


def test_u3_off_diagonal_phase_sign():
    """With -e^{-i lam} in the top-right entry the matrix stops being unitary."""
    t, p, l = 1.0, math.pi / 2, math.pi / 2
    c, s = math.cos(t / 2), math.sin(t / 2)
    literal = np.array([[c, -np.exp(-1j * l) * s], [np.exp(1j * p) * s, np.exp(1j * (p + l)) * c]])
    assert residual(literal) > 0.1
    assert residual(u3_matrix(t, p, l)) < 1e-15
    # the two forms coincide when lam is 0 or pi
    for lam in (0.0, math.pi):
        lit = np.array([[c, -np.exp(-1j * lam) * s], [np.exp(1j * p) * s, np.exp(1j * (p + lam)) * c]])
        assert np.allclose(lit, u3_matrix(t, p, lam), atol=1e-15)


def test_hadamard_on_zero():
    out = apply_gate(zero_state(1), Gate.h(0))
    assert np.allclose(out, [S2, S2], atol=0, rtol=1e-15)


def test_rz_pi_on_one():
    out = apply_gate(basis_state(1, 1), Gate.rz(0, math.pi))
    assert abs(out[1] - 1j) < 1e-15 and out[0] == 0
    assert abs(rz_matrix(math.pi)[0, 0] + 1j) < 1e-15


def test_u3_zero_theta_is_diagonal():
    m = u3_matrix(0.0, 0.7, 0.4)
    assert m[0, 0] == 1 and m[1, 0] == 0 and m[0, 1] == 0
    assert abs(m[1, 1] - np.exp(1.1j)) < 1e-15
    assert np.array_equal(apply_gate(zero_state(1), Gate.u3(0, 0.0, 0.7, 0.4)), zero_state(1))


def test_bell_state():
    psi = simulate(Circuit(2, [Gate.h(0), Gate.cnot(0, 1)]))
    assert np.allclose(psi, [S2, 0, 0, S2], atol=1e-16)


def test_cnot_control_target_convention():
    # control 0 set, target 1 clear: index 1 -> index 3
    assert np.array_equal(apply_gate(basis_state(2, 1), Gate.cnot(0, 1)), basis_state(2, 3))
    assert np.array_equal(apply_gate(basis_state(2, 2), Gate.cnot(0, 1)), basis_state(2, 2))
    assert np.array_equal(CNOT_MATRIX @ CNOT_MATRIX, np.eye(4))


def test_gate_on_middle_qubit_matches_kron(rng):
    psi = random_state(3, rng)
    u = u3_matrix(0.3, 0.5, 0.7)
    full = np.kron(np.eye(2), np.kron(u, np.eye(2)))
    assert np.allclose(apply_gate(psi, Gate.u3(1, 0.3, 0.5, 0.7)), full @ psi, atol=1e-14)


def test_norm_preserved_over_long_circuit(rng):
    gates = []
    for _ in range(1000):
        k = rng.integers(4)
        q = int(rng.integers(4))
        if k == 0:
            gates.append(Gate.h(q))
        elif k == 1:
            gates.append(Gate.cnot(q, (q + 1 + int(rng.integers(3))) % 4))
        elif k == 2:
            gates.append(Gate.rz(q, float(rng.uniform(-7, 7))))
        else:
            gates.append(Gate.u3(q, *map(float, rng.uniform(-7, 7, size=3))))
    psi = simulate(Circuit(4, gates))
    assert abs(np.linalg.norm(psi) - 1) < 1e-9


def test_unbound_parameter():
    with pytest.raises(BindingError):
        Gate.rz(0, "beta").matrix()
    c = Circuit(1, [Gate.rz(0, "beta")])
    with pytest.raises(BindingError):
        simulate(c, [0.1, 0.2])
    with pytest.raises(BindingError):
        simulate(c, {"gamma": 0.1})


def test_parameter_order_and_defaults():
    c = Circuit(2, [Gate.rz(0, "b"), Gate.u3(1, "a", 0.0, 0.0), Gate.rz(1, "b")], defaults={"a": 0.0, "b": 0.0})
    assert c.parameters == ["b", "a"]
    assert np.array_equal(simulate(c), zero_state(2))


def test_invalid_gate_specs():
    with pytest.raises(SpecError):
        Gate.cnot(1, 1)
    with pytest.raises(SpecError):
        Gate("T", (0,))
    with pytest.raises(SpecError):
        Gate.coupler(0, 1.5, 0.0, 0.0)


def test_expectation_basic():
    assert expectation(zero_state(1), PauliSum(1, {"Z": 1.0})) == 1.0
    bell = simulate(Circuit(2, [Gate.h(0), Gate.cnot(0, 1)]))
    assert abs(expectation(bell, PauliSum(2, {"ZZ": 1.0})) - 1) < 1e-15
    assert abs(expectation(bell, PauliSum(2, {"ZI": 1.0}))) < 1e-15


def test_expectation_matches_dense(rng):
    for n in (1, 2, 3, 4):
        for _ in range(10):
            psi = random_state(n, rng)
            strings = ["".join(rng.choice(list("IXYZ"), size=n)) for _ in range(6)]
            h = PauliSum(n, {s: float(rng.normal()) for s in strings})
            dense = np.vdot(psi, pauli_to_matrix(h) @ psi).real
            assert abs(expectation(psi, h) - dense) < 1e-11


def test_expectation_non_hermitian():
    psi = simulate(Circuit(1, [Gate.h(0)]))
    with pytest.raises(NumericError):
        expectation(psi, PauliSum(1, {"X": 1j}))


def test_expectation_qubit_mismatch():
    with pytest.raises(SpecError):
        expectation(zero_state(2), PauliSum(1, {"Z": 1.0}))


def test_sample_eigenstate_has_zero_stderr():
    est = sample_energy(zero_state(2), PauliSum(2, {"ZZ": 0.5, "II": -1.0}), shots=100, seed=3)
    assert est.mean == -0.5 and est.stderr == 0.0


def test_sample_reproducible():
    psi = simulate(Circuit(1, [Gate.h(0)]))
    h = PauliSum(1, {"Z": 1.0})
    a = sample_energy(psi, h, 1000, seed=42)
    b = sample_energy(psi, h, 1000, seed=42)
    c = sample_energy(psi, h, 1000, seed=43)
    assert a.per_term_counts == b.per_term_counts
    assert np.array_equal(a.samples, b.samples)
    assert a.per_term_counts != c.per_term_counts


def test_sample_y_rotation():
    # S H |0> is the +1 eigenstate of Y
    psi = simulate(Circuit(1, [Gate.h(0), Gate.rz(0, math.pi / 2)]))
    est = sample_energy(psi, PauliSum(1, {"Y": 1.0}), 200, seed=0)
    assert est.mean == 1.0


def test_sample_mean_converges(rng):
    """Mean within 3 stderr of the exact value in at least 99% of trials."""
    psi = random_state(2, rng)
    h = PauliSum(2, {"ZI": 0.7, "XX": -0.4, "YZ": 0.3, "II": 0.1})
    exact = expectation(psi, h)
    hits = sum(abs(sample_energy(psi, h, 2000, seed=s).mean - exact) < 3 * 0.03 for s in range(200))
    assert hits >= 198


def test_sample_rejects_bad_shots():
    with pytest.raises(SpecError):
        sample_energy(zero_state(1), PauliSum(1, {"Z": 1.0}), 0)


def test_fidelity_properties(rng):
    a, b = random_state(3, rng), random_state(3, rng)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-15)
    assert 0 <= fidelity(a, b) <= 1
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-15)
    assert fidelity(a, np.exp(0.4j) * a) == pytest.approx(1.0, abs=1e-15)
    assert fidelity(basis_state(1, 0), basis_state(1, 1)) == 0.0
    assert np.allclose(H_MATRIX @ H_MATRIX, np.eye(2))
