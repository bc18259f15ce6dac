"""Dense statevector simulator.

States are complex numpy arrays of length 2**n; qubit 0 is the least
significant bit of the basis index.  Gate set: H, CNOT, RZ and the
three-angle coupler unitary U3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import BindingError, NumericError, SpecError
from .jw import PauliSum

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
RNG_ALGORITHM = "numpy.random.PCG64"

_GATE_ARITY = {"H": 1, "CNOT": 2, "RZ": 1, "U3": 1}
_GATE_NPARAMS = {"H": 0, "CNOT": 0, "RZ": 1, "U3": 3}


def u3_matrix(theta, phi, lam):
    """Coupler unitary [[c, -e^{i lam} s], [e^{i phi} s, e^{i(phi+lam)} c]] with half-angle theta/2.

    The off-diagonal phase is e^{+i lam}; with e^{-i lam} the matrix is only
    unitary for lam in {0, pi}.
    """
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def rz_matrix(beta):
    return np.array([[np.exp(-0.5j * beta), 0], [0, np.exp(0.5j * beta)]], dtype=complex)


H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
# basis |control, target>: control is the high bit of the 4x4 block
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class Gate:
    """A gate on ``qubits``; CNOT qubits are ``(control, target)``.

    Parameters are floats (bound) or strings naming a circuit parameter.
    """

    kind: str
    qubits: tuple
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _GATE_ARITY:
            raise SpecError(f"unknown gate {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.qubits) != _GATE_ARITY[self.kind]:
            raise SpecError(f"{self.kind} acts on {_GATE_ARITY[self.kind]} qubit(s)")
        if len(self.params) != _GATE_NPARAMS[self.kind]:
            raise SpecError(f"{self.kind} takes {_GATE_NPARAMS[self.kind]} parameter(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise SpecError("control and target must differ")

    @classmethod
    def h(cls, q):
        return cls("H", (q,))

    @classmethod
    def cnot(cls, control, target):
        return cls("CNOT", (control, target))

    @classmethod
    def rz(cls, q, beta):
        return cls("RZ", (q,), (beta,))

    @classmethod
    def u3(cls, q, theta, phi, lam):
        return cls("U3", (q,), (theta, phi, lam))

    @classmethod
    def coupler(cls, q, ratio, phi, lam):
        """U3 with theta = arccos(ratio) for a coupling ratio in [0, 1]."""
        if not 0.0 <= ratio <= 1.0:
            raise SpecError(f"coupling ratio {ratio} outside [0, 1]")
        return cls.u3(q, math.acos(ratio), phi, lam)

    @property
    def is_bound(self):
        return not any(isinstance(p, str) for p in self.params)

    def bind(self, values: Mapping[str, float]) -> Gate:
        try:
            params = tuple(values[p] if isinstance(p, str) else p for p in self.params)
        except KeyError as exc:
            raise BindingError(f"unbound parameter {exc.args[0]!r}") from None
        return Gate(self.kind, self.qubits, params)

    def matrix(self) -> np.ndarray:
        if not self.is_bound:
            raise BindingError(f"{self.kind} gate has unbound parameters {self.params}")
        if self.kind == "H":
            return H_MATRIX
        if self.kind == "CNOT":
            return CNOT_MATRIX
        if self.kind == "RZ":
            return rz_matrix(*self.params)
        return u3_matrix(*self.params)


@dataclass
class Circuit:
    """Ordered gate list with named free parameters.

    ``parameters`` lists names in first-appearance order; that order defines
    the flat parameter vector accepted by :meth:`bind`.
    """

    n_qubits: int
    gates: list = field(default_factory=list)
    defaults: dict = field(default_factory=dict)

    def __post_init__(self):
        for g in self.gates:
            self._validate(g)

    def _validate(self, g: Gate):
        if any(q < 0 or q >= self.n_qubits for q in g.qubits):
            raise SpecError(f"gate {g.kind} on {g.qubits} outside {self.n_qubits} qubits")

    def append(self, gate: Gate):
        self._validate(gate)
        self.gates.append(gate)
        return self

    @property
    def parameters(self) -> list:
        names = []
        for g in self.gates:
            for p in g.params:
                if isinstance(p, str) and p not in names:
                    names.append(p)
        return names

    @property
    def n_parameters(self):
        return len(self.parameters)

    def bind(self, theta: Sequence[float] | Mapping[str, float] | None = None) -> list:
        """Return the list of bound gates."""
        names = self.parameters
        if theta is None:
            values = dict(self.defaults)
        elif isinstance(theta, Mapping):
            values = dict(theta)
        else:
            theta = np.asarray(theta, dtype=float).ravel()
            if len(theta) != len(names):
                raise BindingError(
                    f"circuit has {len(names)} parameters, got a vector of length {len(theta)}"
                )
            values = dict(zip(names, theta.tolist()))
        return [g.bind(values) for g in self.gates]


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def n_qubits_of(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.ndim != 1 or 1 << n != state.size:
        raise SpecError(f"state length {state.size} is not a power of two")
    return n


def apply_matrix(state: np.ndarray, mat: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to ``qubits`` (first listed = most significant in ``mat``)."""
    n = n_qubits_of(state)
    k = len(qubits)
    psi = state.reshape((2,) * n)
    # reshaped axis a holds qubit n-1-a
    axes = [n - 1 - q for q in qubits]
    op = mat.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    return apply_matrix(state, gate.matrix(), gate.qubits)


def simulate(circuit: Circuit, theta=None, initial: np.ndarray | None = None) -> np.ndarray:
    psi = zero_state(circuit.n_qubits) if initial is None else np.asarray(initial, dtype=complex)
    for g in circuit.bind(theta):
        psi = apply_gate(psi, g)
    return psi


def _pauli_action(s: str, n: int):
    """Return (flip mask, phase per basis index) with P|b> = phase[b] |b ^ flip>."""
    idx = np.arange(1 << n)
    flip = 0
    zmask = 0
    ny = 0
    for q, ch in enumerate(s):
        if ch in "XY":
            flip |= 1 << q
        if ch in "YZ":
            zmask |= 1 << q
        if ch == "Y":
            ny += 1
    # Y = i X Z per qubit, so P = i^ny X^flip Z^zmask
    bits = idx & zmask
    parity = np.zeros_like(idx)
    while zmask:
        parity ^= bits & 1
        bits >>= 1
        zmask >>= 1
    phase = (1j**ny) * (1 - 2 * parity)
    return flip, phase


def apply_pauli(state: np.ndarray, s: str) -> np.ndarray:
    n = n_qubits_of(state)
    flip, phase = _pauli_action(s, n)
    idx = np.arange(1 << n)
    out = np.empty_like(state)
    out[idx ^ flip] = phase * state
    return out


def expectation(state: np.ndarray, h: PauliSum) -> float:
    """<state|h|state>; raises NumericError when the result is not real."""
    n = n_qubits_of(state)
    if n != h.n_qubits:
        raise SpecError(f"state has {n} qubits, operator has {h.n_qubits}")
    total = 0j
    for s, c in h.terms.items():
        total += c * np.vdot(state, apply_pauli(state, s))
    if abs(total.imag) >= HERMITIAN_TOL:
        raise NumericError(f"expectation has imaginary part {total.imag:.3e}; operator not Hermitian")
    return float(total.real)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise SpecError("states have different sizes")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


@dataclass
class EnergyEstimate:
    mean: float
    stderr: float
    shots: int
    per_term_counts: dict
    samples: np.ndarray = field(repr=False, default=None)


_S_DAG = np.array([[1, 0], [0, -1j]], dtype=complex)


def _rotate_to_z(state: np.ndarray, s: str) -> np.ndarray:
    psi = state
    for q, ch in enumerate(s):
        if ch == "X":
            psi = apply_matrix(psi, H_MATRIX, [q])
        elif ch == "Y":
            psi = apply_matrix(psi, H_MATRIX @ _S_DAG, [q])
    return psi


def sample_energy(state: np.ndarray, h: PauliSum, shots: int, seed: int | None = 0) -> EnergyEstimate:
    """Shot-based estimate of <h>.

    Each Pauli term is measured separately: X qubits are rotated with H, Y
    qubits with S^dag then H, and ``shots`` bitstrings are drawn from the
    rotated distribution.  ``samples[i]`` pairs the i-th outcome of every
    term into one per-shot energy, so ``samples.mean() == mean``.
    """
    if shots < 1:
        raise SpecError("shots must be >= 1")
    n = n_qubits_of(state)
    if n != h.n_qubits:
        raise SpecError(f"state has {n} qubits, operator has {h.n_qubits}")
    if not h.is_hermitian(HERMITIAN_TOL):
        raise NumericError("sampled operator has complex coefficients")
    rng = np.random.Generator(np.random.PCG64(seed))
    samples = np.zeros(shots)
    variance = 0.0
    counts = {}
    for s, c in sorted(h.terms.items()):
        c = c.real
        support = 0
        for q, ch in enumerate(s):
            if ch != "I":
                support |= 1 << q
        if support == 0:
            samples += c
            counts[s] = {"+1": shots, "-1": 0}
            continue
        probs = np.abs(_rotate_to_z(state, s)) ** 2
        probs /= probs.sum()
        outcomes = rng.choice(1 << n, size=shots, p=probs)
        bits = outcomes & support
        parity = np.zeros(shots, dtype=np.int64)
        while support:
            parity ^= bits & 1
            bits >>= 1
            support >>= 1
        values = 1.0 - 2.0 * parity
        samples += c * values
        n_minus = int(parity.sum())
        counts[s] = {"+1": shots - n_minus, "-1": n_minus}
        if shots > 1:
            variance += c * c * values.var(ddof=1) / shots
    return EnergyEstimate(float(samples.mean()), math.sqrt(variance), shots, counts, samples)


def random_state(n_qubits, rng) -> np.ndarray:
    psi = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return psi / np.linalg.norm(psi)
