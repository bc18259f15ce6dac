"""VQE driver: ansatz circuits, energy objective, exact reference and run traces."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapacityError, SpecError
from .jw import MAX_MATRIX_QUBITS, PauliSum, pauli_to_matrix
from .optimizers import MinimizeResult, OptimizerConfig, minimize
from .qsim import Circuit, Gate, expectation, sample_energy, simulate

DEFAULT_THETA0 = 0.3
DEFAULT_HISTOGRAM_SHOTS = 10_000
DEGENERACY_TOL = 1e-8


@dataclass
class AnsatzSpec:
    """``fig1``: the fixed four-qubit chip circuit; ``layered``: U3(theta, 0, 0) + CNOT ladder.

    ``coupler_phi`` / ``coupler_lambda`` fix the non-trainable angles of the
    fig1 couplers; ``coupler_ratio`` and ``phases`` give their default values.
    """

    kind: str = "layered"
    n_qubits: int = 4
    layers: int = 2
    coupler_phi: float = math.pi / 2
    coupler_lambda: float = math.pi / 2
    coupler_ratio: float = 0.5
    phases: tuple = (math.pi / 2, 0.0, math.pi / 2, 0.0)

    def __post_init__(self):
        if self.kind not in ("fig1", "layered"):
            raise SpecError(f"unknown ansatz kind {self.kind!r}")
        if self.kind == "fig1" and self.n_qubits != 4:
            raise SpecError(f"fig1 ansatz needs 4 qubits, got {self.n_qubits}")
        if self.n_qubits < 1:
            raise SpecError("n_qubits must be positive")
        if self.layers < 0:
            raise SpecError("layers must be non-negative")

    @property
    def n_parameters(self) -> int:
        if self.kind == "fig1":
            return 8
        return self.n_qubits * (self.layers + 1)


def _fig1_circuit(spec: AnsatzSpec) -> Circuit:
    phi, lam = spec.coupler_phi, spec.coupler_lambda
    c = Circuit(4)

    def coupler(q, name):
        c.append(Gate.u3(q, name, phi, lam))

    c.append(Gate.h(0)).append(Gate.h(2))
    c.append(Gate.cnot(0, 1)).append(Gate.cnot(2, 3))
    # MZI on (q1, q2)
    coupler(1, "coupler_0")
    c.append(Gate.cnot(1, 2))
    c.append(Gate.rz(2, "phase_0"))
    c.append(Gate.cnot(1, 2))
    coupler(1, "coupler_1")
    c.append(Gate.rz(2, "phase_1"))
    # MZI on (q2, q3)
    coupler(2, "coupler_2")
    c.append(Gate.cnot(2, 3))
    c.append(Gate.rz(3, "phase_2"))
    c.append(Gate.cnot(2, 3))
    coupler(2, "coupler_3")
    c.append(Gate.rz(3, "phase_3"))
    theta = math.acos(spec.coupler_ratio)
    c.defaults = {f"coupler_{i}": theta for i in range(4)}
    c.defaults.update({f"phase_{i}": float(b) for i, b in enumerate(spec.phases)})
    return c


def _layered_circuit(spec: AnsatzSpec) -> Circuit:
    n = spec.n_qubits
    c = Circuit(n)
    k = 0
    for layer in range(spec.layers + 1):
        for q in range(n):
            c.append(Gate.u3(q, f"theta_{k}", 0.0, 0.0))
            k += 1
        if layer < spec.layers:
            for q in range(n - 1):
                c.append(Gate.cnot(q, q + 1))
    c.defaults = {name: 0.0 for name in c.parameters}
    return c


def build_ansatz(spec: AnsatzSpec) -> Circuit:
    if spec.kind == "fig1":
        return _fig1_circuit(spec)
    return _layered_circuit(spec)


def energy_objective(h: PauliSum, circuit: Circuit, theta, shots: int = 0, seed=0) -> float:
    """E(theta): exact expectation for ``shots == 0``, else a sampled mean."""
    psi = simulate(circuit, theta)
    if shots == 0:
        return expectation(psi, h)
    return sample_energy(psi, h, shots, seed).mean


@dataclass
class GroundTruth:
    energy: float
    state: np.ndarray
    ground_space: np.ndarray
    spectrum: np.ndarray

    @property
    def gap(self) -> float:
        higher = self.spectrum[self.spectrum > self.energy + DEGENERACY_TOL]
        return float(higher[0] - self.energy) if higher.size else math.inf

    def fidelity(self, psi: np.ndarray) -> float:
        """Weight of ``psi`` in the ground space (projector overlap)."""
        overlaps = self.ground_space.conj().T @ psi
        return float(min(1.0, np.sum(np.abs(overlaps) ** 2)))


def ground_truth(h: PauliSum) -> GroundTruth:
    if h.n_qubits > MAX_MATRIX_QUBITS:
        raise CapacityError(f"{h.n_qubits} qubits exceeds the eigensolver limit")
    evals, evecs = np.linalg.eigh(pauli_to_matrix(h))
    e0 = float(evals[0])
    mask = evals <= e0 + DEGENERACY_TOL
    psi0 = evecs[:, 0].copy()
    # fix the global phase: largest component real positive
    k = int(np.argmax(np.abs(psi0)))
    psi0 *= abs(psi0[k]) / psi0[k]
    return GroundTruth(e0, psi0, evecs[:, mask], evals)


@dataclass
class TraceRecord:
    iteration: int
    theta: np.ndarray
    energy: float
    fidelity: float


@dataclass
class VqeTrace:
    records: list
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray
    theta_opt: np.ndarray
    energy_opt: float
    fidelity_opt: float
    e0: float
    nfev: int
    converged: bool
    ansatz: AnsatzSpec
    optimizer: OptimizerConfig
    shots: int
    histogram_shots: int
    seed: int
    result: MinimizeResult = field(repr=False, default=None)

    def summary(self) -> dict:
        return {
            "e0": self.e0,
            "energy": self.energy_opt,
            "fidelity": self.fidelity_opt,
            "error": self.energy_opt - self.e0,
            "theta": self.theta_opt.tolist(),
            "iterations": len(self.records),
            "evaluations": self.nfev,
            "converged": self.converged,
            "ansatz": asdict(self.ansatz),
            "optimizer": asdict(self.optimizer),
            "shots": self.shots,
            "histogram_shots": self.histogram_shots,
            "seed": self.seed,
        }


def run_vqe(
    h: PauliSum,
    ansatz: AnsatzSpec | None = None,
    optimizer: OptimizerConfig | None = None,
    shots: int = 0,
    seed: int = 0,
    theta0=None,
    histogram_shots: int | None = None,
    histogram_bins: int = 40,
) -> VqeTrace:
    """Optimize the ansatz on ``h`` and record the per-iteration trace.

    ``shots`` selects the objective (0 = exact); the histogram pass at the
    optimum uses ``histogram_shots`` (``shots`` if sampled, else 10^4).
    """
    ansatz = ansatz or AnsatzSpec(n_qubits=h.n_qubits)
    optimizer = optimizer or OptimizerConfig(seed=seed)
    if ansatz.n_qubits != h.n_qubits:
        raise SpecError(f"ansatz has {ansatz.n_qubits} qubits, Hamiltonian has {h.n_qubits}")
    circuit = build_ansatz(ansatz)
    truth = ground_truth(h)
    if theta0 is None:
        theta0 = np.full(circuit.n_parameters, DEFAULT_THETA0)
    # distinct seeds per evaluation keep sampled objectives reproducible
    counter = [0]

    def objective(theta):
        counter[0] += 1
        return energy_objective(h, circuit, theta, shots, seed=(seed, counter[0]))

    res = minimize(objective, theta0, optimizer)
    records = []
    for rec in res.trace:
        psi = simulate(circuit, rec.theta)
        records.append(TraceRecord(rec.iteration, rec.theta, rec.energy, truth.fidelity(psi)))
    psi_opt = simulate(circuit, res.x)
    if histogram_shots is None:
        histogram_shots = shots if shots > 0 else DEFAULT_HISTOGRAM_SHOTS
    est = sample_energy(psi_opt, h, histogram_shots, seed=(seed, 0))
    counts, edges = np.histogram(est.samples, bins=histogram_bins)
    return VqeTrace(
        records=records,
        histogram_edges=edges,
        histogram_counts=counts,
        theta_opt=res.x,
        energy_opt=res.fun,
        fidelity_opt=truth.fidelity(psi_opt),
        e0=truth.energy,
        nfev=res.nfev,
        converged=res.converged,
        ansatz=ansatz,
        optimizer=optimizer,
        shots=shots,
        histogram_shots=histogram_shots,
        seed=seed,
        result=res,
    )
