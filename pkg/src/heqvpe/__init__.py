"""He ground-state VQE on a four-qubit photonic-style ansatz, plus a mode-level chip model."""

__version__ = "0.1.0"

from .fermion import FermionOperator, build_hamiltonian, fermion_to_matrix, simplify
from .integrals import (
    MolecularIntegrals,
    SpinOrbitalIntegrals,
    expand_to_spin_orbitals,
    load_bundled,
    load_integrals,
)
from .jw import PauliSum, jw_ladder, jw_transform, pauli_simplify, pauli_to_matrix, qubit_hamiltonian
from .optimizers import OptimizerConfig, minimize
from .photonic import (
    compose_interferometer,
    coupler_unitary,
    fock_submatrix,
    permanent_naive,
    permanent_ryser,
    transition_distribution,
    transition_probability,
)
from .qsim import Circuit, Gate, apply_gate, expectation, fidelity, sample_energy, simulate
from .vqe import AnsatzSpec, build_ansatz, energy_objective, ground_truth, run_vqe
