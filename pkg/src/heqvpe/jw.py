"""Pauli algebra and the Jordan-Wigner mapping.

Pauli strings are plain strings over ``IXYZ`` with qubit 0 as the first
character.  Qubit k carries fermionic mode k, and an occupied mode is the
computational state |1> (Z eigenvalue -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping

import numpy as np

from .errors import BoundsError, CapacityError, NumericError
from .fermion import FermionOperator, build_hamiltonian
from .integrals import MolecularIntegrals, expand_to_spin_orbitals

PAULI_CUTOFF = 1e-12
MAX_MATRIX_QUBITS = 12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-qubit product table: (a, b) -> (phase, a*b)
_PRODUCT = {}
for _a in "IXYZ":
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)


def multiply_strings(a: str, b: str) -> tuple[complex, str]:
    phase = 1
    out = []
    for x, y in zip(a, b):
        ph, z = _PRODUCT[(x, y)]
        phase *= ph
        out.append(z)
    return phase, "".join(out)


@dataclass(frozen=True)
class PauliSum:
    """Weighted sum of Pauli strings; ``terms`` maps string -> complex coefficient."""

    n_qubits: int
    terms: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        clean = {}
        for s, c in self.terms.items():
            if len(s) != self.n_qubits or set(s) - set("IXYZ"):
                raise ValueError(f"invalid Pauli string {s!r} for {self.n_qubits} qubits")
            clean[s] = clean.get(s, 0) + complex(c)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def identity(cls, n_qubits, coeff=1.0):
        return cls(n_qubits, {"I" * n_qubits: coeff})

    @classmethod
    def single(cls, n_qubits, ops: Mapping[int, str], coeff=1.0):
        """Build ``coeff * P`` from a sparse ``{qubit: letter}`` mapping."""
        chars = ["I"] * n_qubits
        for q, letter in ops.items():
            chars[q] = letter
        return cls(n_qubits, {"".join(chars): coeff})

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def _check(self, other):
        if other.n_qubits != self.n_qubits:
            raise ValueError(f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        self._check(other)
        acc = dict(self.terms)
        for s, c in other.terms.items():
            acc[s] = acc.get(s, 0) + c
        return PauliSum(self.n_qubits, acc)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            self._check(other)
            acc = {}
            for sa, ca in self.terms.items():
                for sb, cb in other.terms.items():
                    ph, s = multiply_strings(sa, sb)
                    acc[s] = acc.get(s, 0) + ph * ca * cb
            return PauliSum(self.n_qubits, acc)
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum(self.n_qubits, {s: c * other for s, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def is_hermitian(self, tol=PAULI_CUTOFF):
        return all(abs(c.imag) < tol for c in self.terms.values())

    def real(self):
        """Drop imaginary parts (caller has checked hermiticity)."""
        return PauliSum(self.n_qubits, {s: c.real for s, c in self.terms.items()})

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "n_qubits": self.n_qubits,
            "terms": [
                {"coeff": [c.real, c.imag], "string": s} for s, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> PauliSum:
        terms = data["terms"] if isinstance(data, dict) else data
        if not terms and not isinstance(data, dict):
            raise ValueError("cannot infer qubit count from an empty term list")
        n = data.get("n_qubits") if isinstance(data, dict) else None
        if n is None:
            n = len(terms[0]["string"])
        acc = {}
        for t in terms:
            re_, im_ = t["coeff"]
            acc[t["string"]] = acc.get(t["string"], 0) + complex(re_, im_)
        return cls(int(n), acc)


def pauli_simplify(ps: PauliSum, cutoff: float = PAULI_CUTOFF) -> PauliSum:
    """Merge equal strings, drop |coeff| < cutoff, sort by string."""
    return PauliSum(
        ps.n_qubits, {s: c for s, c in sorted(ps.terms.items()) if abs(c) >= cutoff}
    )


def pauli_to_matrix(ps: PauliSum) -> np.ndarray:
    """Dense matrix as a sum of Kronecker products; qubit 0 is the least significant bit."""
    n = ps.n_qubits
    if n > MAX_MATRIX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the matrix limit of {MAX_MATRIX_QUBITS}")
    mat = np.zeros((1 << n, 1 << n), dtype=complex)
    for s, c in ps.terms.items():
        # kron puts its first factor on the most significant bit
        mat += c * reduce(np.kron, [PAULI_MATRICES[ch] for ch in reversed(s)])
    return mat


def jw_ladder(p: int, dagger: bool, n: int) -> PauliSum:
    """Jordan-Wigner image of a_p^dag (``dagger=True``) or a_p.

    a_p^dag -> Z_0 ... Z_{p-1} (X_p - iY_p)/2   (|0><1| -> |1><0| on qubit p)
    a_p     -> Z_0 ... Z_{p-1} (X_p + iY_p)/2
    """
    if not 0 <= p < n:
        raise BoundsError(f"mode {p} out of range for {n} modes")
    prefix = "Z" * p
    suffix = "I" * (n - p - 1)
    sign = -1 if dagger else 1
    return PauliSum(n, {prefix + "X" + suffix: 0.5, prefix + "Y" + suffix: 0.5j * sign})


def jw_transform(f: FermionOperator, cutoff: float = PAULI_CUTOFF) -> PauliSum:
    n = f.n_modes
    ladders = {}
    acc = PauliSum(n)
    identity = PauliSum.identity(n)
    for ops, coeff in f.terms.items():
        term = identity
        for p, dagger in ops:
            key = (p, dagger)
            if key not in ladders:
                ladders[key] = jw_ladder(p, dagger, n)
            term = term * ladders[key]
        acc = acc + term * coeff
    return pauli_simplify(acc, cutoff)


def qubit_hamiltonian(mi: MolecularIntegrals) -> PauliSum:
    """Integrals -> spin orbitals -> fermionic H -> JW, with real coefficients."""
    ps = jw_transform(build_hamiltonian(expand_to_spin_orbitals(mi)))
    if not ps.is_hermitian():
        raise NumericError("mapped Hamiltonian has complex coefficients")
    return ps.real()
