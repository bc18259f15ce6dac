"""Second-quantized fermionic operators.

A ladder string is a tuple of ``(mode, dagger)`` pairs read left to right, so
``((0, True), (1, False))`` is a_0^dag a_1.  Operators are immutable mappings
from ladder strings to complex coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import BoundsError, CapacityError
from .integrals import SpinOrbitalIntegrals

COEFF_CUTOFF = 1e-14
MAX_MATRIX_MODES = 12

RAISE = True
LOWER = False


@dataclass(frozen=True)
class FermionTerm:
    coefficient: complex
    ladder_ops: tuple = ()


@dataclass(frozen=True)
class FermionOperator:
    """Weighted sum of ladder strings over ``n_modes`` fermionic modes."""

    n_modes: int
    terms: Mapping[tuple, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        clean = {}
        for ops, coeff in self.terms.items():
            ops = tuple((int(p), bool(d)) for p, d in ops)
            for p, _ in ops:
                if not 0 <= p < self.n_modes:
                    raise BoundsError(f"mode {p} out of range for {self.n_modes} modes")
            clean[ops] = clean.get(ops, 0) + complex(coeff)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, n_modes: int, terms: Iterable[FermionTerm]) -> FermionOperator:
        acc = {}
        for t in terms:
            key = tuple(t.ladder_ops)
            acc[key] = acc.get(key, 0) + complex(t.coefficient)
        return cls(n_modes, acc)

    @classmethod
    def ladder(cls, n_modes, mode, dagger, coeff=1.0):
        return cls(n_modes, {((mode, dagger),): coeff})

    @classmethod
    def identity(cls, n_modes, coeff=1.0):
        return cls(n_modes, {(): coeff})

    def iter_terms(self):
        for ops, coeff in self.terms.items():
            yield FermionTerm(coeff, ops)

    def __len__(self):
        return len(self.terms)

    def _check(self, other):
        if other.n_modes != self.n_modes:
            raise ValueError(f"mode counts differ: {self.n_modes} vs {other.n_modes}")

    def __add__(self, other):
        if not isinstance(other, FermionOperator):
            return NotImplemented
        self._check(other)
        acc = dict(self.terms)
        for ops, c in other.terms.items():
            acc[ops] = acc.get(ops, 0) + c
        return FermionOperator(self.n_modes, acc)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            self._check(other)
            acc = {}
            for (o1, c1), (o2, c2) in itertools.product(self.terms.items(), other.terms.items()):
                key = o1 + o2
                acc[key] = acc.get(key, 0) + c1 * c2
            return FermionOperator(self.n_modes, acc)
        if isinstance(other, (int, float, complex, np.number)):
            return FermionOperator(self.n_modes, {k: c * other for k, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def dagger(self):
        return FermionOperator(
            self.n_modes,
            {tuple((p, not d) for p, d in reversed(ops)): np.conj(c) for ops, c in self.terms.items()},
        )


def _normal_order_term(ops, coeff):
    """Expand one ladder string into canonical strings.

    Canonical form puts raises before lowers, each group in ascending mode
    order. Swapping a_p past a_p^dag contributes the anticommutator term;
    repeated identical operators annihilate the term.
    """
    out = []
    stack = [(list(ops), coeff)]
    while stack:
        seq, c = stack.pop()
        swapped = False
        for i in range(len(seq) - 1):
            (p, dp), (q, dq) = seq[i], seq[i + 1]
            # key: raises first (ascending), lowers after (ascending)
            ki = (0 if dp else 1, p)
            kj = (0 if dq else 1, q)
            if ki == kj:
                seq = None
                break
            if ki > kj:
                swapped_seq = seq[:i] + [seq[i + 1], seq[i]] + seq[i + 2:]
                if p == q and not dp and dq:
                    # a_p a_p^dag = 1 - a_p^dag a_p
                    stack.append((seq[:i] + seq[i + 2:], c))
                stack.append((swapped_seq, -c))
                swapped = True
                break
        if seq is None:
            continue
        if not swapped:
            out.append((tuple(seq), c))
    return out


def simplify(f: FermionOperator, cutoff: float = COEFF_CUTOFF) -> FermionOperator:
    """Canonicalize ladder strings, merge equal ones and drop tiny coefficients."""
    acc = {}
    for ops, c in f.terms.items():
        for key, ck in _normal_order_term(ops, c):
            acc[key] = acc.get(key, 0) + ck
    ordered = sorted(
        ((k, c) for k, c in acc.items() if abs(c) >= cutoff),
        key=lambda kc: (len(kc[0]), [(0 if d else 1, p) for p, d in kc[0]]),
    )
    return FermionOperator(f.n_modes, dict(ordered))


def number_operator(n_modes: int, mode: int | None = None) -> FermionOperator:
    modes = range(n_modes) if mode is None else [mode]
    return FermionOperator(n_modes, {((p, RAISE), (p, LOWER)): 1.0 for p in modes})


def build_hamiltonian(soi: SpinOrbitalIntegrals, cutoff: float = 0.0) -> FermionOperator:
    """Molecular Hamiltonian over spin orbitals.

    H = sum_pq h_pq a_p^dag a_q + 1/2 sum_pqrs <pq|rs> a_p^dag a_q^dag a_s a_r + e_core

    With physicist-ordered integrals the annihilators act as ``a_s a_r`` so
    that the direct term <pq|pq> enters as +n_p n_q (repulsive).
    """
    n = soi.n_spin_orbitals
    terms = {}
    if soi.e_core != 0:
        terms[()] = complex(soi.e_core)
    for p, q in itertools.product(range(n), repeat=2):
        c = soi.h[p, q]
        if abs(c) > cutoff:
            terms[((p, RAISE), (q, LOWER))] = complex(c)
    for p, q, r, s in itertools.product(range(n), repeat=4):
        c = soi.v[p, q, r, s]
        if abs(c) > cutoff and p != q and r != s:
            terms[((p, RAISE), (q, RAISE), (s, LOWER), (r, LOWER))] = 0.5 * complex(c)
    return FermionOperator(n, terms)


def _apply_string(ops, basis: np.ndarray):
    """Apply a ladder string to occupation bitmasks; returns (targets, signs)."""
    state = basis.copy()
    sign = np.ones(len(basis), dtype=np.int64)
    alive = np.ones(len(basis), dtype=bool)
    for p, dagger in reversed(ops):
        bit = 1 << p
        occupied = (state & bit) != 0
        alive &= ~occupied if dagger else occupied
        below = state & (bit - 1)
        parity = np.zeros(len(basis), dtype=np.int64)
        for k in range(p):
            parity ^= (below >> k) & 1
        sign *= 1 - 2 * parity
        state = state ^ bit
    return state, sign, alive


def fermion_to_matrix(f: FermionOperator) -> np.ndarray:
    """Dense matrix in the occupation-number basis (mode 0 = least significant bit).

    Built by acting with each ladder string on every basis determinant,
    carrying the sign (-1)^(number of occupied modes below p); independent of
    any qubit mapping.
    """
    n = f.n_modes
    if n > MAX_MATRIX_MODES:
        raise CapacityError(f"{n} modes exceeds the matrix limit of {MAX_MATRIX_MODES}")
    dim = 1 << n
    basis = np.arange(dim, dtype=np.int64)
    mat = np.zeros((dim, dim), dtype=complex)
    for ops, coeff in f.terms.items():
        target, sign, alive = _apply_string(ops, basis)
        np.add.at(mat, (target[alive], basis[alive]), coeff * sign[alive])
    return mat
