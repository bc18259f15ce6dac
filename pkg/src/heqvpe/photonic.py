"""Mode-level model of a linear-optical chip.

Interferometers are m x m unitaries acting on creation operators,
``a_j^dag -> sum_i U[i, j] a_i^dag``.  Multi-photon transition amplitudes are
permanents of submatrices (rows = output modes, columns = input modes).
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .errors import BoundsError, CapacityError, DomainError, NumericError
from .qsim import u3_matrix

UNITARY_TOL = 1e-10
NAIVE_MAX_N = 9
MAX_DISTRIBUTION_SIZE = 10**6
# Subset range split into this many chunks once n is large enough; fixed so
# the summation order never depends on the worker count.
_RYSER_CHUNK_BITS = 6
_RYSER_PARALLEL_MIN_N = 14


def coupler_unitary(ratio: float, phi: float, lam: float) -> np.ndarray:
    """Directional coupler with theta = arccos(ratio)."""
    if not 0.0 <= ratio <= 1.0:
        raise DomainError(f"coupling ratio {ratio} outside [0, 1]")
    return u3_matrix(math.acos(ratio), phi, lam)


def coupler_unitary_from_angle(theta: float, phi: float, lam: float) -> np.ndarray:
    """Same element parameterized by the raw rotation angle (theta = pi/2 is 50:50)."""
    return u3_matrix(theta, phi, lam)


def phase_shifter(beta: float) -> complex:
    return complex(np.exp(1j * beta))


@dataclass(frozen=True)
class ElementPlacement:
    """A coupler on an adjacent mode pair or a phase shifter on one mode.

    ``params`` is ``(ratio, phi, lam)`` for a coupler and ``(beta,)`` for a phase.
    Pass ``theta=`` instead of a ratio via ``kind="coupler_angle"``.
    """

    kind: str
    modes: tuple
    params: tuple

    @classmethod
    def coupler(cls, modes, ratio, phi=0.0, lam=0.0):
        return cls("coupler", tuple(modes), (ratio, phi, lam))

    @classmethod
    def coupler_angle(cls, modes, theta, phi=0.0, lam=0.0):
        return cls("coupler_angle", tuple(modes), (theta, phi, lam))

    @classmethod
    def phase(cls, mode, beta):
        return cls("phase", (mode,), (beta,))

    def block(self) -> np.ndarray:
        if self.kind == "coupler":
            return coupler_unitary(*self.params)
        if self.kind == "coupler_angle":
            return coupler_unitary_from_angle(*self.params)
        if self.kind == "phase":
            return np.array([[phase_shifter(self.params[0])]])
        raise DomainError(f"unknown element kind {self.kind!r}")


def compose_interferometer(placements: Sequence[ElementPlacement], m: int) -> np.ndarray:
    """Product of embedded elements; later elements multiply on the left."""
    u = np.eye(m, dtype=complex)
    for el in placements:
        modes = el.modes
        if any(not 0 <= k < m for k in modes):
            raise BoundsError(f"element {el.kind} on modes {modes} outside {m} modes")
        if el.kind.startswith("coupler"):
            if len(modes) != 2 or abs(modes[0] - modes[1]) != 1:
                raise BoundsError(f"coupler needs an adjacent mode pair, got {modes}")
        full = np.eye(m, dtype=complex)
        full[np.ix_(modes, modes)] = el.block()
        u = full @ u
    return u


def fig1_placements(
    ratios=(0.5, 0.5, 0.5, 0.5),
    phases=(math.pi / 2, 0.0, math.pi / 2, 0.0),
    phi=math.pi / 2,
    lam=math.pi / 2,
):
    """Optical-mode reading of the four-qubit chip layout.

    Each MZI block on qubits (a, b) becomes coupler(a, b), phase on b,
    coupler(a, b), phase on b, in the circuit's order.  Hadamard and CNOT
    gates have no passive single-mode counterpart and are left out.
    """
    r = ratios
    p = phases
    return [
        ElementPlacement.coupler((1, 2), r[0], phi, lam),
        ElementPlacement.phase(2, p[0]),
        ElementPlacement.coupler((1, 2), r[1], phi, lam),
        ElementPlacement.phase(2, p[1]),
        ElementPlacement.coupler((2, 3), r[2], phi, lam),
        ElementPlacement.phase(3, p[2]),
        ElementPlacement.coupler((2, 3), r[3], phi, lam),
        ElementPlacement.phase(3, p[3]),
    ]


def fig1_unitary(**kwargs) -> np.ndarray:
    return compose_interferometer(fig1_placements(**kwargs), 4)


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def check_unitary(u: np.ndarray, tol=UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DomainError(f"unitary must be square, got shape {u.shape}")
    res = unitarity_residual(u)
    if res > tol:
        raise NumericError(f"matrix is not unitary: max |U^dag U - I| = {res:.3e}")
    return u


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got shape {a.shape}")
    return a


def permanent_naive(a) -> complex:
    """Sum over all n! permutations of prod_i a[i, sigma(i)]."""
    a = _square(a)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise CapacityError(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    if n == 0:
        return 1 + 0j
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    return complex(np.prod(a[np.arange(n), perms], axis=1).sum())


@numba.njit(cache=True, nogil=True)
def _ryser_chunk(a, start, stop):
    """Gray-code sweep over subset codes ``start <= k < stop`` (k >= 1).

    Returns the signed sum of prod_i rowsum_i(S_k) with S_k = gray(k), using
    Neumaier-compensated accumulation.
    """
    n = a.shape[0]
    g = (start - 1) ^ ((start - 1) >> 1)
    rows = np.zeros(n, dtype=np.complex128)
    for j in range(n):
        if (g >> j) & 1:
            for i in range(n):
                rows[i] += a[i, j]
    popcount = 0
    t = g
    while t:
        popcount += t & 1
        t >>= 1
    sr = 0.0
    si = 0.0
    cr = 0.0
    ci = 0.0
    for k in range(start, stop):
        # bit flipped between gray(k-1) and gray(k) = trailing zeros of k
        j = 0
        t = k
        while (t & 1) == 0:
            t >>= 1
            j += 1
        if (g >> j) & 1:
            for i in range(n):
                rows[i] -= a[i, j]
            popcount -= 1
        else:
            for i in range(n):
                rows[i] += a[i, j]
            popcount += 1
        g ^= 1 << j
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= rows[i]
        if popcount & 1:
            prod = -prod
        x = prod.real
        s = sr + x
        if abs(sr) >= abs(x):
            cr += (sr - s) + x
        else:
            cr += (x - s) + sr
        sr = s
        x = prod.imag
        s = si + x
        if abs(si) >= abs(x):
            ci += (si - s) + x
        else:
            ci += (x - s) + si
        si = s
    return sr, cr, si, ci


def worker_count() -> int:
    cap = os.environ.get("HEQVPE_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


def permanent_ryser(a, workers: int | None = None) -> complex:
    """Ryser inclusion-exclusion with Gray-code subset enumeration.

    perm(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij, each step
    updating the row sums with one column.  The empty matrix has permanent 1.
    """
    a = _square(a)
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    if n > 62:
        raise CapacityError(f"n={n} is beyond any practical Ryser evaluation")
    total = 1 << n
    if n < _RYSER_PARALLEL_MIN_N:
        bounds = [(1, total)]
    else:
        step = total >> _RYSER_CHUNK_BITS
        bounds = [(max(1, c * step), (c + 1) * step) for c in range(1 << _RYSER_CHUNK_BITS)]
    a = np.ascontiguousarray(a)
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(bounds) == 1:
        parts = [_ryser_chunk(a, lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _ryser_chunk(a, b[0], b[1]), bounds))
    # fixed-order reduction of (sum, compensation) pairs
    vals_r = []
    vals_i = []
    for sr, cr, si, ci in parts:
        vals_r.extend((sr, cr))
        vals_i.extend((si, ci))
    value = complex(math.fsum(vals_r), math.fsum(vals_i))
    return value if n % 2 == 0 else -value


def permanent(a, algo: str = "ryser") -> complex:
    if algo == "ryser":
        return permanent_ryser(a)
    if algo == "naive":
        return permanent_naive(a)
    raise ValueError(f"unknown permanent algorithm {algo!r}")


def _check_states(u, inp, out):
    inp = tuple(int(x) for x in inp)
    out = tuple(int(x) for x in out)
    m = u.shape[0]
    if len(inp) != m or len(out) != m:
        raise DomainError(f"Fock states must have {m} modes, got {len(inp)} and {len(out)}")
    if min(inp + out) < 0:
        raise DomainError("occupation numbers must be non-negative")
    if sum(inp) != sum(out):
        raise DomainError(f"photon number mismatch: {sum(inp)} in, {sum(out)} out")
    return inp, out


def fock_submatrix(u, inp: Sequence[int], out: Sequence[int]) -> np.ndarray:
    """Column j repeated inp[j] times, row i repeated out[i] times."""
    u = np.asarray(u, dtype=complex)
    inp, out = _check_states(u, inp, out)
    cols = np.repeat(np.arange(len(inp)), inp)
    rows = np.repeat(np.arange(len(out)), out)
    return u[np.ix_(rows, cols)]


def transition_probability(u, inp, out) -> float:
    u = np.asarray(u, dtype=complex)
    inp, out = _check_states(u, inp, out)
    sub = fock_submatrix(u, inp, out)
    norm = math.prod(math.factorial(k) for k in inp) * math.prod(math.factorial(k) for k in out)
    return abs(permanent_ryser(sub, workers=1)) ** 2 / norm


def fock_states(m: int, n: int):
    """All occupation tuples of ``n`` photons in ``m`` modes, lexicographically descending."""
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in fock_states(m - 1, n - first):
            yield (first,) + rest


def transition_distribution(u, inp) -> dict:
    """Probability of every output state with the input's photon number."""
    u = np.asarray(u, dtype=complex)
    inp = tuple(int(x) for x in inp)
    m = u.shape[0]
    if len(inp) != m:
        raise DomainError(f"input state must have {m} modes, got {len(inp)}")
    n = sum(inp)
    size = math.comb(n + m - 1, n)
    if size > MAX_DISTRIBUTION_SIZE:
        raise CapacityError(f"{size} output states exceeds the limit of {MAX_DISTRIBUTION_SIZE}")
    return {out: transition_probability(u, inp, out) for out in fock_states(m, n)}


def format_fock(state) -> str:
    if any(k > 9 for k in state):
        raise DomainError(f"occupation above 9 in {state} cannot be written as a digit string")
    return "".join(str(k) for k in state)


def random_unitary(m: int, rng) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def unitary_to_json(u: np.ndarray) -> dict:
    u = np.asarray(u, dtype=complex)
    return {"schema_version": 1, "m": u.shape[0], "re": u.real.tolist(), "im": u.imag.tolist()}


def matrix_from_json(data: dict) -> np.ndarray:
    """Read ``{"re": [[...]], "im": [[...]]}``; ``im`` is optional."""
    try:
        re_ = np.asarray(data["re"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"matrix JSON needs a numeric 're' array: {exc}") from None
    try:
        im_ = np.asarray(data.get("im", np.zeros_like(re_)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad 'im' array: {exc}") from None
    if re_.shape != im_.shape or re_.ndim != 2:
        raise DomainError(f"'re' {re_.shape} and 'im' {im_.shape} must be equal 2-D shapes")
    declared = data.get("m", data.get("n"))
    if declared is not None and re_.shape[0] != declared:
        raise DomainError(f"declared size {declared} does not match {re_.shape[0]} rows")
    return re_ + 1j * im_
