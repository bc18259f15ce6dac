"""Independent reference implementations used by several test modules."""

import math
from collections import defaultdict

import numpy as np


def evolve_creation_polynomial(u, inp):
    """Output amplitudes by expanding prod_j (sum_i U_ij b_i^dag)^{in_j} |0>.

    Monomials are tracked as occupation tuples; the amplitude of |out> is
    coeff * sqrt(prod out!) / sqrt(prod in!).
    """
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    poly = {(0,) * m: 1.0 + 0j}
    for j, k in enumerate(inp):
        for _ in range(k):
            nxt = defaultdict(complex)
            for occ, c in poly.items():
                for i in range(m):
                    if u[i, j] == 0:
                        continue
                    new = list(occ)
                    new[i] += 1
                    nxt[tuple(new)] += c * u[i, j]
            poly = dict(nxt)
    norm_in = math.sqrt(math.prod(math.factorial(k) for k in inp))
    return {
        occ: c * math.sqrt(math.prod(math.factorial(k) for k in occ)) / norm_in
        for occ, c in poly.items()
    }


def brute_force_probability(u, inp, out):
    amp = evolve_creation_polynomial(u, inp).get(tuple(out), 0.0)
    return abs(amp) ** 2


def two_photon_probability(u, out):
    """|1,1> input on two modes, written out term by term."""
    (a, b), (c, d) = np.asarray(u, dtype=complex)
    # b0^dag -> a b0^dag + c b1^dag, b1^dag -> b b0^dag + d b1^dag
    amps = {
        (2, 0): math.sqrt(2) * a * b,
        (1, 1): a * d + b * c,
        (0, 2): math.sqrt(2) * c * d,
    }
    return abs(amps[tuple(out)]) ** 2
