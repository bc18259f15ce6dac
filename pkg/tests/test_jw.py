import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heqvpe.errors import BoundsError, CapacityError
from heqvpe.fermion import LOWER, RAISE, FermionOperator, build_hamiltonian
from heqvpe.integrals import expand_to_spin_orbitals, load_bundled
from heqvpe.fermion import fermion_to_matrix
from heqvpe.jw import (
    PauliSum,
    jw_ladder,
    jw_transform,
    multiply_strings,
    pauli_simplify,
    pauli_to_matrix,
    qubit_hamiltonian,
)

from test_fermion import random_operator


def random_pauli_sum(rng, n, n_terms=5):
    terms = {}
    for _ in range(n_terms):
        s = "".join(rng.choice(list("IXYZ"), size=n))
        terms[s] = terms.get(s, 0) + complex(rng.normal(), rng.normal())
    return PauliSum(n, terms)


def test_z_matrix():
    assert np.array_equal(pauli_to_matrix(PauliSum(1, {"Z": 1.0})), np.diag([1, -1]))


def test_xx_matrix():
    assert np.array_equal(pauli_to_matrix(PauliSum(2, {"XX": 1.0})), np.fliplr(np.eye(4)))


def test_qubit_zero_is_least_significant():
    m = pauli_to_matrix(PauliSum(2, {"ZI": 1.0}))
    assert np.array_equal(np.diag(m), [1, -1, 1, -1])


def test_capacity():
    with pytest.raises(CapacityError):
        pauli_to_matrix(PauliSum.identity(13))


def _single_qubit_table():
    """Pauli products by explicit 2x2 multiplication."""
    mats = {c: pauli_to_matrix(PauliSum(1, {c: 1.0})) for c in "IXYZ"}
    table = {}
    for a in "IXYZ":
        for b in "IXYZ":
            prod = mats[a] @ mats[b]
            for c in "IXYZ":
                for ph in (1, -1, 1j, -1j):
                    if np.allclose(prod, ph * mats[c]):
                        table[(a, b)] = (ph, c)
    return table


def test_product_table_matches_matrices():
    table = _single_qubit_table()
    for (a, b), expected in table.items():
        assert multiply_strings(a, b) == expected


def test_product_matches_matrix_product(rng):
    for n in (1, 2, 3):
        for _ in range(10):
            a = random_pauli_sum(rng, n)
            b = random_pauli_sum(rng, n)
            lhs = pauli_to_matrix(a * b)
            rhs = pauli_to_matrix(a) @ pauli_to_matrix(b)
            assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_simplify_merges_and_drops():
    assert dict(pauli_simplify(PauliSum(1, {"Z": 1.0}) + PauliSum(1, {"Z": 1.0})).terms) == {"Z": 2.0}
    assert len(pauli_simplify(PauliSum(1, {"X": 1.0}) - PauliSum(1, {"X": 1.0}))) == 0


def test_simplify_preserves_matrix(rng):
    for _ in range(10):
        ps = random_pauli_sum(rng, 3, n_terms=8) + PauliSum(3, {"XYZ": 1e-13})
        assert np.max(np.abs(pauli_to_matrix(pauli_simplify(ps)) - pauli_to_matrix(ps))) < 1e-11


def test_raise_single_mode():
    """Creation maps |0> -> |1>, so it is (X - iY)/2 under Z = diag(1, -1)."""
    assert dict(jw_ladder(0, RAISE, 1).terms) == {"X": 0.5, "Y": -0.5j}
    m = pauli_to_matrix(jw_ladder(0, RAISE, 1))
    assert np.array_equal(m, np.array([[0, 0], [1, 0]]))


def test_lower_second_mode_has_z_string():
    assert dict(jw_ladder(1, LOWER, 2).terms) == {"ZX": 0.5, "ZY": 0.5j}


def test_raising_operator_literal_form_is_annihilator():
    """(X + iY)/2 is |0><1|; with occupied = |1> that is a, not a^dag."""
    sigma_plus = pauli_to_matrix(PauliSum(1, {"X": 0.5, "Y": 0.5j}))
    assert np.array_equal(sigma_plus, fermion_to_matrix(FermionOperator.ladder(1, 0, LOWER)))


@pytest.mark.parametrize("p", range(4))
@pytest.mark.parametrize("dagger", [RAISE, LOWER])
def test_ladder_matches_occupation_basis(p, dagger):
    jw = pauli_to_matrix(jw_ladder(p, dagger, 4))
    occ = fermion_to_matrix(FermionOperator.ladder(4, p, dagger))
    assert np.max(np.abs(jw - occ)) < 1e-15


def test_ladder_bounds():
    with pytest.raises(BoundsError):
        jw_ladder(2, RAISE, 2)


def test_number_operator_first_mode():
    ps = jw_transform(FermionOperator(1, {((0, RAISE), (0, LOWER)): 1.0}))
    assert dict(ps.terms) == {"I": 0.5, "Z": -0.5}


def test_number_operator_second_mode_has_no_z_string():
    """The Z_0 factors of a_1^dag and a_1 cancel: a_1^dag a_1 = (I - Z_1)/2."""
    op = FermionOperator(2, {((1, RAISE), (1, LOWER)): 1.0})
    ps = jw_transform(op)
    assert dict(ps.terms) == {"II": 0.5, "IZ": -0.5}
    assert np.allclose(pauli_to_matrix(ps), fermion_to_matrix(op))
    # the alternative form Z_0 (I - Z_1)/2 has a different matrix
    alt = PauliSum(2, {"ZI": 0.5, "ZZ": -0.5})
    assert not np.allclose(pauli_to_matrix(alt), fermion_to_matrix(op))


def test_pair_string_sign():
    """a_0^dag a_1^dag a_0 a_1 = -n_0 n_1 = -(I - Z_0)(I - Z_1)/4."""
    op = FermionOperator(2, {((0, RAISE), (1, RAISE), (0, LOWER), (1, LOWER)): 1.0})
    ps = jw_transform(op)
    assert dict(ps.terms) == {"II": -0.25, "IZ": 0.25, "ZI": 0.25, "ZZ": -0.25}
    plus_form = PauliSum(2, {"II": 0.25, "IZ": -0.25, "ZI": -0.25, "ZZ": 0.25})
    assert np.allclose(pauli_to_matrix(ps), fermion_to_matrix(op))
    assert not np.allclose(pauli_to_matrix(plus_form), fermion_to_matrix(op))


def test_random_operators_match_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(1, 5))
        f = random_operator(rng, n, n_terms=5)
        assert np.max(np.abs(pauli_to_matrix(jw_transform(f)) - fermion_to_matrix(f))) < 1e-12


def test_hermitian_input_gives_real_coefficients(rng):
    for _ in range(20):
        f = random_operator(rng, 3)
        herm = f + f.dagger()
        assert all(abs(c.imag) < 1e-12 for c in jw_transform(herm).terms.values())


def test_he_term_count_bounded_and_deterministic():
    mi = load_bundled("he-631g")
    h1 = qubit_hamiltonian(mi)
    h2 = qubit_hamiltonian(mi)
    assert len(h1) <= 4**4
    assert list(h1.terms.items()) == list(h2.terms.items())


@pytest.mark.parametrize("name,max_terms", [("he-sto3g", 16), ("he-631g", 256)])
def test_he_hamiltonian_matches_fermion_matrix(name, max_terms):
    mi = load_bundled(name)
    ps = qubit_hamiltonian(mi)
    f = build_hamiltonian(expand_to_spin_orbitals(mi))
    assert len(ps) <= max_terms
    assert np.max(np.abs(pauli_to_matrix(ps) - fermion_to_matrix(f))) < 1e-12


def test_json_round_trip(rng):
    ps = random_pauli_sum(rng, 3)
    again = PauliSum.from_json(ps.to_json())
    assert again.terms == pauli_simplify(ps, cutoff=0).terms
    # the bare list form is accepted too
    assert PauliSum.from_json(ps.to_json()["terms"]).terms == again.terms


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="IXYZ", min_size=3, max_size=3), st.text(alphabet="IXYZ", min_size=3, max_size=3))
def test_strings_square_to_identity_and_commute_or_anticommute(a, b):
    ph, s = multiply_strings(a, a)
    assert (ph, s) == (1, "III")
    ph_ab, s_ab = multiply_strings(a, b)
    ph_ba, s_ba = multiply_strings(b, a)
    assert s_ab == s_ba
    assert ph_ab in (ph_ba, -ph_ba)
