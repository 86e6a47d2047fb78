from functools import reduce

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgnn_lab.pauli import PauliError, PauliSum, pauli_sum, terms_commute

MATS = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1.0, -1.0])}


def kron_term(n, ops):
    """Kronecker product with qubit 0 as the rightmost (least significant) factor."""
    d = dict(ops)
    return reduce(np.kron, [MATS[d.get(q, "I")] for q in reversed(range(n))])


def kron_oracle(h: PauliSum):
    return sum(c * kron_term(h.n_qubits, ops) for c, ops in h.terms)


@st.composite
def pauli_sums(draw, max_n=4, max_terms=5):
    n = draw(st.integers(1, max_n))
    terms = []
    for _ in range(draw(st.integers(1, max_terms))):
        qubits = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
        axes = draw(st.lists(st.sampled_from("XYZ"), min_size=len(qubits), max_size=len(qubits)))
        coeff = draw(st.floats(-2, 2, allow_nan=False))
        terms.append((coeff, list(zip(qubits, axes))))
    return pauli_sum(n, terms)


@given(pauli_sums())
def test_matrix_matches_kronecker_oracle(h):
    np.testing.assert_allclose(h.to_matrix(), kron_oracle(h), atol=1e-12)


@given(pauli_sums(), st.integers(0, 2 ** 31 - 1))
def test_apply_matches_matrix(h, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** h.n_qubits) + 1j * rng.normal(size=2 ** h.n_qubits)
    np.testing.assert_allclose(h.apply(v), kron_oracle(h) @ v, atol=1e-10)


@given(pauli_sums())
def test_hermitian(h):
    m = h.to_matrix()
    np.testing.assert_allclose(m, m.conj().T, atol=1e-12)


def test_single_y_on_qubit_one():
    h = PauliSum(2, ((1.0, ((1, "Y"),)),))
    v = np.array([1, 0, 0, 0], complex)
    # Y|0> = i|1> on qubit 1 -> index 2
    np.testing.assert_allclose(h.apply(v), [0, 0, 1j, 0])


def test_diagonal_of_zz_plus_offset():
    h = PauliSum.from_text("0.5 Z0 Z1\n-1 I")
    np.testing.assert_array_equal(h.diagonal, [-0.5, -1.5, -1.5, -0.5])


def test_diagonal_rejects_offdiagonal():
    with pytest.raises(PauliError):
        PauliSum.from_text("1 X0").diagonal


def test_text_round_trip():
    h = pauli_sum(4, [(0.5, [(0, "Z"), (3, "Z")]), (-0.25, [(2, "X")]), (1.5, [])])
    text = h.to_text()
    assert text.splitlines() == ["0.5 Z0 Z3", "-0.25 X2", "1.5 I"]
    assert PauliSum.from_text(text, 4) == h


def test_text_errors_name_the_line():
    with pytest.raises(PauliError, match="line 2"):
        PauliSum.from_text("1 Z0\nabc Z1")
    with pytest.raises(PauliError, match="line 1"):
        PauliSum.from_text("1 Q0")


@pytest.mark.parametrize("terms", [[(1.0, [(0, "Z"), (0, "X")])], [(1.0, [(5, "Z")])],
                                   [(float("inf"), [(0, "Z")])], [(1.0, [(0, "W")])]])
def test_bad_terms(terms):
    with pytest.raises(PauliError):
        pauli_sum(2, terms)


def test_simplify_merges_and_drops_zeros():
    h = pauli_sum(2, [(1.0, [(0, "Z")]), (0.5, [(1, "X")]), (-1.0, [(0, "Z")]), (0.5, [(1, "X")])])
    s = h.simplify()
    assert s.terms == ((1.0, ((1, "X"),)),)


def test_arithmetic():
    a = PauliSum.from_text("1 Z0", 2)
    b = PauliSum.from_text("2 X1", 2)
    np.testing.assert_allclose((a + 3 * b).to_matrix(), a.to_matrix() + 3 * b.to_matrix())
    with pytest.raises(PauliError):
        a + PauliSum.from_text("1 Z0", 3)


def test_terms_commute():
    assert terms_commute([(0, "X"), (1, "X")], [(0, "Z"), (1, "Z")])
    assert not terms_commute([(0, "X")], [(0, "Z")])
    assert terms_commute([(0, "X")], [(1, "Z")])


@given(pauli_sums())
def test_commuting_groups_really_commute(h):
    for grp in h.commuting_groups():
        for i in grp:
            for j in grp:
                a = kron_term(h.n_qubits, h.terms[i][1])
                b = kron_term(h.n_qubits, h.terms[j][1])
                np.testing.assert_allclose(a @ b, b @ a, atol=1e-12)


def test_declared_groups_must_partition():
    with pytest.raises(PauliError):
        pauli_sum(2, [(1, [(0, "Z")]), (1, [(1, "Z")])], groups=[[0]])


def test_structure_flags():
    assert PauliSum.from_text("1 Z0 Z1\n2 Z1").is_diagonal
    assert PauliSum.from_text("1 X0\n1 X1").is_x_field
    assert not PauliSum.from_text("1 X0 X1").is_x_field
