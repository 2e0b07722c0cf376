import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from dfalgebra.errors import ContractViolation
from dfalgebra.pauli import (
    Operator,
    PauliString,
    adjoint,
    all_pauli_strings,
    anticommutator,
    commutator,
    frobenius_norm,
    is_unitary,
    matrix_exponential,
    max_abs,
    multiply,
    pauli_matrix,
    realize,
)

labels = st.integers(0, 3)


def pauli_strings(n):
    return st.lists(labels, min_size=n, max_size=n).map(lambda xs: PauliString(tuple(xs)))


def random_hermitian(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def test_pauli_matrices():
    assert np.array_equal(pauli_matrix(0), np.eye(2))
    assert np.array_equal(pauli_matrix(3), np.diag([1, -1]))
    assert np.array_equal(pauli_matrix(1), np.array([[0, 1], [1, 0]]))
    assert np.array_equal(pauli_matrix(2), np.array([[0, -1j], [1j, 0]]))
    assert max_abs(commutator(pauli_matrix(1), pauli_matrix(2)) - 2j * pauli_matrix(3)) == 0


@pytest.mark.parametrize("bad", [-1, 4, 1.5, "x"])
def test_pauli_matrix_rejects_bad_index(bad):
    with pytest.raises(ValueError):
        pauli_matrix(bad)


def test_realize_examples():
    assert np.array_equal(realize((0, 0)), np.eye(4))
    assert np.array_equal(realize((3, 3)), np.diag([1, -1, -1, 1]))
    # qubit 1 is the most significant index
    assert np.array_equal(realize((3, 0)), np.diag([1, 1, -1, -1]))


def test_pauli_string_validation():
    with pytest.raises(ValueError):
        PauliString((0, 4))
    with pytest.raises(ValueError):
        PauliString(())
    assert str(PauliString((0, 1, 2, 3))) == "IXYZ"


@given(pauli_strings(3))
def test_nonidentity_strings_are_traceless(p):
    t = np.trace(realize(p))
    assert t == (8 if p.labels == (0, 0, 0) else 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trace_orthogonality(n):
    mats = np.array([realize(p).ravel() for p in all_pauli_strings(n)])
    gram = mats.conj() @ mats.T
    assert max_abs(gram - 2**n * np.eye(4**n)) == 0


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(pauli_strings(n), pauli_strings(n))))
def test_realize_is_homomorphism(pq):
    p, q = pq
    phase, r = p.product(q)
    assert max_abs(realize(p) @ realize(q) - phase * realize(r)) < 1e-12


def test_commutator_identities():
    a = realize((3, 0))
    assert max_abs(commutator(a, a)) == 0
    assert max_abs(commutator(realize((3, 0)), realize((0, 3)))) == 0
    assert max_abs(anticommutator(pauli_matrix(1), pauli_matrix(1)) - 2 * np.eye(2)) == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(np.eye(2), np.eye(4))
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(4))


@given(st.integers(0, 2**32 - 1))
def test_adjoint_reverses_products(seed):
    rng = np.random.default_rng(seed)
    a, b = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(2))
    assert max_abs(adjoint(multiply(a, b)) - multiply(adjoint(b), adjoint(a))) < 1e-12


def test_frobenius_norm():
    assert frobenius_norm(np.zeros((3, 3))) == 0
    assert frobenius_norm(np.eye(5)) == pytest.approx(np.sqrt(5))
    assert frobenius_norm(pauli_matrix(1)) == pytest.approx(np.sqrt(2))


def test_matrix_exponential_examples():
    assert max_abs(matrix_exponential(random_hermitian(0, 4), 0) - np.eye(4)) < 1e-12
    u = matrix_exponential(pauli_matrix(3), np.pi / 2)
    assert max_abs(u - np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])) < 1e-15
    h = random_hermitian(1, 8)
    u = matrix_exponential(h, 1.7)
    assert is_unitary(u, 1e-10)
    assert max_abs(u - scipy.linalg.expm(-1.7j * h)) < 1e-10


def test_matrix_exponential_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        matrix_exponential(np.array([[0, 1], [0, 0]]), 1.0)


@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 1000))
def test_exponential_group_law(t1, t2, seed):
    h = random_hermitian(seed, 6)
    lhs = matrix_exponential(h, t1) @ matrix_exponential(h, t2)
    assert max_abs(lhs - matrix_exponential(h, t1 + t2)) < 1e-9


def test_operator_json_roundtrip():
    op = Operator(realize((1, 2)), label="XY", hermitian=True)
    back = Operator.from_json(op.to_json())
    assert back.label == "XY" and back.dim == 4
    assert np.array_equal(back.matrix, op.matrix)
    assert op.to_json()["entries"][1] == [0.0, 0.0]


def test_operator_validation():
    with pytest.raises(ValueError):
        Operator(np.ones((2, 3)))
    with pytest.raises(ValueError):
        Operator(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ContractViolation):
        Operator(np.array([[0, 1], [0, 0]]), hermitian=True)
    with pytest.raises(ContractViolation):
        Operator(2 * np.eye(2), unitary=True)
    with pytest.raises(ValueError):
        Operator(np.eye(2)).matrix[0, 0] = 5
