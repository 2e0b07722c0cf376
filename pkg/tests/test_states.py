import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dfalgebra.pauli import max_abs
from dfalgebra.states import dm, fidelity, partial_trace, purity, von_neumann_entropy


def random_density(rng, d, rank=None):
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    a, b = random_density(rng, 2), random_density(rng, 3)
    rho = np.kron(a, b)
    assert max_abs(partial_trace(rho, (2, 3), 0) - a) < 1e-12
    assert max_abs(partial_trace(rho, (2, 3), 1) - b) < 1e-12


@given(st.integers(0, 10_000))
def test_partial_trace_vector_matches_matrix(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    v /= np.linalg.norm(v)
    for keep in (0, 1):
        assert max_abs(partial_trace(v, (2, 3), keep) - partial_trace(dm(v), (2, 3), keep)) < 1e-12


def test_partial_trace_errors():
    with pytest.raises(ValueError):
        partial_trace(np.ones(5), (2, 3), 0)
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), (2, 3), 0)
    with pytest.raises(ValueError):
        partial_trace(np.eye(6), (2, 3), 2)


def test_purity_and_entropy():
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2)
    assert von_neumann_entropy(dm([1, 0])) == 0


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_fidelity_general_formula_against_pure_overlap(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 3)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    expected = np.real(psi.conj() @ rho @ psi)
    assert fidelity(rho, dm(psi)) == pytest.approx(expected, abs=1e-12)
    # general route: nearly pure but not within the shortcut tolerance
    sigma = 0.999 * dm(psi) + 0.001 * np.eye(3) / 3
    f = fidelity(rho, sigma)
    assert 0 <= f <= 1 + 1e-9
    assert f == pytest.approx(fidelity(sigma, rho), abs=1e-9)


def test_fidelity_extremes():
    rng = np.random.default_rng(1)
    rho = random_density(rng, 4)
    assert fidelity(rho, rho) == pytest.approx(1, abs=1e-9)
    assert fidelity(dm([1, 0]), dm([0, 1])) == pytest.approx(0, abs=1e-15)
    assert fidelity(np.eye(2) / 2, np.eye(2) / 2) == pytest.approx(1, abs=1e-12)
