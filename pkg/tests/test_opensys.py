import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dfalgebra.errors import ContractViolation, LeakageError, NotDFCompatibleError
from dfalgebra.opensys import (
    BathSpec,
    SystemHamiltonianSpec,
    bath_state,
    build_universe,
    df_hamiltonian,
    df_reduce,
    evolve,
    purification,
    random_state,
    system_state,
    unitary_prediction,
)
from dfalgebra.pauli import max_abs, site_operator
from dfalgebra.spin import decompose, total_spin
from dfalgebra.states import dm, fidelity, partial_trace, purity, von_neumann_entropy

TIMES = np.linspace(0, 5, 11)


def three_qubit_universe(seed=42, exchange=()):
    bath = BathSpec.random(3, 3, seed)
    return build_universe(3, bath, SystemHamiltonianSpec(1.0, exchange), j="1/2")


def df_product(u, psi, phi, bath_vec):
    return np.kron(u.factored.isometry @ np.kron(psi, phi), bath_vec)


def test_universe_hamiltonian_assembly():
    bath = BathSpec.random(2, 3, 1)
    u = build_universe(1, bath, SystemHamiltonianSpec(0.5), j="1/2")
    s = total_spin(1)
    expected = np.kron(0.5 * s.s3, np.eye(2)) + np.kron(np.eye(2), bath.h_bath)
    for e, b in zip(s.components, bath.couplings):
        expected = expected + np.kron(e, b)
    assert max_abs(u.h_total - expected) < 1e-14
    assert max_abs(u.propagator(0.3) @ u.propagator(0.3).conj().T - np.eye(4)) < 1e-12


def test_random_bath_is_seeded_and_scaled():
    a, b = BathSpec.random(4, 3, 7, coupling_strength=2.0), BathSpec.random(4, 3, 7, coupling_strength=2.0)
    assert all(np.array_equal(x, y) for x, y in zip(a.couplings, b.couplings))
    for op in a.couplings:
        assert np.linalg.norm(op, 2) == pytest.approx(2.0)
    c = BathSpec.random(4, 3, 8)
    assert not np.array_equal(a.h_bath, c.h_bath)


def test_bath_validation():
    with pytest.raises(ValueError):
        BathSpec(1, np.eye(1), ())
    with pytest.raises(ContractViolation):
        BathSpec(2, np.array([[0, 1], [0, 0]], dtype=complex), ())


def test_budget_and_model_errors():
    with pytest.raises(ValueError):
        build_universe(6, BathSpec.random(8, 3, 0), SystemHamiltonianSpec(1.0), j=0)
    with pytest.raises(KeyError):
        build_universe(3, BathSpec.random(3, 3, 0), SystemHamiltonianSpec(1.0), j=0)
    with pytest.raises(ValueError):
        build_universe(3, BathSpec.random(3, 3, 0), SystemHamiltonianSpec(), model="pi-tau")
    with pytest.raises(ValueError):
        build_universe(3, BathSpec.random(3, 2, 0), SystemHamiltonianSpec(), j="1/2")
    with pytest.raises(ValueError):
        SystemHamiltonianSpec(alpha=(1, 0, 0)).build(3)


def test_norm_conservation():
    u = three_qubit_universe()
    rng = np.random.default_rng(0)
    psi0 = random_state(rng, 24)
    for psi in evolve(u, psi0, TIMES):
        assert abs(np.linalg.norm(psi) - 1) < 1e-10


def test_evolve_rejects_unnormalized():
    u = three_qubit_universe()
    with pytest.raises(ValueError):
        evolve(u, np.ones(24), TIMES)
    with pytest.raises(ValueError):
        evolve(u, np.eye(24), TIMES)


def test_density_and_vector_evolution_agree():
    u = three_qubit_universe()
    psi0 = random_state(np.random.default_rng(1), 24)
    vecs = evolve(u, psi0, TIMES)
    rhos = evolve(u, dm(psi0), TIMES)
    for v, r in zip(vecs, rhos):
        assert max_abs(dm(v) - r) < 1e-10


def test_df_reduce_at_t0():
    u = three_qubit_universe()
    psi = np.array([0.6, 0.8j])
    state = df_product(u, psi, np.array([1, 1]) / np.sqrt(2), random_state(np.random.default_rng(2), 3))
    rho_df, leak = df_reduce(state, u)
    assert max_abs(rho_df - dm(psi)) < 1e-12
    assert leak < 1e-12


def test_df_unitarity_and_decoherence():
    u = three_qubit_universe()
    rng = np.random.default_rng(3)
    psi = random_state(rng, 2)
    state0 = df_product(u, psi, random_state(rng, 2), random_state(rng, 3))
    states = evolve(u, state0, TIMES)
    pred = unitary_prediction(dm(psi), SystemHamiltonianSpec(1.0), u, TIMES)
    sys_purity = []
    for s, p in zip(states, pred):
        rho_df, leak = df_reduce(s, u)
        assert fidelity(rho_df, p) >= 1 - 1e-8
        assert leak <= 1e-10
        sys_purity.append(purity(system_state(s, u)))
    assert min(sys_purity) < 0.999


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31), st.floats(-1, 1), st.floats(-1, 1))
def test_exchange_terms_keep_df_unitarity(seed, j12, j23):
    exchange = ((1, 2, j12), (2, 3, j23))
    u = three_qubit_universe(seed, exchange)
    rng = np.random.default_rng(seed)
    psi = random_state(rng, 2)
    state0 = df_product(u, psi, random_state(rng, 2), random_state(rng, 3))
    pred = unitary_prediction(dm(psi), SystemHamiltonianSpec(1.0, exchange), u, TIMES)
    for s, p in zip(evolve(u, state0, TIMES), pred):
        assert fidelity(df_reduce(s, u)[0], p) >= 1 - 1e-8


def test_exchange_hamiltonian_is_df_only_on_multiplicity_factor():
    u = three_qubit_universe()
    h = SystemHamiltonianSpec(0.0, ((1, 2, 1.0),)).build(3)
    a = df_hamiltonian(h, u.factored)
    assert a.shape == (2, 2)
    m = u.factored.compress(h)
    # the split fixes A only up to a scalar shared with the D_j part
    shift = (np.trace(m) / 4 - np.trace(a) / 2) * np.eye(4)
    assert max_abs(np.kron(a, np.eye(2)) + shift - m) < 1e-12


def test_cross_term_rejected():
    u = three_qubit_universe()
    bad = site_operator(3, {1: 1})
    with pytest.raises(NotDFCompatibleError) as err:
        unitary_prediction(np.eye(2) / 2, bad, u, TIMES)
    assert err.value.residual > 1e-9


def test_collective_coupling_conserves_sector_weights():
    u = three_qubit_universe()
    d = decompose(total_spin(3))
    rng = np.random.default_rng(4)
    a = d.block("3/2").basis @ random_state(rng, 4)
    b = d.block("1/2").basis @ random_state(rng, 4)
    state0 = np.kron((a + b) / np.sqrt(2), random_state(rng, 3))
    for s in evolve(u, state0, TIMES):
        _, leak = df_reduce(s, u)
        assert leak == pytest.approx(0.5, abs=1e-10)


def test_df_reduce_with_no_weight():
    u = three_qubit_universe()
    v = decompose(total_spin(3)).block("3/2").vector(0, "3/2")
    with pytest.raises(LeakageError):
        df_reduce(np.kron(v, [1, 0, 0]), u)


def test_bath_entropy_starts_at_zero():
    u = three_qubit_universe()
    rng = np.random.default_rng(5)
    state0 = df_product(u, random_state(rng, 2), random_state(rng, 2), random_state(rng, 3))
    states = evolve(u, state0, TIMES)
    ents = [von_neumann_entropy(bath_state(s, u)) for s in states]
    assert ents[0] < 1e-10
    assert all(e >= 0 for e in ents) and max(ents) > 0.01


def test_purification_marginal():
    rng = np.random.default_rng(6)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    v = purification(rho)
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert max_abs(partial_trace(v, (3, 3), keep=0) - rho) < 1e-12
    pur = BathSpec.random(3, 3, 0).purified()
    assert pur.dim == 9


def test_pi_tau_model():
    bath = BathSpec.random(3, 3, 11)
    spec = SystemHamiltonianSpec(alpha=(0.3, 0.1, -0.2), beta=(0.5, 0.0, 0.4))
    u = build_universe(2, bath, spec, model="pi-tau")
    rng = np.random.default_rng(0)
    psi = random_state(rng, 2)
    state0 = np.kron(u.factored.isometry @ np.kron(psi, random_state(rng, 2)), random_state(rng, 3))
    pred = unitary_prediction(dm(psi), spec, u, TIMES)
    for s, p in zip(evolve(u, state0, TIMES), pred):
        assert fidelity(df_reduce(s, u)[0], p) >= 1 - 1e-8
