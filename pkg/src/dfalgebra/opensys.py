"""Exact system + finite bath evolution and reduction onto the DF factor.

The universe Hamiltonian is ``H_S (x) 1 + 1 (x) H_B + sum_i E_i (x) B_i`` with
the system as the left tensor factor. Nothing here is approximated: the
universe is evolved with the eigendecomposition of ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .df import bond_operator, two_qubit_factored_space, two_qubit_pi_tau
from .errors import ContractViolation, LeakageError, NotDFCompatibleError
from .pauli import is_hermitian, max_abs
from .spin import FactoredSpace, decompose, factorize, total_spin
from .states import partial_trace

MAX_UNIVERSE_DIM = 256
NORM_TOL = 1e-10
SPLIT_TOL = 1e-9


def random_hermitian(rng: np.random.Generator, dim: int, scale: float) -> np.ndarray:
    """GUE-style draw rescaled to operator norm ``scale``."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    return h * (scale / np.linalg.norm(h, 2))


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class BathSpec:
    dim: int
    h_bath: np.ndarray = field(repr=False)
    couplings: tuple[np.ndarray, ...] = field(repr=False)
    seed: int | None = None
    coupling_strength: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("bath dimension must be at least 2")
        for op in (self.h_bath, *self.couplings):
            if op.shape != (self.dim, self.dim) or not is_hermitian(op):
                raise ContractViolation("bath operators must be Hermitian d_B x d_B matrices")

    @classmethod
    def random(cls, dim: int, n_couplings: int, seed: int, coupling_strength: float = 1.0,
               bath_energy: float = 1.0) -> "BathSpec":
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, dim, bath_energy)
        bs = tuple(random_hermitian(rng, dim, coupling_strength) for _ in range(n_couplings))
        return cls(dim, h, bs, seed, coupling_strength)

    def purified(self) -> "BathSpec":
        """Bath (x) ancilla register of dimension d_B^2; the ancilla is inert."""
        eye = np.eye(self.dim)
        return BathSpec(
            self.dim**2,
            np.kron(self.h_bath, eye),
            tuple(np.kron(b, eye) for b in self.couplings),
            self.seed,
            self.coupling_strength,
        )


def purification(rho: np.ndarray) -> np.ndarray:
    """Vector on d (x) d whose first-factor marginal is ``rho``."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0, None)
    return sum(np.sqrt(w[k]) * np.kron(v[:, k], np.eye(len(w))[k]) for k in range(len(w)))


@dataclass(frozen=True)
class SystemHamiltonianSpec:
    """H_S = epsilon S_3 + sum J b_jk (+ sum alpha pi + sum beta tau on two qubits)."""

    epsilon: float = 0.0
    exchange: tuple[tuple[int, int, float], ...] = ()
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()

    def build(self, n_qubits: int) -> np.ndarray:
        spins = total_spin(n_qubits)
        h = self.epsilon * spins.s3
        for j, k, strength in self.exchange:
            h = h + strength * bond_operator(int(j), int(k), n_qubits)
        if self.alpha or self.beta:
            if n_qubits != 2:
                raise ValueError("alpha/beta terms are defined for two qubits only")
            pi, tau = two_qubit_pi_tau()
            for coef, g in zip(self.alpha, pi.generators.values()):
                h = h + float(coef) * g
            for coef, g in zip(self.beta, tau.generators.values()):
                h = h + float(coef) * g
        return h


@dataclass(frozen=True)
class UniverseModel:
    n_qubits: int
    bath: BathSpec
    h_sys: np.ndarray = field(repr=False)
    h_total: np.ndarray = field(repr=False)
    error_generators: tuple[np.ndarray, ...] = field(repr=False)
    factored: FactoredSpace
    eigvals: np.ndarray = field(repr=False)
    eigvecs: np.ndarray = field(repr=False)

    @property
    def sys_dim(self) -> int:
        return self.h_sys.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return self.sys_dim, self.bath.dim

    def propagator(self, t: float) -> np.ndarray:
        v = self.eigvecs
        return (v * np.exp(-1j * t * self.eigvals)) @ v.conj().T


def build_universe(n_qubits: int, bath: BathSpec, h_sys: SystemHamiltonianSpec | np.ndarray,
                   j=None, model: str = "collective") -> UniverseModel:
    """Assemble H = H_S (x) 1 + 1 (x) H_B + sum_i E_i (x) B_i.

    ``model="collective"`` uses the total pseudospin as errors and factors the
    S^2 = j(j+1) eigenspace; ``model="pi-tau"`` (two qubits) couples the tau
    triple and factors the space as pi (x) tau.
    """
    dim = 2**n_qubits * bath.dim
    if dim > MAX_UNIVERSE_DIM:
        raise ValueError(f"universe dimension {dim} exceeds budget {MAX_UNIVERSE_DIM}")
    if model == "collective":
        spins = total_spin(n_qubits)
        errors = spins.components
        factored = factorize(decompose(spins), j)
    elif model == "pi-tau":
        if n_qubits != 2:
            raise ValueError("the pi-tau model needs exactly two qubits")
        errors = tuple(two_qubit_pi_tau()[1].generators.values())
        factored = two_qubit_factored_space()
    else:
        raise ValueError(f"unknown model {model!r}")
    if len(bath.couplings) != len(errors):
        raise ValueError(f"need {len(errors)} bath couplings, got {len(bath.couplings)}")
    hs = h_sys.build(n_qubits) if isinstance(h_sys, SystemHamiltonianSpec) else np.asarray(h_sys)
    if not is_hermitian(hs):
        raise ContractViolation("system Hamiltonian is not Hermitian")
    ds = 2**n_qubits
    h = np.kron(hs, np.eye(bath.dim)) + np.kron(np.eye(ds), bath.h_bath)
    for e, b in zip(errors, bath.couplings):
        h = h + np.kron(e, b)
    h = (h + h.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return UniverseModel(n_qubits, bath, hs, h, tuple(errors), factored, w, v)


def evolve(u: UniverseModel, state0, times: Sequence[float]) -> list[np.ndarray]:
    """Exact states at each time; ``state0`` is a universe vector or density matrix."""
    state0 = np.asarray(state0, dtype=complex)
    dim = u.h_total.shape[0]
    if state0.ndim == 1:
        if state0.size != dim or abs(np.linalg.norm(state0) - 1) > NORM_TOL:
            raise ValueError("initial universe vector must be normalized and of matching size")
    elif state0.shape != (dim, dim) or abs(np.trace(state0) - 1) > NORM_TOL:
        raise ValueError("initial universe density must have unit trace and matching shape")
    v = u.eigvecs
    coeffs = v.conj().T @ state0 if state0.ndim == 1 else v.conj().T @ state0 @ v
    out = []
    for t in times:
        phase = np.exp(-1j * float(t) * u.eigvals)
        if state0.ndim == 1:
            out.append(v @ (phase * coeffs))
        else:
            out.append(v @ (phase[:, None] * coeffs * phase.conj()[None, :]) @ v.conj().T)
    return out


def system_state(state, u: UniverseModel) -> np.ndarray:
    return partial_trace(state, u.dims, keep=0)


def bath_state(state, u: UniverseModel) -> np.ndarray:
    return partial_trace(state, u.dims, keep=1)


def df_reduce(state, u: UniverseModel) -> tuple[np.ndarray, float]:
    """Trace out the bath, compress onto the factored eigenspace, trace out D_j.

    Returns ``(rho_df, leakage)`` with rho_df renormalized to unit trace and
    leakage the weight outside the eigenspace.
    """
    rho_s = system_state(state, u)
    comp = u.factored.compress(rho_s)
    weight = float(np.real(np.trace(comp)))
    leakage = max(0.0, 1.0 - weight)
    if weight < 1e-12:
        raise LeakageError("state has no weight in the working eigenspace", leakage)
    rho_df = partial_trace(comp / weight, u.factored.dims, keep=0)
    return (rho_df + rho_df.conj().T) / 2, leakage


def df_hamiltonian(h_sys, factored: FactoredSpace, tol: float = SPLIT_TOL) -> np.ndarray:
    """DF-factor part A of H_S, where V^dagger H_S V = A (x) 1 + 1 (x) B.

    Raises NotDFCompatibleError when H_S couples the eigenspace to its
    complement or has a cross term on C^{n_j} (x) D_j.
    """
    h = np.asarray(h_sys)
    p = factored.projector
    off = max_abs(p @ h @ (np.eye(h.shape[0]) - p))
    a, _, res = factored.split(h)
    worst = max(off, res)
    if worst > tol:
        raise NotDFCompatibleError(
            f"system Hamiltonian is not DF-algebra + commutant (residual {worst:.3e})", worst
        )
    return a


def unitary_prediction(rho_df_0, h_sys, u: UniverseModel, times: Sequence[float]) -> list[np.ndarray]:
    """rho_df(t) = exp(-i A t) rho_df(0) exp(+i A t) with A from :func:`df_hamiltonian`."""
    hs = h_sys.build(u.n_qubits) if isinstance(h_sys, SystemHamiltonianSpec) else h_sys
    a = df_hamiltonian(hs, u.factored)
    w, v = np.linalg.eigh(a)
    rho0 = np.asarray(rho_df_0, dtype=complex)
    out = []
    for t in times:
        ut = (v * np.exp(-1j * float(t) * w)) @ v.conj().T
        out.append(ut @ rho0 @ ut.conj().T)
    return out
