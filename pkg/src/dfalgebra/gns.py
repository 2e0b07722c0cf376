"""GNS construction for states on finite-dimensional matrix algebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LeakageError, PositivityError
from .pauli import all_pauli_strings, max_abs, realize
from .spin import FactoredSpace
from .states import partial_trace, purity

GRAM_REL_TOL = 1e-9
PURE_TOL = 1e-8
LEAKAGE_TOL = 1e-6


@dataclass(frozen=True)
class MatrixAlgebra:
    """Linear span of ``basis`` inside the ambient operator space."""

    name: str
    basis: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        basis = tuple(np.asarray(b, dtype=complex) for b in self.basis)
        object.__setattr__(self, "basis", basis)
        if np.linalg.matrix_rank(self._stack(), tol=1e-10) != len(basis):
            raise ValueError(f"basis of {self.name} is linearly dependent")

    @property
    def ambient_dim(self) -> int:
        return self.basis[0].shape[0]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _stack(self) -> np.ndarray:
        return np.array([b.ravel() for b in self.basis]).T

    def coefficients(self, op) -> tuple[np.ndarray, float]:
        """Least-squares expansion of ``op`` in the basis plus the residual."""
        m = self._stack()
        target = np.asarray(op, dtype=complex).ravel()
        c, *_ = np.linalg.lstsq(m, target, rcond=None)
        return c, float(np.abs(m @ c - target).max())

    def contains(self, op, tol: float = 1e-9) -> bool:
        return self.coefficients(op)[1] <= tol

    def closure_residual(self) -> float:
        """Worst distance of a basis product or adjoint from the span."""
        worst = 0.0
        for a, b in itertools.product(self.basis, repeat=2):
            worst = max(worst, self.coefficients(a @ b)[1])
        for a in self.basis:
            worst = max(worst, self.coefficients(a.conj().T)[1])
        return worst

    def rotated(self, rng: np.random.Generator) -> "MatrixAlgebra":
        """Same algebra, random invertible change of basis."""
        n = self.dimension
        t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        new = [sum(t[i, k] * self.basis[k] for k in range(n)) for i in range(n)]
        return MatrixAlgebra(self.name, tuple(new))


def generated_algebra(name: str, generators: Sequence[np.ndarray], max_rounds: int = 16) -> MatrixAlgebra:
    """Unital *-algebra generated by ``generators`` (Hilbert-Schmidt orthonormal basis)."""
    d = generators[0].shape[0]
    gens = [np.asarray(g, dtype=complex) for g in generators]
    gens += [g.conj().T for g in gens]
    basis: list[np.ndarray] = []

    def absorb(candidates):
        grew = False
        for c in candidates:
            v = c.copy()
            for b in basis:
                v = v - np.vdot(b, v) * b
            nrm = np.linalg.norm(v)
            if nrm > 1e-9:
                basis.append(v / nrm)
                grew = True
        return grew

    absorb([np.eye(d)] + gens)
    for _ in range(max_rounds):
        if not absorb([b @ g for b in list(basis) for g in gens]):
            break
    return MatrixAlgebra(name, tuple(basis))


def pauli_algebra(n_qubits: int) -> MatrixAlgebra:
    return MatrixAlgebra(
        f"pauli-{n_qubits}", tuple(realize(p) for p in all_pauli_strings(n_qubits))
    )


@dataclass(frozen=True)
class StateFunctional:
    """f(A) = tr(density A) restricted to ``algebra``."""

    algebra: MatrixAlgebra
    density: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        if abs(np.trace(rho) - 1) > 1e-10:
            raise PositivityError(f"density has trace {np.trace(rho).real:.6g}, expected 1")
        if max_abs(rho - rho.conj().T) > 1e-10:
            raise PositivityError("density is not Hermitian")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -1e-10:
            raise PositivityError(f"density has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "density", rho)

    def __call__(self, a) -> complex:
        return evaluate(self, a)


def evaluate(f: StateFunctional, a) -> complex:
    return complex(np.trace(f.density @ np.asarray(a)))


def state_from_pauli_expectations(algebra: MatrixAlgebra, generators, values) -> StateFunctional:
    """Density (1 + sum_i v_i G_i)/d for trace-orthogonal generators with G_i^2 = 1."""
    d = algebra.ambient_dim
    rho = np.eye(d, dtype=complex)
    for g, v in zip(generators, values):
        rho = rho + v * np.asarray(g)
    return StateFunctional(algebra, rho / d)


def transition_amplitude(f: StateFunctional, a, c, b) -> complex:
    """<A~| C |B~> = f(A^dagger C B)."""
    return evaluate(f, np.asarray(a).conj().T @ np.asarray(c) @ np.asarray(b))


def equivalence_class_check(f: StateFunctional, a, b, tol: float = 1e-12) -> bool:
    """True when A and B define the same GNS vector."""
    diff = np.asarray(a) - np.asarray(b)
    return abs(evaluate(f, diff.conj().T @ diff)) <= tol


@dataclass(frozen=True)
class GNSRepresentation:
    state: StateFunctional
    gram: np.ndarray = field(repr=False)
    frame: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.frame.shape[1]

    @property
    def gram_rank(self) -> int:
        return self.dimension

    def vector(self, a) -> np.ndarray:
        """Coordinates of the class of ``a`` in the orthonormal GNS frame."""
        c, res = self.state.algebra.coefficients(a)
        if res > 1e-9:
            raise ValueError("operator is not in the algebra")
        return self.frame.conj().T @ self.gram @ c

    @property
    def cyclic_vector(self) -> np.ndarray:
        return self.vector(np.eye(self.state.algebra.ambient_dim))

    def rep(self, c) -> np.ndarray:
        """Matrix of C on the GNS space, entries f(A_a^dagger C A_b) in the frame."""
        basis = self.state.algebra.basis
        c = np.asarray(c)
        rho = self.state.density
        k = np.array([[np.trace(rho @ a.conj().T @ c @ b) for b in basis] for a in basis])
        return self.frame.conj().T @ k @ self.frame

    def homomorphism_residual(self, max_pairs: int = 64, seed: int = 0) -> float:
        basis = self.state.algebra.basis
        pairs = list(itertools.product(range(len(basis)), repeat=2))
        if len(pairs) > max_pairs:
            rng = np.random.default_rng(seed)
            pairs = [pairs[i] for i in rng.choice(len(pairs), max_pairs, replace=False)]
        reps = {}

        def r(i):
            if i not in reps:
                reps[i] = self.rep(basis[i])
            return reps[i]

        worst = 0.0
        for i, j in pairs:
            worst = max(worst, max_abs(self.rep(basis[i] @ basis[j]) - r(i) @ r(j)))
            worst = max(worst, max_abs(self.rep(basis[i].conj().T) - r(i).conj().T))
        return worst

    def summary(self) -> dict:
        return {
            "algebra_name": self.state.algebra.name,
            "gns_dimension": self.dimension,
            "gram_rank": self.gram_rank,
            "homomorphism_residual": self.homomorphism_residual(),
        }


def gns_construct(f: StateFunctional, rel_tol: float = GRAM_REL_TOL) -> GNSRepresentation:
    """Quotient the algebra by the null space of f(A^dagger B) and orthonormalize.

    The frame is the canonical orthogonalization U_+ diag(lambda_+)^{-1/2} over
    the eigenvectors of the Gram matrix with eigenvalue above ``rel_tol``
    times the largest one.
    """
    basis = f.algebra.basis
    rho = f.density
    gram = np.array([[np.trace(rho @ a.conj().T @ b) for b in basis] for a in basis])
    gram = (gram + gram.conj().T) / 2
    w, u = np.linalg.eigh(gram)
    top = w.max()
    if top <= 0 or w.min() < -rel_tol * top:
        raise PositivityError(f"Gram matrix has eigenvalue {w.min():.3e}; state is not positive")
    keep = w > rel_tol * top
    frame = u[:, keep] / np.sqrt(w[keep])
    return GNSRepresentation(f, gram, frame)


_FACTOR_NAMES = {"df": 0, "multiplicity": 0, "pi": 0, "error": 1, "irrep": 1, "tau": 1}


def purity_on_subalgebra(density, factored: FactoredSpace, factor=0, leakage_tol: float = LEAKAGE_TOL):
    """Purity of the reduced state on one tensor factor of a factored eigenspace.

    ``factor`` selects the kept factor: 0 / "df" for C^{n_j}, 1 / "error" for D_j.
    Returns ``(purity, is_pure)``.
    """
    keep = _FACTOR_NAMES.get(factor, factor)
    rho = np.asarray(density, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    comp = factored.compress(rho)
    weight = float(np.real(np.trace(comp)))
    total = float(np.real(np.trace(rho)))
    outside = total - weight
    if outside > leakage_tol * total:
        raise LeakageError(
            f"{outside / total:.3e} of the state lies outside the factored subspace", outside / total
        )
    reduced = partial_trace(comp / weight, factored.dims, keep=keep)
    p = purity(reduced)
    return p, p >= 1 - PURE_TOL
