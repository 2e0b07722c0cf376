"""Total pseudospin of an N-qubit array and its Clebsch-Gordan decomposition.

Each S^2 eigenspace is factored as ``C^{n_j} (x) D_j``: a multiplicity space
(where the decoherence-free algebra acts) times one copy of the spin-j irrep
(where the collective errors act). Spin labels are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .pauli import max_abs, matrix_exponential, site_operator

MAX_QUBITS = 6
CLUSTER_TOL = 1e-8
EIGEN_TOL = 1e-10


def as_spin(j) -> Fraction:
    """Coerce ``1``, ``0.5``, ``"3/2"`` or a Fraction to a half-integer spin label."""
    f = Fraction(j) if not isinstance(j, float) else Fraction(j).limit_denominator(2)
    if f < 0 or (2 * f).denominator != 1:
        raise ValueError(f"{j!r} is not a non-negative half-integer")
    return f


def format_spin(j) -> str:
    return str(as_spin(j))


def admissible_spins(n_qubits: int) -> list[Fraction]:
    """Spins appearing for N qubits, highest first."""
    top = Fraction(n_qubits, 2)
    return [top - k for k in range(int(top) + 1)]


def spin_matrices(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standard spin-j matrices in the basis m = j, j-1, ..., -j (Condon-Shortley)."""
    j = as_spin(j)
    d = int(2 * j + 1)
    ms = [j - k for k in range(d)]
    sp = np.zeros((d, d), dtype=complex)
    for col in range(1, d):
        m = ms[col]
        sp[col - 1, col] = np.sqrt(float(j * (j + 1) - m * (m + 1)))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    sz = np.diag([float(m) for m in ms]).astype(complex)
    return sx, sy, sz


@dataclass(frozen=True)
class SpinOperators:
    n_qubits: int
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    s_squared: np.ndarray
    s_minus: np.ndarray

    @property
    def components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.s1, self.s2, self.s3

    @property
    def s_plus(self) -> np.ndarray:
        return self.s_minus.conj().T

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def total_spin(n_qubits: int) -> SpinOperators:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits!r}")
    comps = [
        0.5 * sum(site_operator(n_qubits, {site: i}) for site in range(1, n_qubits + 1))
        for i in (1, 2, 3)
    ]
    s2 = sum(c @ c for c in comps)
    return SpinOperators(n_qubits, *comps, s_squared=s2, s_minus=comps[0] - 1j * comps[1])


@dataclass(frozen=True)
class CGBlock:
    """All copies of D_j inside the N-qubit space.

    ``basis`` columns are the vectors |k,m> in (k, m descending) order, so
    column ``k * (2j+1) + (j - m)`` holds |k,m>.
    """

    j: Fraction
    multiplicity: int
    basis: np.ndarray = field(repr=False)

    @property
    def irrep_dim(self) -> int:
        return int(2 * self.j + 1)

    @property
    def dimension(self) -> int:
        return self.multiplicity * self.irrep_dim

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def vector(self, k: int, m) -> np.ndarray:
        """|k,m> with copy index k in 0..n_j-1."""
        m = Fraction(m)
        if not 0 <= k < self.multiplicity or abs(m) > self.j or (self.j - m).denominator != 1:
            raise IndexError(f"no vector |{k},{m}> in block j={self.j}")
        return self.basis[:, k * self.irrep_dim + int(self.j - m)]


@dataclass(frozen=True)
class CGDecomposition:
    n_qubits: int
    blocks: tuple[CGBlock, ...]

    def block(self, j) -> CGBlock:
        j = as_spin(j)
        for b in self.blocks:
            if b.j == j:
                return b
        raise KeyError(f"spin {j} does not occur for {self.n_qubits} qubits")

    @property
    def spins(self) -> list[Fraction]:
        return [b.j for b in self.blocks]

    def table(self) -> list[tuple[Fraction, int, int]]:
        return [(b.j, b.multiplicity, b.dimension) for b in self.blocks]

    def to_json(self, include_basis: bool = False) -> list[dict]:
        out = []
        for b in self.blocks:
            row = {"j": format_spin(b.j), "multiplicity": b.multiplicity, "dimension": b.dimension}
            if include_basis:
                row["basis"] = [[[float(z.real), float(z.imag)] for z in col] for col in b.basis.T]
            out.append(row)
        return out


def _kernel(a: np.ndarray, tol: float) -> np.ndarray:
    if a.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > tol))
    null = vh[rank:].conj().T
    if null.shape[1]:
        null, _ = np.linalg.qr(null)
    return null


def decompose(spins: SpinOperators, tol: float = CLUSTER_TOL) -> CGDecomposition:
    """Joint (S^2, S_3) eigenbasis built from highest-weight vectors.

    For each j the kernel of S_+ on the m = j weight space gives the
    orthonormal highest-weight vectors |k,j>; repeated, normalized application
    of S_- generates the rest of each copy.
    """
    weights = np.real(np.diag(spins.s3))
    sp, sm = spins.s_plus, spins.s_minus
    blocks = []
    for j in admissible_spins(spins.n_qubits):
        idx = np.flatnonzero(np.abs(weights - float(j)) < tol)
        hw = np.zeros((spins.dim, 0), dtype=complex)
        if idx.size:
            ker = _kernel(sp[:, idx], tol)
            hw = np.zeros((spins.dim, ker.shape[1]), dtype=complex)
            hw[idx] = ker
        n_j = hw.shape[1]
        if n_j == 0:
            continue
        d = int(2 * j + 1)
        cols = np.zeros((spins.dim, n_j * d), dtype=complex)
        for k in range(n_j):
            v = hw[:, k]
            for step in range(d):
                cols[:, k * d + step] = v
                if step + 1 < d:
                    v = sm @ v
                    v = v / np.linalg.norm(v)
        blocks.append(CGBlock(j, n_j, cols))
    decomp = CGDecomposition(spins.n_qubits, tuple(blocks))
    _audit(decomp, spins, tol)
    return decomp


def _audit(decomp: CGDecomposition, spins: SpinOperators, tol: float):
    total = sum(b.dimension for b in decomp.blocks)
    if total != spins.dim:
        raise np.linalg.LinAlgError(
            f"CG blocks cover {total} of {spins.dim} dimensions for N={spins.n_qubits}"
        )
    evals = np.linalg.eigvalsh(spins.s_squared)
    for b in decomp.blocks:
        cas = float(b.j * (b.j + 1))
        count = int(np.sum(np.abs(evals - cas) < tol))
        if count != b.dimension:
            raise np.linalg.LinAlgError(
                f"S^2 eigenvalue {cas} has degeneracy {count}, block j={b.j} has {b.dimension}"
            )
        V = b.basis
        ms = np.tile([float(b.j - k) for k in range(b.irrep_dim)], b.multiplicity)
        res = max(
            max_abs(spins.s_squared @ V - cas * V),
            max_abs(spins.s3 @ V - V * ms),
            max_abs(V.conj().T @ V - np.eye(V.shape[1])),
        )
        if res > EIGEN_TOL:
            raise np.linalg.LinAlgError(f"block j={b.j} fails eigen/orthonormality checks: {res:.2e}")


def multiplicity_formula(n_qubits: int, j) -> int:
    """Closed form n_j = C(N, N/2 - j) - C(N, N/2 - j - 1)."""
    j = as_spin(j)
    lower = Fraction(n_qubits, 2) - j
    if lower < 0 or lower.denominator != 1:
        raise ValueError(f"spin {j} is not admissible for {n_qubits} qubits")
    k = int(lower)
    return comb(n_qubits, k) - (comb(n_qubits, k - 1) if k >= 1 else 0)


@dataclass(frozen=True)
class FactoredSpace:
    """Isometry V: C^{mult_dim} (x) C^{irrep_dim} -> ambient space.

    The first tensor factor carries the decoherence-free algebra, the second
    the error algebra.
    """

    isometry: np.ndarray = field(repr=False)
    mult_dim: int
    irrep_dim: int
    j: Fraction | None = None
    label: str = ""

    def __post_init__(self):
        if self.isometry.shape[1] != self.mult_dim * self.irrep_dim:
            raise ValueError("isometry width does not match mult_dim * irrep_dim")

    @property
    def ambient_dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return self.mult_dim, self.irrep_dim

    @property
    def projector(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T

    def compress(self, op) -> np.ndarray:
        """V^dagger O V in factored coordinates."""
        V = self.isometry
        return V.conj().T @ np.asarray(op) @ V

    def embed(self, op) -> np.ndarray:
        V = self.isometry
        return V @ np.asarray(op) @ V.conj().T

    def split(self, op, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray, float]:
        """Write V^dagger O V as ``A (x) 1 + 1 (x) B``.

        Returns ``(A, B, residual)`` with the trace shared evenly so the
        decomposition is unique; ``residual`` is the max-entry misfit.
        """
        n, d = self.dims
        m = self.compress(op).reshape(n, d, n, d)
        a = np.einsum("iaja->ij", m) / d
        b = np.einsum("kakb->ab", m) / n
        shift = np.trace(a) / n
        a = a - shift * np.eye(n) / 2
        b = b - shift * np.eye(d) / 2
        fit = np.kron(a, np.eye(d)) + np.kron(np.eye(n), b)
        return a, b, max_abs(m.reshape(n * d, n * d) - fit)


def factorize(decomp: CGDecomposition, j) -> FactoredSpace:
    b = decomp.block(j)
    return FactoredSpace(
        b.basis, b.multiplicity, b.irrep_dim, j=b.j, label=f"N={decomp.n_qubits} j={b.j}"
    )


@dataclass
class ConjugationReport:
    max_deviation: float
    actions: dict = field(default_factory=dict)

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_deviation <= tol


def conjugation_action_check(decomp, spins, times=None, seed: int = 0) -> ConjugationReport:
    """Check V^dagger exp(-i t S_i) V = 1 (x) Q_i(t) on every block.

    ``actions`` maps ``(j, i, t)`` to the extracted irrep unitary Q.
    """
    if times is None:
        times = np.random.default_rng(seed).uniform(-3, 3, size=3)
    worst = 0.0
    actions = {}
    for b in decomp.blocks:
        fs = factorize(decomp, b.j)
        n, d = fs.dims
        for i, s in enumerate(spins.components, start=1):
            for t in times:
                m = fs.compress(matrix_exponential(s, float(t)))
                q = np.einsum("kakb->ab", m.reshape(n, d, n, d)) / n
                dev = max(max_abs(m - np.kron(np.eye(n), q)), max_abs(q @ q.conj().T - np.eye(d)))
                worst = max(worst, dev)
                actions[(b.j, i, float(t))] = q
    return ConjugationReport(worst, actions)
