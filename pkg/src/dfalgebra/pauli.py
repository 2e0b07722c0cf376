"""Dense Pauli-string operators and the matrix kernel shared by every module.

Qubit ordering: site 1 is the leftmost Kronecker factor, i.e. it owns the most
significant bit of the computational index. Basis state ``|0>`` is the
``+1`` eigenvector of sigma_3. Every other module relies on this convention.

Operators are plain complex ``numpy`` arrays. :class:`Operator` wraps one when a
label, validation or JSON serialization is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation

HERMITIAN_TOL = 1e-10
IDENTITY_TOL = 1e-12

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULI.setflags(write=False)


def levi_civita(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on labels 1..3."""
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1


def pauli_matrix(i: int) -> np.ndarray:
    """sigma_i for i in 0..3 (sigma_0 is the identity)."""
    if not isinstance(i, (int, np.integer)) or not 0 <= i <= 3:
        raise ValueError(f"Pauli index must be in 0..3, got {i!r}")
    return PAULI[i].copy()


def _single_product(a: int, b: int) -> tuple[complex, int]:
    if a == 0:
        return 1, b
    if b == 0:
        return 1, a
    if a == b:
        return 1, 0
    c = 6 - a - b
    return 1j * levi_civita(a, b, c), c


@dataclass(frozen=True)
class PauliString:
    """Word over {0,1,2,3}; ``labels[0]`` acts on qubit 1."""

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise ValueError("a Pauli string needs at least one qubit")
        if any(x not in (0, 1, 2, 3) for x in labels):
            raise ValueError(f"Pauli labels must be in 0..3, got {labels}")
        object.__setattr__(self, "labels", labels)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @classmethod
    def from_sites(cls, n_qubits: int, sites: Mapping[int, int]) -> "PauliString":
        """Identity everywhere except ``sites`` (1-indexed site -> label)."""
        labels = [0] * n_qubits
        for site, lab in sites.items():
            if not 1 <= site <= n_qubits:
                raise ValueError(f"site {site} outside 1..{n_qubits}")
            labels[site - 1] = lab
        return cls(tuple(labels))

    def product(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        """Symbol-wise product: ``self * other = phase * result``."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("Pauli strings act on different numbers of qubits")
        phase = 1 + 0j
        out = []
        for a, b in zip(self.labels, other.labels):
            ph, c = _single_product(a, b)
            phase *= ph
            out.append(c)
        return phase, PauliString(tuple(out))

    def __str__(self):
        return "".join("IXYZ"[x] for x in self.labels)


def realize(p: PauliString | Sequence[int]) -> np.ndarray:
    """Dense 2^N x 2^N matrix of a Pauli string."""
    if not isinstance(p, PauliString):
        p = PauliString(tuple(p))
    return reduce(np.kron, (PAULI[i] for i in p.labels))


def site_operator(n_qubits: int, sites: Mapping[int, int]) -> np.ndarray:
    return realize(PauliString.from_sites(n_qubits, sites))


def all_pauli_strings(n_qubits: int):
    """All 4^N Pauli strings in lexicographic label order."""
    for idx in np.ndindex(*(4,) * n_qubits):
        yield PauliString(idx)


def _check_square_pair(a: np.ndarray, b: np.ndarray):
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def multiply(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    _check_square_pair(a, b)
    return a @ b


def adjoint(a) -> np.ndarray:
    return np.asarray(a).conj().T


def commutator(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    _check_square_pair(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    _check_square_pair(a, b)
    return a @ b + b @ a


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a), "fro"))


def max_abs(a) -> float:
    """Max-entry norm, the metric for algebraic identity checks."""
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and max_abs(a - a.conj().T) <= tol


def is_unitary(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return max_abs(a @ a.conj().T - np.eye(a.shape[0])) <= tol


def matrix_exponential(h, t: float, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """``exp(-i t h)`` for Hermitian ``h`` via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ContractViolation("matrix_exponential needs a Hermitian generator")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


@dataclass(frozen=True)
class Operator:
    """A labeled dense operator with optional verified structure flags."""

    matrix: np.ndarray
    label: str = ""
    hermitian: bool = False
    unitary: bool = False
    tol: float = field(default=IDENTITY_TOL, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        if self.hermitian and not is_hermitian(m, self.tol):
            raise ContractViolation(f"operator {self.label!r} flagged Hermitian but is not")
        if self.unitary and not is_unitary(m, self.tol):
            raise ContractViolation(f"operator {self.label!r} flagged unitary but is not")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        entries = [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]
        out = {"dim": self.dim, "entries": entries}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Operator":
        dim = int(data["dim"])
        flat = np.array([complex(re, im) for re, im in data["entries"]])
        if flat.size != dim * dim:
            raise ValueError(f"expected {dim * dim} entries, got {flat.size}")
        return cls(flat.reshape(dim, dim), label=data.get("label", ""))
