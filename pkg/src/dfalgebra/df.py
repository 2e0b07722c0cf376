"""Decoherence-free algebras: explicit generators, relation checks, commutants.

Generator formulas are implemented exactly as published (``variant="printed"``).
Where those formulas fail their claimed relations, :func:`verify_relations`
reports the failure; a ``variant="repaired"`` form is available for the
four-qubit sets and is never substituted implicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np

from .errors import ContractViolation
from .pauli import (
    HERMITIAN_TOL,
    is_hermitian,
    levi_civita,
    max_abs,
    realize,
    site_operator,
)
from .spin import FactoredSpace, as_spin, decompose, factorize, total_spin

RANK_TOL = 1e-9


@dataclass(frozen=True)
class GeneratorSet:
    """Named Hermitian generators, optionally restricted to a factored subspace.

    ``errors`` holds the ambient error generators the set must commute with;
    ``pauli_like`` marks sets expected to satisfy {t_i, t_j} = 2 delta_ij.
    """

    name: str
    generators: dict[str, np.ndarray] = field(repr=False)
    ambient_dim: int
    factored: FactoredSpace | None = field(default=None, repr=False)
    errors: tuple[np.ndarray, ...] = field(default=(), repr=False)
    pauli_like: bool = False

    def __post_init__(self):
        for label, g in self.generators.items():
            if g.shape != (self.ambient_dim, self.ambient_dim):
                raise ValueError(f"generator {label} has shape {g.shape}")
            if not is_hermitian(g, HERMITIAN_TOL):
                raise ContractViolation(f"generator {label} of {self.name} is not Hermitian")

    @property
    def labels(self) -> list[str]:
        return list(self.generators)

    def restricted(self) -> list[np.ndarray]:
        """V^dagger G V for each generator (ambient matrices if unrestricted)."""
        gens = list(self.generators.values())
        if self.factored is None:
            return gens
        return [self.factored.compress(g) for g in gens]

    def restricted_errors(self) -> list[np.ndarray]:
        if self.factored is None:
            return list(self.errors)
        return [self.factored.compress(e) for e in self.errors]


def two_qubit_pi_tau() -> tuple[GeneratorSet, GeneratorSet]:
    """The pi and tau triples on two qubits; each is the other's error set."""
    pi = {
        "pi1": realize((0, 1)),
        "pi2": realize((3, 2)),
        "pi3": realize((3, 3)),
    }
    tau = {
        "tau1": realize((2, 1)),
        "tau2": realize((3, 0)),
        "tau3": realize((1, 1)),
    }
    return (
        GeneratorSet("two-qubit-pi", pi, 4, errors=tuple(tau.values()), pauli_like=True),
        GeneratorSet("two-qubit-tau", tau, 4, errors=tuple(pi.values()), pauli_like=True),
    )


def _canonical_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    first = v[np.flatnonzero(np.abs(v) > tol)[0]]
    return v * (abs(first) / first)


@dataclass(frozen=True)
class BellTable:
    """Joint (pi_3, tau_3) eigenvectors |j,k) in the product basis.

    Product basis order is (|1,1>, |1,-1>, |-1,1>, |-1,-1>) with sigma_3|1> = |1>.
    """

    vectors: dict[tuple[int, int], np.ndarray] = field(repr=False)
    eigen_residual: float

    def matrix(self) -> np.ndarray:
        return np.column_stack([self.vectors[key] for key in BELL_ORDER])


BELL_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def bell_identification() -> BellTable:
    pi, tau = two_qubit_pi_tau()
    p3, t3 = pi.generators["pi3"], tau.generators["tau3"]
    eye = np.eye(4)
    vectors = {}
    residual = 0.0
    for j, k in BELL_ORDER:
        proj = (eye + j * p3) @ (eye + k * t3) / 4
        col = proj[:, np.argmax(np.linalg.norm(proj, axis=0))]
        v = _canonical_phase(col / np.linalg.norm(col))
        residual = max(residual, max_abs(p3 @ v - j * v), max_abs(t3 @ v - k * v))
        vectors[(j, k)] = v
    return BellTable(vectors, residual)


def two_qubit_factored_space() -> FactoredSpace:
    """|j,k) = |j) (x) |k): pi acts on the first factor, tau on the second."""
    return FactoredSpace(bell_identification().matrix(), 2, 2, label="pi (x) tau")


def bond_operator(j: int, k: int, n_qubits: int) -> np.ndarray:
    """b_jk = sum_i sigma_i^(j) sigma_i^(k), sites 1-indexed."""
    if j == k or not (1 <= j <= n_qubits and 1 <= k <= n_qubits):
        raise ValueError(f"invalid bond ({j}, {k}) on {n_qubits} qubits")
    return sum(site_operator(n_qubits, {j: i, k: i}) for i in (1, 2, 3))


def epsilon_operator(sites: Sequence[int], n_qubits: int) -> np.ndarray:
    """E_jkl = sum eps_abc sigma_a^(j) sigma_b^(k) sigma_c^(l), identity elsewhere."""
    sites = tuple(sites)
    if len(sites) != 3 or len(set(sites)) != 3:
        raise ValueError(f"epsilon operator needs three distinct sites, got {sites}")
    if not all(1 <= s <= n_qubits for s in sites):
        raise ValueError(f"sites {sites} outside 1..{n_qubits}")
    j, k, l = sites
    return sum(
        levi_civita(a, b, c) * site_operator(n_qubits, {j: a, k: b, l: c})
        for a, b, c in itertools.permutations((1, 2, 3))
    )


def _restricted_set(name, gens, n_qubits, j, pauli_like) -> GeneratorSet:
    spins = total_spin(n_qubits)
    fs = factorize(decompose(spins), j)
    return GeneratorSet(
        name, gens, 2**n_qubits, factored=fs, errors=spins.components, pauli_like=pauli_like
    )


def three_qubit_tau() -> GeneratorSet:
    """DF qubit generators on the j = 1/2 eigenspace of three qubits."""
    b = lambda j, k: bond_operator(j, k, 3)  # noqa: E731
    gens = {
        "tau1": (b(1, 2) - b(2, 3)) / sqrt(12),
        "tau2": epsilon_operator((1, 2, 3), 3) / sqrt(12),
        "tau3": (b(2, 3) - 2 * b(3, 1) + b(1, 2)) / 6,
    }
    return _restricted_set("three-qubit", gens, 3, as_spin("1/2"), True)


def four_qubit_tau_j0(variant: str = "printed") -> GeneratorSet:
    """DF qubit generators on the j = 0 eigenspace of four qubits.

    The printed tau3 = -(b14 + b12 + b13)/3 reduces to the identity on H_0.
    ``variant="repaired"`` uses tau3 = (b14 + b12 - 2 b13)/6 instead.
    """
    b = lambda j, k: bond_operator(j, k, 4)  # noqa: E731
    e = lambda *s: epsilon_operator(s, 4)  # noqa: E731
    gens = {
        "tau1": (b(1, 4) + b(2, 3) - b(1, 2) - b(3, 4)) / (4 * sqrt(3)),
        "tau2": (e(2, 3, 4) + e(1, 2, 4) - e(1, 3, 4) - e(1, 2, 3)) / (8 * sqrt(3)),
    }
    if variant == "printed":
        gens["tau3"] = -(b(1, 4) + b(1, 2) + b(1, 3)) / 3
    elif variant == "repaired":
        gens["tau3"] = (b(1, 4) + b(1, 2) - 2 * b(1, 3)) / 6
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _restricted_set(f"four-qubit-j0[{variant}]", gens, 4, 0, True)


def four_qubit_tau_j1(variant: str = "printed") -> GeneratorSet:
    """DF qutrit generators on the j = 1 eigenspace of four qubits.

    As printed these close as [t_i, t_j] = -i eps_ijk t_k with Casimir 2;
    ``variant="repaired"`` rescales each generator by -2.
    """
    e = lambda *s: epsilon_operator(s, 4)  # noqa: E731
    gens = {
        "tau1": e(1, 3, 4) / (-2 * sqrt(3)),
        "tau2": (e(1, 3, 4) - 3 * e(1, 2, 4)) / (4 * sqrt(6)),
        "tau3": (e(2, 3, 4) + e(1, 2, 3)) / (4 * sqrt(2)),
    }
    if variant == "repaired":
        gens = {k: -2 * v for k, v in gens.items()}
    elif variant != "printed":
        raise ValueError(f"unknown variant {variant!r}")
    return _restricted_set(f"four-qubit-j1[{variant}]", gens, 4, 1, False)


@dataclass
class RelationReport:
    set_name: str
    max_su2_violation: float
    casimir_value: float
    casimir_deviation: float
    df_condition_violation: float | None = None
    anticommutator_deviation: float | None = None

    def deviations(self) -> dict[str, float]:
        out = {
            "su2": self.max_su2_violation,
            "casimir": self.casimir_deviation,
        }
        if self.df_condition_violation is not None:
            out["df_condition"] = self.df_condition_violation
        if self.anticommutator_deviation is not None:
            out["anticommutator"] = self.anticommutator_deviation
        return out

    def passed(self, tol: float = 1e-12, expected_casimir: float | None = None) -> bool:
        ok = all(v <= tol for v in self.deviations().values())
        if expected_casimir is not None:
            ok = ok and abs(self.casimir_value - expected_casimir) <= tol
        return ok

    def to_json(self) -> dict:
        return asdict(self)


def verify_relations(g: GeneratorSet) -> RelationReport:
    """Pairwise su(2) deviations, fitted Casimir and DF-condition check (max-entry norm)."""
    t = g.restricted()
    d = t[0].shape[0]
    eye = np.eye(d)
    su2 = 0.0
    for i, j in itertools.product(range(3), repeat=2):
        rhs = sum(2j * levi_civita(i + 1, j + 1, k + 1) * t[k] for k in range(3))
        su2 = max(su2, max_abs(t[i] @ t[j] - t[j] @ t[i] - rhs))
    cas = sum(x @ x for x in t)
    c = float(np.real(np.trace(cas))) / d
    report = RelationReport(g.name, su2, c, max_abs(cas - c * eye))
    errs = g.restricted_errors()
    if errs:
        report.df_condition_violation = max(
            max_abs(x @ s - s @ x) for x in t for s in errs
        )
    if g.pauli_like:
        report.anticommutator_deviation = max(
            max_abs(t[i] @ t[j] + t[j] @ t[i] - 2 * (i == j) * eye)
            for i, j in itertools.product(range(3), repeat=2)
        )
    return report


@dataclass(frozen=True)
class CommutantBasis:
    basis: list[np.ndarray] = field(repr=False)
    subspace_dim: int

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def gram_rank(self, tol: float = RANK_TOL) -> int:
        if not self.basis:
            return 0
        m = np.array([b.ravel() for b in self.basis])
        return int(np.linalg.matrix_rank(m, tol=tol))


def _as_isometry(subspace) -> np.ndarray | None:
    if subspace is None:
        return None
    if isinstance(subspace, FactoredSpace):
        return subspace.isometry
    sub = np.asarray(subspace)
    if sub.shape[0] == sub.shape[1] and max_abs(sub @ sub - sub) < 1e-9 and is_hermitian(sub):
        w, v = np.linalg.eigh(sub)
        return v[:, w > 0.5]
    return sub


def commutant(errors, subspace=None, tol: float = RANK_TOL) -> CommutantBasis:
    """Basis of {X : [X, G] = 0 for every error generator G}.

    ``subspace`` may be a FactoredSpace, an isometry or an orthogonal projector;
    the generators are compressed onto it first, so the subspace must be
    invariant under them. Matrices are vectorized row-major, under which
    ``[X, G]`` maps to ``(1 (x) G^T - G (x) 1) vec(X)``.
    """
    gens = list(errors.generators.values()) if isinstance(errors, GeneratorSet) else list(errors)
    for g in gens:
        if not is_hermitian(g):
            raise ContractViolation("commutant expects Hermitian error generators")
    V = _as_isometry(subspace)
    if V is not None:
        gens = [V.conj().T @ g @ V for g in gens]
    d = gens[0].shape[0]
    eye = np.eye(d)
    stacked = np.vstack([np.kron(eye, g.T) - np.kron(g, eye) for g in gens])
    _, s, vh = np.linalg.svd(stacked)
    rank = int(np.sum(s > tol))
    null = vh[rank:].conj()
    return CommutantBasis([v.reshape(d, d) for v in null], d)


def span_dimension(ops: Sequence[np.ndarray], tol: float = RANK_TOL) -> int:
    m = np.array([np.asarray(o).ravel() for o in ops])
    return int(np.linalg.matrix_rank(m, tol=tol))


def pi_tau_product_span() -> int:
    """Dimension spanned by pi_a tau_b (a, b in 0..3, index 0 = identity)."""
    pi, tau = two_qubit_pi_tau()
    ps = [np.eye(4), *pi.generators.values()]
    ts = [np.eye(4), *tau.generators.values()]
    return span_dimension([p @ t for p in ps for t in ts])


def multiplicity_action_residual(g: GeneratorSet) -> float:
    """How far each restricted generator is from the form A (x) 1 on C^{n_j} (x) D_j."""
    if g.factored is None:
        raise ValueError(f"{g.name} has no factored subspace")
    n, d = g.factored.dims
    worst = 0.0
    for m in g.restricted():
        a = np.einsum("iaja->ij", m.reshape(n, d, n, d)) / d
        worst = max(worst, max_abs(m - np.kron(a, np.eye(d))))
    return worst


GENERATOR_SETS = {
    "two-qubit": lambda variant="printed": list(two_qubit_pi_tau()),
    "three-qubit": lambda variant="printed": [three_qubit_tau()],
    "four-qubit-j0": lambda variant="printed": [four_qubit_tau_j0(variant)],
    "four-qubit-j1": lambda variant="printed": [four_qubit_tau_j1(variant)],
}

EXPECTED_CASIMIR = {
    "two-qubit-pi": 3.0,
    "two-qubit-tau": 3.0,
    "three-qubit": 3.0,
    "four-qubit-j0": 3.0,
    "four-qubit-j1": 8.0,
}


def expected_casimir(set_name: str) -> float:
    return EXPECTED_CASIMIR[set_name.split("[")[0]]
