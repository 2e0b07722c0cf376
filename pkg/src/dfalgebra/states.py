"""Density-matrix utilities for bipartite spaces ordered ``A (x) B``."""

from __future__ import annotations

import numpy as np


def dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def partial_trace(state, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced density matrix of factor ``keep`` (0 or 1).

    ``state`` may be a vector (pure state) or a density matrix.
    """
    da, db = dims
    state = np.asarray(state, dtype=complex)
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    if state.ndim == 1:
        if state.size != da * db:
            raise ValueError(f"vector of size {state.size} does not match dims {dims}")
        m = state.reshape(da, db)
        return m @ m.conj().T if keep == 0 else m.T @ m.conj()
    if state.shape != (da * db, da * db):
        raise ValueError(f"matrix of shape {state.shape} does not match dims {dims}")
    t = state.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ibjb->ij", t)
    return np.einsum("aiaj->ij", t)


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    rho = np.asarray(rho)
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-14]
    return float(max(0.0, -np.sum(w * np.log(w)) / np.log(base)))


def fidelity(rho, sigma, pure_tol: float = 1e-12) -> float:
    """Uhlmann fidelity, squared convention: ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    When either argument is pure the exact overlap ``<psi|other|psi>`` is used;
    the general square-root route loses ~sqrt(eps) accuracy on rank-deficient
    inputs.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    for a, b in ((sigma, rho), (rho, sigma)):
        if purity(a) >= 1 - pure_tol:
            w, v = np.linalg.eigh(a)
            psi = v[:, -1]
            return float(np.real(psi.conj() @ b @ psi))
    w, v = np.linalg.eigh(rho)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(sq @ sigma @ sq)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)
