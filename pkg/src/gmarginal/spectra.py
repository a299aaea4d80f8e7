"""Symplectic spectra, normal-form factorization, dominance test, thermal eigenvalues."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .exceptions import InvalidCovarianceError, NumericalError
from .symplectic import DEFAULT_TOL, symplectic_form, validate_covariance


@dataclass(frozen=True)
class DominanceCertificate:
    """Witness of the spectral compatibility test.

    ``partial_sum_slacks[k]`` is sum(m_sorted[:k+1]) - sum(kappa_sorted[:k+1])
    and ``tail_slack`` is
    (kappa_n - sum(kappa_sorted[:-1])) - (m_n - sum(m_sorted[:-1])).
    The pair is compatible exactly when every slack is nonnegative.
    """

    kappa_sorted: np.ndarray
    m_sorted: np.ndarray
    partial_sum_slacks: np.ndarray
    tail_slack: float
    compatible: bool


@dataclass(frozen=True)
class WilliamsonFactorization:
    """Symplectic congruence V = S diag(k1, k1, ..., kn, kn) S^T."""

    S: np.ndarray
    kappa: np.ndarray


def _sqrt_spd(V: np.ndarray) -> np.ndarray:
    """Symmetric square root of a symmetric positive definite matrix."""
    w, U = np.linalg.eigh(V)
    if w[0] <= 0.0:
        raise InvalidCovarianceError("covariance matrix is not positive definite")
    return (U * np.sqrt(w)) @ U.T


def symplectic_spectrum(V: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Symplectic eigenvalues of a covariance matrix, sorted nondecreasing.

    Computed as the positive eigenvalues of the Hermitian matrix
    i * V^(1/2) Omega V^(1/2), which avoids the non-normal product Omega V.
    """
    V = validate_covariance(V, tol)
    n = V.shape[0] // 2
    root = _sqrt_spd(V)
    A = root @ symplectic_form(n) @ root
    A = 0.5 * (A - A.T)
    w = np.linalg.eigvalsh(1j * A)
    return w[n:].copy()


def williamson(V: np.ndarray, tol: float = DEFAULT_TOL) -> WilliamsonFactorization:
    """Factor V as S diag(kappa pairs) S^T with S symplectic and kappa sorted.

    The antisymmetric matrix V^(1/2) Omega V^(1/2) is brought to its real
    canonical block form by an orthogonal congruence (a real Schur
    decomposition); wrong-handed 2x2 blocks are fixed by swapping their two
    columns, blocks are sorted by eigenvalue, and S is assembled as
    V^(1/2) O D^(-1/2).
    """
    V = validate_covariance(V, tol)
    n = V.shape[0] // 2
    root = _sqrt_spd(V)
    omega = symplectic_form(n)
    A = root @ omega @ root
    A = 0.5 * (A - A.T)
    T, Z = schur(A, output="real")
    kappa = np.empty(n)
    for j in range(n):
        a, b = 2 * j, 2 * j + 1
        if T[a, b] * T[b, a] >= 0.0:
            raise NumericalError("canonical block structure broke down; matrix may be near-singular")
        if T[a, b] < 0.0:
            Z[:, [a, b]] = Z[:, [b, a]]
            kappa[j] = -T[a, b]
        else:
            kappa[j] = T[a, b]
    order = np.argsort(kappa, kind="stable")
    kappa = kappa[order]
    cols = np.empty(2 * n, dtype=int)
    cols[0::2] = 2 * order
    cols[1::2] = 2 * order + 1
    O = Z[:, cols]
    S = root @ (O / np.sqrt(np.repeat(kappa, 2)))
    scale = 1.0 + float(np.max(np.abs(V)))
    res_fact = float(np.max(np.abs(S @ np.diag(np.repeat(kappa, 2)) @ S.T - V)))
    res_symp = float(np.max(np.abs(S @ omega @ S.T - omega)))
    if res_fact > 1e-6 * scale or res_symp > 1e-6 * scale:
        raise NumericalError("normal-form factorization did not reach the required accuracy")
    return WilliamsonFactorization(S=S, kappa=kappa)


def dominates(kappa, m) -> DominanceCertificate:
    """Test whether local parameters m are reachable from global parameters kappa.

    Both vectors are sorted internally.  Reachability requires every partial
    sum of m to weakly exceed the matching partial sum of kappa, together
    with one tail condition bounding how far the largest entry of m may
    stand out; the certificate records all slacks.
    """
    kappa = np.sort(np.asarray(kappa, dtype=float))
    m = np.sort(np.asarray(m, dtype=float))
    if kappa.ndim != 1 or kappa.shape != m.shape or kappa.size == 0:
        raise ValueError("expected two equal-length, nonempty vectors")
    if np.any(kappa <= 0.0) or np.any(m <= 0.0):
        raise ValueError("spectral parameters must be positive")
    partial = np.cumsum(m) - np.cumsum(kappa)
    tail = float((kappa[-1] - kappa[:-1].sum()) - (m[-1] - m[:-1].sum()))
    compatible = bool(np.all(partial >= 0.0) and tail >= 0.0)
    return DominanceCertificate(
        kappa_sorted=kappa,
        m_sorted=m,
        partial_sum_slacks=partial,
        tail_slack=tail,
        compatible=compatible,
    )


def thermal_eigenvalues(params, count: int):
    """Largest ``count`` eigenvalues of a product thermal state, descending.

    Each mode with local parameter m contributes a geometric ladder with
    ratio xi = (m - 1) / (m + 1); the global eigenvalues are the products
    prod_j (1 - xi_j) xi_j^(k_j) over occupation multi-indices k.  A
    best-first expansion over the multi-index lattice yields the top values
    without a fixed enumeration cutoff.  Ties are broken by lexicographic
    multi-index order.

    Returns:
        List of (eigenvalue, multi_index) pairs.
    """
    p = np.asarray(params, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("expected a nonempty vector of local parameters")
    if np.any(p < 1.0):
        raise ValueError("local thermal parameters must be at least 1")
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ValueError("count must be a positive integer")
    n = p.size
    xi = (p - 1.0) / (p + 1.0)
    base = float(np.prod(1.0 - xi))
    heap = [(-base, (0,) * n)]
    out = []
    while heap and len(out) < count:
        negval, idx = heapq.heappop(heap)
        out.append((-negval, idx))
        # A multi-index is generated exactly once: only coordinates at or
        # after its last nonzero entry may be incremented.
        first = 0
        for j in range(n - 1, -1, -1):
            if idx[j] > 0:
                first = j
                break
        for j in range(first, n):
            child = idx[:j] + (idx[j] + 1,) + idx[j + 1 :]
            heapq.heappush(heap, (negval * float(xi[j]), child))
    return out
