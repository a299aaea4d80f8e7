"""Symplectic form, elementary two-mode generators, and random state construction.

All matrices use the quadrature ordering q1, p1, q2, p2, ..., qn, pn, so a
covariance matrix of an n-mode state is 2n x 2n and mode j occupies rows and
columns 2j-2 and 2j-1.  Mode indices in the public API are 1-based.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InvalidCovarianceError

#: Default absolute tolerance for symmetry / symplecticity residuals.
DEFAULT_TOL = 1e-10

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
_Z2 = np.array([[1.0, 0.0], [0.0, -1.0]])
_I2 = np.eye(2)


def mode_slice(j: int) -> slice:
    """Slice selecting the (q, p) rows/columns of 1-based mode j."""
    return slice(2 * (j - 1), 2 * j)


def symplectic_form(n: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form (direct sum of [[0, 1], [-1, 0]])."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("mode count must be a positive integer")
    omega = np.zeros((2 * n, 2 * n))
    for j in range(n):
        omega[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = _J2
    return omega


def is_symplectic(S: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Check whether S * Omega * S^T = Omega within an absolute max-norm tolerance."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("expected a square matrix")
    if S.shape[0] == 0 or S.shape[0] % 2 != 0:
        raise ValueError("expected an even, nonzero dimension")
    omega = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S @ omega @ S.T - omega))) <= tol


def symplectic_inverse(S: np.ndarray) -> np.ndarray:
    """Inverse of a symplectic matrix, computed as -Omega S^T Omega."""
    S = np.asarray(S, dtype=float)
    omega = symplectic_form(S.shape[0] // 2)
    return -omega @ S.T @ omega


def _check_pair(j: int, k: int, n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError("a two-mode generator needs at least two modes")
    for idx in (j, k):
        if not isinstance(idx, (int, np.integer)) or idx < 1 or idx > n:
            raise ValueError(f"mode index {idx} out of range 1..{n}")
    if j == k:
        raise ValueError("the two mode indices must differ")


def _bs_block(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.block([[c * _I2, s * _I2], [-s * _I2, c * _I2]])


def _sq_block(mu: float) -> np.ndarray:
    c, s = np.cosh(mu), np.sinh(mu)
    return np.block([[c * _I2, s * _Z2], [s * _Z2, c * _I2]])


def expand_two_mode(S4: np.ndarray, j: int, k: int, n: int) -> np.ndarray:
    """Embed a 4x4 symplectic acting on modes (j, k) into a 2n x 2n identity."""
    _check_pair(j, k, n)
    S4 = np.asarray(S4, dtype=float)
    if S4.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    S = np.eye(2 * n)
    sj, sk = mode_slice(j), mode_slice(k)
    S[sj, sj] = S4[0:2, 0:2]
    S[sj, sk] = S4[0:2, 2:4]
    S[sk, sj] = S4[2:4, 0:2]
    S[sk, sk] = S4[2:4, 2:4]
    return S


def beam_splitter_pair(theta: float, j: int, k: int, n: int) -> np.ndarray:
    """Beam splitter of angle theta acting on modes (j, k) of an n-mode system.

    On an uncorrelated diagonal pair diag(a, a, b, b) the congruence
    S V S^T keeps the sum a + b exact and scales the difference by
    cos(2 theta); theta = pi/2 swaps the two modes.
    """
    return expand_two_mode(_bs_block(float(theta)), j, k, n)


def squeezer_pair(mu: float, j: int, k: int, n: int) -> np.ndarray:
    """Two-mode squeezer of parameter mu acting on modes (j, k).

    On an uncorrelated diagonal pair diag(a, a, b, b) the congruence keeps
    the difference a - b exact and scales the sum by cosh(2 mu).
    """
    return expand_two_mode(_sq_block(float(mu)), j, k, n)


def validate_covariance(V: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate shape/symmetry of a covariance matrix and return it symmetrized.

    Positive definiteness is not checked here; routines that need it check
    it where the factorization happens.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InvalidCovarianceError("covariance matrix must be square")
    if V.shape[0] == 0 or V.shape[0] % 2 != 0:
        raise InvalidCovarianceError("covariance matrix must be 2n x 2n with n >= 1")
    if not np.all(np.isfinite(V)):
        raise InvalidCovarianceError("covariance matrix contains non-finite entries")
    scale = 1.0 + float(np.max(np.abs(V)))
    if float(np.max(np.abs(V - V.T))) > tol * scale:
        raise InvalidCovarianceError("covariance matrix is not symmetric")
    return 0.5 * (V + V.T)


def local_normal_form(V: np.ndarray, tol: float = DEFAULT_TOL):
    """Bring every single-mode block to an isotropic multiple of the identity.

    Args:
        V: 2n x 2n covariance matrix.
        tol: symmetry tolerance used during validation.

    Returns:
        (V2, locals, m) where ``locals`` is a list of per-mode 2x2
        symplectics with unit determinant, ``V2 = L V L^T`` for the direct
        sum L of those blocks, every diagonal block of V2 equals m_j * I,
        and ``m`` holds the local parameters sqrt(det B_j) in mode order.
    """
    V = validate_covariance(V, tol)
    n = V.shape[0] // 2
    locs = []
    m = np.empty(n)
    L = np.zeros_like(V)
    for j in range(n):
        s = mode_slice(j + 1)
        B = V[s, s]
        det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
        if det <= 0.0 or B[0, 0] <= 0.0:
            raise InvalidCovarianceError(f"single-mode block {j + 1} is not positive definite")
        w, U = np.linalg.eigh(B)
        if w[0] <= 0.0:
            raise InvalidCovarianceError(f"single-mode block {j + 1} is not positive definite")
        m[j] = np.sqrt(det)
        Lj = np.sqrt(m[j]) * ((U / np.sqrt(w)) @ U.T)
        locs.append(Lj)
        L[s, s] = Lj
    V2 = L @ V @ L.T
    return 0.5 * (V2 + V2.T), locs, m


def check_physical(V: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when the smallest symplectic eigenvalue of V is >= 1 - tol.

    Returns False (instead of raising) when V is not a valid covariance
    matrix, e.g. not positive definite.
    """
    from .spectra import symplectic_spectrum

    try:
        kappa = symplectic_spectrum(V, tol)
    except InvalidCovarianceError:
        return False
    return bool(kappa[0] >= 1.0 - tol)


def _rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def random_state(n: int, seed: int, kappa_range=(1.0, 4.0)):
    """Draw a reproducible random physical n-mode covariance matrix.

    Global parameters are drawn uniformly from ``kappa_range`` (whose lower
    bound must be at least 1) and scrambled by a product of 4 n^2 random
    elementary symplectics: beam splitters with theta in [0, 2 pi), two-mode
    squeezers with mu in [0, 0.5], and local rotations/squeezes.

    Returns:
        (V, S_used, kappa_used) with V = S_used D S_used^T, where D is the
        diagonal matrix built from kappa_used.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("mode count must be a positive integer")
    lo, hi = float(kappa_range[0]), float(kappa_range[1])
    if lo < 1.0:
        raise ValueError("the lower end of kappa_range must be at least 1")
    if hi < lo:
        raise ValueError("kappa_range must be a nondecreasing interval")
    rng = np.random.default_rng(seed)
    kappa = rng.uniform(lo, hi, size=n)
    S = np.eye(2 * n)
    kinds = ("bs", "rot", "sq2", "sq1") if n >= 2 else ("rot", "sq1")
    probs = (0.4, 0.25, 0.2, 0.15) if n >= 2 else (0.6, 0.4)
    for _ in range(4 * n * n):
        kind = rng.choice(kinds, p=probs)
        if kind == "bs":
            j, k = np.sort(rng.choice(n, size=2, replace=False)) + 1
            G = beam_splitter_pair(rng.uniform(0.0, 2.0 * np.pi), int(j), int(k), n)
        elif kind == "sq2":
            j, k = np.sort(rng.choice(n, size=2, replace=False)) + 1
            G = squeezer_pair(rng.uniform(0.0, 0.5), int(j), int(k), n)
        elif kind == "rot":
            j = int(rng.integers(1, n + 1))
            G = np.eye(2 * n)
            G[mode_slice(j), mode_slice(j)] = _rotation(rng.uniform(0.0, 2.0 * np.pi))
        else:
            j = int(rng.integers(1, n + 1))
            r = rng.uniform(0.0, 0.5)
            G = np.eye(2 * n)
            G[mode_slice(j), mode_slice(j)] = np.diag([np.exp(r), np.exp(-r)])
        S = G @ S
    V = S @ np.diag(np.repeat(kappa, 2)) @ S.T
    return 0.5 * (V + V.T), S, kappa
