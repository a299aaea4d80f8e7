"""Shared helpers for the test suite."""

import numpy as np
from scipy.linalg import block_diag

import gmarginal as gm


def rotation2(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def rand_local_symplectic(rng, n):
    """Random block-diagonal symplectic: one rotation-squeeze-rotation per mode."""
    blocks = []
    for _ in range(n):
        a, b = rng.uniform(0.0, 2.0 * np.pi, size=2)
        r = rng.uniform(-0.6, 0.6)
        blocks.append(rotation2(a) @ np.diag([np.exp(r), np.exp(-r)]) @ rotation2(b))
    return block_diag(*blocks)


def off_block_max(W):
    """Largest entry (max-norm) over all off-diagonal 2x2 mode blocks."""
    n = W.shape[0] // 2
    worst = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            worst = max(worst, np.abs(W[2 * j : 2 * j + 2, 2 * k : 2 * k + 2]).max())
    return worst


def local_params(V):
    """sqrt(det) of each diagonal 2x2 block, in mode order."""
    n = V.shape[0] // 2
    return np.array(
        [np.sqrt(np.linalg.det(V[2 * j : 2 * j + 2, 2 * j : 2 * j + 2])) for j in range(n)]
    )


def block_isotropy_max(W):
    """Largest deviation of any diagonal block from a multiple of the identity."""
    n = W.shape[0] // 2
    worst = 0.0
    for j in range(n):
        B = W[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]
        c = 0.5 * (B[0, 0] + B[1, 1])
        worst = max(worst, np.abs(B - c * np.eye(2)).max())
    return worst


def random_compatible_quadruple(rng, gap=0.05):
    """Draw (m1, m2, k1, k2), sorted pairs, realizable by a two-mode state.

    The global pair is kept non-degenerate (k2 - k1 >= gap).  The local pair
    is sampled directly from the region cut out by the three two-mode
    compatibility inequalities, so no rejection loop is needed.
    """
    k1 = rng.uniform(1.0, 3.0)
    k2 = k1 + rng.uniform(gap, 2.0)
    m1 = k1 + rng.uniform(0.0, 2.0)
    lo = max(m1, k1 + k2 - m1)
    hi = m1 + (k2 - k1)
    m2 = rng.uniform(lo, hi)
    return m1, m2, k1, k2
