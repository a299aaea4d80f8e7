"""Constructive solvers: pairwise normal-form iteration and spectrum synthesis.

``jacobi_decompose`` diagonalizes a covariance matrix by sweeping two-mode
pivots, driving the profit function prod_j sqrt(det B_j) down to the product
of the symplectic eigenvalues.  ``synthesize`` goes the other way: given
compatible global and local parameters it builds a state realizing them with
at most n - 1 two-mode transformations, scheduled in four stages:

    1. sum-preserving beam-splitter transfers among the first n - 1 modes,
       each finalizing one mode using a donor with enough surplus;
    2. squeezes against the last mode, raising a mode and the last mode
       together while the remaining sum gap allows it;
    3. at most one general two-mode transform absorbing the leftover gap;
    4. beam-splitter transfers between each remaining mode and the last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    IncompatibleSpectraError,
    InvalidCovarianceError,
    NumericalError,
    UnphysicalSpectrumError,
)
from .spectra import dominates, symplectic_spectrum, williamson
from .symplectic import (
    DEFAULT_TOL,
    beam_splitter_pair,
    check_physical,
    expand_two_mode,
    local_normal_form,
    mode_slice,
    squeezer_pair,
    symplectic_form,
    symplectic_inverse,
    validate_covariance,
)
from .two_mode import bs_param, pair_factor, reconstruct_two_mode, sq_param


@dataclass(frozen=True)
class JacobiStep:
    """One pivot: acting pair, off-block max-norm before, profit after."""

    pair: tuple
    off_norm: float
    profit: float


@dataclass(frozen=True)
class JacobiTrace:
    steps: list
    sweeps: int
    converged: bool
    initial_profit: float


@dataclass(frozen=True)
class SynthesisStep:
    """One scheduled transform and the diagonal values it leaves behind."""

    stage: int
    kind: str
    pair: tuple
    param: object
    transfer: float
    diag_after: list


@dataclass(frozen=True)
class SynthesisTrace:
    steps: list
    stage_counts: tuple
    stage1_finalized: int
    sum_gap_initial: float


@dataclass(frozen=True)
class VerifyReport:
    """Residuals of the three synthesis checks; ok when all are within tol."""

    symplectic_residual: float
    diagonal_residual: float
    spectrum_residual: float
    tol: float
    ok: bool


def _block_stats(W, i):
    s = mode_slice(i)
    B = W[s, s]
    c = 0.5 * (B[0, 0] + B[1, 1])
    iso = float(max(abs(B[0, 0] - c), abs(B[1, 1] - c), abs(B[0, 1]), abs(B[1, 0])))
    return float(c), iso


def jacobi_decompose(V, tol: float = DEFAULT_TOL, max_sweeps: int = 100):
    """Diagonalize a physical covariance matrix by cyclic two-mode pivots.

    Each pivot rotates the acting pair's off-block to diagonal with one
    local rotation per mode and then applies the inverse normal-form factor
    of the 4x4 submatrix, which zeroes the off-block and leaves both
    single-mode blocks isotropic.  The profit prod_j sqrt(det B_j) strictly
    decreases at every pivot and is bounded below by sqrt(det V), which
    forces convergence.

    Returns:
        (S, kappa, JacobiTrace) with S V S^T diagonal within tol and kappa
        the sorted diagonal parameters.  When max_sweeps is exhausted the
        partial result is returned with ``converged=False``.
    """
    V = validate_covariance(V, tol)
    if not check_physical(V, 1e-8):
        raise InvalidCovarianceError("matrix is not a physical covariance matrix")
    n = V.shape[0] // 2
    W, locs, m = local_normal_form(V, tol)
    S = np.zeros_like(V)
    for j in range(n):
        S[mode_slice(j + 1), mode_slice(j + 1)] = locs[j]
    steps = []
    initial_profit = float(np.prod(m))

    def profit():
        out = 1.0
        for t in range(1, n + 1):
            s = mode_slice(t)
            B = W[s, s]
            out *= np.sqrt(max(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0], 0.0))
        return float(out)

    from .two_mode import _rotations_diagonalizing

    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        pivoted = False
        for j in range(1, n):
            for k in range(j + 1, n + 1):
                sj, sk = mode_slice(j), mode_slice(k)
                off = float(np.max(np.abs(W[sj, sk])))
                if off <= tol:
                    continue
                pivoted = True
                Q1, Q2, _, _ = _rotations_diagonalizing(W[sj, sk])
                Q4 = np.zeros((4, 4))
                Q4[0:2, 0:2] = Q1
                Q4[2:4, 2:4] = Q2
                ids = [2 * j - 2, 2 * j - 1, 2 * k - 2, 2 * k - 1]
                M4 = W[np.ix_(ids, ids)]
                fac = williamson(Q4 @ M4 @ Q4.T)
                T = expand_two_mode(symplectic_inverse(fac.S) @ Q4, j, k, n)
                W = T @ W @ T.T
                W = 0.5 * (W + W.T)
                S = T @ S
                steps.append(JacobiStep(pair=(j, k), off_norm=off, profit=profit()))
        if not pivoted:
            break
    converged = True
    for j in range(1, n):
        for k in range(j + 1, n + 1):
            if float(np.max(np.abs(W[mode_slice(j), mode_slice(k)]))) > tol:
                converged = False
    kappa = np.sort([_block_stats(W, t)[0] for t in range(1, n + 1)])
    trace = JacobiTrace(steps=steps, sweeps=sweeps, converged=converged, initial_profit=initial_profit)
    return S, kappa, trace


def _general_pair_transform(M4, t_first, t_second, context):
    """Redo a scheduled pair step from the pair's actual 4x4 submatrix.

    Used when the bookkeeping assumption (uncorrelated isotropic pair) does
    not hold.  Feasibility is re-derived from the submatrix's own spectrum;
    if even that fails, the schedule cannot continue.
    """
    from .two_mode import _SWAP

    fac = williamson(M4)
    t_lo, t_hi = sorted((t_first, t_second))
    try:
        V_t = reconstruct_two_mode(t_lo, t_hi, float(fac.kappa[0]), float(fac.kappa[1]))
    except IncompatibleSpectraError as exc:
        err = NumericalError(f"correlated pair encountered and no rescue step exists: {exc}")
        err.trace = context
        raise err from exc
    T4 = williamson(V_t).S @ symplectic_inverse(fac.S)
    if t_first > t_second:
        T4 = _SWAP @ T4
    return T4


def synthesize(kappa, m, tol: float = DEFAULT_TOL):
    """Build a state with global parameters kappa and local parameters m.

    Args:
        kappa: sorted physical global parameters (kappa[0] >= 1).
        m: sorted local parameters; must be dominated by kappa.
        tol: bookkeeping tolerance for finalization and structure checks.

    Returns:
        (S, V, SynthesisTrace) with V = S diag(kappa pairs) S^T, the
        diagonal blocks of V equal to m_j * I in sorted slot order, and at
        most n - 1 recorded two-mode transformations.

    Raises:
        UnphysicalSpectrumError: kappa[0] < 1.
        IncompatibleSpectraError: the dominance certificate has a negative
            slack beyond tolerance.
    """
    kappa = np.asarray(kappa, dtype=float)
    m = np.asarray(m, dtype=float)
    if kappa.ndim != 1 or kappa.shape != m.shape or kappa.size == 0:
        raise ValueError("expected two equal-length, nonempty parameter vectors")
    if np.any(kappa <= 0.0) or np.any(m <= 0.0):
        raise ValueError("spectral parameters must be positive")
    if np.any(np.diff(kappa) < 0.0) or np.any(np.diff(m) < 0.0):
        raise ValueError("parameter vectors must be sorted nondecreasing")
    if kappa[0] < 1.0 - 1e-9:
        raise UnphysicalSpectrumError(
            f"smallest global parameter {kappa[0]} is below the vacuum value 1"
        )
    cert = dominates(kappa, m)
    dom_slack = 1e-9 * (1.0 + float(np.sum(np.abs(m))))
    worst = min(float(np.min(cert.partial_sum_slacks)), cert.tail_slack)
    if worst < -dom_slack:
        raise IncompatibleSpectraError(
            f"local parameters are not dominated by the global ones (worst slack {worst:.3e})"
        )

    n = int(kappa.size)
    atol = tol * (1.0 + float(max(kappa[-1], m[-1])))
    W = np.diag(np.repeat(kappa, 2)).astype(float)
    S = np.eye(2 * n)
    d = kappa.copy()
    steps = []
    stage_counts = [0, 0, 0, 0]
    sum_gap_initial = float(np.sum(m) - np.sum(kappa))

    def apply_step(stage, kind, i, j, param, transfer, t_i, t_j):
        nonlocal W, S
        di, iso_i = _block_stats(W, i)
        dj, iso_j = _block_stats(W, j)
        cross = float(np.max(np.abs(W[mode_slice(i), mode_slice(j)])))
        if max(iso_i, iso_j) > atol or cross > atol:
            ids = [2 * i - 2, 2 * i - 1, 2 * j - 2, 2 * j - 1]
            context = SynthesisTrace(
                steps=list(steps),
                stage_counts=tuple(stage_counts),
                stage1_finalized=0,
                sum_gap_initial=sum_gap_initial,
            )
            T4 = _general_pair_transform(W[np.ix_(ids, ids)], float(t_i), float(t_j), context)
            kind, param = "GEN", (float(t_i), float(t_j))
            T = expand_two_mode(T4, i, j, n)
        elif kind == "BS":
            T = beam_splitter_pair(param, i, j, n)
        elif kind == "SQ":
            T = squeezer_pair(param, i, j, n)
        else:
            T = expand_two_mode(pair_factor(di, dj, t_i, t_j), i, j, n)
        W = T @ W @ T.T
        W = 0.5 * (W + W.T)
        S = T @ S
        d[i - 1] = _block_stats(W, i)[0]
        d[j - 1] = _block_stats(W, j)[0]
        steps.append(
            SynthesisStep(
                stage=stage,
                kind=kind,
                pair=(i, j),
                param=param,
                transfer=float(transfer),
                diag_after=[float(x) for x in d],
            )
        )
        stage_counts[stage - 1] += 1

    # Stage 1: finalize low modes by borrowing from a donor among the first
    # n - 1 modes; the least donor index that still covers the target wins.
    finalized = 0
    i = 1
    while i <= n - 1:
        eps = m[i - 1] - d[i - 1]
        if eps <= atol:
            finalized += 1
            i += 1
            continue
        donor = 0
        for j in range(i + 1, n):
            if d[j - 1] >= m[i - 1] - atol:
                donor = j
                break
        if donor == 0:
            break
        theta = bs_param(d[i - 1], d[donor - 1], m[i - 1])
        apply_step(1, "BS", i, donor, theta, eps, m[i - 1], d[i - 1] + d[donor - 1] - m[i - 1])
        finalized += 1
        i += 1
    stage1_finalized = finalized

    # Stage 2: pair squeezes with the last mode while the remaining sum gap
    # covers twice the mode's deficit.
    delta = float(np.sum(m) - np.sum(d))
    while i <= n - 1 and delta > atol:
        eps = m[i - 1] - d[i - 1]
        if eps <= atol:
            i += 1
            continue
        if delta < 2.0 * eps - atol:
            break
        mu = sq_param(d[i - 1], d[n - 1], eps)
        apply_step(2, "SQ", i, n, mu, eps, m[i - 1], d[n - 1] + eps)
        delta = float(np.sum(m) - np.sum(d))
        i += 1

    # Stage 3: one general transform absorbs whatever gap is left.
    if delta > atol:
        if i > n - 1:
            raise NumericalError("no mode left to absorb the remaining sum gap")
        eps = m[i - 1] - d[i - 1]
        t_n = d[n - 1] + delta - eps
        apply_step(3, "GEN", i, n, (float(m[i - 1]), float(t_n)), eps, m[i - 1], t_n)
        i += 1

    # Stage 4: sum-preserving transfers against the last mode.
    while i <= n - 1:
        eps = m[i - 1] - d[i - 1]
        if abs(eps) <= atol:
            i += 1
            continue
        theta = bs_param(d[i - 1], d[n - 1], m[i - 1])
        apply_step(4, "BS", i, n, theta, eps, m[i - 1], d[i - 1] + d[n - 1] - m[i - 1])
        i += 1

    check_tol = max(atol, 1e-8 * (1.0 + float(m[-1])))
    if float(np.max(np.abs(d - m))) > check_tol:
        raise NumericalError(
            f"schedule finished with diagonal {d.tolist()} instead of {m.tolist()}"
        )
    trace = SynthesisTrace(
        steps=steps,
        stage_counts=tuple(stage_counts),
        stage1_finalized=stage1_finalized,
        sum_gap_initial=sum_gap_initial,
    )
    return S, W, trace


def verify(S, kappa, m, tol: float = 1e-8) -> VerifyReport:
    """Independent residual check of a synthesis result.

    Checks that S is symplectic, that the diagonal blocks of
    S diag(kappa pairs) S^T are isotropic with values matching m as a
    multiset, and that the symplectic spectrum equals sorted kappa.
    """
    S = np.asarray(S, dtype=float)
    kappa = np.sort(np.asarray(kappa, dtype=float))
    m = np.sort(np.asarray(m, dtype=float))
    n = kappa.size
    if S.shape != (2 * n, 2 * n) or m.size != n:
        raise ValueError("shape mismatch between S and the parameter vectors")
    omega = symplectic_form(n)
    res_symp = float(np.max(np.abs(S @ omega @ S.T - omega)))
    V = S @ np.diag(np.repeat(kappa, 2)) @ S.T
    V = 0.5 * (V + V.T)
    vals = np.empty(n)
    iso_max = 0.0
    for j in range(1, n + 1):
        c, iso = _block_stats(V, j)
        vals[j - 1] = c
        iso_max = max(iso_max, iso)
    res_diag = max(iso_max, float(np.max(np.abs(np.sort(vals) - m))))
    res_spec = float(np.max(np.abs(symplectic_spectrum(V) - kappa)))
    ok = bool(res_symp <= tol and res_diag <= tol and res_spec <= tol)
    return VerifyReport(
        symplectic_residual=res_symp,
        diagonal_residual=res_diag,
        spectrum_residual=res_spec,
        tol=float(tol),
        ok=ok,
    )
