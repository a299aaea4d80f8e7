"""Tests for the constructive solvers: pairwise diagonalization and
four-stage synthesis."""

import numpy as np
import pytest

import gmarginal as gm
from gmarginal import (
    IncompatibleSpectraError,
    InvalidCovarianceError,
    UnphysicalSpectrumError,
)

from conftest import block_isotropy_max, local_params, off_block_max

# The seven-mode instance with every intermediate value integer: global
# parameters (1,2,3,4,5,12,18), local targets (6,...,12).  The diagonal
# after each of the six steps is frozen below; all entries are exact
# integers, which makes this the sharpest available regression anchor.
SEVEN_KAPPA = (1.0, 2.0, 3.0, 4.0, 5.0, 12.0, 18.0)
SEVEN_M = (6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0)
SEVEN_CHAIN = [
    [6.0, 2.0, 3.0, 4.0, 5.0, 7.0, 18.0],
    [6.0, 7.0, 3.0, 4.0, 5.0, 2.0, 18.0],
    [6.0, 7.0, 8.0, 4.0, 5.0, 2.0, 23.0],
    [6.0, 7.0, 8.0, 9.0, 5.0, 2.0, 26.0],
    [6.0, 7.0, 8.0, 9.0, 10.0, 2.0, 21.0],
    [6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0],
]
SEVEN_PAIRS = [(1, 6), (2, 6), (3, 7), (4, 7), (5, 7), (6, 7)]
SEVEN_KINDS = ["BS", "BS", "SQ", "GEN", "BS", "BS"]
SEVEN_STAGES = [1, 1, 2, 3, 4, 4]


def coupled_pair(m1, m2, kx, kp):
    V = np.diag([m1, m1, m2, m2])
    V[0, 2] = V[2, 0] = kx
    V[1, 3] = V[3, 1] = kp
    return V


class TestJacobi:
    def test_already_canonical(self):
        V = np.diag([1.0, 1.0, 2.5, 2.5, 4.0, 4.0])
        S, kappa, trace = gm.jacobi_decompose(V)
        assert trace.steps == []
        assert trace.converged
        assert np.allclose(S, np.eye(6), atol=1e-12, rtol=0)
        assert np.allclose(kappa, [1.0, 2.5, 4.0], atol=1e-12, rtol=0)

    def test_single_pivot_example(self):
        V = coupled_pair(2.0, 2.0, 1.0, 1.0)
        S, kappa, trace = gm.jacobi_decompose(V)
        assert trace.converged
        assert len(trace.steps) == 1
        assert trace.steps[0].pair == (1, 2)
        assert abs(trace.steps[0].off_norm - 1.0) < 1e-12
        assert abs(trace.initial_profit - 4.0) < 1e-12
        assert abs(trace.steps[0].profit - 3.0) < 1e-10
        assert np.allclose(kappa, [1.0, 3.0], atol=1e-10, rtol=0)
        W = S @ V @ S.T
        assert off_block_max(W) < 1e-10
        assert block_isotropy_max(W) < 1e-10

    def test_matches_normal_form_on_random_states(self):
        for trial in range(20):
            n = 2 + trial % 5
            V, _, _ = gm.random_state(n, seed=2100 + trial)
            S, kappa, trace = gm.jacobi_decompose(V)
            assert trace.converged
            assert gm.is_symplectic(S, tol=1e-8)
            assert np.allclose(kappa, gm.williamson(V).kappa, atol=1e-8, rtol=0)
            assert off_block_max(S @ V @ S.T) < 1e-10 * max(1.0, np.abs(V).max())

    def test_profit_decreases_to_floor(self):
        V, _, _ = gm.random_state(5, seed=88)
        _, _, trace = gm.jacobi_decompose(V)
        profits = [trace.initial_profit] + [s.profit for s in trace.steps]
        for earlier, later in zip(profits, profits[1:]):
            assert later <= earlier * (1.0 + 1e-12)
        floor = np.sqrt(np.linalg.det(V))
        assert profits[-1] >= floor * (1.0 - 1e-10)
        assert abs(profits[-1] - floor) < 1e-8 * floor

    def test_rejects_unphysical(self):
        with pytest.raises(InvalidCovarianceError):
            gm.jacobi_decompose(np.diag([0.5, 0.5, 2.0, 2.0]))

    def test_sweep_budget_returns_partial(self):
        V, _, _ = gm.random_state(6, seed=17)
        _, _, full = gm.jacobi_decompose(V)
        assert full.sweeps > 2  # the budgeted run below genuinely truncates
        S, kappa, trace = gm.jacobi_decompose(V, max_sweeps=1)
        assert not trace.converged
        assert trace.sweeps == 1
        assert len(trace.steps) > 0


class TestSynthesizeSevenModes:
    def test_exact_chain(self):
        S, V, trace = gm.synthesize(SEVEN_KAPPA, SEVEN_M)
        assert len(trace.steps) == 6
        for step, expect in zip(trace.steps, SEVEN_CHAIN):
            assert np.abs(np.array(step.diag_after) - expect).max() < 1e-9
        assert [s.pair for s in trace.steps] == SEVEN_PAIRS
        assert [s.kind for s in trace.steps] == SEVEN_KINDS
        assert [s.stage for s in trace.steps] == SEVEN_STAGES
        assert trace.stage_counts == (2, 1, 1, 2)
        assert trace.stage1_finalized == 2
        assert abs(trace.sum_gap_initial - 18.0) < 1e-12

    def test_seven_mode_output_verifies(self):
        S, V, _ = gm.synthesize(SEVEN_KAPPA, SEVEN_M)
        report = gm.verify(S, SEVEN_KAPPA, SEVEN_M)
        assert report.ok
        assert report.symplectic_residual < 1e-10
        assert report.diagonal_residual < 1e-10
        assert report.spectrum_residual < 1e-10
        assert np.allclose(np.diag(V)[::2], SEVEN_M, atol=1e-9, rtol=0)


class TestSynthesizeGeneral:
    def test_equal_spectra_no_steps(self):
        kappa = (1.0, 2.0, 5.5)
        S, V, trace = gm.synthesize(kappa, kappa)
        assert trace.steps == []
        assert trace.stage_counts == (0, 0, 0, 0)
        assert np.allclose(S, np.eye(6), atol=0, rtol=0)
        assert np.allclose(V, np.diag(np.repeat(kappa, 2)), atol=0, rtol=0)

    def test_two_mode_single_transfer(self):
        S, V, trace = gm.synthesize((1.0, 3.0), (2.0, 2.0))
        assert len(trace.steps) == 1
        step = trace.steps[0]
        assert step.kind == "BS"
        assert step.pair == (1, 2)
        assert abs(step.param - np.pi / 4) < 1e-12
        assert step.stage == 4  # with two modes the only partner is the last
        assert np.abs(np.array(step.diag_after) - [2.0, 2.0]).max() < 1e-12
        assert np.abs(V - coupled_pair(2.0, 2.0, 1.0, 1.0)).max() < 1e-10

    def test_zero_gap_goes_straight_to_transfers(self):
        # equal sums: no squeezing allowed anywhere in the schedule
        _, _, trace = gm.synthesize((1.0, 4.0), (2.0, 3.0))
        assert trace.stage_counts[1] == 0 and trace.stage_counts[2] == 0
        assert abs(trace.sum_gap_initial) < 1e-12
        for step in trace.steps:
            assert step.kind == "BS"

    def test_trace_invariants_on_random_instances(self):
        for trial in range(25):
            n = 2 + trial % 6
            V0, _, _ = gm.random_state(n, seed=2500 + trial)
            kappa = gm.symplectic_spectrum(V0)
            m = np.sort(local_params(V0))
            S, V, trace = gm.synthesize(kappa, m)

            assert len(trace.steps) <= n - 1
            report = gm.verify(S, kappa, m)
            assert report.ok

            # dominance chain: every diagonal dominates its successor; the
            # certificate sits exactly on the boundary after sum-preserving
            # steps, so allow round-off on the slack signs
            chain = [list(kappa)] + [s.diag_after for s in trace.steps]
            for earlier, later in zip(chain, chain[1:]):
                cert = gm.dominates(earlier, later)
                slack = -1e-9 * (1.0 + sum(earlier))
                assert min(cert.partial_sum_slacks) >= slack
                assert cert.tail_slack >= slack

            stage_seen = [s.stage for s in trace.steps]
            assert stage_seen == sorted(stage_seen)
            assert sum(trace.stage_counts) == len(trace.steps)
            assert trace.stage_counts[2] <= 1  # at most one general step

            for step, before in zip(trace.steps, chain):
                after = step.diag_after
                if step.stage in (1, 4):
                    # sum-preserving transfer
                    assert abs(sum(after) - sum(before)) < 1e-9 * (1 + sum(before))
                if step.stage == 2:
                    i, j = step.pair
                    gap_b = before[i - 1] - before[j - 1]
                    gap_a = after[i - 1] - after[j - 1]
                    assert abs(gap_a - gap_b) < 1e-9 * (1 + abs(gap_b))
                # the last mode never participates before stage 2
                if step.stage == 1:
                    assert n not in step.pair

    def test_round_trip_spectrum_and_blocks(self):
        for trial in range(10):
            n = 2 + trial % 5
            V0, _, _ = gm.random_state(n, seed=3100 + trial)
            kappa = gm.symplectic_spectrum(V0)
            m = np.sort(local_params(V0))
            _, V, _ = gm.synthesize(kappa, m)
            assert np.allclose(local_params(V), m, atol=1e-8 * (1 + m[-1]), rtol=0)
            assert block_isotropy_max(V) < 1e-8 * (1 + m[-1])
            assert np.allclose(
                gm.symplectic_spectrum(V), kappa, atol=1e-8 * (1 + kappa[-1]), rtol=0
            )

    def test_single_mode(self):
        S, V, trace = gm.synthesize((2.0,), (2.0,))
        assert trace.steps == [] and np.allclose(V, 2.0 * np.eye(2), atol=0)
        with pytest.raises(IncompatibleSpectraError):
            gm.synthesize((2.0,), (3.0,))

    def test_input_validation(self):
        with pytest.raises(ValueError, match="sorted"):
            gm.synthesize((3.0, 1.0), (2.0, 2.0))
        with pytest.raises(ValueError, match="sorted"):
            gm.synthesize((1.0, 3.0), (2.5, 1.5))
        with pytest.raises(ValueError):
            gm.synthesize((1.0, 3.0), (2.0, 2.0, 2.0))
        with pytest.raises(ValueError):
            gm.synthesize((1.0, -3.0), (2.0, 2.0))
        with pytest.raises(UnphysicalSpectrumError):
            gm.synthesize((0.5, 2.0), (1.0, 1.5))
        with pytest.raises(IncompatibleSpectraError):
            gm.synthesize((1.0, 1.0), (1.0, 3.0))


class TestVerify:
    def test_accepts_synthesized_output(self):
        S, _, _ = gm.synthesize(SEVEN_KAPPA, SEVEN_M)
        assert gm.verify(S, SEVEN_KAPPA, SEVEN_M).ok

    def test_flags_wrong_diagonal(self):
        report = gm.verify(np.eye(4), (1.0, 3.0), (2.0, 2.0))
        assert not report.ok
        assert report.symplectic_residual < 1e-15
        assert report.diagonal_residual > 0.9

    def test_reports_symplectic_damage(self):
        S, _, _ = gm.synthesize((1.0, 3.0), (2.0, 2.0))
        S = S.copy()
        S[0, 1] += 1e-3
        report = gm.verify(S, (1.0, 3.0), (2.0, 2.0))
        assert not report.ok
        assert 1e-4 < report.symplectic_residual < 1e-2
