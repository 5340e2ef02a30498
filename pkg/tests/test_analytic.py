import math

import numpy as np
import pytest

from grover_coherence import (
    Stage,
    bloch_track,
    c_alpha_HO_asymptotic,
    c_alpha_HO_exact,
    c_alpha_HP,
    c_alpha_max_asymptotic,
    c_alpha_psi_k_asymptotic,
    c_alpha_psi_k_exact,
    c_alpha_pure,
    complementarity_residual,
    gamma_case,
    grover_angle,
    iter_stage_probs,
    make_config,
    optimal_iterations,
    p_k,
    target_spectrum,
    true_max_coherence,
    two_level_state,
)
from conftest import ALPHA_GRID

LN2 = math.log(2.0)


def brute_spectrum(indices, n):
    """Independent oracle: s_y = sum over targets of (-1)^(popcount(x & y))."""
    N = 1 << n
    out = np.zeros(N, dtype=int)
    for y in range(N):
        out[y] = sum(1 if bin(x & y).count("1") % 2 == 0 else -1 for x in indices)
    return out


class TestSuccessProbabilityFormula:
    def test_initial(self):
        assert p_k(0.2, 0) == pytest.approx(math.sin(0.2) ** 2, abs=1e-15)

    def test_quarter_database_one_iteration(self):
        assert p_k(math.pi / 6, 1) == pytest.approx(1.0, abs=1e-15)

    def test_triple_angle(self):
        theta = math.asin(math.sqrt(1 / 8))
        assert p_k(theta, 1) == pytest.approx(25 / 32, abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            p_k(0.0, 1)
        with pytest.raises(ValueError):
            p_k(2.0, 1)


class TestEnteringStateExact:
    def test_certain_success_leaves_target_superposition(self):
        for t in (1, 2, 4):
            for alpha in (0.3, 0.5, 1.5, 2.0):
                expected = (t ** (1 - 1 / alpha) - 1) / (alpha - 1)
                got = c_alpha_psi_k_exact(1 << 10, t, 1.0, alpha)
                assert got.value == pytest.approx(expected, abs=1e-12)
                assert got.kind == "exact"

    def test_single_target_after_one_iteration(self):
        got = c_alpha_psi_k_exact(8, 1, 25 / 32, 2.0)
        assert got.value == pytest.approx(3 / math.sqrt(2) - 1, abs=1e-13)

    def test_whole_database_target_is_maximal(self):
        for alpha in (0.5, 1.5, 2.0):
            got = c_alpha_psi_k_exact(16, 16, 1.0, alpha)
            assert got.value == pytest.approx(
                (16 ** (1 - 1 / alpha) - 1) / (alpha - 1), abs=1e-12
            )

    def test_unity_branch_matches_entropy_oracle(self):
        N, t, p = 64, 3, 0.37
        probs = np.full(N, (1 - p) / (N - t))
        probs[:t] = p / t
        expected = LN2 * float(-(probs * np.log2(probs)).sum())
        assert c_alpha_psi_k_exact(N, t, p, 1.0).value == pytest.approx(
            expected, abs=1e-12
        )

    def test_matches_simulation_on_sampled_grid(self):
        for n, targets in [(3, [5]), (6, [1, 2, 4]), (10, [0, 1, 2, 3]), (12, [7])]:
            cfg = make_config(n, targets)
            theta = grover_angle(cfg)
            for k, _stage, _s, probs in iter_stage_probs(
                cfg, optimal_iterations(cfg), (Stage.PSI,)
            ):
                p = math.sin((2 * k + 1) * theta) ** 2
                for alpha in ALPHA_GRID:
                    assert abs(
                        c_alpha_pure(probs, alpha)
                        - c_alpha_psi_k_exact(cfg.N, cfg.t, p, alpha).value
                    ) < 1e-10


class TestEnteringStateAsymptotic:
    def test_half_alpha_is_twice_skew_information_form(self):
        for p, t in [(0.1, 1), (0.6, 2), (0.9, 4)]:
            got = c_alpha_psi_k_asymptotic(1 << 16, t, p, 0.5)
            assert got.value == pytest.approx(2 * (1 - p * p / t), abs=1e-12)
            assert got.kind == "asymptotic"

    def test_alpha_two_at_certain_success_vanishes(self):
        assert c_alpha_psi_k_asymptotic(1 << 16, 1, 1.0, 2.0).value == 0.0

    def test_unity_branch(self):
        N, p = 1 << 16, 0.25
        expected = (1 - p) * math.log(N / (1 - p))
        assert c_alpha_psi_k_asymptotic(N, 2, p, 1.0).value == pytest.approx(
            expected, abs=1e-12
        )

    def test_relative_error_against_exact_mid_run(self):
        # measured accuracy of the sparse-target form at n=16, t=2, k=50: the
        # dropped terms are O(N^(1/alpha - 1)), i.e. percent-level at alpha=1.5
        cfg = make_config(16, [0, 1])
        theta = grover_angle(cfg)
        p = math.sin(101 * theta) ** 2
        exact = c_alpha_psi_k_exact(cfg.N, 2, p, 1.5).value
        asym = c_alpha_psi_k_asymptotic(cfg.N, 2, p, 1.5).value
        rel = abs(asym - exact) / exact
        assert rel < 0.02
        assert rel > 1e-3  # the error floor is structural, not rounding

    def test_warns_outside_sparse_regime(self):
        with pytest.warns(UserWarning, match="sparse"):
            c_alpha_psi_k_asymptotic(8, 4, 0.9, 2.0)


class TestTargetSpectrum:
    def test_single_target_all_unit(self):
        for n in (2, 5, 8):
            spec = target_spectrum(make_config(n, [3 % (1 << n)]))
            assert set(spec.histogram) <= {-1, 1}
            assert sum(spec.histogram.values()) == (1 << n) - 1
            assert spec.parseval_ok

    def test_two_target_enumeration(self):
        spec = target_spectrum(make_config(2, [0, 1]))
        assert spec.histogram == {2: 1, 0: 2}
        assert spec.s0 == 2

    def test_whole_database(self):
        spec = target_spectrum(make_config(3, list(range(8))))
        assert spec.histogram == {0: 7}

    def test_matches_brute_force(self, rng):
        for n in (2, 4, 6):
            N = 1 << n
            for _ in range(5):
                t = int(rng.integers(1, N + 1))
                indices = sorted(rng.choice(N, size=t, replace=False).tolist())
                cfg = make_config(n, indices)
                ref = brute_spectrum(indices, n)
                values, counts = np.unique(ref[1:], return_counts=True)
                assert target_spectrum(cfg).histogram == {
                    int(v): int(c) for v, c in zip(values, counts)
                }

    def test_parseval_and_parity(self, rng):
        for n in (3, 6, 9, 12):
            N = 1 << n
            t = int(rng.integers(1, min(N, 40)))
            indices = sorted(rng.choice(N, size=t, replace=False).tolist())
            spec = target_spectrum(make_config(n, indices))
            assert spec.parseval_ok
            assert all((s - t) % 2 == 0 for s in spec.histogram)

    def test_effective_weights_single_target(self):
        spec = target_spectrum(make_config(8, [17]))
        assert spec.gamma_effective_abs() == pytest.approx(1.0, abs=1e-12)
        assert spec.gamma_effective_rms() == pytest.approx(255 / 255, abs=1e-12)

    def test_effective_weights_recover_tabulated_cases(self):
        # first-moment averaging reproduces the per-class table for generic
        # sets, up to O(1/N) finite-size corrections
        n = 10
        assert target_spectrum(make_config(n, [0, 1])).gamma_effective_abs() == (
            pytest.approx(0.5, rel=1e-2)
        )
        assert target_spectrum(make_config(n, [0, 1, 2])).gamma_effective_abs() == (
            pytest.approx(0.75, rel=1e-2)
        )
        assert target_spectrum(make_config(n, [0, 1, 2, 4])).gamma_effective_abs() == (
            pytest.approx(9 / 16, rel=1e-2)
        )
        assert target_spectrum(make_config(n, "0" * (n - 2) + "**")).gamma_effective_abs() == (
            pytest.approx(0.25, rel=1e-2)
        )


class TestGammaCase:
    def test_table(self):
        assert gamma_case(1, product=True) == 1.0
        assert gamma_case(2, product=False) == 0.5
        assert gamma_case(3, product=False) == 0.75
        assert gamma_case(4, product=True) == 0.25
        assert gamma_case(4, product=False) == 0.5625

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="spectrum"):
            gamma_case(5, product=False)


class TestFirstHadamardExact:
    def test_single_target_matches_simulation_at_start(self):
        cfg = make_config(3, [5])
        tl = two_level_state(cfg, 0)
        for k, _stage, _s, probs in iter_stage_probs(cfg, 1, (Stage.HADAMARD_O,)):
            sim = c_alpha_pure(probs, 2.0)
        assert c_alpha_HO_exact(cfg, tl, 2.0).value == pytest.approx(sim, abs=1e-12)

    def test_single_target_reduces_to_flat_spectrum_form(self):
        cfg = make_config(6, [11])
        N = cfg.N
        tl = two_level_state(cfg, 2)
        a_k, b_k = tl.a_k, tl.b_k
        for alpha in (0.5, 1.5, 2.0):
            p0 = (a_k * math.sqrt(N - 1) - b_k) ** 2 / N
            py = (a_k / math.sqrt(N - 1) + b_k) ** 2 / N
            expected = (p0 ** (1 / alpha) + (N - 1) * py ** (1 / alpha) - 1) / (alpha - 1)
            assert c_alpha_HO_exact(cfg, tl, alpha).value == pytest.approx(
                expected, abs=1e-12
            )

    def test_whole_database_target_collapses(self):
        cfg = make_config(3, list(range(8)))
        tl = two_level_state(cfg, 0)
        for alpha in (0.5, 2.0):
            assert c_alpha_HO_exact(cfg, tl, alpha).value == pytest.approx(0.0, abs=1e-12)

    def test_matches_simulation_on_sampled_grid(self):
        for n, targets in [(4, [3, 9]), (7, [0, 1, 2]), (9, [0, 3, 5, 6])]:
            cfg = make_config(n, targets)
            spec = target_spectrum(cfg)
            for k, _stage, _s, probs in iter_stage_probs(
                cfg, optimal_iterations(cfg), (Stage.HADAMARD_O,)
            ):
                tl = two_level_state(cfg, k)
                for alpha in ALPHA_GRID:
                    assert abs(
                        c_alpha_pure(probs, alpha)
                        - c_alpha_HO_exact(cfg, tl, alpha, spec).value
                    ) < 1e-9


class TestFirstHadamardAsymptotic:
    def test_single_target_above_one(self):
        N, p = 1 << 16, 0.37
        for alpha in (1.5, 2.0):
            expected = (N / (alpha - 1)) * (p / N) ** (1 / alpha)
            assert c_alpha_HO_asymptotic(1.0, p, N, 1, alpha).value == pytest.approx(
                expected, rel=1e-12
            )

    def test_pair_below_one(self):
        N, p, alpha = 1 << 16, 0.42, 0.7
        expected = ((p / 2) ** (1 / alpha) * N ** (1 - 1 / alpha) - 1) / (alpha - 1)
        assert c_alpha_HO_asymptotic(0.5, p, N, 2, alpha).value == pytest.approx(
            expected, rel=1e-12
        )

    def test_half_alpha_single_target(self):
        N, p = 1 << 16, 0.8
        assert c_alpha_HO_asymptotic(1.0, p, N, 1, 0.5).value == pytest.approx(
            2 * (1 - p * p / N), abs=1e-12
        )

    def test_unity_branch(self):
        N, p, gamma = 1 << 16, 0.3, 0.5
        expected = gamma * p * math.log(N / (gamma * p))
        assert c_alpha_HO_asymptotic(gamma, p, N, 2, 1.0).value == pytest.approx(
            expected, abs=1e-12
        )


class TestSecondHadamard:
    def test_exact_equals_entering_state_at_next_step(self):
        for n, t, k in [(8, 1, 3), (12, 2, 20), (16, 4, 50)]:
            cfg = make_config(n, list(range(t)))
            theta = grover_angle(cfg)
            p_next = math.sin((2 * (k + 1) + 1) * theta) ** 2
            for alpha in ALPHA_GRID:
                assert c_alpha_HP(cfg.N, t, p_next, alpha).value == (
                    c_alpha_psi_k_exact(cfg.N, t, p_next, alpha).value
                )

    def test_asymptotic_kind(self):
        got = c_alpha_HP(1 << 16, 2, 0.5, 2.0, kind="asymptotic")
        assert got.kind == "asymptotic"
        assert got.value == pytest.approx(
            c_alpha_psi_k_asymptotic(1 << 16, 2, 0.5, 2.0).value, abs=1e-15
        )

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            c_alpha_HP(8, 1, 0.5, 2.0, kind="guess")


class TestBlochTrack:
    def test_initial_components(self):
        theta = 0.1
        track = bloch_track(theta, 0)
        assert track.r_x == pytest.approx(-math.sin(2 * theta), abs=1e-15)
        assert track.r_z == pytest.approx(math.cos(2 * theta), abs=1e-15)

    def test_balanced_point(self):
        # theta_k = pi/4: r_z = 0 and the success probability is 1/2
        track = bloch_track(math.pi / 12, 1)
        assert track.r_z == pytest.approx(0.0, abs=1e-15)
        assert (1 - track.r_z) / 2 == pytest.approx(p_k(math.pi / 12, 1), abs=1e-15)

    def test_certain_success_point(self):
        track = bloch_track(math.pi / 6, 1)
        assert track.r_z == pytest.approx(-1.0, abs=1e-15)

    def test_consistency_identities(self):
        for theta, k in [(0.05, 7), (0.3, 2), (0.01, 40)]:
            track = bloch_track(theta, k)
            theta_k = (2 * k + 1) * theta
            assert math.cos(theta_k) ** 2 == pytest.approx((1 + track.r_z) / 2, abs=1e-12)
            assert math.sin(theta_k) ** 2 == pytest.approx((1 - track.r_z) / 2, abs=1e-12)
            assert track.r_x**2 + track.r_z**2 <= 1 + 1e-9


class TestMaxima:
    def test_below_one(self):
        assert c_alpha_max_asymptotic(1 << 16, 0.5) == pytest.approx(2.0, abs=1e-15)

    def test_above_one(self):
        assert c_alpha_max_asymptotic(1 << 16, 2.0) == pytest.approx(256.0, abs=1e-12)

    def test_unity_is_bits(self):
        assert c_alpha_max_asymptotic(1 << 16, 1.0) == pytest.approx(16.0, abs=1e-12)

    def test_true_maximum_is_attained_by_uniform_state(self):
        for N in (4, 64):
            for alpha in (0.5, 1.5, 2.0, 1.0):
                assert true_max_coherence(N, alpha) == pytest.approx(
                    c_alpha_pure(np.full(N, 1 / N), alpha), abs=1e-12
                )

    def test_asymptotic_max_exceeds_true_max(self):
        for alpha in (0.5, 1.5, 2.0):
            assert c_alpha_max_asymptotic(1 << 16, alpha) > true_max_coherence(
                1 << 16, alpha
            )


class TestComplementarity:
    def test_algebraic_cancellation_above_one(self):
        # with the sparse-target coherence the residual cancels identically
        N, t = 1 << 16, 2
        for alpha in (1.5, 2.0):
            for p in (0.0, 0.3, 0.9, 1.0):
                c = c_alpha_psi_k_asymptotic(N, t, p, alpha).value
                assert complementarity_residual(N, t, p, alpha, c) == pytest.approx(
                    0.0, abs=1e-12
                )

    def test_initial_state_below_one(self):
        N, t = 1 << 16, 2
        p0 = t / N
        c = c_alpha_psi_k_exact(N, t, p0, 0.5).value
        residual = complementarity_residual(N, t, p0, 0.5, c)
        assert abs(residual) < 0.01
        assert residual == pytest.approx(-((1 - p0) ** 2) / (N - t), abs=1e-9)

    def test_simulated_residuals_at_sixteen_qubits(self, example1_sweep):
        sweep = example1_sweep
        N, t = sweep.config.N, sweep.config.t
        worst = {}
        for alpha in (0.5, 1.5, 2.0):
            c = sweep.coherence(Stage.PSI, alpha)
            worst[alpha] = max(
                abs(complementarity_residual(N, t, float(sweep.success[k]), alpha, float(c[k])))
                for k in range(sweep.k_max + 1)
            )
        assert worst[0.5] < 0.001
        assert worst[2.0] < 0.01
        # normalizing by the asymptotic maximum costs alpha * N^(1/alpha - 1)
        # at k = 0 (~0.037 here), so the 1.5 residual sits above the 0.02 line
        # the alpha = 2 case enjoys; the acceptance suite tracks this verbatim.
        assert 0.03 < worst[1.5] < 0.045

    def test_unity_branch_residual(self, example1_sweep):
        # the log-scale normalization converges only like 1/log N, so the
        # entropy-limit residual peaks near 0.1 at 16 qubits (measured ~0.099
        # around the point where the success probability passes 2/3)
        sweep = example1_sweep
        N, t = sweep.config.N, sweep.config.t
        c = sweep.coherence(Stage.PSI, 1.0 + 1e-7)
        res = [
            complementarity_residual(N, t, float(sweep.success[k]), 1.0, float(c[k]))
            for k in range(sweep.k_max + 1)
        ]
        peak = max(abs(r) for r in res)
        assert 0.08 < peak < 0.12


class TestMonotoneDepletion:
    def test_exact_coherence_strictly_decreases(self):
        n = 16
        for t in range(1, 5):
            cfg = make_config(n, list(range(t)))
            theta = grover_angle(cfg)
            k_opt = optimal_iterations(cfg)
            for alpha in ALPHA_GRID:
                values = [
                    c_alpha_psi_k_exact(cfg.N, t, math.sin((2 * k + 1) * theta) ** 2, alpha).value
                    for k in range(k_opt + 1)
                ]
                diffs = np.diff(values)
                assert np.all(diffs < 0), (t, alpha, np.argmax(diffs >= 0))
