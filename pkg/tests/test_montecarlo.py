import math

import numpy as np
import pytest

from dualitysim import (
    CircuitConfig,
    ContractViolation,
    DetectorConfig,
    RunPlan,
    SourceConfig,
    cell_rng,
    click_probabilities,
    effective_mean_photons,
    expected_counts,
    multi_photon_fraction,
    run_dynamic_switch,
    run_sweep,
    sample_photon_numbers,
    simulate_point,
)
from dualitysim.montecarlo import (
    DEFAULT_COHERENCE_MC,
    IDEAL_MODE,
    time_multiplexed_counts,
    triangle_wave,
)

SRC = SourceConfig()
DET = DetectorConfig()


def scans_equal(a, b):
    return (
        a.phi_s == b.phi_s
        and a.block == b.block
        and np.array_equal(a.n1, b.n1)
        and np.array_equal(a.n2, b.n2)
    )


class TestClickModel:
    def test_effective_mean_photons(self):
        # mu * eta * 10^(-L/10) with the default telecom parameters
        assert effective_mean_photons(SRC, DET) == pytest.approx(1.2619146889603868e-3, rel=1e-12)

    def test_click_probability_saturating_port(self):
        c1, c2 = click_probabilities(CircuitConfig(math.pi / 2, math.pi / 2), SRC, DET)
        mu_eff = effective_mean_photons(SRC, DET)
        assert c1 == pytest.approx(-math.expm1(-mu_eff), rel=1e-12)
        assert c2 == pytest.approx(0.0, abs=1e-15)

    def test_dark_counts_add_and_cap(self):
        noisy = DetectorConfig(dark_prob=1.0)
        c1, c2 = click_probabilities(CircuitConfig(0.0, 0.0), SRC, noisy)
        assert c1 == 1.0 and c2 == 1.0

    def test_blocked_uses_half_amplitude(self):
        cfg = CircuitConfig(0.3, 0.0, block="path1")
        c1, _ = click_probabilities(cfg, SRC, DET)
        mu_eff = effective_mean_photons(SRC, DET)
        assert c1 == pytest.approx(-math.expm1(-mu_eff * 0.5), rel=1e-12)

    def test_expected_counts_monotone_in_loss(self):
        cfg = CircuitConfig(0.7, 0.9)
        totals = []
        for loss in (6.0, 9.0, 12.0, 15.0, 20.0):
            n1, n2 = expected_counts(cfg, SRC, DetectorConfig(system_loss_db=loss), 10**6)
            totals.append(n1 + n2)
        assert all(a > b for a, b in zip(totals, totals[1:]))


class TestSimulatePoint:
    def test_zero_pulses(self):
        assert simulate_point(CircuitConfig(0.1, 0.2), SRC, DET, 0, cell_rng(0, 0, 0, 0)) == (0, 0)

    def test_negative_pulses_rejected(self):
        with pytest.raises(ContractViolation):
            simulate_point(CircuitConfig(0.1, 0.2), SRC, DET, -1, cell_rng(0, 0, 0, 0))

    def test_reproducible_from_substream(self):
        cfg = CircuitConfig(0.4, 1.1)
        a = simulate_point(cfg, SRC, DET, 120_000, cell_rng(99, 1, 2, 3))
        b = simulate_point(cfg, SRC, DET, 120_000, cell_rng(99, 1, 2, 3))
        assert a == b

    def test_statistics_track_click_probabilities(self):
        # 5-sigma binomial agreement on at least 99% of cells over 100 seeds
        checks, hits = 0, 0
        pulses = 200_000
        for seed in range(100):
            for i, phi_x in enumerate(np.linspace(0, 2 * math.pi, 3, endpoint=False)):
                for j, phi_s in enumerate((0.7, math.pi / 2)):
                    cfg = CircuitConfig(float(phi_x), phi_s, coherence=0.967)
                    n1, n2 = simulate_point(cfg, SRC, DET, pulses, cell_rng(seed, 0, j, i))
                    for n, c in zip((n1, n2), click_probabilities(cfg, SRC, DET)):
                        sigma = math.sqrt(pulses * c * (1 - c))
                        hits += abs(n - pulses * c) <= 5 * max(sigma, 1e-9)
                        checks += 1
        assert hits >= 0.99 * checks

    def test_saturating_port_rates(self):
        # fully constructive setting: one port clicks at the thinned-beam
        # rate, the dark-free other port stays silent
        pulses = 1_000_000
        cfg = CircuitConfig(math.pi / 2, math.pi / 2, coherence=1.0)
        n1, n2 = simulate_point(cfg, SRC, DET, pulses, cell_rng(21, 0, 0, 0))
        rate = -math.expm1(-effective_mean_photons(SRC, DET))
        sigma = math.sqrt(rate * (1 - rate) / pulses)
        assert abs(n1 / pulses - rate) <= 3 * sigma
        assert n2 == 0

    def test_sampled_counts_decrease_with_loss(self):
        cfg = CircuitConfig(0.7, 0.9)
        totals = []
        for loss in (6.0, 12.0, 18.0):
            rng = cell_rng(5, 0, 0, 0)
            n1, n2 = simulate_point(cfg, SRC, DetectorConfig(system_loss_db=loss), 2_000_000, rng)
            totals.append(n1 + n2)
        assert totals[0] > totals[1] > totals[2]


class TestPhotonStatistics:
    def test_multi_photon_fraction(self):
        pulses = 1_000_000
        expect = 1.0 - math.exp(-0.2) * 1.2
        frac = multi_photon_fraction(0.2, pulses, cell_rng(11, 0, 0, 0))
        sigma = math.sqrt(expect * (1 - expect) / pulses)
        assert abs(frac - expect) <= 3 * sigma

    def test_multi_photon_is_rare(self):
        # the working point keeps multi-photon emission below 2%
        assert 1.0 - math.exp(-0.2) * 1.2 == pytest.approx(0.017523096306421904, rel=1e-12)
        assert 1.0 - math.exp(-0.2) * 1.2 < 0.02

    def test_photon_numbers_mean(self):
        n = sample_photon_numbers(0.2, 500_000, cell_rng(13, 0, 0, 0))
        assert abs(n.mean() - 0.2) < 3 * math.sqrt(0.2 / n.size)

    def test_bad_mu_rejected(self):
        with pytest.raises(ContractViolation):
            sample_photon_numbers(0.0, 10, cell_rng(0, 0, 0, 0))


class TestRunSweep:
    def test_scan_per_setting(self):
        plan = RunPlan(phi_s_values=(0.0, 1.0), blocks=("none", "path1"), seed=1)
        scans = run_sweep(plan, SRC, DET)
        assert len(scans) == 4
        assert {(s.phi_s, s.block) for s in scans} == {(0.0, "none"), (0.0, "path1"), (1.0, "none"), (1.0, "path1")}

    def test_deterministic_across_runs_and_workers(self):
        plan = RunPlan(phi_s_values=(0.0, 0.9, math.pi / 2), seed=77, pulses_per_point=50_000)
        once = run_sweep(plan, SRC, DET, workers=1)
        again = run_sweep(plan, SRC, DET, workers=1)
        many = run_sweep(plan, SRC, DET, workers=4)
        for a, b, c in zip(once, again, many):
            assert scans_equal(a, b) and scans_equal(a, c)

    def test_cell_counts_independent_of_plan_shape(self):
        # a sub-plan sharing the seed reproduces the same cells
        full = RunPlan(phi_s_values=(0.3, 0.8), seed=5, pulses_per_point=30_000)
        sub = RunPlan(phi_s_values=(0.3, 0.8), blocks=("path1",), seed=5, pulses_per_point=30_000)
        full_scans = {(s.phi_s, s.block): s for s in run_sweep(full, SRC, DET)}
        for s in run_sweep(sub, SRC, DET):
            assert scans_equal(s, full_scans[(s.phi_s, s.block)])

    def test_ideal_mode_matches_raw_probabilities(self):
        plan = RunPlan(phi_s_values=(0.5,), pulses_per_point=1000, coherence=1.0, seed=0)
        scans = {s.block: s for s in run_sweep(plan, mode=IDEAL_MODE)}
        assert abs(scans["none"].n1[0] - 500.0) < 1e-9  # phi_x = 0: balanced
        assert abs(scans["path0"].totals[0] - 500.0) < 1e-9  # half the mass blocked

    def test_mode_coherence_defaults(self):
        plan = RunPlan(phi_s_values=(0.5,))
        assert plan.resolved_coherence("ideal") == 1.0
        assert plan.resolved_coherence("montecarlo") == DEFAULT_COHERENCE_MC
        pinned = RunPlan(phi_s_values=(0.5,), coherence=0.5)
        assert pinned.resolved_coherence("ideal") == 0.5

    def test_zero_pulse_plan(self):
        plan = RunPlan(phi_s_values=(0.5,), pulses_per_point=0, seed=0)
        scans = run_sweep(plan, SRC, DET)
        assert all(s.totals.sum() == 0 for s in scans)

    def test_sampled_visibility_tracks_loop_phase(self):
        # mirror setting shows no fringe beyond noise; balanced setting shows
        # full contrast within its error bar
        from dualitysim import estimate_visibility

        plan = RunPlan(
            phi_s_values=(0.0, math.pi / 2), blocks=("none",), coherence=1.0,
            pulses_per_point=100_000, seed=5,
        )
        scans = {s.phi_s: s for s in run_sweep(plan, SRC, DET)}
        flat = estimate_visibility(scans[0.0])
        assert flat.value < 3 * flat.sigma
        full = estimate_visibility(scans[math.pi / 2])
        assert abs(full.value - 1.0) <= 3 * full.sigma

    def test_sampled_blocked_scan_is_flat(self):
        from dualitysim.estimators import flatness_check

        plan = RunPlan(
            phi_s_values=(math.pi / 2,), blocks=("path0",), coherence=1.0,
            pulses_per_point=100_000, seed=3,
        )
        (blocked,) = run_sweep(plan, SRC, DET)
        assert flatness_check(blocked).flat

    def test_plan_validation(self):
        with pytest.raises(ContractViolation):
            RunPlan(phi_s_values=())
        with pytest.raises(ContractViolation):
            RunPlan(phi_s_values=(0.1,), phi_x_grid=(0.0, 2 * math.pi, 1))
        with pytest.raises(ContractViolation):
            RunPlan(phi_s_values=(0.1,), blocks=("nope",))
        with pytest.raises(ContractViolation):
            RunPlan(phi_s_values=(0.1,), seed=-1)

    def test_substreams_differ_between_cells(self):
        a = cell_rng(3, 0, 0, 0).integers(0, 2**32, size=4)
        b = cell_rng(3, 0, 0, 1).integers(0, 2**32, size=4)
        c = cell_rng(3, 0, 0, 0).integers(0, 2**32, size=4)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, c)


class TestDynamicSwitch:
    def test_triangle_wave_shape(self):
        t = np.array([0.0, 1.5, 3.0, 4.5, 6.0])
        np.testing.assert_allclose(
            triangle_wave(t, 6.0), [0.0, math.pi, 2 * math.pi, math.pi, 0.0], atol=1e-12
        )

    def test_alternating_segments(self):
        trace = run_dynamic_switch(72.0, 18.0, 6.0, SRC, DET, rng=2, coherence=1.0, bin_seconds=0.6)
        segments = np.floor(trace.t / 18.0).astype(int)
        assert segments.max() == 3  # four 18 s segments in 72 s
        for seg in range(4):
            expect = 0.0 if seg % 2 == 0 else math.pi / 2
            assert np.all(trace.phi_s[segments == seg] == expect)

    def test_particle_segments_flat_wave_segments_fringe(self):
        trace = run_dynamic_switch(72.0, 18.0, 6.0, SRC, DET, rng=2, coherence=1.0, bin_seconds=0.6)
        total = trace.n1 + trace.n2
        keep = total > 0
        phat = trace.n1[keep] / total[keep]
        wave = trace.phi_s[keep] > 0
        # mirror segments: every bucket consistent with the balanced level
        z = np.abs(phat[~wave] - 0.5) / np.sqrt(0.25 / total[keep][~wave])
        assert z.max() <= 3.0
        # splitter segments: the triangle sweep traces high-contrast fringes
        for seg in (1, 3):
            m = (np.floor(trace.t[keep] / 18.0).astype(int) == seg)
            assert phat[m].max() - phat[m].min() > 0.8

    def test_zero_coherence_kills_interference(self):
        trace = run_dynamic_switch(36.0, 18.0, 6.0, SRC, DET, rng=4, coherence=0.0, bin_seconds=1.0)
        segments = np.floor(trace.t / 18.0).astype(int)
        for seg in range(2):
            m = segments == seg
            n1, tot = trace.n1[m].sum(), (trace.n1 + trace.n2)[m].sum()
            z = abs(n1 / tot - 0.5) / math.sqrt(0.25 / tot)
            assert z <= 3.0

    def test_validation(self):
        with pytest.raises(ContractViolation):
            run_dynamic_switch(0.0, 18.0, 6.0, SRC, DET, rng=0)

    def test_deterministic_for_seed(self):
        a = run_dynamic_switch(10.0, 5.0, 2.0, SRC, DET, rng=8, bin_seconds=0.5)
        b = run_dynamic_switch(10.0, 5.0, 2.0, SRC, DET, rng=8, bin_seconds=0.5)
        assert np.array_equal(a.n1, b.n1) and np.array_equal(a.n2, b.n2)


class TestTimeMultiplexing:
    def test_assignment_is_pure_relabeling(self):
        gates = time_multiplexed_counts(41, 17, DET)
        assert gates["early"]["counts"] == 41 and gates["early"]["detector"] == "D1"
        assert gates["late"]["counts"] == 17 and gates["late"]["detector"] == "D2"
        assert gates["late"]["gate_offset_s"] == DET.multiplex_delay

    def test_config_validation(self):
        with pytest.raises(ContractViolation):
            SourceConfig(mu=-1.0)
        with pytest.raises(ContractViolation):
            DetectorConfig(efficiency=0.0)
        with pytest.raises(ContractViolation):
            DetectorConfig(dark_prob=1.5)
