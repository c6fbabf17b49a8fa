import numpy as np
import pytest

from pilotopt import (
    ConfigurationError,
    ExperimentConfig,
    SystemConfig,
    closed_form_orthogonal,
    closed_form_single_symbol,
    convergence_trace,
    design_reuse_pilots,
    objective,
    reference_gains,
    run_monte_carlo,
    sigma2_from_snr,
    sweep_pilot_length,
    sweep_snr,
)

DESK_GAINS = reference_gains()[:8]


def desk_experiment(**overrides):
    base = SystemConfig(antennas=16, users=8, pilot_len=4, sigma2=1.0,
                        gains=DESK_GAINS)
    kwargs = dict(base=base, snr_db_list=[0.0, 10.0], trials=400, seed=1234)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


class TestRunMonteCarlo:
    def test_near_noiseless_recovery(self):
        cfg = SystemConfig(antennas=8, users=4, pilot_len=4, sigma2=1e-9)
        x = closed_form_orthogonal(cfg)
        rep = run_monte_carlo(cfg, x, "proposed", trials=50, seed=7)
        assert rep.wsmse < 1e-6

    def test_scalar_reference_many_trials(self):
        cfg = SystemConfig(antennas=8, users=1, pilot_len=1, sigma2=1.0)
        x = closed_form_single_symbol(cfg)
        rep = run_monte_carlo(cfg, x, "proposed", trials=100000, seed=9)
        assert rep.wsmse == pytest.approx(0.5, rel=0.02)

    def test_single_contaminator_reference(self):
        cfg = SystemConfig(antennas=16, users=2, pilot_len=1, sigma2=1.0)
        x, _ = design_reuse_pilots(1, 2, cfg.powers)
        rep = run_monte_carlo(cfg, x, "conventional", trials=10000, seed=42)
        assert rep.wsmse == pytest.approx(0.75, rel=0.02)

    def test_deterministic_and_worker_independent(self):
        cfg = SystemConfig(antennas=8, users=4, pilot_len=2, sigma2=0.5,
                           gains=[0.9, 0.4, 0.7, 0.2])
        x, _ = design_reuse_pilots(2, 4, cfg.powers)
        a = run_monte_carlo(cfg, x, "conventional", trials=300, seed=5)
        b = run_monte_carlo(cfg, x, "conventional", trials=300, seed=5)
        c = run_monte_carlo(cfg, x, "conventional", trials=300, seed=5, workers=4)
        assert a.wsmse == b.wsmse == c.wsmse
        assert np.array_equal(a.per_user, c.per_user)
        assert a.stderr == c.stderr

    def test_both_mode_shares_realizations(self):
        cfg = SystemConfig(antennas=8, users=4, pilot_len=2, sigma2=0.5,
                           gains=[0.9, 0.4, 0.7, 0.2])
        x, _ = design_reuse_pilots(2, 4, cfg.powers)
        both = run_monte_carlo(cfg, x, "both", trials=200, seed=11)
        single = run_monte_carlo(cfg, x, "conventional", trials=200, seed=11)
        assert set(both) == {"proposed", "conventional"}
        assert both["conventional"].wsmse == single.wsmse

    def test_rejects_bad_mode_and_trials(self):
        cfg = SystemConfig(antennas=2, users=1, pilot_len=1, sigma2=1.0)
        x = closed_form_single_symbol(cfg)
        with pytest.raises(ConfigurationError):
            run_monte_carlo(cfg, x, "bogus", trials=10, seed=1)
        with pytest.raises(ConfigurationError):
            run_monte_carlo(cfg, x, "proposed", trials=0, seed=1)

    def test_per_user_agreement_with_analytic(self):
        from pilotopt import analytic_wsmse, init_pilots, optimize_pilots
        from pilotopt.numerics import RandomStream

        cfg = SystemConfig(antennas=32, users=4, pilot_len=2, sigma2=0.5,
                           gains=DESK_GAINS[:4])
        x0 = init_pilots("random", cfg, stream=RandomStream(1, 0))
        x, _ = optimize_pilots(cfg, x0, tol=1e-8, max_sweeps=100)
        expected = analytic_wsmse(x, cfg).per_user
        rep = run_monte_carlo(cfg, x, "proposed", trials=10000, seed=606)
        assert np.all(np.abs(rep.per_user - expected) / expected < 0.02)

    def test_stderr_scales_with_trials(self):
        cfg = SystemConfig(antennas=4, users=2, pilot_len=2, sigma2=1.0)
        x = closed_form_orthogonal(cfg)
        small = run_monte_carlo(cfg, x, "proposed", trials=200, seed=3)
        large = run_monte_carlo(cfg, x, "proposed", trials=3200, seed=3)
        assert large.stderr < small.stderr
        assert large.trials == 3200


class TestSweepSnr:
    def test_row_layout_and_dominance(self):
        ecfg = desk_experiment()
        rows = sweep_snr(ecfg)
        assert len(rows) == 4
        assert [r.algorithm for r in rows] == [
            "proposed", "conventional", "proposed", "conventional",
        ]
        for r in rows:
            assert r.n == 4
            assert r.trials == 400
            assert np.isfinite(r.wsmse_analytic)
            assert abs(r.wsmse_empirical - r.wsmse_analytic) <= 4 * r.stderr
        by_snr = {r.snr_db: {} for r in rows}
        for r in rows:
            by_snr[r.snr_db][r.algorithm] = r
        for snr, pair in by_snr.items():
            assert pair["proposed"].wsmse_analytic <= pair["conventional"].wsmse_analytic
            assert pair["proposed"].sweeps >= 1
            assert pair["conventional"].sweeps is None

    def test_proposed_decreasing_in_snr(self):
        ecfg = desk_experiment(
            snr_db_list=[-10.0, 0.0, 10.0, 20.0], mode="proposed", trials=1
        )
        rows = sweep_snr(ecfg)
        vals = [r.wsmse_analytic for r in rows]
        assert np.all(np.diff(vals) < 0)

    def test_single_algorithm_mode(self):
        ecfg = desk_experiment(mode="conventional", trials=50)
        rows = sweep_snr(ecfg)
        assert [r.algorithm for r in rows] == ["conventional", "conventional"]


class TestSweepPilotLength:
    def test_orthogonal_point_matches_and_monotone(self):
        ecfg = desk_experiment(snr_db_list=[0.0], n_list=[1, 2, 4, 8], trials=50)
        rows = sweep_pilot_length(ecfg)
        assert len(rows) == 8
        prop = {r.n: r.wsmse_analytic for r in rows if r.algorithm == "proposed"}
        conv = {r.n: r.wsmse_analytic for r in rows if r.algorithm == "conventional"}
        assert abs(prop[8] - conv[8]) < 1e-9
        for series in (prop, conv):
            vals = [series[n] for n in (1, 2, 4, 8)]
            assert np.all(np.diff(vals) <= 1e-12)

    def test_single_symbol_matches_closed_form(self):
        ecfg = desk_experiment(snr_db_list=[0.0], n_list=[1], mode="proposed",
                               trials=20)
        rows = sweep_pilot_length(ecfg)
        cfg = SystemConfig(antennas=16, users=8, pilot_len=1,
                           sigma2=sigma2_from_snr(0.0, np.ones(8)),
                           gains=DESK_GAINS)
        best = objective(closed_form_single_symbol(cfg), cfg)
        expected = 1.0 - 1.0 / 8 + cfg.sigma2 / 8 * best
        assert rows[0].wsmse_analytic == pytest.approx(expected, abs=1e-10)

    def test_requires_n_list(self):
        ecfg = desk_experiment(trials=10)
        with pytest.raises(ConfigurationError):
            sweep_pilot_length(ecfg)


class TestConvergenceTrace:
    def test_three_initializations(self):
        ecfg = desk_experiment(snr_db_list=[0.0], trials=10, tol=1e-8,
                               max_sweeps=200)
        results = convergence_trace(ecfg)
        assert [r.init for r in results] == ["dft-reuse", "dft-k", "random"]
        for r in results:
            assert r.trace.converged
            assert r.updates_to_converge >= 1
            assert r.final_objective == pytest.approx(
                float(r.trace.objective_per_update[-1])
            )
            objs = np.concatenate(
                [[r.trace.initial_objective], r.trace.objective_per_update]
            )
            assert np.all(np.diff(objs) <= 1e-12)
        # off-frame starts agree on the reachable optimum
        assert results[1].final_objective == pytest.approx(
            results[2].final_objective, rel=1e-6
        )

    def test_requires_single_snr(self):
        ecfg = desk_experiment(trials=10)
        with pytest.raises(ConfigurationError):
            convergence_trace(ecfg)


class TestExperimentConfig:
    def test_validation(self):
        base = SystemConfig(antennas=4, users=2, pilot_len=2, sigma2=1.0)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(base=base, snr_db_list=[], trials=10)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(base=base, snr_db_list=[0.0], trials=0)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(base=base, snr_db_list=[0.0], trials=1, mode="all")
        with pytest.raises(ConfigurationError):
            ExperimentConfig(base=base, snr_db_list=[0.0], trials=1, workers=0)
