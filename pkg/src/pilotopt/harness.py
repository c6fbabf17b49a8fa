"""Monte Carlo experiment drivers: SNR sweeps, pilot-length sweeps, traces.

Every trial draws its channel and noise from substreams indexed by the
trial number, so results are reproducible bit for bit and independent of
how trials are scheduled across workers. Trial ``t`` uses stream id
``t`` for the channel and ``t + 2**32`` for the noise; the optimizer's
random initialization, when requested, draws from stream id ``2**33``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .conventional import (
    conventional_analytic_wsmse,
    conventional_estimate,
    design_reuse_pilots,
)
from .errors import ConfigurationError, NumericalError
from .model import (
    SystemConfig,
    WsmseReport,
    generate_channel,
    received_pilot_signal,
    sigma2_from_snr,
)
from .numerics import RandomStream, draw_cn
from .optimizer import analytic_wsmse, init_pilots, optimize_pilots, proposed_estimate

NOISE_STREAM_OFFSET = 2**32
INIT_STREAM_ID = 2**33

MODES = ("proposed", "conventional", "both")

# Relative tolerance within which all initializations must reach the
# same final objective.
FINAL_OBJECTIVE_RTOL = 1e-6

_ESTIMATORS = {
    "proposed": proposed_estimate,
    "conventional": conventional_estimate,
}


@dataclass(eq=False)
class ExperimentConfig:
    """One experiment: a base scenario plus sweep axes and run options.

    ``base.sigma2`` is a placeholder; the drivers recompute the noise
    variance from each SNR point. ``n_list`` is only consulted by the
    pilot-length sweep.
    """

    base: SystemConfig
    snr_db_list: list
    n_list: list = field(default_factory=list)
    trials: int = 1000
    seed: int = 12345
    mode: str = "both"
    init: str = "dft-reuse"
    tol: float = 1e-8
    max_sweeps: int = 100
    workers: int = 1
    out_path: str | None = None
    out_format: str = "csv"

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.snr_db_list:
            raise ConfigurationError("snr_db_list must be non-empty")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")


@dataclass(eq=False)
class SweepRow:
    """One (SNR, pilot length, algorithm) result of a sweep."""

    snr_db: float
    n: int
    algorithm: str
    wsmse_analytic: float
    wsmse_empirical: float
    stderr: float
    trials: int
    sweeps: int | None = None


@dataclass(eq=False)
class ConvergenceResult:
    """Objective trace of one optimizer run from a named initialization."""

    init: str
    snr_db: float
    trace: object
    final_objective: float
    updates_to_converge: int


def _trial_per_user_errors(cfg, x, labels, seed, t):
    h = generate_channel(cfg, RandomStream(seed, t))
    noise = np.sqrt(cfg.sigma2) * draw_cn(
        RandomStream(seed, NOISE_STREAM_OFFSET + t), cfg.antennas, cfg.pilot_len
    )
    y = received_pilot_signal(h, x, noise)
    out = {}
    for label in labels:
        estimate = _ESTIMATORS[label](y, x, cfg)
        err = np.sum(np.abs(estimate - h) ** 2, axis=0)
        out[label] = err / (cfg.antennas * cfg.gains)
    return out


def run_monte_carlo(cfg, x, mode, trials, seed, workers=1):
    """Empirical normalized WSMSE of an estimator over seeded trials.

    Each trial draws a fresh channel and noise realization, forms the
    received training block, runs the selected estimator, and records
    the per-user squared error normalized by ``antennas * g_k``. The
    returned :class:`WsmseReport` carries the mean over trials, its
    standard error, and the per-user means. Results depend only on
    ``(cfg, x, mode, trials, seed)``, not on ``workers``.

    ``mode="both"`` evaluates both estimators on identical realizations
    and returns a dict keyed by algorithm name.
    """
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    labels = ("proposed", "conventional") if mode == "both" else (mode,)

    def one(t):
        return _trial_per_user_errors(cfg, x, labels, seed, t)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(one, range(trials)))
    else:
        per_trial = [one(t) for t in range(trials)]

    reports = {}
    for label in labels:
        errs = np.stack([per_trial[t][label] for t in range(trials)])
        per_trial_wsmse = errs.mean(axis=1)
        mean = float(per_trial_wsmse.mean())
        if trials > 1:
            stderr = float(per_trial_wsmse.std(ddof=1) / np.sqrt(trials))
        else:
            stderr = float("nan")
        reports[label] = WsmseReport(
            wsmse=mean,
            per_user=errs.mean(axis=0),
            stderr=stderr,
            trials=trials,
        )
    return reports if mode == "both" else reports[labels[0]]


def _consistency_gate(label, analytic, empirical, stderr):
    if not np.isfinite(stderr) or stderr == 0.0:
        return
    if abs(empirical - analytic) > 4.0 * stderr:
        raise NumericalError(
            f"{label}: empirical WSMSE {empirical:.6g} deviates from analytic "
            f"{analytic:.6g} by more than 4 standard errors ({stderr:.3g})"
        )


def _algorithms(mode):
    return ("proposed", "conventional") if mode == "both" else (mode,)


def _proposed_row(cfg, ecfg, snr_db):
    stream = RandomStream(ecfg.seed, INIT_STREAM_ID)
    x0 = init_pilots(ecfg.init, cfg, stream=stream)
    x_opt, trace = optimize_pilots(cfg, x0, tol=ecfg.tol, max_sweeps=ecfg.max_sweeps)
    ana = analytic_wsmse(x_opt, cfg)
    emp = run_monte_carlo(cfg, x_opt, "proposed", ecfg.trials, ecfg.seed, ecfg.workers)
    _consistency_gate(f"proposed @ {snr_db} dB", ana.wsmse, emp.wsmse, emp.stderr)
    return SweepRow(
        snr_db=snr_db,
        n=cfg.pilot_len,
        algorithm="proposed",
        wsmse_analytic=ana.wsmse,
        wsmse_empirical=emp.wsmse,
        stderr=emp.stderr,
        trials=ecfg.trials,
        sweeps=trace.sweeps_completed,
    )


def _conventional_row(cfg, ecfg, snr_db, x_base, rmap):
    ana = conventional_analytic_wsmse(cfg, rmap)
    emp = run_monte_carlo(
        cfg, x_base, "conventional", ecfg.trials, ecfg.seed, ecfg.workers
    )
    _consistency_gate(f"conventional @ {snr_db} dB", ana.wsmse, emp.wsmse, emp.stderr)
    return SweepRow(
        snr_db=snr_db,
        n=cfg.pilot_len,
        algorithm="conventional",
        wsmse_analytic=ana.wsmse,
        wsmse_empirical=emp.wsmse,
        stderr=emp.stderr,
        trials=ecfg.trials,
        sweeps=None,
    )


def sweep_snr(ecfg):
    """Sweep the SNR grid at a fixed pilot length.

    For each SNR point the noise variance is recomputed from the power
    budgets, the baseline rows reuse the fixed DFT-reuse pilots, and the
    optimized rows rerun the pilot optimization from the configured
    initialization. Returns one :class:`SweepRow` per (SNR, algorithm),
    proposed first at each SNR when both run.
    """
    base = ecfg.base
    algorithms = _algorithms(ecfg.mode)
    if "conventional" in algorithms:
        x_base, rmap = design_reuse_pilots(base.pilot_len, base.users, base.powers)
    rows = []
    for snr_db in ecfg.snr_db_list:
        cfg = replace(base, sigma2=sigma2_from_snr(snr_db, base.powers))
        for algorithm in algorithms:
            if algorithm == "proposed":
                rows.append(_proposed_row(cfg, ecfg, snr_db))
            else:
                rows.append(_conventional_row(cfg, ecfg, snr_db, x_base, rmap))
    return rows


def sweep_pilot_length(ecfg):
    """Sweep pilot length and SNR jointly.

    Emits one row per (pilot length, SNR, algorithm); at ``n == users``
    both algorithms reduce to orthogonal pilots and achieve the same
    analytic WSMSE.
    """
    if not ecfg.n_list:
        raise ConfigurationError("sweep_pilot_length requires a non-empty n_list")
    base = ecfg.base
    algorithms = _algorithms(ecfg.mode)
    rows = []
    for n in ecfg.n_list:
        cfg_n = replace(base, pilot_len=int(n))
        if "conventional" in algorithms:
            x_base, rmap = design_reuse_pilots(cfg_n.pilot_len, cfg_n.users, cfg_n.powers)
        for snr_db in ecfg.snr_db_list:
            cfg = replace(cfg_n, sigma2=sigma2_from_snr(snr_db, cfg_n.powers))
            for algorithm in algorithms:
                if algorithm == "proposed":
                    rows.append(_proposed_row(cfg, ecfg, snr_db))
                else:
                    rows.append(_conventional_row(cfg, ecfg, snr_db, x_base, rmap))
    return rows


def _updates_to_converge(trace, rtol=FINAL_OBJECTIVE_RTOL):
    objs = trace.objective_per_update
    final = objs[-1]
    close = np.abs(objs - final) <= rtol * final
    first = int(np.argmax(close))
    return first + 1


def convergence_trace(ecfg):
    """Optimizer objective traces from all three starting points.

    Runs the pilot optimization at a single SNR from the DFT-reuse,
    truncated-DFT, and seeded-random initializations and returns one
    :class:`ConvergenceResult` per run.

    The search is non-convex for ``1 < pilot_len < users``, so different
    starting points may settle on different stationary objectives; in
    particular the DFT-reuse start keeps every pilot inside the original
    orthogonal direction set (an invariant of the per-user update) and
    can stop at a slightly higher value than off-frame starts. The
    returned ``final_objective`` fields let callers compare.
    """
    if len(ecfg.snr_db_list) != 1:
        raise ConfigurationError(
            "convergence_trace expects exactly one SNR point, got "
            f"{len(ecfg.snr_db_list)}"
        )
    snr_db = ecfg.snr_db_list[0]
    cfg = replace(ecfg.base, sigma2=sigma2_from_snr(snr_db, ecfg.base.powers))
    results = []
    for kind in ("dft-reuse", "dft-k", "random"):
        stream = RandomStream(ecfg.seed, INIT_STREAM_ID)
        x0 = init_pilots(kind, cfg, stream=stream)
        _, trace = optimize_pilots(cfg, x0, tol=ecfg.tol, max_sweeps=ecfg.max_sweeps)
        results.append(
            ConvergenceResult(
                init=kind,
                snr_db=snr_db,
                trace=trace,
                final_objective=float(trace.objective_per_update[-1]),
                updates_to_converge=_updates_to_converge(trace),
            )
        )
    return results
