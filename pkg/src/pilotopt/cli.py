"""Command line front end.

Subcommands: ``sweep-snr``, ``sweep-n``, ``convergence``, ``optimize``,
``estimate``. Exit codes: 0 success, 2 configuration error, 3 numerical
failure.
"""

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .conventional import (
    conventional_analytic_wsmse,
    conventional_estimate,
    design_reuse_pilots,
)
from .errors import ConfigurationError, ContractViolation, NumericalError
from .harness import (
    NOISE_STREAM_OFFSET,
    INIT_STREAM_ID,
    ExperimentConfig,
    convergence_trace,
    sweep_pilot_length,
    sweep_snr,
)
from .model import (
    SystemConfig,
    generate_channel,
    load_gains,
    received_pilot_signal,
    reference_gains,
    sigma2_from_snr,
)
from .numerics import RandomStream, draw_cn
from .optimizer import (
    analytic_wsmse,
    init_pilots,
    optimize_pilots,
    proposed_estimate,
    save_pilots,
)
from .report import emit

DEFAULT_SNR_GRID = [float(v) for v in range(-10, 21, 2)]

# desk-scale defaults keep full sweeps fast; --profile paper switches to
# the 128-antenna 32-user reference scenario
_PROFILES = {
    "desk": {"m": 32, "k": 8, "n": 4, "trials": 5000, "gains": None},
    "paper": {"m": 128, "k": 32, "n": 16, "trials": 20000, "gains": "paper"},
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pilotopt",
        description="Pilot optimization and channel estimation experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--profile", choices=sorted(_PROFILES), default="desk",
                        help="named scenario preset; explicit flags override it")
        sp.add_argument("--m", type=int, default=None, help="base station antennas")
        sp.add_argument("--k", type=int, default=None, help="number of users")
        sp.add_argument("--n", default=None,
                        help="pilot length; sweep-n accepts a comma list")
        sp.add_argument("--snr-db", default=None,
                        help="comma list of SNR points in dB (default -10..20 step 2)")
        sp.add_argument("--trials", type=int, default=None,
                        help="Monte Carlo trials per point")
        sp.add_argument("--seed", type=int, default=12345)
        sp.add_argument("--gains", default=None,
                        help="gains file, or 'paper' for the bundled 32-user table")
        sp.add_argument("--power", default="1.0",
                        help="per-user power budget: a number or a file")
        sp.add_argument("--init", default="dft-reuse",
                        choices=["dft-reuse", "dft-k", "random"])
        sp.add_argument("--mode", default="both",
                        choices=["proposed", "conventional", "both"])
        sp.add_argument("--tol", type=float, default=1e-8,
                        help="relative per-sweep objective decrease for convergence")
        sp.add_argument("--max-sweeps", type=int, default=100)
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        sp.add_argument("--format", default="csv", choices=["csv", "json", "svg"])

    for name, text in [
        ("sweep-snr", "normalized WSMSE across an SNR grid at fixed pilot length"),
        ("sweep-n", "normalized WSMSE across pilot lengths and SNR points"),
        ("convergence", "optimizer objective traces from all three initializations"),
        ("optimize", "emit one optimized pilot matrix in the text format"),
        ("estimate", "single-realization estimation demo (JSON report)"),
    ]:
        add_common(sub.add_parser(name, help=text))
    return parser


def _parse_float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigurationError(f"bad numeric list {text!r}") from exc


def _parse_int_list(text):
    return [int(round(v)) for v in _parse_float_list(text)]


def _resolve_scenario(args):
    profile = _PROFILES[args.profile]
    m = args.m if args.m is not None else profile["m"]
    k = args.k if args.k is not None else profile["k"]
    trials = args.trials if args.trials is not None else profile["trials"]
    gains_arg = args.gains if args.gains is not None else profile["gains"]

    if gains_arg is None:
        gains = np.ones(k)
    elif gains_arg == "paper":
        gains = reference_gains()
        if len(gains) != k:
            raise ConfigurationError(
                f"the bundled gain table has {len(gains)} users but --k is {k}"
            )
    else:
        gains = load_gains(gains_arg)
        if len(gains) != k:
            raise ConfigurationError(
                f"{gains_arg}: expected {k} gains, found {len(gains)}"
            )

    try:
        powers = np.full(k, float(args.power))
    except ValueError:
        powers = load_gains(args.power)
        if len(powers) != k:
            raise ConfigurationError(
                f"{args.power}: expected {k} powers, found {len(powers)}"
            )

    n_text = args.n if args.n is not None else str(profile["n"])
    n_list = _parse_int_list(n_text)
    if not n_list:
        raise ConfigurationError("--n must name at least one pilot length")

    snr_list = (
        _parse_float_list(args.snr_db) if args.snr_db is not None else DEFAULT_SNR_GRID
    )
    if not snr_list:
        raise ConfigurationError("--snr-db must name at least one SNR point")

    base = SystemConfig(
        antennas=m,
        users=k,
        pilot_len=n_list[0],
        sigma2=1.0,
        powers=powers,
        gains=gains,
    )
    return ExperimentConfig(
        base=base,
        snr_db_list=snr_list,
        n_list=n_list,
        trials=trials,
        seed=args.seed,
        mode=args.mode,
        init=args.init,
        tol=args.tol,
        max_sweeps=args.max_sweeps,
        out_path=args.out,
        out_format=args.format,
    )


def _require_single(values, flag):
    if len(values) != 1:
        raise ConfigurationError(f"this command needs exactly one {flag} value")
    return values[0]


def _cmd_sweep_snr(ecfg, args):
    _require_single(ecfg.n_list, "--n")
    rows = sweep_snr(ecfg)
    emit(rows, ecfg.out_format, ecfg.out_path, x_field="snr_db")
    return 0


def _cmd_sweep_n(ecfg, args):
    rows = sweep_pilot_length(ecfg)
    emit(rows, ecfg.out_format, ecfg.out_path, x_field="n")
    return 0


def _cmd_convergence(ecfg, args):
    snr = _require_single(ecfg.snr_db_list, "--snr-db")
    _require_single(ecfg.n_list, "--n")
    results = convergence_trace(replace(ecfg, snr_db_list=[snr]))
    emit(results, ecfg.out_format, ecfg.out_path)
    return 0


def _single_point_config(ecfg):
    snr = _require_single(ecfg.snr_db_list, "--snr-db")
    n = _require_single(ecfg.n_list, "--n")
    base = ecfg.base
    return replace(
        base, pilot_len=n, sigma2=sigma2_from_snr(snr, base.powers)
    ), snr


def _cmd_optimize(ecfg, args):
    cfg, _ = _single_point_config(ecfg)
    stream = RandomStream(ecfg.seed, INIT_STREAM_ID)
    x0 = init_pilots(ecfg.init, cfg, stream=stream)
    x_opt, trace = optimize_pilots(cfg, x0, tol=ecfg.tol, max_sweeps=ecfg.max_sweeps)
    if ecfg.out_path == "-":
        save_pilots("/dev/stdout", x_opt)
    else:
        save_pilots(ecfg.out_path, x_opt)
    print(
        f"objective {trace.objective_per_update[-1]:.12g} after "
        f"{trace.sweeps_completed} sweeps (converged={trace.converged})",
        file=sys.stderr,
    )
    return 0


def _cmd_estimate(ecfg, args):
    cfg, snr = _single_point_config(ecfg)
    algorithms = (
        ("proposed", "conventional") if ecfg.mode == "both" else (ecfg.mode,)
    )
    h = generate_channel(cfg, RandomStream(ecfg.seed, 0))
    noise = np.sqrt(cfg.sigma2) * draw_cn(
        RandomStream(ecfg.seed, NOISE_STREAM_OFFSET), cfg.antennas, cfg.pilot_len
    )
    payload = {"snr_db": snr, "n": cfg.pilot_len, "algorithms": {}}
    for algorithm in algorithms:
        if algorithm == "proposed":
            stream = RandomStream(ecfg.seed, INIT_STREAM_ID)
            x0 = init_pilots(ecfg.init, cfg, stream=stream)
            x, _ = optimize_pilots(cfg, x0, tol=ecfg.tol, max_sweeps=ecfg.max_sweeps)
            ana = analytic_wsmse(x, cfg).wsmse
            estimate = proposed_estimate
        else:
            x, rmap = design_reuse_pilots(cfg.pilot_len, cfg.users, cfg.powers)
            ana = conventional_analytic_wsmse(cfg, rmap).wsmse
            estimate = conventional_estimate
        y = received_pilot_signal(h, x, noise)
        h_hat = estimate(y, x, cfg)
        per_user = np.sum(np.abs(h_hat - h) ** 2, axis=0) / (cfg.antennas * cfg.gains)
        payload["algorithms"][algorithm] = {
            "wsmse_analytic": ana,
            "wsmse_realized": float(per_user.mean()),
            "per_user_realized": [float(v) for v in per_user],
        }
    text = json.dumps(payload, indent=2) + "\n"
    if ecfg.out_path == "-":
        sys.stdout.write(text)
    else:
        with open(ecfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


_COMMANDS = {
    "sweep-snr": _cmd_sweep_snr,
    "sweep-n": _cmd_sweep_n,
    "convergence": _cmd_convergence,
    "optimize": _cmd_optimize,
    "estimate": _cmd_estimate,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        ecfg = _resolve_scenario(args)
        return _COMMANDS[args.command](ecfg, args)
    except (ConfigurationError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
