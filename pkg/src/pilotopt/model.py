"""System configuration, channel statistics, and the uplink pilot signal.

The physical setup: a base station with ``antennas`` receive antennas
serves ``users`` single-antenna terminals. During training, every user
transmits a known pilot sequence of ``pilot_len`` symbols; the base
station observes the superposition of all users' pilots through their
channels plus additive noise and estimates the per-user channel vectors.
"""

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .numerics import draw_cn


def _as_per_user(value, count, name):
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(count, float(arr))
    if arr.shape != (count,):
        raise ConfigurationError(
            f"{name} must be a scalar or a length-{count} sequence, got shape {arr.shape}"
        )
    return arr


@dataclass(eq=False)
class SystemConfig:
    """Dimensions and statistics of one training scenario.

    Parameters
    ----------
    antennas : int
        Base station antenna count (M).
    users : int
        Number of single-antenna users (K).
    pilot_len : int
        Pilot sequence length in symbol periods (N); may be smaller,
        equal to, or larger than ``users``.
    sigma2 : float
        Noise variance per received sample, linear scale.
    powers : float or array_like
        Per-user total pilot energy budget across the whole sequence
        (the constraint is on the squared norm of the length-N pilot
        vector, not on per-symbol power). Scalars broadcast to all users.
    gains : float or array_like
        Per-user average path-loss gains, all positive. Scalars broadcast.
    """

    antennas: int
    users: int
    pilot_len: int
    sigma2: float
    powers: np.ndarray = field(default=1.0)
    gains: np.ndarray = field(default=1.0)

    def __post_init__(self):
        if self.antennas < 1 or self.users < 1 or self.pilot_len < 1:
            raise ConfigurationError(
                f"dimensions must be positive, got antennas={self.antennas}, "
                f"users={self.users}, pilot_len={self.pilot_len}"
            )
        self.sigma2 = float(self.sigma2)
        if not np.isfinite(self.sigma2) or self.sigma2 < 0:
            raise ConfigurationError(f"sigma2 must be finite and >= 0, got {self.sigma2}")
        self.powers = _as_per_user(self.powers, self.users, "powers")
        self.gains = _as_per_user(self.gains, self.users, "gains")
        if not np.all(np.isfinite(self.powers)) or np.any(self.powers <= 0):
            raise ConfigurationError("all per-user powers must be finite and > 0")
        if not np.all(np.isfinite(self.gains)) or np.any(self.gains <= 0):
            raise ConfigurationError("all path-loss gains must be finite and > 0")


@dataclass(eq=False)
class WsmseReport:
    """Normalized weighted-sum MSE and its per-user terms.

    ``wsmse`` is the weighted sum MSE divided by (users * antennas), so
    ``per_user`` holds each user's MSE per channel coefficient divided
    by that user's gain and ``wsmse`` is their mean. ``stderr`` and
    ``trials`` are set on Monte Carlo estimates and ``None`` on analytic
    evaluations.
    """

    wsmse: float
    per_user: np.ndarray
    stderr: float | None = None
    trials: int | None = None


def reference_gains():
    """Return the bundled 32-user path-loss gain table.

    The values come from an 8x4 gain matrix vectorized column by column
    (column 1 top to bottom, then column 2, and so on); all entries lie
    strictly between 0 and 1. The same table ships as a gains file at
    ``pilotopt/data/gains32.txt``.
    """
    path = resources.files("pilotopt.data").joinpath("gains32.txt")
    with path.open("r", encoding="utf-8") as fh:
        return _parse_gains(fh)


def _parse_gains(lines):
    values = []
    for raw in lines:
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        values.append(float(text))
    if not values:
        raise ConfigurationError("gains file contains no values")
    return np.asarray(values, dtype=np.float64)


def load_gains(path):
    """Read a gains file: one decimal gain per line, '#' comments allowed."""
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_gains(fh)


def save_gains(path, gains):
    """Write gains in the one-value-per-line text format."""
    gains = np.asarray(gains, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for g in gains:
            fh.write(f"{g:.17g}\n")


def generate_channel(cfg, stream):
    """Draw one channel realization, shape ``(antennas, users)``.

    Column k is ``sqrt(gains[k])`` times an i.i.d. CN(0, 1) vector, so
    each coefficient has average power ``gains[k]``; columns are
    independent. Deterministic given ``(cfg, stream)``.
    """
    white = draw_cn(stream, cfg.antennas, cfg.users)
    return white * np.sqrt(cfg.gains)[np.newaxis, :]


def received_pilot_signal(h, x, noise):
    """Received training block: channel times conjugated pilots plus noise.

    ``h`` is ``(antennas, users)``, ``x`` is ``(pilot_len, users)`` with
    one pilot sequence per column, ``noise`` is ``(antennas, pilot_len)``.
    Returns ``h @ x.conj().T + noise``.
    """
    h = np.asarray(h)
    x = np.asarray(x)
    noise = np.asarray(noise)
    if h.ndim != 2 or x.ndim != 2 or noise.ndim != 2:
        raise ContractViolation("h, x, noise must all be 2-D arrays")
    if h.shape[1] != x.shape[1]:
        raise ContractViolation(
            f"h has {h.shape[1]} users but x has {x.shape[1]} pilot columns"
        )
    if noise.shape != (h.shape[0], x.shape[0]):
        raise ContractViolation(
            f"noise shape {noise.shape} does not match (antennas, pilot_len) = "
            f"({h.shape[0]}, {x.shape[0]})"
        )
    return h @ x.conj().T + noise


def sigma2_from_snr(snr_db, powers):
    """Noise variance realizing a target SNR in dB.

    SNR is defined as the average per-user power budget divided by the
    noise variance, so ``sigma2 = mean(powers) / 10**(snr_db / 10)``.
    """
    powers = np.asarray(powers, dtype=np.float64)
    if powers.size == 0 or np.any(powers <= 0):
        raise ConfigurationError("powers must be non-empty and positive")
    return float(np.mean(powers) / 10.0 ** (snr_db / 10.0))
