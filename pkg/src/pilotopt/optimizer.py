"""Pilot sequence optimization by cyclic generalized Rayleigh-quotient ascent.

The design target is the weighted sum MSE of per-user MMSE channel
estimates, with weights 1/g_k so every user is estimated to comparable
relative accuracy. After optimizing the per-user combiner and receiver
scalar in closed form, minimizing that WSMSE over the pilots reduces to

    minimize  tr(A^{-1}),   A = sum_k g_k x_k x_k^H + sigma2 * I

subject to per-user energy budgets ``||x_k||^2 <= P_k``. The iterative
solver sweeps the users in order; with everyone else's pilot held fixed,
user k's subproblem is a generalized Rayleigh quotient built from the
leave-one-out matrix Q_k, solved exactly by one Hermitian
eigendecomposition of the whitened quotient matrix. Each single-user
update can only decrease tr(A^{-1}), so the sweep objective is monotone
and the iteration always converges.

Closed forms replace the iteration in the two boundary regimes: a single
pilot symbol (any full-power pilot is optimal) and pilot length equal to
the user count (orthogonal full-power pilots are optimal).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConfigurationError,
    ContractViolation,
    NumericalError,
    SingularMatrixError,
)
from .model import WsmseReport
from .numerics import (
    SINGULARITY_FLOOR,
    draw_cn,
    hermitian_eig,
    inv_sqrt_psd,
    solve_hermitian,
)

# Relative eigenvalue gap below which the top eigenvector of the update
# matrix is treated as non-unique.
DEGENERACY_GAP = 1e-10


def _check_pilots(x, cfg, name="x"):
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (cfg.pilot_len, cfg.users):
        raise ContractViolation(
            f"{name} shape {x.shape} does not match (pilot_len, users) = "
            f"({cfg.pilot_len}, {cfg.users})"
        )
    return x


def _hermitize(a):
    return 0.5 * (a + a.conj().T)


def gram_matrix(x, cfg):
    """Pilot-domain covariance ``A = sum_k g_k x_k x_k^H + sigma2 * I``."""
    x = _check_pilots(x, cfg)
    a = (x * cfg.gains[np.newaxis, :]) @ x.conj().T
    a[np.diag_indices_from(a)] += cfg.sigma2
    return _hermitize(a)


def _checked_inverse_eigvals(a, context):
    w = np.linalg.eigvalsh(a)
    if w[-1] <= 0 or w[0] <= SINGULARITY_FLOOR * w[-1]:
        raise SingularMatrixError(
            f"{context}: matrix is singular (smallest eigenvalue {w[0]:.6e})",
            eigenvalue=w[0],
        )
    return w


def objective(x, cfg):
    """Design objective ``tr(A^{-1})``, evaluated as the sum of 1/eigenvalue."""
    a = gram_matrix(x, cfg)
    w = _checked_inverse_eigvals(a, "objective")
    return float(np.sum(1.0 / w))


def leave_one_out(x, k, cfg):
    """Covariance with user k removed: ``Q_k = A - g_k x_k x_k^H``."""
    x = _check_pilots(x, cfg)
    others = np.delete(np.arange(cfg.users), k)
    q = (x[:, others] * cfg.gains[others]) @ x[:, others].conj().T
    q[np.diag_indices_from(q)] += cfg.sigma2
    return _hermitize(q)


def rayleigh_update(x, k, cfg):
    """Optimal pilot for user k with all other pilots held fixed.

    Whitening the single-user quotient by ``F_k^{-1/2}`` with
    ``F_k = g_k Q_k^{-1} + I / P_k`` turns the subproblem into a plain
    Rayleigh quotient, so the update is ``F_k^{-1/2}`` times the top
    eigenvector of ``g_k F_k^{-1/2} Q_k^{-2} F_k^{-1/2}``, rescaled to
    use the full energy budget (the budget constraint is always tight at
    the optimum).

    Returns ``(column, degenerate)``. When the top eigenvalue is not
    isolated (relative gap below ``1e-10``, e.g. a single user against
    isotropic interference) every feasible direction is optimal; the
    incumbent direction is kept, rescaled to full power, and flagged so
    the iteration stays deterministic.
    """
    x = _check_pilots(x, cfg)
    if not 0 <= k < cfg.users:
        raise ContractViolation(f"user index {k} out of range")
    g_k = cfg.gains[k]
    p_k = cfg.powers[k]

    q = leave_one_out(x, k, cfg)
    qw, qv = hermitian_eig(q)
    if qw[-1] <= 0 or qw[0] <= SINGULARITY_FLOOR * qw[-1]:
        raise SingularMatrixError(
            f"leave-one-out matrix for user {k} is singular "
            f"(smallest eigenvalue {qw[0]:.6e})",
            eigenvalue=qw[0],
        )
    q_inv = _hermitize((qv / qw) @ qv.conj().T)

    f = _hermitize(g_k * q_inv + np.eye(cfg.pilot_len) / p_k)
    f_inv_sqrt = inv_sqrt_psd(f)
    quotient = _hermitize(g_k * f_inv_sqrt @ q_inv @ q_inv @ f_inv_sqrt)
    mw, mv = hermitian_eig(quotient)

    if cfg.pilot_len > 1:
        gap = (mw[-1] - mw[-2]) / mw[-1]
        if gap < DEGENERACY_GAP:
            incumbent = x[:, k].copy()
            norm = np.linalg.norm(incumbent)
            if norm == 0.0:
                # a zero incumbent gives no direction to keep; any unit
                # direction is optimal, pick the first basis vector
                incumbent = np.zeros(cfg.pilot_len, dtype=np.complex128)
                incumbent[0] = 1.0
                norm = 1.0
            return incumbent * (np.sqrt(p_k) / norm), True

    col = f_inv_sqrt @ mv[:, -1]
    col *= np.sqrt(p_k) / np.linalg.norm(col)
    return col, False


@dataclass(eq=False)
class OptimizerTrace:
    """Objective history of one pilot optimization run.

    ``objective_per_update`` holds ``tr(A^{-1})`` after every
    single-user update (``users`` entries per sweep); it is non
    increasing. ``sweeps_completed`` counts full passes over the users.
    """

    objective_per_update: np.ndarray
    sweeps_completed: int
    converged: bool
    initial_objective: float
    degenerate_updates: int = 0


def optimize_pilots(cfg, init, tol=1e-8, max_sweeps=100):
    """Cyclic per-user pilot optimization from a feasible starting matrix.

    Sweeps users ``0..K-1`` in order, replacing each pilot with its
    single-user optimum, until the relative objective decrease over one
    full sweep falls below ``tol`` or ``max_sweeps`` is reached. Returns
    ``(pilots, OptimizerTrace)``.

    The noise variance must be positive: mid-iteration the pilot Gram
    matrix can lose rank, and ``sigma2 > 0`` keeps it invertible.
    """
    if cfg.sigma2 <= 0:
        raise ContractViolation("optimize_pilots requires sigma2 > 0")
    x = _check_pilots(init, cfg, name="init").copy()
    norms = np.sum(np.abs(x) ** 2, axis=0)
    if np.any(norms > cfg.powers + 1e-9):
        worst = int(np.argmax(norms - cfg.powers))
        raise ContractViolation(
            f"initial pilot {worst} exceeds its power budget: "
            f"{norms[worst]:.12g} > {cfg.powers[worst]:.12g}"
        )

    history = []
    degenerate = 0
    initial = objective(x, cfg)
    current = initial
    converged = False
    sweeps = 0
    for _ in range(max_sweeps):
        sweep_start = current
        for k in range(cfg.users):
            col, was_degenerate = rayleigh_update(x, k, cfg)
            x[:, k] = col
            current = objective(x, cfg)
            history.append(current)
            degenerate += int(was_degenerate)
            if not np.isfinite(current):
                trace = OptimizerTrace(
                    np.asarray(history), sweeps, False, initial, degenerate
                )
                err = NumericalError(
                    f"objective became non-finite at user {k}, sweep {sweeps + 1}"
                )
                err.trace = trace
                raise err
        sweeps += 1
        if (sweep_start - current) < tol * sweep_start:
            converged = True
            break

    trace = OptimizerTrace(
        objective_per_update=np.asarray(history),
        sweeps_completed=sweeps,
        converged=converged,
        initial_objective=initial,
        degenerate_updates=degenerate,
    )
    return x, trace


def closed_form_single_symbol(cfg):
    """Optimal pilots for a one-symbol sequence: every user at full power.

    With ``pilot_len == 1`` the Gram matrix is the scalar
    ``sum_k g_k P_k + sigma2``, so any full-power phase choice is
    globally optimal; the real positive root is returned. The objective
    is ``1 / (sum_k g_k P_k + sigma2)``.
    """
    if cfg.pilot_len != 1:
        raise ContractViolation("closed_form_single_symbol requires pilot_len == 1")
    return np.sqrt(cfg.powers)[np.newaxis, :].astype(np.complex128)


def closed_form_orthogonal(cfg):
    """Optimal pilots when the sequence length equals the user count.

    Mutually orthogonal full-power columns (scaled unitary DFT columns)
    are globally optimal; the Gram matrix becomes diagonal in the pilot
    basis with eigenvalues ``g_k P_k + sigma2``, giving objective
    ``sum_k 1 / (g_k P_k + sigma2)``.
    """
    if cfg.pilot_len != cfg.users:
        raise ContractViolation("closed_form_orthogonal requires pilot_len == users")
    unitary_dft = scipy.linalg.dft(cfg.pilot_len, scale="sqrtn")
    return unitary_dft * np.sqrt(cfg.powers)[np.newaxis, :]


def combiner(x, k, cfg):
    """Pilot-domain combining vector for user k: ``g_k A^{-1} x_k``.

    Maximizes the ratio of user k's signal energy to total received
    energy over all length-N combiners (a generalized Rayleigh quotient
    whose optimum is available in closed form).
    """
    x = _check_pilots(x, cfg)
    a = gram_matrix(x, cfg)
    return cfg.gains[k] * solve_hermitian(a, x[:, k])


def receiver_scalar(x, u_k, k, cfg):
    """MMSE scalar applied to the combined observation ``y @ u_k``.

    Returns ``c_k = g_k (u_k^H x_k) / (u_k^H A u_k)``, the minimizer of
    the per-user MSE for a fixed combiner. The product ``c_k * u_k`` is
    invariant under rescaling of ``u_k`` by any nonzero complex factor,
    and at the optimal combiner ``c_k == 1`` exactly, so the estimate
    collapses to ``g_k * y @ A^{-1} x_k``.
    """
    x = _check_pilots(x, cfg)
    u_k = np.asarray(u_k, dtype=np.complex128)
    if u_k.shape != (cfg.pilot_len,):
        raise ContractViolation(f"u_k must have shape ({cfg.pilot_len},)")
    a = gram_matrix(x, cfg)
    denom = np.vdot(u_k, a @ u_k).real
    if denom <= 0.0:
        raise ContractViolation("receiver scalar undefined for zero combiner")
    return cfg.gains[k] * np.vdot(u_k, x[:, k]) / denom


def proposed_estimate(y, x, cfg):
    """Channel estimate from combined observations, all users at once.

    Column k is ``g_k * y @ A^{-1} x_k``, i.e. the per-user combiner
    with its (identically 1) MMSE output scalar already folded in.
    Returns an ``(antennas, users)`` matrix.
    """
    x = _check_pilots(x, cfg)
    y = np.asarray(y)
    if y.shape != (cfg.antennas, cfg.pilot_len):
        raise ContractViolation(
            f"y shape {y.shape} does not match (antennas, pilot_len)"
        )
    a = gram_matrix(x, cfg)
    w = solve_hermitian(a, x)
    return y @ (w * cfg.gains[np.newaxis, :])


def analytic_wsmse(x, cfg):
    """Exact normalized WSMSE achieved by the combined-observation estimator.

    User k's normalized term is ``1 - g_k x_k^H A^{-1} x_k`` (per
    coefficient MSE divided by g_k), and the normalized WSMSE is the
    mean over users. Equivalently it equals
    ``1 - N/K + (sigma2 / K) tr(A^{-1})``, which ties the estimation
    error directly to the design objective.
    """
    x = _check_pilots(x, cfg)
    a = gram_matrix(x, cfg)
    w = solve_hermitian(a, x)
    quad = np.sum(x.conj() * w, axis=0).real
    per_user = 1.0 - cfg.gains * quad
    return WsmseReport(wsmse=float(np.mean(per_user)), per_user=per_user)


# --- starting points -----------------------------------------------------

INIT_KINDS = ("dft-reuse", "dft-k", "random")


def init_pilots(kind, cfg, stream=None):
    """Feasible starting pilot matrix for the iterative optimizer.

    ``dft-reuse``
        Cyclically reused columns of the unitary ``pilot_len``-point DFT
        (the baseline construction), column k scaled to ``sqrt(P_k)``.
    ``dft-k``
        The unitary ``users``-point DFT truncated to the first
        ``pilot_len`` rows, columns rescaled to ``sqrt(P_k)``; requires
        ``pilot_len <= users``.
    ``random``
        I.i.d. complex Gaussian columns rescaled to exactly
        ``sqrt(P_k)``; requires ``stream``.
    """
    if kind in ("dft-k-truncated",):
        kind = "dft-k"
    scale = np.sqrt(cfg.powers)[np.newaxis, :]
    if kind == "dft-reuse":
        unitary_dft = scipy.linalg.dft(cfg.pilot_len, scale="sqrtn")
        return unitary_dft[:, np.arange(cfg.users) % cfg.pilot_len] * scale
    if kind == "dft-k":
        if cfg.pilot_len > cfg.users:
            raise ConfigurationError(
                "dft-k initialization requires pilot_len <= users"
            )
        truncated = scipy.linalg.dft(cfg.users, scale="sqrtn")[: cfg.pilot_len, :]
        return truncated / np.linalg.norm(truncated, axis=0)[np.newaxis, :] * scale
    if kind == "random":
        if stream is None:
            raise ConfigurationError("random initialization requires a RandomStream")
        raw = draw_cn(stream, cfg.pilot_len, cfg.users)
        return raw / np.linalg.norm(raw, axis=0)[np.newaxis, :] * scale
    raise ConfigurationError(f"unknown init kind {kind!r}; expected one of {INIT_KINDS}")


# --- pilot matrix text format --------------------------------------------


def save_pilots(path, x):
    """Write a pilot matrix as text: header ``N K``, then ``re im`` lines.

    Entries are listed column by column at 17 significant digits, which
    round-trips IEEE doubles exactly.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2:
        raise ContractViolation("pilot matrix must be 2-D")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{x.shape[0]} {x.shape[1]}\n")
        for col in range(x.shape[1]):
            for row in range(x.shape[0]):
                v = x[row, col]
                fh.write(f"{v.real:.17g} {v.imag:.17g}\n")


def load_pilots(path):
    """Read a pilot matrix written by :func:`save_pilots`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ConfigurationError(f"{path}: malformed pilot file header")
        n, k = int(header[0]), int(header[1])
        values = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            re_part, im_part = line.split()
            values.append(complex(float(re_part), float(im_part)))
    if len(values) != n * k:
        raise ConfigurationError(
            f"{path}: expected {n * k} entries, found {len(values)}"
        )
    return np.asarray(values, dtype=np.complex128).reshape((k, n)).T
