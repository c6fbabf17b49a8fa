"""Dense complex Hermitian kernels and reproducible Gaussian streams.

Everything downstream of this module manipulates small complex matrices
(dimensions of at most a few hundred), so the routines here favor exact
contracts and determinism over large-scale performance:

* eigenvectors carry a fixed phase convention so repeated runs are
  bit-identical,
* Hermitian solves go through factorizations rather than explicit
  inverse entries,
* random draws are pure functions of a ``(seed, stream_id)`` pair, which
  makes parallel Monte Carlo trials schedule-independent.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractViolation, NumericalError, SingularMatrixError

# Hermitian inputs are built as X*diag*X^H + sigma^2*I, so any asymmetry
# beyond rounding indicates caller error.
HERMITIAN_TOL = 1e-10

# Relative eigenvalue floor below which a matrix is treated as singular.
SINGULARITY_FLOOR = 1e-12


@dataclass(frozen=True)
class RandomStream:
    """Named substream of a deterministic random source.

    Identical ``(seed, stream_id)`` pairs produce identical draw
    sequences on every run and regardless of thread schedule; distinct
    ``stream_id`` values give statistically independent streams.
    Instances are immutable; sharing across threads is safe because
    every draw builds a fresh generator.
    """

    seed: int
    stream_id: int = 0

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)


def draw_cn(stream, rows, cols):
    """Draw a ``rows x cols`` matrix of i.i.d. CN(0, 1) entries.

    Each entry is ``(a + ib)/sqrt(2)`` with ``a`` and ``b`` independent
    standard normals, so the complex variance is exactly 1. The result
    is a pure function of ``(stream.seed, stream.stream_id)``.
    """
    rng = stream.generator()
    parts = rng.standard_normal((2, rows, cols))
    return (parts[0] + 1j * parts[1]) / np.sqrt(2.0)


def _require_square(h, name):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {h.shape}")
    return h.astype(np.complex128, copy=False)


def _require_hermitian(h, name):
    h = _require_square(h, name)
    asym = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if asym > HERMITIAN_TOL:
        raise ContractViolation(
            f"{name} is not Hermitian: max |h - h^H| = {asym:.3e} "
            f"exceeds {HERMITIAN_TOL:.0e}"
        )
    return h


def _normalize_phases(vectors):
    """Rotate each column so its largest-magnitude entry is real positive."""
    v = vectors.copy()
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    # unit eigenvectors always have a nonzero pivot
    phases = pivots / mags
    v *= phases.conj()[np.newaxis, :]
    return v


def hermitian_eig(h):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending
    and column ``j`` of ``eigenvectors`` the unit eigenvector paired
    with eigenvalue ``j``. Each eigenvector is phase-rotated so its
    largest-magnitude component is real positive, which pins the
    otherwise arbitrary phase and makes outputs reproducible.
    """
    h = _require_hermitian(h, "h")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare LAPACK failure
        raise NumericalError(f"Hermitian eigendecomposition failed: {exc}") from exc
    return w, _normalize_phases(v)


def _checked_hpd_eig(h, name):
    w, v = hermitian_eig(h)
    if w[-1] <= 0 or w[0] <= SINGULARITY_FLOOR * w[-1]:
        raise SingularMatrixError(
            f"{name} is singular or not positive definite: smallest eigenvalue "
            f"{w[0]:.6e} vs largest {w[-1]:.6e}",
            eigenvalue=w[0],
        )
    return w, v


def inv_sqrt_psd(h):
    """Inverse principal square root of a Hermitian positive definite matrix.

    The result ``r`` satisfies ``r @ h @ r == I`` and is itself
    Hermitian. Raises :class:`SingularMatrixError` when the smallest
    eigenvalue falls below ``1e-12`` times the largest.
    """
    w, v = _checked_hpd_eig(h, "h")
    r = (v / np.sqrt(w)) @ v.conj().T
    return 0.5 * (r + r.conj().T)


def solve_hermitian(a, b):
    """Solve ``a @ x = b`` for Hermitian positive definite ``a``.

    Uses a Cholesky factorization rather than forming ``a^{-1}``.
    """
    a = _require_hermitian(a, "a")
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != a.shape[0]:
        raise ContractViolation(
            f"b has {b.shape[0]} rows but a is {a.shape[0]}x{a.shape[1]}"
        )
    w = np.linalg.eigvalsh(a)
    if w[-1] <= 0 or w[0] <= SINGULARITY_FLOOR * w[-1]:
        raise SingularMatrixError(
            f"a is singular or not positive definite: smallest eigenvalue "
            f"{w[0]:.6e} vs largest {w[-1]:.6e}",
            eigenvalue=w[0],
        )
    factor = scipy.linalg.cho_factor(a, lower=True)
    return scipy.linalg.cho_solve(factor, b)
