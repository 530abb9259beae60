"""Small dense linear-algebra layer used by the reservoir and readout.

Matrices are plain 2-D float64 numpy arrays, vectors 1-D arrays.  The
ridge solver goes through the normal equations and a Cholesky factor,
which is fine at reservoir sizes of a few hundred nodes but squares the
condition number of the design; callers that see
:class:`IllConditionedError` should retry with a larger ``lam``.
"""

import numpy as np
import scipy.linalg


class IllConditionedError(ValueError):
    """The regularized normal matrix could not be factorized."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, best_estimate):
        super().__init__(message)
        self.best_estimate = best_estimate


def as_matrix(a, name="matrix"):
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(a, name="vector"):
    v = np.asarray(a, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def matvec(m, v):
    m = as_matrix(m)
    v = as_vector(v)
    if m.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {m.shape} x ({v.shape[0]},)")
    return m @ v


def ridge_solve(design, targets, lam):
    """Return ``B`` minimizing ``||design @ B - targets||^2 + lam * ||B||^2``.

    Solves ``(D^T D + lam I) B = D^T targets`` by Cholesky.  ``targets``
    may be 1-D, in which case ``B`` is 1-D as well.

    With ``lam > 0`` an all-zero design column has weight exactly 0, so
    such columns are left out of the factorization.  This keeps the
    result independent of inert padding, which would otherwise shift
    the BLAS rounding of an ill-conditioned solve.
    """
    # fixed memory layout so BLAS takes the same path for equal inputs
    d = np.ascontiguousarray(as_matrix(design, "design"))
    t = np.asarray(targets, dtype=np.float64)
    vector_target = t.ndim == 1
    t = as_matrix(t[:, None] if vector_target else t, "targets")
    if d.shape[0] != t.shape[0]:
        raise ValueError(f"design has {d.shape[0]} rows but targets have {t.shape[0]}")
    if d.shape[0] < 1:
        raise ValueError("ridge_solve needs at least one row")
    if lam < 0:
        raise ValueError(f"lam must be non-negative, got {lam}")

    if lam > 0:
        live = np.flatnonzero(np.any(d != 0.0, axis=0))
        if live.size < d.shape[1]:
            b = np.zeros((d.shape[1], t.shape[1]))
            if live.size:
                b[live] = ridge_solve(np.ascontiguousarray(d[:, live]), t, lam)
            return b[:, 0] if vector_target else b

    gram = d.T @ d
    gram[np.diag_indices_from(gram)] += lam
    rhs = d.T @ t
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(
            f"normal matrix is not positive definite at lam={lam}; retry with lam > 0"
        ) from exc
    b = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    if not np.all(np.isfinite(b)):
        raise IllConditionedError(f"ridge solution is not finite at lam={lam}")
    return b[:, 0] if vector_target else b


def spectral_radius(m):
    """Largest eigenvalue modulus of a square matrix (LAPACK Hessenberg-QR)."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"spectral_radius needs a square matrix, got {m.shape}")
    if m.size == 0:
        return 0.0
    try:
        eig = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        best = _growth_rate(m)
        raise ConvergenceError(
            f"eigenvalue iteration did not converge (growth-rate estimate {best:.6g})", best
        ) from exc
    return float(np.max(np.abs(eig)))


def _growth_rate(m, n_iter=200):
    # ||m^k v||^(1/k) tends to the spectral radius for generic v
    v = np.ones(m.shape[0]) / np.sqrt(m.shape[0])
    log_norm = 0.0
    for _ in range(n_iter):
        v = m @ v
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        log_norm += np.log(nv)
        v /= nv
    return float(np.exp(log_norm / n_iter))
