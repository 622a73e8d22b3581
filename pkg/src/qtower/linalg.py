"""Dense complex linear algebra for the operator tower.

Every matrix is a C-contiguous ``complex128`` numpy array. The tensor index
convention is row-major throughout: ``kron(a, b)[i1*rb + i2, j1*cb + j2]`` is
``a[i1, j1] * b[i2, j2]``, and ``partial_trace`` is its exact inverse on
product operators. Other modules must go through these two functions rather
than reshaping on their own.
"""

import enum
import math

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    MatrixFormatError,
    NotHermitian,
    NotIsometry,
    NotPSD,
)

#: tolerance for structural predicates (unitary, isometry, PSD, Hermitian)
EPS = 1e-9
#: tolerance for outputs of composed computations
EPS_COMPOSED = 1e-8

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
GS_SKIP = 1e-6
#: relative size below which an eigenvalue is rounding noise for ``psd_sqrt``
ROUNDOFF_FLOOR = 1e-14


def as_matrix(x):
    """Coerce ``x`` into a finite 2-D complex128 array (copying only when needed)."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixFormatError("matrix has non-finite entries")
    return np.ascontiguousarray(m)


def dagger(m):
    return np.ascontiguousarray(np.conj(m).T)


def sup_norm(m):
    """Largest entry modulus; 0 for empty matrices."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def identity(n):
    return np.eye(n, dtype=np.complex128)


def zeros(rows, cols):
    return np.zeros((rows, cols), dtype=np.complex128)


def direct_sum(a, b):
    """Block-diagonal ``a ⊕ b``."""
    a, b = as_matrix(a), as_matrix(b)
    out = zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def kron(a, b):
    a, b = as_matrix(a), as_matrix(b)
    return np.ascontiguousarray(np.kron(a, b))


def _check_square(h, exc=DimensionMismatch):
    if h.shape[0] != h.shape[1]:
        raise exc(f"expected a square matrix, got shape {h.shape}")


def is_hermitian(h, tol=EPS):
    h = as_matrix(h)
    return h.shape[0] == h.shape[1] and sup_norm(h - dagger(h)) <= tol


def hermitian_eig(h):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, vectors)`` with real eigenvalues in ascending
    order and the matching unitary eigenvector matrix (columns).
    """
    h = as_matrix(h)
    _check_square(h, NotHermitian)
    if not is_hermitian(h):
        raise NotHermitian(
            f"matrix deviates from its adjoint by {sup_norm(h - dagger(h)):.3e}"
        )
    n = h.shape[0]
    a = np.ascontiguousarray(0.5 * (h + dagger(h)))
    v = identity(n)
    if n > 1:
        scale = max(1.0, float(np.linalg.norm(a)))
        _kernels.jacobi_sweeps(a, v, JACOBI_TOL * scale, JACOBI_MAX_SWEEPS)
    evals = np.real(np.diag(a)).copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], np.ascontiguousarray(v[:, order])


def lambda_max(h):
    """Largest eigenvalue of a Hermitian matrix (-inf for the empty matrix)."""
    evals, _ = hermitian_eig(h)
    return float(evals[-1]) if evals.size else -math.inf


def psd_sqrt(h):
    """Hermitian PSD square root; eigenvalues in [-EPS, 0) are snapped to 0.

    Eigenvalues under ``ROUNDOFF_FLOOR`` relative to the spectrum are also
    zeroed, so exact defects such as ``1 - u†u`` give exact zero roots
    instead of ``sqrt(machine eps)``.
    """
    evals, vecs = hermitian_eig(h)
    if evals.size and evals[0] < -EPS:
        raise NotPSD(f"minimum eigenvalue {evals[0]:.3e} is below -{EPS}")
    floor = ROUNDOFF_FLOOR * max(1.0, float(np.abs(evals).max(initial=0.0)))
    roots = np.sqrt(np.where(evals < floor, 0.0, evals))
    s = (vecs * roots) @ dagger(vecs)
    return np.ascontiguousarray(0.5 * (s + dagger(s)))


def partial_trace(m, dims, which):
    """Trace out the ``"first"`` or ``"second"`` factor of a ``d1*d2`` square matrix."""
    m = as_matrix(m)
    d1, d2 = (int(d) for d in dims)
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(
            f"matrix of shape {m.shape} is not square of size {d1}*{d2}"
        )
    t = m.reshape(d1, d2, d1, d2)
    if which == "second":
        out = np.einsum("ijkj->ik", t)
    elif which == "first":
        out = np.einsum("ijik->jk", t)
    else:
        raise ValueError(f"which must be 'first' or 'second', not {which!r}")
    return np.ascontiguousarray(out)


def is_isometry(v, tol=EPS):
    v = as_matrix(v)
    return sup_norm(dagger(v) @ v - identity(v.shape[1])) <= tol


def is_coisometry(v, tol=EPS):
    v = as_matrix(v)
    return sup_norm(v @ dagger(v) - identity(v.shape[0])) <= tol


def is_unitary(u, tol=EPS):
    u = as_matrix(u)
    return u.shape[0] == u.shape[1] and is_isometry(u, tol) and is_coisometry(u, tol)


def complete_isometry(v):
    """Extend an isometry to a unitary, keeping ``v`` as the leading columns.

    The extra columns come from Gram-Schmidt over the standard basis in index
    order; candidates whose residual norm falls below ``GS_SKIP`` are skipped.
    """
    v = as_matrix(v)
    n, k = v.shape
    if n < k or not is_isometry(v):
        raise NotIsometry(f"matrix of shape {v.shape} is not an isometry")
    cols = [v[:, j] for j in range(k)]
    basis = v.copy()
    for idx in range(n):
        if len(cols) == n:
            break
        r = np.zeros(n, dtype=np.complex128)
        r[idx] = 1.0
        # two passes keep the completion orthogonal to machine precision
        for _ in range(2):
            r = r - basis @ (dagger(basis) @ r)
        norm = float(np.linalg.norm(r))
        if norm < GS_SKIP:
            continue
        cols.append(r / norm)
        basis = np.column_stack(cols)
    out = np.column_stack(cols) if cols else zeros(n, 0)
    out[:, :k] = v
    return np.ascontiguousarray(out)


class OperatorClass(str, enum.Enum):
    UNITARY = "unitary"
    ISOMETRY = "isometry"
    COISOMETRY = "coisometry"
    STRICT_CONTRACTION = "strict_contraction_class"
    NONE = "none"

    @property
    def is_contraction(self):
        return self is not OperatorClass.NONE


def classify_operator(t):
    """Place ``t`` in the unitary / isometry / coisometry / contraction hierarchy.

    A matrix that is neither isometric nor coisometric counts as a contraction
    when the top eigenvalue of ``t†t`` is at most ``1 + EPS``.
    """
    t = as_matrix(t)
    iso = is_isometry(t)
    coiso = is_coisometry(t)
    if iso and coiso:
        return OperatorClass.UNITARY
    if iso:
        return OperatorClass.ISOMETRY
    if coiso:
        return OperatorClass.COISOMETRY
    if lambda_max(dagger(t) @ t) <= 1.0 + EPS:
        return OperatorClass.STRICT_CONTRACTION
    return OperatorClass.NONE


def is_contraction(t):
    return classify_operator(t).is_contraction


# JSON: {"rows": n, "cols": m, "data": [[[re, im], ...], ...]}


def matrix_to_json(m):
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix object: {exc}") from None
    if rows < 0 or cols < 0:
        raise MatrixFormatError("negative matrix dimension")
    if not isinstance(data, list) or len(data) != rows:
        raise MatrixFormatError(f"expected {rows} rows of data")
    out = zeros(rows, cols)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise MatrixFormatError(f"row {i} does not have {cols} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            ):
                raise MatrixFormatError(f"entry ({i}, {j}) is not a [re, im] pair")
            out[i, j] = complex(entry[0], entry[1])
    return as_matrix(out)
