"""Dense complex-matrix primitives shared by the factorization code.

Matrices are plain 2-D ``numpy.ndarray`` values with dtype complex128; use
:func:`as_matrix` to validate anything crossing an API boundary. Everything
here is pure and thread-safe.
"""

from __future__ import annotations

import json

import numpy as np

FACTOR_TOL = 1e-10
RANK_TOL = 1e-9
ZERO_COLUMN_TOL = 1e-8


class FactorizationError(RuntimeError):
    """A matrix factorization failed to converge or verify."""


def as_matrix(values, rows=None, cols=None):
    """Coerce to a 2-D complex128 array with finite entries.

    Args:
        values: anything ``np.asarray`` accepts.
        rows, cols: optional expected shape.

    Raises:
        ValueError: wrong dimensionality, wrong shape, or non-finite entries.
    """
    m = np.asarray(values, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if rows is not None and m.shape != (rows, cols):
        raise ValueError(f"expected shape {(rows, cols)}, got {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def svd(m):
    """Thin SVD ``M = U diag(s) V^H``, singular values descending.

    Returns (U, s, V); note V, not V^H. The reconstruction is verified to
    FACTOR_TOL relative to max(1, ||M||_F) and a backend convergence failure
    surfaces as FactorizationError.
    """
    m = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"SVD did not converge: {exc}") from exc
    residual = np.linalg.norm(m - (u * s) @ vh)
    if residual > FACTOR_TOL * max(1.0, np.linalg.norm(m)):
        raise FactorizationError(
            f"SVD reconstruction residual {residual:.3e} exceeds tolerance"
        )
    return u, s, vh.conj().T


def orthonormal_completion(q, k):
    """Fill the zero columns of ``q`` so all columns become orthonormal.

    ``q`` is n x m with m <= n, holding exactly k designated (nonzero)
    columns that are already orthonormal; the remaining m - k columns must
    be zero. Designated columns are kept bit-for-bit; the zero columns are
    replaced with an orthonormal basis of (part of) the complement of their
    span.
    """
    q = as_matrix(q)
    n, m = q.shape
    if m > n:
        raise ValueError(f"cannot complete {m} columns in dimension {n}")
    norms = np.linalg.norm(q, axis=0)
    designated = norms > 0.5
    found = int(designated.sum())
    if found != k:
        raise ValueError(f"expected {k} designated columns, found {found}")
    if np.any(norms[~designated] > ZERO_COLUMN_TOL):
        raise ValueError("non-designated columns must be zero")
    block = q[:, designated]
    if k:
        gram = block.conj().T @ block
        if np.linalg.norm(gram - np.eye(k)) > ZERO_COLUMN_TOL:
            raise ValueError("designated columns are not orthonormal")
    out = q.copy()
    if k == m:
        return out
    if k:
        # Left singular vectors beyond index k span the orthogonal complement.
        basis = np.linalg.svd(block, full_matrices=True)[0][:, k:]
    else:
        basis = np.eye(n, dtype=np.complex128)
    out[:, ~designated] = basis[:, : m - k]
    return out


def rank_with_tol(s, tol):
    """Count singular values above tol * max(s, floored at 1e-300)."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > tol * max(float(s.max()), 1e-300)))


def load_matrix(path):
    """Read a matrix from JSON: {"rows", "cols", "re", "im"}, row-major."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read matrix file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError(f"{path}: rows and cols must be positive")
    if re.shape != (rows * cols,) or im.shape != (rows * cols,):
        raise ValueError(f"{path}: 're' and 'im' must each hold rows*cols values")
    return as_matrix((re + 1j * im).reshape(rows, cols))


def save_matrix(m, path):
    """Write a matrix as the JSON format load_matrix reads."""
    m = as_matrix(m)
    obj = {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh)
    except OSError as exc:
        raise OSError(f"cannot write matrix file {path}: {exc}") from exc
