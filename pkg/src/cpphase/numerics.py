"""Dense complex linear algebra kernel for small operator spaces.

All functions work on plain numpy arrays (row-major complex entries) and are
pure: inputs are never mutated. Decompositions are made deterministic by a
fixed phase and ordering convention, so degenerate subspaces come out the
same on every run.
"""

from __future__ import annotations

import numpy as np

# default tolerances: structural checks vs. strict equality assertions
STRUCTURAL_TOL = 1e-10
EQUALITY_TOL = 1e-12


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    return a


def dag(m) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def max_abs(m) -> float:
    """Entrywise max-norm, used for all residual checks."""
    a = np.asarray(m)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(m, tol: float = EQUALITY_TOL) -> bool:
    a = as_matrix(m)
    return a.shape[0] == a.shape[1] and max_abs(a - dag(a)) <= tol


def is_unitary(m, tol: float = STRUCTURAL_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return max_abs(dag(a) @ a - np.eye(a.shape[0])) <= tol


def tensor(a, b) -> np.ndarray:
    """Kronecker product with system-major indexing: (i, mu) -> i * dim_b + mu."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_env(m, dim_i: int, dim_e: int) -> np.ndarray:
    """Trace out the trailing dim_e-dimensional tensor factor.

    The input must be a square matrix on the composite space with the
    system-major index convention used by :func:`tensor`.
    """
    a = as_matrix(m)
    n = dim_i * dim_e
    if a.shape != (n, n):
        raise ValueError(
            f"matrix shape {a.shape} does not match dim_i * dim_e = {dim_i} * {dim_e}"
        )
    return a.reshape(dim_i, dim_e, dim_i, dim_e).trace(axis1=1, axis2=3)


def _fix_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    v = v.copy()
    for k in range(v.shape[1]):
        j = int(np.argmax(np.abs(v[:, k])))
        a = abs(v[j, k])
        if a > 0.0:
            v[:, k] *= v[j, k].conjugate() / a
    return v


def hermitian_eig(h, tol: float = EQUALITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Returns ``(w, v)`` with ``h = v @ diag(w) @ v.conj().T``. Ties in the
    spectrum keep the original column order (stable sort) and each
    eigenvector's phase is canonicalized, so the output is reproducible.
    """
    a = as_matrix(h)
    if a.shape[0] != a.shape[1]:
        raise ValueError("eigendecomposition requires a square matrix")
    herm_dev = max_abs(a - dag(a))
    if herm_dev > tol:
        raise ValueError(f"matrix is not Hermitian: max |h - h^dag| = {herm_dev:.3e}")
    w, v = np.linalg.eigh((a + dag(a)) / 2)
    order = np.argsort(-w, kind="stable")
    return w[order], _fix_phases(v[:, order])


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``m = w @ diag(s) @ v.conj().T``.

    Singular values come back nonnegative and descending. Column phases of w
    are canonicalized (largest entry real positive) with the matching v
    column co-rotated; columns belonging to zero singular values carry no
    pairing constraint and are canonicalized independently.
    """
    a = as_matrix(m)
    w, s, vh = np.linalg.svd(a)
    v = dag(vh)
    zero_cut = 1e-13 * max(float(s[0]) if s.size else 0.0, 1e-300)
    npair = min(w.shape[1], v.shape[1], s.size)
    for k in range(npair):
        j = int(np.argmax(np.abs(w[:, k])))
        a_jk = abs(w[j, k])
        if a_jk == 0.0:
            continue
        ph = w[j, k].conjugate() / a_jk
        w[:, k] *= ph
        if s[k] > zero_cut:
            v[:, k] *= ph
    # unpaired or zero-mode columns are free: canonicalize them on their own
    for k in range(npair):
        if s[k] <= zero_cut:
            v[:, k : k + 1] = _fix_phases(v[:, k : k + 1])
    if w.shape[1] > npair:
        w[:, npair:] = _fix_phases(w[:, npair:])
    if v.shape[1] > npair:
        v[:, npair:] = _fix_phases(v[:, npair:])
    return w, s, v


def complete_to_unitary(block, tol: float = STRUCTURAL_TOL, skip_tol: float = 1e-8) -> np.ndarray:
    """Extend a matrix with orthonormal columns to a full unitary.

    The first ``d`` columns of the result equal the input exactly. Remaining
    columns come from modified Gram-Schmidt over the standard basis vectors,
    skipping candidates whose orthogonalized residual norm falls below
    ``skip_tol``; this keeps the completion deterministic and returns exact
    identity blocks for identity-like inputs.
    """
    b = as_matrix(block)
    rows, cols = b.shape
    if cols > rows:
        raise ValueError(f"block has more columns ({cols}) than rows ({rows})")
    gram = dag(b) @ b
    dev = np.abs(gram - np.eye(cols))
    worst = float(dev.max())
    if worst > tol:
        i, j = np.unravel_index(int(dev.argmax()), dev.shape)
        target = 1.0 if i == j else 0.0
        raise ValueError(
            f"block columns are not orthonormal: |gram[{i},{j}] - {target:g}| = {worst:.3e}"
        )
    if cols == rows:
        return b.copy()
    columns = [b[:, k] for k in range(cols)]
    for j in range(rows):
        if len(columns) == rows:
            break
        v = np.zeros(rows, dtype=complex)
        v[j] = 1.0
        for _ in range(2):  # second pass restores orthogonality lost to roundoff
            for q in columns:
                v = v - q * np.vdot(q, v)
        nrm = float(np.linalg.norm(v))
        if nrm < skip_tol:
            continue
        columns.append(v / nrm)
    if len(columns) < rows:
        raise ValueError("unitary completion failed to span the full space")
    return np.column_stack(columns)
