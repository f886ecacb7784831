"""Quantum state representations: density matrices, Bloch vectors, purifications.

Density matrices and pure states are plain numpy arrays; validators raise
``ValueError`` naming the violated invariant.
"""

from __future__ import annotations

import numpy as np

from .numerics import EQUALITY_TOL, as_matrix, dag, hermitian_eig, max_abs

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def validate_density(rho, tol: float = EQUALITY_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace, and positivity; return the validated array."""
    a = as_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {a.shape}")
    herm = max_abs(a - dag(a))
    if herm > tol:
        raise ValueError(f"density matrix is not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is not 1: |Tr(rho) - 1| = {abs(tr - 1.0):.3e}")
    lo = float(np.linalg.eigvalsh((a + dag(a)) / 2).min())
    if lo < -tol:
        raise ValueError(f"density matrix is not positive semidefinite: min eigenvalue = {lo:.3e}")
    return a


def density_from_bloch(r) -> np.ndarray:
    """rho = (I + r . sigma) / 2 for a Bloch vector with |r| <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"Bloch vector must have 3 components, got shape {r.shape}")
    length = float(np.linalg.norm(r))
    if length > 1.0 + EQUALITY_TOL:
        raise ValueError(f"Bloch vector length {length:.6g} exceeds 1")
    rho = np.eye(2, dtype=complex)
    for comp, pauli in zip(r, PAULIS):
        rho = rho + comp * pauli
    return rho / 2.0


def bloch_from_density(rho) -> np.ndarray:
    """Inverse of density_from_bloch: r_a = Tr(rho sigma_a)."""
    a = as_matrix(rho)
    if a.shape != (2, 2):
        raise ValueError(f"Bloch vector is only defined for 2x2 states, got shape {a.shape}")
    return np.array([np.trace(a @ pauli).real for pauli in PAULIS])


def spectral_gap(rho, tol: float = EQUALITY_TOL) -> float:
    """Smallest gap between consecutive eigenvalues of a state.

    A gap near zero means the eigenbasis is not unique; callers that rely on
    a physically preferred basis should treat that as degenerate.
    """
    w, _ = hermitian_eig(validate_density(rho, tol))
    if w.size < 2:
        return np.inf
    return float(np.min(w[:-1] - w[1:]))


def purify(rho, env_dim: int, tol: float = EQUALITY_TOL) -> np.ndarray:
    """Lift a state to a pure vector on system x environment x ancilla.

    The environment factor (dimension ``env_dim``) starts in its reference
    basis state, the ancilla has the system's dimension, and the amplitudes
    are sqrt(w_k) over the state's eigenbasis:

        sum_k sqrt(w_k) |k_i> |0_e> |k_a>

    Zero-weight eigenvectors are kept with zero amplitude so the output
    dimension depends only on the input dimensions. Tracing out environment
    and ancilla recovers the input state.
    """
    if env_dim < 1:
        raise ValueError(f"environment dimension must be >= 1, got {env_dim}")
    a = validate_density(rho, tol)
    n = a.shape[0]
    w, v = hermitian_eig(a)
    amps = np.sqrt(np.clip(w, 0.0, None))
    psi = np.zeros((n, env_dim, n), dtype=complex)
    psi[:, 0, :] = v * amps[np.newaxis, :]
    return psi.reshape(-1)
