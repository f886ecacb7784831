"""Completely positive maps as Kraus operator lists, plus unitary dilations.

The operator ordering inside a channel is significant: index mu names both
the Kraus operator and the environment basis state it is associated with, so
channels never reorder or drop entries (zero operators are legal).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    STRUCTURAL_TOL,
    as_matrix,
    complete_to_unitary,
    dag,
    is_unitary,
    max_abs,
)
from .states import SIGMA_X, SIGMA_Y, SIGMA_Z, validate_density


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CP map given by operators m_0 .. m_{K-1} with sum_mu m_mu^dag m_mu = I."""

    kraus: tuple
    completeness_tol: float = STRUCTURAL_TOL

    def __post_init__(self):
        ops = tuple(as_matrix(m) for m in self.kraus)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        n = ops[0].shape[0]
        for mu, m in enumerate(ops):
            if m.shape != (n, n):
                raise ValueError(
                    f"Kraus operator {mu} has shape {m.shape}, expected ({n}, {n})"
                )
            if not np.all(np.isfinite(m)):
                raise ValueError(f"Kraus operator {mu} contains non-finite entries")
        total = sum(dag(m) @ m for m in ops)
        residual = max_abs(total - np.eye(n))
        if residual > self.completeness_tol:
            raise ValueError(
                f"Kraus completeness violated: max |sum m^dag m - I| = {residual:.3e}"
            )
        object.__setattr__(self, "kraus", ops)

    @property
    def sys_dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def env_dim(self) -> int:
        return len(self.kraus)

    def apply(self, rho) -> np.ndarray:
        """rho' = sum_mu m_mu rho m_mu^dag."""
        a = as_matrix(rho)
        if a.shape != (self.sys_dim, self.sys_dim):
            raise ValueError(
                f"state shape {a.shape} does not match channel dimension {self.sys_dim}"
            )
        return sum(m @ a @ dag(m) for m in self.kraus)

    def compose_unitary(self, w) -> "KrausChannel":
        """Channel with every Kraus operator replaced by m_mu @ w.

        Used to append a unitary rotation to the evolution; completeness is
        preserved since w^dag (sum m^dag m) w = I.
        """
        u = as_matrix(w)
        if not is_unitary(u, self.completeness_tol):
            raise ValueError("composed operator is not unitary")
        if u.shape[0] != self.sys_dim:
            raise ValueError(
                f"unitary dimension {u.shape[0]} does not match channel dimension {self.sys_dim}"
            )
        return KrausChannel(tuple(m @ u for m in self.kraus), self.completeness_tol)


def apply(channel: KrausChannel, rho) -> np.ndarray:
    """Function form of :meth:`KrausChannel.apply`."""
    return channel.apply(rho)


def identity_channel(dim: int = 2) -> KrausChannel:
    """Single-operator channel m_0 = I."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return KrausChannel((np.eye(dim, dtype=complex),))


def depolarizing(p: float) -> KrausChannel:
    """Qubit depolarizing channel with error probability p.

    m_0 = sqrt(1-p) I,        m_1 = sqrt(p/3) sigma_x,
    m_2 = sqrt(p/3) sigma_y,  m_3 = sqrt(p/3) sigma_z

    Each of the three Pauli errors occurs with probability p/3; the Bloch
    vector shrinks by the factor 1 - 4p/3 (negative beyond p = 3/4, which is
    allowed and means inversion).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p must lie in [0, 1], got {p}")
    return KrausChannel(
        (
            np.sqrt(1.0 - p) * np.eye(2, dtype=complex),
            np.sqrt(p / 3.0) * SIGMA_X,
            np.sqrt(p / 3.0) * SIGMA_Y,
            np.sqrt(p / 3.0) * SIGMA_Z,
        )
    )


def amplitude_damping(p: float) -> KrausChannel:
    """Qubit amplitude damping channel with decay probability p.

    m_0 = (I + sigma_z)/2 + sqrt(1-p) (I - sigma_z)/2
    m_1 = (sqrt(p)/2) (sigma_x + i sigma_y)
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p must lie in [0, 1], got {p}")
    eye = np.eye(2, dtype=complex)
    m0 = (eye + SIGMA_Z) / 2.0 + np.sqrt(1.0 - p) * (eye - SIGMA_Z) / 2.0
    m1 = (np.sqrt(p) / 2.0) * (SIGMA_X + 1.0j * SIGMA_Y)
    return KrausChannel((m0, m1))


@dataclass(frozen=True, eq=False)
class Dilation:
    """Unitary on system x environment whose reference block column holds the Kraus list.

    With the system-major index convention, m_mu = <mu_e| u |0_e> is the
    strided submatrix u[mu::K, ref::K].
    """

    sys_dim: int
    env_dim: int
    u: np.ndarray
    ref_env_index: int = 0
    unitarity_tol: float = field(default=STRUCTURAL_TOL, repr=False)

    def __post_init__(self):
        u = as_matrix(self.u)
        d = self.sys_dim * self.env_dim
        if u.shape != (d, d):
            raise ValueError(f"dilation unitary has shape {u.shape}, expected ({d}, {d})")
        if not 0 <= self.ref_env_index < self.env_dim:
            raise ValueError(
                f"reference environment index {self.ref_env_index} out of range"
            )
        if not is_unitary(u, self.unitarity_tol):
            residual = max_abs(dag(u) @ u - np.eye(d))
            raise ValueError(f"dilation is not unitary: max |u^dag u - I| = {residual:.3e}")
        object.__setattr__(self, "u", u)


def dilate(channel: KrausChannel) -> Dilation:
    """Build one unitary representative whose environment blocks reproduce the channel.

    The Kraus operators are stacked into the reference block column and the
    remaining columns come from the deterministic orthonormal completion, so
    a unitary single-operator channel dilates to itself.
    """
    n, k = channel.sys_dim, channel.env_dim
    block = np.zeros((n * k, n), dtype=complex)
    for mu, m in enumerate(channel.kraus):
        block[mu::k, :] = m
    completed = complete_to_unitary(block)
    u = np.empty_like(completed)
    u[:, 0::k] = completed[:, :n]
    rest = [c for c in range(n * k) if c % k != 0]
    u[:, rest] = completed[:, n:]
    return Dilation(sys_dim=n, env_dim=k, u=u)


def kraus_from_dilation(d: Dilation) -> KrausChannel:
    """Extract m_mu = <mu_e| u |ref_e> and rebuild the channel."""
    k = d.env_dim
    ops = tuple(d.u[mu::k, d.ref_env_index::k] for mu in range(k))
    return KrausChannel(ops)


def evolve_density(channel: KrausChannel, rho, tol: float = STRUCTURAL_TOL) -> np.ndarray:
    """Apply the channel and validate the output state."""
    out = channel.apply(validate_density(rho))
    return validate_density(out, tol)
