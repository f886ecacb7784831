"""Interference pattern set of a CP map, computed by three equivalent routes.

Sending one interferometer beam through the channel and flipping the
environment reference state to |mu_e> in the other beam exposes one complex
pattern per Kraus index:

    nu_mu e^{i alpha_mu} = Tr(m_mu rho)

The same number can be computed from the unitary dilation on system plus
environment, or as an overlap of purifications; all three agree and the
cross-check is the main correctness oracle of this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels as ch
from .numerics import as_matrix, dag, tensor
from .states import purify, validate_density

PHASE_TOL = 1e-9


@dataclass(frozen=True)
class InterferencePattern:
    """One fringe: z = nu e^{i alpha}; phase is meaningless when nu ~ 0."""

    mu: int
    value: complex
    visibility: float
    phase: float
    phase_defined: bool


def pattern_from_value(mu: int, z: complex, phase_tol: float = PHASE_TOL) -> InterferencePattern:
    z = complex(z)
    nu = abs(z)
    defined = nu >= phase_tol
    alpha = float(np.angle(z)) if defined else 0.0
    return InterferencePattern(mu=mu, value=z, visibility=nu, phase=alpha, phase_defined=defined)


def _check_state(channel: ch.KrausChannel, rho) -> np.ndarray:
    a = as_matrix(rho)
    if a.shape != (channel.sys_dim, channel.sys_dim):
        raise ValueError(
            f"state shape {a.shape} does not match channel dimension {channel.sys_dim}"
        )
    return a


def pattern(channel: ch.KrausChannel, rho, mu: int, phase_tol: float = PHASE_TOL) -> InterferencePattern:
    """Kraus-trace route: z = Tr(m_mu rho)."""
    if not 0 <= mu < channel.env_dim:
        raise ValueError(f"flip index {mu} out of range for env_dim {channel.env_dim}")
    a = _check_state(channel, rho)
    z = np.trace(channel.kraus[mu] @ a)
    return pattern_from_value(mu, z, phase_tol)


def pattern_set(channel: ch.KrausChannel, rho, phase_tol: float = PHASE_TOL) -> list[InterferencePattern]:
    """All K patterns, in Kraus order."""
    return [pattern(channel, rho, mu, phase_tol) for mu in range(channel.env_dim)]


def flip_operator(env_dim: int, mu: int) -> np.ndarray:
    """Unitary swapping environment basis states 0 and mu (identity for mu = 0)."""
    if not 0 <= mu < env_dim:
        raise ValueError(f"flip index {mu} out of range for env_dim {env_dim}")
    f = np.eye(env_dim, dtype=complex)
    if mu != 0:
        f[[0, mu]] = f[[mu, 0]]
    return f


def pattern_via_dilation(d: ch.Dilation, rho, mu: int, phase_tol: float = PHASE_TOL) -> InterferencePattern:
    """Dilation route: trace over system x environment with the flip in the reference beam.

    z = Tr[ u (rho x |0_e><0_e|) (I x F)^dag ]
    """
    a = as_matrix(rho)
    n, k = d.sys_dim, d.env_dim
    if a.shape != (n, n):
        raise ValueError(f"state shape {a.shape} does not match system dimension {n}")
    env_ref = np.zeros((k, k), dtype=complex)
    env_ref[d.ref_env_index, d.ref_env_index] = 1.0
    flip_full = tensor(np.eye(n), flip_operator(k, mu))
    z = np.trace(d.u @ tensor(a, env_ref) @ dag(flip_full))
    return pattern_from_value(mu, z, phase_tol)


def pattern_via_purification(channel: ch.KrausChannel, rho, mu: int, phase_tol: float = PHASE_TOL) -> InterferencePattern:
    """Purification route: overlap <Psi_ref | Psi_tar> of the two output beams.

    The input state is lifted to a pure state on system x environment x
    ancilla; the target beam evolves with the dilation unitary (extended by
    identity on the ancilla) and the reference beam gets the environment
    flip.
    """
    a = _check_state(channel, validate_density(rho))
    n, k = channel.sys_dim, channel.env_dim
    if not 0 <= mu < k:
        raise ValueError(f"flip index {mu} out of range for env_dim {k}")
    psi = purify(a, k)
    u_full = np.kron(ch.dilate(channel).u, np.eye(n))
    f_full = np.kron(np.eye(n), np.kron(flip_operator(k, mu), np.eye(n)))
    z = np.vdot(f_full @ psi, u_full @ psi)
    return pattern_from_value(mu, z, phase_tol)


def fringe(pat: InterferencePattern, chi_grid) -> np.ndarray:
    """Intensity profile I(chi) = (1 + nu cos(chi - alpha)) / 2, in [0, 1].

    When the visibility is below the phase tolerance the fringe is flat 1/2.
    """
    chi = np.asarray(chi_grid, dtype=float)
    if not pat.phase_defined:
        return np.full(chi.shape, 0.5)
    return 0.5 * (1.0 + pat.visibility * np.cos(chi - pat.phase))
