"""Polar factors, parallel transport along unitary paths, and cyclic geometric phases.

Sign conventions used throughout:

* ``su2_exp(theta, e)`` is ``exp(-i theta e.sigma)``, which rotates Bloch
  vectors by the angle ``2 theta`` about ``e`` (right-hand rule).
* ``solid_angle`` is positive for loops that circulate right-handedly about
  the outward normal of the enclosed region (counterclockwise seen from
  outside the sphere).
* Parallel transport of an eigenstate around a closed loop of signed solid
  angle ``W`` multiplies it by ``exp(-i W / 2)``. Loops meant to reproduce a
  pattern quoted for a positive enclosed angle therefore run clockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import brentq

from .interferometry import PHASE_TOL, InterferencePattern, pattern_from_value
from .numerics import (
    EQUALITY_TOL,
    STRUCTURAL_TOL,
    as_matrix,
    dag,
    hermitian_eig,
    is_unitary,
    max_abs,
    svd,
)
from .states import PAULIS, validate_density


# ---------------------------------------------------------------------------
# polar decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolarFactors:
    """m = h @ u with h Hermitian positive semidefinite and u unitary."""

    h: np.ndarray
    u: np.ndarray


def polar_decompose(m) -> PolarFactors:
    """Left polar decomposition via the deterministic SVD.

    With m = w diag(s) v^dag this returns h = w diag(s) w^dag and
    u = w v^dag. For rank-deficient m the unitary factor is pinned by the
    SVD completion and phase convention, so repeated runs agree.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("polar decomposition requires a square matrix")
    w, s, v = svd(a)
    h = (w * s) @ dag(w)
    return PolarFactors(h=(h + dag(h)) / 2.0, u=w @ dag(v))


# ---------------------------------------------------------------------------
# SU(2) closed forms
# ---------------------------------------------------------------------------

def _unit3(v, name: str, tol: float = EQUALITY_TOL) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"{name} must be a real 3-vector, got shape {a.shape}")
    nrm = float(np.linalg.norm(a))
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector, got norm {nrm:.12g}")
    return a


@dataclass(frozen=True)
class Su2Params:
    """Half-angle and axis of u = exp(-i theta e.sigma).

    ``degenerate`` marks compositions that landed on +-identity, where the
    axis is meaningless and reported as (0, 0, 1) by convention.
    """

    theta: float
    axis: np.ndarray
    degenerate: bool = False


def su2_exp(theta: float, axis) -> np.ndarray:
    """exp(-i theta axis.sigma) = cos(theta) I - i sin(theta) axis.sigma."""
    e = _unit3(axis, "rotation axis")
    es = sum(c * p for c, p in zip(e, PAULIS))
    return np.cos(theta) * np.eye(2, dtype=complex) - 1.0j * np.sin(theta) * es


def gauge_shift(theta: float, e, gamma: float, n) -> Su2Params:
    """Parameters of the product exp(-i theta e.sigma) exp(-i gamma n.sigma).

    Closed form:

        cos(t~) = cos(theta) cos(gamma) - (e.n) sin(theta) sin(gamma)
        e~ sin(t~) = n cos(theta) sin(gamma) + e sin(theta) cos(gamma)
                     + (e x n) sin(theta) sin(gamma)

    canonicalized to t~ in [0, pi]. Products equal to +-identity have no
    well-defined axis; those come back with the degenerate flag set.
    """
    e = _unit3(e, "first axis")
    n = _unit3(n, "second axis")
    st, ct = np.sin(theta), np.cos(theta)
    sg, cg = np.sin(gamma), np.cos(gamma)
    c = ct * cg - float(e @ n) * st * sg
    vec = n * ct * sg + e * st * cg + np.cross(e, n) * st * sg
    s = float(np.linalg.norm(vec))
    theta_new = float(np.arctan2(s, c))
    if s < 1e-12:
        return Su2Params(theta=theta_new, axis=np.array([0.0, 0.0, 1.0]), degenerate=True)
    return Su2Params(theta=theta_new, axis=vec / s, degenerate=False)


def qubit_pattern_closed_form(a: float, b, theta: float, e, r) -> complex:
    """Pattern of a single qubit Kraus operator (a + b.sigma) exp(-i theta e.sigma).

    Evaluates, for rho = (I + r.sigma)/2,

        (a + r.b) cos(theta) + (r x e).b sin(theta)
        - i (e.b + a r.e) sin(theta)

    which equals Tr(rho h u) computed with explicit matrices. The Hermitian
    part must be positive: a >= |b|.
    """
    b = np.asarray(b, dtype=float)
    r = np.asarray(r, dtype=float)
    if b.shape != (3,) or r.shape != (3,):
        raise ValueError("b and r must be real 3-vectors")
    e = _unit3(e, "rotation axis")
    if a + EQUALITY_TOL < float(np.linalg.norm(b)):
        raise ValueError(
            f"Hermitian factor a + b.sigma is not positive: a = {a:.6g} < |b| = {np.linalg.norm(b):.6g}"
        )
    if float(np.linalg.norm(r)) > 1.0 + EQUALITY_TOL:
        raise ValueError("Bloch vector length exceeds 1")
    st, ct = np.sin(theta), np.cos(theta)
    real = (a + r @ b) * ct + (np.cross(r, e) @ b) * st
    imag = -(e @ b + a * (r @ e)) * st
    return complex(real, imag)


# ---------------------------------------------------------------------------
# discretized unitary paths and parallel transport
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UnitaryPath:
    """Sampled family u(t_0) .. u(t_T) with u(0) = identity."""

    times: np.ndarray
    unitaries: np.ndarray
    unitarity_tol: float = field(default=STRUCTURAL_TOL, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        us = np.asarray(self.unitaries, dtype=complex)
        if t.ndim != 1 or us.ndim != 3 or us.shape[0] != t.size:
            raise ValueError("need one square unitary per time sample")
        if us.shape[1] != us.shape[2]:
            raise ValueError("path entries must be square matrices")
        if t.size < 2 or np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if abs(t[0]) > EQUALITY_TOL:
            raise ValueError(f"path must start at t = 0, got t_0 = {t[0]:.3e}")
        n = us.shape[1]
        if max_abs(us[0] - np.eye(n)) > EQUALITY_TOL:
            raise ValueError("path must start at the identity")
        eye = np.eye(n)
        worst = max(max_abs(dag(u) @ u - eye) for u in us)
        if worst > self.unitarity_tol:
            raise ValueError(f"path entry is not unitary: max |u^dag u - I| = {worst:.3e}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "unitaries", us)

    @property
    def dim(self) -> int:
        return self.unitaries.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.unitaries[-1]


def _check_basis(basis, dim: int) -> np.ndarray:
    v = as_matrix(basis)
    if v.shape != (dim, dim):
        raise ValueError(f"basis shape {v.shape} does not match path dimension {dim}")
    residual = max_abs(dag(v) @ v - np.eye(dim))
    if residual > STRUCTURAL_TOL:
        raise ValueError(f"basis columns are not orthonormal: residual {residual:.3e}")
    return v


def _transport_integrand(path: UnitaryPath, basis: np.ndarray) -> np.ndarray:
    """<k| u^dag(t) du/dt |k> per sample and basis column, shape (T+1, N).

    du/dt uses second-order central differences on interior samples and
    one-sided differences at the endpoints.
    """
    du = np.gradient(path.unitaries, path.times, axis=0)
    g = np.einsum("tji,tjk->tik", path.unitaries.conj(), du)
    return np.einsum("ak,tab,bk->tk", basis.conj(), g, basis)


def pt_residual(path: UnitaryPath, basis) -> float:
    """Max violation of the parallel transport conditions over interior samples.

    Zero means every basis state is transported without accumulating local
    phase: <k| u^dag(t) du/dt |k> = 0 for all k.
    """
    if path.times.size < 3:
        raise ValueError("parallel transport residual needs at least 3 samples")
    v = _check_basis(basis, path.dim)
    y = _transport_integrand(path, v)
    return float(np.max(np.abs(y[1:-1, :])))


def pt_correct(path: UnitaryPath, basis) -> UnitaryPath:
    """Remove accumulated dynamical phases so the path parallel-transports the basis.

    Each sample is multiplied on the right by a correction diagonal in the
    given basis with phases

        phi_k(t) = i * integral_0^t <k| u^dag du/dt |k> dt'

    evaluated with the trapezoid rule. The corrected path starts at the
    identity and leaves the evolution of any state diagonal in the basis
    unchanged sample by sample.
    """
    if path.times.size < 3:
        raise ValueError("parallel transport correction needs at least 3 samples")
    v = _check_basis(basis, path.dim)
    y = _transport_integrand(path, v)
    phi = np.real(1.0j * cumulative_trapezoid(y, path.times, axis=0, initial=0.0))
    phases = np.exp(1.0j * phi)  # (T+1, N)
    corrections = np.einsum("ak,tk,bk->tab", v, phases, v.conj())
    corrected = np.einsum("tab,tbc->tac", path.unitaries, corrections)
    corrected[0] = np.eye(path.dim)
    return UnitaryPath(times=path.times, unitaries=corrected, unitarity_tol=path.unitarity_tol)


# ---------------------------------------------------------------------------
# cyclic geometric phase of a CP map
# ---------------------------------------------------------------------------

def geometric_phase_cyclic(
    hs,
    vs,
    u_final,
    rho,
    codiag_tol: float = STRUCTURAL_TOL,
    cyclic_tol: float = 1e-8,
    phase_tol: float = PHASE_TOL,
) -> list[InterferencePattern]:
    """Pattern set of a cyclic parallel-transported evolution, per Kraus slot.

    Inputs are the Hermitian factors h_mu at final time, the channel
    unitaries v_mu at t = 0, the parallel-transported cyclic unitary at
    final time, and the state. Each h_mu must diagonalize in the state's
    eigenbasis, and the final unitary must be cyclic there (diagonal up to
    ``cyclic_tol``) with diagonal phases beta_k. The returned value per mu is

        sum_k w_k <k|h_mu|k> <k|v_mu|k> e^{i beta_k}

    and coincides with the plain pattern of the channel whose Kraus
    operators are h_mu v_mu u_final.
    """
    hs = [as_matrix(h) for h in hs]
    vs = [as_matrix(u) for u in vs]
    if len(hs) != len(vs):
        raise ValueError(f"got {len(hs)} Hermitian factors but {len(vs)} unitaries")
    a = validate_density(rho)
    weights, basis = hermitian_eig(a)
    uf = dag(basis) @ as_matrix(u_final) @ basis
    off = uf - np.diag(np.diag(uf))
    off_mag = max_abs(off)
    if off_mag > cyclic_tol:
        raise ValueError(
            f"final unitary is not cyclic in the state eigenbasis: "
            f"max off-diagonal magnitude {off_mag:.3e}"
        )
    beta = np.angle(np.diag(uf))
    out = []
    for mu, (h, v) in enumerate(zip(hs, vs)):
        if not is_unitary(v, codiag_tol):
            raise ValueError(f"channel unitary v[{mu}] is not unitary")
        hb = dag(basis) @ h @ basis
        hb_off = max_abs(hb - np.diag(np.diag(hb)))
        if max_abs(h - dag(h)) > codiag_tol or hb_off > codiag_tol:
            raise ValueError(
                f"h[{mu}] does not diagonalize in the state eigenbasis "
                f"(max off-diagonal magnitude {hb_off:.3e})"
            )
        h_diag = np.real(np.diag(hb))
        v_diag = np.diag(dag(basis) @ v @ basis)
        z = np.sum(weights * h_diag * v_diag * np.exp(1.0j * beta))
        out.append(pattern_from_value(mu, z, phase_tol))
    return out


def kraus_path_decompose(times, kraus_family, boundary_tol: float = STRUCTURAL_TOL):
    """Split a time-parametrized Kraus family m_mu(t) = h_mu(t) v_mu u~_mu(t).

    Polar-decomposes every operator, takes v_mu as the unitary factor at
    t = 0, and returns (h paths, v list, transported unitary paths) with
    u~_mu(0) = identity. The family must start as a unitary channel living
    entirely in the mu = 0 slot: h_0(0) = I and m_mu(0) = 0 for mu > 0.
    """
    t = np.asarray(times, dtype=float)
    fam = np.asarray(kraus_family, dtype=complex)
    if fam.ndim != 4 or fam.shape[0] != t.size:
        raise ValueError("kraus_family must have shape (samples, K, N, N)")
    n = fam.shape[2]
    factors = [[polar_decompose(fam[j, mu]) for j in range(t.size)] for mu in range(fam.shape[1])]
    h0 = factors[0][0].h
    if max_abs(h0 - np.eye(n)) > boundary_tol:
        raise ValueError("family must start as a unitary channel: h_0(0) != I")
    for mu in range(1, fam.shape[1]):
        if max_abs(fam[0, mu]) > boundary_tol:
            raise ValueError(f"family must start in the mu = 0 slot: m_{mu}(0) != 0")
    h_paths, v_list, u_paths = [], [], []
    for mu, fac in enumerate(factors):
        v_mu = fac[0].u
        v_list.append(v_mu)
        h_paths.append(np.stack([f.h for f in fac]))
        transported = np.stack([dag(v_mu) @ f.u for f in fac])
        u_paths.append(UnitaryPath(times=t, unitaries=transported))
    return h_paths, v_list, u_paths


# ---------------------------------------------------------------------------
# Bloch sphere loops and solid angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlochLoop:
    """Closed loop of unit vectors, either polygon vertices or dense samples."""

    kind: str  # "geodesic_polygon" | "discretized"
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("loop points must be an (n, 3) array")
        norms = np.linalg.norm(pts, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > STRUCTURAL_TOL:
            raise ValueError(f"loop points must be unit vectors: worst norm deviation {worst:.3e}")
        if self.kind == "geodesic_polygon":
            if pts.shape[0] < 3:
                raise ValueError("polygon loops need at least 3 vertices")
        elif self.kind == "discretized":
            if pts.shape[0] < 4:
                raise ValueError("discretized loops need at least 4 samples")
            if float(np.linalg.norm(pts[0] - pts[-1])) > 1e-8:
                raise ValueError("discretized loops must be closed (first = last sample)")
        else:
            raise ValueError(f"unknown loop kind {self.kind!r}")
        object.__setattr__(self, "points", pts)


def _polygon_solid_angle(vertices: np.ndarray) -> float:
    n = vertices.shape[0]
    turning = 0.0
    for j in range(n):
        prev_v = vertices[(j - 1) % n]
        here = vertices[j]
        next_v = vertices[(j + 1) % n]
        t_in = -(prev_v - (prev_v @ here) * here)  # direction of arrival
        t_out = next_v - (next_v @ here) * here
        ni, no = np.linalg.norm(t_in), np.linalg.norm(t_out)
        if ni < 1e-12 or no < 1e-12:
            raise ValueError(
                f"vertices adjacent to index {j} are identical or antipodal; geodesic undefined"
            )
        t_in, t_out = t_in / ni, t_out / no
        turning += np.arctan2(np.cross(t_in, t_out) @ here, t_in @ t_out)
    omega = 2.0 * np.pi - turning
    while omega > 2.0 * np.pi:
        omega -= 4.0 * np.pi
    while omega <= -2.0 * np.pi:
        omega += 4.0 * np.pi
    return float(omega)


def _discretized_solid_angle(samples: np.ndarray) -> float:
    # line integral of (1 - cos(theta)) d(phi), referenced to the +z pole
    z = np.clip(samples[:, 2], -1.0, 1.0)
    phi = np.unwrap(np.arctan2(samples[:, 1], samples[:, 0]))
    return float(np.trapezoid(1.0 - z, phi))


def solid_angle(loop: BlochLoop) -> float:
    """Signed solid angle enclosed by a loop on the unit sphere.

    Polygon loops use the spherical excess (Gauss-Bonnet with geodesic
    edges: sum of interior angles minus (n - 2) pi), wrapped into
    (-2 pi, 2 pi]. Discretized loops integrate (1 - cos theta) d(phi) with
    unwrapped azimuths, which reproduces cap areas up to 4 pi; both agree
    modulo 4 pi and exactly for loops enclosing less than a hemisphere's
    worth of area.
    """
    if loop.kind == "geodesic_polygon":
        return _polygon_solid_angle(loop.points)
    return _discretized_solid_angle(loop.points)


def slerp_loop_samples(vertices, per_edge: int) -> np.ndarray:
    """Dense closed sampling of a geodesic polygon, for the discretized route."""
    pts = np.asarray(vertices, dtype=float)
    out = [pts[0]]
    n = pts.shape[0]
    for j in range(n):
        a, b = pts[j], pts[(j + 1) % n]
        axis = np.cross(a, b)
        nrm = float(np.linalg.norm(axis))
        ang = float(np.arctan2(nrm, a @ b))
        if nrm < 1e-12:
            raise ValueError("cannot sample a degenerate geodesic edge")
        for s in range(1, per_edge + 1):
            frac = ang * s / per_edge
            out.append(
                a * np.cos(frac) + np.cross(axis / nrm, a) * np.sin(frac)
            )
    return np.asarray(out)


# ---------------------------------------------------------------------------
# loop-driven unitary paths
# ---------------------------------------------------------------------------

def geodesic_polygon_path(vertices, steps_per_edge: int = 300) -> UnitaryPath:
    """SU(2) path rotating the Bloch sphere along each geodesic edge in turn.

    The rotation axis of each edge is perpendicular to the plane of the
    geodesic, so every state riding the loop (and its antipode) satisfies
    the parallel transport conditions along the way.
    """
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
        raise ValueError("need at least two vertices of shape (n, 3)")
    if steps_per_edge < 1:
        raise ValueError("steps_per_edge must be positive")
    n_edges = pts.shape[0]
    unitaries = [np.eye(2, dtype=complex)]
    current = np.eye(2, dtype=complex)
    for j in range(n_edges):
        a, b = pts[j], pts[(j + 1) % n_edges]
        axis = np.cross(a, b)
        nrm = float(np.linalg.norm(axis))
        if nrm < 1e-12:
            raise ValueError(
                f"edge {j} connects identical or antipodal vertices; geodesic undefined"
            )
        axis = axis / nrm
        ang = float(np.arctan2(nrm, a @ b))
        for s in range(1, steps_per_edge + 1):
            unitaries.append(su2_exp(ang * s / steps_per_edge / 2.0, axis) @ current)
        current = unitaries[-1]
    times = np.linspace(0.0, 1.0, n_edges * steps_per_edge + 1)
    return UnitaryPath(times=times, unitaries=np.stack(unitaries))


def axis_rotation_path(axis, angle: float, steps: int = 1000) -> UnitaryPath:
    """Uniform rotation of the Bloch sphere by ``angle`` about ``axis``."""
    if steps < 2:
        raise ValueError("need at least 2 steps")
    e = np.asarray(axis, dtype=float)
    nrm = float(np.linalg.norm(e))
    if nrm < 1e-12:
        raise ValueError("rotation axis must be nonzero")
    e = e / nrm
    times = np.linspace(0.0, 1.0, steps + 1)
    unitaries = np.stack([su2_exp(angle * t / 2.0, e) for t in times])
    return UnitaryPath(times=times, unitaries=unitaries)


def equal_colatitude_triangle(omega: float, colatitude: float = 2.0 * np.pi / 3.0) -> np.ndarray:
    """Geodesic triangle (north pole, two vertices at fixed colatitude) with
    signed solid angle ``omega``.

    The azimuth span is solved numerically; with the default colatitude the
    reachable range is 0 < omega < 2 pi. Reversing the vertex order flips
    the sign.
    """
    if not 0.0 < omega < 2.0 * np.pi:
        raise ValueError(f"target solid angle must lie in (0, 2 pi), got {omega}")
    if not np.pi / 2.0 < colatitude < np.pi:
        raise ValueError("colatitude must lie in (pi/2, pi) for the full range")
    s, c = np.sin(colatitude), np.cos(colatitude)
    pole = np.array([0.0, 0.0, 1.0])

    def triangle(lam: float) -> np.ndarray:
        return np.array(
            [pole, [s, 0.0, c], [s * np.cos(lam), s * np.sin(lam), c]]
        )

    def gap(lam: float) -> float:
        return _polygon_solid_angle(triangle(lam)) - omega

    lam = brentq(gap, 1e-9, np.pi - 1e-9, xtol=1e-14)
    return triangle(lam)


# ---------------------------------------------------------------------------
# closed-form scenario predictions
# ---------------------------------------------------------------------------

def _check_pr(p: float, r: float):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p must lie in [0, 1], got {p}")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"Bloch length r must lie in [0, 1], got {r}")


def depol_cyclic_patterns(p: float, r: float, omega: float) -> list[complex]:
    """Patterns of the depolarizing channel composed with a cyclic
    parallel-transported loop of enclosed solid angle ``omega``, for a state
    of Bloch length ``r`` along the loop's start direction.

        mu=0: sqrt(1-p) (cos(omega/2) + i r sin(omega/2))
        mu=1: 0
        mu=2: 0
        mu=3: sqrt(p/3) (r cos(omega/2) + i sin(omega/2))
    """
    _check_pr(p, r)
    half = omega / 2.0
    return [
        np.sqrt(1.0 - p) * complex(np.cos(half), r * np.sin(half)),
        0.0j,
        0.0j,
        np.sqrt(p / 3.0) * complex(r * np.cos(half), np.sin(half)),
    ]


def depol_bitflip_patterns(p: float, r: float, phi: float) -> list[complex]:
    """Patterns of the depolarizing channel composed with the bit-flip
    transporter exp(-i (pi/2) (cos(phi) sigma_x + sin(phi) sigma_y)).

        mu=1: sqrt(p/3) e^{-i pi/2} (cos(phi) + i r sin(phi))
        mu=2: sqrt(p/3) e^{-i pi}   (r cos(phi) + i sin(phi))

    and zero in the mu = 0, 3 slots because the transporter is
    anti-diagonal.
    """
    _check_pr(p, r)
    amp = np.sqrt(p / 3.0)
    return [
        0.0j,
        amp * np.exp(-0.5j * np.pi) * complex(np.cos(phi), r * np.sin(phi)),
        amp * np.exp(-1.0j * np.pi) * complex(r * np.cos(phi), np.sin(phi)),
        0.0j,
    ]
