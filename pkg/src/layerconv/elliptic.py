"""Per-Fourier-mode variable-coefficient solvers.

The pressure problem k^2 K P - d/dz(K dP/dz) = d/dz(K phi) is discretized in
conservative face-flux form so that the recovered velocity is discretely
divergence-free by construction: the cell equation IS k^2*K*P*dz + w_top -
w_bottom = 0 with w = -K(dP/dz + phi) at faces and w = 0 on the walls.

All modes are solved at once by a Thomas sweep vectorized over the mode axis.
The Nyquist mode is dropped on input (odd x-derivatives are not representable
for real fields), so every produced field is Nyquist-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientProfile
from .grid import (
    CENTER,
    ZFACE,
    ComplexArray,
    Field,
    FloatArray,
    Grid,
    GridError,
    SpectralField,
    forward_x,
    inverse_x,
)


def solve_tridiag_many(lower: FloatArray, diag: FloatArray, upper: FloatArray,
                       rhs: ComplexArray) -> ComplexArray:
    """Solve a batch of independent tridiagonal systems along the last axis.

    lower/upper have one fewer entry than diag along the last axis; all arrays
    broadcast along leading axes. No pivoting: systems are assumed diagonally
    dominant (positive coefficients).
    """
    n = diag.shape[-1]
    shape = np.broadcast_shapes(diag.shape, rhs.shape)
    beta = np.empty(shape, dtype=np.float64 if rhs.dtype.kind == "f" else np.float64)
    gamma = np.empty(shape[:-1] + (n - 1,), dtype=np.float64)
    y = np.empty(shape, dtype=rhs.dtype)

    d = np.broadcast_to(diag, shape)
    lo = np.broadcast_to(lower, shape[:-1] + (n - 1,))
    up = np.broadcast_to(upper, shape[:-1] + (n - 1,))
    b = np.broadcast_to(rhs, shape)

    beta[..., 0] = d[..., 0]
    y[..., 0] = b[..., 0] / beta[..., 0]
    for i in range(1, n):
        gamma[..., i - 1] = up[..., i - 1] / beta[..., i - 1]
        beta[..., i] = d[..., i] - lo[..., i - 1] * gamma[..., i - 1]
        y[..., i] = (b[..., i] - lo[..., i - 1] * y[..., i - 1]) / beta[..., i]

    x = np.empty_like(y)
    x[..., -1] = y[..., -1]
    for i in range(n - 2, -1, -1):
        x[..., i] = y[..., i] - gamma[..., i] * x[..., i + 1]
    return x


@dataclass
class PressureSolution:
    """Pressure (mean-zero gauge on mode 0) and the Darcy velocity it induces."""

    P: Field   # centers
    u: Field   # centers, -K dP/dx
    w: Field   # z-faces, -K(dP/dz + phi); exactly 0 on the walls


def _phi_on_faces(coef: ComplexArray) -> ComplexArray:
    """Arithmetic two-point average onto interior faces; walls excluded."""
    return 0.5 * (coef[:, :-1] + coef[:, 1:])


def solve_pressure(profile: CoefficientProfile, phi: Field) -> PressureSolution:
    """Solve the buoyancy-driven pressure problem for the given concentration.

    Mode 0 is the hydrostatic balance dP/dz = -phi integrated directly and
    gauged to zero weighted mean; modes n >= 1 are tridiagonal solves.
    """
    if phi.stag != CENTER:
        raise GridError("phi must live at cell centers")
    if not np.all(np.isfinite(phi.data)):
        raise ValueError("non-finite concentration passed to the pressure solver")
    grid = phi.grid
    nz = grid.nz
    Kc, Kf = profile.K_center, profile.K_face
    dz, dzc = grid.dz, grid.dzc

    spec = forward_x(phi)
    if grid.nx % 2 == 0:
        spec.coef[-1] = 0.0  # drop Nyquist: not representable in odd derivatives
    k = grid.kx()
    nm = k.size

    phif = _phi_on_faces(spec.coef)  # (nm, nz-1): interior faces only

    P_hat = np.zeros((nm, nz), dtype=np.complex128)

    # Mode 0: w == 0 identically, so P' = -phi at every interior face.
    p0 = np.zeros(nz, dtype=np.complex128)
    for i in range(nz - 1, 0, -1):
        p0[i - 1] = p0[i] - dzc[i] * phif[0, i - 1]
    p0 -= np.sum(p0 * dz) / np.sum(dz)
    P_hat[0] = p0

    # Modes >= 1: conservative tridiagonal system per mode.
    if nm > 1:
        ks = k[1:, None]
        a_face = Kf[1:-1] / dzc[1:-1]                      # (nz-1,) interior faces
        diag = ks**2 * Kc[None, :] * dz[None, :]
        diag = diag + np.concatenate(([0.0], a_face)) + np.concatenate((a_face, [0.0]))
        lower = np.broadcast_to(-a_face, (nm - 1, nz - 1))
        upper = lower
        g = Kf[1:-1] * phif[1:]                            # (nm-1, nz-1) face sources
        rhs = np.zeros((nm - 1, nz), dtype=np.complex128)
        rhs[:, 1:] += g
        rhs[:, :-1] -= g
        P_hat[1:] = solve_tridiag_many(lower, diag, upper, rhs)

    # Velocity: u = -K dP/dx at centers, w = -K(dP/dz + phi) at faces.
    u_hat = -1j * k[:, None] * P_hat * Kc[None, :]
    w_hat = np.zeros((nm, nz + 1), dtype=np.complex128)
    dP_face = (P_hat[:, :-1] - P_hat[:, 1:]) / dzc[1:-1]
    w_hat[:, 1:-1] = -Kf[1:-1] * (dP_face + phif)
    w_hat[0] = 0.0  # exact: the mode-0 construction makes the flux vanish

    P = inverse_x(SpectralField(grid, P_hat, CENTER))
    u = inverse_x(SpectralField(grid, u_hat, CENTER))
    w = inverse_x(SpectralField(grid, w_hat, ZFACE))
    return PressureSolution(P=P, u=u, w=w)


def recover_velocity(sol: PressureSolution) -> tuple[Field, Field]:
    """Velocity slaved to the pressure solve: (u at centers, w at z-faces)."""
    if sol.u.stag != CENTER or sol.w.stag != ZFACE:
        raise GridError("pressure solution carries wrongly staggered velocity")
    return sol.u, sol.w


def divergence(u: Field, w: Field) -> Field:
    """Discrete divergence: spectral d/dx at centers + face difference of w."""
    if u.stag != CENTER or w.stag != ZFACE:
        raise GridError("divergence expects u at centers and w at z-faces")
    if u.grid is not w.grid:
        raise GridError("velocity components live on different grids")
    from .grid import ddx

    dive = ddx(u).data + (w.data[:, :-1] - w.data[:, 1:]) / u.grid.dz[None, :]
    return Field(u.grid, dive, CENTER)


def solve_streamfunction(rhs: Field) -> Field:
    """Solve -lap(psi) = rhs with psi = 0 on both walls; psi lives on z-faces.

    The right side, given at cell centers, is averaged onto interior faces;
    mode 0 is solved with the same Dirichlet conditions (always nonsingular).
    """
    if rhs.stag != CENTER:
        raise GridError("streamfunction right side must live at cell centers")
    grid = rhs.grid
    nz = grid.nz
    spec = forward_x(rhs)
    if grid.nx % 2 == 0:
        spec.coef[-1] = 0.0
    k = grid.kx()

    r_face = _phi_on_faces(spec.coef)  # (nm, nz-1) at interior faces

    ha = grid.dz[:-1]   # gap to the face above each interior face
    hb = grid.dz[1:]    # gap to the face below
    diag = 2.0 / (ha * hb) + k[:, None] ** 2
    lower = np.broadcast_to(-2.0 / (ha[1:] * (ha[1:] + hb[1:])), (k.size, nz - 2))
    upper = np.broadcast_to(-2.0 / (hb[:-1] * (ha[:-1] + hb[:-1])), (k.size, nz - 2))

    psi_int = solve_tridiag_many(lower, diag, upper, r_face)
    psi_hat = np.zeros((k.size, nz + 1), dtype=np.complex128)
    psi_hat[:, 1:-1] = psi_int
    return inverse_x(SpectralField(grid, psi_hat, ZFACE))


def neg_laplacian_interior(psi: Field) -> FloatArray:
    """Apply the discrete -lap to a wall-zero z-face field; values at interior faces."""
    if psi.stag != ZFACE:
        raise GridError("expected a z-face field")
    grid = psi.grid
    from .grid import ddx

    ha = grid.dz[:-1]
    hb = grid.dz[1:]
    p = psi.data
    d2z = 2.0 * ((p[:, :-2] - p[:, 1:-1]) / ha - (p[:, 1:-1] - p[:, 2:]) / hb) / (ha + hb)
    d2x = ddx(ddx(psi)).data[:, 1:-1]
    return -(d2x + d2z)


def velocity_from_streamfunction(psi: Field) -> tuple[Field, Field]:
    """Perp-gradient convention u = (-dpsi/dz, dpsi/dx)."""
    if psi.stag != ZFACE:
        raise GridError("streamfunction must live on z-faces")
    grid = psi.grid
    from .grid import ddx

    u = Field(grid, -(psi.data[:, :-1] - psi.data[:, 1:]) / grid.dz[None, :], CENTER)
    w = ddx(psi)
    return u, w


def weak_form_energy(profile: CoefficientProfile, sol: PressureSolution,
                     phi: Field) -> tuple[float, float]:
    """Both sides of the discrete weak-form energy identity.

    Testing the pressure system with P itself gives
    sum K |grad P|^2 = -sum K phi dP/dz, exactly at the discrete level.
    """
    grid = phi.grid
    k = grid.kx()
    wx = np.full(k.size, 2.0)
    wx[0] = 1.0
    if grid.nx % 2 == 0:
        wx[-1] = 1.0

    P_hat = forward_x(sol.P).coef
    phi_hat = forward_x(phi).coef
    if grid.nx % 2 == 0:
        phi_hat[-1] = 0.0
    phif = _phi_on_faces(phi_hat)
    dP = (P_hat[:, :-1] - P_hat[:, 1:]) / grid.dzc[1:-1]

    Kc, Kf = profile.K_center, profile.K_face
    L = grid.domain.L
    lhs = L * float(
        np.sum(wx[:, None] * (k[:, None] ** 2) * Kc * np.abs(P_hat) ** 2 * grid.dz)
        + np.sum(wx[:, None] * Kf[1:-1] * np.abs(dP) ** 2 * grid.dzc[1:-1])
    )
    rhs = -L * float(
        np.sum(wx[:, None] * Kf[1:-1] * np.real(phif * np.conj(dP)) * grid.dzc[1:-1])
    )
    return lhs, rhs
