"""Discrete norms: L2, H1, weighted-energy, second-order anisotropic, and
fractional multiplier norms with the sup/fractional embedding diagnostic.

Fractional norms are realized spectrally on the evenly-extended field: Fourier
in x, cosine (DCT-II) in z, multiplier (1 + k^2 + (m*pi/H)^2)^(alpha/2). On a
nonuniform z-grid the field is first resampled onto a uniform one of
comparable finest resolution; on uniform grids the realization is exactly
Parseval-consistent with the quadrature L2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .coeffs import CoefficientProfile
from .grid import CENTER, ZFACE, Field, FloatArray, Grid, GridError, ddx


def _x_weights(grid: Grid) -> FloatArray:
    w = np.full(grid.nx // 2 + 1, 2.0)
    w[0] = 1.0
    if grid.nx % 2 == 0:
        w[-1] = 1.0
    return w


def _z_weights(grid: Grid, stag: str) -> FloatArray:
    if stag == CENTER:
        return grid.dz
    return grid.dzc  # faces: half cells at the walls, center gaps inside


def l2(f: Field) -> float:
    """Volume-weighted discrete L2 norm."""
    wz = _z_weights(f.grid, f.stag)
    return float(np.sqrt(np.sum(f.data**2 * wz[None, :]) * f.grid.dx))


def linf(f: Field) -> float:
    return float(np.max(np.abs(f.data)))


def _grad_sq(phi: Field, Dc: FloatArray | None = None, Df: FloatArray | None = None,
             dirichlet_walls: bool = False) -> float:
    """Integral of D |grad phi|^2 for a center field (D == 1 when omitted)."""
    grid = phi.grid
    if phi.stag != CENTER:
        raise GridError("gradients are defined for center fields")
    dc = np.ones(grid.nz) if Dc is None else Dc
    df = np.ones(grid.nz + 1) if Df is None else Df

    gx = ddx(phi).data
    total = float(np.sum(dc[None, :] * gx**2 * grid.dz[None, :]) * grid.dx)

    gz_int = (phi.data[:, :-1] - phi.data[:, 1:]) / grid.dzc[1:-1]
    total += float(np.sum(df[1:-1][None, :] * gz_int**2 * grid.dzc[1:-1][None, :]) * grid.dx)
    if dirichlet_walls:
        g_top = (0.0 - phi.data[:, 0]) / grid.dzc[0]
        g_bot = (phi.data[:, -1] - 0.0) / grid.dzc[-1]
        total += float(np.sum(df[0] * g_top**2 * grid.dzc[0]) * grid.dx)
        total += float(np.sum(df[-1] * g_bot**2 * grid.dzc[-1]) * grid.dx)
    return total


def h1(f: Field, dirichlet_walls: bool = False) -> float:
    return float(np.sqrt(l2(f) ** 2 + _grad_sq(f, dirichlet_walls=dirichlet_walls)))


def v_norm(phi: Field, profile: CoefficientProfile) -> float:
    """Energy norm || sqrt(D) grad phi ||_L2 (porosity is 1 throughout)."""
    return float(np.sqrt(_grad_sq(phi, profile.D_center, profile.D_face,
                                  dirichlet_walls=True)))


def diffusive_flux(phi: Field, profile: CoefficientProfile) -> Field:
    """Face-sampled flux D dphi/dz, single-valued across interfaces."""
    grid = phi.grid
    g = np.empty((grid.nx, grid.nz + 1))
    g[:, 1:-1] = profile.D_face[1:-1] * (phi.data[:, :-1] - phi.data[:, 1:]) / grid.dzc[1:-1]
    g[:, 0] = profile.D_face[0] * (0.0 - phi.data[:, 0]) / grid.dzc[0]
    g[:, -1] = profile.D_face[-1] * (phi.data[:, -1] - 0.0) / grid.dzc[-1]
    return Field(grid, g, ZFACE)


def _h1_face(g: Field) -> float:
    """H1 norm of a z-face field: spectral d/dx plus center differences in z."""
    grid = g.grid
    total = l2(g) ** 2
    total += l2(ddx(g)) ** 2
    gz = (g.data[:, :-1] - g.data[:, 1:]) / grid.dz[None, :]
    total += float(np.sum(gz**2 * grid.dz[None, :]) * grid.dx)
    return float(np.sqrt(total))


def w_norm(phi: Field, profile: CoefficientProfile) -> float:
    """Second-order norm: ||phi||_V^2 + ||dphi/dx||_H1^2 + ||D dphi/dz||_H1^2."""
    v2 = _grad_sq(phi, profile.D_center, profile.D_face, dirichlet_walls=True)
    dphix = ddx(phi)
    h1x2 = l2(dphix) ** 2 + _grad_sq(dphix, dirichlet_walls=True)
    flux = diffusive_flux(phi, profile)
    return float(np.sqrt(v2 + h1x2 + _h1_face(flux) ** 2))


def _resample_uniform(f: Field, max_nz: int = 4096) -> tuple[FloatArray, int]:
    """Field values on a uniform cell-centered z-grid (linear interpolation)."""
    grid = f.grid
    dzmin, dzmax = float(np.min(grid.dz)), float(np.max(grid.dz))
    if f.stag == CENTER and dzmax - dzmin <= 1e-12 * dzmax:
        return f.data, grid.nz
    nzu = int(min(max_nz, 2 ** int(np.ceil(np.log2(max(grid.nz, grid.domain.H / dzmin))))))
    zu = -grid.domain.H * (np.arange(nzu) + 0.5) / nzu
    zsrc = grid.z_centers if f.stag == CENTER else grid.z_faces
    # np.interp needs increasing abscissae; z decreases top-down.
    out = np.empty((grid.nx, nzu))
    for i in range(grid.nx):
        out[i] = np.interp(zu[::-1], zsrc[::-1], f.data[i, ::-1])[::-1]
    return out, nzu


def h_alpha_norm(f: Field, alpha: float) -> float:
    """Fractional multiplier norm of the cosine-extended field, alpha in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    grid = f.grid
    data, nzu = _resample_uniform(f)

    coef = np.fft.rfft(data, axis=0) / grid.nx          # (nm, nzu)
    y = dct(coef, type=2, axis=1)                       # scipy: y_m = 2 sum x_i cos(...)
    a = y / nzu
    a[:, 0] *= 0.5                                      # interpolation coefficients

    k = grid.kx()
    m = np.arange(nzu) * np.pi / grid.domain.H
    mult2 = (1.0 + k[:, None] ** 2 + m[None, :] ** 2) ** alpha
    gz = np.full(nzu, 0.5)
    gz[0] = 1.0
    wx = _x_weights(grid)
    total = grid.domain.L * grid.domain.H * np.sum(
        wx[:, None] * gz[None, :] * mult2 * np.abs(a) ** 2)
    return float(np.sqrt(total))


def embedding_ratio(f: Field, alpha: float) -> tuple[float, float]:
    """Sup-norm over isotropic vs anisotropic fractional control.

    iso = ||f||_inf / ||f||_Ha, aniso = ||f||_inf / (||f||_Ha + ||df/dx||_Ha);
    the anisotropic denominator controls the sup for every alpha > 1/2.
    """
    if not 0.5 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (1/2, 1), got {alpha}")
    sup = linf(f)
    ha = h_alpha_norm(f, alpha)
    hax = h_alpha_norm(ddx(f), alpha)
    if ha <= 0.0 or ha + hax <= 0.0:
        raise ZeroDivisionError("fractional norm vanished; ratios undefined")
    return sup / ha, sup / (ha + hax)


@dataclass
class NormReport:
    """Named norms of one field (fractional entries keyed by alpha)."""

    l2: float
    h1: float
    linf: float
    v: float
    w: float
    h_alpha: dict[float, float]
    aniso: dict[float, float]


def compute_report(phi: Field, profile: CoefficientProfile,
                   alphas: tuple[float, ...] = (0.6, 0.75)) -> NormReport:
    ha = {a: h_alpha_norm(phi, a) for a in alphas}
    dphix = ddx(phi)
    an = {a: ha[a] + h_alpha_norm(dphix, a) for a in alphas}
    return NormReport(
        l2=l2(phi),
        h1=h1(phi, dirichlet_walls=True),
        linf=linf(phi),
        v=v_norm(phi, profile),
        w=w_norm(phi, profile),
        h_alpha=ha,
        aniso=an,
    )
