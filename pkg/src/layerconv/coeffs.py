"""Sharp (piecewise-constant) and diffuse (piecewise-linear ramp) material profiles.

Permeability K and diffusivity D are constant per layer; the diffuse variant
replaces each jump at z_j with a linear ramp over (z_j - eps, z_j + eps).
Porosity is fixed at 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import _ALIGN_TOL, FloatArray, Grid, GridError

SHARP = "sharp"
DIFFUSE = "diffuse"


@dataclass(frozen=True)
class LayerStack:
    """Per-layer permeability/diffusivity constants, top-down."""

    K: tuple[float, ...]
    D: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.K) != len(self.D):
            raise ValueError("K and D must have one value per layer")
        if len(self.K) < 2:
            raise ValueError("a layered stack needs at least 2 layers")
        for name, vals in (("K", self.K), ("D", self.D)):
            for v in vals:
                if not (np.isfinite(v) and v > 0.0):
                    raise ValueError(f"{name} values must be positive and finite, got {v}")

    @property
    def n_layers(self) -> int:
        return len(self.K)

    def jump(self, coef: str, j: int) -> float:
        """Jump [above - below] of K or D across interface j (0-based)."""
        vals = getattr(self, coef)
        return vals[j] - vals[j + 1]


@dataclass
class CoefficientProfile:
    """K, D discretized on centers and faces, plus dK/dz at centers."""

    kind: str                 # SHARP or DIFFUSE
    eps: float | None
    K_center: FloatArray
    K_face: FloatArray
    D_center: FloatArray
    D_face: FloatArray
    dKdz_center: FloatArray

    def __post_init__(self) -> None:
        for arr in (self.K_center, self.K_face, self.D_center, self.D_face):
            if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
                raise ValueError("coefficient profiles must be positive and finite")


def _check_alignment(grid: Grid, zs: tuple[float, ...], what: str) -> None:
    for z in zs:
        if np.min(np.abs(grid.z_faces - z)) > _ALIGN_TOL * max(1.0, grid.domain.H):
            raise GridError(f"grid is not aligned to {what} at z = {z}")


def _check_layers(stack: LayerStack, grid: Grid) -> None:
    if stack.n_layers != grid.domain.n_layers:
        raise ValueError(
            f"stack has {stack.n_layers} layers but the domain defines {grid.domain.n_layers}"
        )


def sharp_profile(stack: LayerStack, grid: Grid) -> CoefficientProfile:
    """Piecewise-constant profile; interface faces carry harmonic means.

    The harmonic mean 2*Ka*Kb/(Ka+Kb) makes the discrete face flux
    single-valued across the jump, which is how the interfacial continuity
    conditions enter the scheme.
    """
    _check_layers(stack, grid)
    _check_alignment(grid, grid.domain.interfaces, "interfaces")

    layer = grid.layer_of_centers()
    K_c = np.asarray(stack.K, dtype=np.float64)[layer]
    D_c = np.asarray(stack.D, dtype=np.float64)[layer]

    def faces_from(centers: FloatArray) -> FloatArray:
        f = np.empty(grid.nz + 1)
        a, b = centers[:-1], centers[1:]
        f[1:-1] = 2.0 * a * b / (a + b)
        f[0] = centers[0]
        f[-1] = centers[-1]
        return f

    return CoefficientProfile(
        kind=SHARP,
        eps=None,
        K_center=K_c,
        K_face=faces_from(K_c),
        D_center=D_c,
        D_face=faces_from(D_c),
        dKdz_center=np.zeros(grid.nz),
    )


def _ramp_eval(z: FloatArray, stack_vals: tuple[float, ...],
               interfaces: tuple[float, ...], eps: float) -> tuple[FloatArray, FloatArray]:
    """Piecewise-linear profile value and slope at the points z."""
    vals = np.asarray(stack_vals, dtype=np.float64)
    edges = -np.asarray(interfaces)
    layer = np.searchsorted(edges, -np.asarray(z), side="left")
    out = vals[layer]
    slope = np.zeros_like(out)
    for j, zj in enumerate(interfaces):
        above, below = vals[j], vals[j + 1]
        s = (above - below) / (2.0 * eps)
        in_band = np.abs(z - zj) < eps - _ALIGN_TOL
        out = np.where(in_band, below + (z - (zj - eps)) * s, out)
        slope = np.where(in_band, s, slope)
    return out, slope


def diffuse_profile(stack: LayerStack, grid: Grid, eps: float) -> CoefficientProfile:
    """Continuous profile: layer plateaus joined by linear ramps of width 2*eps."""
    _check_layers(stack, grid)
    eps = float(eps)
    if not (0.0 < eps < grid.domain.max_eps()):
        raise GridError(
            f"eps = {eps} violates the interface spacing (needs 0 < eps < {grid.domain.max_eps()})"
        )
    edges = tuple(zj + s * eps for zj in grid.domain.interfaces for s in (+1.0, -1.0))
    _check_alignment(grid, grid.domain.interfaces, "interfaces")
    _check_alignment(grid, edges, f"band edges (eps = {eps})")

    K_c, dK_c = _ramp_eval(grid.z_centers, stack.K, grid.domain.interfaces, eps)
    D_c, _ = _ramp_eval(grid.z_centers, stack.D, grid.domain.interfaces, eps)
    K_f, _ = _ramp_eval(grid.z_faces, stack.K, grid.domain.interfaces, eps)
    D_f, _ = _ramp_eval(grid.z_faces, stack.D, grid.domain.interfaces, eps)

    return CoefficientProfile(
        kind=DIFFUSE,
        eps=eps,
        K_center=K_c,
        K_face=K_f,
        D_center=D_c,
        D_face=D_f,
        dKdz_center=dK_c,
    )
