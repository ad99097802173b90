"""Channel domain, interface-aligned z-grid, and horizontal Fourier transforms.

Geometry convention: the channel is (0, L) x (-H, 0), periodic in x. The z-grid
is cell-centered with faces listed top-down, z_faces[0] = 0 > ... > z_faces[nz] = -H.
Faces are placed exactly on every material interface and, when transition widths
are requested, on every band edge z_j +/- eps; spacing is uniform between
consecutive alignment coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

CENTER = "center"
ZFACE = "zface"

_ALIGN_TOL = 1e-12


class GridError(ValueError):
    """Invalid domain/grid construction request."""


@dataclass(frozen=True)
class DomainSpec:
    """Channel of period L and depth H with horizontal material interfaces.

    interfaces are strictly decreasing and strictly inside (-H, 0); the layer
    above interfaces[0] is layer 1, the layer below interfaces[-1] is the last.
    """

    L: float
    H: float
    interfaces: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (np.isfinite(self.L) and self.L > 0.0):
            raise GridError(f"L must be positive and finite, got {self.L}")
        if not (np.isfinite(self.H) and self.H > 0.0):
            raise GridError(f"H must be positive and finite, got {self.H}")
        zs = self.interfaces
        if len(zs) < 1:
            raise GridError("at least one interface is required")
        bounds = (0.0,) + tuple(zs) + (-self.H,)
        for a, b in zip(bounds[:-1], bounds[1:]):
            if not b < a:
                raise GridError(f"interfaces must decrease strictly inside (-H, 0): {zs}")

    @property
    def n_layers(self) -> int:
        return len(self.interfaces) + 1

    def layer_bounds(self) -> list[tuple[float, float]]:
        """(top, bottom) of each layer, top-down."""
        zs = (0.0,) + tuple(self.interfaces) + (-self.H,)
        return [(zs[j], zs[j + 1]) for j in range(self.n_layers)]

    def min_gap(self) -> float:
        """Smallest distance between consecutive alignment levels (walls included)."""
        zs = (0.0,) + tuple(self.interfaces) + (-self.H,)
        return float(min(a - b for a, b in zip(zs[:-1], zs[1:])))

    def max_eps(self) -> float:
        """Largest admissible transition half-width (strictly less than this)."""
        return 0.5 * self.min_gap()


@dataclass(frozen=True)
class Grid:
    """Structured grid: equispaced x nodes, interface-aligned z cells."""

    domain: DomainSpec
    nx: int
    x: FloatArray         # (nx,)
    z_faces: FloatArray   # (nz+1,) strictly decreasing, 0 .. -H
    z_centers: FloatArray  # (nz,) face midpoints
    dz: FloatArray        # (nz,) positive cell heights
    dzc: FloatArray       # (nz+1,) center-to-center gap per face; half cells at walls

    @property
    def nz(self) -> int:
        return self.z_centers.size

    @property
    def dx(self) -> float:
        return self.domain.L / self.nx

    def kx(self) -> FloatArray:
        """rfft wavenumbers 2*pi*n/L, n = 0..nx/2."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.nx, d=self.dx)

    def n_samples(self, stag: str) -> int:
        if stag == CENTER:
            return self.nz
        if stag == ZFACE:
            return self.nz + 1
        raise GridError(f"unknown staggering {stag!r}")

    def face_index(self, z: float) -> int:
        """Index of the face at z (must coincide with an existing face)."""
        i = int(np.argmin(np.abs(self.z_faces - z)))
        if abs(self.z_faces[i] - z) > _ALIGN_TOL * max(1.0, self.domain.H):
            raise GridError(f"no grid face at z = {z}")
        return i

    def interface_faces(self) -> list[int]:
        return [self.face_index(z) for z in self.domain.interfaces]

    def layer_of_centers(self) -> NDArray[np.int64]:
        """Layer index (0-based, top-down) containing each cell center."""
        edges = -np.asarray(self.domain.interfaces)  # increasing depths
        return np.searchsorted(edges, -self.z_centers, side="left")


@dataclass
class Field:
    """Real scalar sampled on the grid, tagged by staggering (center or z-face)."""

    grid: Grid
    data: FloatArray
    stag: str = CENTER

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        expect = (self.grid.nx, self.grid.n_samples(self.stag))
        if self.data.shape != expect:
            raise GridError(
                f"field shape {self.data.shape} does not match grid {expect} for {self.stag!r}"
            )

    @classmethod
    def zeros(cls, grid: Grid, stag: str = CENTER) -> "Field":
        return cls(grid, np.zeros((grid.nx, grid.n_samples(stag))), stag)

    def copy(self) -> "Field":
        return Field(self.grid, self.data.copy(), self.stag)


@dataclass
class SpectralField:
    """Per-wavenumber complex columns of a real field; modes n = 0..nx/2."""

    grid: Grid
    coef: ComplexArray    # (nx//2 + 1, nzs)
    stag: str = CENTER

    def __post_init__(self) -> None:
        expect = (self.grid.nx // 2 + 1, self.grid.n_samples(self.stag))
        if self.coef.shape != expect:
            raise GridError(
                f"spectral shape {self.coef.shape} does not match grid {expect} for {self.stag!r}"
            )


def _as_eps_tuple(eps: float | Sequence[float] | None) -> tuple[float, ...]:
    if eps is None:
        return ()
    if np.isscalar(eps):
        return (float(eps),)
    return tuple(float(e) for e in eps)


def build_grid(
    domain: DomainSpec,
    nx: int,
    nz_per_layer: int,
    eps: float | Sequence[float] | None = None,
) -> Grid:
    """Build the structured grid, aligned to interfaces and eps-band edges.

    nx must be a power of two. Each layer receives ~nz_per_layer cells spread
    over its segments proportionally to segment length, with at least 4 cells
    per segment so every band (z_j - eps, z_j + eps) holds >= 8 cells. A list
    of eps values aligns the grid to every band edge at once (shared sweep
    grids).
    """
    nx = int(nx)
    nz_per_layer = int(nz_per_layer)
    if nx < 4 or (nx & (nx - 1)) != 0:
        raise GridError(f"nx must be a power of two >= 4, got {nx}")
    if nz_per_layer < 8:
        raise GridError(f"nz_per_layer must be >= 8, got {nz_per_layer}")

    eps_list = _as_eps_tuple(eps)
    emax = domain.max_eps()
    for e in eps_list:
        if not (np.isfinite(e) and e > 0.0):
            raise GridError(f"eps must be positive and finite, got {e}")
        if e >= emax:
            raise GridError(
                f"eps = {e} too large for the interface spacing "
                f"(needs eps < {emax}, half the minimum gap)"
            )

    # Alignment coordinates: walls, interfaces, band edges.
    marks = {0.0, -float(domain.H)}
    for zj in domain.interfaces:
        marks.add(float(zj))
        for e in eps_list:
            marks.add(float(zj) + e)
            marks.add(float(zj) - e)
    marks_desc = sorted(marks, reverse=True)

    # Cells per segment: proportional to length within the containing layer,
    # at least 4 everywhere.
    layer_bounds = domain.layer_bounds()

    def layer_thickness(z_mid: float) -> float:
        for top, bot in layer_bounds:
            if bot <= z_mid <= top:
                return top - bot
        raise GridError(f"segment midpoint {z_mid} outside domain")

    faces: list[float] = [0.0]
    for top, bot in zip(marks_desc[:-1], marks_desc[1:]):
        seg = top - bot
        if seg <= 0.0:
            raise GridError("degenerate (zero-size) grid segment")
        n_seg = max(4, int(np.ceil(nz_per_layer * seg / layer_thickness(0.5 * (top + bot)))))
        faces.extend(np.linspace(top, bot, n_seg + 1)[1:])
    z_faces = np.asarray(faces, dtype=np.float64)
    z_faces[-1] = -domain.H

    dz = -np.diff(z_faces)
    if np.any(dz <= 0.0):
        raise GridError("grid faces are not strictly decreasing")
    z_centers = 0.5 * (z_faces[:-1] + z_faces[1:])

    dzc = np.empty(z_faces.size, dtype=np.float64)
    dzc[1:-1] = z_centers[:-1] - z_centers[1:]
    dzc[0] = 0.5 * dz[0]
    dzc[-1] = 0.5 * dz[-1]

    x = np.arange(nx, dtype=np.float64) * (domain.L / nx)
    return Grid(domain=domain, nx=nx, x=x, z_faces=z_faces,
                z_centers=z_centers, dz=dz, dzc=dzc)


def forward_x(field: Field) -> SpectralField:
    """Horizontal DFT; coefficients normalized so a constant maps to itself."""
    if not np.all(np.isfinite(field.data)):
        raise GridError("non-finite values in transform input")
    coef = np.fft.rfft(field.data, axis=0) / field.grid.nx
    return SpectralField(field.grid, coef, field.stag)


def inverse_x(spec: SpectralField) -> Field:
    data = np.fft.irfft(spec.coef * spec.grid.nx, n=spec.grid.nx, axis=0)
    return Field(spec.grid, data, spec.stag)


def ddx(field: Field) -> Field:
    """Spectral x-derivative; the Nyquist mode is dropped (odd derivative)."""
    spec = forward_x(field)
    k = field.grid.kx()
    coef = 1j * k[:, None] * spec.coef
    if field.grid.nx % 2 == 0:
        coef[-1] = 0.0
    return inverse_x(SpectralField(field.grid, coef, field.stag))


def dealias_mode_cutoff(nx: int) -> int:
    """Largest retained mode under the 2/3 rule (products alias-free above it)."""
    return nx // 3


def dealias(field: Field) -> Field:
    """Zero all modes above the 2/3-rule cutoff."""
    spec = forward_x(field)
    cut = dealias_mode_cutoff(field.grid.nx)
    spec.coef[cut + 1:] = 0.0
    return inverse_x(spec)


def mirror_x(field: Field) -> Field:
    """Reflection x -> L - x on the periodic grid."""
    idx = (-np.arange(field.grid.nx)) % field.grid.nx
    return Field(field.grid, field.data[idx], field.stag)
