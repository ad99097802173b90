"""Time integration of the concentration transport equation.

d(phi)/dt + div(u phi) = div(D grad phi), phi = 0 on both walls, x-periodic.
Advection is explicit (Adams-Bashforth 2 after an Euler bootstrap), diffusion
is implicit (Crank-Nicolson); the advective term is written in conservative
form, which together with the discretely divergence-free velocity makes it
exactly energy-neutral and constant-annihilating.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

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
    dealias_mode_cutoff,
    forward_x,
    inverse_x,
)

SCHEME_EULER = "imex-euler"
SCHEME_CNAB2 = "imex-cnab2"

# Source hook signature: (grid, t) -> values at cell centers. MMS use only.
SourceFn = Callable[[Grid, float], FloatArray]


class CflError(RuntimeError):
    """Advective Courant number exceeded the configured target."""


@dataclass
class StepperConfig:
    dt: float
    cfl: float = 0.4
    dealias: bool = True
    scheme: str = SCHEME_CNAB2
    source: SourceFn | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.scheme not in (SCHEME_EULER, SCHEME_CNAB2):
            raise ValueError(f"unknown scheme {self.scheme!r}")


def _masked_ddx_hat(f: FloatArray, grid: Grid, dealias: bool) -> ComplexArray:
    """Spectral d/dx of a physical product, 2/3-rule mask applied first."""
    coef = np.fft.rfft(f, axis=0) / grid.nx
    if grid.nx % 2 == 0:
        coef[-1] = 0.0
    if dealias:
        coef[dealias_mode_cutoff(grid.nx) + 1:] = 0.0
    return 1j * grid.kx()[:, None] * coef


def advect(u: Field, w: Field, phi: Field, dealias: bool = True) -> Field:
    """Conservative advection div(u phi): spectral in x, face fluxes in z.

    Wall faces carry no flux (w = 0 there), so constants are annihilated
    exactly when (u, w) is discretely divergence-free.
    """
    if u.stag != CENTER or phi.stag != CENTER or w.stag != ZFACE:
        raise GridError("advect expects u, phi at centers and w at z-faces")
    grid = phi.grid

    ddx_hat = _masked_ddx_hat(u.data * phi.data, grid, dealias)
    out = inverse_x(SpectralField(grid, ddx_hat, CENTER)).data

    phi_face = 0.5 * (phi.data[:, :-1] + phi.data[:, 1:])
    flux = np.zeros((grid.nx, grid.nz + 1))
    flux[:, 1:-1] = w.data[:, 1:-1] * phi_face
    out += (flux[:, :-1] - flux[:, 1:]) / grid.dz[None, :]
    return Field(grid, out, CENTER)


def check_cfl(u: Field, w: Field, cfg: StepperConfig) -> float:
    """Local advective Courant number; raises CflError above the target."""
    grid = u.grid
    cour_x = cfg.dt * float(np.max(np.abs(u.data))) / grid.dx
    wmax_face = np.max(np.abs(w.data[:, 1:-1]), axis=0) if grid.nz > 1 else np.zeros(0)
    dz_face = np.minimum(grid.dz[:-1], grid.dz[1:])
    cour_z = cfg.dt * float(np.max(wmax_face / dz_face)) if wmax_face.size else 0.0
    cour = max(cour_x, cour_z)
    if cour > cfg.cfl:
        raise CflError(
            f"Courant number {cour:.3f} exceeds target {cfg.cfl} (dt = {cfg.dt})"
        )
    return cour


class TransportStepper:
    """IMEX stepper with cached implicit factorizations and AB2 history."""

    def __init__(self, grid: Grid, profile: CoefficientProfile, cfg: StepperConfig):
        self.grid = grid
        self.profile = profile
        self.cfg = cfg
        self._adv_prev: ComplexArray | None = None
        theta = 1.0 if cfg.scheme == SCHEME_EULER else 0.5
        self._theta = theta
        self._assemble(theta)

    def _assemble(self, theta: float) -> None:
        grid, profile, dt = self.grid, self.profile, self.cfg.dt
        nz = grid.nz
        k = grid.kx()
        Dc, Df = profile.D_center, profile.D_face
        dz, dzc = grid.dz, grid.dzc

        # Diffusion operator L phi = -k^2 D phi + (q_top - q_bot)/dz with
        # Dirichlet wall fluxes through half cells.
        a_all = Df / dzc                      # (nz+1,) conductances incl. walls
        self._Ldiag = -(k[:, None] ** 2) * Dc[None, :] - (a_all[:-1] + a_all[1:]) / dz
        self._Loff_lo = a_all[1:-1] / dz[1:]   # couples phi_{i-1} into cell i
        self._Loff_up = a_all[1:-1] / dz[:-1]  # couples phi_{i+1} into cell i

        diag = 1.0 / dt - theta * self._Ldiag
        lower = np.broadcast_to(-theta * self._Loff_lo, (k.size, nz - 1)).copy()
        upper = np.broadcast_to(-theta * self._Loff_up, (k.size, nz - 1)).copy()

        # Prefactored Thomas sweep (matrix fixed for the whole run).
        beta = np.empty((k.size, nz))
        gamma = np.empty((k.size, nz - 1))
        beta[:, 0] = diag[:, 0]
        for i in range(1, nz):
            gamma[:, i - 1] = upper[:, i - 1] / beta[:, i - 1]
            beta[:, i] = diag[:, i] - lower[:, i - 1] * gamma[:, i - 1]
        self._beta, self._gamma, self._lower = beta, gamma, lower

    def _solve(self, rhs: ComplexArray) -> ComplexArray:
        nz = self.grid.nz
        y = np.empty_like(rhs)
        y[:, 0] = rhs[:, 0] / self._beta[:, 0]
        for i in range(1, nz):
            y[:, i] = (rhs[:, i] - self._lower[:, i - 1] * y[:, i - 1]) / self._beta[:, i]
        x = np.empty_like(y)
        x[:, -1] = y[:, -1]
        for i in range(nz - 2, -1, -1):
            x[:, i] = y[:, i] - self._gamma[:, i] * x[:, i + 1]
        return x

    def _apply_L(self, phi_hat: ComplexArray) -> ComplexArray:
        out = self._Ldiag * phi_hat
        out[:, 1:] += self._Loff_lo * phi_hat[:, :-1]
        out[:, :-1] += self._Loff_up * phi_hat[:, 1:]
        return out

    def step(self, phi: Field, vel: tuple[Field, Field], t: float) -> Field:
        """Advance phi by one dt from time t; raises CflError when too fast."""
        cfg = self.cfg
        u, w = vel
        check_cfl(u, w, cfg)
        if not np.all(np.isfinite(phi.data)):
            raise ValueError("non-finite concentration entering the stepper")

        grid = self.grid
        adv = forward_x(advect(u, w, phi, dealias=cfg.dealias)).coef
        phi_hat = forward_x(phi).coef
        if grid.nx % 2 == 0:
            phi_hat[-1] = 0.0
            adv[-1] = 0.0

        if cfg.scheme == SCHEME_EULER:
            rhs = phi_hat / cfg.dt - adv
            if cfg.source is not None:
                rhs += np.fft.rfft(cfg.source(grid, t + cfg.dt), axis=0) / grid.nx
        else:
            if self._adv_prev is None:
                adv_term = adv  # Euler bootstrap of the AB2 history
            else:
                adv_term = 1.5 * adv - 0.5 * self._adv_prev
            rhs = phi_hat / cfg.dt + 0.5 * self._apply_L(phi_hat) - adv_term
            if cfg.source is not None:
                s = 0.5 * (cfg.source(grid, t) + cfg.source(grid, t + cfg.dt))
                rhs += np.fft.rfft(s, axis=0) / grid.nx
        self._adv_prev = adv

        new_hat = self._solve(rhs)
        return inverse_x(SpectralField(grid, new_hat, CENTER))


def step(state, vel: tuple[Field, Field], profile: CoefficientProfile,
         cfg: StepperConfig):
    """Single transport step of a State (bootstraps without AB2 history).

    Only phi and t advance; pressure and velocity in the returned State are
    the (now stale) inputs -- the run loop refreshes them each step.
    """
    from .simulate import State

    stepper = TransportStepper(state.phi.grid, profile, cfg)
    phi_new = stepper.step(state.phi, vel, state.t)
    return State(t=state.t + cfg.dt, phi=phi_new, P=state.P, u=state.u,
                 w=state.w, psi=state.psi)
