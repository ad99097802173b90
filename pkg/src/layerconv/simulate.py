"""Coupled runs: quasi-static Darcy balance + concentration transport.

Velocity is algebraically slaved to the concentration through the pressure
solve, so every step re-solves pressure from the current phi before advecting.
Admissible initial data keeps the flux D*dphi/dz continuous by construction
(zero slope at every interface), which places phi0 and its x-derivatives in
the natural second-order space of the problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .coeffs import DIFFUSE, SHARP, CoefficientProfile, LayerStack, diffuse_profile, sharp_profile
from .elliptic import recover_velocity, solve_pressure
from .grid import (
    CENTER,
    DomainSpec,
    Field,
    FloatArray,
    Grid,
    GridError,
    build_grid,
    dealias,
)
from .transport import StepperConfig, TransportStepper


class SimulationError(RuntimeError):
    """Run aborted; carries the last healthy snapshot for diagnosis."""

    def __init__(self, message: str, state: "State | None" = None):
        super().__init__(message)
        self.state = state


@dataclass
class State:
    """One instant of a model run."""

    t: float
    phi: Field   # centers
    P: Field     # centers, mean-zero gauge on the x-mean
    u: Field     # centers
    w: Field     # z-faces, zero on walls
    psi: Field | None = None  # optional z-face streamfunction cache


@dataclass
class InitialSpec:
    """Initial concentration family selector."""

    kind: str = "separable"
    amplitude: float = 0.5
    x_mode: int = 1
    modes: tuple[tuple[int, float], ...] = ()  # custom-modes: (x mode, amplitude)

    def __post_init__(self) -> None:
        if self.kind not in ("separable", "custom-modes"):
            raise ValueError(f"unknown initial data kind {self.kind!r}")


@dataclass
class RunConfig:
    domain: DomainSpec
    stack: LayerStack
    model: str                      # "sharp" or "diffuse"
    nx: int
    nz_per_layer: int
    T_final: float
    stepper: StepperConfig
    eps: float | None = None        # diffuse transition half-width
    initial: InitialSpec = field(default_factory=InitialSpec)
    snapshots: int = 20

    def __post_init__(self) -> None:
        if self.model not in (SHARP, DIFFUSE):
            raise ValueError(f"model must be 'sharp' or 'diffuse', got {self.model!r}")
        if self.model == DIFFUSE and self.eps is None:
            raise ValueError("a diffuse run needs eps")
        if self.T_final <= 0.0:
            raise ValueError("T_final must be positive")
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot interval")


def vertical_shape(domain: DomainSpec) -> tuple[np.poly1d, np.poly1d]:
    """Smooth g(z) = sin(pi z / H) * q(z) with g(0) = g(-H) = 0 and g'(z_j) = 0.

    q is the lowest-degree polynomial correction (q = 1 + sum a_i z^i) making
    the slope vanish at every interface; with one interface at the midplane
    the sine alone already satisfies this and q == 1. Returns (q, q').
    """
    H = domain.H
    zs = np.asarray(domain.interfaces)
    m = zs.size
    s = np.sin(np.pi * zs / H)
    c = (np.pi / H) * np.cos(np.pi * zs / H)
    # condition at z_j: c*q + s*q' = 0 with q = 1 + sum_i a_i z^i
    A = np.empty((m, m))
    for i in range(1, m + 1):
        A[:, i - 1] = c * zs**i + s * i * zs ** (i - 1)
    try:
        a = np.linalg.solve(A, -c)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"degenerate interface layout for separable data: {exc}") from exc
    q = np.poly1d(np.concatenate((a[::-1], [1.0])))
    return q, q.deriv()


def initial_data(kind: str, params: InitialSpec, grid: Grid) -> Field:
    """Admissible initial concentration on cell centers."""
    if kind != params.kind:
        params = replace(params, kind=kind)
    domain = grid.domain
    q, _ = vertical_shape(domain)
    g = np.sin(np.pi * grid.z_centers / domain.H) * q(grid.z_centers)
    for zw in (0.0, -domain.H):
        if abs(np.sin(np.pi * zw / domain.H) * q(zw)) > 1e-12:
            raise ValueError("vertical shape does not vanish at the walls")

    x = grid.x
    if params.kind == "separable":
        f = params.amplitude * np.cos(2.0 * np.pi * params.x_mode * x / domain.L)
    else:
        if not params.modes:
            raise ValueError("custom-modes initial data needs a non-empty mode list")
        f = np.zeros_like(x)
        for n, amp in params.modes:
            f = f + amp * np.cos(2.0 * np.pi * n * x / domain.L)
    phi0 = Field(grid, f[:, None] * g[None, :], CENTER)
    # Band-limit once so products stay alias-free for the whole run.
    return dealias(phi0)


def build_run_grid(config: RunConfig, extra_eps: tuple[float, ...] = ()) -> Grid:
    eps: tuple[float, ...] = tuple(extra_eps)
    if config.model == DIFFUSE and config.eps is not None:
        eps = tuple(sorted(set(eps) | {float(config.eps)}, reverse=True))
    return build_grid(config.domain, config.nx, config.nz_per_layer, eps=eps or None)


def build_profile(config: RunConfig, grid: Grid) -> CoefficientProfile:
    if config.model == SHARP:
        return sharp_profile(config.stack, grid)
    return diffuse_profile(config.stack, grid, float(config.eps))


def balanced_state(t: float, phi: Field, profile: CoefficientProfile) -> State:
    """State with pressure/velocity re-solved from the given concentration."""
    sol = solve_pressure(profile, phi)
    u, w = recover_velocity(sol)
    return State(t=t, phi=phi, P=sol.P, u=u, w=w)


def run(config: RunConfig, grid: Grid | None = None,
        profile: CoefficientProfile | None = None) -> list[State]:
    """Advance one model run, returning snapshots at the configured cadence.

    A prebuilt grid (and matching profile) may be supplied so that sharp and
    diffuse runs of one comparison share the identical mesh and time axis.
    """
    if grid is None:
        grid = build_run_grid(config)
    if profile is None:
        profile = build_profile(config, grid)

    dt = config.stepper.dt
    nsteps = int(round(config.T_final / dt))
    if nsteps < 1 or abs(nsteps * dt - config.T_final) > 1e-9 * max(config.T_final, 1.0):
        raise ValueError(
            f"T_final = {config.T_final} is not an integer number of steps of dt = {dt}"
        )
    snap_steps = sorted({int(round(j * nsteps / config.snapshots))
                         for j in range(config.snapshots + 1)})

    phi = initial_data(config.initial.kind, config.initial, grid)
    state = balanced_state(0.0, phi, profile)
    snapshots: list[State] = []
    if 0 in snap_steps:
        snapshots.append(state)

    stepper = TransportStepper(grid, profile, config.stepper)
    for i in range(1, nsteps + 1):
        phi = stepper.step(state.phi, (state.u, state.w), state.t)
        state = balanced_state(i * dt, phi, profile)
        if i in snap_steps:
            if not (np.all(np.isfinite(state.phi.data)) and np.all(np.isfinite(state.P.data))):
                last = snapshots[-1] if snapshots else None
                raise SimulationError(f"non-finite fields at t = {state.t}", state=last)
            snapshots.append(state)
    return snapshots
