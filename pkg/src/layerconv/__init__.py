"""Convection in layered porous media: sharp and diffuse material interfaces.

A pseudo-spectral (Fourier in x) x conservative finite-volume (z) solver for
the Darcy-Boussinesq system with piecewise-constant or ramped permeability and
diffusivity, plus the verification harness that measures how the diffuse model
approaches the sharp one as the transition width shrinks.
"""

from .coeffs import CoefficientProfile, LayerStack, diffuse_profile, sharp_profile
from .diagnostics import (
    NearFarSplit,
    TraceSet,
    approx_streamfunction,
    interface_traces,
    jump_residuals,
    near_far_split,
)
from .elliptic import (
    PressureSolution,
    divergence,
    recover_velocity,
    solve_pressure,
    solve_streamfunction,
    velocity_from_streamfunction,
)
from .grid import (
    CENTER,
    ZFACE,
    DomainSpec,
    Field,
    Grid,
    GridError,
    SpectralField,
    build_grid,
    ddx,
    forward_x,
    inverse_x,
)
from .harness import (
    ConvergenceTable,
    RateFit,
    SweepConfig,
    SweepResult,
    fit_rate,
    jump_refinement_study,
    load_snapshot,
    mms_verify,
    run_sweep,
    save_snapshot,
    write_table,
)
from .norms import NormReport, embedding_ratio, h_alpha_norm, v_norm, w_norm
from .simulate import InitialSpec, RunConfig, SimulationError, State, initial_data, run
from .transport import CflError, StepperConfig, TransportStepper, advect, step

__version__ = "0.1.0"
