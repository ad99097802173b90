import numpy as np
import pytest

from layerconv import (
    CENTER,
    DomainSpec,
    Field,
    GridError,
    LayerStack,
    build_grid,
    divergence,
    recover_velocity,
    solve_pressure,
    solve_streamfunction,
    velocity_from_streamfunction,
)
from layerconv.coeffs import sharp_profile
from layerconv.elliptic import neg_laplacian_interior, weak_form_energy
from layerconv.grid import SpectralField, ZFACE, forward_x, inverse_x
from layerconv.norms import l2, linf


from conftest import glued_mode_oracle


def _mode_phi(grid):
    kx = 2 * np.pi / grid.domain.L
    return Field(grid, np.cos(kx * grid.x)[:, None]
                 * np.sin(np.pi * grid.z_centers / grid.domain.H)[None, :], CENTER)


def test_zero_data_zero_solution(default_domain, default_stack):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    sol = solve_pressure(sharp_profile(default_stack, g), Field.zeros(g))
    assert linf(sol.P) == 0.0
    assert linf(sol.u) == 0.0
    assert linf(sol.w) == 0.0


def test_hydrostatic_balance(default_domain):
    # x-independent phi with constant K: no flow, dP/dz = -phi discretely.
    g = build_grid(default_domain, nx=16, nz_per_layer=32)
    prof = sharp_profile(LayerStack(K=(1.5, 1.5), D=(1.0, 1.0)), g)
    gz = np.sin(np.pi * g.z_centers)
    phi = Field(g, np.tile(gz, (16, 1)), CENTER)
    sol = solve_pressure(prof, phi)
    assert linf(sol.u) < 1e-14
    assert linf(sol.w) < 1e-14
    dPdz = (sol.P.data[0, :-1] - sol.P.data[0, 1:]) / g.dzc[1:-1]
    phi_face = 0.5 * (gz[:-1] + gz[1:])
    assert np.max(np.abs(dPdz + phi_face)) < 1e-12


def test_two_layer_mode_vs_glued_oracle(default_domain):
    stack = LayerStack(K=(2.0, 1.0), D=(1.0, 1.0))
    kx = 2 * np.pi
    Pref, _ = glued_mode_oracle(kx, 2.0, 1.0, 1.0, -0.5)
    errs = []
    for nzl in (32, 64):
        g = build_grid(default_domain, nx=8, nz_per_layer=nzl)
        sol = solve_pressure(sharp_profile(stack, g), _mode_phi(g))
        P_exact = np.cos(kx * g.x)[:, None] * Pref(g.z_centers)[None, :]
        errs.append(l2(Field(g, sol.P.data - P_exact, CENTER)))
    assert errs[1] < 1e-4
    order = np.log2(errs[0] / errs[1])
    assert order > 1.9

    # Second oracle: the same problem on a dense grid agrees with the closed
    # form far more tightly, confirming both independently.
    g_fine = build_grid(default_domain, nx=8, nz_per_layer=8192)
    sol_f = solve_pressure(sharp_profile(stack, g_fine), _mode_phi(g_fine))
    P_exact_f = np.cos(kx * g_fine.x)[:, None] * Pref(g_fine.z_centers)[None, :]
    rel = l2(Field(g_fine, sol_f.P.data - P_exact_f, CENTER)) / l2(sol_f.P)
    assert rel < 1e-6


def test_divergence_free_identity(default_domain, default_stack, rng):
    g = build_grid(default_domain, nx=32, nz_per_layer=16)
    data = rng.standard_normal((32, g.nz))
    phi = Field(g, data, CENTER)
    sol = solve_pressure(sharp_profile(default_stack, g), phi)
    u, w = recover_velocity(sol)
    div = divergence(u, w)
    scale = max(linf(u), linf(w)) / min(g.dx, float(g.dz.min()))
    assert linf(div) <= 1e-10 * scale
    assert np.all(w.data[:, 0] == 0.0)
    assert np.all(w.data[:, -1] == 0.0)


def test_weak_form_energy_identity(default_domain, default_stack, rng):
    g = build_grid(default_domain, nx=16, nz_per_layer=24)
    phi = Field(g, rng.standard_normal((16, g.nz)), CENTER)
    prof = sharp_profile(default_stack, g)
    sol = solve_pressure(prof, phi)
    lhs, rhs = weak_form_energy(prof, sol, phi)
    assert lhs > 0
    assert abs(lhs - rhs) <= 1e-10 * lhs


def test_solver_residual_per_cell(default_domain, default_stack, rng):
    # The discrete equation k^2 K P dz + w_top - w_bot = 0 holds to roundoff.
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    prof = sharp_profile(default_stack, g)
    phi = Field(g, rng.standard_normal((16, g.nz)), CENTER)
    sol = solve_pressure(prof, phi)
    k = g.kx()
    P_hat = forward_x(sol.P).coef
    w_hat = forward_x(sol.w).coef
    resid = (k[:, None] ** 2) * prof.K_center * P_hat * g.dz \
        + w_hat[:, :-1] - w_hat[:, 1:]
    assert np.max(np.abs(resid)) < 1e-12 * max(1.0, np.max(np.abs(P_hat)))


def test_stability_constant_under_refinement(default_domain, default_stack):
    # || (u, w) ||_2 <= C || phi ||_2 with C grid-stable within 10%.
    cs = []
    for nzl in (16, 32):
        g = build_grid(default_domain, nx=32, nz_per_layer=nzl)
        phi = _mode_phi(g)
        sol = solve_pressure(sharp_profile(default_stack, g), phi)
        wc = 0.5 * (sol.w.data[:, :-1] + sol.w.data[:, 1:])
        vel = np.sqrt(np.sum((sol.u.data**2 + wc**2) * g.dz[None, :]) * g.dx)
        cs.append(vel / l2(phi))
    assert abs(cs[1] - cs[0]) <= 0.1 * cs[0]


def test_streamfunction_eigenfunction(default_domain):
    g = build_grid(default_domain, nx=16, nz_per_layer=64)
    kx = 2 * np.pi
    m = 2
    lam = kx**2 + (m * np.pi) ** 2
    rhs = Field(g, lam * np.cos(kx * g.x)[:, None]
                * np.sin(m * np.pi * g.z_centers)[None, :], CENTER)
    psi = solve_streamfunction(rhs)
    want = np.cos(kx * g.x)[:, None] * np.sin(m * np.pi * g.z_faces)[None, :]
    err = np.max(np.abs(psi.data - want))
    assert err < 5e-3  # second-order in the z spacing
    assert np.all(psi.data[:, 0] == 0.0)
    assert np.all(psi.data[:, -1] == 0.0)


def test_streamfunction_zero_rhs(default_domain):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    psi = solve_streamfunction(Field.zeros(g))
    assert linf(psi) == 0.0


def test_streamfunction_roundtrip(default_domain, rng):
    g = build_grid(default_domain, nx=16, nz_per_layer=20)
    rhs = Field(g, rng.standard_normal((16, g.nz)), CENTER)
    psi = solve_streamfunction(rhs)
    back = neg_laplacian_interior(psi)
    spec = forward_x(rhs)
    spec.coef[-1] = 0.0  # the solver drops the Nyquist mode
    r = inverse_x(SpectralField(g, spec.coef, CENTER)).data
    r_face = 0.5 * (r[:, :-1] + r[:, 1:])
    assert np.max(np.abs(back - r_face)) <= 1e-10 * np.max(np.abs(r_face))


def test_perp_gradient_staggering(default_domain, rng):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    psi = solve_streamfunction(Field(g, rng.standard_normal((16, g.nz)), CENTER))
    u, w = velocity_from_streamfunction(psi)
    assert u.stag == CENTER
    assert w.stag == ZFACE
    assert np.all(w.data[:, 0] == 0.0)  # psi vanishes on the walls


def test_staggering_mismatch_rejected(default_domain, default_stack):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    u = Field.zeros(g, CENTER)
    with pytest.raises(GridError):
        divergence(u, u)
    wrong = Field.zeros(g, ZFACE)
    with pytest.raises(GridError):
        solve_pressure(sharp_profile(default_stack, g), wrong)


def test_nonfinite_rejected(default_domain, default_stack):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    bad = Field.zeros(g)
    bad.data[0, 0] = np.nan
    with pytest.raises(ValueError):
        solve_pressure(sharp_profile(default_stack, g), bad)
