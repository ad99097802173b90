import numpy as np
import pytest

from layerconv import (
    CENTER,
    DomainSpec,
    Field,
    InitialSpec,
    LayerStack,
    RunConfig,
    StepperConfig,
    build_grid,
    initial_data,
    run,
    solve_pressure,
)
from layerconv.coeffs import sharp_profile
from layerconv.grid import mirror_x
from layerconv.norms import l2, linf, w_norm
from layerconv.simulate import vertical_shape


def _cfg(domain, stack, **over):
    base = dict(domain=domain, stack=stack, model="sharp", nx=32, nz_per_layer=16,
                T_final=0.02, stepper=StepperConfig(dt=1e-3),
                initial=InitialSpec(amplitude=0.5), snapshots=4)
    base.update(over)
    return RunConfig(**base)


def test_vertical_shape_zero_slope_at_interfaces(default_domain):
    q, dq = vertical_shape(default_domain)
    H = default_domain.H
    for zj in default_domain.interfaces:
        slope = (np.pi / H) * np.cos(np.pi * zj / H) * q(zj) \
            + np.sin(np.pi * zj / H) * dq(zj)
        assert abs(slope) <= 1e-12


def test_vertical_shape_off_midplane():
    dom = DomainSpec(L=1.0, H=1.0, interfaces=(-0.3,))
    q, dq = vertical_shape(dom)
    slope = np.pi * np.cos(-0.3 * np.pi) * q(-0.3) + np.sin(-0.3 * np.pi) * dq(-0.3)
    assert abs(slope) <= 1e-12
    assert abs(q(-0.3)) > 1e-6  # the correction must not kill the profile


def test_zero_amplitude_zero_field(default_domain):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    phi0 = initial_data("separable", InitialSpec(amplitude=0.0), g)
    assert linf(phi0) == 0.0


def test_initial_w_norm_refinement_stable(default_domain, default_stack):
    vals = []
    for nzl in (32, 64):
        g = build_grid(default_domain, nx=32, nz_per_layer=nzl)
        phi0 = initial_data("separable", InitialSpec(amplitude=0.5), g)
        vals.append(w_norm(phi0, sharp_profile(default_stack, g)))
    assert np.isfinite(vals).all()
    assert abs(vals[1] - vals[0]) <= 0.05 * vals[0]


def test_zero_initial_run_stays_zero(default_domain, default_stack):
    snaps = run(_cfg(default_domain, default_stack,
                     initial=InitialSpec(amplitude=0.0)))
    for s in snaps:
        assert linf(s.phi) == 0.0
        assert linf(s.u) == 0.0


def test_x_independent_initial_stays_hydrostatic(default_domain, default_stack):
    cfg = _cfg(default_domain, default_stack,
               initial=InitialSpec(kind="custom-modes", modes=((0, 1.0),)))
    snaps = run(cfg)
    for s in snaps:
        assert linf(s.u) < 1e-13
        assert np.max(np.abs(s.w.data)) < 1e-13
        spread = np.max(np.abs(s.phi.data - s.phi.data[0][None, :]))
        assert spread < 1e-13  # stays one-dimensional diffusion


def test_snapshot_times_match_across_models(default_domain, default_stack):
    sharp = run(_cfg(default_domain, default_stack))
    g = build_grid(default_domain, nx=32, nz_per_layer=16, eps=1 / 16)
    diff = run(_cfg(default_domain, default_stack, model="diffuse", eps=1 / 16),
               grid=g)
    assert [s.t for s in sharp] == [d.t for d in diff]


def test_mirror_symmetry_persists(default_domain, default_stack):
    for model, eps in (("sharp", None), ("diffuse", 1 / 16)):
        snaps = run(_cfg(default_domain, default_stack, model=model, eps=eps,
                         T_final=0.03, snapshots=3))
        sup0 = linf(snaps[0].phi)
        for s in snaps:
            asym = np.max(np.abs(s.phi.data - mirror_x(s.phi).data))
            assert asym <= 1e-10 * sup0


def test_quasistatic_consistency(default_domain, default_stack):
    snaps = run(_cfg(default_domain, default_stack))
    final = snaps[-1]
    prof = sharp_profile(default_stack, final.phi.grid)
    again = solve_pressure(prof, final.phi)
    assert np.max(np.abs(again.P.data - final.P.data)) <= 1e-12 * max(linf(final.P), 1e-30)


def test_sup_bound_uniform(default_domain, default_stack):
    for model, eps in (("sharp", None), ("diffuse", 1 / 32)):
        snaps = run(_cfg(default_domain, default_stack, model=model, eps=eps,
                         T_final=0.05, snapshots=5, nz_per_layer=24))
        sup0 = linf(snaps[0].phi)
        assert max(linf(s.phi) for s in snaps) <= sup0 * (1 + 1e-3)


def test_run_config_validation(default_domain, default_stack):
    with pytest.raises(ValueError):
        _cfg(default_domain, default_stack, model="diffuse", eps=None)
    with pytest.raises(ValueError):
        _cfg(default_domain, default_stack, T_final=-1.0)
    with pytest.raises(ValueError):
        run(_cfg(default_domain, default_stack, T_final=0.0215))  # not a dt multiple


def test_energy_monotone_coupled(default_domain, default_stack):
    snaps = run(_cfg(default_domain, default_stack, T_final=0.05, snapshots=10))
    norms = [l2(s.phi) for s in snaps]
    for a, b in zip(norms[:-1], norms[1:]):
        assert b <= a * (1 + 1e-10)
