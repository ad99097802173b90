import numpy as np
import pytest

from layerconv import CENTER, DomainSpec, Field, GridError, build_grid, forward_x, inverse_x
from layerconv.grid import ZFACE, dealias, dealias_mode_cutoff, ddx, mirror_x


def test_faces_align_to_interface(default_domain):
    g = build_grid(default_domain, nx=16, nz_per_layer=32)
    hits = np.where(np.isclose(g.z_faces, -0.5, atol=1e-14))[0]
    assert hits.size == 1
    assert g.z_faces[0] == 0.0
    assert g.z_faces[-1] == -1.0


def test_band_faces_and_cell_count(default_domain):
    eps = 1 / 32
    g = build_grid(default_domain, nx=16, nz_per_layer=32, eps=eps)
    for edge in (-0.5 - eps, -0.5 + eps):
        assert np.min(np.abs(g.z_faces - edge)) < 1e-14
    in_band = np.sum(np.abs(g.z_centers + 0.5) < eps)
    assert in_band >= 8


def test_multi_eps_alignment(default_domain):
    eps_list = (1 / 16, 1 / 32, 1 / 64)
    g = build_grid(default_domain, nx=16, nz_per_layer=32, eps=eps_list)
    for e in eps_list:
        for edge in (-0.5 - e, -0.5 + e):
            assert np.min(np.abs(g.z_faces - edge)) < 1e-14
        assert np.sum(np.abs(g.z_centers + 0.5) < e) >= 8


def test_grid_partition_invariants(default_domain):
    g = build_grid(default_domain, nx=32, nz_per_layer=16, eps=1 / 64)
    assert np.all(np.diff(g.z_faces) < 0)
    assert abs(g.dz.sum() - g.domain.H) <= 1e-14 * g.domain.H
    assert np.allclose(g.z_centers, 0.5 * (g.z_faces[:-1] + g.z_faces[1:]), atol=0)
    assert g.dz.min() > 0


def test_eps_too_large_rejected():
    dom = DomainSpec(L=1.0, H=1.0, interfaces=(-1 / 3, -2 / 3))
    with pytest.raises(GridError):
        build_grid(dom, nx=16, nz_per_layer=16, eps=0.2)


def test_bad_resolution_rejected(default_domain):
    with pytest.raises(GridError):
        build_grid(default_domain, nx=24, nz_per_layer=16)  # not a power of two
    with pytest.raises(GridError):
        build_grid(default_domain, nx=16, nz_per_layer=4)


def test_interfaces_must_be_interior():
    with pytest.raises(GridError):
        DomainSpec(L=1.0, H=1.0, interfaces=(0.2,))
    with pytest.raises(GridError):
        DomainSpec(L=1.0, H=1.0, interfaces=(-0.3, -0.2))


def test_single_harmonic_two_modes(small_grid):
    g = small_grid
    gz = np.exp(g.z_centers)
    f = Field(g, np.cos(2 * np.pi * g.x / g.domain.L)[:, None] * gz[None, :], CENTER)
    spec = forward_x(f)
    assert np.allclose(spec.coef[1].real, gz / 2, atol=1e-14)
    others = np.delete(np.arange(spec.coef.shape[0]), 1)
    assert np.max(np.abs(spec.coef[others])) < 1e-14


def test_constant_field_only_mode_zero(small_grid):
    f = Field(small_grid, np.full((16, small_grid.nz), 2.5), CENTER)
    spec = forward_x(f)
    assert np.allclose(spec.coef[0].real, 2.5, atol=1e-14)
    assert np.max(np.abs(spec.coef[1:])) < 1e-13


@pytest.mark.parametrize("nx", [16, 64, 256])
def test_roundtrip_and_parseval(default_domain, nx, rng):
    g = build_grid(default_domain, nx=nx, nz_per_layer=16)
    f = Field(g, rng.standard_normal((nx, g.nz)), CENTER)
    back = inverse_x(forward_x(f))
    scale = np.max(np.abs(f.data))
    assert np.max(np.abs(back.data - f.data)) <= 1e-13 * scale

    # Parseval against the direct physical-space summation oracle.
    spec = forward_x(f)
    w = np.full(nx // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    spectral = np.sum(w[:, None] * np.abs(spec.coef) ** 2)
    direct = np.sum(f.data**2) / nx
    assert abs(spectral - direct) <= 1e-12 * direct


def test_shape_mismatch_rejected(small_grid):
    with pytest.raises(GridError):
        Field(small_grid, np.zeros((16, small_grid.nz + 3)), CENTER)
    with pytest.raises(GridError):
        Field(small_grid, np.zeros((16, small_grid.nz)), ZFACE)


def test_ddx_single_mode(small_grid):
    g = small_grid
    k = 2 * np.pi / g.domain.L
    f = Field(g, np.sin(k * g.x)[:, None] * np.ones((1, g.nz)), CENTER)
    want = k * np.cos(k * g.x)[:, None] * np.ones((1, g.nz))
    assert np.max(np.abs(ddx(f).data - want)) < 1e-12 * k


def test_dealias_mask(small_grid):
    g = small_grid
    cut = dealias_mode_cutoff(g.nx)
    n_hi = cut + 1
    f = Field(g, np.cos(2 * np.pi * n_hi * g.x / g.domain.L)[:, None]
              * np.ones((1, g.nz)), CENTER)
    assert np.max(np.abs(dealias(f).data)) < 1e-13


def test_mirror_involution(small_grid, rng):
    f = Field(small_grid, rng.standard_normal((16, small_grid.nz)), CENTER)
    assert np.array_equal(mirror_x(mirror_x(f)).data, f.data)
    sym = Field(small_grid, np.cos(2 * np.pi * small_grid.x)[:, None]
                * np.ones((1, small_grid.nz)), CENTER)
    assert np.max(np.abs(mirror_x(sym).data - sym.data)) < 1e-14
