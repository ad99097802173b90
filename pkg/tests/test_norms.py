import numpy as np
import pytest

from layerconv import CENTER, DomainSpec, Field, LayerStack, build_grid
from layerconv.coeffs import sharp_profile
from layerconv.norms import (
    compute_report,
    embedding_ratio,
    h1,
    h_alpha_norm,
    l2,
    linf,
    v_norm,
    w_norm,
)

EMBED_DOMAIN = DomainSpec(L=2 * np.pi, H=np.pi, interfaces=(-np.pi / 2,))


def _unit_profile(grid):
    return sharp_profile(LayerStack(K=(1.0, 1.0), D=(1.0, 1.0)), grid)


def test_zero_field_norms(default_domain, default_stack):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    z = Field.zeros(g)
    prof = sharp_profile(default_stack, g)
    assert v_norm(z, prof) == 0.0
    assert w_norm(z, prof) == 0.0
    assert l2(z) == 0.0


def test_v_norm_closed_form(default_domain):
    # D == 1, phi = sin(pi z / H): ||sqrt(D) grad phi||^2 = (pi/H)^2 L H / 2.
    g = build_grid(default_domain, nx=16, nz_per_layer=512)
    prof = _unit_profile(g)
    phi = Field(g, np.tile(np.sin(np.pi * g.z_centers), (16, 1)), CENTER)
    want = np.sqrt(np.pi**2 * 0.5)
    assert v_norm(phi, prof) == pytest.approx(want, rel=1e-5)


def test_v_norm_two_layer_refined_quadrature(default_domain, default_stack):
    # refined-grid quadrature oracle: same functional, much finer grid
    def value(nzl):
        g = build_grid(default_domain, nx=8, nz_per_layer=nzl)
        prof = sharp_profile(default_stack, g)
        phi = Field(g, np.cos(2 * np.pi * g.x)[:, None]
                    * (np.sin(np.pi * g.z_centers) ** 2)[None, :], CENTER)
        return v_norm(phi, prof)

    coarse, fine = value(2048), value(8192)
    assert abs(coarse - fine) <= 1e-6 * fine


def test_w_norm_single_mode_closed_form(default_domain):
    g = build_grid(default_domain, nx=16, nz_per_layer=1024)
    prof = _unit_profile(g)
    k = 2 * np.pi
    mt = np.pi
    phi = Field(g, np.cos(k * g.x)[:, None] * np.sin(mt * g.z_centers)[None, :], CENTER)
    quarter = 0.25  # L*H/4
    want2 = (k**2 + mt**2) * quarter \
        + k**2 * (1 + k**2 + mt**2) * quarter \
        + mt**2 * (1 + k**2 + mt**2) * quarter
    assert w_norm(phi, prof) == pytest.approx(np.sqrt(want2), rel=1e-5)


def test_w_norm_initial_family_stable(default_domain, default_stack):
    from layerconv import InitialSpec, initial_data

    vals = []
    for nzl in (48, 96):
        g = build_grid(default_domain, nx=16, nz_per_layer=nzl)
        phi0 = initial_data("separable", InitialSpec(amplitude=1.0), g)
        vals.append(w_norm(phi0, sharp_profile(default_stack, g)))
    assert abs(vals[1] - vals[0]) <= 0.05 * vals[0]


def test_h_alpha_constant():
    g = build_grid(EMBED_DOMAIN, nx=32, nz_per_layer=16)
    c = Field(g, np.full((32, g.nz), -1.7), CENTER)
    want = 1.7 * np.sqrt(g.domain.L * g.domain.H)
    for alpha in (0.0, 0.3, 0.75, 1.0):
        assert h_alpha_norm(c, alpha) == pytest.approx(want, rel=1e-13)


def test_h_alpha_single_mode_multiplier():
    g = build_grid(EMBED_DOMAIN, nx=64, nz_per_layer=32)
    f = Field(g, np.cos(g.x)[:, None] * np.cos(g.z_centers)[None, :], CENTER)
    for alpha in (0.25, 0.6, 1.0):
        ratio = h_alpha_norm(f, alpha) / h_alpha_norm(f, 0.0)
        assert ratio == pytest.approx(3.0 ** (alpha / 2), rel=1e-12)


def test_h_alpha_parseval_and_monotone(rng):
    g = build_grid(EMBED_DOMAIN, nx=32, nz_per_layer=24)
    f = Field(g, rng.standard_normal((32, g.nz)), CENTER)
    assert h_alpha_norm(f, 0.0) == pytest.approx(l2(f), rel=1e-12)
    alphas = (0.0, 0.25, 0.5, 0.75, 1.0)
    vals = [h_alpha_norm(f, a) for a in alphas]
    assert all(b >= a for a, b in zip(vals[:-1], vals[1:]))


def test_h_alpha_rejects_bad_alpha(small_grid):
    f = Field.zeros(small_grid)
    with pytest.raises(ValueError):
        h_alpha_norm(f, 1.5)
    with pytest.raises(ValueError):
        embedding_ratio(f, 0.3)


def test_embedding_single_mode_exact():
    g = build_grid(EMBED_DOMAIN, nx=64, nz_per_layer=32)
    n, m = 2, 3
    f = Field(g, np.cos(n * g.x)[:, None] * np.cos(m * g.z_centers)[None, :], CENTER)
    alpha = 0.75
    mult = (1.0 + n**2 + m**2) ** (alpha / 2)
    ha = h_alpha_norm(f, alpha)
    # one-mode identities: the norm is the multiplier times the L2 norm, the
    # x-derivative scales it by n, and both ratios follow from those two.
    assert ha == pytest.approx(mult * l2(f), rel=1e-12)
    iso, aniso = embedding_ratio(f, alpha)
    assert iso == pytest.approx(linf(f) / ha, rel=1e-12)
    assert aniso == pytest.approx(linf(f) / ((1 + n) * ha), rel=1e-12)


def _truncation_family(J, alpha, nx=256, nz=256):
    g = build_grid(EMBED_DOMAIN, nx=nx, nz_per_layer=nz // 2)
    N = 2**J
    n = np.arange(N + 1)[:, None]
    m = np.arange(N + 1)[None, :]
    uh = (1.0 + n**2 + m**2) ** (-(alpha + 1.0) / 2.0)
    cosx = np.cos(np.outer(g.x, np.arange(N + 1)))
    cosz = np.cos(np.outer(np.arange(N + 1), g.z_centers))
    return Field(g, cosx @ uh @ cosz, CENTER)


def test_truncation_family_trends():
    # The isotropic fractional norm fails to control the sup (ratio grows),
    # while the anisotropic one controls it uniformly (never exceeds its
    # first value).
    alpha = 0.75
    isos, anisos = [], []
    for J in range(3, 7):
        f = _truncation_family(J, alpha)
        iso, aniso = embedding_ratio(f, alpha)
        isos.append(iso)
        anisos.append(aniso)
    assert all(b > a for a, b in zip(isos[:-1], isos[1:]))
    assert max(anisos) == anisos[0]
    assert np.isfinite(anisos).all()


def test_boundary_layer_family_aniso_bounded():
    g = build_grid(EMBED_DOMAIN, nx=64, nz_per_layer=1024)
    z0 = -np.pi / 2
    first = None
    for eps in (1 / 8, 1 / 32, 1 / 128):
        prof = np.exp(-0.5 * ((g.z_centers - z0) / eps) ** 2)
        f = Field(g, np.cos(g.x)[:, None] * prof[None, :], CENTER)
        _, aniso = embedding_ratio(f, 0.75)
        if first is None:
            first = aniso
        assert aniso <= first * (1 + 1e-12)


def test_corpus_aniso_bounded(rng):
    g = build_grid(EMBED_DOMAIN, nx=64, nz_per_layer=64)
    fields = []
    for _ in range(20):  # random band-limited
        c = rng.standard_normal((9, 9))
        cosx = np.cos(np.outer(g.x, np.arange(9)))
        cosz = np.cos(np.outer(np.arange(9), g.z_centers))
        fields.append(cosx @ c @ cosz)
    for _ in range(15):  # layered tanh transitions
        zj = rng.uniform(-2.5, -0.6)
        wdt = rng.uniform(0.05, 0.3)
        fx = 1.0 + 0.5 * np.cos(g.x * rng.integers(1, 4))
        fields.append(np.tanh((g.z_centers - zj) / wdt)[None, :] * fx[:, None])
    for _ in range(15):  # spiky bumps
        x0 = rng.uniform(0, 2 * np.pi)
        z0 = rng.uniform(-2.5, -0.6)
        sx = rng.uniform(0.1, 0.5)
        fields.append(np.exp(-((g.x[:, None] - x0) ** 2 / sx**2
                               + (g.z_centers[None, :] - z0) ** 2 / sx**2)))
    for alpha in (0.6, 0.75):
        ratios = [embedding_ratio(Field(g, d, CENTER), alpha)[1] for d in fields]
        assert np.isfinite(ratios).all()
        assert max(ratios) <= 5 * np.median(ratios)


def test_norm_report_consistency(default_domain, default_stack, rng):
    g = build_grid(default_domain, nx=16, nz_per_layer=16)
    phi = Field(g, rng.standard_normal((16, g.nz)), CENTER)
    rep = compute_report(phi, sharp_profile(default_stack, g))
    assert rep.l2 <= rep.h1
    assert rep.linf == linf(phi)
    assert all(v >= 0 for v in (rep.l2, rep.h1, rep.linf, rep.v, rep.w))
    assert rep.h_alpha[0.6] <= rep.h_alpha[0.75] * (1 + 1e-12)
