import numpy as np
import pytest

from layerconv import DomainSpec, LayerStack, build_grid


def glued_mode_oracle(kx, K1, K2, H, z1):
    """Independent closed form for the two-layer pressure mode driven by
    phi_hat(z) = sin(pi z / H).

    Hyperbolic bases anchored at each wall absorb the wall-flux conditions,
    leaving a 2x2 interface system: a different derivation path from any
    code under test.
    """
    mz = np.pi / H
    den = kx**2 + mz**2
    pp = lambda z: mz * np.cos(mz * z) / den
    dpp = lambda z: -(mz**2) * np.sin(mz * z) / den
    phih = lambda z: np.sin(mz * z)
    c = dpp(z1) + phih(z1)
    s1, c1 = np.sinh(kx * z1), np.cosh(kx * z1)
    s2, c2 = np.sinh(kx * (z1 + H)), np.cosh(kx * (z1 + H))
    a1 = (K2 - K1) * c * c2 / (kx * (K1 * s1 * c2 - K2 * c1 * s2))
    a2 = a1 * c1 / c2

    def P(z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= z1, a1 * np.cosh(kx * z) + pp(z),
                        a2 * np.cosh(kx * (z + H)) + pp(z))

    def dPdz(z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= z1, a1 * kx * np.sinh(kx * z) + dpp(z),
                        a2 * kx * np.sinh(kx * (z + H)) + dpp(z))

    return P, dPdz


@pytest.fixture(scope="session")
def default_domain():
    return DomainSpec(L=1.0, H=1.0, interfaces=(-0.5,))


@pytest.fixture(scope="session")
def default_stack():
    return LayerStack(K=(1.0, 0.2), D=(1.0, 0.5))


@pytest.fixture(scope="session")
def small_grid(default_domain):
    return build_grid(default_domain, nx=16, nz_per_layer=16)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
