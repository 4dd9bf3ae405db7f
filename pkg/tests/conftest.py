import numpy as np
import pytest

from needlets import build_frame, make_manifold


@pytest.fixture(scope="session")
def circle():
    return make_manifold("circle")


@pytest.fixture(scope="session")
def torus():
    return make_manifold("torus2")


@pytest.fixture(scope="session")
def sphere():
    return make_manifold("sphere2")


@pytest.fixture(scope="session")
def circle_frame(circle):
    return build_frame(circle, 2.0, 4, seed=7)


@pytest.fixture(scope="session")
def circle_frame_deep(circle):
    return build_frame(circle, 2.0, 7, seed=7)


@pytest.fixture(scope="session")
def sphere_frame(sphere):
    return build_frame(sphere, 2.0, 1, seed=7)


def decay_function(M, alpha, omega, seed):
    """Fourier decay |c| = (1 + sqrt(lambda))^-(alpha + 1/2) with random signs."""
    from needlets import BandlimitedFunction, eigen_basis

    basis = eigen_basis(M, omega)
    rng = np.random.default_rng(seed)
    c = np.zeros(len(basis))
    freqs = np.sqrt(basis.eigenvalues)
    c[1:] = (1.0 + freqs[1:]) ** (-(alpha + 0.5)) * rng.choice([-1.0, 1.0], size=len(basis) - 1)
    return BandlimitedFunction(basis, c)
