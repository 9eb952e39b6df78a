import numpy as np
import pytest

from robin_eit import MediumConfig, assemble_operator, decompose
from robin_eit.forward import BoundaryGrid, KernelSpec
from robin_eit.imaging import ImagingGrid


def random_band_limited(rng, n_max):
    """Fourier coefficients (modes -n_max..n_max) of a random real impedance."""
    pos = rng.standard_normal(n_max) + 1j * rng.standard_normal(n_max)
    f = np.empty(2 * n_max + 1, dtype=complex)
    f[n_max] = rng.standard_normal()
    f[n_max + 1:] = pos
    f[:n_max] = np.conj(pos[::-1])
    return f


@pytest.fixture(scope="session")
def reference_medium():
    return MediumConfig(rho=0.4, sigma_out=1.0, sigma_in=1.0, gamma=1.0)


@pytest.fixture(scope="session")
def reference_operator(reference_medium):
    return assemble_operator(reference_medium, BoundaryGrid(32), KernelSpec(10))


@pytest.fixture(scope="session")
def reference_system(reference_operator):
    return decompose(reference_operator)


@pytest.fixture(scope="session")
def coarse_grid():
    return ImagingGrid(41)
