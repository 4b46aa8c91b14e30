import numpy as np
import pytest

from phi4.grids import SpectralField, TorusGrid, hermitize


def random_field(grid: TorusGrid, seed: int, decay: float = 0.0,
                 scale: float = 1.0) -> SpectralField:
    """Hermitian field with coefficient magnitudes ~ (1 + |k|)^-decay."""
    rng = np.random.default_rng(seed)
    mag = (1.0 + np.sqrt(grid.k_sq())) ** (-decay)
    c = (rng.normal(size=grid.coeff_shape)
         + 1j * rng.normal(size=grid.coeff_shape)) * mag
    return hermitize(SpectralField(grid, scale * c))


@pytest.fixture
def grid2d() -> TorusGrid:
    return TorusGrid(2, 8)


@pytest.fixture
def grid1d() -> TorusGrid:
    return TorusGrid(1, 16)
