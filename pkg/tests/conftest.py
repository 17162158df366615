import numpy as np
import pytest

from adialab import (
    RotatingModelParams,
    TimeGrid,
    build_eigenframe,
    propagate,
    rotating_hamiltonian,
)


def grid_for(t_end: float, dt: float) -> TimeGrid:
    return TimeGrid(0.0, dt, max(1, int(round(t_end / dt))))


@pytest.fixture(scope="session")
def slow_drive():
    """Adiabatic-regime rotating scenario: omega/omega0 = 0.01, theta = pi/4."""
    p = RotatingModelParams(1.0, 0.01, np.pi / 4)
    return p, rotating_hamiltonian(p)


@pytest.fixture(scope="session")
def fast_drive():
    """Moderate-drive scenario used by the propagation oracles."""
    p = RotatingModelParams(1.0, 0.1, np.pi / 4)
    return p, rotating_hamiltonian(p)


@pytest.fixture(scope="session")
def fast_drive_frame(fast_drive):
    """Frame + trace for the moderate-drive scenario on a short fine grid."""
    p, src = fast_drive
    grid = grid_for(4 * np.pi, 1e-3)
    return p, src, grid, propagate(src, grid), build_eigenframe(src, grid)
