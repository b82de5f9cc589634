import numpy as np
import pytest

from rchwave.spectral import WaveProfile
from rchwave.stability import analyze_point
from rchwave.waves import WavePoint, continue_family, get_grid, solve_at

OMEGA = 1.0


def rel_close(value, reference, tol):
    """Scale-aware comparison |value - reference| <= tol * (1 + |reference|)."""
    return abs(value - reference) <= tol * (1.0 + abs(reference))


@pytest.fixture(scope="session")
def g64():
    return get_grid(64)


@pytest.fixture(scope="session")
def g96():
    return get_grid(96)


@pytest.fixture(scope="session")
def g128():
    return get_grid(128)


@pytest.fixture(scope="session")
def wave_small(g64):
    """Small-amplitude family member (a = 0.03 nominal)."""
    return solve_at(0.5 + 1.5 * 0.03**2, OMEGA, g64)


@pytest.fixture(scope="session")
def wave_mid(g64):
    return solve_at(0.7, OMEGA, g64)


@pytest.fixture(scope="session")
def wave_mid96(g96):
    return solve_at(0.7, OMEGA, g96)


@pytest.fixture(scope="session")
def wave_evo(g128):
    """Wave used by the evolution experiments."""
    return solve_at(0.8, OMEGA, g128)


@pytest.fixture(scope="session")
def curve64(g64):
    return continue_family(OMEGA, 0.52, 0.9, 0.05, g64)


@pytest.fixture(scope="session")
def analysis_small(wave_small):
    return analyze_point(wave_small)


@pytest.fixture(scope="session")
def analysis_mid(wave_mid):
    return analyze_point(wave_mid)


@pytest.fixture()
def trivial_point(g64):
    """phi = 0 at c = 1, omega = 1 (constant-coefficient operators)."""
    return WavePoint(
        profile=WaveProfile(np.zeros(g64.n_modes), g64),
        c=1.0,
        omega=OMEGA,
        A=0.0,
        residual_norm=0.0,
        min_gap=1.0,
    )
