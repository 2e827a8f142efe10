"""Shared fixtures: default parameter sets and cached reduced systems."""

import numpy as np
import pytest

from mapescape import MapParams, SweepSpec, reduced_system_for, reproduce_table1

# canonical experiment constants used throughout the suite
TAU = 0.05
A = 0.25
B = 0.5
TAU12_GRID = (0.8, 0.9, 1.0, 1.1, 1.2)
RATIO_GRID = (2.0, 3.0, 4.0, 5.0, 6.0, 7.0)


def params_for(tau12, ratio=None, tau=TAU, a=A, b=B):
    eps = 0.0 if ratio is None else tau / ratio
    return MapParams.from_ratio(tau12, tau=tau, a=a, b=b, epsilon=eps)


@pytest.fixture(scope="session")
def symmetric_params():
    """tau1 = tau2 = 0.05, a = 1/4, b = 1/2, noiseless."""
    return params_for(1.0)


@pytest.fixture(scope="session")
def reduced_default(symmetric_params):
    """Reduced 1D system along the traced valley path for tau12 = 1."""
    return reduced_system_for(symmetric_params)


@pytest.fixture(scope="session")
def reduced_by_tau12():
    """Reduced systems for every slope-table tau12 (traced once per session)."""
    return {t12: reduced_system_for(params_for(t12)) for t12 in TAU12_GRID}


@pytest.fixture(scope="session")
def default_report():
    """The full default sweep (5 tau12 x 6 ratios x 500 trials, seed 0).

    Shared by the acceptance criteria that consume the table, its records
    and its fits.  Runs the Monte Carlo engine once per session.
    """
    return reproduce_table1(SweepSpec())


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
