"""Shared fixtures and cached propagations.

Benchmark trajectories are reused across many tests; the caches key on the
frozen (hashable) system/pulse descriptors so each distinct propagation
runs once per session.
"""

from functools import lru_cache

import pytest

from ionwake import (
    default_grid,
    make_pulse,
    n2_calibrated,
    n2_preset,
    semianalytic_evolve,
    solve_diabatic,
)


@lru_cache(maxsize=None)
def cached_grid(system, pulse, samples_per_cycle=200, window_tau=3.0):
    return default_grid(
        system, pulse, window_tau=window_tau, samples_per_cycle=samples_per_cycle
    )


@lru_cache(maxsize=None)
def cached_semianalytic(system, pulse, samples_per_cycle=200, window_tau=3.0):
    grid = cached_grid(system, pulse, samples_per_cycle, window_tau)
    return semianalytic_evolve(system, pulse, grid)


@lru_cache(maxsize=None)
def cached_reference(system, pulse, samples_per_cycle=200, window_tau=3.0):
    grid = cached_grid(system, pulse, samples_per_cycle, window_tau)
    return solve_diabatic(system, pulse, grid)


@pytest.fixture(scope="session")
def n2():
    """Bare N2 system (structure coefficients 1.0)."""
    return n2_preset()


@pytest.fixture(scope="session")
def n2cal():
    """Calibrated N2 system used by the quantitative benchmarks."""
    return n2_calibrated()


@pytest.fixture(scope="session")
def sc1030():
    """Single-cycle 1030 nm pulse at 2e14 W/cm^2, the workhorse scenario."""
    return make_pulse(1030.0, 2e14, single_cycle=True)
