"""Adiabatic (instantaneous eigenstate) frame and the semi-analytic engine.

The diabatic Hamiltonian of the driven two-level ion,

    H^d = [[-Delta/2, -Omega], [-Omega, Delta/2]],   Omega = d F(t),

is diagonalized by the rotation M(theta) = [[cos, -sin], [sin, cos]]
with tan(2 theta) = 2 Omega / Delta, giving eigenvalues -E, +E with
E = sqrt((Delta/2)^2 + Omega^2).  In the quasistatic approximation the
rotating-frame (Coriolis) couplings proportional to dM/dt are dropped,
and the adiabatic density matrix follows from the rotated source alone:

    rho^a_ii(t)  =  int Gamma^a_ii dt'
    rho^a_21(t)  =  e^{-i Phi(t)} int Gamma^a_21(t') e^{i Phi(t')} dt'

with the dynamic phase Phi(t) = int 2 E dt'.  The coherence integral is
kept in the factored form above: the accumulated phase is carried as a
real array instead of exp(i Phi) alone, so phase wrapping at Phi ~ 1e3
rad never degrades the quadrature.

The neglected Coriolis couplings are never integrated here; their effect
is assessed only through comparison against the reference propagator.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .pulse import LaserPulse, TimeGrid, derive_pulse_parameters, field_at
from .trajectory import MODE_SEMIANALYTIC, Trajectory
from .tunneling import SourceMatrix, TwoLevelIonSystem, source_entries, total_rate


def mixing_angle(system: TwoLevelIonSystem, field):
    """Rotation angle theta = atan2(2 Omega, Delta) / 2 in (-pi/4, pi/4)."""
    omega_r = system.dipole_au * np.asarray(field, dtype=float)
    out = 0.5 * np.arctan2(2.0 * omega_r, system.delta_au)
    return float(out) if out.ndim == 0 else out


def adiabatic_energy(system: TwoLevelIonSystem, field):
    """Adiabatic half-splitting E = sqrt((Delta/2)^2 + Omega^2) >= Delta/2."""
    omega_r = system.dipole_au * np.asarray(field, dtype=float)
    out = np.hypot(0.5 * system.delta_au, omega_r)
    return float(out) if out.ndim == 0 else out


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def transform_source_entries(g11, g22, g21, theta):
    """Rotate source entries to the adiabatic basis, Gamma^a = M^T Gamma^d M.

    Exact trig split (valid at any coupling strength):

        Gamma^a_11 =  Gamma11 cos^2 + Gamma22 sin^2 + Re[Gamma21] sin(2 theta)
        Gamma^a_22 =  Gamma11 sin^2 + Gamma22 cos^2 - Re[Gamma21] sin(2 theta)
        Gamma^a_21 =  (Gamma22 - Gamma11) sin(2 theta)/2
                      + Gamma21 cos^2 - conj(Gamma21) sin^2
    """
    c2 = np.cos(2.0 * np.asarray(theta, dtype=float))
    s2 = np.sin(2.0 * np.asarray(theta, dtype=float))
    sin_sq = 0.5 * (1.0 - c2)
    cos_sq = 0.5 * (1.0 + c2)
    re21 = np.real(g21)
    a11 = g11 * cos_sq + g22 * sin_sq + re21 * s2
    a22 = g11 * sin_sq + g22 * cos_sq - re21 * s2
    a21 = 0.5 * (g22 - g11) * s2 + g21 * cos_sq - np.conj(g21) * sin_sq
    return a11, a22, a21


def source_matrix_adiabatic(source: SourceMatrix, theta: float) -> SourceMatrix:
    """Congruence transform of a diabatic source matrix at angle theta."""
    if source.basis != "diabatic":
        raise ValueError("expected a diabatic source matrix")
    m = rotation_matrix(theta)
    return SourceMatrix("adiabatic", m.T @ source.entries @ m)


def transform_density(p11, p22, coh, theta, direction: str):
    """Rotate density-matrix entries between bases; vectorized.

    direction "d_to_a" applies M^T rho M, "a_to_d" applies M rho M^T.
    """
    c2 = np.cos(2.0 * np.asarray(theta, dtype=float))
    s2 = np.sin(2.0 * np.asarray(theta, dtype=float))
    if direction == "a_to_d":
        s2 = -s2
    elif direction != "d_to_a":
        raise ValueError(f"unknown direction {direction!r}")
    sin_sq = 0.5 * (1.0 - c2)
    cos_sq = 0.5 * (1.0 + c2)
    re = np.real(coh)
    q11 = p11 * cos_sq + p22 * sin_sq + re * s2
    q22 = p11 * sin_sq + p22 * cos_sq - re * s2
    q21 = 0.5 * (p22 - p11) * s2 + coh * cos_sq - np.conj(coh) * sin_sq
    return q11, q22, q21


def adiabatic_to_diabatic(rho_a: np.ndarray, theta: float) -> np.ndarray:
    """Back-transform a 2x2 adiabatic density matrix, rho^d = M rho^a M^T."""
    m = rotation_matrix(theta)
    return m @ np.asarray(rho_a, dtype=complex) @ m.T


def diabatic_to_adiabatic(rho_d: np.ndarray, theta: float) -> np.ndarray:
    m = rotation_matrix(theta)
    return m.T @ np.asarray(rho_d, dtype=complex) @ m


def dynamic_phase(energy, dt: float) -> np.ndarray:
    """Accumulated phase Phi(t) = int 2 E dt' on a uniform grid."""
    return cumulative_trapezoid(2.0 * np.asarray(energy, dtype=float), dx=dt, initial=0.0)


def default_grid(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    window_tau: float = 3.0,
    samples_per_cycle: int = 200,
    n_samples: int | None = None,
) -> TimeGrid:
    """Simulation window [center - w tau, center + w tau] with a step that
    resolves both the carrier (dt <= T / spc) and the fastest dynamic
    phase oscillation (dt <= 2 pi / (spc * 2 E_max))."""
    p = derive_pulse_parameters(pulse)
    t_start = p.center - window_tau * p.fwhm
    t_end = p.center + window_tau * p.fwhm
    if n_samples is None:
        e_max = adiabatic_energy(system, p.field_peak)
        dt = min(p.period / samples_per_cycle, 2.0 * math.pi / (samples_per_cycle * 2.0 * e_max))
        n_samples = int(math.ceil((t_end - t_start) / dt)) + 1
    return TimeGrid(t_start, t_end, n_samples)


@dataclass
class SampledDynamics:
    """Field, sources and adiabatic-frame quantities on a uniform grid."""

    grid: TimeGrid
    field: np.ndarray
    rho0: np.ndarray
    g11: np.ndarray  # diabatic source entries
    g22: np.ndarray
    g21: np.ndarray
    theta: np.ndarray
    energy: np.ndarray
    a11: np.ndarray  # adiabatic source entries
    a22: np.ndarray
    a21: np.ndarray
    phase: np.ndarray


def sample_dynamics(system: TwoLevelIonSystem, pulse: LaserPulse, grid: TimeGrid) -> SampledDynamics:
    """Evaluate field, survival, sources and phase on the grid."""
    params = derive_pulse_parameters(pulse)
    t = grid.times()
    field = np.asarray(field_at(params, t), dtype=float)
    rate = total_rate(system, field)
    rho0 = np.exp(-cumulative_trapezoid(rate, dx=grid.dt, initial=0.0))
    g11, g22, g21 = source_entries(system, rho0, field)
    theta = mixing_angle(system, field)
    energy = adiabatic_energy(system, field)
    a11, a22, a21 = transform_source_entries(g11, g22, g21, theta)
    phase = dynamic_phase(energy, grid.dt)
    return SampledDynamics(grid, field, rho0, g11, g22, g21, theta, energy, a11, a22, a21, phase)


def accumulate_coherence(a21, phase, dt: float):
    """Quadrature core of the coherence solution.

    Returns (rho21_a, buildup) where buildup is the integrand
    Gamma^a_21(t') exp(i Phi(t')) and

        rho21_a(t) = exp(-i Phi(t)) * cumtrapz(buildup).
    """
    phase = np.asarray(phase, dtype=float)
    buildup = np.asarray(a21, dtype=complex) * np.exp(1j * phase)
    rho21 = np.exp(-1j * phase) * cumulative_trapezoid(buildup, dx=dt, initial=0.0)
    return rho21, buildup


def integrate_populations(a11, a22, dt: float):
    """Population quadratures rho^a_ii(t) = cumtrapz(Gamma^a_ii)."""
    p11 = cumulative_trapezoid(np.asarray(a11, dtype=float), dx=dt, initial=0.0)
    p22 = cumulative_trapezoid(np.asarray(a22, dtype=float), dx=dt, initial=0.0)
    return p11, p22


def semianalytic_evolve(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid: TimeGrid | None = None,
    dynamics: SampledDynamics | None = None,
) -> Trajectory:
    """Propagate the quasistatic solution on the grid.

    Populations and coherence are accumulated in the adiabatic basis and
    back-transformed sample-by-sample to the diabatic one.
    """
    if dynamics is None:
        if grid is None:
            grid = default_grid(system, pulse)
        dynamics = sample_dynamics(system, pulse, grid)
    dyn = dynamics
    dt = dyn.grid.dt
    p11, p22 = integrate_populations(dyn.a11, dyn.a22, dt)
    rho21, buildup = accumulate_coherence(dyn.a21, dyn.phase, dt)
    d11, d22, d21 = transform_density(p11, p22, rho21, dyn.theta, "a_to_d")
    return Trajectory(
        mode=MODE_SEMIANALYTIC,
        grid=dyn.grid,
        field=dyn.field,
        rho0=dyn.rho0,
        rho11_d=np.real(d11),
        rho22_d=np.real(d22),
        rho21_d=d21,
        rho11_a=p11,
        rho22_a=p22,
        rho21_a=rho21,
        theta=dyn.theta,
        energy=dyn.energy,
        phase=dyn.phase,
        buildup=buildup,
    )
