"""Derived observables: QSA error, source decompositions, weak-coupling
coherence, phase matching, CEP response and adiabaticity diagnostics."""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .adiabatic import SampledDynamics, accumulate_coherence, default_grid, sample_dynamics, semianalytic_evolve
from .pulse import LaserPulse, TimeGrid, derive_pulse_parameters
from .reference import Tolerances, solve_diabatic
from .trajectory import Trajectory
from .tunneling import TwoLevelIonSystem
from .units import HC_EV_NM, au_to_ev, intensity_to_field


class UndefinedMetricError(ValueError):
    """A ratio metric has a vanishing denominator."""


@dataclass(frozen=True)
class Diagnostics:
    """Adiabaticity parameters of a (system, pulse) combination.

    keldysh: omega sqrt(2 I_p) / F0, tunneling vs multiphoton ionization.
    gamma_e: omega / Delta, quasistatic validity of the bound-state dynamics.
    """

    keldysh: float
    gamma_e: float


def diagnostics(system: TwoLevelIonSystem, pulse: LaserPulse) -> Diagnostics:
    p = derive_pulse_parameters(pulse)
    if p.field_peak <= 0.0:
        raise UndefinedMetricError("Keldysh parameter undefined at zero intensity")
    kappa = system.channel_1.kappa
    return Diagnostics(
        keldysh=p.omega * kappa / p.field_peak,
        gamma_e=p.omega / system.delta_au,
    )


def qsa_error(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid: TimeGrid | None = None,
    reference: Trajectory | None = None,
    semianalytic: Trajectory | None = None,
    tolerances: Tolerances = Tolerances(),
) -> float:
    """Signed end-of-pulse population error of the quasistatic solution,
    100 * (rho^a_22 - rho^d_22) / rho^d_22, in percent."""
    if grid is None:
        grid = default_grid(system, pulse)
    if reference is None:
        reference = solve_diabatic(system, pulse, grid, tolerances)
    if semianalytic is None:
        semianalytic = semianalytic_evolve(system, pulse, grid)
    exact = float(reference.rho22_d[-1])
    if exact <= 0.0:
        raise UndefinedMetricError("reference upper-state population vanishes")
    return 100.0 * (float(semianalytic.rho22_a[-1]) - exact) / exact


@dataclass(frozen=True)
class PopulationDecomposition:
    """Fractions of the final upper-adiabatic population by source term.

    shake_up:     int Gamma^d_11 sin^2(theta)        (ionization to the
                  lower diabatic state promoted by the field mixing)
    direct:       int Gamma^d_22 cos^2(theta)        (direct ionization
                  to the upper state)
    tic_transfer: int -Re[Gamma^d_21] sin(2 theta)   (transfer driven by
                  the tunneling-ionization coherence)
    """

    shake_up: float
    direct: float
    tic_transfer: float
    total: float  # final rho^a_22 (absolute)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.shake_up, self.direct, self.tic_transfer)


def decompose_population(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid: TimeGrid | None = None,
    dynamics: SampledDynamics | None = None,
) -> PopulationDecomposition:
    """Split the final rho^a_22 into its three exact source terms."""
    if dynamics is None:
        if grid is None:
            grid = default_grid(system, pulse)
        dynamics = sample_dynamics(system, pulse, grid)
    dyn = dynamics
    s2 = np.sin(2.0 * dyn.theta)
    sin_sq = np.sin(dyn.theta) ** 2
    cos_sq = np.cos(dyn.theta) ** 2
    dt = dyn.grid.dt
    shake = float(trapezoid(dyn.g11 * sin_sq, dx=dt))
    direct = float(trapezoid(dyn.g22 * cos_sq, dx=dt))
    tic = float(trapezoid(-np.real(dyn.g21) * s2, dx=dt))
    total = shake + direct + tic
    if total <= 0.0:
        raise UndefinedMetricError("no upper-state population to decompose")
    return PopulationDecomposition(shake / total, direct / total, tic / total, total)


@dataclass(frozen=True)
class CoherenceSplit:
    """Final adiabatic coherence split by driving term of Gamma^a_21.

    ti_driven:  from (Gamma^d_22 - Gamma^d_11) sin(2 theta) / 2
    tic_driven: from Gamma^d_21 cos^2(theta) - Gamma^d_12 sin^2(theta)
    """

    ti_driven: complex
    tic_driven: complex

    @property
    def ratio(self) -> float:
        """|TI-driven| / |TIC-driven|."""
        denom = abs(self.tic_driven)
        if denom == 0.0:
            raise UndefinedMetricError("TIC-driven coherence term vanishes")
        return abs(self.ti_driven) / denom


def decompose_coherence(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid: TimeGrid | None = None,
    dynamics: SampledDynamics | None = None,
) -> CoherenceSplit:
    """Integrate the two Gamma^a_21 terms separately through the phase filter."""
    if dynamics is None:
        if grid is None:
            grid = default_grid(system, pulse)
        dynamics = sample_dynamics(system, pulse, grid)
    dyn = dynamics
    s2 = np.sin(2.0 * dyn.theta)
    sin_sq = np.sin(dyn.theta) ** 2
    cos_sq = np.cos(dyn.theta) ** 2
    ti_term = 0.5 * (dyn.g22 - dyn.g11) * s2
    tic_term = dyn.g21 * cos_sq - np.conj(dyn.g21) * sin_sq
    dt = dyn.grid.dt
    ti, _ = accumulate_coherence(ti_term, dyn.phase, dt)
    tic, _ = accumulate_coherence(tic_term, dyn.phase, dt)
    return CoherenceSplit(complex(ti[-1]), complex(tic[-1]))


@dataclass(frozen=True)
class WeakCouplingParams:
    """Constants of the weak-coupling (perturbative Stark) limit.

    alpha: cycle-averaged ac Stark shift d^2 F0^2 / Delta (a.u.)
    eta0:  accumulated Stark phase offset (alpha tau / 4) sqrt(pi / ln 2)
    """

    alpha: float
    eta0: float

    @classmethod
    def from_system_pulse(cls, system: TwoLevelIonSystem, pulse: LaserPulse) -> "WeakCouplingParams":
        p = derive_pulse_parameters(pulse)
        alpha = (system.dipole_au * p.field_peak) ** 2 / system.delta_au
        eta0 = 0.25 * alpha * p.fwhm * math.sqrt(math.pi / math.log(2.0))
        return cls(alpha, eta0)


def weak_coupling_coherence(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid: TimeGrid | None = None,
    dynamics: SampledDynamics | None = None,
) -> complex:
    """Long-pulse weak-coupling coherence estimate.

    rho^a_21(t_f) ~= e^{-i Delta t_f} int Gamma^a_21(t')
                     e^{i [(Delta + alpha) t' - eta0]} dt'

    with t' measured from the envelope center.  Valid for multi-cycle
    pulses with (2 Omega_0 / Delta)^2 << 1.
    """
    if dynamics is None:
        if grid is None:
            grid = default_grid(system, pulse)
        dynamics = sample_dynamics(system, pulse, grid)
    dyn = dynamics
    wc = WeakCouplingParams.from_system_pulse(system, pulse)
    p = derive_pulse_parameters(pulse)
    t_rel = dyn.grid.times() - p.center
    delta = system.delta_au
    integrand = dyn.a21 * np.exp(1j * ((delta + wc.alpha) * t_rel - wc.eta0))
    integral = complex(trapezoid(integrand, dx=dyn.grid.dt))
    return cmath.exp(-1j * delta * t_rel[-1]) * integral


def buildup_function(trajectory: Trajectory) -> np.ndarray:
    """Coherence buildup integrand Gamma^a_21(t) exp(i Phi(t))."""
    return trajectory.buildup


def phase_matching_wavelength(system: TwoLevelIonSystem, intensity_Wcm2: float, n: int) -> float:
    """Wavelength (nm) where Delta + alpha = (2n+1) omega.

    Odd-order matching of the Stark-shifted splitting to the carrier;
    ionization bursts then add constructively in the coherence integral.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    f0 = intensity_to_field(intensity_Wcm2)
    alpha = (system.dipole_au * f0) ** 2 / system.delta_au
    matched_ev = au_to_ev(system.delta_au + alpha)
    return (2 * n + 1) * HC_EV_NM / matched_ev


@dataclass(frozen=True)
class CepResponse:
    """Carrier-envelope-phase scan of the final adiabatic coherence."""

    cep: np.ndarray  # sampled CEP values, rad
    coherence: np.ndarray  # complex rho^a_21(t_f) per CEP
    amplitude_variation: float  # (max - min) / mean of |rho21|
    phase_slope: float  # least-squares d(arg rho21)/d(CEP)


def cep_response(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    n_cep: int = 16,
    grid: TimeGrid | None = None,
) -> CepResponse:
    """Scan the CEP over [0, 2 pi) and fit the coherence phase slope."""
    if n_cep < 4:
        raise ValueError("n_cep must be at least 4")
    ceps = np.linspace(0.0, 2.0 * math.pi, n_cep, endpoint=False)
    coh = np.empty(n_cep, dtype=complex)
    for k, phi in enumerate(ceps):
        member = LaserPulse(
            pulse.wavelength_nm, pulse.intensity_Wcm2, pulse.fwhm_fs, float(phi), pulse.center_fs
        )
        g = grid if grid is not None else default_grid(system, member)
        traj = semianalytic_evolve(system, member, g)
        coh[k] = traj.rho21_a[-1]
    mags = np.abs(coh)
    mean = float(np.mean(mags))
    if mean == 0.0:
        raise UndefinedMetricError("coherence vanishes over the CEP family")
    variation = float((np.max(mags) - np.min(mags)) / mean)
    phases = np.unwrap(np.angle(coh))
    slope = float(np.polyfit(ceps, phases, 1)[0])
    return CepResponse(ceps, coh, variation, slope)


def halfcycle_increments(trajectory: Trajectory) -> np.ndarray:
    """Per-half-cycle complex increments of the coherence buildup integral.

    The buildup series is integrated between consecutive zero crossings of
    the laser field, so each entry is one half-cycle's contribution to
    rho^a_21(t_f) (up to the global phase factor).
    """
    b = trajectory.buildup
    sign = np.sign(trajectory.field)
    crossings = np.where(np.diff(sign) != 0)[0]
    segments = np.split(np.arange(b.size), crossings + 1)
    dt = trajectory.grid.dt
    return np.array(
        [complex(trapezoid(b[seg], dx=dt)) for seg in segments if seg.size >= 5],
        dtype=complex,
    )


def coherent_fraction(increments) -> float:
    """|sum| / sum-of-|.| over half-cycle increments.

    1 means the half-cycle contributions add fully constructively, 0 means
    they cancel pairwise.
    """
    inc = np.asarray(increments, dtype=complex)
    gross = float(np.sum(np.abs(inc)))
    if gross == 0.0:
        raise UndefinedMetricError("no buildup accumulated")
    return float(abs(inc.sum()) / gross)


def sign_pattern(increments, keep_fraction: float = 0.1) -> str:
    """Classify half-cycle contributions: 'alternating', 'uniform' or 'mixed'.

    Significant increments (magnitude >= ``keep_fraction`` of the largest)
    are rotated so the dominant one lies on the positive real axis, which
    removes the arbitrary global phase; the pattern is then read off the
    signs of the real parts.
    """
    inc = np.asarray(increments, dtype=complex)
    mags = np.abs(inc)
    if inc.size == 0 or mags.max() == 0.0:
        raise UndefinedMetricError("no buildup accumulated")
    kept = inc[mags >= keep_fraction * mags.max()]
    dominant = kept[np.argmax(np.abs(kept))]
    re = np.real(kept * np.exp(-1j * np.angle(dominant)))
    if np.all(re > 0.0) or np.all(re < 0.0):
        return "uniform"
    if np.all(re[1:] * re[:-1] < 0.0):
        return "alternating"
    return "mixed"


def rise_window(trajectory: Trajectory, low: float = 0.1, high: float = 0.9) -> float:
    """Central rise window of |rho^a_21| in fs.

    Measured from the last sample at or below ``low`` times the final value
    to the first sample of the trailing run that stays at or above ``high``
    times the final value.
    """
    amp = np.abs(trajectory.rho21_a)
    final = amp[-1]
    if final <= 0.0:
        raise UndefinedMetricError("final coherence vanishes")
    t = trajectory.times_fs()
    ge = amp >= high * final
    k = amp.size - 1
    while k > 0 and ge[k - 1]:
        k -= 1
    before = np.where(amp[:k] <= low * final)[0]
    t_low = t[before[-1]] if before.size else t[0]
    return float(t[k] - t_low)


@dataclass(frozen=True)
class SecondOrderDeviation:
    """Worst-case mismatch of the truncated source entries vs the exact ones.

    peak_coupling_sq is (2 Omega_0 / Delta)^2 at the field crest; the
    deviations are sample-wise relative, maximized over samples that carry
    at least 0.1% of the peak source magnitude.
    """

    peak_coupling_sq: float
    population_dev: float
    coherence_dev: float


def second_order_sources(system: TwoLevelIonSystem, dynamics: SampledDynamics):
    """Small-coupling truncation of the adiabatic source entries.

    Keeps terms through (Omega/Delta)^2 of the exact trig forms:
    sin^2 theta -> (Omega/Delta)^2, cos^2 theta -> 1 - (Omega/Delta)^2,
    sin 2theta -> 2 Omega/Delta.
    """
    r = system.dipole_au * dynamics.field / system.delta_au  # Omega/Delta
    re21 = np.real(dynamics.g21)
    a22 = dynamics.g11 * r * r + dynamics.g22 * (1.0 - r * r) - 2.0 * re21 * r
    a21 = (dynamics.g22 - dynamics.g11) * r + (dynamics.g21 - 2.0 * re21 * r * r)
    return a22, a21


def second_order_consistency(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid: TimeGrid | None = None,
) -> SecondOrderDeviation:
    """Compare the truncated source entries against the exact trig forms."""
    if grid is None:
        grid = default_grid(system, pulse)
    dyn = sample_dynamics(system, pulse, grid)
    t22, t21 = second_order_sources(system, dyn)
    p = derive_pulse_parameters(pulse)
    u0 = 2.0 * system.dipole_au * p.field_peak / system.delta_au
    devs = []
    for approx, exact in ((t22, dyn.a22), (t21, dyn.a21)):
        scale = np.max(np.abs(exact))
        if scale == 0.0:
            devs.append(0.0)
            continue
        mask = np.abs(exact) >= 1e-3 * scale
        devs.append(float(np.max(np.abs(approx - exact)[mask] / np.abs(exact)[mask])))
    return SecondOrderDeviation(u0 * u0, devs[0], devs[1])
