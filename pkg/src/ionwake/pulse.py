"""Gaussian laser pulse model and uniform time grids.

The driving field is a Gaussian-envelope carrier

    F(t) = F0 exp(-2 ln2 (t - tc)^2 / tau^2) cos(w (t - tc) + phi)

where tau is the FWHM of the *intensity* envelope (the squared field
envelope), w the carrier frequency, phi the carrier-envelope phase and
tc the envelope center.  A "single-cycle" pulse sets tau equal to one
optical period, tau = lambda / c.
"""

import math
from dataclasses import dataclass

import numpy as np

from .units import (
    C_NM_FS,
    fs_to_au,
    intensity_to_field,
    wavelength_to_omega,
)

LN2 = math.log(2.0)


class InvalidPulseError(ValueError):
    """Raised for non-physical pulse parameters."""


@dataclass(frozen=True)
class LaserPulse:
    """Pulse description in laboratory units.

    Parameters
    ----------
    wavelength_nm : carrier vacuum wavelength, nm
    intensity_Wcm2 : peak intensity, W/cm^2 (zero allowed: field-free run)
    fwhm_fs : intensity-envelope FWHM, fs
    cep_rad : carrier-envelope phase, rad
    center_fs : envelope center time, fs
    """

    wavelength_nm: float
    intensity_Wcm2: float
    fwhm_fs: float
    cep_rad: float = 0.0
    center_fs: float = 0.0

    def __post_init__(self):
        if not self.wavelength_nm > 0.0:
            raise InvalidPulseError(f"wavelength_nm must be > 0, got {self.wavelength_nm}")
        if self.intensity_Wcm2 < 0.0:
            raise InvalidPulseError(f"intensity_Wcm2 must be >= 0, got {self.intensity_Wcm2}")
        if not self.fwhm_fs > 0.0:
            raise InvalidPulseError(f"fwhm_fs must be > 0, got {self.fwhm_fs}")


@dataclass(frozen=True)
class PulseParams:
    """Derived pulse parameters in atomic units."""

    field_peak: float  # F0, a.u.
    omega: float  # carrier angular frequency, a.u.
    fwhm: float  # intensity-envelope FWHM, a.u. of time
    period: float  # optical period 2 pi / omega, a.u. of time
    cep: float  # rad
    center: float  # envelope center, a.u. of time


def derive_pulse_parameters(pulse: LaserPulse) -> PulseParams:
    """Convert a lab-frame pulse to atomic-unit working parameters."""
    omega = wavelength_to_omega(pulse.wavelength_nm)
    return PulseParams(
        field_peak=intensity_to_field(pulse.intensity_Wcm2),
        omega=omega,
        fwhm=fs_to_au(pulse.fwhm_fs),
        period=2.0 * math.pi / omega,
        cep=pulse.cep_rad,
        center=fs_to_au(pulse.center_fs),
    )


def _params(pulse) -> PulseParams:
    if isinstance(pulse, LaserPulse):
        return derive_pulse_parameters(pulse)
    return pulse


def envelope_at(pulse, t):
    """Field envelope F0 exp(-2 ln2 (t-tc)^2 / tau^2) at time t (a.u.)."""
    p = _params(pulse)
    u = (np.asarray(t, dtype=float) - p.center) / p.fwhm
    out = p.field_peak * np.exp(-2.0 * LN2 * u * u)
    return float(out) if out.ndim == 0 else out


def field_at(pulse, t):
    """Instantaneous field (a.u.) at time t (a.u.); vectorized over t."""
    p = _params(pulse)
    tt = np.asarray(t, dtype=float) - p.center
    u = tt / p.fwhm
    out = p.field_peak * np.exp(-2.0 * LN2 * u * u) * np.cos(p.omega * tt + p.cep)
    return float(out) if out.ndim == 0 else out


def single_cycle_duration(wavelength_nm: float) -> float:
    """FWHM (fs) of a single-cycle pulse: one optical period, lambda / c."""
    if wavelength_nm <= 0.0:
        raise InvalidPulseError(f"wavelength_nm must be > 0, got {wavelength_nm}")
    return wavelength_nm / C_NM_FS


def make_pulse(
    wavelength_nm: float,
    intensity_Wcm2: float,
    fwhm_fs: float | None = None,
    cep_rad: float = 0.0,
    center_fs: float = 0.0,
    single_cycle: bool = False,
) -> LaserPulse:
    """Build a pulse; ``single_cycle=True`` overrides ``fwhm_fs``."""
    if single_cycle:
        fwhm_fs = single_cycle_duration(wavelength_nm)
    elif fwhm_fs is None:
        raise InvalidPulseError("fwhm_fs is required unless single_cycle is set")
    return LaserPulse(wavelength_nm, intensity_Wcm2, fwhm_fs, cep_rad, center_fs)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid [t_start, t_end] with n_samples points (a.u.)."""

    t_start: float
    t_end: float
    n_samples: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_samples - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)
