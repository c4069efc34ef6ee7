"""Conversions between laboratory units and Hartree atomic units.

All physics inside the package runs in atomic units; laboratory units
(eV, fs, nm, W/cm^2) appear only at the I/O boundary.  The conversion
constants are frozen to the literals below so that outputs are
bit-reproducible across machines.
"""

import math

HARTREE_EV = 27.211386  # eV per hartree
INTENSITY_AU_WCM2 = 3.50944758e16  # W/cm^2 at a peak field of 1 a.u.
TIME_AU_FS = 0.0241888  # fs per atomic unit of time
HC_EV_NM = 1239.84198  # photon energy (eV) x vacuum wavelength (nm)
C_NM_FS = 299.792458  # speed of light in nm/fs


def ev_to_au(energy_ev: float) -> float:
    return energy_ev / HARTREE_EV


def au_to_ev(energy_au: float) -> float:
    return energy_au * HARTREE_EV


def fs_to_au(time_fs: float) -> float:
    return time_fs / TIME_AU_FS


def au_to_fs(time_au: float) -> float:
    return time_au * TIME_AU_FS


def intensity_to_field(intensity_wcm2: float) -> float:
    """Peak electric field (a.u.) for a peak intensity (W/cm^2)."""
    if intensity_wcm2 < 0.0:
        raise ValueError(f"intensity must be non-negative, got {intensity_wcm2}")
    return math.sqrt(intensity_wcm2 / INTENSITY_AU_WCM2)


def field_to_intensity(field_au: float) -> float:
    return field_au * field_au * INTENSITY_AU_WCM2


def wavelength_to_omega(wavelength_nm: float) -> float:
    """Carrier angular frequency (a.u.) for a vacuum wavelength (nm)."""
    if wavelength_nm <= 0.0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    return ev_to_au(HC_EV_NM / wavelength_nm)


def omega_to_wavelength(omega_au: float) -> float:
    if omega_au <= 0.0:
        raise ValueError(f"omega must be positive, got {omega_au}")
    return HC_EV_NM / au_to_ev(omega_au)
