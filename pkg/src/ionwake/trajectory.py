"""Density-matrix state containers, trajectories and the trajectory CSV."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pulse import TimeGrid
from .units import au_to_fs

MODE_REFERENCE = "reference"
MODE_SEMIANALYTIC = "semianalytic"

BASIS_DIABATIC = "diabatic"
BASIS_ADIABATIC = "adiabatic"

# Fixed column order of the trajectory CSV; a leading "mode" column tags
# each row with the propagator that produced it.
TRAJECTORY_COLUMNS = (
    "t_fs",
    "field_au",
    "rho0",
    "rho11_d",
    "rho22_d",
    "re_rho21_d",
    "im_rho21_d",
    "rho11_a",
    "rho22_a",
    "re_rho21_a",
    "im_rho21_a",
    "theta",
    "E_au",
    "phase_Phi",
    "buildup_re",
    "buildup_im",
)


@dataclass(frozen=True)
class DensityState:
    """Snapshot: neutral survival plus the 2x2 ionic density matrix."""

    rho0: float
    rho: np.ndarray  # (2, 2) complex
    basis: str

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=complex)
        if r.shape != (2, 2):
            raise ValueError("rho must be 2x2")
        object.__setattr__(self, "rho", r)

    @property
    def trace_residual(self) -> float:
        """1 - rho0 - tr(rho); zero for an exact probability budget."""
        return 1.0 - self.rho0 - float(np.real(np.trace(self.rho)))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho)[0])

    @property
    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))


@dataclass
class Trajectory:
    """Sampled state history of one propagator run on a uniform grid.

    Diabatic and adiabatic entries are carried side by side; the
    remaining arrays are the mixing angle, adiabatic energy E(t), the
    accumulated dynamic phase Phi(t) and the coherence buildup integrand
    Gamma^a_21(t) exp(i Phi(t)).
    """

    mode: str
    grid: TimeGrid
    field: np.ndarray
    rho0: np.ndarray
    rho11_d: np.ndarray
    rho22_d: np.ndarray
    rho21_d: np.ndarray  # complex
    rho11_a: np.ndarray
    rho22_a: np.ndarray
    rho21_a: np.ndarray  # complex
    theta: np.ndarray
    energy: np.ndarray
    phase: np.ndarray
    buildup: np.ndarray  # complex

    def times(self) -> np.ndarray:
        return self.grid.times()

    def times_fs(self) -> np.ndarray:
        return au_to_fs(1.0) * self.grid.times()

    def state_at(self, i: int, basis: str = BASIS_DIABATIC) -> DensityState:
        if basis == BASIS_DIABATIC:
            p11, p22, coh = self.rho11_d[i], self.rho22_d[i], self.rho21_d[i]
        elif basis == BASIS_ADIABATIC:
            p11, p22, coh = self.rho11_a[i], self.rho22_a[i], self.rho21_a[i]
        else:
            raise ValueError(f"unknown basis {basis!r}")
        rho = np.array([[p11, np.conj(coh)], [coh, p22]], dtype=complex)
        return DensityState(float(self.rho0[i]), rho, basis)

    def final_state(self, basis: str = BASIS_DIABATIC) -> DensityState:
        return self.state_at(-1, basis)

    def column(self, name: str) -> np.ndarray:
        """Column data by trajectory-CSV column name."""
        mapping = {
            "t_fs": self.times_fs(),
            "field_au": self.field,
            "rho0": self.rho0,
            "rho11_d": self.rho11_d,
            "rho22_d": self.rho22_d,
            "re_rho21_d": np.real(self.rho21_d),
            "im_rho21_d": np.imag(self.rho21_d),
            "rho11_a": self.rho11_a,
            "rho22_a": self.rho22_a,
            "re_rho21_a": np.real(self.rho21_a),
            "im_rho21_a": np.imag(self.rho21_a),
            "theta": self.theta,
            "E_au": self.energy,
            "phase_Phi": self.phase,
            "buildup_re": np.real(self.buildup),
            "buildup_im": np.imag(self.buildup),
        }
        return np.asarray(mapping[name], dtype=float)


def format_float(x: float) -> str:
    """Shortest decimal text that round-trips the float exactly."""
    return repr(float(x))


def write_trajectory_csv(
    path,
    trajectories,
    comments=(),
    extra_columns=None,
    stride: int = 1,
) -> None:
    """Write one or more trajectories in the fixed column order.

    ``extra_columns`` maps a column name to one scalar per trajectory
    (prepended before "mode"), e.g. a wavelength tag for overlay plots.
    ``stride`` decimates the sample rows (the first sample is kept).
    """
    extra = dict(extra_columns or {})
    header = list(extra) + ["mode", *TRAJECTORY_COLUMNS]
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for k, traj in enumerate(trajectories):
            cols = [traj.column(name)[::stride] for name in TRAJECTORY_COLUMNS]
            tags = [format_float(extra[name][k]) for name in extra]
            for row in zip(*cols):
                writer.writerow(tags + [traj.mode] + [format_float(v) for v in row])


def read_csv_columns(path):
    """Read a '#'-commented CSV into (comments, {column: list of str})."""
    comments = []
    rows = []
    with Path(path).open(newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                rows.append(line)
    reader = csv.reader(rows)
    try:
        header = next(reader)
    except StopIteration:
        return comments, {}
    data = {name: [] for name in header}
    for row in reader:
        for name, value in zip(header, row):
            data[name].append(value)
    return comments, data
