"""Deterministic parameter sweeps with JSON run configs and CSV results.

A scan iterates the Cartesian product of up to three axes (wavelength,
intensity, FWHM, CEP) over a fixed system.  Points are distributed over
a worker pool but results are assembled in grid order and formatted
identically regardless of worker count, so the output file is
byte-identical for 1, 4 or 8 workers.  A sidecar journal of completed
rows allows interrupted scans to resume without recomputing.
"""

import hashlib
import itertools
import json
import multiprocessing
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adiabatic import default_grid, sample_dynamics, semianalytic_evolve
from .analysis import decompose_coherence, decompose_population, diagnostics, qsa_error
from .pulse import LaserPulse, single_cycle_duration
from .reference import solve_diabatic
from .trajectory import format_float
from .tunneling import IonChannel, Subchannel, TwoLevelIonSystem

CONFIG_SCHEMA_VERSION = 1
WORKERS_ENV_VAR = "IONWAKE_THREADS"

# Axis iteration order is fixed so row order never depends on dict order.
CANONICAL_AXES = ("wavelength_nm", "intensity_Wcm2", "fwhm_fs", "cep_rad")

OBSERVABLES = (
    "rho0",
    "rho11",
    "rho22",
    "abs_coh",
    "arg_coh",
    "qsa_error_pct",
    "frac_shakeup",
    "frac_direct",
    "frac_tic",
    "ti_over_tic",
    "gamma_e",
    "keldysh",
)

PULSE_DEFAULTS = {"cep_rad": 0.0, "center_fs": 0.0, "single_cycle": False}


class ConfigError(ValueError):
    """Invalid or unsupported run configuration."""


def system_from_block(block: dict) -> TwoLevelIonSystem:
    """Build the ionic system from its config block."""
    try:
        energies = block["binding_energies_eV"]
        dipole = block["dipole_au"]
        parities = block["parities"]
        coeffs = block["structure_coefficients"]
    except KeyError as exc:
        raise ConfigError(f"system block missing key {exc}") from exc
    if len(energies) != 2 or len(parities) != 2 or len(coeffs) != 2:
        raise ConfigError("system block must describe exactly two channels")
    channels = []
    for i in range(2):
        subs = tuple(Subchannel(int(s["m"]), float(s["g"])) for s in coeffs[i])
        channels.append(
            IonChannel(
                label=f"channel_{i + 1}",
                binding_energy_eV=float(energies[i]),
                parity=str(parities[i]),
                subchannels=subs,
            )
        )
    return TwoLevelIonSystem(channels[0], channels[1], float(dipole))


def system_to_block(system: TwoLevelIonSystem) -> dict:
    return {
        "binding_energies_eV": [
            system.channel_1.binding_energy_eV,
            system.channel_2.binding_energy_eV,
        ],
        "dipole_au": system.dipole_au,
        "parities": [system.channel_1.parity, system.channel_2.parity],
        "structure_coefficients": [
            [{"m": s.m, "g": s.structure_coefficient} for s in ch.subchannels]
            for ch in (system.channel_1, system.channel_2)
        ],
    }


def resolve_pulse(block: dict) -> LaserPulse:
    """Pulse from a config block; single_cycle overrides fwhm_fs."""
    merged = {**PULSE_DEFAULTS, **block}
    try:
        wavelength = float(merged["wavelength_nm"])
        intensity = float(merged["intensity_Wcm2"])
    except KeyError as exc:
        raise ConfigError(f"pulse block missing key {exc}") from exc
    if merged.get("single_cycle"):
        fwhm = single_cycle_duration(wavelength)
    elif "fwhm_fs" in merged:
        fwhm = float(merged["fwhm_fs"])
    else:
        raise ConfigError("pulse block needs fwhm_fs or single_cycle")
    return LaserPulse(wavelength, intensity, fwhm, float(merged["cep_rad"]), float(merged["center_fs"]))


@dataclass(frozen=True)
class ScanAxis:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.name not in CANONICAL_AXES:
            raise ConfigError(f"unknown scan axis {self.name!r}")
        if self.count < 1:
            raise ConfigError("axis count must be >= 1")
        if self.hi < self.lo:
            raise ConfigError(f"axis {self.name}: max < min")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)


@dataclass
class ScanSpec:
    """Fully resolved scan: system, fixed pulse values, axes, outputs."""

    system_block: dict
    pulse_block: dict  # fixed (non-axis) pulse values
    axes: tuple[ScanAxis, ...]
    observables: tuple[str, ...]
    grid_block: dict = field(default_factory=dict)
    workers: int = 1
    out_path: str | None = None

    def __post_init__(self):
        for obs in self.observables:
            if obs not in OBSERVABLES:
                raise ConfigError(f"unknown observable {obs!r}")
        names = [ax.name for ax in self.axes]
        if len(names) != len(set(names)):
            raise ConfigError("duplicate scan axes")
        if len(names) > 3:
            raise ConfigError("at most three scan axes are supported")
        # keep canonical order regardless of config order
        order = {name: i for i, name in enumerate(CANONICAL_AXES)}
        object.__setattr__(self, "axes", tuple(sorted(self.axes, key=lambda ax: order[ax.name])))

    def identity(self) -> dict:
        """Content that defines the scan result (worker count excluded)."""
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "system": self.system_block,
            "pulse": self.pulse_block,
            "grid": self.grid_block,
            "axes": [
                {"name": ax.name, "min": ax.lo, "max": ax.hi, "count": ax.count} for ax in self.axes
            ],
            "observables": list(self.observables),
        }


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    version = cfg.get("schema_version", CONFIG_SCHEMA_VERSION)
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported config schema_version {version!r} (expected {CONFIG_SCHEMA_VERSION})"
        )
    if "system" not in cfg or "pulse" not in cfg:
        raise ConfigError("config requires 'system' and 'pulse' blocks")
    return cfg


def spec_from_config(cfg: dict) -> ScanSpec:
    system_block = cfg["system"]
    system_from_block(system_block)  # validate eagerly
    pulse_block = {**PULSE_DEFAULTS, **cfg["pulse"]}
    scan = cfg.get("scan", {})
    axes = tuple(
        ScanAxis(name, float(ax["min"]), float(ax["max"]), int(ax["count"]))
        for name, ax in scan.get("axes", {}).items()
    )
    for ax in axes:
        pulse_block.pop(ax.name, None)
    output = cfg.get("output", {})
    observables = tuple(output.get("observables", []))
    return ScanSpec(
        system_block=system_block,
        pulse_block=pulse_block,
        axes=axes,
        observables=observables,
        grid_block=cfg.get("grid", {}),
        workers=int(scan.get("workers", 1)),
        out_path=output.get("path"),
    )


def effective_workers(requested: int) -> int:
    """Requested worker count capped by the IONWAKE_THREADS env var."""
    cap = os.environ.get(WORKERS_ENV_VAR)
    workers = max(1, requested)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {cap!r}")
    return workers


def evaluate_point(
    system: TwoLevelIonSystem,
    pulse: LaserPulse,
    grid_block: dict,
    observables: tuple[str, ...],
) -> dict:
    """Compute the requested observables for one grid point."""
    grid = default_grid(
        system,
        pulse,
        window_tau=float(grid_block.get("window_tau", 3.0)),
        samples_per_cycle=int(grid_block.get("samples_per_cycle", 200)),
        n_samples=grid_block.get("n_samples"),
    )
    dyn = sample_dynamics(system, pulse, grid)
    sem = semianalytic_evolve(system, pulse, grid, dynamics=dyn)
    out = {}
    reference = None
    for obs in observables:
        if obs == "rho0":
            out[obs] = float(sem.rho0[-1])
        elif obs == "rho11":
            out[obs] = float(sem.rho11_a[-1])
        elif obs == "rho22":
            out[obs] = float(sem.rho22_a[-1])
        elif obs == "abs_coh":
            out[obs] = float(np.abs(sem.rho21_a[-1]))
        elif obs == "arg_coh":
            out[obs] = float(np.angle(sem.rho21_a[-1]))
        elif obs == "qsa_error_pct":
            if reference is None:
                reference = solve_diabatic(system, pulse, grid)
            out[obs] = qsa_error(system, pulse, grid, reference=reference, semianalytic=sem)
        elif obs in ("frac_shakeup", "frac_direct", "frac_tic"):
            dec = decompose_population(system, pulse, dynamics=dyn)
            out["frac_shakeup"], out["frac_direct"], out["frac_tic"] = dec.as_tuple()
        elif obs == "ti_over_tic":
            out[obs] = decompose_coherence(system, pulse, dynamics=dyn).ratio
        elif obs in ("gamma_e", "keldysh"):
            diag = diagnostics(system, pulse)
            out["gamma_e"], out["keldysh"] = diag.gamma_e, diag.keldysh
    return {obs: out[obs] for obs in observables}


def point_pulse(spec: ScanSpec, values: dict) -> LaserPulse:
    return resolve_pulse({**spec.pulse_block, **values})


def _scan_worker(task):
    idx, system_block, pulse_block, grid_block, observables = task
    system = system_from_block(system_block)
    try:
        pulse = resolve_pulse(pulse_block)
        values = evaluate_point(system, pulse, grid_block, observables)
        error = ""
    except Exception as exc:  # recorded per point, not fatal for the scan
        values = {obs: float("nan") for obs in observables}
        error = f"{type(exc).__name__}: {exc}".replace("\n", " ")
    return idx, values, error


@dataclass
class ScanTable:
    columns: list[str]
    rows: list[list[str]]  # pre-formatted cells, grid order
    comments: list[str]
    failures: int = 0

    def write(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            for line in self.comments:
                fh.write(f"# {line}\n")
            fh.write(",".join(self.columns) + "\n")
            for row in self.rows:
                fh.write(",".join(row) + "\n")


def _config_digest(identity: dict) -> str:
    blob = json.dumps(identity, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _journal_path(out_path) -> Path:
    return Path(str(out_path) + ".journal")


def _load_journal(path: Path, digest: str) -> dict:
    done = {}
    if not path.exists():
        return done
    with path.open() as fh:
        head = fh.readline()
        try:
            meta = json.loads(head)
        except json.JSONDecodeError:
            raise ConfigError(f"corrupt scan journal {path}")
        if meta.get("config_sha256") != digest:
            raise ConfigError(f"journal {path} belongs to a different scan configuration")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            done[int(entry["i"])] = entry["row"]
    return done


def run_scan(spec: ScanSpec, out_path=None, use_journal: bool = True) -> ScanTable:
    """Run the scan and (optionally) write CSV plus journal.

    Rows appear in grid order (axes iterated in canonical order, values
    ascending) regardless of worker scheduling.
    """
    out_path = out_path if out_path is not None else spec.out_path
    identity = spec.identity()
    digest = _config_digest(identity)

    axis_values = [ax.values() for ax in spec.axes]
    names = [ax.name for ax in spec.axes]
    points = list(itertools.product(*axis_values)) if spec.axes else [()]

    effective_pulse = dict(spec.pulse_block)
    if effective_pulse.get("single_cycle") and "wavelength_nm" in effective_pulse:
        effective_pulse["fwhm_fs"] = single_cycle_duration(float(effective_pulse["wavelength_nm"]))
    comments = [
        "ionwake scan results",
        "config: " + json.dumps(identity, sort_keys=True, separators=(",", ":")),
        "effective_pulse: " + json.dumps(effective_pulse, sort_keys=True, separators=(",", ":")),
        "config_sha256: " + digest,
    ]
    columns = list(names) + list(spec.observables) + (["error"] if spec.observables else [])

    journal = _journal_path(out_path) if (out_path and use_journal) else None
    done = _load_journal(journal, digest) if journal else {}

    tasks = []
    for idx, values in enumerate(points):
        if idx in done:
            continue
        overrides = dict(zip(names, (float(v) for v in values)))
        tasks.append((idx, spec.system_block, {**spec.pulse_block, **overrides}, spec.grid_block, spec.observables))

    workers = effective_workers(spec.workers)
    results = {}
    if tasks:
        if workers > 1 and len(tasks) > 1:
            with multiprocessing.Pool(processes=workers) as pool:
                for idx, values, error in pool.imap_unordered(_scan_worker, tasks):
                    results[idx] = (values, error)
        else:
            for task in tasks:
                idx, values, error = _scan_worker(task)
                results[idx] = (values, error)

    failures = 0
    rows = []
    new_entries = []
    for idx, values in enumerate(points):
        if idx in done:
            row = [str(cell) for cell in done[idx]]
        else:
            obs_values, error = results[idx]
            row = [format_float(v) for v in values]
            row += [format_float(obs_values[obs]) for obs in spec.observables]
            if spec.observables:
                row.append(error)
            new_entries.append({"i": idx, "row": row})
        if spec.observables and row[-1]:
            failures += 1
        rows.append(row)

    table = ScanTable(columns, rows, comments, failures)
    if out_path:
        table.write(out_path)
        if journal is not None:
            is_new = not journal.exists()
            with journal.open("a") as fh:
                if is_new:
                    fh.write(json.dumps({"kind": "ionwake-scan-journal", "config_sha256": digest}) + "\n")
                for entry in new_entries:
                    fh.write(json.dumps(entry) + "\n")
    return table
