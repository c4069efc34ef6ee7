#!/usr/bin/env python3
"""Render figures from ionwake CSV output.

Usage:
    render.py --kind {qsa-map|scan|buildup|single-cycle} --csv IN.csv --out OUT.png

The script couples to the simulator only through its CSV files: axis and
observable columns plus the ``# config: {...}`` comment that every scan
CSV embeds.  Nothing here imports the simulator package.

Style defaults (all rendering goes through these; edit here, not inline):
    - backend Agg, PNG at 150 dpi, constrained layout
    - signed-error heatmap: diverging ``RdBu_r`` centered on zero, with the
      |error| > 20 % region hatched ('///') and outlined by a black contour
    - population heatmap: ``viridis`` (linear); coherence heatmap: ``magma``
      on a log scale, floored eight decades below its maximum
    - phase-matching overlays: white dashed curves labeled by photon number
    - line plots: coherence in tab:blue, population in tab:red, field
      overlays in grey at 40 % alpha
    - PNG metadata is stripped so re-rendering the same CSV is
      byte-identical

Three physical constants are duplicated from the simulator's published
unit table so the overlay curves can be computed from the CSV alone:
photon hc in eV*nm, the intensity of one atomic unit of field, and the
Hartree in eV.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm, TwoSlopeNorm

# Duplicated unit constants (see module docstring).
HC_EV_NM = 1239.84198
AU_INTENSITY_WCM2 = 3.50944758e16
HARTREE_EV = 27.211386

DPI = 150
EXIT_OK = 0
EXIT_SCHEMA = 2

KINDS = ("qsa-map", "scan", "buildup", "single-cycle")


class SchemaError(ValueError):
    """Input CSV does not match the published column contract."""


@dataclass
class Table:
    """One parsed CSV: comment metadata plus string-valued columns."""

    path: Path
    config: dict | None
    columns: list[str]
    cells: dict[str, list[str]]

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.cells.values()))) if self.cells else 0

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.columns:
                raise SchemaError(f"{self.path}: missing required column '{name}'")

    def numeric(self, name: str) -> np.ndarray:
        self.require(name)
        return np.array(
            [float(v) if v.strip() else math.nan for v in self.cells[name]], dtype=float
        )

    def strings(self, name: str) -> list[str]:
        self.require(name)
        return self.cells[name]


def load_table(path) -> Table:
    path = Path(path)
    config = None
    header: list[str] | None = None
    cells: dict[str, list[str]] = {}
    data_lines: list[str] = []
    # Comment lines are handled as raw text: the embedded config JSON
    # contains quotes and commas that csv.reader would mangle.
    for line in path.read_text().splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comment = stripped[1:].strip()
            if comment.startswith("config:"):
                config = json.loads(comment[len("config:") :])
            continue
        data_lines.append(line)
    for row in csv.reader(data_lines):
        if header is None:
            header = [c.strip() for c in row]
            cells = {name: [] for name in header}
            continue
        for name, value in zip(header, row):
            cells[name].append(value)
    return Table(path=path, config=config, columns=header or [], cells=cells)


def phase_match_wavelength(delta_ev: float, dipole_au: float, intensity_wcm2, n: int):
    """Wavelength (nm) where the Stark-shifted splitting is (2n+1) photons.

    delta + alpha = (2n+1) * omega with the ac Stark shift
    alpha = (dipole * F0)^2 / delta evaluated at the peak field.
    """
    intensity = np.asarray(intensity_wcm2, dtype=float)
    delta_au = delta_ev / HARTREE_EV
    f0_sq = intensity / AU_INTENSITY_WCM2
    alpha_ev = (dipole_au**2 * f0_sq / delta_au) * HARTREE_EV
    return (2 * n + 1) * HC_EV_NM / (delta_ev + alpha_ev)


def _system_constants(table: Table):
    """(splitting eV, dipole au) from the embedded config, or None."""
    cfg = table.config or {}
    system = cfg.get("system")
    if not system:
        return None
    try:
        e1, e2 = system["binding_energies_eV"]
        return abs(float(e2) - float(e1)), float(system["dipole_au"])
    except (KeyError, TypeError, ValueError):
        return None


def _pivot(x: np.ndarray, y: np.ndarray, z: np.ndarray):
    """Scatter triples onto a dense (y, x) grid; absent points become NaN."""
    xs = np.unique(x)
    ys = np.unique(y)
    grid = np.full((ys.size, xs.size), np.nan)
    grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = z
    return xs, ys, grid


def _save(fig, out_path) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    # Strip the default Software tag so output bytes depend only on the data.
    fig.savefig(out_path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)


def render_qsa_map(table: Table, out_path) -> None:
    wavelength = table.numeric("wavelength_nm")
    fwhm = table.numeric("fwhm_fs")
    error = table.numeric("qsa_error_pct")
    xs, ys, grid = _pivot(wavelength, fwhm, error)

    fig, ax = plt.subplots(figsize=(6.4, 4.2), layout="constrained")
    span = np.nanmax(np.abs(grid))
    norm = TwoSlopeNorm(vcenter=0.0, vmin=-span, vmax=span)
    mesh = ax.pcolormesh(xs, ys, grid, norm=norm, cmap="RdBu_r", shading="nearest")
    fig.colorbar(mesh, ax=ax, label="quasistatic error (%)")

    magnitude = np.abs(grid)
    if np.nanmax(magnitude) > 20.0:
        ax.contourf(xs, ys, magnitude, levels=[20.0, np.inf], colors="none", hatches=["///"])
        if np.nanmin(magnitude) < 20.0:
            ax.contour(xs, ys, magnitude, levels=[20.0], colors="k", linewidths=1.2)

    ax.set_xlabel("wavelength (nm)")
    ax.set_ylabel("pulse duration FWHM (fs)")
    ax.set_title("quasistatic error map (hatched: |error| > 20%)")
    _save(fig, out_path)


def render_scan(table: Table, out_path) -> None:
    wavelength = table.numeric("wavelength_nm")
    intensity = table.numeric("intensity_Wcm2")
    pop = table.numeric("rho22")
    coh = table.numeric("abs_coh")

    xs, ys, pop_grid = _pivot(wavelength, intensity, pop)
    _, _, coh_grid = _pivot(wavelength, intensity, coh)
    y_scaled = ys / 1e14

    fig, (ax_pop, ax_coh) = plt.subplots(
        1, 2, figsize=(10.5, 4.0), layout="constrained", sharey=True
    )

    mesh = ax_pop.pcolormesh(xs, y_scaled, pop_grid, cmap="viridis", shading="nearest")
    fig.colorbar(mesh, ax=ax_pop, label="excited-state population")
    ax_pop.set_title("population")

    coh_masked = np.ma.masked_invalid(np.ma.masked_less_equal(coh_grid, 0.0))
    top = float(coh_masked.max()) if coh_masked.count() else 1.0
    norm = LogNorm(vmin=top * 1e-8, vmax=top)
    mesh = ax_coh.pcolormesh(xs, y_scaled, coh_masked, norm=norm, cmap="magma", shading="nearest")
    fig.colorbar(mesh, ax=ax_coh, label="|coherence|")
    ax_coh.set_title("coherence")

    constants = _system_constants(table)
    if constants is None:
        print(f"warning: {table.path}: no system block in CSV config; "
              "skipping phase-matching overlays", file=sys.stderr)
    else:
        delta_ev, dipole_au = constants
        i_curve = np.linspace(ys.min(), ys.max(), 200)
        for n in (2, 3, 4):
            wl_curve = phase_match_wavelength(delta_ev, dipole_au, i_curve, n)
            inside = (wl_curve >= xs.min()) & (wl_curve <= xs.max())
            if not inside.any():
                continue
            ax_coh.plot(wl_curve[inside], i_curve[inside] / 1e14, "w--", linewidth=1.4)
            k = np.argmax(inside)  # label at the first in-range point
            ax_coh.annotate(
                f"{2 * n + 1} photons",
                (wl_curve[inside][0], i_curve[k] / 1e14),
                color="w",
                fontsize=8,
                xytext=(4, 4),
                textcoords="offset points",
            )

    for ax in (ax_pop, ax_coh):
        ax.set_xlabel("wavelength (nm)")
    ax_pop.set_ylabel(r"intensity ($10^{14}$ W/cm$^2$)")
    _save(fig, out_path)


def render_buildup(table: Table, out_path) -> None:
    table.require("wavelength_nm", "t_fs", "field_au", "buildup_re")
    tags = table.strings("wavelength_nm")
    groups: dict[str, list[int]] = {}
    for i, tag in enumerate(tags):
        groups.setdefault(tag, []).append(i)

    t = table.numeric("t_fs")
    field = table.numeric("field_au")
    buildup = table.numeric("buildup_re")

    fig, axes = plt.subplots(
        len(groups), 1, figsize=(7.0, 2.6 * len(groups)), layout="constrained", squeeze=False
    )
    for ax, (tag, idx) in zip(axes[:, 0], groups.items()):
        idx = np.asarray(idx)
        ax.plot(t[idx], buildup[idx], color="tab:blue", linewidth=1.0)
        ax.set_ylabel("Re buildup (a.u.)")
        ax.set_title(f"{float(tag):g} nm")
        ax_f = ax.twinx()
        ax_f.plot(t[idx], field[idx], color="grey", alpha=0.4, linewidth=0.8)
        ax_f.set_ylabel("field (a.u.)", color="grey")
    axes[-1, 0].set_xlabel("time (fs)")
    _save(fig, out_path)


def render_single_cycle(table: Table, out_path) -> None:
    wavelength = table.numeric("wavelength_nm")
    coh = table.numeric("abs_coh")
    pop = table.numeric("rho22")
    order = np.argsort(wavelength)

    fig, ax_coh = plt.subplots(figsize=(6.4, 4.2), layout="constrained")
    ax_coh.semilogy(
        wavelength[order], coh[order], "o-", color="tab:blue", label="|coherence|"
    )
    ax_coh.set_xlabel("wavelength (nm)")
    ax_coh.set_ylabel("|coherence|", color="tab:blue")
    ax_coh.tick_params(axis="y", labelcolor="tab:blue")

    ax_pop = ax_coh.twinx()
    ax_pop.plot(
        wavelength[order], pop[order], "s-", color="tab:red", label="population"
    )
    ax_pop.set_ylabel("excited-state population", color="tab:red")
    ax_pop.tick_params(axis="y", labelcolor="tab:red")

    ax_coh.set_title("single-cycle response vs wavelength")
    _save(fig, out_path)


RENDERERS = {
    "qsa-map": render_qsa_map,
    "scan": render_scan,
    "buildup": render_buildup,
    "single-cycle": render_single_cycle,
}


def render(kind: str, csv_path, out_path) -> int:
    """Render one figure; returns a process exit code."""
    table = load_table(csv_path)
    if table.n_rows == 0:
        print(f"warning: {csv_path}: no data rows; nothing to render", file=sys.stderr)
        return EXIT_OK
    RENDERERS[kind](table, out_path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render.py", description="Render figures from ionwake CSV output"
    )
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--csv", required=True, help="input CSV from the simulator CLI")
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    args = parser.parse_args(argv)
    try:
        return render(args.kind, args.csv, args.out)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
