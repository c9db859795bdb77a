"""Batch front-end: INI config in, ``sweep.csv`` and ``summary.txt`` out.

The config is a flat key = value file grouped into sections named after the
library modules.  ``indoorqkd --dump-defaults`` prints the nominal
configuration; edit and pass it back.  Exit codes: 0 success, 2 config
error, 3 when --strict escalates a tessellation-convergence warning.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import reflected_gain_convergence
from .experiments import (
    AMBIENT_SCENARIOS,
    NOMINAL,
    SCENARIOS,
    Scenario,
    ambient_tolerance,
    build_setup,
    secure_fov_boundary,
    sweep,
)
from .spectra import (
    KINDS,
    OutOfBandError,
    SpectrumFormatError,
    density_at,
    irradiance_to_psd,
    load_spectrum_csv,
)

__all__ = ["RunConfig", "load_config", "validate", "dump_defaults", "run", "main"]

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_STRICT_CONVERGENCE = 3

_CSV_COLUMNS = (
    "h_dc", "eta", "n_b1", "n_b2", "n_n",
    "y1", "q1", "e1", "q_mu", "e_mu",
    "rate_bits_per_pulse", "secure_flag",
)

# Section layout of the config file.  Parameter keys match the nominal table
# in experiments; the rest is run plumbing.
_SECTION_KEYS: dict[str, tuple[str, ...]] = {
    "geometry": (
        "room_x_m", "room_y_m", "room_z_m",
        "wall_reflectivity", "floor_reflectivity",
        "lamp_x_m", "lamp_y_m", "lamp_semi_angle_deg",
    ),
    "channel": (
        "wavelength_nm", "detector_area_m2", "concentrator_index",
        "filter_transmission", "filter_bandwidth_nm",
        "detector_efficiency", "pulse_width_s",
    ),
    "noise": (
        "dark_count_rate_hz", "ambient_irradiance_w_nm_m2",
        "lamp_spectrum_file", "lamp_spectrum_kind", "lamp_spectrum_distance_m",
    ),
    "keyrate": (
        "mean_photons_per_pulse", "sift_factor",
        "error_correction_inefficiency", "misalignment_error",
    ),
    "experiments": (
        "scenario",
        "fov_min_deg", "fov_max_deg", "fov_steps", "fov_scale",
        "source_min", "source_max", "source_steps", "source_scale",
    ),
    "cli": (
        "output_dir", "resolution_patches_per_meter", "strict", "random_seed",
    ),
}

# None-valued nominals are spelled as sentinels so the file stays greppable.
_SENTINELS = {"lamp_x_m": "center", "lamp_y_m": "center", "filter_bandwidth_nm": "matched"}


@dataclass(slots=True)
class RunConfig:
    """Everything a batch run needs, resolved from defaults plus one file."""

    scenario: str = "lamp-center"
    overrides: dict[str, float | None] = field(default_factory=dict)
    fov_min_deg: float = 2.0
    fov_max_deg: float = 30.0
    fov_steps: int = 29
    fov_scale: str = "linear"
    source_min: float = 1e-7
    source_max: float = 1e-4
    source_steps: int = 13
    source_scale: str = "log"
    lamp_spectrum_file: str = ""
    lamp_spectrum_kind: str = "source-psd"
    lamp_spectrum_distance_m: float = 1.0
    output_dir: str = "out"
    resolution_patches_per_meter: int = 10
    strict: bool = False
    random_seed: int = 0

    def effective_parameters(self) -> dict[str, object]:
        """Flat view of everything that influences the run, for comparisons."""
        merged: dict[str, object] = dict(NOMINAL)
        merged.update(self.overrides)
        for name in (
            "scenario", "fov_min_deg", "fov_max_deg", "fov_steps", "fov_scale",
            "source_min", "source_max", "source_steps", "source_scale",
            "lamp_spectrum_file", "lamp_spectrum_kind", "lamp_spectrum_distance_m",
            "output_dir", "resolution_patches_per_meter", "strict", "random_seed",
        ):
            merged[name] = getattr(self, name)
        return merged

    def fov_values(self) -> tuple[float, ...]:
        return _axis(self.fov_min_deg, self.fov_max_deg, self.fov_steps, self.fov_scale)

    def source_values(self) -> tuple[float, ...]:
        if self.lamp_spectrum_file:
            return (self._spectrum_level(),)
        return _axis(self.source_min, self.source_max, self.source_steps, self.source_scale)

    def _spectrum_level(self) -> float:
        curve = load_spectrum_csv(self.lamp_spectrum_file, self.lamp_spectrum_kind)
        wavelength = float(self.overrides.get("wavelength_nm", NOMINAL["wavelength_nm"]))
        if self.scenario in AMBIENT_SCENARIOS:
            return density_at(curve, wavelength)
        if curve.kind == "irradiance":
            curve = irradiance_to_psd(curve, self.lamp_spectrum_distance_m)
        return density_at(curve, wavelength)


def _axis(lo: float, hi: float, steps: int, scale: str) -> tuple[float, ...]:
    if steps < 1:
        raise ValueError("axis steps must be >= 1")
    if steps == 1:
        return (lo,)
    if scale == "linear":
        return tuple(np.linspace(lo, hi, steps).tolist())
    if scale == "log":
        return tuple(np.logspace(math.log10(lo), math.log10(hi), steps).tolist())
    raise ValueError(f"unknown axis scale {scale!r}")


def _format_value(key: str, value: object) -> str:
    if value is None:
        return _SENTINELS[key]
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_defaults() -> str:
    """Render the built-in defaults as a parseable config file."""
    config = RunConfig()
    lines = ["# indoorqkd run configuration (defaults)", ""]
    for section, keys in _SECTION_KEYS.items():
        lines.append(f"[{section}]")
        for key in keys:
            if key in NOMINAL:
                value = _format_value(key, NOMINAL[key])
            else:
                value = _format_value(key, getattr(config, key))
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def load_config(path: str | Path | None) -> tuple[RunConfig, list[str]]:
    """Parse a config file into a RunConfig plus parse-stage diagnostics.

    Missing file sections fall back to defaults.  ``path=None`` returns the
    defaults untouched.  Diagnostics are strings; an empty list means clean.
    """
    config = RunConfig()
    diagnostics: list[str] = []
    if path is None:
        return config, diagnostics

    parser = configparser.ConfigParser(interpolation=None)
    try:
        read = parser.read(str(path))
    except configparser.Error as exc:
        return config, [f"config parse error: {exc}"]
    if not read:
        return config, [f"config file not found: {path}"]

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            diagnostics.append(f"[{section}]: unknown section")
            continue
        known = _SECTION_KEYS[section]
        for key, raw in parser.items(section):
            if key not in known:
                diagnostics.append(f"[{section}] {key}: unknown key")
                continue
            try:
                _apply_key(config, key, raw.strip())
            except ValueError as exc:
                diagnostics.append(f"[{section}] {key}: {exc}")
    return config, diagnostics


def _apply_key(config: RunConfig, key: str, raw: str) -> None:
    if key in _SENTINELS and raw.lower() == _SENTINELS[key]:
        config.overrides[key] = None
        return
    if key in NOMINAL:
        config.overrides[key] = float(raw)
        return
    if key in ("fov_steps", "source_steps", "resolution_patches_per_meter", "random_seed"):
        setattr(config, key, int(raw))
        return
    if key == "strict":
        config.strict = _parse_bool(raw)
        return
    if key in ("scenario", "fov_scale", "source_scale", "output_dir",
               "lamp_spectrum_file", "lamp_spectrum_kind"):
        setattr(config, key, raw)
        return
    setattr(config, key, float(raw))


def validate(config: RunConfig) -> list[str]:
    """Non-mutating sanity check; returns one diagnostic per problem."""
    out: list[str] = []
    p = dict(NOMINAL)
    p.update(config.overrides)

    def bad(key: str, why: str) -> None:
        out.append(f"{key} = {p.get(key, getattr(config, key, None))!r}: {why}")

    if config.scenario not in SCENARIOS:
        out.append(f"scenario = {config.scenario!r}: unknown; choose one of {', '.join(SCENARIOS)}")
    for key in ("wall_reflectivity", "floor_reflectivity"):
        if not 0.0 <= float(p[key]) <= 1.0:
            bad(key, "reflectivity must lie in [0, 1]")
    if not 0.0 < float(p["lamp_semi_angle_deg"]) < 90.0:
        bad("lamp_semi_angle_deg", "Lambert mode is undefined outside (0, 90) degrees")
    for key in ("room_x_m", "room_y_m", "room_z_m", "detector_area_m2",
                "pulse_width_s", "wavelength_nm"):
        if float(p[key]) <= 0.0:
            bad(key, "must be positive")
    if float(p["concentrator_index"]) < 1.0:
        bad("concentrator_index", "refractive index must be >= 1")
    if not 0.0 < float(p["filter_transmission"]) <= 1.0:
        bad("filter_transmission", "must lie in (0, 1]")
    if p["filter_bandwidth_nm"] is not None and float(p["filter_bandwidth_nm"]) <= 0.0:
        bad("filter_bandwidth_nm", "must be positive (or 'matched')")
    if not 0.0 <= float(p["detector_efficiency"]) <= 1.0:
        bad("detector_efficiency", "must lie in [0, 1]")
    if float(p["dark_count_rate_hz"]) < 0.0:
        bad("dark_count_rate_hz", "must be non-negative")
    if float(p["ambient_irradiance_w_nm_m2"]) < 0.0:
        bad("ambient_irradiance_w_nm_m2", "must be non-negative")
    if float(p["mean_photons_per_pulse"]) < 0.0:
        bad("mean_photons_per_pulse", "must be non-negative")
    if not 0.0 < float(p["sift_factor"]) <= 1.0:
        bad("sift_factor", "must lie in (0, 1]")
    if float(p["error_correction_inefficiency"]) < 1.0:
        bad("error_correction_inefficiency", "must be >= 1")
    if not 0.0 <= float(p["misalignment_error"]) <= 0.5:
        bad("misalignment_error", "must lie in [0, 0.5]")
    for key in ("lamp_x_m", "lamp_y_m"):
        if p[key] is not None:
            axis_len = float(p["room_x_m"] if key == "lamp_x_m" else p["room_y_m"])
            if not 0.0 <= float(p[key]) <= axis_len:
                bad(key, "lamp must sit inside the room (or 'center')")

    for prefix in ("fov", "source"):
        lo = getattr(config, f"{prefix}_min" + ("_deg" if prefix == "fov" else ""))
        hi = getattr(config, f"{prefix}_max" + ("_deg" if prefix == "fov" else ""))
        steps = getattr(config, f"{prefix}_steps")
        scale = getattr(config, f"{prefix}_scale")
        if steps < 1:
            out.append(f"{prefix}_steps = {steps}: must be >= 1")
        if scale not in ("linear", "log"):
            out.append(f"{prefix}_scale = {scale!r}: must be 'linear' or 'log'")
        if lo > hi:
            out.append(f"{prefix} axis: min {lo!r} exceeds max {hi!r}")
        if scale == "log" and lo <= 0.0:
            out.append(f"{prefix} axis: log scale needs a positive minimum, got {lo!r}")
    if not 0.0 < config.fov_min_deg <= 90.0 or not 0.0 < config.fov_max_deg <= 90.0:
        out.append("fov axis must lie inside (0, 90] degrees")
    if config.resolution_patches_per_meter < 1:
        out.append(f"resolution_patches_per_meter = {config.resolution_patches_per_meter}: must be >= 1")

    if config.lamp_spectrum_file:
        if config.lamp_spectrum_kind not in KINDS:
            out.append(
                f"lamp_spectrum_kind = {config.lamp_spectrum_kind!r}: must be one of {', '.join(KINDS)}"
            )
        elif not Path(config.lamp_spectrum_file).exists():
            out.append(f"lamp_spectrum_file = {config.lamp_spectrum_file!r}: file not found")
        elif config.scenario in AMBIENT_SCENARIOS and config.lamp_spectrum_kind != "irradiance":
            out.append("ambient scenarios take an 'irradiance' spectrum, not a source PSD")
        else:
            try:
                config._spectrum_level()
            except OutOfBandError as exc:
                out.append(f"lamp_spectrum_file: {exc}")
            except SpectrumFormatError as exc:
                out.append(f"lamp_spectrum_file: {exc}")
        if config.lamp_spectrum_distance_m <= 0.0:
            out.append("lamp_spectrum_distance_m must be positive")
    return out


def _csv_line(values: list[float], secure: bool) -> str:
    cells = [f"{v:.9e}" for v in values]
    cells.append("true" if secure else "false")
    return ",".join(cells)


def run(config: RunConfig) -> int:
    """Execute one configured sweep; write sweep.csv and summary.txt."""
    problems = validate(config)
    if problems:
        for line in problems:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    scenario = Scenario.named(config.scenario, {
        k: v for k, v in config.overrides.items() if k in NOMINAL
    })
    try:
        fov_values = config.fov_values()
        source_values = config.source_values()
    except (ValueError, OutOfBandError, SpectrumFormatError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    grid = sweep(
        scenario, fov_values, source_values,
        patches_per_meter=config.resolution_patches_per_meter,
    )

    ambient_run = config.scenario in AMBIENT_SCENARIOS
    source_column = "pn_w_per_nm_m2" if ambient_run else "psd_w_per_nm"
    header = ",".join(("fov_deg", source_column) + _CSV_COLUMNS)
    rows = [header]
    for row in grid.points:
        for point in row:
            r = point.report
            rows.append(_csv_line(
                [
                    point.fov_deg, point.source_level,
                    point.gains.line_of_sight, point.gains.transmittance,
                    point.budget.ambient, point.budget.lamp_bounce, point.budget.total,
                    r.y1, r.q1, r.e1, r.q_mu, r.e_mu, r.rate,
                ],
                r.secure,
            ))
    (out_dir / "sweep.csv").write_text("\n".join(rows) + "\n", encoding="ascii")

    convergence_note, strict_trip = _convergence_check(config, scenario, max(fov_values), max(source_values))
    summary = _summarize(config, scenario, grid, convergence_note)
    (out_dir / "summary.txt").write_text(summary, encoding="utf-8")
    print(summary, end="")

    if strict_trip:
        print("convergence warning escalated by --strict", file=sys.stderr)
        return EXIT_STRICT_CONVERGENCE
    return EXIT_OK


def _convergence_check(
    config: RunConfig, scenario: Scenario, fov_deg: float, source_level: float
) -> tuple[str, bool]:
    """Probe tessellation convergence at the widest-FOV corner of the grid."""
    if config.scenario in AMBIENT_SCENARIOS or source_level <= 0.0:
        return "convergence: no reflected-light integral in this run\n", False
    setup = build_setup(scenario, fov_deg, source_level)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = reflected_gain_convergence(
            setup.room, config.resolution_patches_per_meter
        )
    note = (
        f"convergence: reflected integral {report.value:.9e} at "
        f"{report.patches_per_meter}/m vs {report.refined_value:.9e} refined; "
        f"relative change {report.rel_change:.3e}; "
        f"{'converged' if report.converged else 'NOT converged'}\n"
    )
    return note, bool(caught) and config.strict


def _summarize(config: RunConfig, scenario: Scenario, grid, convergence_note: str) -> str:
    ambient_run = config.scenario in AMBIENT_SCENARIOS
    unit = "W/nm/m^2" if ambient_run else "W/nm"
    points = [p for row in grid.points for p in row]
    secure_count = sum(1 for p in points if p.report.secure)
    lines = [
        f"scenario: {config.scenario}",
        f"grid: {len(grid.fov_values_deg)} FOV values x {len(grid.source_values)} source values",
        f"resolution: {config.resolution_patches_per_meter} patches per meter",
        f"secure points: {secure_count} of {len(points)}",
    ]
    lines.append("largest secure FOV per source level (grid resolution):")
    for j, level in enumerate(grid.source_values):
        secure_fovs = [
            grid.fov_values_deg[i]
            for i in range(len(grid.fov_values_deg))
            if grid.points[i][j].report.secure
        ]
        frontier = f"{max(secure_fovs):.1f} deg" if secure_fovs else "none"
        lines.append(f"  {level:.9e} {unit}: {frontier}")

    if ambient_run:
        tolerance = ambient_tolerance(
            scenario,
            fov_floor_deg=config.fov_min_deg,
            fov_ceiling_deg=config.fov_max_deg,
            patches_per_meter=config.resolution_patches_per_meter,
        )
        lines.append(f"ambient tolerance (largest secure level): {tolerance:.9e} {unit}")
    else:
        mid = grid.source_values[len(grid.source_values) // 2]
        boundary = secure_fov_boundary(
            scenario, mid,
            patches_per_meter=config.resolution_patches_per_meter,
            fov_max_deg=config.fov_max_deg,
        )
        text = "none secure" if boundary is None else f"{boundary:.1f} deg"
        lines.append(f"refined secure-FOV boundary at {mid:.9e} {unit}: {text}")
    return "\n".join(lines) + "\n" + convergence_note


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="indoorqkd",
        description="Indoor wireless QKD feasibility sweeps: secure-region maps from one config file.",
    )
    parser.add_argument("config", nargs="?", default=None, help="INI config file (defaults if omitted)")
    parser.add_argument("--scenario", choices=SCENARIOS, help="override the configured scenario")
    parser.add_argument("--resolution", type=int, metavar="N", help="tessellation patches per meter")
    parser.add_argument("--strict", action="store_true", help="escalate convergence warnings to exit 3")
    parser.add_argument("--dump-defaults", action="store_true", help="print the default config and exit")
    parser.add_argument("--out", metavar="DIR", help="output directory (default from config)")
    args = parser.parse_args(argv)

    if args.dump_defaults:
        sys.stdout.write(dump_defaults())
        return EXIT_OK

    config, diagnostics = load_config(args.config)
    if diagnostics:
        for line in diagnostics:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    if args.scenario:
        config.scenario = args.scenario
    if args.resolution is not None:
        config.resolution_patches_per_meter = args.resolution
    if args.strict:
        config.strict = True
    if args.out:
        config.output_dir = args.out
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
