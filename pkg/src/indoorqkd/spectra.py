"""Measured lamp spectra: loading, interpolation, and unit conversion.

Two curve kinds circulate in the pipeline.  A ``source-psd`` curve gives the
bulb's emitted power spectral density in W/nm; an ``irradiance`` curve gives
the spectral irradiance in W/nm/m^2 seen by a probe at a known distance.
Curves are kept as sampled points with plain linear interpolation in between;
the ends of a real measurement are often noisy and are deliberately not
smoothed or extrapolated.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from importlib import resources

__all__ = [
    "OutOfBandError",
    "SpectrumFormatError",
    "SpectrumKindError",
    "SpectralCurve",
    "density_at",
    "irradiance_to_psd",
    "load_spectrum_csv",
    "bundled_spectrum_path",
]

KINDS = ("source-psd", "irradiance")


class OutOfBandError(ValueError):
    """Requested wavelength lies outside the sampled band."""


class SpectrumFormatError(ValueError):
    """A spectrum file could not be parsed; the message names the bad row."""


class SpectrumKindError(TypeError):
    """A curve of the wrong kind was passed to a conversion."""


@dataclass(frozen=True, slots=True)
class SpectralCurve:
    """Sampled spectral density, strictly increasing in wavelength."""

    wavelengths_nm: tuple[float, ...]
    values: tuple[float, ...]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SpectrumKindError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if len(self.wavelengths_nm) != len(self.values):
            raise ValueError("wavelength and value arrays differ in length")
        if len(self.wavelengths_nm) < 2:
            raise ValueError("a spectral curve needs at least two samples")
        for a, b in zip(self.wavelengths_nm, self.wavelengths_nm[1:]):
            if not b > a:
                raise ValueError("wavelengths must be strictly increasing")
        if any(v < 0.0 for v in self.values):
            raise ValueError("spectral densities must be non-negative")

    def band(self) -> tuple[float, float]:
        return (self.wavelengths_nm[0], self.wavelengths_nm[-1])


def density_at(curve: SpectralCurve, wavelength_nm: float) -> float:
    """Linearly interpolated density at ``wavelength_nm``.

    Raises OutOfBandError outside the sampled band; silent extrapolation of a
    measurement tail would invent data.
    """
    lo, hi = curve.band()
    if not lo <= wavelength_nm <= hi:
        raise OutOfBandError(
            f"wavelength {wavelength_nm:g} nm outside sampled band [{lo:g}, {hi:g}] nm"
        )
    grid = curve.wavelengths_nm
    i = bisect_right(grid, wavelength_nm)
    if i == len(grid):
        return curve.values[-1]
    if grid[i - 1] == wavelength_nm:
        return curve.values[i - 1]
    x0, x1 = grid[i - 1], grid[i]
    y0, y1 = curve.values[i - 1], curve.values[i]
    t = (wavelength_nm - x0) / (x1 - x0)
    return y0 + t * (y1 - y0)


def irradiance_to_psd(curve: SpectralCurve, distance_m: float) -> SpectralCurve:
    """Convert a probe irradiance curve to an equivalent source PSD.

    Treats the bulb as an isotropic point source at the probe distance, so
    S(lambda) = 4 pi d^2 E(lambda).  Real bulbs are not isotropic; this keeps
    the order of magnitude and is the documented approximation here.
    """
    if curve.kind != "irradiance":
        raise SpectrumKindError(f"expected an irradiance curve, got kind {curve.kind!r}")
    if distance_m <= 0.0:
        raise ValueError("distance_m must be positive")
    scale = 4.0 * math.pi * distance_m * distance_m
    return SpectralCurve(
        wavelengths_nm=curve.wavelengths_nm,
        values=tuple(scale * v for v in curve.values),
        kind="source-psd",
    )


def load_spectrum_csv(path, kind: str) -> SpectralCurve:
    """Load a two-column (wavelength_nm, density) CSV with a header row."""
    rows: list[tuple[float, float]] = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise SpectrumFormatError(f"{path}: missing two-column header row")
        for number, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # ignore blank lines
            if len(row) != 2:
                raise SpectrumFormatError(f"{path}: row {number}: expected two columns, got {row!r}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError as exc:
                raise SpectrumFormatError(f"{path}: row {number}: {exc}") from None
    if len(rows) < 2:
        raise SpectrumFormatError(f"{path}: fewer than two data rows")
    try:
        return SpectralCurve(
            wavelengths_nm=tuple(r[0] for r in rows),
            values=tuple(r[1] for r in rows),
            kind=kind,
        )
    except ValueError as exc:
        raise SpectrumFormatError(f"{path}: {exc}") from None


def bundled_spectrum_path(name: str):
    """Filesystem path of a sample spectrum shipped with the package."""
    return resources.files("indoorqkd.data").joinpath(name)
