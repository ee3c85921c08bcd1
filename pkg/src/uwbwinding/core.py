"""Domain types: pulse, sampling, scan geometry, B-scans and image grids.

Units are millimetres and seconds throughout. The measurement line is z = 0
and z grows toward the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

C_AIR_MM_PER_S = 2.998e11

_SPACING_TOL_MM = 1e-9


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise InvalidArgument(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PulseSpec:
    center_frequency_hz: float
    bandwidth_hz: float
    amplitude: float = 1.0
    duration_s: float = 0.6e-9

    def __post_init__(self):
        if not self.center_frequency_hz > 0:
            raise InvalidArgument("center_frequency_hz must be positive")
        if not 0 < self.bandwidth_hz < 2 * self.center_frequency_hz:
            raise InvalidArgument("bandwidth_hz must lie in (0, 2*center_frequency_hz)")
        if not self.duration_s > 0:
            raise InvalidArgument("duration_s must be positive")

    @property
    def wavelength_mm(self) -> float:
        return C_AIR_MM_PER_S / self.center_frequency_hz

    @property
    def sigma_s(self) -> float:
        """Gaussian envelope width giving the requested -10 dB power bandwidth."""
        return math.sqrt(math.log(10.0)) / (math.pi * self.bandwidth_hz)


@dataclass(frozen=True)
class SamplingSpec:
    dt_s: float
    n_samples: int
    t_start_s: float = 0.0

    def __post_init__(self):
        if not self.dt_s > 0:
            raise InvalidArgument("dt_s must be positive")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise InvalidArgument("n_samples must be an integer >= 2")
        if not math.isfinite(self.t_start_s):
            raise InvalidArgument("t_start_s must be finite")

    @property
    def t_end_s(self) -> float:
        """Time of the last sample."""
        return self.t_start_s + (self.n_samples - 1) * self.dt_s

    def times(self) -> np.ndarray:
        return self.t_start_s + np.arange(self.n_samples) * self.dt_s


@dataclass(frozen=True, eq=False)
class ScanGeometry:
    """Measuring points along the x axis plus antenna offsets from each point.

    ``tx_offset_mm`` and ``rx_offset_mm`` are (dx, dz) vectors added to the
    nominal point (x_k, 0).
    """

    x_positions_mm: np.ndarray
    tx_offset_mm: tuple = (0.0, 0.0)
    rx_offset_mm: tuple = (0.0, 0.0)
    wave_speed_mm_per_s: float = C_AIR_MM_PER_S

    def __post_init__(self):
        x = _frozen_array(self.x_positions_mm, 1, "x_positions_mm")
        if x.size < 2:
            raise InvalidArgument("need at least two measuring points")
        steps = np.diff(x)
        if np.any(steps <= 0):
            raise InvalidArgument("x_positions_mm must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > _SPACING_TOL_MM:
            raise InvalidArgument("x_positions_mm must be uniformly spaced")
        object.__setattr__(self, "x_positions_mm", x)
        for name in ("tx_offset_mm", "rx_offset_mm"):
            off = tuple(float(v) for v in getattr(self, name))
            if len(off) != 2 or not all(math.isfinite(v) for v in off):
                raise InvalidArgument(f"{name} must be a finite 2-vector")
            object.__setattr__(self, name, off)
        if not self.wave_speed_mm_per_s > 0:
            raise InvalidArgument("wave_speed_mm_per_s must be positive")

    @classmethod
    def uniform(cls, x0_mm: float, step_mm: float, count: int, **kwargs) -> "ScanGeometry":
        return cls(x0_mm + step_mm * np.arange(count), **kwargs)

    @property
    def n_points(self) -> int:
        return int(self.x_positions_mm.size)

    @property
    def step_mm(self) -> float:
        return float(self.x_positions_mm[1] - self.x_positions_mm[0])

    @property
    def span_mm(self) -> float:
        """Distance between the first and last measuring points, (K-1)*d_M."""
        return float(self.x_positions_mm[-1] - self.x_positions_mm[0])

    def tx_positions(self) -> np.ndarray:
        """(K, 2) array of transmitter (x, z) positions."""
        return self._positions(self.tx_offset_mm)

    def rx_positions(self) -> np.ndarray:
        return self._positions(self.rx_offset_mm)

    def midpoints(self) -> np.ndarray:
        """Effective monostatic points halfway between transmitter and receiver."""
        return 0.5 * (self.tx_positions() + self.rx_positions())

    def _positions(self, offset) -> np.ndarray:
        pts = np.empty((self.n_points, 2))
        pts[:, 0] = self.x_positions_mm + offset[0]
        pts[:, 1] = offset[1]
        return pts

    def same_as(self, other: "ScanGeometry") -> bool:
        return (
            np.array_equal(self.x_positions_mm, other.x_positions_mm)
            and self.tx_offset_mm == other.tx_offset_mm
            and self.rx_offset_mm == other.rx_offset_mm
            and self.wave_speed_mm_per_s == other.wave_speed_mm_per_s
        )


@dataclass(frozen=True, eq=False)
class AScan:
    samples: np.ndarray
    sampling: SamplingSpec

    def __post_init__(self):
        s = _frozen_array(self.samples, 1, "samples")
        if s.size != self.sampling.n_samples:
            raise InvalidArgument(
                f"expected {self.sampling.n_samples} samples, got {s.size}"
            )
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True, eq=False)
class BScan:
    """K x N matrix of echoes; row k was recorded at ``geometry.x_positions_mm[k]``."""

    scans: np.ndarray
    geometry: ScanGeometry
    sampling: SamplingSpec

    def __post_init__(self):
        try:
            raw = np.array(self.scans, dtype=float)
        except ValueError as exc:  # ragged nested sequences
            raise InvalidArgument(f"scans must be rectangular: {exc}") from None
        s = _frozen_array(raw, 2, "scans")
        if s.shape[0] != self.geometry.n_points:
            raise InvalidArgument(
                f"scans has {s.shape[0]} rows but geometry has {self.geometry.n_points} points"
            )
        if s.shape[1] != self.sampling.n_samples:
            raise InvalidArgument(
                f"scans has {s.shape[1]} columns but sampling expects {self.sampling.n_samples}"
            )
        object.__setattr__(self, "scans", s)

    @property
    def shape(self) -> tuple:
        return self.scans.shape

    def with_scans(self, scans, sampling: SamplingSpec | None = None) -> "BScan":
        return BScan(scans, self.geometry, sampling or self.sampling)

    def compatible_with(self, other: "BScan") -> bool:
        return (
            self.scans.shape == other.scans.shape
            and self.sampling == other.sampling
            and self.geometry.same_as(other.geometry)
        )

    def row(self, k: int) -> AScan:
        return AScan(self.scans[k], self.sampling)


@dataclass(frozen=True)
class ImageGrid:
    x_min_mm: float
    x_max_mm: float
    z_min_mm: float
    z_max_mm: float
    pixel_mm: float = 10.0

    def __post_init__(self):
        if not self.x_min_mm < self.x_max_mm:
            raise InvalidArgument("x_min_mm must be < x_max_mm")
        if not self.z_min_mm < self.z_max_mm:
            raise InvalidArgument("z_min_mm must be < z_max_mm")
        if not self.pixel_mm > 0:
            raise InvalidArgument("pixel_mm must be positive")
        if not self.z_min_mm > 0:
            raise InvalidArgument("image region must lie strictly below z = 0")

    @property
    def width(self) -> int:
        return _cells(self.x_max_mm - self.x_min_mm, self.pixel_mm)

    @property
    def height(self) -> int:
        return _cells(self.z_max_mm - self.z_min_mm, self.pixel_mm)

    @property
    def shape(self) -> tuple:
        """(height, width): rows run over z, columns over x."""
        return (self.height, self.width)

    def x_centers(self) -> np.ndarray:
        return self.x_min_mm + (np.arange(self.width) + 0.5) * self.pixel_mm

    def z_centers(self) -> np.ndarray:
        return self.z_min_mm + (np.arange(self.height) + 0.5) * self.pixel_mm

    def pixel_of(self, x_mm: float, z_mm: float) -> tuple:
        """(row, col) of the pixel containing the point."""
        col = int(math.floor((x_mm - self.x_min_mm) / self.pixel_mm))
        row = int(math.floor((z_mm - self.z_min_mm) / self.pixel_mm))
        return row, col


def _cells(extent: float, pixel: float) -> int:
    # tolerate representation error so 1190/10 gives 119, not 120
    return max(1, int(math.ceil(extent / pixel - 1e-9)))


@dataclass(frozen=True, eq=False)
class RadarImage:
    grid: ImageGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _frozen_array(self.values, 2, "values")
        if v.shape != self.grid.shape:
            raise InvalidArgument(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def argmax_pixel(self, absolute: bool = False) -> tuple:
        v = np.abs(self.values) if absolute else self.values
        return tuple(int(i) for i in np.unravel_index(np.argmax(v), v.shape))


def resolution_x(f0_hz: float, P_mm: float, L_mm: float, c_mm_per_s: float = C_AIR_MM_PER_S) -> float:
    """Cross-range resolution (c/f0) * P / (2L).

    ``P_mm`` is the target distance from the scan line, ``L_mm`` the span
    between first and last measuring points.
    """
    for name, v in (("f0_hz", f0_hz), ("P_mm", P_mm), ("L_mm", L_mm), ("c_mm_per_s", c_mm_per_s)):
        if not v > 0:
            raise InvalidArgument(f"{name} must be positive, got {v!r}")
    return (c_mm_per_s / f0_hz) * P_mm / (2.0 * L_mm)


def pulse_waveform(t: np.ndarray, pulse: PulseSpec) -> np.ndarray:
    """Gaussian-modulated cosine centred on t = 0, zero outside +-duration/2."""
    t = np.asarray(t, dtype=float)
    sigma = pulse.sigma_s
    out = pulse.amplitude * np.exp(-(t * t) / (2.0 * sigma * sigma)) * np.cos(
        2.0 * np.pi * pulse.center_frequency_hz * t
    )
    return np.where(np.abs(t) <= 0.5 * pulse.duration_s, out, 0.0)


def synthesize_pulse(pulse: PulseSpec, sampling: SamplingSpec) -> AScan:
    """Sample the transmit pulse with its envelope peak at ``duration_s / 2``."""
    nyquist_dt = 1.0 / (2.5 * (pulse.center_frequency_hz + 0.5 * pulse.bandwidth_hz))
    if sampling.dt_s > nyquist_dt:
        raise InvalidArgument(
            f"dt_s={sampling.dt_s:g} too coarse for the pulse; need dt_s <= {nyquist_dt:g}"
        )
    t_c = 0.5 * pulse.duration_s
    return AScan(pulse_waveform(sampling.times() - t_c, pulse), sampling)
