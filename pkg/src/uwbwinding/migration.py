"""Image formation from a B-scan: Kirchhoff summation and delay-and-sum beamforming.

Both migrations evaluate pixels independently. Summation over measuring
points (and over the integration window for DAS) runs in a fixed order per
pixel, so splitting the grid across worker threads gives bit-identical
output to a serial run.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .core import BScan, ImageGrid, RadarImage
from .errors import InvalidArgument


@dataclass(frozen=True)
class KirchhoffParams:
    derivative_scheme: Literal["central"] = "central"
    interpolation: Literal["linear"] = "linear"

    def __post_init__(self):
        if self.derivative_scheme != "central":
            raise InvalidArgument(f"unsupported derivative_scheme {self.derivative_scheme!r}")
        if self.interpolation != "linear":
            raise InvalidArgument(f"unsupported interpolation {self.interpolation!r}")


@dataclass(frozen=True)
class DasParams:
    """Delay-and-sum settings.

    integration_len_samples: window length L; None means one pulse duration
        (resolved by the caller via ``for_pulse``).
    square_before_integrate: integrate the squared coherent sum (energy)
        rather than the raw sum.
    centered: place the window symmetrically about the focal delay. With
        False the window starts at the delay, n = 0..L-1.
    """

    integration_len_samples: int = 1
    square_before_integrate: bool = True
    centered: bool = True

    def __post_init__(self):
        if int(self.integration_len_samples) != self.integration_len_samples or self.integration_len_samples < 1:
            raise InvalidArgument("integration_len_samples must be an integer >= 1")

    @classmethod
    def for_pulse(cls, duration_s: float, dt_s: float, **kwargs) -> "DasParams":
        return cls(max(1, int(round(duration_s / dt_s))), **kwargs)

    @property
    def window_lead(self) -> int:
        """Samples of the window that precede the focal delay."""
        return (self.integration_len_samples - 1) // 2 if self.centered else 0


def delay_index(r_t, r_r, r0, c: float, dt: float) -> int:
    """Sample delay floor((|r_t - r0| + |r_r - r0|) / (c*dt)) for one antenna pair."""
    if not (c > 0 and dt > 0):
        raise InvalidArgument("c and dt must be positive")
    path = math.hypot(r_t[0] - r0[0], r_t[1] - r0[1]) + math.hypot(r_r[0] - r0[0], r_r[1] - r0[1])
    return int(math.floor(path / (c * dt)))


def _delay_indices(tx, rx, px, pz, c, dt) -> np.ndarray:
    path = np.hypot(tx[0] - px, tx[1] - pz) + np.hypot(rx[0] - px, rx[1] - pz)
    return np.floor(path / (c * dt)).astype(np.int64)


def _pixel_coords(grid: ImageGrid):
    zz, xx = np.meshgrid(grid.z_centers(), grid.x_centers(), indexing="ij")
    return xx, zz


def _check_grid(grid: ImageGrid):
    if grid.width < 1 or grid.height < 1:
        raise InvalidArgument("empty image grid")


def _run_rows(fn, xx, zz, workers: Optional[int]) -> np.ndarray:
    if not workers or workers <= 1 or xx.shape[0] < 2:
        return fn(xx.ravel(), zz.ravel()).reshape(xx.shape)
    chunks = np.array_split(np.arange(xx.shape[0]), min(workers, xx.shape[0]))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda rows: fn(xx[rows].ravel(), zz[rows].ravel()), chunks))
    return np.concatenate(parts).reshape(xx.shape)


def das_migrate(
    bscan: BScan,
    grid: ImageGrid,
    params: DasParams = DasParams(),
    workers: Optional[int] = None,
) -> RadarImage:
    """Delay-and-sum energy image with negative values clipped to zero.

    The record is read at absolute time, so a B-scan whose ``t_start_s`` is
    not zero is indexed at ``n_i - t_start/dt``.
    """
    _check_grid(grid)
    geom = bscan.geometry
    samp = bscan.sampling
    c, dt = geom.wave_speed_mm_per_s, samp.dt_s
    tx_all, rx_all = geom.tx_positions(), geom.rx_positions()
    start = int(round(samp.t_start_s / dt))
    y = bscan.scans
    n_rec = samp.n_samples
    L = params.integration_len_samples
    taps = np.arange(L) - params.window_lead

    def block(px, pz):
        s = np.zeros((px.size, L))
        for i in range(geom.n_points):
            idx = _delay_indices(tx_all[i], rx_all[i], px, pz, c, dt) - start
            win = idx[:, None] + taps[None, :]
            inside = (win >= 0) & (win < n_rec)
            s += np.where(inside, y[i][np.clip(win, 0, n_rec - 1)], 0.0)
        if params.square_before_integrate:
            s = s * s
        acc = np.zeros(px.size)
        for n in range(L):
            acc += s[:, n]
        return acc

    xx, zz = _pixel_coords(grid)
    return clip_negative(RadarImage(grid, _run_rows(block, xx, zz, workers)))


def kirchhoff_migrate(
    bscan: BScan,
    grid: ImageGrid,
    params: KirchhoffParams = KirchhoffParams(),
    workers: Optional[int] = None,
) -> RadarImage:
    """Discrete Kirchhoff summation over measuring points.

    Each measuring point acts as a monostatic station at the tx/rx midpoint.
    The time derivative is a central difference (one-sided at the record
    ends); off-grid times are linearly interpolated; times outside the record
    contribute nothing.
    """
    _check_grid(grid)
    geom = bscan.geometry
    samp = bscan.sampling
    c, dt, d_m = geom.wave_speed_mm_per_s, samp.dt_s, geom.step_mm
    mids = geom.midpoints()
    y = bscan.scans
    dy = np.gradient(y, dt, axis=1, edge_order=1)
    n_rec = samp.n_samples

    def block(px, pz):
        acc = np.zeros(px.size)
        for k in range(geom.n_points):
            dz = pz - mids[k, 1]
            r = np.hypot(px - mids[k, 0], dz)
            pos = (2.0 * r / c - samp.t_start_s) / dt
            inside = (pos >= 0) & (pos <= n_rec - 1)
            i0 = np.clip(np.floor(pos).astype(np.int64), 0, n_rec - 2)
            frac = pos - i0
            psi = y[k, i0] * (1.0 - frac) + y[k, i0 + 1] * frac
            dpsi = dy[k, i0] * (1.0 - frac) + dy[k, i0 + 1] * frac
            term = (dz * d_m) / (r * r * c) * (dpsi - (c / r) * psi)
            acc += np.where(inside, term, 0.0)
        return acc / (2.0 * np.pi)

    xx, zz = _pixel_coords(grid)
    return RadarImage(grid, _run_rows(block, xx, zz, workers))


def clip_negative(image: RadarImage) -> RadarImage:
    return RadarImage(image.grid, np.maximum(image.values, 0.0))


def migrate(bscan: BScan, grid: ImageGrid, algorithm: str, das_params=None, kirchhoff_params=None, workers=None):
    if algorithm == "das":
        return das_migrate(bscan, grid, das_params or DasParams(), workers)
    if algorithm == "kirchhoff":
        return kirchhoff_migrate(bscan, grid, kirchhoff_params or KirchhoffParams(), workers)
    raise InvalidArgument(f"unknown algorithm {algorithm!r}; expected 'kirchhoff' or 'das'")
