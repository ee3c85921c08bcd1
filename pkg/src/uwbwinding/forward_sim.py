"""Point-scatterer forward model producing synthetic B-scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BScan, PulseSpec, SamplingSpec, ScanGeometry, pulse_waveform
from .errors import InvalidArgument


@dataclass(frozen=True)
class Scatterer:
    x_mm: float
    z_mm: float
    reflectivity: float = 1.0

    def __post_init__(self):
        if not self.z_mm > 0:
            raise InvalidArgument("scatterer must sit below the scan line (z_mm > 0)")
        if not math.isfinite(self.reflectivity) or not math.isfinite(self.x_mm):
            raise InvalidArgument("scatterer coordinates and reflectivity must be finite")


@dataclass(frozen=True)
class SceneModel:
    scatterers: tuple
    noise_std: float = 0.0
    clutter: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        object.__setattr__(self, "clutter", tuple(self.clutter))
        if not self.scatterers:
            raise InvalidArgument("scene needs at least one scatterer")
        if not self.noise_std >= 0:
            raise InvalidArgument("noise_std must be >= 0")

    def all_scatterers(self) -> tuple:
        return self.scatterers + self.clutter

    def union(self, other: "SceneModel") -> "SceneModel":
        return SceneModel(
            self.scatterers + other.scatterers,
            self.noise_std,
            self.clutter + other.clutter,
        )


def make_winding_scene(
    x1_mm: float,
    x2_mm: float,
    z_mm: float,
    n_scatterers: int = 66,
    reflectivity: float = 1.0,
    noise_std: float = 0.0,
) -> SceneModel:
    """A row of equal scatterers spanning [x1, x2] at depth z, endpoints included."""
    if not x1_mm < x2_mm:
        raise InvalidArgument(f"x1_mm ({x1_mm}) must be < x2_mm ({x2_mm})")
    if n_scatterers < 2:
        raise InvalidArgument("n_scatterers must be >= 2")
    if not z_mm > 0:
        raise InvalidArgument("z_mm must be positive")
    xs = np.linspace(x1_mm, x2_mm, int(n_scatterers))
    return SceneModel(
        tuple(Scatterer(float(x), float(z_mm), float(reflectivity)) for x in xs),
        noise_std,
    )


def displace_scene(scene: SceneModel, dx_mm: float) -> SceneModel:
    """Shift the target scatterers along x. Static clutter stays put."""
    moved = tuple(Scatterer(s.x_mm + dx_mm, s.z_mm, s.reflectivity) for s in scene.scatterers)
    return SceneModel(moved, scene.noise_std, scene.clutter)


def two_way_delays(scatterers, geometry: ScanGeometry):
    """Delays (K, S) in seconds and amplitude weights 1/(R_t*R_r) in mm^-2."""
    pts = np.array([[s.x_mm, s.z_mm] for s in scatterers], dtype=float)
    tx = geometry.tx_positions()
    rx = geometry.rx_positions()
    r_t = np.hypot(tx[:, None, 0] - pts[None, :, 0], tx[:, None, 1] - pts[None, :, 1])
    r_r = np.hypot(rx[:, None, 0] - pts[None, :, 0], rx[:, None, 1] - pts[None, :, 1])
    tau = (r_t + r_r) / geometry.wave_speed_mm_per_s
    return tau, 1.0 / (r_t * r_r)


def required_record_s(scene: SceneModel, geometry: ScanGeometry, pulse: PulseSpec) -> float:
    """Latest time the record must reach: max two-way delay plus one pulse duration."""
    tau, _ = two_way_delays(scene.all_scatterers(), geometry)
    return float(tau.max()) + pulse.duration_s


def echo_matrix(scene: SceneModel, geometry: ScanGeometry, pulse: PulseSpec, sampling: SamplingSpec) -> np.ndarray:
    """Noise-free K x N echoes. Each replica has its envelope peak at its delay."""
    needed = required_record_s(scene, geometry, pulse)
    t_end = sampling.t_start_s + sampling.n_samples * sampling.dt_s
    if not needed < t_end:
        need_n = int(math.floor((needed - sampling.t_start_s) / sampling.dt_s)) + 1
        raise InvalidArgument(
            f"sampling window too short: record must extend past {needed:.6g} s "
            f"(minimum duration {needed - sampling.t_start_s:.6g} s, n_samples > {need_n}), "
            f"but it ends at {t_end:.6g} s"
        )
    scatterers = scene.all_scatterers()
    tau, weight = two_way_delays(scatterers, geometry)
    weight = weight * np.array([s.reflectivity for s in scatterers])[None, :]
    t = sampling.times()
    out = np.zeros((geometry.n_points, sampling.n_samples))
    for j in range(len(scatterers)):
        # accumulate scatterers in scene order so superposition is reproducible
        out += weight[:, j, None] * pulse_waveform(t[None, :] - tau[:, j, None], pulse)
    return out


def _row_noise(seed, shape, std) -> np.ndarray:
    k, n = shape
    streams = np.random.SeedSequence(seed).spawn(k)
    noise = np.empty(shape)
    for i, ss in enumerate(streams):
        noise[i] = np.random.default_rng(ss).normal(0.0, std, n)
    return noise


def simulate_bscan(
    scene: SceneModel,
    geometry: ScanGeometry,
    pulse: PulseSpec,
    sampling: SamplingSpec,
    seed=0,
) -> BScan:
    """Synthesize a B-scan of ``scene``; noise rows use per-row seeded streams."""
    data = echo_matrix(scene, geometry, pulse, sampling)
    if scene.noise_std > 0:
        data = data + _row_noise(seed, data.shape, scene.noise_std)
    return BScan(data, geometry, sampling)


def simulate_averaged(
    scene: SceneModel,
    geometry: ScanGeometry,
    pulse: PulseSpec,
    sampling: SamplingSpec,
    seed=0,
    count: int = 1,
) -> BScan:
    """Mean of ``count`` repeated acquisitions, repeat r seeded with (seed, r).

    Equal to ``average_scans([simulate_bscan(..., seed=[seed, r]) ...])``
    but computes the deterministic echoes once.
    """
    if count < 1:
        raise InvalidArgument("count must be >= 1")
    clean = echo_matrix(scene, geometry, pulse, sampling)
    repeats = []
    for r in range(count):
        data = clean
        if scene.noise_std > 0:
            data = clean + _row_noise([seed, r], clean.shape, scene.noise_std)
        repeats.append(BScan(data, geometry, sampling))
    return average_scans(repeats)


def average_scans(bscans) -> BScan:
    bscans = list(bscans)
    if not bscans:
        raise InvalidArgument("nothing to average")
    first = bscans[0]
    for b in bscans[1:]:
        if not first.compatible_with(b):
            raise InvalidArgument("B-scans differ in shape, geometry or sampling")
    total = np.zeros(first.shape)
    for b in bscans:
        total += b.scans
    return first.with_scans(total / len(bscans))
