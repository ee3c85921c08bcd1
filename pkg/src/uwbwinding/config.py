"""Pipeline configuration: JSON file merged over defaults taken from the bench set-up.

Defaults: 4.7 GHz pulse with 3.2 GHz (-10 dB) bandwidth, 60 measuring points
20 mm apart, a 650 mm winding 600 mm from the scan line.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Optional

from .analysis import AnalysisParams
from .core import C_AIR_MM_PER_S, ImageGrid, PulseSpec, SamplingSpec, ScanGeometry
from .errors import InvalidArgument, ParseError, UwbError
from .migration import DasParams, KirchhoffParams

ALGORITHMS = ("kirchhoff", "das")

DEFAULTS = {
    "pulse": {
        "center_frequency_hz": 4.7e9,
        "bandwidth_hz": 3.2e9,
        "amplitude": 1.0,
        "duration_s": 0.6e-9,
    },
    "sampling": {"dt_s": 20e-12, "n_samples": 600, "t_start_s": 0.0},
    "geometry": {
        "x0_mm": 0.0,
        "step_mm": 20.0,
        "n_points": 60,
        "tx_offset_mm": [0.0, 0.0],
        "rx_offset_mm": [0.0, 0.0],
        "wave_speed_mm_per_s": C_AIR_MM_PER_S,
    },
    # pixel centres at x = 0, 10, ..., 1180 and z = 400, ..., 800
    "grid": {"x_min_mm": -5.0, "x_max_mm": 1185.0, "z_min_mm": 395.0, "z_max_mm": 805.0, "pixel_mm": 10.0},
    "scene": {"x1_mm": 265.0, "span_mm": 650.0, "z_mm": 600.0, "n_scatterers": 66, "reflectivity": 1.0},
    "algorithm": "das",
    "das": {"integration_len_samples": None, "square_before_integrate": True, "centered": True},
    "kirchhoff": {"derivative_scheme": "central", "interpolation": "linear", "output": "magnitude"},
    "preprocess": {"time_zero_threshold": None, "gate_lo_s": None, "gate_hi_s": None, "taper_samples": 8},
    "analysis": {
        "element_das": [3, 3],
        "element_kirchhoff": [1, 3],
        "min_extent_frac": 0.5,
        "edge_level": None,
    },
    "averaging_count": 1,
    "noise_std": 0.0,
    "noise_relative_to_peak": False,
    "seed": 0,
    "displacements_mm": [0.0, 10.0, 20.0, 40.0],
    "workers": None,
}


@dataclass(frozen=True)
class SceneSpec:
    x1_mm: float
    span_mm: float
    z_mm: float
    n_scatterers: int
    reflectivity: float


@dataclass(frozen=True)
class PreprocessSpec:
    time_zero_threshold: Optional[float]
    gate_lo_s: Optional[float]
    gate_hi_s: Optional[float]
    taper_samples: int


@dataclass(frozen=True)
class PipelineConfig:
    pulse: PulseSpec
    sampling: SamplingSpec
    geometry: ScanGeometry
    grid: ImageGrid
    scene: SceneSpec
    algorithm: str
    das: DasParams
    kirchhoff: KirchhoffParams
    kirchhoff_output: str
    preprocess: PreprocessSpec
    analysis: dict
    averaging_count: int
    noise_std: float
    noise_relative_to_peak: bool
    seed: int
    displacements_mm: tuple
    workers: Optional[int]

    def analysis_params(self, algorithm: Optional[str] = None) -> AnalysisParams:
        alg = algorithm or self.algorithm
        rows, cols = self.analysis[f"element_{alg}"]
        return AnalysisParams((int(rows), int(cols)), self.analysis["min_extent_frac"], self.analysis["edge_level"])


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ParseError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ParseError(f"config key {where!r} must be an object")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def build_config(overrides: Optional[dict] = None) -> PipelineConfig:
    raw = _merge(DEFAULTS, overrides or {})
    try:
        pulse = PulseSpec(**raw["pulse"])
        sampling = SamplingSpec(**raw["sampling"])
        g = raw["geometry"]
        geometry = ScanGeometry.uniform(
            float(g["x0_mm"]),
            float(g["step_mm"]),
            int(g["n_points"]),
            tx_offset_mm=tuple(g["tx_offset_mm"]),
            rx_offset_mm=tuple(g["rx_offset_mm"]),
            wave_speed_mm_per_s=float(g["wave_speed_mm_per_s"]),
        )
        grid = ImageGrid(**raw["grid"])
        d = dict(raw["das"])
        if d["integration_len_samples"] is None:
            das = DasParams.for_pulse(
                pulse.duration_s, sampling.dt_s,
                square_before_integrate=d["square_before_integrate"], centered=d["centered"],
            )
        else:
            das = DasParams(**d)
        k = dict(raw["kirchhoff"])
        output = k.pop("output")
        if output not in ("magnitude", "signed"):
            raise InvalidArgument("kirchhoff.output must be 'magnitude' or 'signed'")
        kirchhoff = KirchhoffParams(**k)
        if raw["algorithm"] not in ALGORITHMS:
            raise InvalidArgument(f"algorithm must be one of {ALGORITHMS}")
        for alg in ALGORITHMS:
            el = raw["analysis"][f"element_{alg}"]
            if len(el) != 2 or any(int(v) % 2 == 0 or int(v) < 1 for v in el):
                raise InvalidArgument(f"analysis.element_{alg} must be two odd positive sizes")
        if int(raw["averaging_count"]) < 1:
            raise InvalidArgument("averaging_count must be >= 1")
        if float(raw["noise_std"]) < 0:
            raise InvalidArgument("noise_std must be >= 0")
        return PipelineConfig(
            pulse=pulse,
            sampling=sampling,
            geometry=geometry,
            grid=grid,
            scene=SceneSpec(**raw["scene"]),
            algorithm=raw["algorithm"],
            das=das,
            kirchhoff=kirchhoff,
            kirchhoff_output=output,
            preprocess=PreprocessSpec(**raw["preprocess"]),
            analysis=raw["analysis"],
            averaging_count=int(raw["averaging_count"]),
            noise_std=float(raw["noise_std"]),
            noise_relative_to_peak=bool(raw["noise_relative_to_peak"]),
            seed=int(raw["seed"]),
            displacements_mm=tuple(float(v) for v in raw["displacements_mm"]),
            workers=raw["workers"],
        )
    except UwbError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"invalid configuration: {exc}") from None


def load_config(path=None) -> PipelineConfig:
    if path is None:
        return build_config()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("configuration must be a JSON object", 1)
    return build_config(data)
