"""Strip segmentation and axial-position measurement on migrated radar images.

The chain is: 8-bit normalisation, grayscale opening, Otsu threshold,
binarisation, 8-connected labelling, removal of short strips, reference
selection, edge extent along x, and the centre abscissa (X1 + X2) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import ndimage

from .core import ImageGrid, RadarImage
from .errors import (
    DegenerateHistogramError,
    EmptyEdgeError,
    InvalidArgument,
    NoStripError,
    UndefinedErrorPct,
)


@dataclass(frozen=True, eq=False)
class GrayImage:
    grid: ImageGrid
    levels: np.ndarray = field(repr=False)

    def __post_init__(self):
        lv = np.asarray(self.levels)
        if lv.shape != self.grid.shape:
            raise InvalidArgument(f"levels shape {lv.shape} does not match grid {self.grid.shape}")
        if lv.size and (lv.min() < 0 or lv.max() > 255):
            raise InvalidArgument("gray levels must lie in 0..255")
        lv = lv.astype(np.uint8)
        lv.flags.writeable = False
        object.__setattr__(self, "levels", lv)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    grid: ImageGrid
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != self.grid.shape:
            raise InvalidArgument("mask shape does not match grid")
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)


@dataclass(frozen=True, eq=False)
class StructElement:
    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.ndim != 2 or m.shape[0] % 2 == 0 or m.shape[1] % 2 == 0:
            raise InvalidArgument("structuring element must be 2-D with odd dimensions")
        if not m[m.shape[0] // 2, m.shape[1] // 2]:
            # anchor is the centre; it must belong to the element
            raise InvalidArgument("structuring element must contain its centre")
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def square(cls, size: int = 3) -> "StructElement":
        return cls(np.ones((size, size), dtype=bool))

    @property
    def anchor(self) -> tuple:
        return (self.mask.shape[0] // 2, self.mask.shape[1] // 2)


@dataclass(frozen=True, eq=False)
class Strip:
    strip_id: int
    pixels: np.ndarray = field(repr=False)  # (n, 2) array of (row, col)
    x_extent_mm: tuple
    area_px: int
    mean_level: Optional[float] = None

    @property
    def length_mm(self) -> float:
        return self.x_extent_mm[1] - self.x_extent_mm[0]


@dataclass(frozen=True)
class StripReport:
    X1_mm: float
    X2_mm: float
    Xc_mm: float
    reference_strip_id: int
    threshold: Optional[int] = None
    strips: tuple = ()

    def __post_init__(self):
        if self.X1_mm > self.X2_mm:
            raise InvalidArgument("X1_mm must not exceed X2_mm")


@dataclass(frozen=True)
class DisplacementReport:
    baseline_Xc_mm: float
    state_Xc_mm: float
    displacement_est_mm: float
    displacement_actual_mm: Optional[float] = None
    error_pct: Optional[float] = None


def normalize_to_gray(image: RadarImage) -> GrayImage:
    """Min-max map onto 0..255, rounding half up; a constant image maps to 0."""
    v = np.asarray(image.values, dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise InvalidArgument("image must be non-empty and finite")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return GrayImage(image.grid, np.zeros(v.shape, dtype=np.uint8))
    scaled = (v - lo) / (hi - lo) * 255.0
    return GrayImage(image.grid, np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8))


def morph_open(gray: GrayImage, element: StructElement = StructElement.square(3)) -> GrayImage:
    """Grayscale erosion then dilation by ``element``, replicating edge values."""
    opened = ndimage.grey_opening(gray.levels, footprint=element.mask, mode="nearest")
    return GrayImage(gray.grid, opened)


def _between_class_key(n0: int, s0: int, n1: int, s1: int) -> Fraction:
    # w0*w1*(mu0-mu1)^2 scaled by total^2: (n1*s0 - n0*s1)^2 / (n0*n1)
    return Fraction((n1 * s0 - n0 * s1) ** 2, n0 * n1)


def otsu_threshold(gray: GrayImage) -> int:
    """Level t maximising between-class variance of {<= t} vs {> t}; smallest t wins ties.

    Evaluated in exact rational arithmetic so near-ties resolve deterministically.
    """
    hist = np.bincount(np.asarray(gray.levels).ravel(), minlength=256)[:256]
    if np.count_nonzero(hist) < 2:
        raise DegenerateHistogramError("Otsu threshold needs at least two distinct gray levels")
    counts = [int(h) for h in hist]
    total_n = sum(counts)
    total_s = sum(i * h for i, h in enumerate(counts))
    best_t, best = None, None
    n0 = s0 = 0
    for t in range(255):
        n0 += counts[t]
        s0 += t * counts[t]
        n1, s1 = total_n - n0, total_s - s0
        if n0 == 0 or n1 == 0:
            score = Fraction(0)
        else:
            score = _between_class_key(n0, s0, n1, s1)
        if best is None or score > best:
            best_t, best = t, score
    return best_t


def binarize(gray: GrayImage, level: int) -> BinaryImage:
    if not 0 <= level <= 255:
        raise InvalidArgument("level must lie in 0..255")
    return BinaryImage(gray.grid, np.asarray(gray.levels) > level)


def label_strips(binary: BinaryImage, gray: Optional[GrayImage] = None) -> list:
    """8-connected components, largest area first, ties by first pixel in raster order."""
    labels, count = ndimage.label(binary.mask, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return []
    xs = binary.grid.x_centers()
    found = []
    flat = labels.ravel()
    order = np.argsort(flat, kind="stable")
    bounds = np.searchsorted(flat[order], np.arange(1, count + 2))
    width = labels.shape[1]
    for lab in range(1, count + 1):
        idx = order[bounds[lab - 1] : bounds[lab]]
        rows, cols = np.divmod(idx, width)
        mean = None
        if gray is not None:
            mean = float(np.asarray(gray.levels).ravel()[idx].mean())
        found.append(
            (
                -idx.size,
                int(idx[0]),
                np.column_stack([rows, cols]),
                (float(xs[cols.min()]), float(xs[cols.max()])),
                mean,
            )
        )
    found.sort(key=lambda f: (f[0], f[1]))
    return [
        Strip(i, f[2], f[3], -f[0], f[4])
        for i, f in enumerate(found)
    ]


def remove_short_strips(strips, min_extent_frac: float = 0.5) -> list:
    """Keep strips whose x-extent reaches ``min_extent_frac`` of the longest one."""
    if not 0 < min_extent_frac <= 1:
        raise InvalidArgument("min_extent_frac must lie in (0, 1]")
    strips = list(strips)
    if not strips:
        return []
    longest = max(s.length_mm for s in strips)
    return [s for s in strips if s.length_mm >= min_extent_frac * longest]


def select_reference_strip(strips) -> Strip:
    strips = list(strips)
    if not strips:
        raise NoStripError("no reference strip")
    return min(strips, key=lambda s: (-s.area_px, s.x_extent_mm[0]))


def strip_extent(strip: Strip, gray_open: GrayImage, edge_level: Optional[int] = None) -> tuple:
    """Lowest and highest x (pixel centres, mm) of strip pixels at or above ``edge_level``.

    ``edge_level`` defaults to the Otsu level of ``gray_open``.
    """
    if strip.area_px == 0:
        raise InvalidArgument("strip is empty")
    if edge_level is None:
        edge_level = otsu_threshold(gray_open)
    if not 0 <= edge_level <= 255:
        raise InvalidArgument("edge_level must lie in 0..255")
    rows, cols = strip.pixels[:, 0], strip.pixels[:, 1]
    hit = np.asarray(gray_open.levels)[rows, cols] >= edge_level
    if not hit.any():
        raise EmptyEdgeError(f"no strip pixel reaches edge level {edge_level}")
    xs = gray_open.grid.x_centers()[cols[hit]]
    return float(xs.min()), float(xs.max())


def center_abscissa(X1_mm: float, X2_mm: float) -> float:
    if X1_mm > X2_mm:
        raise InvalidArgument(f"X1_mm ({X1_mm}) exceeds X2_mm ({X2_mm})")
    return (X1_mm + X2_mm) / 2.0


def make_strip_report(X1_mm: float, X2_mm: float, reference_strip_id: int = 0, threshold=None, strips=()) -> StripReport:
    return StripReport(X1_mm, X2_mm, center_abscissa(X1_mm, X2_mm), reference_strip_id, threshold, tuple(strips))


def estimate_displacement(
    baseline: StripReport,
    state: StripReport,
    actual_mm: Optional[float] = None,
) -> DisplacementReport:
    """Signed displacement baseline.Xc - state.Xc; a move toward smaller x is positive."""
    est = baseline.Xc_mm - state.Xc_mm
    err = None
    if actual_mm is not None:
        if actual_mm == 0:
            raise UndefinedErrorPct("percent error is undefined for a zero actual displacement")
        err = abs(est - actual_mm) * 100.0 / abs(actual_mm)
    return DisplacementReport(baseline.Xc_mm, state.Xc_mm, est, actual_mm, err)


@dataclass(frozen=True)
class AnalysisParams:
    element: tuple = (3, 3)  # (rows along z, cols along x)
    min_extent_frac: float = 0.5
    edge_level: Optional[int] = None


def analyze_image(image: RadarImage, params: AnalysisParams = AnalysisParams()) -> StripReport:
    """Run the full segmentation chain and report the reference strip's edges."""
    gray = normalize_to_gray(image)
    opened = morph_open(gray, StructElement(np.ones(params.element, dtype=bool)))
    try:
        level = otsu_threshold(opened)
    except DegenerateHistogramError:
        raise NoStripError("no reference strip: opened image has a single gray level") from None
    strips = label_strips(binarize(opened, level), opened)
    kept = remove_short_strips(strips, params.min_extent_frac)
    ref = select_reference_strip(kept)
    edge = level if params.edge_level is None else params.edge_level
    x1, x2 = strip_extent(ref, opened, edge)
    inventory = tuple(
        (s.strip_id, s.area_px, s.x_extent_mm[0], s.x_extent_mm[1], s in kept)
        for s in strips
    )
    return make_strip_report(x1, x2, ref.strip_id, level, inventory)
