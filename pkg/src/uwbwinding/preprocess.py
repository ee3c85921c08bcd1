"""B-scan conditioning ahead of migration: time-zero alignment, gating, background removal."""

from __future__ import annotations

import math

import numpy as np

from .core import BScan, SamplingSpec
from .errors import InvalidArgument, NoSignalError

# fractional-sample slack when mapping gate times onto sample indices
_INDEX_EPS = 1e-9


def align_time_zero(bscan: BScan, threshold_frac: float = 0.1) -> BScan:
    """Shift all rows left to the first sample where any row exceeds the trigger level.

    The trigger level is ``threshold_frac`` times the global peak magnitude.
    The shift is global so inter-row delays survive, and ``t_start_s`` moves
    forward by the same amount so every sample keeps its absolute time.
    """
    if not 0 < threshold_frac < 1:
        raise InvalidArgument("threshold_frac must lie in (0, 1)")
    mag = np.abs(bscan.scans)
    peak = mag.max()
    if peak == 0:
        raise NoSignalError("B-scan is all zeros; cannot locate time-zero")
    crossing = np.nonzero((mag > threshold_frac * peak).any(axis=0))[0]
    shift = int(crossing[0])
    if shift == 0:
        return bscan
    out = np.zeros_like(bscan.scans)
    out[:, : out.shape[1] - shift] = bscan.scans[:, shift:]
    s = bscan.sampling
    return bscan.with_scans(out, SamplingSpec(s.dt_s, s.n_samples, s.t_start_s + shift * s.dt_s))


def raised_cosine_ramp(n: int) -> np.ndarray:
    """Rising weights strictly between 0 and 1 for an ``n``-sample taper."""
    j = np.arange(1, n + 1)
    return 0.5 * (1.0 - np.cos(np.pi * j / (n + 1)))


def time_gate(bscan: BScan, t_lo_s: float, t_hi_s: float, taper_samples: int = 8) -> BScan:
    """Zero everything outside [t_lo, t_hi] with raised-cosine edges inside the gate."""
    s = bscan.sampling
    slack = _INDEX_EPS * s.dt_s
    if not t_lo_s < t_hi_s:
        raise InvalidArgument("gate must satisfy t_lo_s < t_hi_s")
    if t_lo_s < s.t_start_s - slack or t_hi_s > s.t_end_s + slack:
        raise InvalidArgument(
            f"gate [{t_lo_s:g}, {t_hi_s:g}] s outside record [{s.t_start_s:g}, {s.t_end_s:g}] s"
        )
    if taper_samples < 0:
        raise InvalidArgument("taper_samples must be >= 0")
    lo = max(0, math.ceil((t_lo_s - s.t_start_s) / s.dt_s - _INDEX_EPS))
    hi = min(s.n_samples - 1, math.floor((t_hi_s - s.t_start_s) / s.dt_s + _INDEX_EPS))
    out = np.zeros_like(bscan.scans)
    if hi < lo:
        return bscan.with_scans(out)
    out[:, lo : hi + 1] = bscan.scans[:, lo : hi + 1]
    n = min(taper_samples, (hi - lo + 1) // 2)
    if n > 0:
        ramp = raised_cosine_ramp(n)
        out[:, lo : lo + n] *= ramp
        out[:, hi - n + 1 : hi + 1] *= ramp[::-1]
    return bscan.with_scans(out)


def background_subtract(bscan: BScan, baseline: BScan) -> BScan:
    if not bscan.compatible_with(baseline):
        raise InvalidArgument("baseline must share shape, geometry and sampling with the scan")
    return bscan.with_scans(bscan.scans - baseline.scans)
