import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uwbwinding.core import BScan, ImageGrid, SamplingSpec, ScanGeometry
from uwbwinding.errors import InvalidArgument, NoSignalError
from uwbwinding.forward_sim import Scatterer, SceneModel, simulate_bscan
from uwbwinding.migration import DasParams, das_migrate
from uwbwinding.preprocess import align_time_zero, background_subtract, raised_cosine_ramp, time_gate

GEOM3 = ScanGeometry([0.0, 20.0, 40.0])


def _bscan(data, t_start=0.0, dt=1e-11):
    data = np.asarray(data, dtype=float)
    return BScan(data, ScanGeometry.uniform(0.0, 20.0, data.shape[0]), SamplingSpec(dt, data.shape[1], t_start))


def _delayed(data, shift):
    out = np.zeros_like(data)
    out[:, shift:] = data[:, : data.shape[1] - shift]
    return out


@pytest.fixture(scope="module")
def echo(pulse, sampling, geometry):
    return simulate_bscan(SceneModel([Scatterer(590, 500)]), geometry, pulse, sampling)


def test_align_already_aligned_is_identity():
    b = _bscan([[1.0, 0.5, 0.0, 0.0], [0.2, 0.0, 0.0, 0.0]])
    out = align_time_zero(b, 0.1)
    assert np.array_equal(out.scans, b.scans)
    assert out.sampling == b.sampling


def test_align_trigger_level_is_fraction_of_peak():
    # peak 2.0, frac 0.5 -> level 1.0; index 3 equals the level, index 5 exceeds it
    row = [0.0, 0.3, -0.9, 1.0, 0.0, -1.5, 0.0, 0.0, 2.0, 0.0]
    b = _bscan([row, [0.0] * 10])
    out = align_time_zero(b, 0.5)
    assert np.array_equal(out.scans[0, :5], [-1.5, 0.0, 0.0, 2.0, 0.0])
    assert out.sampling.t_start_s == pytest.approx(5e-11)


def test_align_preserves_absolute_time(echo):
    out = align_time_zero(echo, 0.1)
    shift = round((out.sampling.t_start_s - echo.sampling.t_start_s) / echo.sampling.dt_s)
    assert shift > 0
    n = echo.sampling.n_samples
    assert np.array_equal(out.scans[:, : n - shift], echo.scans[:, shift:])
    assert np.all(out.scans[:, n - shift :] == 0)


def test_align_global_shift_by_37(echo):
    shifted = echo.with_scans(_delayed(echo.scans, 37))
    a = align_time_zero(echo, 0.1)
    b = align_time_zero(shifted, 0.1)
    valid = echo.sampling.n_samples - 37 - round((a.sampling.t_start_s) / echo.sampling.dt_s)
    assert valid > 0
    assert np.array_equal(a.scans[:, :valid], b.scans[:, :valid])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 150))
def test_align_translation_invariant(shift):
    rng = np.random.default_rng(5)
    data = np.zeros((4, 400))
    data[:, 60:120] = rng.normal(size=(4, 60))
    a = align_time_zero(_bscan(data), 0.2)
    b = align_time_zero(_bscan(_delayed(data, shift)), 0.2)
    assert np.array_equal(a.scans[:, :200], b.scans[:, :200])


def test_align_rejects_zero_scan_and_bad_fraction():
    b = _bscan(np.zeros((2, 5)))
    with pytest.raises(NoSignalError):
        align_time_zero(b, 0.1)
    with pytest.raises(InvalidArgument):
        align_time_zero(_bscan(np.ones((2, 5))), 1.0)


def test_gate_full_record_no_taper_is_identity(echo):
    s = echo.sampling
    out = time_gate(echo, s.t_start_s, s.t_end_s, 0)
    assert np.array_equal(out.scans, echo.scans)


def test_gate_without_samples_zeroes_everything(echo):
    s = echo.sampling
    out = time_gate(echo, s.t_start_s + 0.2 * s.dt_s, s.t_start_s + 0.8 * s.dt_s, 0)
    assert np.array_equal(out.scans, np.zeros(echo.shape))


def test_gate_idempotent_without_taper(echo):
    once = time_gate(echo, 2e-9, 5e-9, 0)
    twice = time_gate(once, 2e-9, 5e-9, 0)
    assert np.array_equal(once.scans, twice.scans)


def test_gate_interior_bit_identical_and_taper_bounded(echo):
    dt = echo.sampling.dt_s
    lo, hi = 100, 400
    out = time_gate(echo, lo * dt, hi * dt, 8)
    assert np.array_equal(out.scans[:, lo + 8 : hi - 7], echo.scans[:, lo + 8 : hi - 7])
    assert np.all(out.scans[:, :lo] == 0) and np.all(out.scans[:, hi + 1 :] == 0)
    w = raised_cosine_ramp(8)
    assert np.all((w > 0) & (w < 1)) and np.all(np.diff(w) > 0)
    assert np.allclose(out.scans[:, lo : lo + 8], echo.scans[:, lo : lo + 8] * w)


@pytest.mark.parametrize("lo,hi", [(5e-9, 4e-9), (-1e-9, 4e-9), (1e-9, 13e-9)])
def test_gate_rejects_bad_windows(echo, lo, hi):
    with pytest.raises(InvalidArgument):
        time_gate(echo, lo, hi, 0)


def test_gate_isolates_first_target(pulse, geometry):
    sampling = SamplingSpec(20e-12, 1000, 0.0)
    c = geometry.wave_speed_mm_per_s
    scene = SceneModel([Scatterer(590, 600), Scatterer(590, 1500)])
    raw = simulate_bscan(scene, geometry, pulse, sampling)
    # near target arrives within [2*600/c, 2*hypot(590, 600)/c]; far target no earlier than 2*1500/c
    gated = time_gate(raw, 3.5e-9, 6.5e-9, 8)
    assert 2 * np.hypot(590, 600) / c + pulse.duration_s / 2 < 6.5e-9 < 2 * 1500 / c - pulse.duration_s / 2
    grid = ImageGrid(395, 785, 405, 1705, 10)
    params = DasParams.for_pulse(pulse.duration_s, sampling.dt_s)
    full = das_migrate(raw, grid, params).values
    img = das_migrate(gated, grid, params).values
    near_row, col = grid.pixel_of(590, 600)
    far_row, _ = grid.pixel_of(590, 1500)
    far_band = slice(far_row - 3, far_row + 4)
    # far echo is weaker by (600/1500)^4 after squaring, but clearly present
    assert full[far_band].max() > 0.01 * full.max()
    assert abs(np.unravel_index(np.argmax(img), img.shape)[0] - near_row) <= 1
    assert img[far_band].max() < 1e-3 * img.max()


def test_background_subtract_basics(echo):
    assert np.array_equal(background_subtract(echo, echo).scans, np.zeros(echo.shape))
    zero = echo.with_scans(np.zeros(echo.shape))
    assert np.array_equal(background_subtract(echo, zero).scans, echo.scans)


def test_background_subtract_removes_clutter(pulse, sampling, geometry):
    target = [Scatterer(590, 600)]
    clutter = [Scatterer(200, 450), Scatterer(1000, 700)]
    with_clutter = simulate_bscan(SceneModel(target, clutter=clutter), geometry, pulse, sampling)
    clutter_only = simulate_bscan(SceneModel(clutter), geometry, pulse, sampling)
    scene_only = simulate_bscan(SceneModel(target), geometry, pulse, sampling)
    diff = background_subtract(with_clutter, clutter_only).scans
    assert np.allclose(diff, scene_only.scans, rtol=0, atol=1e-12 * np.abs(scene_only.scans).max())


def test_background_subtract_shape_mismatch():
    a = BScan(np.zeros((3, 4)), GEOM3, SamplingSpec(1e-11, 4))
    b = BScan(np.zeros((3, 5)), GEOM3, SamplingSpec(1e-11, 5))
    with pytest.raises(InvalidArgument):
        background_subtract(a, b)


def test_operations_preserve_shape_and_dt(echo):
    for out in (align_time_zero(echo, 0.1), time_gate(echo, 1e-9, 6e-9), background_subtract(echo, echo)):
        assert out.shape == echo.shape
        assert out.sampling.dt_s == echo.sampling.dt_s
        assert out.geometry.n_points == echo.geometry.n_points
