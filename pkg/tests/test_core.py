import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uwbwinding.core import (
    AScan,
    BScan,
    ImageGrid,
    PulseSpec,
    RadarImage,
    SamplingSpec,
    ScanGeometry,
    resolution_x,
    synthesize_pulse,
)
from uwbwinding.errors import InvalidArgument

C = 3e11


def test_resolution_table1_inputs():
    # hand evaluation: (3e11 / 4.7e9) * 600 / (2 * 59 * 20) = 16.2282...
    assert resolution_x(4.7e9, 600.0, 59 * 20.0, C) == pytest.approx(16.23, abs=0.01)


def test_resolution_halves_with_double_frequency():
    assert resolution_x(9.4e9, 600, 1180, C) == resolution_x(4.7e9, 600, 1180, C) / 2


def test_resolution_equals_wavelength_when_p_is_2l():
    assert resolution_x(4.7e9, 1180.0, 590.0, C) == pytest.approx(C / 4.7e9, rel=1e-15)


@given(st.floats(1e-3, 1e3))
def test_resolution_homogeneous(a):
    base = resolution_x(4.7e9, 600.0, 1180.0, C)
    assert resolution_x(4.7e9, a * 600.0, a * 1180.0, C) == pytest.approx(base, rel=1e-12)


@pytest.mark.parametrize("args", [(0, 1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1), (1, 1, 1, -3)])
def test_resolution_rejects_non_positive(args):
    with pytest.raises(InvalidArgument):
        resolution_x(*args)


def test_pulse_peak_is_amplitude():
    s = synthesize_pulse(PulseSpec(4.7e9, 3.2e9, 1.0, 1e-9), SamplingSpec(20e-12, 100))
    assert np.max(np.abs(s.samples)) == pytest.approx(1.0, abs=1e-9)
    # t_c = 0.5 ns falls on sample 25
    assert s.samples[25] == pytest.approx(1.0, abs=1e-9)


def test_pulse_amplitude_scales():
    s = synthesize_pulse(PulseSpec(4.7e9, 3.2e9, 2.5, 1e-9), SamplingSpec(20e-12, 100))
    assert np.max(np.abs(s.samples)) == pytest.approx(2.5, abs=1e-9)


def test_pulse_minus_10db_bandwidth():
    # 1 ns truncation keeps edge leakage out of the -10 dB points
    s = synthesize_pulse(PulseSpec(4.7e9, 3.2e9, 1.0, 1e-9), SamplingSpec(20e-12, 8192)).samples
    power = np.abs(np.fft.rfft(s)) ** 2
    freqs = np.fft.rfftfreq(s.size, 20e-12)
    band = freqs[power >= power.max() / 10]
    assert band.max() - band.min() == pytest.approx(3.2e9, rel=0.05)


def test_pulse_even_symmetric_about_center():
    s = synthesize_pulse(PulseSpec(4.7e9, 3.2e9, 1.0, 1e-9), SamplingSpec(20e-12, 51)).samples
    # centre at index 25; 51 samples spans it symmetrically
    assert np.allclose(s, s[::-1], rtol=1e-9, atol=1e-12)


def test_pulse_rejects_undersampling():
    with pytest.raises(InvalidArgument):
        synthesize_pulse(PulseSpec(4.7e9, 3.2e9), SamplingSpec(100e-12, 100))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(center_frequency_hz=0, bandwidth_hz=1e9),
        dict(center_frequency_hz=1e9, bandwidth_hz=2e9),
        dict(center_frequency_hz=1e9, bandwidth_hz=0.5e9, duration_s=0),
    ],
)
def test_pulse_spec_invariants(kwargs):
    with pytest.raises(InvalidArgument):
        PulseSpec(**kwargs)


def test_sampling_invariants():
    with pytest.raises(InvalidArgument):
        SamplingSpec(0, 10)
    with pytest.raises(InvalidArgument):
        SamplingSpec(1e-12, 1)


def test_geometry_rejects_nonuniform_spacing():
    with pytest.raises(InvalidArgument):
        ScanGeometry([0.0, 20.0, 41.0])
    with pytest.raises(InvalidArgument):
        ScanGeometry([0.0])
    with pytest.raises(InvalidArgument):
        ScanGeometry([0.0, 20.0], wave_speed_mm_per_s=0)


def test_geometry_span_and_step():
    g = ScanGeometry.uniform(0.0, 20.0, 60)
    assert g.n_points == 60
    assert g.step_mm == 20.0
    assert g.span_mm == 1180.0


def test_geometry_offsets_and_midpoints():
    g = ScanGeometry([0.0, 10.0], tx_offset_mm=(-5, 0), rx_offset_mm=(5, 2))
    assert np.array_equal(g.tx_positions(), [[-5, 0], [5, 0]])
    assert np.array_equal(g.midpoints(), [[0, 1], [10, 1]])


def test_bscan_rejects_ragged_rows():
    g = ScanGeometry([0.0, 20.0])
    with pytest.raises(InvalidArgument):
        BScan([[1.0, 2.0, 3.0], [1.0, 2.0]], g, SamplingSpec(1e-11, 3))


def test_bscan_rejects_wrong_row_count_and_nonfinite():
    g = ScanGeometry([0.0, 20.0])
    s = SamplingSpec(1e-11, 3)
    with pytest.raises(InvalidArgument):
        BScan(np.zeros((3, 3)), g, s)
    with pytest.raises(InvalidArgument):
        BScan([[0, 0, np.nan], [0, 0, 0]], g, s)


def test_bscan_is_immutable():
    b = BScan(np.zeros((2, 3)), ScanGeometry([0.0, 20.0]), SamplingSpec(1e-11, 3))
    with pytest.raises(ValueError):
        b.scans[0, 0] = 1.0


def test_ascan_length_checked():
    with pytest.raises(InvalidArgument):
        AScan(np.zeros(4), SamplingSpec(1e-11, 5))


def test_grid_shape_uses_ceiling():
    g = ImageGrid(0, 105, 10, 30, 10)
    assert g.shape == (2, 11)
    assert ImageGrid(-5, 1185, 395, 805, 10).shape == (41, 119)


def test_grid_centers():
    g = ImageGrid(-5, 1185, 395, 805, 10)
    assert g.x_centers()[0] == 0.0 and g.x_centers()[-1] == 1180.0
    assert g.z_centers()[20] == 600.0
    assert g.pixel_of(600.0, 600.0) == (20, 60)


@pytest.mark.parametrize("args", [(1, 0, 1, 2, 1), (0, 1, 2, 1, 1), (0, 1, 1, 2, 0), (0, 1, 0, 2, 1)])
def test_grid_invariants(args):
    with pytest.raises(InvalidArgument):
        ImageGrid(*args)


def test_radar_image_shape_checked():
    with pytest.raises(InvalidArgument):
        RadarImage(ImageGrid(0, 20, 10, 30, 10), np.zeros((3, 2)))
    img = RadarImage(ImageGrid(0, 20, 10, 30, 10), [[0, -3], [2, 1]])
    assert img.argmax_pixel() == (1, 0)
    assert img.argmax_pixel(absolute=True) == (0, 1)
    assert math.isclose(img.values.sum(), 0.0)
