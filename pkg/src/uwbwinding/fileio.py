"""Text file formats for B-scans, radar images and reports, plus 8-bit PGM export.

All numeric values are written with ``repr`` so reading a file back gives
bit-identical floats.
"""

from __future__ import annotations

import numpy as np

from .analysis import DisplacementReport, GrayImage, StripReport
from .core import BScan, ImageGrid, RadarImage, SamplingSpec, ScanGeometry
from .errors import ParseError, UwbError

BSCAN_MAGIC = "# uwbwinding-bscan v1"
IMAGE_MAGIC = "# uwbwinding-image v1"
STRIP_MAGIC = "# uwbwinding-strip-report v1"
DISPLACEMENT_MAGIC = "# uwbwinding-displacement-report v1"


def _f(v) -> str:
    return repr(float(v))


def _opt(v) -> str:
    return "-" if v is None else _f(v)


def _row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _read_lines(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _parse_header(lines, magic):
    if not lines or lines[0].strip() != magic:
        raise ParseError(f"expected first line {magic!r}", 1)
    header = {}
    body_start = len(lines)
    for i, line in enumerate(lines[1:], start=2):
        if not line.startswith("#"):
            body_start = i - 1
            break
        key, sep, value = line[1:].strip().partition("=")
        if not sep:
            raise ParseError(f"malformed header line {line!r}", i)
        header[key.strip()] = (value.strip(), i)
    return header, body_start


def _hfloat(header, key):
    if key not in header:
        raise ParseError(f"missing header field {key!r}")
    text, line = header[key]
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{key}: not a number: {text!r}", line) from None


def _hint(header, key):
    if key not in header:
        raise ParseError(f"missing header field {key!r}")
    text, line = header[key]
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{key}: not an integer: {text!r}", line) from None


def _hvec(header, key):
    if key not in header:
        raise ParseError(f"missing header field {key!r}")
    text, line = header[key]
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ParseError(f"{key}: bad number list", line) from None


def _parse_matrix(lines, start, n_rows, n_cols):
    rows = []
    for offset in range(n_rows):
        lineno = start + offset + 1
        if start + offset >= len(lines):
            raise ParseError(f"expected {n_rows} data rows, file ends after {offset}", lineno)
        fields = lines[start + offset].split()
        if len(fields) != n_cols:
            raise ParseError(f"expected {n_cols} values, found {len(fields)}", lineno)
        try:
            rows.append([float(v) for v in fields])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    for extra in range(start + n_rows, len(lines)):
        if lines[extra].strip():
            raise ParseError("unexpected trailing data", extra + 1)
    return np.array(rows, dtype=float).reshape(n_rows, n_cols)


def format_bscan(bscan: BScan) -> str:
    g, s = bscan.geometry, bscan.sampling
    out = [
        BSCAN_MAGIC,
        f"# dt_s={_f(s.dt_s)}",
        f"# t_start_s={_f(s.t_start_s)}",
        f"# n_samples={s.n_samples}",
        f"# K={g.n_points}",
        f"# step_mm={_f(g.step_mm)}",
        f"# x_mm={','.join(_f(x) for x in g.x_positions_mm)}",
        f"# tx_offset_mm={_f(g.tx_offset_mm[0])},{_f(g.tx_offset_mm[1])}",
        f"# rx_offset_mm={_f(g.rx_offset_mm[0])},{_f(g.rx_offset_mm[1])}",
        f"# c_mm_s={_f(g.wave_speed_mm_per_s)}",
    ]
    out.extend(_row(r) for r in bscan.scans)
    return "\n".join(out) + "\n"


def parse_bscan(lines) -> BScan:
    header, start = _parse_header(lines, BSCAN_MAGIC)
    x = _hvec(header, "x_mm")
    n = _hint(header, "n_samples")
    try:
        sampling = SamplingSpec(_hfloat(header, "dt_s"), n, _hfloat(header, "t_start_s"))
        geometry = ScanGeometry(
            x,
            tuple(_hvec(header, "tx_offset_mm")),
            tuple(_hvec(header, "rx_offset_mm")),
            _hfloat(header, "c_mm_s"),
        )
    except ParseError:
        raise
    except UwbError as exc:
        raise ParseError(f"invalid header: {exc}") from None
    if "K" in header and _hint(header, "K") != len(x):
        raise ParseError("K does not match the number of x positions", header["K"][1])
    data = _parse_matrix(lines, start, len(x), n)
    return BScan(data, geometry, sampling)


def write_bscan(path, bscan: BScan) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_bscan(bscan))


def read_bscan(path) -> BScan:
    return parse_bscan(_read_lines(path))


def format_image(image: RadarImage, algorithm=None) -> str:
    g = image.grid
    out = [
        IMAGE_MAGIC,
        f"# x_min_mm={_f(g.x_min_mm)}",
        f"# x_max_mm={_f(g.x_max_mm)}",
        f"# z_min_mm={_f(g.z_min_mm)}",
        f"# z_max_mm={_f(g.z_max_mm)}",
        f"# pixel_mm={_f(g.pixel_mm)}",
        f"# width={g.width}",
        f"# height={g.height}",
    ]
    if algorithm:
        out.append(f"# algorithm={algorithm}")
    out.extend(_row(r) for r in image.values)
    return "\n".join(out) + "\n"


def parse_image(lines):
    """Returns (RadarImage, algorithm or None)."""
    header, start = _parse_header(lines, IMAGE_MAGIC)
    try:
        grid = ImageGrid(
            _hfloat(header, "x_min_mm"),
            _hfloat(header, "x_max_mm"),
            _hfloat(header, "z_min_mm"),
            _hfloat(header, "z_max_mm"),
            _hfloat(header, "pixel_mm"),
        )
    except ParseError:
        raise
    except UwbError as exc:
        raise ParseError(f"invalid grid: {exc}") from None
    for key, expect in (("width", grid.width), ("height", grid.height)):
        if key in header and _hint(header, key) != expect:
            raise ParseError(f"{key} disagrees with grid extent", header[key][1])
    values = _parse_matrix(lines, start, grid.height, grid.width)
    algorithm = header["algorithm"][0] if "algorithm" in header else None
    return RadarImage(grid, values), algorithm


def write_image(path, image: RadarImage, algorithm=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_image(image, algorithm))


def read_image(path):
    return parse_image(_read_lines(path))


def write_pgm(path, gray: GrayImage) -> None:
    """Binary 8-bit portable graymap, first row = shallowest z."""
    h, w = gray.levels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(gray.levels, dtype=np.uint8).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P5" or parts[3] != b"255":
        raise ParseError("not an 8-bit binary PGM")
    w, h = int(parts[1]), int(parts[2])
    # exactly one whitespace byte separates the header from the raster
    return np.frombuffer(data[len(data) - w * h :], dtype=np.uint8).reshape(h, w)


# reports -------------------------------------------------------------------

def _kv_lines(lines, magic):
    if not lines or lines[0].strip() != magic:
        raise ParseError(f"expected first line {magic!r}", 1)
    values, table = {}, []
    in_table = False
    for i, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text == "[strips]":
            in_table = True
            continue
        if in_table:
            table.append((text, i))
            continue
        key, sep, value = text.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {text!r}", i)
        values[key.strip()] = (value.strip(), i)
    return values, table


def _kv_float(values, key, optional=False):
    if key not in values:
        if optional:
            return None
        raise ParseError(f"missing field {key!r}")
    text, line = values[key]
    if optional and text == "-":
        return None
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{key}: not a number: {text!r}", line) from None


def format_strip_report(report: StripReport) -> str:
    out = [
        STRIP_MAGIC,
        f"X1_mm={_f(report.X1_mm)}",
        f"X2_mm={_f(report.X2_mm)}",
        f"Xc_mm={_f(report.Xc_mm)}",
        f"reference_strip_id={report.reference_strip_id}",
        f"threshold={'-' if report.threshold is None else int(report.threshold)}",
        "[strips]",
        "# id area_px x_min_mm x_max_mm kept",
    ]
    for sid, area, x0, x1, kept in report.strips:
        out.append(f"{sid} {area} {_f(x0)} {_f(x1)} {int(bool(kept))}")
    return "\n".join(out) + "\n"


def parse_strip_report(lines) -> StripReport:
    values, table = _kv_lines(lines, STRIP_MAGIC)
    x1, x2, xc = (_kv_float(values, k) for k in ("X1_mm", "X2_mm", "Xc_mm"))
    ref = _kv_float(values, "reference_strip_id")
    thr = _kv_float(values, "threshold", optional=True)
    strips = []
    for text, line in table:
        fields = text.split()
        if len(fields) != 5:
            raise ParseError("strip rows need 5 fields", line)
        try:
            strips.append((int(fields[0]), int(fields[1]), float(fields[2]), float(fields[3]), fields[4] == "1"))
        except ValueError:
            raise ParseError(f"bad strip row {text!r}", line) from None
    try:
        return StripReport(x1, x2, xc, int(ref), None if thr is None else int(thr), tuple(strips))
    except UwbError as exc:
        raise ParseError(str(exc)) from None


def write_strip_report(path, report: StripReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_strip_report(report))


def read_strip_report(path) -> StripReport:
    return parse_strip_report(_read_lines(path))


def format_displacement_report(baseline: StripReport, state: StripReport, disp: DisplacementReport) -> str:
    out = [
        DISPLACEMENT_MAGIC,
        f"baseline_lower_edge_mm_E={_f(baseline.X1_mm)}",
        f"baseline_upper_edge_mm_E={_f(baseline.X2_mm)}",
        f"baseline_center_mm_E={_f(disp.baseline_Xc_mm)}",
        f"lower_edge_mm_E={_f(state.X1_mm)}",
        f"upper_edge_mm_E={_f(state.X2_mm)}",
        f"center_mm_E={_f(disp.state_Xc_mm)}",
        f"displacement_mm_E={_f(disp.displacement_est_mm)}",
        f"displacement_mm_A={_opt(disp.displacement_actual_mm)}",
        f"error_pct={_opt(disp.error_pct)}",
    ]
    return "\n".join(out) + "\n"


def parse_displacement_report(lines) -> DisplacementReport:
    values, _ = _kv_lines(lines, DISPLACEMENT_MAGIC)
    return DisplacementReport(
        _kv_float(values, "baseline_center_mm_E"),
        _kv_float(values, "center_mm_E"),
        _kv_float(values, "displacement_mm_E"),
        _kv_float(values, "displacement_mm_A", optional=True),
        _kv_float(values, "error_pct", optional=True),
    )


def read_displacement_report(path) -> DisplacementReport:
    return parse_displacement_report(_read_lines(path))
