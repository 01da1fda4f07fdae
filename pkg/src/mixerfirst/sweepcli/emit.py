"""Writers for sweep results: CSV, JSON, SVG plots and Touchstone."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .. import netcore
from .sweep import SweepResult

SCHEMA_VERSION = 1

# axis titles in the style of the published figures
AXIS_LABELS = {
    "nf_db": "Noise Figure [dB]",
    "gain_db": "Conversion Gain [dB]",
    "s11_db": "S11 [dB]",
    "zin_re_ohm": "Re{Zin} [Ohm]",
    "zin_im_ohm": "Im{Zin} [Ohm]",
    "iip3_dbm": "IIP3 [dBm]",
    "vds_ratio": "Vds / Vs",
    "iq_isolation_db": "I/Q Isolation [dB]",
}
_COLORS = ("black", "blue", "red", "green", "purple", "orange", "brown", "gray")


class EmitError(OSError):
    """Writing an output failed; the message names the path."""


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def series_csv(result: SweepResult, index: int = 0) -> str:
    cols = result.columns
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in result.series[index].rows:
        w.writerow([_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    """Parse a CSV written by :func:`write_csv`; empty cells become ``None``."""
    with open(path, newline="") as fh:
        rows = []
        for raw in csv.DictReader(fh):
            row = {}
            for k, v in raw.items():
                if k == "error":
                    row[k] = v
                else:
                    row[k] = float(v) if v != "" else None
            rows.append(row)
    return rows


def to_json(result: SweepResult) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "metrics": list(result.metrics),
        "oracle": result.oracle,
        "grid_ghz": [f / 1e9 for f in result.grid],
        "notes": result.notes,
        "series": [
            {
                "name": s.name,
                "receiver": _spec_dict(s.spec),
                "calibration": None
                if s.calibration is None
                else {"k_cal": s.calibration.k_cal, "residual": s.calibration.residual},
                "rows": [dict(r) for r in s.rows],
            }
            for s in result.series
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _spec_dict(spec) -> dict:
    d = {}
    for name in spec.__dataclass_fields__:
        v = getattr(spec, name)
        if name == "match":
            v = None if v is None else v.to_dict()
        elif hasattr(v, "value"):
            v = v.value
        d[name] = v
    return d


def metric_columns(result: SweepResult) -> list:
    cols = []
    for m in result.metrics:
        cols += ["zin_re_ohm", "zin_im_ohm"] if m == "zin" else [m]
    return cols


def to_svg(result: SweepResult, column: str, width: int = 640, height: int = 420) -> str:
    """Line plot of one column against frequency, one polyline per series."""
    left, right, top, bottom = 70, 20, 20, 55
    pw, ph = width - left - right, height - top - bottom
    xs = [f / 1e9 for f in result.grid]
    ys = [r.get(column) for s in result.series for r in s.rows]
    ys = [y for y in ys if y is not None and math.isfinite(y)]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    y0, y1 = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(6):
        xv = x0 + (x1 - x0) * i / 5
        yv = y0 + (y1 - y0) * i / 5
        out.append(
            f'<text x="{px(xv):.2f}" y="{top + ph + 18}" font-size="11" '
            f'text-anchor="middle">{xv:.4g}</text>'
        )
        out.append(
            f'<text x="{left - 6}" y="{py(yv) + 4:.2f}" font-size="11" '
            f'text-anchor="end">{yv:.4g}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" font-size="13" '
        f'text-anchor="middle">Frequency [GHz]</text>'
    )
    label = escape(AXIS_LABELS.get(column, column))
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{label}</text>'
    )
    for k, s in enumerate(result.series):
        color = _COLORS[k % len(_COLORS)]
        pts = [
            f"{px(x):.2f},{py(r[column]):.2f}"
            for x, r in zip(xs, s.rows)
            if r.get(column) is not None and math.isfinite(r[column])
        ]
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" '
            f'points="{" ".join(pts)}"><title>{escape(s.name)}</title></polyline>'
        )
        out.append(
            f'<text x="{left + 8}" y="{top + 16 + 15 * k}" font-size="12" '
            f'fill="{color}">{escape(s.name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text)
    except OSError as exc:
        raise EmitError(f"{path}: {exc.strerror or exc}") from None
    return path


def _series_stem(result: SweepResult, stem: str, index: int) -> str:
    if len(result.series) == 1:
        return stem
    return f"{stem}_{result.series[index].name}"


def emit(result: SweepResult, out_dir, formats=("csv", "json"), stem: str = "sweep") -> list[Path]:
    """Write ``result`` in every requested format; returns the paths written.

    CSV and Touchstone files are written per series, SVG per metric column,
    JSON once for the whole result.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise EmitError(f"{out}: {exc.strerror or exc}") from None
    written = []
    for fmt in formats:
        if fmt == "csv":
            for i in range(len(result.series)):
                path = out / f"{_series_stem(result, stem, i)}.csv"
                written.append(_write(path, series_csv(result, i)))
        elif fmt == "json":
            written.append(_write(out / f"{stem}.json", to_json(result)))
        elif fmt == "svg":
            for col in metric_columns(result):
                written.append(_write(out / f"{stem}_{col}.svg", to_svg(result, col)))
        elif fmt == "s1p":
            for i, s in enumerate(result.series):
                written.append(_write_s1p(out / f"{_series_stem(result, stem, i)}.s1p", s))
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return written


def _write_s1p(path: Path, series) -> Path:
    freqs, gammas = [], []
    r_s = series.spec.r_s
    for row in series.rows:
        if row["error"]:
            continue
        if "zin_re_ohm" in row:
            z = complex(row["zin_re_ohm"], row["zin_im_ohm"])
            gammas.append(netcore.s11(z, r_s))
        else:
            # magnitude only: phase is not recoverable from s11_db
            gammas.append(10 ** (row["s11_db"] / 20))
        freqs.append(row["freq_ghz"] * 1e9)
    try:
        return netcore.write_s1p(path, freqs, gammas, r_s, comments=[f"mixerfirst sweep: {series.name}"])
    except OSError as exc:
        raise EmitError(f"{path}: {exc.strerror or exc}") from None
