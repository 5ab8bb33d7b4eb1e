"""Report envelopes (JSON / CSV) and dependency-free SVG line charts."""

import csv
import io
import json
import math
import zlib
from importlib import resources
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html import escape

import numpy as np

from .errors import InputError

SIG_DIGITS = 12


@dataclass
class ReportEnvelope:
    subcommand: str
    parameters: dict
    payload: dict
    status: str = "ok"
    version: str = ""
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"))

    def as_dict(self):
        return {
            "tool": "biorth",
            "version": self.version,
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "timestamp": self.timestamp,
            "status": self.status,
            "payload": self.payload,
        }


def load_schema(name):
    """Published JSON schema: ``envelope`` or a subcommand's payload."""
    text = resources.files("biorth").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def to_plain(value):
    """Plain JSON-compatible data; floats rounded to 12 significant digits,
    non-finite floats become ``None``."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(value, (complex, np.complexfloating)):
        return [to_plain(value.real), to_plain(value.imag)]
    return value


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{SIG_DIGITS}g}"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def csv_bytes(rows, columns=None):
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue().encode("utf-8")


def emit_report(envelope, fmt="json", columns=None):
    """Serialize an envelope.

    JSON: the whole envelope, keys sorted. CSV: the payload's ``rows`` table
    when it has one (``columns`` is the header used for an empty table),
    otherwise the payload's top-level fields as a single row.
    """
    data = to_plain(envelope.as_dict())
    if fmt == "json":
        return (json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n").encode("utf-8")
    if fmt == "csv":
        payload = data["payload"]
        if isinstance(payload.get("rows"), list):
            rows = payload["rows"]
            return csv_bytes(rows, None if rows else columns)
        return csv_bytes([payload], sorted(payload.keys()))
    raise InputError(f"unknown report format {fmt!r}")


# ---------------------------------------------------------------- SVG

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")


def series_color(name):
    return PALETTE[zlib.crc32(name.encode("utf-8")) % len(PALETTE)]


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * step:
        out.append(round(t, 12))
        t += step
    return out


def _fmt(t):
    return f"{t:.6g}"


def emit_plot(series, path=None, title="", xlabel="", ylabel="", width=640, height=420):
    """Line chart of named ``(x, y)`` series as SVG bytes (also written to ``path``).

    Output is a pure function of the input: no timestamps or random ids.
    """
    if not series:
        raise InputError("plot needs at least one series")
    clean = {}
    for name in sorted(series):
        xs, ys = series[name]
        xs = [float(v) for v in xs]
        ys = [float(v) for v in ys]
        if len(xs) != len(ys) or len(xs) < 2:
            raise InputError(f"series {name!r} needs at least two (x, y) points")
        if not all(math.isfinite(v) for v in xs + ys):
            raise InputError(f"series {name!r} contains non-finite values")
        clean[name] = (xs, ys)
    allx = [v for xs, _ in clean.values() for v in xs]
    ally = [v for _, ys in clean.values() for v in ys]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad_y = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad_y, y1 + pad_y
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{X:.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" font-family="sans-serif" font-size="12">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for k, (name, (xs, ys)) in enumerate(clean.items()):
        color = series_color(name)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = top + 12 + 18 * k
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{lx + 26}" y="{ly + 4}" font-family="sans-serif" font-size="12">{escape(name)}</text>'
        )
    out.append("</svg>")
    data = ("\n".join(out) + "\n").encode("utf-8")
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data
