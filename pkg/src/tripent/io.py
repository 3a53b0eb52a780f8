"""State files, CSV rows, run records and SVG gap plots."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np

from .qcore import DensityOperator, Ket, State, TripentError, UsageError


class StateFileError(UsageError):
    """Malformed state file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = "" if line is None else f"line {line}: "
        if path:
            where = f"{path}:{where}"
        super().__init__(where + message)
        self.line = line


def parse_real(text: str) -> float:
    """Decimal literal or exact rational ``p/q``, rounded once to the nearest float."""
    text = text.strip()
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def parse_reals(text: str) -> list[float]:
    return [parse_real(t) for t in text.split(",") if t.strip()]


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# state files


def _pair(z: complex) -> str:
    return json.dumps([float(z.real), float(z.imag)])


@dataclass(frozen=True)
class StateFile:
    """JSON state: ``dims``, ``kind`` (pure|mixed), optional ``label`` and ``data``.

    ``data`` holds ``[re, im]`` pairs: a vector for pure states, a row-major
    matrix for mixed ones. The writer puts one amplitude or matrix row per line.
    """

    dims: tuple[int, ...]
    kind: str
    data: np.ndarray
    label: str | None = None

    @classmethod
    def from_state(cls, state: State, label: str | None = None) -> "StateFile":
        if isinstance(state, Ket):
            return cls(tuple(state.dims), "pure", np.array(state.amplitudes), label)
        return cls(tuple(state.dims), "mixed", np.array(state.matrix), label)

    def to_state(self) -> State:
        if self.kind == "pure":
            return Ket(self.data, self.dims)
        return DensityOperator(self.data, self.dims)

    def dumps(self) -> str:
        lines = ["{", f'  "dims": {json.dumps([int(d) for d in self.dims])},', f'  "kind": {json.dumps(self.kind)},']
        if self.label is not None:
            lines.append(f'  "label": {json.dumps(self.label)},')
        lines.append('  "data": [')
        if self.kind == "pure":
            rows = ["    " + _pair(z) for z in self.data]
        else:
            rows = ["    [" + ", ".join(_pair(z) for z in row) + "]" for row in self.data]
        lines.append(",\n".join(rows))
        lines += ["  ]", "}"]
        return "\n".join(lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, path: str | None = None) -> "StateFile":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StateFileError(exc.msg, exc.lineno, path) from exc
        lines = text.splitlines()

        def line_of(key: str) -> int | None:
            for n, ln in enumerate(lines, 1):
                if f'"{key}"' in ln:
                    return n
            return None

        if not isinstance(obj, dict):
            raise StateFileError("top level must be an object", 1, path)
        for key in ("dims", "kind", "data"):
            if key not in obj:
                raise StateFileError(f"missing key {key!r}", None, path)
        dims, kind, label = obj["dims"], obj["kind"], obj.get("label")
        if not (isinstance(dims, list) and dims and all(isinstance(d, int) and d >= 1 for d in dims)):
            raise StateFileError("dims must be a list of positive integers", line_of("dims"), path)
        if kind not in ("pure", "mixed"):
            raise StateFileError(f"kind must be 'pure' or 'mixed', got {kind!r}", line_of("kind"), path)
        if label is not None and not isinstance(label, str):
            raise StateFileError("label must be a string", line_of("label"), path)
        data_line = line_of("data")
        n = prod(dims)
        raw = obj["data"]
        canonical = data_line is not None and len(lines) >= data_line + len(raw) + 2

        def row_line(i: int) -> int | None:
            return data_line + 1 + i if canonical else data_line

        def as_complex(entry, i):
            if not (isinstance(entry, list) and len(entry) == 2 and all(isinstance(x, (int, float)) for x in entry)):
                raise StateFileError(f"entry {i} is not an [re, im] pair", row_line(i), path)
            return complex(entry[0], entry[1])

        if not isinstance(raw, list) or len(raw) != n:
            raise StateFileError(f"data must have {n} entries for dims {dims}", data_line, path)
        if kind == "pure":
            data = np.array([as_complex(e, i) for i, e in enumerate(raw)], dtype=complex)
            norm = np.linalg.norm(data)
            if abs(norm - 1) > 1e-10:
                raise StateFileError(f"state vector has norm {float(norm)!r}, expected 1", data_line, path)
        else:
            rows = []
            for i, row in enumerate(raw):
                if not isinstance(row, list) or len(row) != n:
                    raise StateFileError(f"row {i} must have {n} entries", row_line(i), path)
                rows.append([as_complex(e, i) for e in row])
            data = np.array(rows, dtype=complex)
            dev = np.abs(data - data.conj().T)
            if dev.max() > 1e-10:
                i = int(np.unravel_index(np.argmax(dev), dev.shape)[0])
                raise StateFileError(f"matrix is not Hermitian (row {i}, deviation {dev.max():.3g})", row_line(i), path)
            tr = np.trace(data).real
            if abs(tr - 1) > 1e-10:
                raise StateFileError(f"trace is {float(tr)!r}, expected 1", data_line, path)
        sf = cls(tuple(dims), kind, data, label)
        try:
            sf.to_state()
        except TripentError as exc:
            raise StateFileError(str(exc), data_line, path) from exc
        return sf

    @classmethod
    def read(cls, path: str) -> "StateFile":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise StateFileError(f"cannot read state file: {exc.strerror}", None, path) from exc
        return cls.loads(text, path)


# ---------------------------------------------------------------------------
# CSV and run records

CSV_COLUMNS = ("command", "label", "kind", "scope", "alpha", "name", "value", "seed", "converged")


def append_csv(path: str, rows: Sequence[dict]) -> None:
    """Append rows, writing the header first when the file is new or empty."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        if fresh:
            w.writeheader()
        for row in rows:
            w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in CSV_COLUMNS})


@dataclass
class RunRecord:
    command: str
    parameters: dict
    seed: int | None
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, name: str, value: float) -> None:
        self.outputs.append((name, float(value)))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


# ---------------------------------------------------------------------------
# SVG


def gap_curve_svg(alphas: Sequence[float], gaps: Sequence[float], title: str = "", ylabel: str = "gap") -> str:
    """Self-contained SVG 1.1 line plot with a logarithmic alpha axis and a zero line."""
    w, h, pad = 640, 400, 60
    xs = np.log10(np.asarray(alphas, dtype=float))
    ys = np.asarray(gaps, dtype=float)
    x0, x1 = xs.min(), xs.max()
    y0, y1 = min(ys.min(), 0.0), max(ys.max(), 0.0)
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1, y1 + 1
    span = y1 - y0
    y0, y1 = y0 - 0.05 * span, y1 + 0.05 * span

    def px(x):
        return pad + (x - x0) / (x1 - x0) * (w - 2 * pad)

    def py(y):
        return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad)

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{py(0):.2f}" x2="{w - pad}" y2="{py(0):.2f}" stroke="gray" stroke-dasharray="4,4"/>',
    ]
    for k in range(int(np.ceil(x0)), int(np.floor(x1)) + 1):
        out.append(f'<line x1="{px(k):.2f}" y1="{h - pad}" x2="{px(k):.2f}" y2="{h - pad + 5}" stroke="black"/>')
        out.append(f'<text x="{px(k):.2f}" y="{h - pad + 20}" font-size="12" text-anchor="middle">1e{k}</text>')
    for y in np.linspace(y0, y1, 5):
        out.append(f'<text x="{pad - 6}" y="{py(y) + 4:.2f}" font-size="11" text-anchor="end">{y:.3g}</text>')
    out += [
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>',
        f'<text x="{w / 2}" y="{h - 15}" font-size="13" text-anchor="middle">alpha (log scale)</text>',
        f'<text x="15" y="{h / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {h / 2})">{_esc(ylabel)}</text>',
        f'<text x="{w / 2}" y="25" font-size="14" text-anchor="middle">{_esc(title)}</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
