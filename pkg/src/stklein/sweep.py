"""Grid sweeps over scattering and threshold quantities with deterministic output."""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import IO, Any

import numpy as np

from .errors import NoScattering
from .kinematics import IncidentState, Region, StepProblem, incident_from_energy
from .regimes import RegimeLabel
from .scattering import CSV_COLUMNS, problem_row, scatter
from .thresholds import gap_edges

THREADS_ENV = "ST_KLEIN_THREADS"
CHUNK_SIZE = 2048

SCALES = ("linear", "log", "one-minus-log")
KINDS = ("scatter", "thresholds")
SCATTER_PARAMS = ("ei", "qv1", "qa1", "qv2", "qa2", "vm", "dqv", "dqa", "rav")
THRESHOLD_PARAMS = ("ei", "qv1", "qa1", "vm", "rav")
VELOCITY_PARAMS = ("vm",)

SCATTER_COLUMNS = CSV_COLUMNS + ("error",)
THRESHOLD_COLUMNS = (
    "E_i_over_m",
    "v_m",
    "r_AV",
    "qdV_plus",
    "qdV_minus",
    "width",
    "regime",
    "error",
)


class SweepSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    """One sweep axis.

    ``scale="one-minus-log"`` samples ``v = 1 - 10**(-x)`` for x on a linear
    grid from ``min`` to ``max``. ``values``, when given, replaces the grid
    with explicit x values (still passed through the scale's transform for
    ``one-minus-log``).
    """

    name: str
    min: float = 0.0
    max: float = 1.0
    count: int = 2
    scale: str = "linear"
    values: tuple[float, ...] | None = None

    def validate(self, allowed: tuple[str, ...]) -> None:
        if self.name not in allowed:
            raise SweepSpecError(f"unknown axis parameter {self.name!r}; expected one of {allowed}")
        if self.scale not in SCALES:
            raise SweepSpecError(f"unknown scale {self.scale!r}")
        if self.scale == "one-minus-log" and self.name not in VELOCITY_PARAMS:
            raise SweepSpecError("one-minus-log scale is only valid for velocity axes")
        if self.values is not None:
            if len(self.values) < 1:
                raise SweepSpecError(f"axis {self.name!r} has no values")
            return
        if self.count < 2:
            raise SweepSpecError(f"axis {self.name!r} needs count >= 2")
        if not self.min < self.max:
            raise SweepSpecError(f"axis {self.name!r} needs min < max")
        if self.scale == "log" and self.min <= 0.0:
            raise SweepSpecError("log axes need a positive minimum")

    def samples(self) -> list[float]:
        if self.values is not None:
            xs = np.asarray(self.values, dtype=float)
        elif self.scale == "log":
            xs = np.logspace(math.log10(self.min), math.log10(self.max), self.count)
        else:
            xs = np.linspace(self.min, self.max, self.count)
        if self.scale == "one-minus-log":
            xs = 1.0 - 10.0 ** (-xs)
        return [float(x) for x in xs]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Axis:
        values = data.get("values")
        return cls(
            name=data["name"],
            min=float(data.get("min", 0.0)),
            max=float(data.get("max", 1.0)),
            count=int(data.get("count", len(values) if values else 2)),
            scale=data.get("scale", "linear"),
            values=tuple(float(v) for v in values) if values is not None else None,
        )

    @classmethod
    def parse(cls, text: str) -> Axis:
        """``name:min:max:count[:scale]`` or ``name=v1,v2,...[:scale]``."""
        if "=" in text:
            name, rest = text.split("=", 1)
            vals, _, scale = rest.partition(":")
            return cls(name, values=tuple(float(v) for v in vals.split(",")), scale=scale or "linear")
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise SweepSpecError(f"cannot parse axis {text!r}; use name:min:max:count[:scale]")
        scale = parts[4] if len(parts) == 5 else "linear"
        return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]), scale)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis | None = None
    fixed: dict[str, float] = field(default_factory=dict)
    kind: str = "scatter"
    output_path: str | None = None
    output_format: str = "csv"

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise SweepSpecError(f"unknown sweep kind {self.kind!r}")
        allowed = SCATTER_PARAMS if self.kind == "scatter" else THRESHOLD_PARAMS
        axes = [a for a in (self.axis1, self.axis2) if a is not None]
        for a in axes:
            a.validate(allowed)
        names = [a.name for a in axes] + list(self.fixed)
        unknown = [n for n in self.fixed if n not in allowed]
        if unknown:
            raise SweepSpecError(f"unknown fixed parameters {unknown}")
        if len(set(names)) != len(names):
            raise SweepSpecError("a parameter appears more than once across axes and fixed values")
        if "qv2" in names and "dqv" in names:
            raise SweepSpecError("give either qv2 or dqv, not both")
        if "qa2" in names and ("dqa" in names or "rav" in names):
            raise SweepSpecError("give one of qa2, dqa or rav")
        if "dqa" in names and "rav" in names:
            raise SweepSpecError("give either dqa or rav, not both")
        required = ("ei", "vm") if self.kind == "scatter" else ("ei", "vm", "rav")
        missing = [n for n in required if n not in names]
        if missing:
            raise SweepSpecError(f"missing parameters {missing}")
        if self.output_format not in ("csv", "json"):
            raise SweepSpecError(f"unknown output format {self.output_format!r}")

    @property
    def columns(self) -> tuple[str, ...]:
        return SCATTER_COLUMNS if self.kind == "scatter" else THRESHOLD_COLUMNS

    def cells(self) -> list[dict[str, float]]:
        """Parameter maps in row-major order (axis1 slowest)."""
        axes = [a for a in (self.axis1, self.axis2) if a is not None]
        grids = [a.samples() for a in axes]
        out = []
        for combo in product(*grids):
            params = dict(self.fixed)
            params.update({a.name: x for a, x in zip(axes, combo)})
            out.append(params)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SweepSpec:
        output = data.get("output", {})
        spec = cls(
            axis1=Axis.from_dict(data["axis1"]),
            axis2=Axis.from_dict(data["axis2"]) if data.get("axis2") else None,
            fixed={k: float(v) for k, v in data.get("fixed", {}).items()},
            kind=data.get("kind", "scatter"),
            output_path=output.get("path"),
            output_format=output.get("format", "csv"),
        )
        spec.validate()
        return spec


def _scatter_problem(params: dict[str, float]) -> StepProblem:
    qv1 = params.get("qv1", 0.0)
    qa1 = params.get("qa1", 0.0)
    if "dqv" in params:
        qv2 = qv1 + params["dqv"]
    else:
        qv2 = params.get("qv2", qv1)
    if "dqa" in params:
        qa2 = qa1 + params["dqa"]
    elif "rav" in params:
        qa2 = qa1 + params["rav"] * (qv2 - qv1)
    else:
        qa2 = params.get("qa2", qa1)
    region1 = Region(qv1, qa1)
    incident = _incident(params["ei"], region1)
    return StepProblem(region1, Region(qv2, qa2), params["vm"], incident)


@lru_cache(maxsize=4096)
def _incident(E_i: float, region1: Region) -> IncidentState:
    return incident_from_energy(E_i, region1)


def scatter_cell(params: dict[str, float]) -> dict[str, object]:
    try:
        problem = _scatter_problem(params)
    except ValueError as exc:
        row = {c: math.nan for c in CSV_COLUMNS}
        row.update({"regime": "", "error": f"{type(exc).__name__}: {exc}"})
        return row
    try:
        row = scatter(problem).as_row()
        row["error"] = ""
    except NoScattering:
        row = problem_row(problem)
        row.update({"regime": RegimeLabel.NO_CATCH_UP.value, "error": ""})
    except (ValueError, ArithmeticError) as exc:
        row = problem_row(problem)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def threshold_cell(params: dict[str, float]) -> dict[str, object]:
    region1 = Region(params.get("qv1", 0.0), params.get("qa1", 0.0))
    row: dict[str, object] = {
        "E_i_over_m": params["ei"] - region1.qV,
        "v_m": params["vm"],
        "r_AV": params["rav"],
        "qdV_plus": math.nan,
        "qdV_minus": math.nan,
        "width": math.nan,
        "regime": "",
        "error": "",
    }
    try:
        incident: IncidentState = incident_from_energy(params["ei"], region1)
        if params["vm"] >= incident.group_velocity:
            row["regime"] = RegimeLabel.NO_CATCH_UP.value
            return row
        gap = gap_edges(incident, params["vm"], params["rav"])
    except ValueError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(qdV_plus=gap.qdV_plus, qdV_minus=gap.qdV_minus, width=gap.width)
    return row


def _evaluate_chunk(kind: str, chunk: list[dict[str, float]]) -> list[dict[str, object]]:
    fn = scatter_cell if kind == "scatter" else threshold_cell
    return [fn(p) for p in chunk]


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise SweepSpecError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise SweepSpecError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[dict[str, object]]:
    """Evaluate every grid cell; rows come back in grid order.

    Chunks may be evaluated concurrently but are reassembled in submission
    order, so the table does not depend on the thread count.
    """
    spec.validate()
    cells = spec.cells()
    chunks = [cells[i : i + CHUNK_SIZE] for i in range(0, len(cells), CHUNK_SIZE)]
    n = threads if threads is not None else thread_count()
    if n == 1 or len(chunks) == 1:
        parts = [_evaluate_chunk(spec.kind, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(lambda c: _evaluate_chunk(spec.kind, c), chunks))
    return [row for part in parts for row in part]


def _format_csv_value(value: object) -> str:
    if type(value) is float:
        return "" if value != value else format(value, ".17g")
    text = str(value)
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_csv(rows: list[dict[str, object]], columns: tuple[str, ...], stream: IO[str]) -> None:
    """RFC 4180 CSV with LF line endings; NaN becomes an empty field."""
    memo: dict[object, str] = {}

    def fmt(value: object) -> str:
        # grid inputs and labels repeat heavily, so formatted text is memoised;
        # zeros are resolved first because 0.0 and -0.0 share a dict key
        if type(value) is float:
            if value != value:
                return ""
            if value == 0.0:
                return "-0" if math.copysign(1.0, value) < 0.0 else "0"
        text = memo.get(value)
        if text is None:
            text = memo[value] = _format_csv_value(value)
        return text

    stream.write(",".join(_format_csv_value(c) for c in columns) + "\n")
    stream.write("".join(",".join([fmt(row[c]) for c in columns]) + "\n" for row in rows))


def _json_value(value: object) -> object:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json(rows: list[dict[str, object]], columns: tuple[str, ...], stream: IO[str]) -> None:
    payload = [{c: _json_value(row[c]) for c in columns} for row in rows]
    json.dump(payload, stream, allow_nan=False)
    stream.write("\n")


def render(rows: list[dict[str, object]], columns: tuple[str, ...], fmt: str = "csv") -> str:
    buf = io.StringIO(newline="")
    (write_csv if fmt == "csv" else write_json)(rows, columns, buf)
    return buf.getvalue()


PRESETS: dict[str, dict[str, Any]] = {
    "1b": {
        "kind": "scatter",
        "axis1": {"name": "dqv", "min": 0.0, "max": 8.0, "count": 801},
        "fixed": {"ei": 4.0, "vm": 0.0, "rav": 0.0},
    },
    "3a": {
        "kind": "scatter",
        "axis1": {"name": "vm", "min": 0.0, "max": 0.999, "count": 601},
        "axis2": {"name": "dqv", "min": 0.0, "max": 6.0, "count": 601},
        "fixed": {"ei": 4.0, "rav": -1.0},
    },
    "3b": {
        "kind": "thresholds",
        "axis1": {"name": "vm", "scale": "one-minus-log", "values": [2, 4, 7, 10]},
        "axis2": {"name": "ei", "min": 1.01, "max": 1.0e6, "count": 601, "scale": "log"},
        "fixed": {"rav": -1.0},
    },
}


def preset(which: str, **overrides: Any) -> SweepSpec:
    if which not in PRESETS:
        raise SweepSpecError(f"unknown figure preset {which!r}; choose from {sorted(PRESETS)}")
    data = dict(PRESETS[which])
    data["output"] = {k: v for k, v in overrides.items() if v is not None}
    return SweepSpec.from_dict(data)


_PLOT_TEMPLATE = '''"""Plot {csv_name} (written alongside the sweep output)."""
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_name!r}
with open(path, newline="") as fh:
    rows = list(csv.DictReader(fh))


def col(name):
    return [float(r[name]) if r[name] != "" else float("nan") for r in rows]


x_name, y_name, series = {x!r}, {y!r}, {series!r}
fig, ax = plt.subplots()
if series is None:
    ax.plot(col(x_name), col(y_name))
else:
    for key in sorted({{r[series] for r in rows}}, key=float):
        sub = [r for r in rows if r[series] == key]
        xs = [float(r[x_name]) for r in sub]
        ys = [float(r[y_name]) if r[y_name] != "" else float("nan") for r in sub]
        ax.plot(xs, ys, label=f"{{series}} = {{key}}")
    ax.legend()
{extra}ax.set_xlabel(x_name)
ax.set_ylabel(y_name)
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def plot_script(spec: SweepSpec, csv_name: str) -> str:
    """A standalone matplotlib script for the sweep's CSV."""
    if spec.kind == "thresholds":
        x, y = "E_i_over_m", "qdV_minus"
        series = spec.axis1.name if spec.axis2 is not None else None
        series_col = {"vm": "v_m", "ei": "E_i_over_m", "rav": "r_AV"}.get(series) if series else None
        extra = 'ax.set_xscale("log")\nax.set_yscale("log")\n'
        return _PLOT_TEMPLATE.format(csv_name=csv_name, x=x, y=y, series=series_col, extra=extra)
    if spec.axis2 is None:
        x = {"dqv": "qV2", "vm": "v_m", "ei": "E_i"}.get(spec.axis1.name, spec.axis1.name)
        return _PLOT_TEMPLATE.format(csv_name=csv_name, x=x, y="T", series=None, extra="")
    # 2-D scatter grids render as an image of T
    n1, n2 = len(spec.axis1.samples()), len(spec.axis2.samples())
    return f'''"""Plot {csv_name} as a transmission map."""
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else {csv_name!r}
with open(path, newline="") as fh:
    rows = list(csv.DictReader(fh))
T = np.array([float(r["T"]) if r["T"] != "" else np.nan for r in rows]).reshape({n1}, {n2})
fig, ax = plt.subplots()
im = ax.imshow(T, origin="lower", aspect="auto", extent=[{spec.axis2.samples()[0]!r}, {spec.axis2.samples()[-1]!r}, {spec.axis1.samples()[0]!r}, {spec.axis1.samples()[-1]!r}])
fig.colorbar(im, label="T")
ax.set_xlabel({spec.axis2.name!r})
ax.set_ylabel({spec.axis1.name!r})
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def write_output(spec: SweepSpec, rows: list[dict[str, object]], emit_plot_script: bool = False) -> str | None:
    """Write rows to the spec's output path, or return the text when no path is set."""
    text = render(rows, spec.columns, spec.output_format)
    if spec.output_path is None:
        return text
    path = Path(spec.output_path)
    path.write_text(text, encoding="utf-8", newline="")
    if emit_plot_script:
        path.with_suffix(".plot.py").write_text(plot_script(spec, path.name), encoding="utf-8")
    return None


__all__ = [
    "Axis",
    "PRESETS",
    "SweepSpec",
    "SweepSpecError",
    "plot_script",
    "preset",
    "render",
    "run_sweep",
    "scatter_cell",
    "thread_count",
    "threshold_cell",
    "write_csv",
    "write_json",
    "write_output",
]
