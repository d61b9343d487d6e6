"""Figure sweeps and CSV datasets.

A figure is described by a set of named axes (``d0_m``, ``d_m``, ``alpha``,
``k``, ``m``, ``snr_db``, ``quad_order``, ``noise_power``) and a nesting
order. Overrides replace whole axes, so ``{"d_m": [50]}`` restricts a figure
to one cell size.
"""

import csv
import enum
import io
import itertools
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .analytic_rates import (calibrate_power, esg_mimo, esg_mimo_high_snr, esg_siso,
                             esg_siso_high_snr)
from .geometry import SystemConfig, validate_config
from .quadrature import build_quadrature
from .simulator import monte_carlo_esg

__all__ = [
    "FigureId",
    "ExperimentSpec",
    "ResultRow",
    "AXES",
    "DEFAULT_TRIALS",
    "build_figure_spec",
    "spec_from_json",
    "point_seed",
    "analytic_row",
    "run_experiment",
    "format_csv",
    "write_csv",
    "read_csv",
]

DEFAULT_TRIALS = 10_000

# CSV column -> SystemConfig field
AXES = {
    "d0_m": "inner_radius_m",
    "d_m": "outer_radius_m",
    "alpha": "path_loss_exponent",
    "k": "num_users",
    "m": "num_antennas",
    "snr_db": "snr_sum_db",
    "quad_order": "quadrature_order",
    "noise_power": "noise_power",
}
_INT_AXES = {"k", "m", "quad_order"}


class FigureId(enum.Enum):
    FIG2_ESG_SURFACE = "2"
    FIG3_ESG_VS_K = "3"
    FIG4_ESG_VS_SNR = "4"
    FIG5_ESG_VS_M = "5"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().upper()
        for member in cls:
            if text in (member.value.upper(), member.name, "FIG" + member.value.upper()):
                return member
        raise ValueError(f"unknown figure id {value!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    figure_id: FigureId
    sweep: tuple
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    output_path: str = ""
    simulate: bool = True

    def __post_init__(self):
        if not self.sweep:
            raise ValueError("sweep must contain at least one configuration")
        for cfg in self.sweep:
            validate_config(cfg, require_grouping=self.simulate and cfg.num_antennas > 1)
        if self.simulate and self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")


@dataclass(frozen=True)
class ResultRow:
    d0_m: float
    d_m: float
    alpha: float
    k: int
    m: int
    snr_db: float
    quad_order: int
    analytic_esg_nats: float
    high_snr_esg_nats: float
    mc_esg_nats: float | None
    mc_stderr_nats: float | None
    trials: int
    seed: int


COLUMNS = [f.name for f in fields(ResultRow)]

_BASE_AXES = {
    "d0_m": [50.0],
    "alpha": [3.76],
    "quad_order": [100],
    "noise_power": [1.0],
}

_FIGURES = {
    FigureId.FIG3_ESG_VS_K: (
        {"d_m": [500.0], "m": [1, 4], "snr_db": [0.0, 20.0],
         "k": [2 ** i for i in range(1, 9)]},
        ["m", "snr_db", "k"],
    ),
    FigureId.FIG4_ESG_VS_SNR: (
        {"d_m": [50.0, 200.0, 500.0], "m": [1, 4], "k": [256],
         "snr_db": [float(s) for s in range(0, 41, 5)]},
        ["m", "d_m", "snr_db"],
    ),
    FigureId.FIG5_ESG_VS_M: (
        {"d_m": [50.0, 200.0, 500.0], "m": [1, 2, 4, 8], "k": [256], "snr_db": [40.0]},
        ["d_m", "m"],
    ),
    FigureId.FIG2_ESG_SURFACE: (
        {"d0_m": list(np.linspace(10.0, 200.0, 50)),
         "d_m": list(np.linspace(10.0, 1000.0, 50)),
         "m": [1], "k": [256], "snr_db": [80.0]},
        ["d0_m", "d_m"],
    ),
}


def _axis_values(value, name):
    values = list(value) if isinstance(value, (list, tuple)) else [value]
    if not values:
        raise ValueError(f"override for {name!r} is empty")
    cast = int if name in _INT_AXES else float
    return [cast(v) for v in values]


def build_figure_spec(figure_id, overrides=None, trials=DEFAULT_TRIALS, seed=0,
                      output_path=""):
    """Sweep definition for one of the built-in figures.

    ``overrides`` maps axis names (see :data:`AXES`) to a value or a list of
    values. Points where ``M`` does not divide ``K`` are dropped, as are
    surface points with ``D < D0``.
    """
    fig = FigureId.parse(figure_id)
    if fig not in _FIGURES:
        raise ValueError(f"figure {fig.name} has no built-in sweep")
    axes, nesting = _FIGURES[fig]
    merged = {**_BASE_AXES, **axes}
    for name, value in (overrides or {}).items():
        if name not in AXES:
            raise ValueError(f"unknown sweep axis {name!r}")
        merged[name] = _axis_values(value, name)
    order = nesting + [a for a in AXES if a not in nesting]

    sweep = []
    for combo in itertools.product(*(merged[a] for a in order)):
        point = dict(zip(order, combo))
        if point["m"] > 1 and point["k"] % point["m"]:
            continue
        if point["d_m"] < point["d0_m"]:
            continue
        sweep.append(SystemConfig(**{AXES[a]: _axis_values(v, a)[0] for a, v in point.items()}))
    simulate = fig is not FigureId.FIG2_ESG_SURFACE
    return ExperimentSpec(fig, tuple(sweep), trials=trials, seed=seed,
                          output_path=output_path, simulate=simulate)


def spec_from_json(source, trials=None, seed=None, output_path="", quad_order=None):
    """Custom spec from a JSON document (path, text or already-parsed data).

    Either a list of flat point objects or an object with a ``points`` list
    and optional ``trials``, ``seed`` and ``simulate`` keys. Explicit
    keyword arguments take precedence over file values.
    """
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source) as fh:
            data = json.load(fh)
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = source
    if isinstance(data, list):
        data = {"points": data}
    points = data.get("points")
    if not isinstance(points, list):
        raise ValueError("sweep file must provide a list of points")
    sweep = []
    for point in points:
        unknown = set(point) - set(AXES)
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        values = {AXES[a]: _axis_values(v, a)[0] for a, v in point.items()}
        if quad_order is not None:
            values["quadrature_order"] = int(quad_order)
        sweep.append(SystemConfig(**values))
    return ExperimentSpec(
        FigureId.CUSTOM, tuple(sweep),
        trials=int(trials if trials is not None else data.get("trials", DEFAULT_TRIALS)),
        seed=int(seed if seed is not None else data.get("seed", 0)),
        output_path=output_path,
        simulate=bool(data.get("simulate", True)),
    )


def point_seed(seed, index):
    """64-bit seed of sweep point ``index``, derived from the run seed."""
    state = np.random.SeedSequence([int(seed) & ((1 << 64) - 1), int(index)])
    return int(state.generate_state(1, np.uint64)[0])


def analytic_row(config: SystemConfig):
    """``(analytic_esg, high_snr_esg)`` for one configuration."""
    q = build_quadrature(config)
    m = config.num_antennas
    lb = calibrate_power(q, m, config.snr_sum_db, config.noise_power)
    if m == 1:
        return esg_siso(q, lb), esg_siso_high_snr(q)
    return esg_mimo(q, m, lb), esg_mimo_high_snr(q, m)


def _row(config, analytic, high, mc, trials, seed):
    return ResultRow(
        d0_m=float(config.inner_radius_m), d_m=float(config.outer_radius_m),
        alpha=float(config.path_loss_exponent), k=int(config.num_users),
        m=int(config.num_antennas), snr_db=float(config.snr_sum_db),
        quad_order=int(config.quadrature_order),
        analytic_esg_nats=float(analytic), high_snr_esg_nats=float(high),
        mc_esg_nats=None if mc is None else mc.mean_esg,
        mc_stderr_nats=None if mc is None else mc.std_error,
        trials=trials, seed=seed)


def run_experiment(spec: ExperimentSpec, workers: int = 1):
    """Evaluate every sweep point in order; returns a list of rows.

    When ``spec.output_path`` is set the CSV is written atomically.
    """
    rows = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 and spec.simulate else None
    try:
        for index, config in enumerate(spec.sweep):
            analytic, high = analytic_row(config)
            seed = point_seed(spec.seed, index)
            if spec.simulate:
                mc = monte_carlo_esg(config, spec.trials, seed, executor=pool)
                rows.append(_row(config, analytic, high, mc, spec.trials, seed))
            else:
                rows.append(_row(config, analytic, high, None, 0, seed))
    finally:
        if pool is not None:
            pool.shutdown()
    if spec.output_path:
        write_csv(rows, spec.output_path)
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} in result row")
        return format(value, ".17g")
    return str(value)


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def write_csv(rows, path):
    """Write rows to ``path`` via a temporary file and an atomic rename."""
    text = format_csv(rows)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path):
    types = {f.name: f.type for f in fields(ResultRow)}
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for rec in reader:
            values = {}
            for name, text in rec.items():
                if text == "":
                    values[name] = None
                elif types[name] is int:
                    values[name] = int(text)
                else:
                    values[name] = float(text)
            rows.append(ResultRow(**values))
    return rows
