"""Parameter sweeps over any engine model.

A sweep is described by a JSON document::

    {
      "model": "chain_ff",
      "parameters": {"g": {"start": 0, "stop": 3, "steps": 301},
                     "n": {"values": [3, 4, 5]}},
      "fixed": {"omega": 1.0},
      "output": {"path": "out.csv", "format": "csv"},
      "seed": 0,
      "parallelism": 4
    }

Rows are the Cartesian product of the swept parameters, ordered
lexicographically by parameter name, and are emitted in the same order for
any worker count.  A point that fails records its message in the ``error``
column instead of aborting the sweep.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import platform
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from . import dynamics, open_chain, oscillators, qubit_chain, qubit_exact, two_qubit
from .errors import ConfigError, RegimeWarning

METRIC_COLUMNS = ("work", "heat", "gap", "efficiency", "std_dev")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ModelDef:
    func: Callable[[dict], dict]
    required: tuple
    defaults: dict
    diagnostics: tuple = ()
    integer: tuple = ()
    text: tuple = ()


def _two_qubit_spec(p):
    return two_qubit.TwoQubitSpec.from_reduced(p["total"], p["gamma"], p["delta"])


def _eval_two_qubit(p):
    spec = _two_qubit_spec(p)
    out = two_qubit.metrics(spec).as_dict()
    out["p11"] = two_qubit.outcome_probabilities(spec)[1]
    return out


def _eval_chain_ff(p):
    m = qubit_chain.metrics_closed_chain(p["n"], p["omega"], p["g"])
    return m.as_dict()


def _eval_chain_exact(p):
    spec = qubit_exact.QubitChainSpec.uniform(p["n"], p["omega"], p["g"], p["boundary"])
    return qubit_exact.engine_metrics_exact(spec).as_dict()


def _eval_open_chain(p):
    spec = open_chain.OpenChainSpec.uniform(p["n"], p["omega"], p["g"])
    regime = p["regime"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if regime == "weak":
            return open_chain.weak_coupling_metrics(spec).metrics.as_dict()
        if regime == "strong":
            return open_chain.strong_coupling_metrics(spec).as_dict()
    if regime == "exact":
        return qubit_exact.engine_metrics_exact(spec.exact_spec()).as_dict()
    raise ValueError(f"unknown regime {regime!r}")


def _eval_two_osc(p):
    return oscillators.metrics_two_oscillator(oscillators.TwoOscSpec(p["k0"], p["g"])).as_dict()


def _eval_network(p):
    k = oscillators.all_to_all_coupling(p["n"], p["k0"], p["g"])
    return oscillators.metrics_network(k).as_dict()


def _eval_chain_osc(p):
    r = oscillators.linear_chain_metrics(p["n"], p["k0"])
    out = r.metrics.as_dict()
    out.update(trace_k_inverse=r.trace_k_inverse, sum_frequencies=r.sum_frequencies)
    return out


def _eval_lattice(p):
    m = oscillators.lattice_metrics(p["m_side"], p["dim"], p["k0"])
    out = m.as_dict()
    out["work_per_oscillator"] = m.work / p["m_side"] ** p["dim"]
    return out


def _eval_dynamics(p):
    spec = _two_qubit_spec(p)
    meter = dynamics.MeterSpec(p["gamma_m"] * spec.total)
    relax = dynamics.RelaxationSpec(p["spectral_density"], p["temperature"])
    out = two_qubit.metrics(spec).as_dict()
    t_m, nu = dynamics.measurement_time(spec, meter)
    rates = dynamics.relaxation_rates(spec, relax)
    out.update(
        t_m=t_m,
        nu=nu,
        gamma_plus=rates.gamma_plus,
        gamma_minus=rates.gamma_minus,
        t_p=rates.t_p,
        t_c=rates.t_c,
        power=out["work"] / (t_m + 5 * rates.t_p),
    )
    return out


MODELS = {
    "two_qubit": ModelDef(_eval_two_qubit, ("gamma",), {"delta": 0.0, "total": 1.0}, ("p11",)),
    "chain_ff": ModelDef(_eval_chain_ff, ("n", "g"), {"omega": 1.0}, integer=("n",)),
    "chain_exact": ModelDef(
        _eval_chain_exact, ("n", "g"), {"omega": 1.0, "boundary": "closed"}, integer=("n",), text=("boundary",)
    ),
    "open_chain": ModelDef(
        _eval_open_chain, ("n", "g"), {"omega": 1.0, "regime": "exact"}, integer=("n",), text=("regime",)
    ),
    "two_osc": ModelDef(_eval_two_osc, ("k0", "g"), {}),
    "network": ModelDef(_eval_network, ("n", "k0", "g"), {}, integer=("n",)),
    "chain_osc": ModelDef(
        _eval_chain_osc, ("n",), {"k0": 1.0}, ("trace_k_inverse", "sum_frequencies"), integer=("n",)
    ),
    "lattice": ModelDef(
        _eval_lattice, ("m_side", "dim"), {"k0": 1.0}, ("work_per_oscillator",), integer=("m_side", "dim")
    ),
    "dynamics": ModelDef(
        _eval_dynamics,
        ("gamma", "delta", "gamma_m", "spectral_density"),
        {"total": 1.0, "temperature": 0.0},
        ("t_m", "nu", "gamma_plus", "gamma_minus", "t_p", "t_c", "power"),
    ),
}


@dataclass(frozen=True)
class SweepConfig:
    model: str
    parameters: dict  # name -> tuple of values
    fixed: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    output_format: str = "csv"
    seed: int = 0
    parallelism: int = 1

    @property
    def definition(self) -> ModelDef:
        return MODELS[self.model]

    @property
    def swept_names(self) -> list:
        return sorted(self.parameters)

    def points(self):
        names = self.swept_names
        for combo in itertools.product(*(self.parameters[n] for n in names)):
            yield dict(zip(names, combo))


def _expand_range(name: str, spec) -> tuple:
    where = f"parameters.{name}"
    if isinstance(spec, list):
        if not spec:
            raise ConfigError("value list is empty", where)
        return tuple(spec)
    if not isinstance(spec, dict):
        raise ConfigError("expected a range object or a list of values", where)
    if "values" in spec:
        return _expand_range(name, spec["values"])
    missing = [k for k in ("start", "stop", "steps") if k not in spec]
    if missing:
        raise ConfigError(f"missing {', '.join(missing)}", where)
    steps = spec["steps"]
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
        raise ConfigError("steps must be an integer >= 1 (empty range)", f"{where}.steps")
    try:
        start, stop = float(spec["start"]), float(spec["stop"])
    except (TypeError, ValueError):
        raise ConfigError("start and stop must be numbers", where) from None
    scale = spec.get("scale", "linear")
    if scale == "linear":
        values = np.linspace(start, stop, steps)
    elif scale == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("log ranges need positive start and stop", where)
        values = np.geomspace(start, stop, steps)
    else:
        raise ConfigError(f"unknown scale {scale!r}; use linear or log", f"{where}.scale")
    return tuple(float(v) for v in values)


def _coerce(model: ModelDef, name: str, value, where: str):
    if name in model.text:
        if not isinstance(value, str):
            raise ConfigError("expected a string", where)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number", where)
    if name in model.integer:
        if not float(value).is_integer():
            raise ConfigError("expected an integer value", where)
        return int(value)
    return float(value)


def parse_config(doc: dict) -> SweepConfig:
    """Validate a decoded JSON sweep document.

    Raises
    ------
    ConfigError
        With the offending field named in the message.
    """
    if not isinstance(doc, dict):
        raise ConfigError("sweep config must be a JSON object")
    model_name = doc.get("model")
    if model_name not in MODELS:
        raise ConfigError(f"unknown model {model_name!r}; choose from {sorted(MODELS)}", "model")
    model = MODELS[model_name]
    raw_params = doc.get("parameters", {})
    raw_fixed = doc.get("fixed", {})
    if not isinstance(raw_params, dict) or not raw_params:
        raise ConfigError("at least one swept parameter is required", "parameters")
    if not isinstance(raw_fixed, dict):
        raise ConfigError("expected an object", "fixed")
    known = set(model.required) | set(model.defaults)
    params = {}
    for name, spec in raw_params.items():
        if name not in known:
            raise ConfigError(f"not a parameter of model {model_name}", f"parameters.{name}")
        values = _expand_range(name, spec)
        params[name] = tuple(_coerce(model, name, v, f"parameters.{name}") for v in values)
    fixed = {}
    for name, value in raw_fixed.items():
        if name not in known:
            raise ConfigError(f"not a parameter of model {model_name}", f"fixed.{name}")
        if name in params:
            raise ConfigError("parameter is both swept and fixed", f"fixed.{name}")
        fixed[name] = _coerce(model, name, value, f"fixed.{name}")
    for name in model.required:
        if name not in params and name not in fixed:
            raise ConfigError(f"required by model {model_name}", f"parameters.{name}")
    output = doc.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("expected an object", "output")
    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}", "output.format")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a non-negative integer", "seed")
    jobs = doc.get("parallelism", 1)
    if not isinstance(jobs, int) or isinstance(jobs, bool) or jobs < 1:
        raise ConfigError("parallelism must be an integer >= 1", "parallelism")
    return SweepConfig(model_name, params, fixed, output.get("path"), fmt, seed, jobs)


def load_config(path) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return parse_config(doc)


@dataclass
class SweepResult:
    columns: list
    rows: list  # list of dicts
    config: SweepConfig
    seconds: float = 0.0

    @property
    def n_errors(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def _evaluate(task):
    model_name, point = task
    model = MODELS[model_name]
    try:
        return model.func(point), ""
    except Exception as exc:  # recorded per row by design
        return {}, f"{type(exc).__name__}: {exc}"


def run_sweep(config: SweepConfig, jobs: Optional[int] = None) -> SweepResult:
    """Evaluate every grid point; ``jobs`` overrides ``config.parallelism``."""
    model = config.definition
    jobs = config.parallelism if jobs is None else jobs
    swept = config.swept_names
    points = list(config.points())
    tasks = [(config.model, {**model.defaults, **config.fixed, **pt}) for pt in points]
    start = time.perf_counter()
    if jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_evaluate, tasks, chunksize=chunk))
    else:
        outcomes = [_evaluate(t) for t in tasks]
    columns = swept + list(METRIC_COLUMNS) + list(model.diagnostics) + ["error"]
    rows = []
    for pt, (values, error) in zip(points, outcomes):
        row = dict(pt)
        for col in METRIC_COLUMNS + model.diagnostics:
            row[col] = values.get(col)
        row["error"] = error
        rows.append(row)
    return SweepResult(columns, rows, config, time.perf_counter() - start)


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def table_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def table_to_json(columns, rows) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        return v

    records = [{c: clean(row.get(c)) for c in columns} for row in rows]
    return json.dumps({"columns": list(columns), "rows": records}, indent=1) + "\n"


def render(columns, rows, fmt: str) -> str:
    if fmt == "csv":
        return table_to_csv(columns, rows)
    if fmt == "json":
        return table_to_json(columns, rows)
    raise ConfigError(f"format must be one of {FORMATS}", "format")


def manifest(parameters: dict, seconds: float, extra: Optional[dict] = None) -> dict:
    out = {
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "parameters": parameters,
        "runtime_seconds": seconds,
    }
    if extra:
        out.update(extra)
    return out


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")


def write_table(path, columns, rows, fmt: str, parameters: dict, seconds: float) -> Path:
    """Write the table and its manifest; returns the table path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(columns, rows, fmt), newline="")
    manifest_path(path).write_text(json.dumps(manifest(parameters, seconds), indent=1, default=str) + "\n")
    return path


def config_parameters(config: SweepConfig) -> dict:
    return {
        "model": config.model,
        "parameters": {k: list(v) for k, v in config.parameters.items()},
        "fixed": config.fixed,
        "seed": config.seed,
        "parallelism": config.parallelism,
    }
