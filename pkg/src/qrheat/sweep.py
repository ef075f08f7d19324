"""Configuration-driven parameter sweeps with certified truncation.

A sweep is described by a JSON key-value document (see ``CONFIG_SCHEMA`` in
the README): base model parameters, bath templates, up to two grid axes,
requested observables, and truncation control.  Every grid point is solved
with automatic truncation escalation: the dressed-state cutoff starts at
``initial_n`` and grows in steps of 10 until each requested steady-state
observable changes by less than ``tol`` (relative, with a floating-point
noise floor set by the gross energy-exchange scale) between consecutive
truncations, or the cap is hit.  Records carry the certified truncation and
the stationarity residual.

Grid points are independent; with ``workers > 1`` they are dispatched to a
process pool and collected in row-major order, so the emitted CSV is
byte-identical for any worker count.  Failures at individual points are
recorded and never abort the sweep.
"""

from __future__ import annotations

import json
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .baths import BathSpec, build_rate_set
from .counting import (
    build_generator,
    cumulants_perturbative,
    direct_current,
    stationary_residual,
    steady_state,
    transport_scales,
)
from .errors import (
    IoError,
    ParseError,
    QrheatError,
    TruncationUnconverged,
    UnknownPreset,
    ValidationError,
)
from .observables import rectification, squeezing_factor, weak_coupling_current
from .overlaps import cached_overlap_table
from .spectrum import (
    SystemParams,
    build_branches,
    energy_levels,
    validate_params,
)

AXIS_NAMES = ("delta_T", "lambda", "T_R", "T_Q", "T0")
OBSERVABLES = (
    "current",
    "noise",
    "skewness",
    "rectification",
    "xi_squared",
    "weak_current",
)
# Observables that require a steady-state solve (and hence certification).
_STATE_OBSERVABLES = {"current", "noise", "skewness", "rectification", "xi_squared"}
# Smallest admissible negative bias relative to -2 * T0.
_BIAS_FLOOR = 1e-9
# Floating-point noise floor of a certified observable, as a fraction of its
# gross (non-cancelling) scale.
_CERT_FLOOR = 1e-12

_UNITS = {
    "delta_T": "omega_a",
    "lambda": "omega_a",
    "T_R": "omega_a",
    "T_Q": "omega_a",
    "T0": "omega_a",
    "current": "omega_a^2",
    "noise": "omega_a^3",
    "skewness": "omega_a^4",
    "rectification": "1",
    "xi_squared": "1",
    "weak_current": "omega_a^2",
    "converged_N": "1",
    "residual": "omega_a",
}


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: a linear range or an explicit value list."""

    name: str
    min: float = 0.0
    max: float = 1.0
    count: int = 2
    spacing: str = "linear"
    values: tuple[float, ...] | None = None

    def points(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class TruncationSpec:
    initial_n: int = 40
    max_n: int = 200
    tol: float = 1e-8


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep description with all defaults filled in."""

    model: SystemParams = SystemParams(omega_a=1.0, epsilon=1.0, coupling=0.1)
    t0: float = 1.0
    delta_t: float = 0.0
    t_r: float | None = None
    t_q: float | None = None
    alpha_r: float = 1e-3
    alpha_q: float = 1e-3
    omega_c: float = 10.0
    grid: tuple[AxisSpec, ...] = ()
    outputs: tuple[str, ...] = ("current",)
    truncation: TruncationSpec = field(default_factory=TruncationSpec)
    workers: int = 1
    component_ms: tuple[int, ...] = ()


@dataclass
class SweepRecord:
    """One grid point: axis values, observables, and certification data."""

    axes: dict
    values: dict
    converged_n: int = 0
    residual: float = 0.0
    wall_time_ms: float = 0.0
    error: str = ""


# ---------------------------------------------------------------------------
# Configuration parsing and validation
# ---------------------------------------------------------------------------


def _coupling_bound(omega_a: float) -> float:
    return 0.25 * omega_a - 1e-6 * omega_a


def _validate_config(cfg: SweepConfig) -> SweepConfig:
    problems = []
    bound = _coupling_bound(cfg.model.omega_a)
    if cfg.model.omega_a <= 0:
        problems.append(f"model.omega_a must be positive, got {cfg.model.omega_a}")
    if not 0.0 <= cfg.model.coupling <= bound:
        problems.append(
            f"model.coupling {cfg.model.coupling} outside [0, {bound:.6g}]"
        )
    if cfg.t0 < 0:
        problems.append(f"baths.t0 must be non-negative, got {cfg.t0}")
    for label, value in (("t_r", cfg.t_r), ("t_q", cfg.t_q)):
        if value is not None and value < 0:
            problems.append(f"baths.{label} must be non-negative, got {value}")
    for label, value in (("alpha_r", cfg.alpha_r), ("alpha_q", cfg.alpha_q)):
        if value < 0:
            problems.append(f"baths.{label} must be non-negative, got {value}")
    if cfg.omega_c <= 0:
        problems.append(f"baths.omega_c must be positive, got {cfg.omega_c}")
    if not _bias_in_range(cfg.delta_t, cfg.t0):
        problems.append(
            f"baths.delta_t {cfg.delta_t} outside "
            f"[-2*t0 + {_BIAS_FLOOR:g}, 2*t0] for t0={cfg.t0}"
        )

    if len(cfg.grid) > 2:
        problems.append(f"grid has {len(cfg.grid)} axes, at most 2 supported")
    seen = set()
    for axis in cfg.grid:
        if axis.name not in AXIS_NAMES:
            problems.append(f"unknown axis name {axis.name!r}")
            continue
        if axis.name in seen:
            problems.append(f"axis {axis.name!r} listed twice")
        seen.add(axis.name)
        if axis.spacing != "linear":
            problems.append(f"axis {axis.name!r}: spacing must be 'linear'")
        if axis.values is not None:
            if len(axis.values) < 2:
                problems.append(f"axis {axis.name!r}: needs at least 2 values")
            points = list(axis.values)
        else:
            if axis.count < 2:
                problems.append(f"axis {axis.name!r}: count must be >= 2")
            if not axis.min < axis.max:
                problems.append(f"axis {axis.name!r}: min must be below max")
            points = [axis.min, axis.max]
        if axis.name == "lambda":
            low, high = min(points), max(points)
            if low < 0 or high > bound:
                problems.append(
                    f"axis 'lambda' range [{low:.6g}, {high:.6g}] outside "
                    f"[0, {bound:.6g}] (coupling bound)"
                )
        elif axis.name == "delta_T":
            for value in (min(points), max(points)):
                if not _bias_in_range(value, cfg.t0):
                    problems.append(
                        f"axis 'delta_T' value {value:.6g} outside "
                        f"[-2*t0 + {_BIAS_FLOOR:g}, 2*t0] for t0={cfg.t0}"
                    )
                    break
        elif min(points) < 0:
            problems.append(f"axis {axis.name!r}: temperatures must be >= 0")

    if not cfg.outputs:
        problems.append("outputs must not be empty")
    for name in cfg.outputs:
        if name not in OBSERVABLES:
            problems.append(f"unknown observable {name!r}")
    if "rectification" in cfg.outputs and any(
        axis.name in ("T_R", "T_Q") for axis in cfg.grid
    ):
        problems.append(
            "rectification sweeps must use the delta_T parameterisation, "
            "not direct T_R/T_Q axes"
        )

    trunc = cfg.truncation
    if trunc.initial_n < 1:
        problems.append(f"truncation.initial_n must be >= 1, got {trunc.initial_n}")
    if trunc.max_n < trunc.initial_n + 10:
        problems.append(
            f"truncation.max_n must be >= initial_n + 10, got {trunc.max_n}"
        )
    if not trunc.tol > 0:
        problems.append(f"truncation.tol must be positive, got {trunc.tol}")
    if cfg.workers < 1:
        problems.append(f"workers must be >= 1, got {cfg.workers}")

    if problems:
        raise ValidationError(problems)
    if max(cfg.alpha_r, cfg.alpha_q) > 1e-2:
        warnings.warn(
            "bath coupling above 1e-2: the weak system-bath expansion behind "
            "the master equation may be inaccurate",
            stacklevel=2,
        )
    return cfg


def _bias_in_range(delta_t: float, t0: float) -> bool:
    if delta_t >= 0.0:
        return delta_t <= 2.0 * t0
    return delta_t >= -2.0 * t0 + _BIAS_FLOOR


def _take(mapping: dict, key: str, kind, default, problems: list, context: str):
    value = mapping.pop(key, default)
    if value is None:
        return None
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        problems.append(f"{context}.{key} must be {kind.__name__}, got {value!r}")
        return default
    return value


def parse_config(text: str) -> SweepConfig:
    """Parse and validate a JSON sweep document, filling defaults.

    Raises
    ------
    ParseError
        On malformed JSON, with line/column diagnostics.
    ValidationError
        Listing every violated invariant at once.
    """
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ParseError("top-level document must be a JSON object")

    problems: list[str] = []
    defaults = SweepConfig()

    model_raw = raw.pop("model", {})
    if not isinstance(model_raw, dict):
        problems.append("model must be an object")
        model_raw = {}
    model = SystemParams(
        omega_a=_take(model_raw, "omega_a", float, 1.0, problems, "model"),
        epsilon=_take(model_raw, "epsilon", float, 1.0, problems, "model"),
        coupling=_take(model_raw, "coupling", float, 0.1, problems, "model"),
    )
    for key in model_raw:
        problems.append(f"unknown key model.{key}")

    baths_raw = raw.pop("baths", {})
    if not isinstance(baths_raw, dict):
        problems.append("baths must be an object")
        baths_raw = {}
    t0 = _take(baths_raw, "t0", float, defaults.t0, problems, "baths")
    delta_t = _take(baths_raw, "delta_t", float, defaults.delta_t, problems, "baths")
    t_r = _take(baths_raw, "t_r", float, None, problems, "baths")
    t_q = _take(baths_raw, "t_q", float, None, problems, "baths")
    alpha_r = _take(baths_raw, "alpha_r", float, defaults.alpha_r, problems, "baths")
    alpha_q = _take(baths_raw, "alpha_q", float, defaults.alpha_q, problems, "baths")
    omega_c = _take(baths_raw, "omega_c", float, defaults.omega_c, problems, "baths")
    for key in baths_raw:
        problems.append(f"unknown key baths.{key}")

    grid_raw = raw.pop("grid", [])
    axes = []
    if not isinstance(grid_raw, list):
        problems.append("grid must be a list of axis objects")
        grid_raw = []
    for i, axis_raw in enumerate(grid_raw):
        context = f"grid[{i}]"
        if not isinstance(axis_raw, dict):
            problems.append(f"{context} must be an object")
            continue
        axis_raw = dict(axis_raw)
        name = axis_raw.pop("name", None)
        if not isinstance(name, str):
            problems.append(f"{context}.name must be a string")
            name = "?"
        values_raw = axis_raw.pop("values", None)
        values = None
        if values_raw is not None:
            if not isinstance(values_raw, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in values_raw
            ):
                problems.append(f"{context}.values must be a list of numbers")
            else:
                values = tuple(float(v) for v in values_raw)
        axis = AxisSpec(
            name=name,
            min=_take(axis_raw, "min", float, 0.0, problems, context),
            max=_take(axis_raw, "max", float, 1.0, problems, context),
            count=_take(axis_raw, "count", int, 2, problems, context),
            spacing=_take(axis_raw, "spacing", str, "linear", problems, context),
            values=values,
        )
        for key in axis_raw:
            problems.append(f"unknown key {context}.{key}")
        axes.append(axis)

    outputs_raw = raw.pop("outputs", list(defaults.outputs))
    if not isinstance(outputs_raw, list) or not all(
        isinstance(o, str) for o in outputs_raw
    ):
        problems.append("outputs must be a list of observable names")
        outputs_raw = list(defaults.outputs)

    trunc_raw = raw.pop("truncation", {})
    if not isinstance(trunc_raw, dict):
        problems.append("truncation must be an object")
        trunc_raw = {}
    trunc = TruncationSpec(
        initial_n=_take(trunc_raw, "initial_n", int, 40, problems, "truncation"),
        max_n=_take(trunc_raw, "max_n", int, 200, problems, "truncation"),
        tol=_take(trunc_raw, "tol", float, 1e-8, problems, "truncation"),
    )
    for key in trunc_raw:
        problems.append(f"unknown key truncation.{key}")

    workers = _take(raw, "workers", int, 1, problems, "config")
    for key in raw:
        problems.append(f"unknown key {key}")
    if problems:
        raise ValidationError(problems)

    cfg = SweepConfig(
        model=model,
        t0=t0,
        delta_t=delta_t,
        t_r=t_r,
        t_q=t_q,
        alpha_r=alpha_r,
        alpha_q=alpha_q,
        omega_c=omega_c,
        grid=tuple(axes),
        outputs=tuple(outputs_raw),
        truncation=trunc,
        workers=workers,
    )
    return _validate_config(cfg)


def config_to_dict(cfg: SweepConfig) -> dict:
    """Round-trippable plain-dict form of a config (for the JSON sidecar)."""
    return {
        "model": {
            "omega_a": cfg.model.omega_a,
            "epsilon": cfg.model.epsilon,
            "coupling": cfg.model.coupling,
        },
        "baths": {
            "t0": cfg.t0,
            "delta_t": cfg.delta_t,
            "t_r": cfg.t_r,
            "t_q": cfg.t_q,
            "alpha_r": cfg.alpha_r,
            "alpha_q": cfg.alpha_q,
            "omega_c": cfg.omega_c,
        },
        "grid": [
            {
                "name": axis.name,
                **(
                    {"values": list(axis.values)}
                    if axis.values is not None
                    else {"min": axis.min, "max": axis.max, "count": axis.count}
                ),
                "spacing": axis.spacing,
            }
            for axis in cfg.grid
        ],
        "outputs": list(cfg.outputs),
        "truncation": {
            "initial_n": cfg.truncation.initial_n,
            "max_n": cfg.truncation.max_n,
            "tol": cfg.truncation.tol,
        },
        "workers": cfg.workers,
    }


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------


def figure_preset(name: str) -> SweepConfig:
    """Executable dataset presets for the reference figures.

    Each preset pins the base parameters (t0 = 1, unit resonator frequency
    and qubit splitting, bath couplings 1e-3, cutoff 10) and the grid that
    regenerates the corresponding figure's data.
    """
    if name == "fig2a":
        bias = [round(-2.0 + 0.025 * k, 10) for k in range(161)]
        bias[0] = -2.0 + _BIAS_FLOOR
        cfg = SweepConfig(
            grid=(
                AxisSpec(name="lambda", values=(0.001, 0.01, 0.1)),
                AxisSpec(name="delta_T", values=tuple(bias)),
            ),
            outputs=("current",),
        )
    elif name == "fig2b":
        cfg = SweepConfig(
            grid=(
                AxisSpec(name="lambda", min=0.005, max=0.22, count=44),
                AxisSpec(name="delta_T", min=0.0, max=2.0, count=81),
            ),
            outputs=("current",),
        )
    elif name == "fig2e":
        cfg = SweepConfig(
            model=SystemParams(coupling=0.001),
            grid=(AxisSpec(name="delta_T", min=0.025, max=2.0, count=80),),
            outputs=("weak_current",),
            component_ms=(2, 3),
        )
    elif name == "fig3":
        cfg = SweepConfig(
            grid=(
                AxisSpec(name="lambda", min=0.005, max=0.22, count=44),
                AxisSpec(name="delta_T", min=0.025, max=2.0, count=80),
            ),
            outputs=("rectification",),
        )
    elif name in ("fig4a", "fig4b"):
        cfg = SweepConfig(
            grid=(
                AxisSpec(name="lambda", min=0.005, max=0.22, count=44),
                AxisSpec(name="delta_T", min=0.0, max=2.0, count=81),
            ),
            outputs=("noise",) if name == "fig4a" else ("skewness",),
        )
    elif name == "fig5a":
        cfg = SweepConfig(
            model=SystemParams(coupling=0.2),
            grid=(
                AxisSpec(name="lambda", min=0.05, max=0.2, count=4),
                AxisSpec(name="T0", min=0.0, max=2.5, count=51),
            ),
            outputs=("xi_squared",),
        )
    elif name == "fig5b":
        cfg = SweepConfig(
            model=SystemParams(coupling=0.2),
            grid=(
                AxisSpec(name="T_R", min=0.0, max=2.0, count=41),
                AxisSpec(name="T_Q", min=0.0, max=2.0, count=81),
            ),
            outputs=("xi_squared",),
        )
    else:
        raise UnknownPreset(f"no preset named {name!r}")
    return _validate_config(cfg)


# ---------------------------------------------------------------------------
# Point solver with truncation escalation
# ---------------------------------------------------------------------------


def _resolve_point(cfg: SweepConfig, axes: dict) -> tuple[SystemParams, float, float]:
    """Model parameters and the two bath temperatures at one grid point."""
    coupling = axes.get("lambda", cfg.model.coupling)
    params = replace(cfg.model, coupling=coupling)
    t0 = axes.get("T0", cfg.t0)
    delta_t = axes.get("delta_T", cfg.delta_t)
    t_r = t0 + 0.5 * delta_t
    t_q = t0 - 0.5 * delta_t
    if cfg.t_r is not None:
        t_r = cfg.t_r
    if cfg.t_q is not None:
        t_q = cfg.t_q
    t_r = axes.get("T_R", t_r)
    t_q = axes.get("T_Q", t_q)
    # Guard rounding: the bias floor keeps these non-negative analytically.
    return params, max(t_r, 0.0), max(t_q, 0.0)


def _state_observables(
    params: SystemParams,
    t_r: float,
    t_q: float,
    cfg: SweepConfig,
    wanted: set,
    n_max: int,
) -> tuple[dict, dict, float]:
    """Solve one truncation and return (values, certified scalars, residual)."""
    branches = build_branches(params)
    energies = energy_levels(params, branches, n_max)
    table = cached_overlap_table(branches, 1, n_max)
    bath_r = BathSpec("R", cfg.alpha_r, cfg.omega_c, t_r)
    bath_q = BathSpec("Q", cfg.alpha_q, cfg.omega_c, t_q)
    rates = build_rate_set(branches, energies, bath_r, bath_q, table)
    gen = build_generator(rates, energies)
    pops = steady_state(gen)
    residual = stationary_residual(gen, pops)
    a1, a2, a3 = transport_scales(pops, rates)

    values: dict = {}
    certified: dict = {}
    if "current" in wanted:
        j = direct_current(pops, rates, energies)
        values["current"] = j
        certified["current"] = (j, _CERT_FLOOR * a1)
    if "noise" in wanted or "skewness" in wanted:
        cumulants = cumulants_perturbative(rates, energies)
        if "noise" in wanted:
            values["noise"] = cumulants.noise
            certified["noise"] = (cumulants.noise, _CERT_FLOOR * a2)
        if "skewness" in wanted:
            values["skewness"] = cumulants.skewness
            certified["skewness"] = (cumulants.skewness, _CERT_FLOOR * a3)
    if "xi_squared" in wanted:
        squeezing = squeezing_factor(pops, branches)
        values["xi_squared"] = squeezing.xi_squared
        certified["xi_squared"] = (squeezing.xi_squared, _CERT_FLOOR)
    return values, certified, residual


def _certified(prev: dict, nxt: dict, tol: float) -> bool:
    for name, (value, floor) in prev.items():
        value_next = nxt[name][0]
        if abs(value_next - value) > tol * abs(value) + floor:
            return False
    return True


def _converged_state_solve(
    params: SystemParams, t_r: float, t_q: float, cfg: SweepConfig, wanted: set
) -> tuple[dict, int, float]:
    """Escalate the truncation until all requested observables certify.

    Returns the values at the certified truncation (not the probe one),
    together with that truncation and its stationarity residual.
    """
    trunc = cfg.truncation
    n = trunc.initial_n
    values, certified, residual = _state_observables(
        params, t_r, t_q, cfg, wanted, n
    )
    while n + 10 <= trunc.max_n:
        values_next, certified_next, residual_next = _state_observables(
            params, t_r, t_q, cfg, wanted, n + 10
        )
        if _certified(certified, certified_next, trunc.tol):
            return values, n, residual
        values, certified, residual = values_next, certified_next, residual_next
        n += 10
    raise TruncationUnconverged(
        f"observables not converged at the truncation cap N={trunc.max_n}"
    )


def compute_point(cfg: SweepConfig, axes: dict) -> SweepRecord:
    """Evaluate every requested observable at one grid point."""
    start = time.perf_counter()
    record = SweepRecord(axes=dict(axes), values={})
    try:
        params, t_r, t_q = _resolve_point(cfg, axes)
        validate_params(params)
        wanted = {name for name in cfg.outputs if name in _STATE_OBSERVABLES}
        wants_rect = "rectification" in wanted
        state_wanted = (wanted - {"rectification"}) | (
            {"current"} if wants_rect else set()
        )
        if state_wanted:
            values, n, residual = _converged_state_solve(
                params, t_r, t_q, cfg, state_wanted
            )
            record.converged_n = n
            record.residual = residual
            for name in wanted - {"rectification"}:
                record.values[name] = values[name]
            if wants_rect:
                reverse_values, n_rev, residual_rev = _converged_state_solve(
                    params, t_q, t_r, cfg, {"current"}
                )
                record.converged_n = max(record.converged_n, n_rev)
                record.residual = max(record.residual, residual_rev)
                rect = rectification(values["current"], reverse_values["current"])
                record.values["rectification"] = rect.factor
        if "weak_current" in cfg.outputs:
            bath_r = BathSpec("R", cfg.alpha_r, cfg.omega_c, t_r)
            bath_q = BathSpec("Q", cfg.alpha_q, cfg.omega_c, t_q)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                weak = weak_coupling_current(params, bath_r, bath_q)
            record.values["weak_current"] = weak.total
            for m in cfg.component_ms:
                i_m1, i_m0 = next(
                    (c[1], c[2]) for c in weak.components if c[0] == m
                )
                record.values[f"I_{m}_1"] = i_m1
                record.values[f"I_{m}_0"] = i_m0
    except QrheatError as exc:
        record.error = f"{type(exc).__name__}: {exc}"
    record.wall_time_ms = 1000.0 * (time.perf_counter() - start)
    return record


# ---------------------------------------------------------------------------
# Sweep driver
# ---------------------------------------------------------------------------


def _grid_points(cfg: SweepConfig) -> list[dict]:
    """Row-major cartesian product of the grid axes (single point if none)."""
    if not cfg.grid:
        return [{}]
    axes_values = [(axis.name, axis.points()) for axis in cfg.grid]
    points = []
    if len(axes_values) == 1:
        name, values = axes_values[0]
        points = [{name: float(v)} for v in values]
    else:
        (name_a, values_a), (name_b, values_b) = axes_values
        for va in values_a:
            for vb in values_b:
                points.append({name_a: float(va), name_b: float(vb)})
    return points


def _point_worker(task) -> SweepRecord:
    cfg, axes = task
    return compute_point(cfg, axes)


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Evaluate the whole grid, preserving row-major record order.

    Point failures are captured in the records; the sweep always returns
    one record per grid point.
    """
    points = _grid_points(cfg)
    if cfg.workers == 1 or len(points) <= 1:
        return [compute_point(cfg, axes) for axes in points]
    tasks = [(cfg, axes) for axes in points]
    chunk = max(1, len(tasks) // (cfg.workers * 4))
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_point_worker, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# Output emission
# ---------------------------------------------------------------------------


def _format(value: float) -> str:
    return f"{value:.17g}"


def _record_columns(cfg: SweepConfig) -> list[str]:
    columns = [axis.name for axis in cfg.grid]
    columns.extend(cfg.outputs)
    for m in cfg.component_ms:
        columns.extend((f"I_{m}_1", f"I_{m}_0"))
    columns.extend(("converged_N", "residual", "error"))
    return columns


def emit_csv(records: list[SweepRecord], destination, cfg: SweepConfig) -> None:
    """Write the records as CSV plus a JSON metadata sidecar.

    The CSV carries one header row naming axes and observables with units
    and one data row per record, numbers at 17 significant digits; identical
    configs yield byte-identical files.  The sidecar (same stem, ``.json``)
    echoes the config and environment versions.
    """
    if not records:
        raise ValueError("no records to emit")
    destination = Path(destination)
    columns = _record_columns(cfg)
    header = []
    for column in columns:
        unit = _UNITS.get(column)
        if column.startswith("I_"):
            unit = "omega_a^2"
        header.append(f"{column}[{unit}]" if unit else column)

    lines = [",".join(header)]
    for record in records:
        cells = []
        for column in columns:
            if column == "converged_N":
                cells.append(str(record.converged_n))
            elif column == "residual":
                cells.append(_format(record.residual))
            elif column == "error":
                cells.append(record.error.replace(",", ";"))
            elif column in record.axes:
                cells.append(_format(record.axes[column]))
            else:
                cells.append(_format(record.values.get(column, math.nan)))
        lines.append(",".join(cells))

    sidecar = {
        "config": config_to_dict(cfg),
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "qrheat": __version__,
        },
        "records": len(records),
        "failed": sum(1 for r in records if r.error),
        "total_wall_time_ms": sum(r.wall_time_ms for r in records),
    }
    try:
        destination.write_text("\n".join(lines) + "\n")
        destination.with_suffix(".json").write_text(
            json.dumps(sidecar, indent=2) + "\n"
        )
    except OSError as exc:
        raise IoError(f"failed to write {destination}: {exc}") from exc
