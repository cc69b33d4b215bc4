"""Declarative parameter sweeps over one or two axes.

Config files are flat ``key = value`` text; see ``docs/config.md`` for the
grammar. Every grid point yields one :class:`ResultRecord` per solver, in
row-major grid order (first axis outermost) regardless of parallelism.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from pathlib import Path

import numpy as np

from . import amplitudes as amp
from . import lindblad
from .blockade import (
    Branch,
    PumpSetting,
    classify_blockade,
    nonreciprocal_ratio,
    optimal_pump_single,
    optimal_pump_two,
    pump_is_weak,
    select_branch,
    single_photon_resonance,
)
from .errors import BlockadeSimError, ConfigError
from .model import Direction, SystemParams, effective_drive

SCHEMA_VERSION = 1
SWEEPABLE = ("delta_c", "delta_a", "g", "gamma", "kappa1", "b_in", "omega_p", "theta_p")
BASE_KEYS = ("kappa1", "kappa2", "gamma", "g", "delta_c", "delta_a", "b_in",
             "omega_p", "theta_p")
DIRECTIONS = ("forward", "backward", "both")
SOLVERS = ("amplitudes", "lindblad", "both")
PUMP_MODES = ("fixed", "optimal_single", "optimal_two")
BRANCHES = ("auto", "plus", "minus")
BRANCH_JUMP = 5.0
NORM_EPS = 1e-3
TOP_POPULATION_TOL = 1e-10
JOBS_ENV = "BLOCKADE_SIM_JOBS"
PRESETS = ("fig2", "fig3", "fig4", "fig4b", "fig5a", "fig5b", "fig5c", "fig5d", "fig6")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class PumpMode:
    """How the pump is chosen at each grid point.

    ``reference`` is ``None`` for a per-point optimum, ``"resonance"`` to
    evaluate the optimum at the point's own resonance detuning
    ``Re[g^2 / (delta_a - i gamma/2)]``, or a number giving a fixed reference
    cavity detuning.
    """

    mode: str = "fixed"
    direction: Direction = Direction.FORWARD
    reference: float | str | None = None
    branch: str = "auto"


@dataclass(frozen=True)
class SweepConfig:
    base: SystemParams
    axes: tuple[Axis, ...]
    direction: str = "both"
    pump: PumpMode = field(default_factory=PumpMode)
    solver: str = "both"
    n_max: int = 10
    check_truncation: bool = False
    name: str = ""

    def __post_init__(self):
        problems = validate_config(self)
        if problems:
            raise ConfigError("invalid sweep config: " + "; ".join(problems))

    @property
    def solvers(self) -> tuple[str, ...]:
        return ("amplitudes", "lindblad") if self.solver == "both" else (self.solver,)

    @property
    def directions(self) -> tuple[Direction, ...]:
        if self.direction == "both":
            return (Direction.FORWARD, Direction.BACKWARD)
        return (Direction(self.direction),)

    def grid(self) -> list[tuple[float, ...]]:
        return list(product(*(ax.values for ax in self.axes)))

    def replace(self, **changes) -> SweepConfig:
        return dataclasses.replace(self, **changes)


def validate_config(cfg: SweepConfig) -> list[str]:
    problems = []
    names = [ax.name for ax in cfg.axes]
    if not 1 <= len(names) <= 2:
        problems.append(f"need 1 or 2 axes, got {len(names)}")
    if len(set(names)) != len(names):
        problems.append(f"duplicate axes: {names}")
    for ax in cfg.axes:
        if ax.name not in SWEEPABLE:
            problems.append(f"axis {ax.name!r} is not sweepable")
        if ax.count < 2:
            problems.append(f"axis {ax.name} needs count >= 2")
        if not (math.isfinite(ax.start) and math.isfinite(ax.stop)):
            problems.append(f"axis {ax.name} bounds must be finite")
    if cfg.direction not in DIRECTIONS:
        problems.append(f"direction must be one of {DIRECTIONS}")
    if cfg.solver not in SOLVERS:
        problems.append(f"solver must be one of {SOLVERS}")
    if cfg.n_max < 3:
        problems.append("n_max must be >= 3")
    if cfg.check_truncation and cfg.n_max < 4:
        problems.append("check_truncation needs n_max >= 4")
    pm = cfg.pump
    if pm.mode not in PUMP_MODES:
        problems.append(f"pump.mode must be one of {PUMP_MODES}")
    if pm.branch not in BRANCHES:
        problems.append(f"pump.branch must be one of {BRANCHES}")
    if isinstance(pm.reference, str) and pm.reference != "resonance":
        problems.append("pump.reference must be pointwise, resonance or a number")
    if pm.mode != "fixed" and {"omega_p", "theta_p"} <= set(names):
        problems.append("an optimal pump mode cannot sweep both omega_p and theta_p")
    return problems


# -- config files ----------------------------------------------------------

def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


def _parse_bool(text: str, where: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"{where}: expected true/false, got {text!r}")


def parse_config(text: str, source: str = "<config>") -> SweepConfig:
    entries: dict[str, tuple[str, str]] = {}
    axis_order: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{where}: empty key or value")
        if key in entries:
            what = "axis" if key.startswith("axis.") else "key"
            raise ConfigError(f"{where}: duplicate {what} {key!r}")
        entries[key] = (value, where)
        if key.startswith("axis."):
            axis_order.append(key)

    def take(key, default=None):
        return entries.pop(key, (default, f"{source}:{key}"))

    version, where = take("schema_version", str(SCHEMA_VERSION))
    if version != str(SCHEMA_VERSION):
        raise ConfigError(f"{where}: unsupported schema_version {version!r}")

    base_kwargs = {}
    for name in BASE_KEYS:
        value, where = take(f"base.{name}")
        if value is not None:
            base_kwargs[name] = _parse_float(value, where)
    value, where = take("base.allow_loss")
    if value is not None:
        base_kwargs["allow_loss"] = _parse_bool(value, where)
    if "kappa1" in base_kwargs and "kappa2" not in base_kwargs \
            and not base_kwargs.get("allow_loss", False):
        base_kwargs["kappa2"] = 1.0 - base_kwargs["kappa1"]
    try:
        base = SystemParams(**base_kwargs)
    except BlockadeSimError as exc:
        raise ConfigError(f"{source}: base parameters: {exc}") from None

    axes = []
    for key in axis_order:
        value, where = take(key)
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"{where}: axis needs 'min, max, count'")
        count = _parse_float(parts[2], where)
        if count != int(count):
            raise ConfigError(f"{where}: count must be an integer")
        axes.append(Axis(key[len("axis."):], _parse_float(parts[0], where),
                         _parse_float(parts[1], where), int(count)))

    direction = take("direction", "both")[0]
    solver = take("solver", "both")[0]
    value, where = take("n_max", "10")
    n_max = _parse_float(value, where)
    if n_max != int(n_max):
        raise ConfigError(f"{where}: n_max must be an integer")
    value, where = take("check_truncation", "false")
    check = _parse_bool(value, where)
    name = take("name", "")[0]

    mode = take("pump.mode", "fixed")[0]
    pdir, where = take("pump.direction", "forward")
    if pdir not in ("forward", "backward"):
        raise ConfigError(f"{where}: pump.direction must be forward or backward")
    ref_text, where = take("pump.reference", "pointwise")
    if ref_text == "pointwise":
        reference = None
    elif ref_text == "resonance":
        reference = "resonance"
    else:
        reference = _parse_float(ref_text, where)
    branch = take("pump.branch", "auto")[0]

    if entries:
        unknown = ", ".join(f"{k} ({w})" for k, (_, w) in entries.items())
        raise ConfigError(f"unknown keys: {unknown}")
    return SweepConfig(base=base, axes=tuple(axes), direction=direction,
                       pump=PumpMode(mode, Direction(pdir), reference, branch),
                       solver=solver, n_max=int(n_max), check_truncation=check, name=name)


def load_config(path) -> SweepConfig:
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files(__package__).joinpath("presets").joinpath(f"{name}.cfg").read_text()


def load_preset(name: str) -> SweepConfig:
    return parse_config(preset_text(name), source=f"preset:{name}")


# -- evaluation ------------------------------------------------------------

@dataclass
class ResultRecord:
    index: int
    solver: str
    kappa1: float
    kappa2: float
    gamma: float
    g: float
    delta_c: float
    delta_a: float
    b_in: float
    omega_f: float
    omega_b: float
    omega_p: float = math.nan
    theta_p: float = math.nan
    pump_branch: str = ""
    g2_f: float = math.nan
    g2_b: float = math.nan
    g3_f: float = math.nan
    g3_b: float = math.nan
    n_photon_f: float = math.nan
    n_photon_b: float = math.nan
    eta_db: float = math.nan
    class_f: str = ""
    class_b: str = ""
    converged: bool = False
    warning: str = ""
    error: str = ""

    def add_warning(self, text: str):
        self.warning = f"{self.warning}; {text}" if self.warning else text


CSV_HEADER = tuple(f.name for f in dataclasses.fields(ResultRecord))


def point_params(cfg: SweepConfig, values) -> SystemParams:
    changes = dict(zip((ax.name for ax in cfg.axes), (float(v) for v in values)))
    return cfg.base.replace(**changes)


def resolve_pump(pm: PumpMode, params: SystemParams,
                 swept=()) -> tuple[SystemParams, str]:
    """Apply a pump protocol; returns the pumped params and the branch tag.

    Components named in ``swept`` (``omega_p``/``theta_p``) keep the values
    already in ``params`` instead of the optimum.
    """
    if pm.mode == "fixed":
        return params, ""
    if pm.reference is None:
        ref_params = params
    else:
        ref_dc = single_photon_resonance(params) if pm.reference == "resonance" else pm.reference
        ref_params = params.replace(delta_c=ref_dc)
    branch_tag = ""
    if pm.mode == "optimal_single":
        setting = optimal_pump_single(ref_params, pm.direction)
    else:
        branch = select_branch(ref_params, pm.direction) if pm.branch == "auto" \
            else Branch(pm.branch)
        setting = optimal_pump_two(ref_params, pm.direction, branch)
        branch_tag = branch.value
    omega_p = params.omega_p if "omega_p" in swept else setting.omega_p
    theta_p = params.theta_p if "theta_p" in swept else setting.theta_p
    return params.replace(omega_p=omega_p, theta_p=theta_p), branch_tag


def solve_amplitudes(params, direction):
    """``(n, g2, g3, normalized_ok)`` from the closed-form amplitudes."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", amp.ClosedFormMismatchWarning)
        state = amp.steady_amplitudes(params, direction)
    n = amp.photon_population_amplitudes(state)
    ok = abs(state.norm - 1) <= NORM_EPS
    return n, amp.g2_from_amplitudes(state), amp.g3_from_amplitudes(state), ok


def solve_lindblad(params, direction, n_max=10, check=False):
    """``(n, g2, g3, converged)`` from the master-equation steady state."""
    sol = lindblad.solve_point(params, direction, n_max)
    problems = sol.rho.invariant_violations()
    if problems:
        raise BlockadeSimError("density matrix invariants: " + "; ".join(problems))
    if not np.isfinite(sol.g2):
        raise BlockadeSimError(f"undefined correlation: <a^dag a> = {sol.n_photon:.3g}")
    if check:
        ok = lindblad.check_truncation(params, direction, n_max).converged
    else:
        ok = sol.top_population < TOP_POPULATION_TOL
    return sol.n_photon, sol.g2, sol.g3, ok


def evaluate_point(cfg: SweepConfig, index: int, values) -> list[ResultRecord]:
    """All records for one grid point; per-point failures are captured, not raised."""
    records = []
    try:
        params = point_params(cfg, values)
    except BlockadeSimError as exc:
        return [_failed_record(cfg, index, values, solver, str(exc)) for solver in cfg.solvers]
    try:
        pumped, branch = resolve_pump(cfg.pump, params, [ax.name for ax in cfg.axes])
        pump_error = ""
    except BlockadeSimError as exc:
        pumped, branch, pump_error = params, "", f"pump: {exc}"
    for solver in cfg.solvers:
        rec = _blank_record(index, solver, pumped, branch)
        if pump_error:
            rec.error = pump_error
            records.append(rec)
            continue
        try:
            results = {}
            for d in cfg.directions:
                if solver == "amplitudes":
                    results[d] = solve_amplitudes(pumped, d)
                else:
                    results[d] = solve_lindblad(pumped, d, cfg.n_max, cfg.check_truncation)
        except BlockadeSimError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
            records.append(rec)
            continue
        _fill(rec, results)
        if cfg.pump.mode != "fixed":
            setting = PumpSetting(pumped.omega_p, pumped.theta_p)
            if not pump_is_weak(setting, pumped, cfg.pump.direction):
                rec.add_warning("pump not weak: omega_p >= drive")
        records.append(rec)
    return records


def _blank_record(index, solver, p: SystemParams, branch: str) -> ResultRecord:
    return ResultRecord(
        index=index, solver=solver, kappa1=p.kappa1, kappa2=p.kappa2, gamma=p.gamma,
        g=p.g, delta_c=p.delta_c, delta_a=p.delta_a, b_in=p.b_in,
        omega_f=effective_drive(p, Direction.FORWARD),
        omega_b=effective_drive(p, Direction.BACKWARD),
        omega_p=p.omega_p, theta_p=p.theta_p, pump_branch=branch)


def _failed_record(cfg, index, values, solver, text) -> ResultRecord:
    p = dataclasses.asdict(cfg.base)
    for ax, v in zip(cfg.axes, values):
        p[ax.name] = float(v)
    if "kappa1" in {ax.name for ax in cfg.axes} and not cfg.base.allow_loss:
        p["kappa2"] = 1.0 - p["kappa1"]
    return ResultRecord(
        index=index, solver=solver, kappa1=p["kappa1"], kappa2=p["kappa2"],
        gamma=p["gamma"], g=p["g"], delta_c=p["delta_c"], delta_a=p["delta_a"],
        b_in=p["b_in"], omega_f=math.nan, omega_b=math.nan,
        omega_p=p["omega_p"], theta_p=p["theta_p"], error=f"ParameterError: {text}")


def _fill(rec: ResultRecord, results):
    converged = True
    for d, (n, second, third, ok) in results.items():
        tag = "f" if d is Direction.FORWARD else "b"
        setattr(rec, f"n_photon_{tag}", n)
        setattr(rec, f"g2_{tag}", second)
        setattr(rec, f"g3_{tag}", third)
        setattr(rec, f"class_{tag}", classify_blockade(second, third).value)
        converged &= bool(ok)
    rec.converged = converged
    if len(results) == 2 and rec.g2_f > 0 and rec.g2_b > 0:
        rec.eta_db = nonreciprocal_ratio(rec.g2_f, rec.g2_b)


def _evaluate_star(args):
    return evaluate_point(*args)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(cfg: SweepConfig, jobs: int | None = None) -> list[ResultRecord]:
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    tasks = [(cfg, i, values) for i, values in enumerate(cfg.grid())]
    if jobs == 1:
        chunks = [evaluate_point(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_evaluate_star, tasks,
                                   chunksize=max(1, len(tasks) // (4 * jobs))))
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.index, cfg.solvers.index(r.solver)))
    if cfg.pump.mode != "fixed" and "omega_p" not in (ax.name for ax in cfg.axes):
        _flag_branch_jumps(cfg, records)
    return records


def _flag_branch_jumps(cfg: SweepConfig, records: list[ResultRecord]):
    inner = cfg.axes[-1].count
    for solver in cfg.solvers:
        prev = None
        for rec in (r for r in records if r.solver == solver):
            if prev is not None and rec.index % inner != 0 and not rec.error \
                    and not prev.error:
                lo, hi = sorted((prev.omega_p, rec.omega_p))
                if hi > BRANCH_JUMP * lo:
                    rec.add_warning(f"pump modulus jumps more than {BRANCH_JUMP:g}x")
            prev = rec


# -- output ----------------------------------------------------------------

def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_records(records: list[ResultRecord], fmt: str = "csv") -> str:
    if not records:
        raise ValueError("no records to emit")
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(_csv_cell(getattr(rec, name)) for name in CSV_HEADER)
    elif fmt == "jsonl":
        for rec in records:
            row = {name: _json_value(getattr(rec, name)) for name in CSV_HEADER}
            buf.write(json.dumps(row, allow_nan=False) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return buf.getvalue()


def emit(records: list[ResultRecord], fmt: str, path) -> None:
    text = format_records(records, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


GNUPLOT_1D = """\
set datafile separator ','
set key autotitle columnhead
set logscale y
set xlabel '{x}'
set ylabel 'g2(0)'
plot '{data}' using '{x}':'g2_f' with lines title 'forward', \\
     '' using '{x}':'g2_b' with lines title 'backward'
"""

GNUPLOT_2D = """\
set datafile separator ','
set xlabel '{x}'
set ylabel '{y}'
set view map
splot '{data}' using '{x}':'{y}':'{z}' with points palette pointtype 5 notitle
"""


def gnuplot_script(cfg: SweepConfig, data_path) -> str:
    names = [ax.name for ax in cfg.axes]
    data = Path(data_path).name
    if len(names) == 1:
        return GNUPLOT_1D.format(x=names[0], data=data)
    z = "eta_db" if cfg.direction == "both" else "g2_f"
    return GNUPLOT_2D.format(x=names[0], y=names[1], z=z, data=data)
