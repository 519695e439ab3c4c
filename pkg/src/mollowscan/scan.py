"""Parameter sweeps: configuration, scheduling, deviations, output.

A scan solves the steady state on a grid over one axis (cavity detuning,
coupling strength, or bath occupancy), optionally bundling the matching
zero-coupling baseline so the deviation signal d_na / d_g2 is computed
inside the run. Named spectral windows are resolved by a calibration
scan of the uncoupled model over a detuning grid.

Grid points are independent tasks over immutable parameters; with
``workers > 1`` they are farmed out to a process pool and reassembled
in axis order, so the worker count never changes the values.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .models import (
    ConfigurationError,
    ModelKind,
    ModelParams,
    assemble,
    cavity_slot,
    space_for,
)
from .observables import MollowWindows, PhotonStats, deviation, find_mollow_windows, photon_stats
from .steadystate import converge_truncation, solve

try:
    from importlib.metadata import version as _pkg_version

    CODE_VERSION = _pkg_version("artifact")
except Exception:  # pragma: no cover - metadata missing in odd installs
    CODE_VERSION = "unknown"

AXES = ("delta", "g", "g_m", "n_th")
WINDOW_NAMES = ("center", "side_left", "side_right", "half_left", "half_right")

CSV_HEADER = "axis,n_a,g2,d_na,d_g2,residual,n_cavity,n_mech"


class ConfigError(ValueError):
    """Raised for malformed scan configuration."""


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ConfigError(f"grid count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ConfigError(f"grid needs start < stop, got [{self.start}, {self.stop}]")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"grid scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and self.start <= 0:
            raise ConfigError("log grid needs start > 0")

    def points(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


#: Default detuning grid: wide enough for the full triplet at Omega = 8.
DEFAULT_DELTA_GRID = GridSpec(-20.0, 20.0, 401)
#: Default coupling ladder for deviation-vs-g studies.
DEFAULT_G_GRID = GridSpec(1e-3, 1e-1, 21, "log")


@dataclass(frozen=True)
class ScanConfig:
    model_kind: ModelKind
    params: ModelParams = field(default_factory=ModelParams)
    axis: str = "delta"
    grid: GridSpec | None = None
    window: str | float | None = None
    baseline: bool = True
    truncation: str = "fixed"
    ladder_tol: float = 1e-6
    ladder_observable: str = "n_a"
    solver_tol: float = 1e-10
    workers: int = 1
    calibration_grid: GridSpec = DEFAULT_DELTA_GRID

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.truncation not in ("fixed", "ladder"):
            raise ConfigError(f"truncation must be 'fixed' or 'ladder', got {self.truncation!r}")
        if self.ladder_observable not in ("n_a", "g2"):
            raise ConfigError(f"ladder_observable must be 'n_a' or 'g2'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.model_kind is ModelKind.SOURCE_ONLY:
            raise ConfigError("SourceOnly has no cavity to scan; use a cascaded or classical kind")
        if self.axis == "delta":
            if self.window is not None:
                raise ConfigError("window selection applies to coupling/thermal sweeps, not delta scans")
        else:
            if self.window is None:
                raise ConfigError(f"axis {self.axis!r} needs a window (named or explicit detuning)")
        if isinstance(self.window, str) and self.window not in WINDOW_NAMES:
            raise ConfigError(f"unknown window {self.window!r}; named windows are {WINDOW_NAMES}")
        _check_axis_kind(self.axis, self.model_kind)

    def resolved_grid(self) -> GridSpec:
        if self.grid is not None:
            return self.grid
        return DEFAULT_DELTA_GRID if self.axis == "delta" else DEFAULT_G_GRID


def _check_axis_kind(axis: str, kind: ModelKind) -> None:
    jc_kinds = (ModelKind.CASCADED_JC, ModelKind.CASCADED_JC_THERMAL, ModelKind.CLASSICAL_JC)
    oms_kinds = (ModelKind.CASCADED_OMS, ModelKind.CLASSICAL_OMS)
    if axis == "g" and kind not in jc_kinds:
        raise ConfigError(f"axis 'g' needs a Jaynes-Cummings kind, got {kind.value}")
    if axis == "g_m" and kind not in oms_kinds:
        raise ConfigError(f"axis 'g_m' needs an optomechanical kind, got {kind.value}")
    if axis == "n_th" and kind is not ModelKind.CASCADED_JC_THERMAL:
        raise ConfigError(f"axis 'n_th' needs CascadedJCThermal, got {kind.value}")


@dataclass(frozen=True)
class ScanRow:
    axis_value: float
    n_a: float
    g2: float | None
    d_na: float | None
    d_g2: float | None
    residual: float
    n_cavity: int
    n_mech: int


@dataclass
class ScanResult:
    rows: list[ScanRow]
    metadata: dict
    baseline_rows: list[ScanRow] | None = None

    def axis_values(self) -> np.ndarray:
        return np.array([r.axis_value for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def windows(self) -> MollowWindows:
        """Triplet windows located on this scan's n_a curve (delta axis only)."""
        if self.metadata.get("axis") != "delta":
            raise ConfigError("windows can only be located on a delta scan")
        return find_mollow_windows(self.axis_values(), self.column("n_a"))


# -- solving -----------------------------------------------------------


def _solve_point(task: tuple[str, ModelParams, float]) -> tuple[float, float | None, float, float, float]:
    kind_name, params, solver_tol = task
    kind = ModelKind.parse(kind_name)
    lv = assemble(kind, params)
    state = solve(lv, tol=solver_tol)
    stats = photon_stats(state.rho, lv.space, cavity_slot(kind))
    return stats.n_a, stats.g2, state.residual, state.trace_error, state.min_eigenvalue


def _solve_many(tasks: list[tuple[str, ModelParams, float]], workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [_solve_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _zero_coupling(kind: ModelKind, params: ModelParams) -> ModelParams:
    updates: dict = {}
    if params.g != 0:
        updates["g"] = 0.0
    if params.g_m != 0:
        updates["g_m"] = 0.0
    return params.with_updates(**updates) if updates else params


def _point_params(config: ScanConfig, params: ModelParams, value: float) -> ModelParams:
    if config.axis == "delta":
        return params.with_updates(delta=float(value))
    if config.axis == "g":
        return params.with_updates(g=float(value))
    if config.axis == "g_m":
        return params.with_updates(g_m=float(value))
    return params.with_updates(n_th=float(value))


# -- calibration -------------------------------------------------------


def calibrate_windows(config: ScanConfig) -> tuple[MollowWindows, ScanResult]:
    """Locate the triplet windows from the uncoupled model's detuning scan.

    Calibration always runs at zero target coupling and zero bath
    occupancy; mechanics decouple from the cavity steady state in that
    limit, so the optomechanical kinds calibrate with a minimal
    mechanical truncation.
    """
    base = _zero_coupling(config.model_kind, config.params)
    if base.n_th != 0:
        base = base.with_updates(n_th=0.0)
    if config.model_kind in (ModelKind.CASCADED_OMS, ModelKind.CLASSICAL_OMS):
        base = base.with_updates(n_mech=2)
    cal_config = ScanConfig(
        model_kind=config.model_kind,
        params=base,
        axis="delta",
        grid=config.calibration_grid,
        baseline=False,
        truncation="fixed",
        solver_tol=config.solver_tol,
        workers=config.workers,
    )
    result = run_scan(cal_config)
    return result.windows(), result


def _resolve_window(config: ScanConfig) -> tuple[float, dict | None]:
    if config.axis == "delta":
        return config.params.delta, None
    if isinstance(config.window, str):
        windows, _ = calibrate_windows(config)
        return windows.named()[config.window], windows.named()
    return float(config.window), None


# -- the scan ----------------------------------------------------------


def run_scan(config: ScanConfig) -> ScanResult:
    """Execute one sweep; returns rows ordered by axis value.

    With ``baseline=True`` the matching zero-coupling run is executed
    first and the deviation columns are filled in. For thermal sweeps the
    baseline is recomputed at every bath occupancy, so d_g2 isolates the
    target coupling rather than the bath.
    """
    t0 = time.monotonic()
    grid = config.resolved_grid()
    values = grid.points()

    params = config.params
    ladder_meta = None
    if config.truncation == "ladder":
        rep_value = values[0] if config.axis == "delta" else values[-1]
        rep = _point_params(config, params, rep_value)
        if config.axis == "delta":
            rep = rep.with_updates(delta=0.0)  # occupancy peaks at the central window
        else:
            rep = rep.with_updates(delta=_resolve_window_value_for_ladder(config))
        dims, _ = converge_truncation(
            config.model_kind, rep, config.ladder_observable,
            tol=config.ladder_tol, solver_tol=config.solver_tol,
        )
        params = params.with_updates(**dims)
        ladder_meta = dims

    window_delta, window_table = _resolve_window(config)
    if config.axis != "delta":
        params = params.with_updates(delta=window_delta)

    tasks = [(config.model_kind.value, _point_params(config, params, v), config.solver_tol) for v in values]

    baseline_tasks = None
    if config.baseline:
        baseline_tasks = [
            (config.model_kind.value, _zero_coupling(config.model_kind, p), config.solver_tol)
            for (_, p, _) in tasks
        ]

    solved = _solve_many(tasks, config.workers)
    base_solved = None
    if baseline_tasks is not None:
        if config.axis in ("g", "g_m"):
            # the whole coupling ladder shares one zero-coupling baseline point
            one = _solve_point(baseline_tasks[0])
            base_solved = [one] * len(tasks)
        else:
            base_solved = _solve_many(baseline_tasks, config.workers)

    rows: list[ScanRow] = []
    base_rows: list[ScanRow] = []
    worst = {"residual": 0.0, "trace_error": 0.0, "min_eigenvalue": math.inf}
    for i, value in enumerate(values):
        n_a, g2, residual, trace_err, min_eig = solved[i]
        worst["residual"] = max(worst["residual"], residual)
        worst["trace_error"] = max(worst["trace_error"], trace_err)
        worst["min_eigenvalue"] = min(worst["min_eigenvalue"], min_eig)
        d_na = d_g2 = None
        if base_solved is not None:
            b_na, b_g2, b_res, b_tr, b_eig = base_solved[i]
            worst["residual"] = max(worst["residual"], b_res)
            worst["trace_error"] = max(worst["trace_error"], b_tr)
            worst["min_eigenvalue"] = min(worst["min_eigenvalue"], b_eig)
            d_na, d_g2 = deviation(PhotonStats(n_a, g2), PhotonStats(b_na, b_g2))
            base_rows.append(ScanRow(float(values[i]), b_na, b_g2, None, None, b_res,
                                     tasks[i][1].n_cavity, tasks[i][1].n_mech))
        rows.append(ScanRow(
            axis_value=float(value), n_a=n_a, g2=g2, d_na=d_na, d_g2=d_g2,
            residual=residual, n_cavity=tasks[i][1].n_cavity, n_mech=tasks[i][1].n_mech,
        ))

    if not math.isfinite(worst["min_eigenvalue"]):
        worst["min_eigenvalue"] = None
    metadata = {
        "config": config_echo(config),
        "code_version": CODE_VERSION,
        "wall_time_s": time.monotonic() - t0,
        "axis": config.axis,
        "model_kind": config.model_kind.value,
        "window_delta": window_delta if config.axis != "delta" else None,
        "windows": window_table,
        "ladder_dims": ladder_meta,
        "physicality": worst,
    }
    return ScanResult(rows=rows, metadata=metadata, baseline_rows=base_rows or None)


def _resolve_window_value_for_ladder(config: ScanConfig) -> float:
    # the ladder only needs a representative detuning; an explicit window
    # is used as-is, a named one is approximated by the configured delta
    if isinstance(config.window, (int, float)):
        return float(config.window)
    return config.params.delta


# -- config files ------------------------------------------------------

_PARAM_FIELDS = {
    "kappa": float, "gamma_s": float, "gamma": float, "gamma_m": float,
    "omega_drive": float, "mu1": float, "mu2": float, "delta": float,
    "delta_s": float, "delta_a": float, "g": float, "g_m": float,
    "omega_m": float, "n_th": float, "n_cavity": int, "n_mech": int,
}

_SCAN_FIELDS = {
    "model_kind": str, "axis": str, "grid_min": float, "grid_max": float,
    "grid_count": int, "grid_scale": str, "window": str, "baseline": bool,
    "truncation": str, "ladder_tol": float, "ladder_observable": str,
    "solver_tol": float, "workers": int,
    "calibration_min": float, "calibration_max": float, "calibration_count": int,
}


def _parse_value(raw: str, caster, key: str):
    raw = raw.strip()
    if caster is bool:
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"key {key}: expected a boolean, got {raw!r}")
    if caster in (float, int):
        try:
            return caster(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key}: expected a number, got {raw!r}") from exc
    return raw


def parse_config(text: str) -> ScanConfig:
    """Parse the flat key-value config format.

    One ``key = value`` pair per line; ``#`` starts a comment; keys
    mirror the scan and model parameter fields. Unknown keys are errors
    so typos cannot silently fall back to defaults.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    unknown = set(raw) - set(_PARAM_FIELDS) - set(_SCAN_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "model_kind" not in raw:
        raise ConfigError("config must set model_kind")

    param_kwargs = {
        key: _parse_value(raw[key], caster, key)
        for key, caster in _PARAM_FIELDS.items()
        if key in raw
    }
    try:
        params = ModelParams(**param_kwargs)
    except ConfigurationError as exc:
        raise ConfigError(str(exc)) from exc

    kind = ModelKind.parse(raw["model_kind"])
    axis = raw.get("axis", "delta")

    grid = None
    grid_keys = {"grid_min", "grid_max", "grid_count", "grid_scale"} & set(raw)
    if grid_keys:
        if not {"grid_min", "grid_max", "grid_count"} <= set(raw):
            raise ConfigError("a custom grid needs grid_min, grid_max and grid_count")
        grid = GridSpec(
            _parse_value(raw["grid_min"], float, "grid_min"),
            _parse_value(raw["grid_max"], float, "grid_max"),
            _parse_value(raw["grid_count"], int, "grid_count"),
            raw.get("grid_scale", "linear").strip(),
        )

    calibration = DEFAULT_DELTA_GRID
    cal_keys = {"calibration_min", "calibration_max", "calibration_count"} & set(raw)
    if cal_keys:
        if len(cal_keys) != 3:
            raise ConfigError("a custom calibration grid needs calibration_min/max/count")
        calibration = GridSpec(
            _parse_value(raw["calibration_min"], float, "calibration_min"),
            _parse_value(raw["calibration_max"], float, "calibration_max"),
            _parse_value(raw["calibration_count"], int, "calibration_count"),
        )

    window: str | float | None = None
    if "window" in raw:
        text_value = raw["window"].strip()
        if text_value in WINDOW_NAMES:
            window = text_value
        else:
            try:
                window = float(text_value)
            except ValueError as exc:
                raise ConfigError(
                    f"window must be a detuning or one of {WINDOW_NAMES}, got {text_value!r}"
                ) from exc

    return ScanConfig(
        model_kind=kind,
        params=params,
        axis=axis,
        grid=grid,
        window=window,
        baseline=_parse_value(raw.get("baseline", "true"), bool, "baseline"),
        truncation=raw.get("truncation", "fixed").strip(),
        ladder_tol=_parse_value(raw.get("ladder_tol", "1e-6"), float, "ladder_tol"),
        ladder_observable=raw.get("ladder_observable", "n_a").strip(),
        solver_tol=_parse_value(raw.get("solver_tol", "1e-10"), float, "solver_tol"),
        workers=_parse_value(raw.get("workers", "1"), int, "workers"),
        calibration_grid=calibration,
    )


def load_config(path: str | Path) -> ScanConfig:
    return parse_config(Path(path).read_text())


def config_echo(config: ScanConfig) -> dict:
    """Flat dict sufficient to reproduce the run exactly."""
    grid = config.resolved_grid()
    echo: dict = {
        "model_kind": config.model_kind.value,
        "axis": config.axis,
        "grid_min": grid.start,
        "grid_max": grid.stop,
        "grid_count": grid.count,
        "grid_scale": grid.scale,
        "window": config.window,
        "baseline": config.baseline,
        "truncation": config.truncation,
        "ladder_tol": config.ladder_tol,
        "ladder_observable": config.ladder_observable,
        "solver_tol": config.solver_tol,
        "workers": config.workers,
        "calibration_min": config.calibration_grid.start,
        "calibration_max": config.calibration_grid.stop,
        "calibration_count": config.calibration_grid.count,
    }
    for name in _PARAM_FIELDS:
        echo[name] = getattr(config.params, name)
    return echo


# -- emission ----------------------------------------------------------


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def emit(result: ScanResult, fmt: str, out_dir: str | Path, stem: str = "scan") -> Path:
    """Write a result as csv, json or svg; returns the written path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out / f"{stem}.csv"
        lines = [CSV_HEADER]
        for r in result.rows:
            lines.append(",".join([
                _fmt(r.axis_value), _fmt(r.n_a), _fmt(r.g2), _fmt(r.d_na),
                _fmt(r.d_g2), _fmt(r.residual), str(r.n_cavity), str(r.n_mech),
            ]))
        path.write_text("\n".join(lines) + "\n")
        return path
    if fmt == "json":
        path = out / f"{stem}.json"
        payload = {
            "metadata": result.metadata,
            "rows": [
                {
                    "axis": r.axis_value, "n_a": r.n_a, "g2": r.g2, "d_na": r.d_na,
                    "d_g2": r.d_g2, "residual": r.residual,
                    "n_cavity": r.n_cavity, "n_mech": r.n_mech,
                }
                for r in result.rows
            ],
        }
        if result.baseline_rows:
            payload["baseline_rows"] = [
                {"axis": r.axis_value, "n_a": r.n_a, "g2": r.g2} for r in result.baseline_rows
            ]
        path.write_text(json.dumps(payload, indent=2))
        return path
    if fmt == "svg":
        return _emit_svg(result, out / f"{stem}.svg")
    raise ConfigError(f"unknown output format {fmt!r}; expected csv, json or svg")


def _emit_svg(result: ScanResult, path: Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    axis_label = {
        "delta": r"$\Delta$ (units of $\kappa$)",
        "g": r"$g$ (units of $\kappa$)",
        "g_m": r"$g_m$ (units of $\kappa$)",
        "n_th": r"$\bar{n}_{th}$",
    }[result.metadata["axis"]]
    x = result.axis_values()

    fig, (ax_n, ax_g2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax_n.plot(x, result.column("n_a"), color="tab:blue", label="coupled")
    g2 = [r.g2 for r in result.rows]
    if any(v is not None for v in g2):
        ax_g2.plot(x, [math.nan if v is None else v for v in g2], color="tab:blue", label="coupled")
    if result.baseline_rows:
        bx = [r.axis_value for r in result.baseline_rows]
        ax_n.plot(bx, [r.n_a for r in result.baseline_rows], "--", color="tab:red", label="baseline")
        bg2 = [math.nan if r.g2 is None else r.g2 for r in result.baseline_rows]
        ax_g2.plot(bx, bg2, "--", color="tab:red", label="baseline")
    ax_n.set_ylabel(r"$n_a$")
    ax_g2.set_ylabel(r"$g^{(2)}$")
    ax_g2.set_xlabel(axis_label)
    if result.metadata["axis"] in ("g", "g_m"):
        ax_n.set_xscale("log")
    ax_n.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
