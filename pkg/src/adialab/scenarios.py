"""Scenario configuration, execution, and CSV/report emission.

A scenario is one Hamiltonian (built-in rotating model or a sampled
file), one uniform grid, and a set of requested analyses. Runs are
deterministic for a fixed config and seed, and every floating-point CSV
value is printed with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .diagnostics import fidelity_trace, nu_check, resonance_report
from .duality import (
    dual_adiabatic_propagator,
    equivalence_residual_series,
    inconsistency_distance_series,
)
from .errors import AdialabError, ConfigError
from .frames import adiabatic_propagator, build_eigenframe
from .models import (
    RotatingModelParams,
    rotating_hamiltonian,
    sampled_hamiltonian,
)
from .propagation import HamiltonianSource, TimeGrid, dual_source, propagate

ANALYSES = ("duality", "adiabatic_h", "adiabatic_dual", "inconsistency", "resonance", "nu")
METHODS = ("midpoint2", "magnus4")
MODELS = ("rotating", "sampled-file")

# Keys accepted in a config file, in canonical order.
CONFIG_KEYS = (
    "model",
    "omega0",
    "omega",
    "theta",
    "samples_path",
    "t_end",
    "dt",
    "method",
    "initial_state",
    "analyses",
    "ratio_threshold",
    "seed",
)


def fmt(x) -> str:
    """Render one CSV cell: floats at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if x is None:
        return "nan"
    return str(x)


@dataclass(frozen=True)
class ScenarioConfig:
    """One scenario: model parameters, grid, method, analyses, thresholds."""

    model: str = "rotating"
    omega0: float = 1.0
    omega: float = 0.01
    theta: float = float(np.pi / 4)
    samples_path: str | None = None
    t_end: float = float(2 * np.pi / 0.01)
    dt: float = 0.01
    method: str = "midpoint2"
    initial_state: str | list = "plus"
    analyses: tuple[str, ...] = ("adiabatic_h",)
    ratio_threshold: float = 0.1
    seed: int = 0

    def validated(self) -> "ScenarioConfig":
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.analyses:
            raise ConfigError("analyses must be a non-empty subset of " + ",".join(ANALYSES))
        bad = [a for a in self.analyses if a not in ANALYSES]
        if bad:
            raise ConfigError(f"unknown analyses {bad}; valid: {','.join(ANALYSES)}")
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0.0 and np.isfinite(self.t_end)):
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.t_end < self.dt:
            raise ConfigError("t_end must cover at least one step")
        if self.model == "rotating":
            try:
                RotatingModelParams(self.omega0, self.omega, self.theta)
            except AdialabError as exc:
                raise ConfigError(str(exc)) from exc
        else:
            if not self.samples_path:
                raise ConfigError("samples_path is required for model=sampled-file")
            if not Path(self.samples_path).exists():
                raise ConfigError(f"samples file not found: {self.samples_path}")
        if self.ratio_threshold <= 0.0:
            raise ConfigError(f"ratio_threshold must be positive, got {self.ratio_threshold}")
        if isinstance(self.initial_state, str):
            if self.initial_state not in ("plus", "minus"):
                raise ConfigError(
                    "initial_state must be 'plus', 'minus', or a vector of "
                    f"[re, im] pairs, got {self.initial_state!r}"
                )
        return self

    def grid(self) -> TimeGrid:
        steps = max(1, int(round(self.t_end / self.dt)))
        return TimeGrid(t_start=0.0, dt=self.dt, steps=steps)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["analyses"] = list(self.analyses)
        return {k: d[k] for k in CONFIG_KEYS}

    @staticmethod
    def from_dict(raw: dict) -> "ScenarioConfig":
        unknown = set(raw) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if "analyses" in kwargs and kwargs["analyses"] is not None:
            ana = kwargs["analyses"]
            if isinstance(ana, str):
                ana = [a for a in ana.split(",") if a]
            kwargs["analyses"] = tuple(ana)
        defaults = ScenarioConfig()
        merged = {k: kwargs.get(k, getattr(defaults, k)) for k in CONFIG_KEYS}
        return ScenarioConfig(**merged)


def load_config_file(path: str | Path) -> ScenarioConfig:
    """Read a JSON config file with the canonical keys."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    return ScenarioConfig.from_dict(raw)


def load_sampled_file(path: str | Path) -> HamiltonianSource:
    """Read a sampled-Hamiltonian JSON file.

    Schema: {"dim": int, "times": [...], "matrices": [...]} where each
    matrix is a row-major list of dim^2 [re, im] pairs.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read samples file {path}: {exc}") from exc
    try:
        dim = int(raw["dim"])
        times = [float(t) for t in raw["times"]]
        mats = raw["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"samples file {path} missing dim/times/matrices: {exc}") from exc
    if len(times) != len(mats):
        raise ConfigError(f"samples file {path}: {len(times)} times vs {len(mats)} matrices")
    samples = []
    for t, flat in zip(times, mats):
        if len(flat) != dim * dim:
            raise ConfigError(
                f"samples file {path}: matrix at t={t} has {len(flat)} entries, "
                f"expected {dim * dim}"
            )
        M = np.array([complex(re, im) for re, im in flat]).reshape(dim, dim)
        samples.append((t, M))
    try:
        return sampled_hamiltonian(samples)
    except AdialabError as exc:
        raise ConfigError(f"samples file {path}: {exc}") from exc


def write_sampled_file(path: str | Path, times, matrices) -> None:
    """Write the sampled-Hamiltonian JSON schema."""
    mats = []
    for M in matrices:
        M = np.asarray(M, dtype=complex)
        mats.append([[float(z.real), float(z.imag)] for z in M.ravel()])
    payload = {
        "dim": int(np.asarray(matrices[0]).shape[0]),
        "times": [float(t) for t in times],
        "matrices": mats,
    }
    Path(path).write_text(json.dumps(payload))


def build_source(config: ScenarioConfig) -> HamiltonianSource:
    if config.model == "rotating":
        return rotating_hamiltonian(
            RotatingModelParams(config.omega0, config.omega, config.theta)
        )
    return load_sampled_file(config.samples_path)


def initial_state(config: ScenarioConfig, frame, dual: bool) -> np.ndarray:
    """Initial state vector in the computational basis.

    'plus'/'minus' select the lowest/highest instantaneous eigenstate at
    t = 0 of the evolution being analyzed (for the dual evolution the
    spectrum is negated, so its ground state is the forward top level).
    A custom vector is used as given, after normalization.
    """
    if isinstance(config.initial_state, str):
        lo, hi = 0, frame.levels - 1
        if config.initial_state == "plus":
            level = hi if dual else lo
        else:
            level = lo if dual else hi
        return frame.vectors[0][:, level]
    flat = np.asarray(
        [complex(re, im) for re, im in config.initial_state], dtype=complex
    )
    norm = np.linalg.norm(flat)
    if norm == 0.0:
        raise ConfigError("custom initial_state must be nonzero")
    return flat / norm


@dataclass
class ScenarioReport:
    """Everything one run measured, JSON-serializable."""

    config: dict
    grid: dict
    results: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"config": self.config, "grid": self.grid, "results": self.results, "files": self.files},
            indent=2,
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "ScenarioReport":
        raw = json.loads(text)
        return ScenarioReport(
            config=raw["config"],
            grid=raw["grid"],
            results=raw["results"],
            files=raw.get("files", {}),
        )

    def summary_lines(self) -> list[str]:
        r = self.results
        lines = [f"unitarity_max,{fmt(r['unitarity_max'])}"]
        if "duality_max" in r:
            lines.append(f"duality_max,{fmt(r['duality_max'])}")
        if "min_fid_h" in r:
            lines.append(f"min_fid_h,{fmt(r['min_fid_h'])}")
        if "min_fid_dual" in r:
            lines.append(f"min_fid_dual,{fmt(r['min_fid_dual'])}")
        if "inconsistency_distance_final" in r:
            lines.append(
                "inconsistency_distance,"
                f"{fmt(r['inconsistency_distance_final'])},{fmt(r['inconsistency_distance_max'])}"
            )
            lines.append(f"equivalence_max,{fmt(r['equivalence_max'])}")
        for mode in ("h", "dual"):
            key = f"resonance_{mode}"
            if key in r:
                lines.append(f"{key},{r[key]['verdict']},{fmt(r[key]['verdict_ratio'])}")
        if "nu" in r:
            nu = r["nu"]
            lines.append("nu_measured,nu_predicted,pass")
            lines.append(
                f"{fmt(nu['measured'])},{fmt(nu['predicted'])},{fmt(bool(nu['passed']))}"
                if nu["passed"] is not None
                else f"{fmt(nu['measured'])},{fmt(nu['predicted'])},nan"
            )
        return lines


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def _write_trace_csv(path: Path, trace) -> None:
    dim = trace.dim
    header = ["t"]
    for i in range(dim):
        for j in range(dim):
            header += [f"re_U_{i}{j}", f"im_U_{i}{j}"]
    ts = trace.grid.times()
    flat = trace.U.reshape(len(ts), dim * dim)
    rows = []
    for k, t in enumerate(ts):
        row = [t]
        for z in flat[k]:
            row += [z.real, z.imag]
        rows.append(row)
    _write_csv(path, header, rows)


def _resonance_dict(report) -> dict:
    return {
        "mode": report.mode,
        "threshold": report.threshold,
        "coupling_magnitude": report.coupling_magnitude,
        "gap": report.gap,
        "dominant_frequency": report.dominant_frequency,
        "detuning": report.detuning,
        "verdict_ratio": report.verdict_ratio,
        "verdict": report.verdict,
        "multi_tone": report.multi_tone,
        "pairs": [
            {
                "n": p.n,
                "m": p.m,
                "coupling_magnitude": p.coupling_magnitude,
                "rabi_frequency": p.rabi_frequency,
                "gap": p.gap,
                "dominant_frequency": p.dominant_frequency,
                "detuning": p.detuning,
                "ratio": p.ratio,
                "verdict": p.verdict,
                "multi_tone": p.multi_tone,
            }
            for p in report.pairs
        ],
    }


def run_scenario(config: ScenarioConfig, out_dir: str | Path | None = None) -> ScenarioReport:
    """Execute one scenario; write CSVs/report when out_dir is given."""
    config = config.validated()
    grid = config.grid()
    src = build_source(config)
    analyses = set(config.analyses)

    trace = propagate(src, grid, config.method)
    report = ScenarioReport(
        config=config.as_dict(),
        grid={"t_start": grid.t_start, "dt": grid.dt, "steps": grid.steps},
    )
    res = report.results
    res["unitarity_max"] = trace.max_unitarity_residual

    needs_frame = analyses & {"adiabatic_h", "adiabatic_dual", "inconsistency", "resonance"}
    frame = build_eigenframe(src, grid) if needs_frame else None
    if frame is not None:
        trace = trace.with_phase_integrals(frame.phase_integrals)

    dual_trace = None
    if analyses & {"duality", "adiabatic_dual"}:
        dual_trace = propagate(dual_source(src, trace), grid, config.method)

    duality_series = None
    if "duality" in analyses:
        diff = dual_trace.U - np.conj(np.swapaxes(trace.U, 1, 2))
        duality_series = np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2)))
        res["duality_max"] = float(duality_series.max())

    if "adiabatic_h" in analyses or "adiabatic_dual" in analyses:
        if "adiabatic_h" in analyses:
            psi0 = initial_state(config, frame, dual=False)
            _, fid_h = fidelity_trace(trace, lambda k: adiabatic_propagator(frame, k), psi0)
            res["min_fid_h"] = float(fid_h.min())
        else:
            fid_h = np.full(grid.steps + 1, np.nan)
        if "adiabatic_dual" in analyses:
            psi0d = initial_state(config, frame, dual=True)
            _, fid_d = fidelity_trace(
                dual_trace, lambda k: dual_adiabatic_propagator(trace, frame, k), psi0d
            )
            res["min_fid_dual"] = float(fid_d.min())
        else:
            fid_d = np.full(grid.steps + 1, np.nan)

    equivalence_series = None
    if "inconsistency" in analyses:
        dist = inconsistency_distance_series(frame)
        res["inconsistency_distance_final"] = float(dist[-1])
        res["inconsistency_distance_max"] = float(dist.max())
        equivalence_series = equivalence_residual_series(trace, frame)
        res["equivalence_max"] = float(equivalence_series.max())

    if "resonance" in analyses:
        res["resonance_h"] = _resonance_dict(
            resonance_report(frame, "forward", config.ratio_threshold)
        )
        res["resonance_dual"] = _resonance_dict(
            resonance_report(frame, "dual", config.ratio_threshold)
        )

    if "nu" in analyses:
        nu = nu_check(src, trace)
        res["nu"] = {
            "measured": nu.measured,
            "predicted": nu.predicted,
            "bin_width": nu.bin_width,
            "passed": nu.passed,
            "dc_only": nu.dc_only,
        }

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_trace_csv(out / "trace.csv", trace)
        report.files["trace"] = "trace.csv"
        if dual_trace is not None:
            _write_trace_csv(out / "dual_trace.csv", dual_trace)
            report.files["dual_trace"] = "dual_trace.csv"
        if analyses & {"adiabatic_h", "adiabatic_dual"}:
            ts = grid.times()
            _write_csv(
                out / "fidelity.csv",
                ["t", "fidelity_h", "fidelity_dual"],
                zip(ts, fid_h, fid_d),
            )
            report.files["fidelity"] = "fidelity.csv"
        if analyses & {"duality", "inconsistency"}:
            ts = grid.times()
            unit = np.sqrt(
                np.sum(
                    np.abs(
                        np.einsum("kji,kjl->kil", trace.U.conj(), trace.U)
                        - np.eye(trace.dim)
                    )
                    ** 2,
                    axis=(1, 2),
                )
            )
            dual_col = duality_series if duality_series is not None else np.full(len(ts), np.nan)
            eq_col = (
                equivalence_series if equivalence_series is not None else np.full(len(ts), np.nan)
            )
            _write_csv(
                out / "residuals.csv",
                ["t", "unitarity", "duality", "equivalence"],
                zip(ts, unit, dual_col, eq_col),
            )
            report.files["residuals"] = "residuals.csv"
        (out / "report.json").write_text(report.to_json())
        report.files["report"] = "report.json"
    return report


SWEEP_AXES = ("theta", "omega")
SWEEP_HEADER = [
    "axis_value",
    "min_fid_h",
    "min_fid_dual",
    "verdict_h",
    "verdict_dual",
    "nu_measured",
    "nu_predicted",
]


def sweep_scenario(
    config: ScenarioConfig, axis: str, values, out_dir: str | Path | None = None
) -> list[dict]:
    """Run the summary analyses across one parameter axis.

    Every row carries the fixed summary columns regardless of
    config.analyses; rows follow the input order.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    if config.model != "rotating":
        raise ConfigError("sweep requires the rotating model")
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for value in values:
        point = replace(
            config,
            analyses=("adiabatic_h", "adiabatic_dual", "resonance", "nu"),
            **{axis: float(value)},
        )
        rep = run_scenario(point, out_dir=None).results
        rows.append(
            {
                "axis_value": float(value),
                "min_fid_h": rep["min_fid_h"],
                "min_fid_dual": rep["min_fid_dual"],
                "verdict_h": rep["resonance_h"]["verdict"],
                "verdict_dual": rep["resonance_dual"]["verdict"],
                "nu_measured": rep["nu"]["measured"],
                "nu_predicted": rep["nu"]["predicted"],
            }
        )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(
            out / "sweep.csv",
            SWEEP_HEADER,
            ([row[k] for k in SWEEP_HEADER] for row in rows),
        )
    return rows
