"""Config-driven sweeps over (model, degree) pairs and report comparison."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .asymptotics import MIN_WINDOW_DEGREE, gap_over_loglog, predicted_total
from .covariance import CovarianceModel, model_from_dict
from .errors import ConfigError, ParseError
from .kac_rice import expected_zeros_total, partition_counts
from .simulation import simulate

COMPARISON_FIELDS = (
    "model_id", "n", "kr_value", "kr_quad_error", "mc_mean", "mc_stderr", "predicted",
    "ratio_kr_over_pred", "abs_gap_over_loglogn", "error",
)
PARTITION_FIELDS = ("model_id", "n", "interval_lo", "interval_hi", "value", "quad_error")
MISMATCH_SIGMAS = 4.0
# Floor for the slack: covers the endpoint truncation of the integral when se == 0.
MISMATCH_FLOOR = 1e-9


@dataclass
class ExperimentConfig:
    models: list[dict[str, Any]]
    degrees: list[int]
    trials: int = 0
    master_seed: int = 0
    outputs: dict[str, str] = field(default_factory=lambda: {"csv_path": "results.csv",
                                                             "json_path": "manifest.json"})
    quad_tol: float = 1e-6
    comparisons: dict[str, bool] = field(default_factory=lambda: {
        "kac_rice": True, "monte_carlo": False, "prediction": True, "partition": False})
    workers: int | None = None

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "models" not in raw or "degrees" not in raw:
            raise ConfigError("config needs 'models' and 'degrees'")
        cfg = cls(**raw)
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(raw)

    def check(self) -> None:
        if not isinstance(self.models, list) or not self.models:
            raise ConfigError("'models' must be a non-empty list")
        if not isinstance(self.degrees, list) or not self.degrees:
            raise ConfigError("'degrees' must be a non-empty list")
        if any(not isinstance(n, int) or isinstance(n, bool) or n < 1 for n in self.degrees):
            raise ConfigError("every degree must be an integer >= 1")
        if not isinstance(self.trials, int) or self.trials < 0:
            raise ConfigError("'trials' must be a non-negative integer")
        if not (isinstance(self.quad_tol, (int, float)) and self.quad_tol > 0):
            raise ConfigError("'quad_tol' must be positive")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ConfigError("'master_seed' must fit in 64 bits")
        for key in ("csv_path", "json_path"):
            if key not in self.outputs:
                raise ConfigError(f"outputs.{key} missing")
        for m in self.models:
            try:
                model_from_dict(m)
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"bad model {m!r}: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class ComparisonRow:
    model_id: str
    n: int
    kr_value: float | None = None
    kr_quad_error: float | None = None
    mc_mean: float | None = None
    mc_stderr: float | None = None
    predicted: float | None = None
    ratio_kr_over_pred: float | None = None
    abs_gap_over_loglogn: float | None = None
    error: str = ""

    def as_csv(self) -> list[str]:
        return ["" if v is None else (repr(v) if isinstance(v, float) else str(v))
                for v in (getattr(self, k) for k in COMPARISON_FIELDS)]


def _model_class(model: CovarianceModel) -> str:
    return "nonvanishing_density" if model.has_density else "constant_covariance"


def row_seed(master_seed: int, model_index: int, n: int) -> int:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(model_index), int(n)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_row(cfg: ExperimentConfig, index: int, model: CovarianceModel, n: int, partitions: list):
    row = ComparisonRow(model.label, n)
    comps = cfg.comparisons
    seed = row_seed(cfg.master_seed, index, n)
    try:
        if comps.get("kac_rice", True):
            est = expected_zeros_total(model, n, tol=cfg.quad_tol)
            row.kr_value, row.kr_quad_error = est.value, est.quad_error
            if not est.converged:
                row.error = "QuadratureFailure: tolerance unmet"
        if comps.get("monte_carlo", False) and cfg.trials > 0:
            summary = simulate(model, n, cfg.trials, seed, workers=cfg.workers)
            row.mc_mean, row.mc_stderr = summary.mean_zeros, summary.std_error
        if comps.get("prediction", True) and n >= 2:
            pred = predicted_total(n, _model_class(model)).value
            row.predicted = pred
            if row.kr_value is not None and pred > 0:
                row.ratio_kr_over_pred = row.kr_value / pred
                if n >= 3:
                    row.abs_gap_over_loglogn = gap_over_loglog(row.kr_value, pred, n)
        if comps.get("partition", False) and n >= MIN_WINDOW_DEGREE:
            rep = partition_counts(model, n, tol=cfg.quad_tol)
            for est in rep.estimates:
                partitions.append([model.label, n, *est.interval, est.value, est.quad_error])
    except Exception as exc:  # recorded on the row; the sweep continues
        row.error = f"{type(exc).__name__}: {exc}"
    return row, seed


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in r])
    return buf.getvalue()


def run(config: ExperimentConfig | dict[str, Any]) -> dict[str, Path]:
    """Execute a sweep and write the comparison CSV and JSON manifest.

    Returns the paths written (``csv``, ``json`` and, when requested,
    ``partition``).
    """
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    cfg.check()
    models = [model_from_dict(m) for m in cfg.models]
    jobs = sorted(((m.label, n, i, m) for i, m in enumerate(models) for n in cfg.degrees),
                  key=lambda j: (j[0], j[1], j[2]))
    rows: list[ComparisonRow] = []
    partitions: list[list] = []
    seeds: dict[str, int] = {}
    for label, n, i, model in jobs:
        row, seed = _run_row(cfg, i, model, n, partitions)
        rows.append(row)
        seeds[f"{label}|{n}"] = seed

    csv_path = Path(cfg.outputs["csv_path"])
    json_path = Path(cfg.outputs["json_path"])
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(_csv_text(COMPARISON_FIELDS, (r.as_csv() for r in rows)))
    written = {"csv": csv_path, "json": json_path}
    if partitions:
        part_path = csv_path.with_name(csv_path.stem + "_partition.csv")
        part_path.write_text(_csv_text(PARTITION_FIELDS, partitions))
        written["partition"] = part_path
    manifest = {
        "tool": "realzeros",
        "tool_version": __version__,
        "config_hash": cfg.digest(),
        "config": cfg.to_dict(),
        "master_seed": int(cfg.master_seed),
        "row_seeds": seeds,
        "files": {k: str(v) for k, v in written.items() if k != "json"},
        "errors": {f"{r.model_id}|{r.n}": r.error for r in rows if r.error},
    }
    json_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return written


# ---------------------------------------------------------------- compare


def _num(value: str) -> float | None:
    return float(value) if value not in ("", None) else None


def read_rows(path: str | Path) -> list[dict[str, Any]]:
    """Parse a comparison CSV written by :func:`run`."""
    p = Path(path)
    text = p.read_text()
    if not text.strip():
        raise ParseError(f"{p}: empty file")
    reader = csv.DictReader(io.StringIO(text))
    missing = {"model_id", "n", "kr_value", "mc_mean", "mc_stderr"} - set(reader.fieldnames or [])
    if missing:
        raise ParseError(f"{p}: missing columns {sorted(missing)}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            parsed: dict[str, Any] = {"model_id": rec["model_id"], "n": int(rec["n"])}
            for key in COMPARISON_FIELDS[2:-1]:
                parsed[key] = _num(rec.get(key, ""))
            parsed["error"] = rec.get("error", "") or ""
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{p}:{lineno}: {exc}") from exc
        rows.append(parsed)
    if not rows:
        raise ParseError(f"{p}: no data rows")
    return rows


def is_mismatch(row: dict[str, Any]) -> bool:
    """Monte Carlo mean more than 4 standard errors (plus quadrature error) from Kac-Rice."""
    kr, mc, se = row.get("kr_value"), row.get("mc_mean"), row.get("mc_stderr")
    if kr is None or mc is None or se is None:
        return False
    slack = MISMATCH_SIGMAS * se + (row.get("kr_quad_error") or 0.0) + MISMATCH_FLOOR * max(1.0, abs(kr))
    return abs(mc - kr) > slack


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.6g}"
    return str(v)


def compare(paths, out=None) -> int:
    """Print an aligned table of all rows; return 2 if any row mismatches, else 0."""
    import sys

    out = out or sys.stdout
    cols = ["file", "model_id", "n", "kr_value", "mc_mean", "mc_stderr", "predicted", "ratio_kr_over_pred", "flag"]
    table = []
    bad = False
    for path in paths:
        for row in read_rows(path):
            mism = is_mismatch(row)
            bad |= mism
            table.append([Path(path).name, row["model_id"], row["n"], row["kr_value"], row["mc_mean"],
                          row["mc_stderr"], row["predicted"], row["ratio_kr_over_pred"],
                          "MISMATCH" if mism else ("ERROR" if row["error"] else "ok")])
    cells = [cols] + [[_fmt(v) for v in r] for r in table]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
    for r in cells:
        out.write("  ".join(c.rjust(w) if i >= 2 else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip())
        out.write("\n")
    return 2 if bad else 0
