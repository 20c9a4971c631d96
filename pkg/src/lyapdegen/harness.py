"""Degeneration experiments: ``L(f_t)`` against ``L(f_eta) log|t|`` over a grid of ``t``."""
from __future__ import annotations

import cmath
import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .escape import EPS_N, choose_depth, escape_complex, escape_inf
from .families import load_family
from .pushforward import Lift, jacobian

log = logging.getLogger(__name__)

CSV_HEADER = ["t_mag", "t_arg", "log_t", "L_t", "predicted", "residual", "k"]
EXPONENT_TARGET = 1 - float(EPS_N)
EXPONENT_SLACK = 0.15


@dataclass
class ExperimentConfig:
    family: object
    magnitudes: list[float] = field(default_factory=lambda: list(np.logspace(3, 15, 8)))
    angles: int = 3
    k_exact: int = 6
    k_complex: int = 8
    seed: int = 0
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.angles < 1:
            raise ValueError("need at least one angle per magnitude")
        if any(m < math.e for m in self.magnitudes):
            raise ValueError("magnitudes must be at least e")

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "magnitudes" not in data:
            lo = data.pop("mag_min", 1e3)
            hi = data.pop("mag_max", 1e15)
            n = data.pop("n_mags", 8)
            data["magnitudes"] = list(np.logspace(math.log10(lo), math.log10(hi), n))
        for key in ("mag_min", "mag_max", "n_mags"):
            data.pop(key, None)
        return cls(**data)

    def lift(self) -> Lift:
        return self.family if isinstance(self.family, Lift) else load_family(self.family)

    def grid(self) -> list[tuple[float, float]]:
        rng = np.random.default_rng(self.seed)
        offset = rng.uniform(0, 1)
        out = []
        for m in sorted(float(x) for x in self.magnitudes):
            for j in range(self.angles):
                out.append((m, 2 * math.pi * (j + offset) / self.angles))
        return out


@dataclass
class ReportRow:
    t_mag: float
    t_arg: float
    log_t: float
    L_t: float
    predicted: float
    residual: float
    k: int

    def csv_fields(self) -> list[str]:
        return [repr(float(self.t_mag)), repr(float(self.t_arg)), repr(float(self.log_t)),
                repr(float(self.L_t)), repr(float(self.predicted)), repr(float(self.residual)), str(self.k)]


@dataclass
class Report:
    rows: list[ReportRow]
    summary: dict


def _point(args) -> tuple:
    lift_json, mag, arg, k_complex = args
    F = Lift.from_json(lift_json, normalize=False)
    t = cmath.rect(mag, arg)
    k = max(k_complex, choose_depth(t, F.d) + 2)
    try:
        est = escape_complex(F, jacobian(F), t, k)
    except (ValueError, ZeroDivisionError) as exc:
        return mag, arg, k, None, str(exc)
    return mag, arg, k, est.value, None


def run_family(cfg: ExperimentConfig) -> Report:
    F = cfg.lift()
    eta = escape_inf(F, jacobian(F), cfg.k_exact)
    L_eta = float(eta.value)
    jobs = [(F.to_json(), m, a, cfg.k_complex) for m, a in cfg.grid()]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_point, jobs))
    else:
        results = [_point(j) for j in jobs]
    rows, warnings = [], []
    for mag, arg, k, L_t, err in sorted(results, key=lambda r: (r[0], r[1])):
        if err is not None:
            log.warning("skipping degenerate t = %s e^(i %s): %s", mag, arg, err)
            warnings.append({"t_mag": mag, "t_arg": arg, "error": err})
            continue
        log_t = math.log(mag)
        pred = L_eta * log_t
        rows.append(ReportRow(mag, arg, log_t, L_t, pred, L_t - pred, k))
    summary = fit_asymptotic(rows)
    summary.update({
        "L_eta": L_eta,
        "L_eta_exact": str(eta.value) if eta.exact else None,
        "L_eta_partials": [str(g) for g in eta.partials],
        "warnings": warnings,
    })
    slope_ok = abs(summary["fitted_slope"] - L_eta) <= max(0.01, 3 * summary["slope_stderr"])
    summary["flags"]["slope_matches_L_eta"] = bool(slope_ok)
    summary["all_pass"] = all(summary["flags"].values())
    return Report(rows, summary)


def _profile_exponent(log_t: np.ndarray, res: np.ndarray) -> float:
    """``gamma`` minimizing the residual sum of squares of ``res ~ c0 + C * log_t**gamma``."""
    best_g, best_ssr = None, math.inf
    for g in np.round(np.arange(-3.0, 3.0001, 0.001), 3):
        A = np.column_stack([np.ones_like(log_t), log_t ** g])
        coef, *_ = np.linalg.lstsq(A, res, rcond=None)
        ssr = float(np.sum((A @ coef - res) ** 2))
        if best_g is None or ssr < best_ssr - 1e-15 * max(1.0, best_ssr):
            best_g, best_ssr = float(g), ssr
    return best_g


def fit_asymptotic(rows) -> dict:
    """Slope of ``L_t`` against ``log|t|`` and the growth exponent of the residual."""
    mags = sorted({r.t_mag for r in rows})
    if len(mags) < 4:
        raise ValueError("need at least 4 distinct magnitudes")
    log_t = np.array([r.log_t for r in rows])
    L = np.array([r.L_t for r in rows])
    res = np.array([r.residual for r in rows])
    fit = stats.linregress(log_t, L)
    slope = float(fit.slope)
    stderr = float(fit.stderr) if np.isfinite(fit.stderr) else 0.0
    scale = max(1.0, float(np.max(np.abs(res))))
    spread = float(np.max(res) - np.min(res))
    exponent = None if spread < 1e-9 * scale else _profile_exponent(log_t, res)
    max_res = float(np.max(np.abs(res)))
    ratios = []
    for m in mags[-3:]:
        sub = np.abs(np.array([r.residual for r in rows if r.t_mag <= m]))
        ratios.append(float(sub.max() / math.log(m) ** EXPONENT_TARGET))
    nonincreasing = all(b <= a * (1 + 1e-12) for a, b in zip(ratios, ratios[1:]))
    by_mag = {}
    for r in rows:
        by_mag.setdefault(r.t_mag, []).append(r.L_t)
    angle_dev = max(max(abs(x - np.mean(v)) for x in v) for v in by_mag.values())
    mean_scale = float(np.mean(np.abs(res)))
    flags = {
        "residual_exponent": exponent is None or exponent <= EXPONENT_TARGET + EXPONENT_SLACK,
        "residual_ratio_nonincreasing": bool(nonincreasing),
        "angle_stable": bool(angle_dev <= 0.05 * mean_scale + 1e-9),
    }
    return {
        "fitted_slope": slope,
        "slope_stderr": stderr,
        "intercept": float(fit.intercept),
        "residual_exponent": exponent,
        "residual_exponent_defined": exponent is not None,
        "max_residual": max_res,
        "residual_ratios": ratios,
        "angle_deviation": float(angle_dev),
        "flags": flags,
    }


def emit_report(report: Report, out_dir, formats=("csv", "json")) -> list[Path]:
    """Write ``report.csv`` (fixed header) and ``summary.json`` into ``out_dir``."""
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        rows = sorted(report.rows, key=lambda r: (r.t_mag, r.t_arg))
        if "csv" in formats:
            path = out / "report.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_HEADER)
                for r in rows:
                    w.writerow(r.csv_fields())
            written.append(path)
        if "json" in formats:
            path = out / "summary.json"
            path.write_text(json.dumps(report.summary, indent=2, sort_keys=True))
            written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return written


def rows_as_dicts(rows) -> list[dict]:
    return [asdict(r) for r in rows]
