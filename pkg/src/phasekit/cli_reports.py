"""
Command line driver: read a JSON run configuration, sweep the large
parameter, compare each expansion with the quadrature oracle and write a
CSV, JSON or gnuplot report.

Exit codes: 0 when every row respects its bound, 2 when a bound is violated
(or a row fails, or a verified fixture differs), 1 on configuration errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from .core_model import (AmplitudeSpec, GeneralPhase, OscillatoryProblem, Polynomial,
                         QuadraticPhase, validate_problem)
from .numerics import QuadratureSettings
from .oracle import ORACLE_SETTINGS, oscillatory_integral

MODES = ("expand", "cutpoint", "quadratic", "curve", "schrodinger", "energy", "verify")
LINES = ("critical", "cone", "outside", "curve", "region")
FORMATS = ("csv", "json", "plotscript")
CSV_COLUMNS = ("param", "oracle_re", "oracle_im", "oracle_abs", "approx_re", "approx_im",
               "abs_err", "bound", "bound_ok", "exponent")
PER_DECADE = 12
MAX_POINTS = 60
BOUND_SLACK = 1e-6
FIXTURE_ENV = "PHASEKIT_SEED_FIXTURES"


class ConfigError(ValueError):
    """Configuration problems, each as (JSON pointer, message)."""

    def __init__(self, errors: Sequence[Tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p or '/'}: {m}" for p, m in self.errors))


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_COEFFS = {"type": "array", "items": _NUM, "minItems": 1}

SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "mode": {"enum": list(MODES)},
        "interval": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "amplitude": {
            "type": "object",
            "properties": {
                "mu1": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "mu2": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "regular": _COEFFS,
            },
            "required": ["mu1", "regular"],
            "additionalProperties": False,
        },
        "phase": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["quadratic", "general"]},
                "p0": _NUM, "c": _NUM,
                "rho1": {"type": "number", "minimum": 1},
                "rho2": {"type": "number", "minimum": 1},
                "nondegenerate": _COEFFS,
                "psi_p1": _NUM,
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "data": {
            "type": "object",
            "properties": {
                "mu": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "p1": _NUM, "p2": _NUM, "regular": _COEFFS,
            },
            "required": ["mu", "p1", "p2", "regular"],
            "additionalProperties": False,
        },
        "line": {
            "type": "object",
            "properties": {
                "kind": {"enum": list(LINES)},
                "velocity": _NUM,
                "zeta": _POS,
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {
                "values": {"type": "array", "items": _POS, "minItems": 1},
                "start": _POS, "stop": _POS,
                "per_decade": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "epsilon": _NUM,
        "delta": _NUM,
        "order": {"type": "integer", "minimum": 1, "maximum": 3},
        "cut": _NUM,
        "eta": _POS,
        "tolerance": _POS,
        "fixture": {"type": "string"},
        "run": {"type": "object"},
        "output": {
            "type": "object",
            "properties": {"path": {"type": "string"}, "format": {"enum": list(FORMATS)}},
            "additionalProperties": False,
        },
    },
    "required": ["mode"],
    "additionalProperties": False,
}

_STRING_KEYS = {"mode", "kind", "fixture", "path", "format"}
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _coerce_numbers(obj, key: Optional[str] = None):
    """Decimal strings become floats, except under keys that hold text."""
    if isinstance(obj, dict):
        return {k: (v if k in _STRING_KEYS or k == "run" else _coerce_numbers(v, k))
                for k, v in obj.items()}
    if isinstance(obj, list):
        return [_coerce_numbers(v, key) for v in obj]
    if isinstance(obj, str) and _FLOAT_RE.match(obj.strip()):
        return float(obj)
    return obj


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    mode: str
    raw: Dict[str, Any]
    sweep: List[float]
    tolerance: Optional[float] = None
    output_path: Optional[str] = None
    output_format: str = "csv"
    source: Optional[str] = None

    @property
    def settings(self) -> QuadratureSettings:
        if self.tolerance is None:
            return ORACLE_SETTINGS
        return QuadratureSettings(self.tolerance, ORACLE_SETTINGS.abs_tol,
                                  ORACLE_SETTINGS.max_subdivisions)


def sweep_values(spec: Dict[str, Any]) -> List[float]:
    """Explicit values, or log-spaced points (12 per decade, at most 60)."""
    if "values" in spec:
        return [float(v) for v in spec["values"]]
    start, stop = float(spec["start"]), float(spec["stop"])
    per = int(spec.get("per_decade", PER_DECADE))
    count = min(MAX_POINTS, max(2, int(round(per * math.log10(stop / start))) + 1))
    return [float(v) for v in np.logspace(math.log10(start), math.log10(stop), count)]


def build_problem(cfg: Dict[str, Any]) -> OscillatoryProblem:
    p1, p2 = (float(v) for v in cfg["interval"])
    amp = cfg["amplitude"]
    amplitude = AmplitudeSpec(float(amp["mu1"]), float(amp.get("mu2", 1.0)),
                              Polynomial(amp["regular"]))
    ph = cfg["phase"]
    if ph["kind"] == "quadratic":
        phase = QuadraticPhase(float(ph.get("p0", 0.5 * (p1 + p2))), float(ph.get("c", 0.0)))
    else:
        phase = GeneralPhase(float(ph["rho1"]), float(ph["rho2"]), Polynomial(ph["nondegenerate"]),
                             float(ph.get("psi_p1", 0.0)))
    return OscillatoryProblem(p1, p2, amplitude, phase)


def build_data(cfg: Dict[str, Any]):
    from .schrodinger import InitialData
    d = cfg["data"]
    return InitialData.from_polynomial(float(d["mu"]), float(d["p1"]), float(d["p2"]), d["regular"])


def _require(cfg, keys, errors):
    for k in keys:
        if k not in cfg:
            errors.append(("", f"'{k}' is required in {cfg['mode']} mode"))


def validate_config(cfg: Dict[str, Any]) -> List[Tuple[str, str]]:
    errors: List[Tuple[str, str]] = []
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for err in sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path)):
        errors.append((_pointer(err.absolute_path), err.message))
    if errors:
        return errors
    mode = cfg["mode"]
    if mode == "verify":
        _require(cfg, ("fixture",), errors)
        if "run" not in cfg:
            errors.append(("", "'run' is required in verify mode"))
        return errors
    _require(cfg, ("sweep",), errors)
    if "sweep" in cfg:
        sw = cfg["sweep"]
        if "values" not in sw and not ("start" in sw and "stop" in sw):
            errors.append(("/sweep", "give either 'values' or 'start' and 'stop'"))
        else:
            vals = sweep_values(sw)
            if any(b <= a for a, b in zip(vals, vals[1:])):
                errors.append(("/sweep", "sweep values must be strictly ascending"))
    if mode in ("expand", "cutpoint", "quadratic", "curve"):
        _require(cfg, ("interval", "amplitude", "phase"), errors)
        if errors:
            return errors
        p1, p2 = cfg["interval"]
        if not p1 < p2:
            errors.append(("/interval", "interval endpoints must satisfy p1 < p2"))
            return errors
        if mode in ("quadratic", "curve") and cfg["phase"]["kind"] != "quadratic":
            errors.append(("/phase/kind", f"{mode} mode needs a quadratic phase"))
        if cfg["phase"]["kind"] == "general":
            for k in ("rho1", "rho2", "nondegenerate"):
                if k not in cfg["phase"]:
                    errors.append(("/phase", f"'{k}' is required for a general phase"))
        if errors:
            return errors
        problem = build_problem(cfg)
        if mode == "quadratic":
            if not p1 < problem.phase.p0 < p2:
                errors.append(("/phase/p0", "stationary point must lie strictly inside the interval"))
        if mode == "curve":
            eps = cfg.get("epsilon")
            if eps is None or not 0.0 < eps < 0.5:
                errors.append(("/epsilon", "epsilon must lie in (0, 1/2)"))
            elif "sweep" in cfg:
                threshold = (p2 - p1) ** (-1.0 / eps)
                if min(sweep_values(cfg["sweep"])) <= threshold:
                    errors.append(("/sweep", f"omega must exceed (p2-p1)^(-1/epsilon) = {threshold:.6g}"))
        if mode in ("quadratic", "curve"):
            if "delta" in cfg and not 0.5 < cfg["delta"] < 1.0:
                errors.append(("/delta", "delta must lie in (1/2, 1)"))
            check = OscillatoryProblem(p1, p2, problem.amplitude, QuadraticPhase(0.5 * (p1 + p2), 0.0))
            for v in validate_problem(check).violations:
                errors.append(("/amplitude", v))
        else:
            from .core_model import as_general
            try:
                general = as_general(problem)
            except ValueError as exc:
                errors.append(("/phase", str(exc)))
            else:
                for v in validate_problem(general).violations:
                    errors.append(("", v))
    elif mode in ("schrodinger", "energy"):
        _require(cfg, ("data",), errors)
        if mode == "schrodinger":
            _require(cfg, ("line",), errors)
        if errors:
            return errors
        d = cfg["data"]
        if not d["p1"] < d["p2"]:
            errors.append(("/data", "band must satisfy p1 < p2"))
            return errors
        try:
            build_data(cfg)
        except ValueError as exc:
            errors.append(("/data", str(exc)))
        width = d["p2"] - d["p1"]
        eps = cfg.get("epsilon")
        if mode == "energy":
            if d["mu"] <= 0.5:
                errors.append(("/data/mu", "the energy statement needs mu > 1/2"))
            if eps is None or not 0.0 < eps < width:
                errors.append(("/epsilon", "epsilon must lie in (0, p2 - p1)"))
        else:
            kind = cfg["line"]["kind"]
            if kind in ("curve", "region") and (eps is None or not 0.0 < eps < 0.5):
                errors.append(("/epsilon", "epsilon must lie in (0, 1/2)"))
            if kind in ("cone", "outside") and (eps is None or not eps > 0):
                errors.append(("/epsilon", "epsilon must be positive"))
            if kind in ("cone", "outside", "region") and "velocity" not in cfg["line"]:
                errors.append(("/line", f"'velocity' (x/2t) is required on a {kind} line"))
    return errors


def parse_config(cfg: Dict[str, Any], source: Optional[str] = None) -> RunConfig:
    cfg = _coerce_numbers(copy.deepcopy(cfg))
    errors = validate_config(cfg)
    if errors:
        raise ConfigError(errors)
    out = cfg.get("output", {})
    sweep = sweep_values(cfg["sweep"]) if "sweep" in cfg else []
    return RunConfig(cfg["mode"], cfg, sweep, cfg.get("tolerance"), out.get("path"),
                     out.get("format", "csv"), source)


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([("", f"config file not found: {path}")])
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"invalid JSON: {exc}")]) from exc
    if not isinstance(cfg, dict):
        raise ConfigError([("", "config must be a JSON object")])
    return parse_config(cfg, str(path))


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    param: float
    oracle: complex
    approx: complex
    abs_err: float
    bound_value: float
    bound_ok: bool
    leading_exponent: float
    error: Optional[str] = None

    @classmethod
    def make(cls, param, oracle, approx, bound, exponent) -> "SweepRow":
        oracle, approx = complex(oracle), complex(approx)
        err = abs(oracle - approx)
        return cls(float(param), oracle, approx, err, float(bound),
                   bool(err <= bound * (1.0 + BOUND_SLACK)), float(exponent))

    @classmethod
    def failed(cls, param, message: str) -> "SweepRow":
        nan = float("nan")
        return cls(float(param), complex(nan, nan), complex(nan, nan), nan, nan, False, nan, message)


@dataclass
class SweepSummary:
    mode: str
    rows: int
    violations: int
    errors: int
    slope: Optional[float] = None
    intercept: Optional[float] = None
    residual: Optional[float] = None


def _row(cfg: Dict[str, Any], param: float, settings: QuadratureSettings) -> SweepRow:
    mode = cfg["mode"]
    if mode in ("expand", "cutpoint", "quadratic", "curve"):
        problem = build_problem(cfg)
        if mode == "expand":
            from .erdelyi_expansion import expand
            ex = expand(problem, int(cfg.get("order", 1)), cfg.get("eta"), param)
            oracle = oscillatory_integral(problem, param, settings).value
            return SweepRow.make(param, oracle, ex.approximation(), ex.bound_value(), ex.leading_exponent)
        if mode == "cutpoint":
            from .cutpoint_expansion import expand_cutpoint
            ex = expand_cutpoint(problem, cfg.get("cut"), param)
            oracle = oscillatory_integral(problem, param, settings).value
            return SweepRow.make(param, oracle, ex.approximation(), ex.bound_value(), ex.leading_exponent)
        if mode == "quadratic":
            from .quadratic_phase import expand_full
            ex = expand_full(problem, param, cfg.get("delta"))
            oracle = oscillatory_integral(problem, param, settings).value
            return SweepRow.make(param, oracle, ex.approximation(), ex.bound_value(),
                                 ex.leading[0].omega_exponent)
        from .quadratic_phase import curve_problem, curve_regime
        eps = float(cfg["epsilon"])
        cr = curve_regime(problem, eps, param, cfg.get("delta"))
        oracle = oscillatory_integral(curve_problem(problem, eps, param), param, settings).value
        return SweepRow.make(param, oracle, cr.leading_value(), cr.bound_value(), cr.leading_exponent)

    from . import schrodinger as sch
    data = build_data(cfg)
    t = param
    if mode == "energy":
        ew = sch.energy_window(data, float(cfg["epsilon"]), t, cfg.get("delta"))
        return SweepRow.make(t, ew.windowed, ew.limit, ew.bound, 0.0)
    line = cfg["line"]
    kind = line["kind"]
    eps = cfg.get("epsilon")
    if kind == "critical":
        rep = sch.critical_line_expansion(data, t, float(line.get("zeta", sch.DEFAULT_ZETA)))
    elif kind == "cone":
        rep = sch.cone_expansion(data, float(eps), t, 2.0 * float(line["velocity"]) * t, cfg.get("delta"))
    elif kind == "outside":
        rep = sch.outside_cone_expansion(data, float(eps), t, 2.0 * float(line["velocity"]) * t)
    elif kind == "curve":
        rep = sch.boundary_curve_expansion(data, float(eps), t)
    else:
        x = 2.0 * float(line["velocity"]) * t
        rb = sch.region_uniform_bound(data, float(eps), t, x)
        return SweepRow.make(t, sch.u_oracle(data, t, x, settings), 0.0, rb.value, rb.leading_exponent)
    oracle = sch.u_oracle(data, t, rep.x, settings)
    return SweepRow.make(t, oracle, rep.approximation(), rep.bound(), rep.leading_exponent)


def _safe_row(args) -> SweepRow:
    cfg, param, settings = args
    try:
        return _row(cfg, param, settings)
    except (ArithmeticError, ValueError) as exc:
        return SweepRow.failed(param, f"{type(exc).__name__}: {exc}")


def run_sweep(config: RunConfig, jobs: int = 1) -> Tuple[List[SweepRow], SweepSummary]:
    """Evaluate every sweep point; rows come back in sweep order."""
    if config.mode == "verify":
        raise ValueError("verify mode has no sweep of its own; use verify_fixture")
    work = [(config.raw, p, config.settings) for p in config.sweep]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_safe_row, work))
    else:
        rows = [_safe_row(w) for w in work]
    summary = SweepSummary(config.mode, len(rows),
                           sum(1 for r in rows if r.error is None and not r.bound_ok),
                           sum(1 for r in rows if r.error is not None))
    good = [r for r in rows if r.error is None and r.oracle.real ** 2 + r.oracle.imag ** 2 > 0]
    if len(good) >= 3:
        fit = fit_decay(good, "oracle_abs")
        summary.slope, summary.intercept, summary.residual = fit
    return rows, summary


# ---------------------------------------------------------------------------
# Fits and reports
# ---------------------------------------------------------------------------

def _column(row: SweepRow, column: str) -> float:
    getters = {
        "oracle_abs": lambda r: abs(r.oracle),
        "approx_abs": lambda r: abs(r.approx),
        "abs_err": lambda r: r.abs_err,
        "bound": lambda r: r.bound_value,
    }
    if column not in getters:
        raise ValueError(f"unknown column {column!r}")
    return getters[column](row)


def fit_decay(rows: Sequence, column: str = "oracle_abs") -> Tuple[float, float, float]:
    """Least-squares line through (log param, log value): (slope, intercept, max residual).

    ``rows`` may be :class:`SweepRow` objects or (param, value) pairs.
    """
    if len(rows) < 3:
        raise ValueError("need at least 3 rows to fit")
    pairs = [(r.param, _column(r, column)) if isinstance(r, SweepRow) else (float(r[0]), float(r[1]))
             for r in rows]
    x = np.array([p for p, _ in pairs])
    y = np.array([v for _, v in pairs])
    if np.any(x <= 0) or np.any(~(y > 0)):
        raise ValueError("fit needs positive parameters and values")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return float(slope), float(intercept), resid


def _fmt(v: float) -> str:
    return format(v, ".17g")


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.param), _fmt(r.oracle.real), _fmt(r.oracle.imag), _fmt(abs(r.oracle)),
                    _fmt(r.approx.real), _fmt(r.approx.imag), _fmt(r.abs_err), _fmt(r.bound_value),
                    "true" if r.bound_ok else "false", _fmt(r.leading_exponent)])
    return buf.getvalue()


def rows_from_csv(text: str) -> List[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError("unexpected CSV header")
    out = []
    for rec in reader:
        out.append(SweepRow(float(rec["param"]), complex(float(rec["oracle_re"]), float(rec["oracle_im"])),
                            complex(float(rec["approx_re"]), float(rec["approx_im"])),
                            float(rec["abs_err"]), float(rec["bound"]), rec["bound_ok"] == "true",
                            float(rec["exponent"])))
    return out


def _row_json(r: SweepRow) -> Dict[str, Any]:
    d = {"param": r.param, "oracle_re": r.oracle.real, "oracle_im": r.oracle.imag,
         "oracle_abs": abs(r.oracle), "approx_re": r.approx.real, "approx_im": r.approx.imag,
         "abs_err": r.abs_err, "bound": r.bound_value, "bound_ok": r.bound_ok,
         "exponent": r.leading_exponent}
    if r.error is not None:
        d["error"] = r.error
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}


def rows_to_json(rows: Sequence[SweepRow], summary: Optional[SweepSummary]) -> str:
    body = {"summary": asdict(summary) if summary is not None else None,
            "rows": [_row_json(r) for r in rows]}
    return json.dumps(body, indent=2) + "\n"


def plot_script(csv_path: str, title: str = "decay") -> str:
    return "\n".join([
        "set datafile separator ','",
        "set logscale xy",
        "set key top right",
        f"set title '{title}'",
        "set xlabel 'parameter'",
        f"plot '{csv_path}' using 1:4 skip 1 with linespoints title '|oracle|', \\",
        f"     '{csv_path}' using 1:7 skip 1 with linespoints title 'error', \\",
        f"     '{csv_path}' using 1:8 skip 1 with lines title 'bound'",
        "",
    ])


def emit_report(rows: Sequence[SweepRow], summary: Optional[SweepSummary], fmt: str,
                path: Optional[str]) -> None:
    """Write the report; ``path`` None means standard output (csv / json only)."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "plotscript":
        if path is None:
            raise ValueError("plotscript output needs a path")
        csv_path = str(Path(path).with_suffix(".csv"))
        Path(csv_path).write_text(rows_to_csv(rows))
        Path(path).write_text(plot_script(os.path.basename(csv_path),
                                          summary.mode if summary else "decay"))
        return
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows, summary)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def fixture_path(name: str) -> Path:
    """Relative fixture names resolve against $PHASEKIT_SEED_FIXTURES when set."""
    p = Path(name)
    root = os.environ.get(FIXTURE_ENV)
    if not p.is_absolute() and root:
        return Path(root) / p
    return p


def verify_fixture(config: RunConfig, jobs: int = 1) -> Tuple[bool, str]:
    """Re-run the embedded configuration and compare its CSV byte for byte."""
    path = fixture_path(config.raw["fixture"])
    if not path.is_file():
        raise ConfigError([("/fixture", f"fixture not found: {path}")])
    inner = parse_config(config.raw["run"])
    if inner.mode == "verify":
        raise ConfigError([("/run/mode", "nested verify runs are not allowed")])
    if config.tolerance is not None:
        inner.tolerance = config.tolerance
    rows, _ = run_sweep(inner, jobs)
    fresh = rows_to_csv(rows)
    frozen = path.read_text()
    if fresh == frozen:
        return True, f"fixture {path} reproduced ({len(rows)} rows)"
    return False, f"fixture {path} differs from the fresh run"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phasekit",
                                 description="Expansion sweeps with oracle comparison.")
    ap.add_argument("verb", choices=MODES)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output path (default: the config's, else stdout)")
    ap.add_argument("--format", choices=FORMATS, help="report format")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("--tolerance", type=float, help="relative tolerance of the oracle")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if config.mode != args.verb:
            raise ConfigError([("/mode", f"config mode '{config.mode}' does not match verb '{args.verb}'")])
        if args.jobs < 1:
            raise ConfigError([("", "--jobs must be at least 1")])
        if args.tolerance is not None:
            if not args.tolerance > 0:
                raise ConfigError([("", "--tolerance must be positive")])
            config.tolerance = args.tolerance
        if config.mode == "verify":
            ok, message = verify_fixture(config, args.jobs)
            print(message, file=sys.stderr)
            return 0 if ok else 2
        rows, summary = run_sweep(config, args.jobs)
        fmt = args.format or config.output_format
        emit_report(rows, summary, fmt, args.out or config.output_path)
    except ConfigError as exc:
        for pointer, message in exc.errors:
            print(f"config error at {pointer or '/'}: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    print(f"{summary.rows} rows, {summary.violations} bound violations, {summary.errors} failed rows",
          file=sys.stderr)
    return 0 if summary.violations == 0 and summary.errors == 0 else 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
