"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 config/argument parse
error, 3 parameter validation error.
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import verification
from .circuits import ClassicalTeleporterParams, QuantumTeleporterParams
from .experiments import SweepSpec, find_operating_points, run_sweep
from .validation import ParameterError

COMMANDS = ("classical-tv", "quantum-tv", "operating-points", "verify")
FORMATS = ("csv", "json")

TV_COLUMNS = (
    "lambda", "t_plus", "t_minus", "t_q", "vcv_plus", "vcv_minus", "v_q",
    "vout_plus", "vout_minus", "fidelity",
)
QUANTUM_COLUMNS = TV_COLUMNS + ("v_sqz", "eta_c", "eta_d", "eta_e")

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_VALIDATION = 0, 1, 2, 3


class ConfigError(ValueError):
    """Malformed configuration text, unknown key or bad ``--set`` expression."""


@dataclass(frozen=True)
class SweepConfig:
    lo: float = 0.0
    hi: float = 3.0
    step: float = 0.05
    minus_ratio: float = -1.0
    v_sqz_values: tuple = (1.0, 0.5, 0.1)

    def validate(self):
        for name in ("lo", "hi", "step", "minus_ratio"):
            if not isinstance(getattr(self, name), (int, float)) or isinstance(getattr(self, name), bool):
                raise ParameterError(name, f"expected a number, got {getattr(self, name)!r}")
        if not self.step > 0:
            raise ParameterError("step", f"must be positive, got {self.step!r}")
        if not self.lo <= self.hi:
            raise ParameterError("lo", f"lo={self.lo!r} exceeds hi={self.hi!r}")
        if not self.v_sqz_values:
            raise ParameterError("v_sqz_values", "must not be empty")
        for v in self.v_sqz_values:
            QuantumTeleporterParams(v_sqz=v).validate()
        return self


@dataclass(frozen=True)
class RunConfig:
    command: str = "verify"
    classical: ClassicalTeleporterParams = field(default_factory=ClassicalTeleporterParams)
    quantum: QuantumTeleporterParams = field(default_factory=QuantumTeleporterParams)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    out: str | None = None
    format: str = "csv"
    tolerances: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ParameterError("command", f"must be one of {COMMANDS}, got {self.command!r}")
        if self.format not in FORMATS:
            raise ParameterError("format", f"must be one of {FORMATS}, got {self.format!r}")
        for section in ("classical", "quantum", "sweep"):
            try:
                getattr(self, section).validate()
            except ParameterError as exc:
                raise ParameterError(f"{section}.{exc.field}", str(exc).split(": ", 1)[-1]) from exc
        for key, value in self.tolerances.items():
            if key not in verification.DEFAULT_TOLERANCES:
                raise ParameterError(f"tolerances.{key}", "unknown tolerance")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
                raise ParameterError(f"tolerances.{key}", f"must be a non-negative number, got {value!r}")
        return self

    def to_dict(self):
        return _jsonable(dataclasses.asdict(self))

    @classmethod
    def from_dict(cls, data):
        return _from_dict(cls, data, "")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _coerce(value, default):
    if isinstance(value, list):
        return tuple(_coerce(v, 0.0) for v in value)
    if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def _from_dict(cls, data, prefix):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'config'}: expected an object, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in fields:
            raise ConfigError(f"unknown config key {prefix}{key!r}")
        f = fields[key]
        if dataclasses.is_dataclass(f.default_factory if f.default_factory is not dataclasses.MISSING else None):
            kwargs[key] = _from_dict(f.default_factory, value, f"{prefix}{key}.")
            continue
        default = f.default if f.default is not dataclasses.MISSING else None
        if key == "tolerances":
            if not isinstance(value, dict):
                raise ConfigError("tolerances: expected an object")
            kwargs[key] = {k: _coerce(v, 0.0) for k, v in value.items()}
        else:
            kwargs[key] = _coerce(value, default)
    return cls(**kwargs)


def apply_set(data, expression):
    """Apply one ``path=value`` override to a config dict in place."""
    if "=" not in expression:
        raise ConfigError(f"--set expects path=value, got {expression!r}")
    path, raw = expression.split("=", 1)
    keys = [k for k in path.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"--set has an empty path: {expression!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = data
    for k in keys[:-1]:
        child = node.get(k)
        if child is None:
            child = node[k] = {}
        if not isinstance(child, dict):
            raise ConfigError(f"--set path {path!r} descends into a non-object")
        node = child
    node[keys[-1]] = value


def load_config(command, config_path=None, sets=(), fmt=None, out=None):
    data = RunConfig().to_dict()
    if config_path is not None:
        try:
            text = Path(config_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {config_path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be an object")
        _merge(data, loaded)
    data["command"] = command
    for expr in sets:
        apply_set(data, expr)
    if fmt is not None:
        data["format"] = fmt
    if out is not None:
        data["out"] = out
    return RunConfig.from_dict(data)


def _merge(base, update):
    for k, v in update.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict) and k != "tolerances":
            _merge(base[k], v)
        else:
            base[k] = v


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_rows(rows, columns, fmt):
    if fmt == "json":
        return json.dumps([{c: row[c] for c in columns} for row in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")


def _tv_row(lam, point):
    row = point.as_dict()
    row["lambda"] = lam
    return row


def cmd_classical_tv(cfg):
    spec = SweepSpec(
        "classical", cfg.classical, "gain", cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.step,
        minus_ratio=cfg.sweep.minus_ratio,
    )
    rows = [_tv_row(lam, pt) for lam, pt in zip(spec.grid(), run_sweep(spec))]
    _emit(render_rows(rows, TV_COLUMNS, cfg.format), cfg.out)
    return EXIT_OK


def cmd_quantum_tv(cfg):
    rows = []
    for v in cfg.sweep.v_sqz_values:
        params = replace(cfg.quantum, v_sqz=v)
        spec = SweepSpec(
            "quantum", params, "gain", cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.step,
            minus_ratio=cfg.sweep.minus_ratio,
        )
        for lam, pt in zip(spec.grid(), run_sweep(spec)):
            row = _tv_row(lam, pt)
            row.update(v_sqz=float(v), eta_c=params.eta_c, eta_d=params.eta_d, eta_e=params.eta_e)
            rows.append(row)
    _emit(render_rows(rows, QUANTUM_COLUMNS, cfg.format), cfg.out)
    return EXIT_OK


def cmd_operating_points(cfg):
    reports = []
    for v in cfg.sweep.v_sqz_values:
        op = find_operating_points(replace(cfg.quantum, v_sqz=v), (cfg.sweep.lo, cfg.sweep.hi))
        reports.append(dataclasses.asdict(op))
    if cfg.format == "json":
        # unbounded formula points become null; bare Infinity is not JSON
        clean = [
            {k: (None if isinstance(x, float) and not math.isfinite(x) else x) for k, x in r.items()}
            for r in reports
        ]
        text = json.dumps(clean, indent=2, allow_nan=False) + "\n"
    else:
        lines = []
        for r in reports:
            bounded = r["lambda_G_formula"] != float("inf")
            lines.append(f"v_sqz = {r['v_sqz']!r}")
            if bounded:
                lines.append(f"  lambda_G (amplifier)    = {r['lambda_G_formula']!r}")
                lines.append(f"  lambda_eta (attenuator) = {r['lambda_eta_formula']!r}")
                lines.append(f"  lambda_G * lambda_eta   = {r['lambda_G_formula'] * r['lambda_eta_formula']!r}")
            else:
                lines.append("  lambda_G (amplifier)    = unbounded (no squeezing)")
            lines.append(
                f"  max T_q = {r['tq_max']!r} at lambda = {r['lambda_Tq_max_numeric']!r}"
                + ("" if r["tq_bracketed"] else " (search boundary)")
            )
            lines.append(
                f"  min V_q = {r['vq_min']!r} at lambda = {r['lambda_Vq_min_numeric']!r}"
                + ("" if r["vq_bracketed"] else " (search boundary)")
            )
            for name, res in r["equivalence_residuals"].items():
                lines.append(f"  {name} equivalence residual = {res:.3e}")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_verify(cfg):
    results = verification.run_all(cfg.tolerances)
    text = "\n".join(r.line() for r in results) + "\n"
    ok = all(r.passed for r in results)
    text += ("all suites passed\n" if ok else "verification FAILED\n")
    _emit(text, cfg.out)
    return EXIT_OK if ok else EXIT_VERIFY


HANDLERS = {
    "classical-tv": cmd_classical_tv,
    "quantum-tv": cmd_quantum_tv,
    "operating-points": cmd_operating_points,
    "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration file")
    common.add_argument("--set", dest="sets", action="append", default=[], metavar="PATH=VALUE",
                        help="override a config entry, e.g. quantum.v_sqz=0.25 (repeatable)")
    common.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--dump-config", action="store_true",
                        help="print the resolved configuration as JSON and exit")

    parser = argparse.ArgumentParser(prog="qtele", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classical-tv", parents=[common], help="T-V curve of the classical teleporter")
    sub.add_parser("quantum-tv", parents=[common], help="T-V curves of the EPR teleporter")
    sub.add_parser("operating-points", parents=[common], help="turning points and channel equivalences")
    sub.add_parser("verify", parents=[common], help="run the self-check suites")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.sets, args.format, args.out)
    except (ConfigError, TypeError) as exc:
        print(f"qtele: config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg.validate()
    except ParameterError as exc:
        print(f"qtele: invalid parameter {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.dump_config:
        sys.stdout.write(json.dumps(cfg.to_dict(), indent=2) + "\n")
        return EXIT_OK
    try:
        return HANDLERS[cfg.command](cfg)
    except ParameterError as exc:
        print(f"qtele: invalid parameter {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"qtele: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
