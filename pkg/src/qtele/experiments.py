"""Gain/efficiency sweeps, operating-point search and loss-threshold scans."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import (
    QuantumTeleporterParams,
    build_classical,
    build_quantum,
    with_gain,
)
from .metrics import classical_limit_flags, tv_point
from .quadcore import variance
from .validation import ParameterError

SWEEPABLE = {
    "classical": ("gain", "eta"),
    "quantum": ("gain", "v_sqz", "eta_c", "eta_d", "eta_e"),
}

INV_PHI = (math.sqrt(5) - 1) / 2


class SweepError(ValueError):
    """A sweep grid point failed; ``value`` is the offending grid value."""

    def __init__(self, name, value, cause):
        super().__init__(f"sweep of {name} failed at {value!r}: {cause}")
        self.name = name
        self.value = value


def worker_count():
    """Worker threads from ``QTELE_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("QTELE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError("QTELE_THREADS", f"expected an integer, got {raw!r}") from None
    if n < 0:
        raise ParameterError("QTELE_THREADS", f"must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def step_grid(lo, hi, step):
    """``lo, lo + step, ...`` up to ``hi`` inclusive, without float drift."""
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + k * step, 12) for k in range(n + 1)]


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    params: object
    swept: str = "gain"
    lo: float = 0.0
    hi: float = 3.0
    step: float | None = 0.05
    n_points: int | None = None
    minus_ratio: float = -1.0

    def validate(self):
        if self.kind not in SWEEPABLE:
            raise ParameterError("kind", f"must be one of {tuple(SWEEPABLE)}, got {self.kind!r}")
        if self.swept not in SWEEPABLE[self.kind]:
            raise ParameterError(
                "swept", f"{self.swept!r} cannot be swept for a {self.kind} circuit"
            )
        if not self.lo <= self.hi:
            raise ParameterError("lo", f"lo={self.lo!r} exceeds hi={self.hi!r}")
        if self.n_points is not None:
            if self.n_points < 1:
                raise ParameterError("n_points", "must be positive")
        elif self.step is None or not self.step > 0:
            raise ParameterError("step", f"must be positive, got {self.step!r}")
        self.params.validate()
        return self

    def grid(self):
        if self.n_points is not None:
            if self.n_points == 1:
                return [float(self.lo)]
            return [float(x) for x in np.linspace(self.lo, self.hi, self.n_points)]
        return step_grid(float(self.lo), float(self.hi), float(self.step))

    def params_at(self, value):
        if self.swept == "gain":
            return with_gain(self.params, value, self.minus_ratio)
        return replace(self.params, **{self.swept: value})


def build(kind, params):
    if kind == "classical":
        return build_classical(params)
    if kind == "quantum":
        return build_quantum(params)
    raise ParameterError("kind", f"unknown circuit kind {kind!r}")


def evaluate(kind, params):
    inst = build(kind, params)
    return tv_point(inst.input, inst.output, inst.gains)


def run_sweep(spec, max_workers=None):
    """Evaluate one T-V point per grid value, returned in grid order."""
    spec.validate()
    values = spec.grid()

    def one(value):
        try:
            return evaluate(spec.kind, spec.params_at(value))
        except ValueError as exc:
            raise SweepError(spec.swept, value, exc) from exc

    workers = max_workers or worker_count()
    if workers == 1 or len(values) < 2:
        return [one(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, values))


def golden_section(f, a, b, tol=1e-8, maximize=False):
    """Extremum of a unimodal ``f`` on ``[a, b]``, located to within ``tol``."""
    sign = -1.0 if maximize else 1.0
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = sign * f(d)
    return 0.5 * (a + b)


def _sign_changes(y):
    s = np.sign(np.diff(y))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


@dataclass(frozen=True)
class OperatingPoints:
    v_sqz: float
    lambda_G_formula: float
    lambda_eta_formula: float
    lambda_Tq_max_numeric: float
    lambda_Vq_min_numeric: float
    tq_max: float
    vq_min: float
    tq_bracketed: bool
    vq_bracketed: bool
    tq_unimodal: bool
    vq_unimodal: bool
    equivalence_residuals: dict = field(default_factory=dict)

    @property
    def formula_bounded(self):
        return math.isfinite(self.lambda_G_formula)


def operating_point_formulas(v_sqz):
    """Amplifier-equivalent and attenuator-equivalent gains for squeezing ``v_sqz``.

    Returns ``(inf, 0.0)`` without squeezing, where the amplifier point
    runs off to infinite gain.
    """
    v_anti = 1.0 / float(v_sqz)
    if v_anti <= 1.0:
        return math.inf, 0.0
    return (v_anti + 1) / (v_anti - 1), (v_anti - 1) / (v_anti + 1)


def _require_lossless(params):
    for name in ("eta_c", "eta_d", "eta_e"):
        if getattr(params, name) != 1.0:
            raise ParameterError(name, "operating-point formulas assume no loss (efficiency 1)")


def _locate(f, lo, hi, step, maximize, tol):
    grid = np.asarray(step_grid(lo, hi, step))
    values = np.array([f(x) for x in grid])
    k = int(np.argmax(values) if maximize else np.argmin(values))
    bracketed = 0 < k < len(grid) - 1
    unimodal = _sign_changes(values) <= 1
    if not bracketed:
        return float(grid[k]), float(values[k]), False, unimodal
    x = golden_section(f, grid[k - 1], grid[k + 1], tol=tol, maximize=maximize)
    fx = f(x)
    better = fx > values[k] if maximize else fx < values[k]
    if not better:
        x, fx = float(grid[k]), float(values[k])
    return float(x), float(fx), True, unimodal


def find_operating_points(params, search=(0.0, 3.0), step=0.01, tol=1e-8, minus_ratio=-1.0):
    """Turning points of the T-V curve, by formula and by numerical search.

    The numeric points come from a grid scan refined by golden-section
    search; the formula points are the gains where the teleporter acts as
    an ideal amplifier or attenuator.
    """
    params.validate()
    _require_lossless(params)
    lam_g, lam_eta = operating_point_formulas(params.v_sqz)

    def tq(lam):
        return evaluate("quantum", with_gain(params, lam, minus_ratio)).t_q

    def vq(lam):
        return evaluate("quantum", with_gain(params, lam, minus_ratio)).v_q

    lo, hi = search
    x_t, t_max, t_br, t_uni = _locate(tq, lo, hi, step, True, tol)
    x_v, v_min, v_br, v_uni = _locate(vq, lo, hi, step, False, tol)

    residuals = {"unity": check_amplifier_equivalence(params, 1.0, "unity")}
    if math.isfinite(lam_g):
        residuals["amplifier"] = check_amplifier_equivalence(params, lam_g, "amplifier")
        residuals["attenuator"] = check_amplifier_equivalence(params, lam_eta, "attenuator")

    return OperatingPoints(
        v_sqz=float(params.v_sqz),
        lambda_G_formula=lam_g,
        lambda_eta_formula=lam_eta,
        lambda_Tq_max_numeric=x_t,
        lambda_Vq_min_numeric=x_v,
        tq_max=t_max,
        vq_min=v_min,
        tq_bracketed=t_br,
        vq_bracketed=v_br,
        tq_unimodal=t_uni,
        vq_unimodal=v_uni,
        equivalence_residuals=residuals,
    )


def equivalent_channel_variance(model, lam, vin, v_sqz):
    """Output variance of the ideal amplifier, attenuator or unity-gain channel."""
    if model == "amplifier":
        return lam * lam * vin + lam * lam - 1
    if model == "attenuator":
        return lam * lam * vin + 1 - lam * lam
    if model == "unity":
        return vin + 2 * v_sqz
    raise ValueError(f"unknown channel model {model!r}")


def check_amplifier_equivalence(params, lam, model=None):
    """Largest deviation of the teleporter output from an equivalent channel.

    ``model`` is ``"amplifier"``, ``"attenuator"`` or ``"unity"``; when
    omitted it is inferred from which operating point ``lam`` sits on.
    """
    params.validate()
    _require_lossless(params)
    if model is None:
        lam_g, lam_eta = operating_point_formulas(params.v_sqz)
        candidates = {"unity": 1.0, "amplifier": lam_g, "attenuator": lam_eta}
        model = min(candidates, key=lambda m: abs(candidates[m] - lam))
        if abs(candidates[model] - lam) > 1e-9 * max(1.0, abs(lam)):
            raise ParameterError("lambda", f"{lam!r} is not an operating point for v_sqz={params.v_sqz!r}")
    inst = build_quantum(with_gain(params, lam))
    resid = 0.0
    for theta, vin in ((0.0, params.input_noise[0]), (math.pi / 2, params.input_noise[1])):
        expected = equivalent_channel_variance(model, lam, vin, params.v_sqz)
        resid = max(resid, abs(variance(inst.output, theta) - expected))
    return resid


@dataclass(frozen=True)
class LossThresholdTable:
    v_sqz: tuple
    eta_e: tuple
    quadrant: np.ndarray  # shape (len(v_sqz), len(eta_e))

    def rows(self):
        for i, v in enumerate(self.v_sqz):
            for j, e in enumerate(self.eta_e):
                yield {"v_sqz": v, "eta_e": e, "quantum_quadrant": bool(self.quadrant[i, j])}


def loss_threshold_scan(v_sqz_grid, eta_e_grid, lambda_grid, base=None, max_workers=None):
    """Whether any gain reaches the quantum quadrant, for each (v_sqz, eta_e)."""
    v_sqz_grid, eta_e_grid, lambda_grid = tuple(v_sqz_grid), tuple(eta_e_grid), tuple(lambda_grid)
    if not (v_sqz_grid and eta_e_grid and lambda_grid):
        raise ParameterError("grid", "all grids must be nonempty")
    base = base or QuantumTeleporterParams()
    min_unc = abs(base.input_noise[0] * base.input_noise[1] - 1) < 1e-12

    def cell(ij):
        i, j = ij
        p = replace(base, v_sqz=v_sqz_grid[i], eta_e=eta_e_grid[j])
        for lam in lambda_grid:
            pt = evaluate("quantum", with_gain(p, lam))
            if classical_limit_flags(pt, min_unc).quantum_quadrant:
                return True
        return False

    cells = [(i, j) for i in range(len(v_sqz_grid)) for j in range(len(eta_e_grid))]
    workers = max_workers or worker_count()
    if workers == 1:
        flags = [cell(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(cell, cells))
    quadrant = np.array(flags, dtype=bool).reshape(len(v_sqz_grid), len(eta_e_grid))
    return LossThresholdTable(v_sqz_grid, eta_e_grid, quadrant)
