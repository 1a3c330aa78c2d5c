"""Self-check suites run by ``qtele verify``.

Each suite returns a :class:`SuiteResult`; the CLI prints one line per
suite and exits non-zero if any fails.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import quadcore as qc
from .circuits import (
    ClassicalTeleporterParams,
    QuantumTeleporterParams,
    build_classical,
    build_quantum,
    closed_form_classical,
    closed_form_quantum_params,
    closed_form_theta,
    quadrature_variance_theta,
    with_gain,
)
from .experiments import (
    check_amplifier_equivalence,
    loss_threshold_scan,
    operating_point_formulas,
    step_grid,
)
from .metrics import classical_limit_flags, coherent_fidelity, tv_point

DEFAULT_TOLERANCES = {
    "oracle": 1e-10,
    "commutator": 1e-9,
    "limits": 1e-12,
    "identity": 1e-9,
    "theta": 1e-10,
    "operating": 1e-10,
    "threshold": 1e-12,
    "fidelity": 1e-10,
    "loss": 1e-12,
}

LAMBDA_GRID = step_grid(0.0, 3.0, 0.05)
V_SQZ_GRID = (1.0, 0.5, 0.25, 0.1)
ETA_GRID = (1.0, 0.8, 0.5)
CLASSICAL_ETA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
MIN_UNCERTAINTY_INPUTS = ((1.0, 1.0), (0.1, 10.0))


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def quantum_grid():
    for v, lam, ec, ed, ee in itertools.product(V_SQZ_GRID, LAMBDA_GRID, ETA_GRID, ETA_GRID, ETA_GRID):
        yield QuantumTeleporterParams(
            v_sqz=v, lambda_plus=lam, lambda_minus=-lam, eta_c=ec, eta_d=ed, eta_e=ee
        )


def classical_grid():
    receivers = ((1.0, 1.0), (0.5, 2.0))
    for eta, lam, noise, rec in itertools.product(
        CLASSICAL_ETA_GRID, LAMBDA_GRID, MIN_UNCERTAINTY_INPUTS, receivers
    ):
        yield ClassicalTeleporterParams(
            eta=eta, lambda_plus=lam, lambda_minus=-lam,
            receiver_vplus=rec[0], receiver_vminus=rec[1], input_noise=noise,
        )


def _engine_vout(inst):
    return (qc.variance(inst.output, 0.0), qc.variance(inst.output, math.pi / 2))


def suite_oracle(tol):
    worst = 0.0
    n = 0
    for p in quantum_grid():
        e = _engine_vout(build_quantum(p))
        c = closed_form_quantum_params(p)
        worst = max(worst, _rel(e[0], c[0]), _rel(e[1], c[1]))
        n += 1
    for p in classical_grid():
        e = _engine_vout(build_classical(p))
        c, _, _ = closed_form_classical(p)
        worst = max(worst, _rel(e[0], c[0]), _rel(e[1], c[1]))
        n += 1
    return SuiteResult("oracle-equivalence", worst <= tol, f"{n} circuits, max rel err {worst:.3e} (tol {tol:g})")


def random_element_sequence(rng, n_steps=12, n_modes=3):
    """Apply random circuit elements to a pool of mutually independent modes.

    Returns every field produced along the way.  Measured modes leave the
    pool so feedforward only ever acts between distinct modes.
    """
    pool = []
    for _ in range(n_modes):
        plus = float(rng.uniform(0.2, 5.0))
        minus = float(rng.uniform(1.0, 3.0)) / plus
        kind = "vacuum" if rng.random() < 0.3 else "squeezed-ancilla"
        if kind == "vacuum":
            plus, minus = 1.0, 1.0
        pool.append(qc.field_of(qc.make_source(kind, plus, minus)))
    produced = []
    for _ in range(n_steps):
        op = rng.integers(5) if len(pool) > 1 else rng.choice([1, 2, 3])
        if op == 0:
            i, j = rng.choice(len(pool), 2, replace=False)
            pool[i], pool[j] = qc.beamsplitter(pool[i], pool[j], rng.uniform())
            produced += [pool[i], pool[j]]
        elif op == 1:
            i = rng.integers(len(pool))
            pool[i] = qc.phase_shift(pool[i], rng.uniform(0, 2 * math.pi))
            produced.append(pool[i])
        elif op == 2:
            i = rng.integers(len(pool))
            pool[i] = qc.squeeze_opa(pool[i], 1.0 + rng.exponential(2.0))
            produced.append(pool[i])
        elif op == 3:
            i = rng.integers(len(pool))
            pool[i] = qc.attenuate(pool[i], rng.uniform())
            produced.append(pool[i])
        else:
            i, j = rng.choice(len(pool), 2, replace=False)
            current = qc.homodyne(pool[j], rng.uniform(0, 2 * math.pi))
            quad = "amplitude" if rng.random() < 0.5 else "phase"
            pool[i] = qc.modulate(pool[i], current, rng.normal(0, 2), quad)
            produced.append(pool[i])
            pool.pop(j)
            pool.append(qc.field_of(qc.vacuum()))
    return produced


def suite_commutator(tol, n_sequences=1000, seed=0):
    rng = np.random.default_rng(seed)
    worst_norm = 0.0
    worst_unc = math.inf
    thetas = np.linspace(0, math.pi, 7)
    for _ in range(n_sequences):
        for f in random_element_sequence(rng):
            worst_norm = max(worst_norm, abs(qc.commutator_norm(f) - 1))
            for th in thetas:
                prod = qc.variance(f, th) * qc.variance(f, th + math.pi / 2)
                worst_unc = min(worst_unc, prod)
    ok = worst_norm <= tol and worst_unc >= 1 - tol
    return SuiteResult(
        "commutator",
        ok,
        f"{n_sequences} sequences, max |norm-1| {worst_norm:.3e}, min uncertainty product {worst_unc:.6f}",
    )


def suite_classical_limits(tol):
    max_tq, min_vq = -math.inf, math.inf
    for p in classical_grid():
        if (p.receiver_vplus, p.receiver_vminus) != (1.0, 1.0):
            continue
        inst = build_classical(p)
        pt = tv_point(inst.input, inst.output, inst.gains)
        max_tq, min_vq = max(max_tq, pt.t_q), min(min_vq, pt.v_q)
    asym_dev = 0.0
    sym_dev = 0.0
    for lam in LAMBDA_GRID:
        inst = build_classical(ClassicalTeleporterParams(eta=1.0, lambda_plus=lam, lambda_minus=0.0))
        asym_dev = max(asym_dev, abs(tv_point(inst.input, inst.output).v_q - 1))
        inst = build_classical(ClassicalTeleporterParams(eta=0.5, lambda_plus=lam, lambda_minus=-lam))
        sym_dev = max(sym_dev, abs(tv_point(inst.input, inst.output).v_q - (1 + lam * lam / 2)))
    ok = max_tq <= 1 + tol and min_vq >= 1 - tol and asym_dev <= tol and sym_dev <= 1e-10
    return SuiteResult(
        "classical-limits",
        ok,
        f"max T_q {max_tq:.15f}, min V_q {min_vq:.15f}, asymmetric |V_q-1| {asym_dev:.2e}, "
        f"symmetric curve dev {sym_dev:.2e}",
    )


def suite_transfer_identity(tol):
    worst = 0.0
    params = itertools.chain(
        ((build_quantum, p) for p in quantum_grid()),
        ((build_classical, p) for p in classical_grid()),
    )
    for builder, p in params:
        inst = builder(p)
        pt = tv_point(inst.input, inst.output, inst.gains)
        worst = max(
            worst,
            abs(pt.vcv_plus - (1 - pt.t_plus) * pt.vout_plus),
            abs(pt.vcv_minus - (1 - pt.t_minus) * pt.vout_minus),
        )
    return SuiteResult("transfer-identity", worst <= tol, f"max |V_cv - (1-T) V_out| {worst:.3e}")


def suite_arbitrary_quadrature(tol):
    worst = 0.0
    for v, noise in itertools.product((0.5, 0.1, 0.02), ((1.0, 1.0), (0.25, 4.0))):
        p = QuantumTeleporterParams(v_sqz=v, input_noise=noise)
        inst = build_quantum(p)
        for th in np.linspace(0, 2 * math.pi, 32, endpoint=False):
            vin = qc.variance(inst.input, th)
            expected = closed_form_theta(vin, v, v, th)
            worst = max(worst, abs(quadrature_variance_theta(inst, th) - expected))
    return SuiteResult("arbitrary-quadrature", worst <= tol, f"max abs err {worst:.3e}")


def suite_operating_points(tol):
    worst = 0.0
    product_dev = 0.0
    for v in (0.9, 0.5, 0.25, 0.1):
        lam_g, lam_eta = operating_point_formulas(v)
        product_dev = max(product_dev, abs(lam_g * lam_eta - 1))
        p = QuantumTeleporterParams(v_sqz=v)
        worst = max(
            worst,
            check_amplifier_equivalence(p, lam_g, "amplifier"),
            check_amplifier_equivalence(p, lam_eta, "attenuator"),
            check_amplifier_equivalence(p, 1.0, "unity"),
        )
    lam_g, lam_eta = operating_point_formulas(1e-4)
    converge = abs(lam_g - 1) < 1e-2 and abs(lam_eta - 1) < 1e-2
    ok = worst <= tol and product_dev <= 1e-12 and converge
    return SuiteResult(
        "operating-points",
        ok,
        f"max equivalence residual {worst:.3e}, |lG*leta-1| {product_dev:.1e}, "
        f"v_sqz=1e-4 points ({lam_g:.6f}, {lam_eta:.6f})",
    )


def suite_threshold_points(tol):
    expected = {0.5: (1.0, 1.0), 0.1: (5 / 3, 0.2), 1.0: (2 / 3, 2.0)}
    worst = 0.0
    for v, (tq, vq) in expected.items():
        inst = build_quantum(QuantumTeleporterParams(v_sqz=v))
        pt = tv_point(inst.input, inst.output, inst.gains)
        worst = max(worst, abs(pt.t_q - tq), abs(pt.v_q - vq))
    quadrant = {}
    for v in (0.4, 0.45, 0.55, 0.6):
        base = QuantumTeleporterParams(v_sqz=v)
        quadrant[v] = any(
            classical_limit_flags(tv_point(i.input, i.output)).quantum_quadrant
            for i in (build_quantum(with_gain(base, lam)) for lam in step_grid(0.0, 3.0, 0.01))
        )
    ok = worst <= 1e-10 and quadrant == {0.4: True, 0.45: True, 0.55: False, 0.6: False}
    return SuiteResult("threshold-points", ok, f"max dev {worst:.2e}, quadrant reached {quadrant}")


def suite_loss_threshold(tol):
    v_grid = tuple(float(x) for x in np.logspace(-2, 0, 21))
    lam_grid = step_grid(0.0, 3.0, 0.01)
    low = loss_threshold_scan(v_grid, (0.5, 0.4), lam_grid)
    high = loss_threshold_scan((0.1,), (0.6,), lam_grid)
    ok = not low.quadrant.any() and bool(high.quadrant.all())
    return SuiteResult(
        "loss-threshold",
        ok,
        f"eta_e<=0.5 quadrant cells {int(low.quadrant.sum())}/{low.quadrant.size}, "
        f"eta_e=0.6 v_sqz=0.1 reached {bool(high.quadrant.all())}",
    )


def suite_fidelity(tol):
    inst = build_classical(ClassicalTeleporterParams(eta=0.5, lambda_plus=math.sqrt(2), lambda_minus=-math.sqrt(2)))
    f_classical = tv_point(inst.input, inst.output).fidelity
    worst = abs(f_classical - 0.5)
    for v in (0.5, 0.1, 0.01):
        inst = build_quantum(QuantumTeleporterParams(v_sqz=v))
        f = tv_point(inst.input, inst.output).fidelity
        worst = max(worst, abs(f - 1 / (1 + v)))
    worst = max(worst, abs(coherent_fidelity(1.0, 1.0) - 1))
    return SuiteResult("fidelity", worst <= tol, f"classical F {f_classical:.15f}, max dev {worst:.2e}")


SUITES = {
    "oracle": suite_oracle,
    "commutator": suite_commutator,
    "limits": suite_classical_limits,
    "identity": suite_transfer_identity,
    "theta": suite_arbitrary_quadrature,
    "operating": suite_operating_points,
    "threshold": suite_threshold_points,
    "loss": suite_loss_threshold,
    "fidelity": suite_fidelity,
}


def run_all(tolerances=None, only=None):
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    results = []
    for key, suite in SUITES.items():
        if only and key not in only:
            continue
        results.append(suite(tol[key]))
    return results
