import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate, linalg

from qtele import quadcore as qc
from qtele.circuits import (
    ClassicalTeleporterParams,
    QuantumTeleporterParams,
    build_classical,
    build_quantum,
)
from qtele.metrics import (
    TVPoint,
    classical_limit_flags,
    coherent_fidelity,
    conditional_variance,
    mean_gain,
    transfer_coefficient,
    tv_point,
)
from qtele.validation import ParameterError, UndefinedTransferError

from conftest import AMP, PHASE


def wigner_overlap(vp, vm, gain, ap, am):
    """4*pi * integral of W_coherent * W_gaussian over phase space."""

    def gauss(x, mu, var):
        return math.exp(-((x - mu) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)

    def integrand(xm, xp):
        w_in = gauss(xp, 2 * ap, 1.0) * gauss(xm, 2 * am, 1.0)
        w_out = gauss(xp, 2 * gain * ap, vp) * gauss(xm, 2 * gain * am, vm)
        return w_in * w_out

    lo_p, hi_p = 2 * min(ap, gain * ap) - 12, 2 * max(ap, gain * ap) + 12
    lo_m, hi_m = 2 * min(am, gain * am) - 12, 2 * max(am, gain * am) + 12
    val, _ = integrate.dblquad(integrand, lo_p, hi_p, lo_m, hi_m, epsabs=1e-12, epsrel=1e-10)
    return 4 * math.pi * val


def fock_fidelity(vp, vm, gain, ap, am, dim=120):
    """<alpha| D S rho_th S^dag D^dag |alpha> in a truncated number basis."""
    n_th = (math.sqrt(vp * vm) - 1) / 2
    r = -0.25 * math.log(vp / vm)
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    gen = 0.5 * r * (a @ a - a.T @ a.T)
    s_dag = linalg.expm(-gen)
    beta = (1 - gain) * complex(ap, am)
    coh = np.zeros(dim, complex)
    coh[0] = math.exp(-abs(beta) ** 2 / 2)
    for n in range(1, dim):
        coh[n] = coh[n - 1] * beta / math.sqrt(n)
    k = np.arange(dim)
    psi = s_dag @ coh
    p = (n_th ** k) / (n_th + 1) ** (k + 1) if n_th > 0 else (k == 0).astype(float)
    return float(np.sum(p * np.abs(psi) ** 2))


def coherent(signal=(4, 4)):
    return qc.field_of(qc.make_source("signal-carrier", 1, 1, *signal), 1.0)


def ideal_quantum(v, lam=1.0):
    return build_quantum(QuantumTeleporterParams(v_sqz=v, lambda_plus=lam, lambda_minus=-lam))


def symmetric_classical():
    lam = math.sqrt(2)
    return build_classical(ClassicalTeleporterParams(eta=0.5, lambda_plus=lam, lambda_minus=-lam))


# -- transfer_coefficient --

def test_transfer_identity_channel():
    f = coherent()
    assert transfer_coefficient(f, f, AMP) == 1.0
    assert transfer_coefficient(f, f, PHASE) == 1.0


def test_transfer_classical_symmetric():
    inst = symmetric_classical()
    # lambda^2 eta / (1 + lambda^2)
    assert transfer_coefficient(inst.input, inst.output, AMP) == pytest.approx(1 / 3, rel=1e-12)


def test_transfer_ideal_quantum_strong_squeezing():
    inst = ideal_quantum(0.1)
    assert transfer_coefficient(inst.input, inst.output, AMP) == pytest.approx(5 / 6, rel=1e-12)


def test_transfer_requires_input_signal():
    f = qc.field_of(qc.make_source("signal-carrier", 1, 1, 0, 4))
    with pytest.raises(UndefinedTransferError):
        transfer_coefficient(f, f, AMP)
    assert transfer_coefficient(f, f, PHASE) == 1.0


@given(scale=st.floats(1e-3, 1e3))
def test_transfer_invariant_under_signal_scaling(scale):
    def run(sig):
        f = qc.field_of(qc.make_source("signal-carrier", 1, 1, sig, sig))
        return transfer_coefficient(f, qc.attenuate(f, 0.7), AMP)

    assert run(2.0 * scale) == pytest.approx(run(2.0), rel=1e-12)


# -- conditional_variance --

def test_conditional_variance_examples():
    a, b = coherent(), coherent()
    assert conditional_variance(a, b) == pytest.approx(1.0)
    assert conditional_variance(a, a) == pytest.approx(0.0, abs=1e-15)
    inst = symmetric_classical()
    assert conditional_variance(inst.input, inst.output, AMP) == pytest.approx(2.0, rel=1e-12)


@given(eta=st.floats(0, 1))
def test_attenuation_insensitivity(eta):
    f = coherent()
    out = qc.attenuate(f, eta)
    assert conditional_variance(f, out, AMP) == pytest.approx(1 - eta, abs=1e-12)
    assert conditional_variance(f, out, PHASE) == pytest.approx(1 - eta, abs=1e-12)


def test_transfer_falls_with_loss():
    f = coherent()
    ts = [transfer_coefficient(f, qc.attenuate(f, eta)) for eta in np.linspace(1, 0.05, 20)]
    assert all(x > y for x, y in zip(ts, ts[1:]))


@pytest.mark.parametrize("H", [1.0, 2.0, 9.0])
def test_amplified_output_scales_conditional_variance_not_transfer(H):
    f = qc.field_of(qc.make_source("signal-carrier", 1.5, 1, 4, 4))
    out, _ = qc.beamsplitter(f, qc.field_of(qc.vacuum()), 0.6)
    base = conditional_variance(f, out, AMP), conditional_variance(f, out, PHASE)
    amplified = qc.squeeze_opa(out, H)
    # OPA scales each quadrature of the output, shared and independent parts alike
    g_p, g_m = (math.sqrt(H) - math.sqrt(H - 1)) ** 2, (math.sqrt(H) + math.sqrt(H - 1)) ** 2
    assert conditional_variance(f, amplified, AMP) == pytest.approx(g_p * base[0], rel=1e-10)
    assert conditional_variance(f, amplified, PHASE) == pytest.approx(g_m * base[1], rel=1e-10)
    assert transfer_coefficient(f, amplified, AMP) == pytest.approx(
        transfer_coefficient(f, out, AMP), rel=1e-10
    )


def test_mean_gain_unity_for_ideal_teleporter():
    inst = ideal_quantum(0.3)
    assert mean_gain(inst.input, inst.output, AMP) == pytest.approx(1.0, rel=1e-12)
    assert mean_gain(inst.input, inst.output, PHASE) == pytest.approx(1.0, rel=1e-12)


# -- tv_point --

@pytest.mark.parametrize(
    "v, expected",
    [(0.5, (1.0, 1.0)), (0.1, (5 / 3, 0.2)), (1.0, (2 / 3, 2.0))],
)
def test_tv_point_ideal_teleporter(v, expected):
    inst = ideal_quantum(v)
    p = tv_point(inst.input, inst.output, inst.gains)
    assert (p.t_q, p.v_q) == pytest.approx(expected, abs=1e-12)
    assert p.t_q == p.t_plus + p.t_minus
    assert p.fidelity == pytest.approx(1 / (1 + v), abs=1e-12)


def test_tv_point_leaves_fidelity_empty_off_unity_gain():
    inst = ideal_quantum(0.5, lam=0.8)
    assert tv_point(inst.input, inst.output, inst.gains).fidelity is None


# -- classical_limit_flags --

def _point(tq, vq):
    return TVPoint(1, -1, tq / 2, tq / 2, tq, vq, vq, vq, 1, 1)


@pytest.mark.parametrize(
    "tq, vq, flags",
    [
        (1.0, 1.0, (False, False, False)),
        (5 / 3, 0.2, (True, True, True)),
        (2 / 3, 2.0, (False, False, False)),
        (1 + 1e-13, 1 - 1e-13, (False, False, False)),
        (1.2, 1.5, (True, False, False)),
    ],
)
def test_limit_flags(tq, vq, flags):
    f = classical_limit_flags(_point(tq, vq))
    assert (f.breaks_tq, f.breaks_vq, f.quantum_quadrant) == flags


def test_limit_flags_ignore_tq_for_mixed_inputs():
    f = classical_limit_flags(_point(1.5, 0.5), input_min_uncertainty=False)
    assert not f.breaks_tq and f.breaks_vq and not f.quantum_quadrant


# -- coherent_fidelity --

def test_fidelity_examples():
    assert coherent_fidelity(1, 1) == 1.0
    assert coherent_fidelity(3, 3) == pytest.approx(0.5, abs=1e-15)
    assert coherent_fidelity(2, 2) == pytest.approx(2 / 3, abs=1e-15)


def test_fidelity_examples_against_overlap_oracle():
    for v, expected in [(1, 1.0), (3, 0.5), (2, 2 / 3)]:
        assert wigner_overlap(v, v, 1, 0, 0) == pytest.approx(expected, abs=1e-8)


def test_fidelity_rejects_nonpositive_variance():
    with pytest.raises(ParameterError):
        coherent_fidelity(0, 1)
    with pytest.raises(ParameterError):
        coherent_fidelity(1, -2)
    with pytest.raises(ParameterError):
        coherent_fidelity(0.5, 1.5)


@pytest.mark.parametrize(
    "args",
    [
        (1.0, 1.0, 1.0, 0.0, 0.0),
        (0.5, 2.0, 1.0, 0.0, 0.0),
        (2.5, 1.2, 0.8, 0.7, -0.4),
        (1.0, 1.0, 1.3, 1.1, 0.2),
        (3.0, 0.4, 0.5, -0.3, 0.9),
    ],
)
def test_fidelity_matches_fock_basis_oracle(args):
    assert coherent_fidelity(*args) == pytest.approx(fock_fidelity(*args), abs=1e-8)


@settings(max_examples=15, deadline=None)
@given(
    vp=st.floats(0.3, 4), vm=st.floats(0.3, 4), gain=st.floats(0.5, 1.5),
    ap=st.floats(-1.5, 1.5), am=st.floats(-1.5, 1.5),
)
def test_fidelity_matches_wigner_oracle(vp, vm, gain, ap, am):
    assume(vp * vm >= 1)
    assert coherent_fidelity(vp, vm, gain, ap, am) == pytest.approx(
        wigner_overlap(vp, vm, gain, ap, am), abs=1e-7
    )


@given(
    vp=st.floats(1e-3, 1e3), vm=st.floats(1e-3, 1e3), gain=st.floats(-3, 3),
    ap=st.floats(-5, 5), am=st.floats(-5, 5),
)
def test_fidelity_bounds(vp, vm, gain, ap, am):
    assume(vp * vm >= 1)
    f = coherent_fidelity(vp, vm, gain, ap, am)
    assert 0 <= f <= 1 + 1e-15
    if f == pytest.approx(1, abs=1e-12):
        assert vp == pytest.approx(1, abs=1e-5) and vm == pytest.approx(1, abs=1e-5)
