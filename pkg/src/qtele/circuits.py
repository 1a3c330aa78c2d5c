"""Classical and entanglement-assisted teleporter circuits.

The builders assemble circuits from :mod:`qtele.quadcore` elements.  The
``closed_form_*`` functions evaluate the same output spectra by direct
arithmetic and never touch the engine, so the two routes can be compared.

Gain conventions.  ``lambda_plus`` and ``lambda_minus`` are the electronic
gains as they appear in the closed forms.  The phase channel enters with the
opposite sign, so ``lambda_plus = -lambda_minus = lambda`` reconstructs the
input mean in both quadratures.  For the quantum circuit the builder also
absorbs the 50:50 in-loop beamsplitter, so the input reaches the output
with weight ``lambda * sqrt(eta_e)``.
"""

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType

from .quadcore import (
    attenuate,
    beamsplitter,
    field_of,
    homodyne,
    make_source,
    modulate,
    phase_shift,
    squeeze_opa,
    variance,
)
from .validation import (
    ParameterError,
    check_fraction,
    check_gain,
    check_signal_pair,
    check_variance_pair,
)

COHERENT = (1.0, 1.0)
DEFAULT_SIGNAL = (4.0, 4.0)


@dataclass(frozen=True)
class ClassicalTeleporterParams:
    eta: float = 0.5
    lambda_plus: float = 1.0
    lambda_minus: float = -1.0
    receiver_vplus: float = 1.0
    receiver_vminus: float = 1.0
    input_noise: tuple = COHERENT
    input_signal: tuple = DEFAULT_SIGNAL

    def validate(self):
        check_fraction(self.eta, "eta")
        check_gain(self.lambda_plus, "lambda_plus")
        check_gain(self.lambda_minus, "lambda_minus")
        check_variance_pair((self.receiver_vplus, self.receiver_vminus), "receiver_vplus/receiver_vminus")
        check_variance_pair(self.input_noise, "input_noise")
        check_signal_pair(self.input_signal, "input_signal")
        return self


@dataclass(frozen=True)
class QuantumTeleporterParams:
    """Parameters of the EPR-assisted teleporter.

    ``v_sqz`` is the amplitude variance of each squeezed beam.  The
    ``va``/``vb`` overrides replace the minimum-uncertainty OPA beams with
    arbitrary squeezed ancillas ``(plus, minus)``.
    """

    v_sqz: float = 0.5
    lambda_plus: float = 1.0
    lambda_minus: float = -1.0
    eta_c: float = 1.0
    eta_d: float = 1.0
    eta_e: float = 1.0
    input_noise: tuple = COHERENT
    input_signal: tuple = DEFAULT_SIGNAL
    va: tuple | None = None
    vb: tuple | None = None

    def validate(self):
        v = _real(self.v_sqz, "v_sqz")
        if not 0.0 < v <= 1.0:
            raise ParameterError("v_sqz", f"must lie in (0, 1], got {v!r}")
        check_gain(self.lambda_plus, "lambda_plus")
        check_gain(self.lambda_minus, "lambda_minus")
        for name in ("eta_c", "eta_d", "eta_e"):
            check_fraction(getattr(self, name), name)
        check_variance_pair(self.input_noise, "input_noise")
        check_signal_pair(self.input_signal, "input_signal")
        if self.va is not None:
            check_variance_pair(self.va, "va")
        if self.vb is not None:
            check_variance_pair(self.vb, "vb")
        return self

    def ancilla_variances(self):
        """``(va_plus, va_minus, vb_plus, vb_minus)`` of the two squeezed beams."""
        default = (float(self.v_sqz), 1.0 / float(self.v_sqz))
        va = tuple(map(float, self.va)) if self.va is not None else default
        vb = tuple(map(float, self.vb)) if self.vb is not None else default
        return va + vb


@dataclass(frozen=True)
class TeleporterInstance:
    """A built circuit: input field (before measurement), output field, intermediates."""

    kind: str
    params: object
    input: object
    output: object
    fields: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    currents: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    @property
    def gains(self):
        return (float(self.params.lambda_plus), float(self.params.lambda_minus))


def _real(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(name, f"expected a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterError(name, f"must be finite, got {value!r}")
    return value


def opa_gain_for(v_sqz):
    """Parametric gain ``H`` with ``(sqrt(H) - sqrt(H-1))**2 == v_sqz``."""
    v = float(v_sqz)
    if not 0 < v <= 1:
        raise ParameterError("v_sqz", f"must lie in (0, 1], got {v!r}")
    return (1.0 + v) ** 2 / (4.0 * v)


def _input_field(noise, signal, carrier=1.0):
    src = make_source("signal-carrier", noise[0], noise[1], signal[0], signal[1])
    return field_of(src, carrier)


def build_classical(params):
    """Measure-and-prepare teleporter with no shared entanglement.

    The input is split at ``eta``; one arm is homodyned in amplitude, the
    other in phase, and both photocurrents modulate an independent receiver
    beam carrying the same coherent amplitude as the input.
    """
    params.validate()
    f_in = _input_field(params.input_noise, params.input_signal)
    v = field_of(make_source("vacuum"))
    arm1, arm2 = beamsplitter(f_in, v, params.eta)
    i_plus = homodyne(arm1, 0.0)
    i_minus = homodyne(arm2, math.pi / 2)
    receiver = field_of(
        make_source("coherent-seed", params.receiver_vplus, params.receiver_vminus),
        f_in.carrier_amplitude,
    )
    out = modulate(receiver, i_plus, params.lambda_plus, "amplitude")
    out = modulate(out, i_minus, -params.lambda_minus, "phase")
    return TeleporterInstance(
        "classical",
        params,
        f_in,
        out,
        MappingProxyType({"arm1": arm1, "arm2": arm2, "receiver": receiver}),
        MappingProxyType({"plus": i_plus, "minus": i_minus}),
    )


def detector_transmission(eta_e):
    """Per-arm attenuation that reproduces the closed-form detection efficiency.

    With two detected arms behind a 50:50 splitter, arm transmission
    ``2 eta_e / (1 + eta_e)`` and feedforward gain ``lambda sqrt(1 + eta_e)``
    give input weight ``lambda sqrt(eta_e)`` and detection noise
    ``lambda**2 (1 - eta_e)``.
    """
    return 2.0 * eta_e / (1.0 + eta_e)


def build_quantum(params):
    """Teleporter sharing EPR beams made from two squeezed sources.

    Routing: ``c = (a + i b)/sqrt(2)`` goes to the sender, ``d = (a - i b)/sqrt(2)``
    to the receiver.  The sender mixes ``c`` (after loss ``eta_c``) with the
    input on a 50:50 splitter and detects amplitude on the sum port and phase
    on the difference port.  ``d`` (after loss ``eta_d``) is modulated.
    """
    params.validate()
    va_p, va_m, vb_p, vb_m = params.ancilla_variances()
    if params.va is None and params.vb is None:
        H = opa_gain_for(params.v_sqz)
        a = squeeze_opa(field_of(make_source("coherent-seed"), 1.0), H)
        b = squeeze_opa(field_of(make_source("coherent-seed"), 1.0), H)
    else:
        a = field_of(make_source("squeezed-ancilla", va_p, va_m), 1.0)
        b = field_of(make_source("squeezed-ancilla", vb_p, vb_m), 1.0)

    c, d = beamsplitter(a, phase_shift(b, math.pi / 2), 0.5)
    c_lossy = attenuate(c, params.eta_c)
    d_lossy = attenuate(d, params.eta_d)

    f_in = _input_field(params.input_noise, params.input_signal)
    arm1, arm2 = beamsplitter(f_in, c_lossy, 0.5)
    eta_det = detector_transmission(params.eta_e)
    det1 = attenuate(arm1, eta_det)
    det2 = attenuate(arm2, eta_det)
    i_plus = homodyne(det1, 0.0)
    i_minus = homodyne(det2, math.pi / 2)

    scale = math.sqrt(1.0 + params.eta_e)
    out = modulate(d_lossy, i_plus, params.lambda_plus * scale, "amplitude")
    out = modulate(out, i_minus, -params.lambda_minus * scale, "phase")
    return TeleporterInstance(
        "quantum",
        params,
        f_in,
        out,
        MappingProxyType(
            {"a": a, "b": b, "c": c, "d": d, "c_lossy": c_lossy, "d_lossy": d_lossy,
             "arm1": det1, "arm2": det2}
        ),
        MappingProxyType({"plus": i_plus, "minus": i_minus}),
    )


def closed_form_classical(params):
    """Output variances, transfer coefficients and conditional variances by hand.

    Returns ``(vout_plus, vout_minus), (t_plus, t_minus), (vcv_plus, vcv_minus)``.
    Vacuum enters the empty port of the measurement beamsplitter.
    """
    eta = params.eta
    lp2, lm2 = params.lambda_plus ** 2, params.lambda_minus ** 2
    n_p, n_m = params.input_noise
    vout_p = params.receiver_vplus + lp2 * (eta * n_p + (1 - eta))
    vout_m = params.receiver_vminus + lm2 * ((1 - eta) * n_m + eta)
    # input weight squared in each output quadrature
    y_p, y_m = lp2 * eta, lm2 * (1 - eta)
    t_p = y_p * n_p / vout_p
    t_m = y_m * n_m / vout_m
    vcv_p = vout_p - y_p * n_p
    vcv_m = vout_m - y_m * n_m
    return (vout_p, vout_m), (t_p, t_m), (vcv_p, vcv_m)


def closed_form_quantum(va_plus, va_minus, vb_plus, vb_minus, eta_c, eta_d, eta_e,
                        lambda_plus, lambda_minus, vin_plus, vin_minus):
    """Output amplitude and phase spectra of the EPR teleporter."""
    s = math.sqrt(eta_c * eta_e)
    r = math.sqrt(eta_d)

    def one(lam, va, vb_conj, vin):
        return (
            0.5 * (r + lam * s) ** 2 * va
            + 0.5 * (r - lam * s) ** 2 * vb_conj
            + lam ** 2 * eta_e * vin
            + (1 - eta_d)
            + lam ** 2 * (1 - eta_c * eta_e)
        )

    return (
        one(lambda_plus, va_plus, vb_minus, vin_plus),
        one(lambda_minus, va_minus, vb_plus, vin_minus),
    )


def closed_form_quantum_params(params):
    """:func:`closed_form_quantum` evaluated for a parameter set, on noise variances."""
    va_p, va_m, vb_p, vb_m = params.ancilla_variances()
    return closed_form_quantum(
        va_p, va_m, vb_p, vb_m, params.eta_c, params.eta_d, params.eta_e,
        params.lambda_plus, params.lambda_minus, *params.input_noise,
    )


def closed_form_theta(vin_theta, va_plus, vb_plus, theta):
    """Output variance at quadrature angle ``theta`` for the ideal unity-gain teleporter."""
    return vin_theta + 2 * math.cos(theta) ** 2 * va_plus + 2 * math.sin(theta) ** 2 * vb_plus


def quadrature_variance_theta(instance, theta, which="noise"):
    return variance(instance.output, theta, which)


def with_gain(params, lam, minus_ratio=-1.0):
    """Copy of ``params`` with ``lambda_plus = lam`` and ``lambda_minus = minus_ratio * lam``."""
    return replace(params, lambda_plus=float(lam), lambda_minus=float(minus_ratio * lam))
