"""Signal transfer, conditional variance and fidelity between input and output fields."""

import math
from dataclasses import asdict, dataclass

from .quadcore import covariance, homodyne, variance
from .validation import ParameterError, UndefinedTransferError

AMPLITUDE = 0.0
PHASE = math.pi / 2

LIMIT_TOL = 1e-12
UNITY_GAIN_TOL = 1e-9


@dataclass(frozen=True)
class TVPoint:
    """One evaluated operating condition on the T-V diagram."""

    gain_plus: float
    gain_minus: float
    t_plus: float
    t_minus: float
    t_q: float
    vcv_plus: float
    vcv_minus: float
    v_q: float
    vout_plus: float
    vout_minus: float
    fidelity: float | None = None

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ClassicalLimitFlags:
    breaks_tq: bool
    breaks_vq: bool

    @property
    def quantum_quadrant(self):
        return self.breaks_tq and self.breaks_vq


def transfer_coefficient(input, output, theta=AMPLITUDE):
    """Ratio of output to input signal-to-noise ratio at quadrature ``theta``.

    Raises :class:`UndefinedTransferError` when the input carries no signal
    at ``theta``.
    """
    s_in = variance(input, theta, "signal")
    if s_in <= 0:
        raise UndefinedTransferError(f"input carries no signal power at theta={theta!r}")
    n_in = variance(input, theta, "noise")
    s_out = variance(output, theta, "signal")
    if s_out == 0:
        return 0.0
    n_out = variance(output, theta, "noise")
    return (s_out / n_out) / (s_in / n_in)


def mean_gain(input, output, theta=AMPLITUDE):
    """Regression coefficient of the output quadrature on the input quadrature."""
    a, b = homodyne(input, theta), homodyne(output, theta)
    v_in = variance(a)
    if v_in <= 0:
        raise ValueError(f"degenerate input variance {v_in!r} at theta={theta!r}")
    return covariance(a, b) / v_in


def conditional_variance(input, output, theta=AMPLITUDE):
    """Output noise left unexplained by the input quadrature: ``V_out - cov^2 / V_in``."""
    a, b = homodyne(input, theta), homodyne(output, theta)
    v_in = variance(a)
    if v_in <= 0:
        raise ValueError(f"degenerate input variance {v_in!r} at theta={theta!r}")
    c = covariance(a, b)
    return variance(b) - c * c / v_in


def tv_point(input, output, gains=(0.0, 0.0)):
    t_plus = transfer_coefficient(input, output, AMPLITUDE)
    t_minus = transfer_coefficient(input, output, PHASE)
    vcv_plus = conditional_variance(input, output, AMPLITUDE)
    vcv_minus = conditional_variance(input, output, PHASE)
    vout_plus = variance(output, AMPLITUDE)
    vout_minus = variance(output, PHASE)

    fidelity = None
    coherent_in = (
        abs(variance(input, AMPLITUDE) - 1) < LIMIT_TOL and abs(variance(input, PHASE) - 1) < LIMIT_TOL
    )
    if coherent_in:
        g_plus = mean_gain(input, output, AMPLITUDE)
        g_minus = mean_gain(input, output, PHASE)
        if abs(g_plus - 1) < UNITY_GAIN_TOL and abs(g_minus - 1) < UNITY_GAIN_TOL:
            fidelity = coherent_fidelity(vout_plus, vout_minus)

    return TVPoint(
        gain_plus=float(gains[0]),
        gain_minus=float(gains[1]),
        t_plus=t_plus,
        t_minus=t_minus,
        t_q=t_plus + t_minus,
        vcv_plus=vcv_plus,
        vcv_minus=vcv_minus,
        v_q=0.5 * (vcv_plus + vcv_minus),
        vout_plus=vout_plus,
        vout_minus=vout_minus,
        fidelity=fidelity,
    )


def classical_limit_flags(p, input_min_uncertainty=True):
    """Which classical limits a T-V point breaks.

    ``T_q > 1`` only signals a quantum channel for minimum-uncertainty
    inputs, so ``breaks_tq`` is always False otherwise.  Points on a
    boundary count as classical.
    """
    breaks_tq = bool(input_min_uncertainty and p.t_q > 1 + LIMIT_TOL)
    breaks_vq = bool(p.v_q < 1 - LIMIT_TOL)
    return ClassicalLimitFlags(breaks_tq, breaks_vq)


def coherent_fidelity(vout_plus, vout_minus, mean_gain=1.0, alpha_plus=0.0, alpha_minus=0.0):
    """Overlap of a coherent state with a Gaussian output state.

    The coherent input has quadrature means ``2 * alpha`` and unit
    variances; the output has means ``2 * mean_gain * alpha`` and variances
    ``vout_plus``, ``vout_minus``.
    """
    if not (vout_plus > 0 and vout_minus > 0):
        raise ParameterError("vout", f"variances must be positive, got ({vout_plus}, {vout_minus})")
    if vout_plus * vout_minus < 1 - LIMIT_TOL:
        raise ParameterError("vout", f"vout_plus * vout_minus = {vout_plus * vout_minus} < 1")
    sp, sm = 1.0 + vout_plus, 1.0 + vout_minus
    dp = (1.0 - mean_gain) * 2.0 * alpha_plus / math.sqrt(2.0)
    dm = (1.0 - mean_gain) * 2.0 * alpha_minus / math.sqrt(2.0)
    return 2.0 / math.sqrt(sp * sm) * math.exp(-dp * dp / sp - dm * dm / sm)
