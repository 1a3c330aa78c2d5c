"""Linearized quadrature-fluctuation algebra at a single sideband frequency.

Every field is a linear combination of independent noise sources in
Bogoliubov form, ``dA = sum_i (u_i a_i + w_i a_i^dagger)``.  Sources carry
quadrature-diagonal spectral densities normalized so that vacuum is 1 in
each quadrature; quadratures are ``X+ = dA + dA^dagger`` and
``X- = -i (dA - dA^dagger)``.

Photocurrents from homodyne detection are real linear forms over the source
quadratures and can be fed forward onto other fields with :func:`modulate`.
"""

import cmath
import itertools
import math
import threading
from dataclasses import dataclass, field
from types import MappingProxyType

from .validation import ParameterError, check_fraction

SOURCE_KINDS = ("vacuum", "coherent-seed", "squeezed-ancilla", "signal-carrier")
WHICH = ("noise", "signal", "total")

_ids = itertools.count()
_consumed_lock = threading.Lock()
_consumed_vacua = set()


@dataclass(frozen=True, eq=False)
class NoiseSource:
    """An independent underlying mode.

    Instances compare by identity; ``id`` is unique for the process lifetime.
    """

    kind: str
    noise_plus: float = 1.0
    noise_minus: float = 1.0
    signal_plus: float = 0.0
    signal_minus: float = 0.0
    id: int = field(default_factory=lambda: next(_ids))

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ParameterError("kind", f"unknown source kind {self.kind!r}")
        if not (self.noise_plus > 0 and self.noise_minus > 0):
            raise ParameterError(
                "noise", f"variances must be positive, got ({self.noise_plus}, {self.noise_minus})"
            )
        if self.noise_plus * self.noise_minus < 1 - 1e-12:
            raise ParameterError(
                "noise",
                f"noise_plus * noise_minus = {self.noise_plus * self.noise_minus} < 1",
            )
        if self.signal_plus < 0 or self.signal_minus < 0:
            raise ParameterError("signal", "signal powers must be >= 0")

    def density(self, which="noise"):
        """Return the (plus, minus) spectral densities selected by ``which``."""
        if which == "noise":
            return self.noise_plus, self.noise_minus
        if which == "signal":
            return self.signal_plus, self.signal_minus
        if which == "total":
            return self.noise_plus + self.signal_plus, self.noise_minus + self.signal_minus
        raise ValueError(f"which must be one of {WHICH}, got {which!r}")

    def __repr__(self):
        return (
            f"NoiseSource(#{self.id} {self.kind}, noise=({self.noise_plus:g}, {self.noise_minus:g}), "
            f"signal=({self.signal_plus:g}, {self.signal_minus:g}))"
        )


@dataclass(frozen=True)
class FieldState:
    """Fluctuation operator of a field as per-source ``(u, w)`` coefficients."""

    coeffs: MappingProxyType
    carrier_amplitude: float = 0.0

    def __post_init__(self):
        if not isinstance(self.coeffs, MappingProxyType):
            object.__setattr__(self, "coeffs", MappingProxyType(dict(self.coeffs)))

    @property
    def sources(self):
        return tuple(self.coeffs)

    def coefficient(self, source):
        return self.coeffs.get(source, (0j, 0j))


@dataclass(frozen=True)
class PhotocurrentForm:
    """Real linear functional ``I = sum_i (c+_i dX+_i + c-_i dX-_i)``."""

    coeffs: MappingProxyType

    def __post_init__(self):
        if not isinstance(self.coeffs, MappingProxyType):
            object.__setattr__(self, "coeffs", MappingProxyType(dict(self.coeffs)))

    def __add__(self, other):
        if not isinstance(other, PhotocurrentForm):
            return NotImplemented
        out = dict(self.coeffs)
        for src, (cp, cm) in other.coeffs.items():
            p, m = out.get(src, (0.0, 0.0))
            out[src] = (p + cp, m + cm)
        return PhotocurrentForm(out)

    def __mul__(self, scale):
        scale = float(scale)
        return PhotocurrentForm({s: (scale * p, scale * m) for s, (p, m) in self.coeffs.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)


@dataclass(frozen=True)
class QuadratureReport:
    theta: float
    noise_variance: float
    signal_power: float
    total_variance: float
    snr: float


def make_source(kind="vacuum", noise_plus=1.0, noise_minus=1.0, signal_plus=0.0, signal_minus=0.0):
    """Register a new independent source and return it.

    Raises :class:`ParameterError` for non-positive variances, a noise
    product below 1, or negative signal power.
    """
    return NoiseSource(
        kind,
        float(noise_plus),
        float(noise_minus),
        float(signal_plus),
        float(signal_minus),
    )


def vacuum():
    return make_source("vacuum")


def field_of(source, carrier_amplitude=0.0):
    """The field whose fluctuations are exactly those of ``source``."""
    return FieldState({source: (1 + 0j, 0j)}, float(carrier_amplitude))


def _combine(terms, carrier_amplitude):
    # terms: iterable of (complex scale, FieldState)
    out = {}
    for scale, f in terms:
        if scale == 0:
            continue
        for src, (u, w) in f.coeffs.items():
            u0, w0 = out.get(src, (0j, 0j))
            out[src] = (u0 + scale * u, w0 + scale * w)
    return FieldState(out, carrier_amplitude)


def beamsplitter(f1, f2, eta):
    """Mix two fields on a beamsplitter of intensity transmission ``eta``.

    Returns ``(sqrt(eta) f1 + sqrt(1-eta) f2, sqrt(1-eta) f1 - sqrt(eta) f2)``.
    """
    eta = check_fraction(eta, "eta")
    t, r = math.sqrt(eta), math.sqrt(1.0 - eta)
    a1, a2 = f1.carrier_amplitude, f2.carrier_amplitude
    out1 = _combine([(t, f1), (r, f2)], abs(t * a1 + r * a2))
    out2 = _combine([(r, f1), (-t, f2)], abs(r * a1 - t * a2))
    return out1, out2


def phase_shift(f, phi):
    """Rotate a field by ``phi``: the variance at ``theta`` becomes the old one at ``theta - phi``."""
    rot = _rotor(phi)
    return FieldState(
        {s: (rot * u, rot * w) for s, (u, w) in f.coeffs.items()},
        f.carrier_amplitude,
    )


def squeeze_opa(f, H):
    """Degenerate parametric amplification ``a -> sqrt(H) a - sqrt(H-1) a^dagger``.

    ``H = 1`` is the identity; a vacuum input leaves amplitude-squeezed with
    variances ``(sqrt(H) -+ sqrt(H-1))**2``.
    """
    H = float(H)
    if not H >= 1.0:
        raise ParameterError("H", f"parametric gain must be >= 1, got {H!r}")
    g, h = math.sqrt(H), math.sqrt(H - 1.0)
    out = {
        s: (g * u - h * w.conjugate(), g * w - h * u.conjugate())
        for s, (u, w) in f.coeffs.items()
    }
    return FieldState(out, (g - h) * f.carrier_amplitude)


def attenuate(f, eta, fresh_vacuum=None):
    """Pass a field through loss ``1 - eta``, admitting a fresh vacuum mode.

    ``fresh_vacuum`` must be a vacuum source never used before; one is
    created when omitted.
    """
    eta = check_fraction(eta, "eta")
    if fresh_vacuum is None:
        fresh_vacuum = vacuum()
    elif fresh_vacuum.kind != "vacuum":
        raise ParameterError("fresh_vacuum", f"expected a vacuum source, got {fresh_vacuum.kind!r}")
    with _consumed_lock:
        if fresh_vacuum.id in _consumed_vacua or fresh_vacuum in f.coeffs:
            raise ParameterError("fresh_vacuum", f"vacuum source #{fresh_vacuum.id} already used")
        _consumed_vacua.add(fresh_vacuum.id)
    t = math.sqrt(eta)
    return _combine(
        [(t, f), (math.sqrt(1.0 - eta), field_of(fresh_vacuum))],
        t * f.carrier_amplitude,
    )


_QUARTER_TURNS = (1 + 0j, 1j, -1 + 0j, -1j)


def _rotor(phi):
    """``exp(i phi)``, exact at multiples of pi/2."""
    k = phi / (math.pi / 2)
    n = round(k)
    if abs(k - n) < 1e-15:
        return _QUARTER_TURNS[n % 4]
    return cmath.exp(1j * phi)


def _g(u, w, theta):
    return _rotor(-theta) * u + _rotor(theta) * w.conjugate()


def homodyne(f, theta=0.0):
    """Linear form of the quadrature ``dX^theta = e^{-i theta} dA + e^{i theta} dA^dagger``."""
    out = {}
    for src, (u, w) in f.coeffs.items():
        g = _g(u, w, theta)
        out[src] = (g.real, -g.imag)
    return PhotocurrentForm(out)


def modulate(f, current, gain, quadrature="amplitude"):
    """Feed a photocurrent forward onto ``f`` with electronic gain ``gain``.

    The amplitude (phase) quadrature of the result acquires exactly
    ``gain * current``.  ``f`` and the detected field must be distinct
    circuit modes, otherwise the result is not a physical field.
    """
    if quadrature == "amplitude":
        k = 0.5 * gain
    elif quadrature == "phase":
        k = 0.5j * gain
    else:
        raise ValueError(f"quadrature must be 'amplitude' or 'phase', got {quadrature!r}")
    out = dict(f.coeffs)
    if k != 0:
        for src, (cp, cm) in current.coeffs.items():
            u, w = out.get(src, (0j, 0j))
            out[src] = (u + k * complex(cp, -cm), w + k * complex(cp, cm))
    return FieldState(out, f.carrier_amplitude)


def variance(x, theta=0.0, which="noise"):
    """Spectral variance of a field quadrature at ``theta`` or of a photocurrent.

    ``theta`` is ignored for a :class:`PhotocurrentForm`.
    """
    total = 0.0
    if isinstance(x, PhotocurrentForm):
        for src, (cp, cm) in x.coeffs.items():
            dp, dm = src.density(which)
            total += cp * cp * dp + cm * cm * dm
        return total
    for src, (u, w) in x.coeffs.items():
        g = _g(u, w, theta)
        dp, dm = src.density(which)
        total += g.real * g.real * dp + g.imag * g.imag * dm
    return total


def covariance(a, b, which="noise"):
    total = 0.0
    for src, (ap, am) in a.coeffs.items():
        pair = b.coeffs.get(src)
        if pair is None:
            continue
        dp, dm = src.density(which)
        total += ap * pair[0] * dp + am * pair[1] * dm
    return total


def commutator_norm(f):
    """``sum_i |u_i|^2 - |w_i|^2``; 1 for any physical single-mode field."""
    return sum(abs(u) ** 2 - abs(w) ** 2 for u, w in f.coeffs.values())


def quadrature_report(f, theta=0.0):
    noise = variance(f, theta, "noise")
    signal = variance(f, theta, "signal")
    snr = signal / noise if noise > 0 else math.nan
    return QuadratureReport(theta, noise, signal, noise + signal, snr)
