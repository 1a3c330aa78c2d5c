"""scikit-learn style wrappers around the teleporter circuits.

A fitted teleporter is a channel acting on input-state rows
``(noise_plus, noise_minus, signal_plus, signal_minus)``.  ``transform``
returns the output state in the same four-column layout, so teleporters
compose in a :class:`sklearn.pipeline.Pipeline`.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .circuits import (
    ClassicalTeleporterParams,
    QuantumTeleporterParams,
    build_classical,
    build_quantum,
)
from .metrics import LIMIT_TOL, UNITY_GAIN_TOL, TVPoint, coherent_fidelity
from .quadcore import homodyne
from .validation import INPUT_COLUMNS, UndefinedTransferError, check_input_states

_PROBE_NOISE = (1.0, 1.0)
_PROBE_SIGNAL = (1.0, 1.0)


class _Teleporter(TransformerMixin, BaseEstimator):

    def _params(self):
        raise NotImplementedError

    def _build(self, params):
        raise NotImplementedError

    def fit(self, X=None, y=None):
        """Validate the parameters and tabulate how the input reaches the output.

        ``X`` is optional and only checked for shape.
        """
        if X is not None:
            check_input_states(X)
            self.n_features_in_ = len(INPUT_COLUMNS)
        params = self._params().validate()
        inst = self._build(params)
        src = inst.input.sources[0]

        # weights[q, p]: coefficient of input quadrature p in output quadrature q
        weights = np.zeros((2, 2))
        added = np.zeros(2)
        for q, theta in enumerate((0.0, math.pi / 2)):
            for s, (cp, cm) in homodyne(inst.output, theta).coeffs.items():
                if s is src:
                    weights[q] = (cp, cm)
                else:
                    dp, dm = s.density("noise")
                    added[q] += cp * cp * dp + cm * cm * dm
        self.instance_ = inst
        self.input_weights_ = weights
        self.added_noise_ = added
        return self

    def transform(self, X):
        """Output state rows for each input state row."""
        check_is_fitted(self, "input_weights_")
        X = check_input_states(X)
        w2 = self.input_weights_ ** 2
        noise = X[:, :2] @ w2.T + self.added_noise_
        signal = X[:, 2:] @ w2.T
        return np.hstack([noise, signal])

    def tv_points(self, X):
        """T-V characterization of the channel for each input state row."""
        check_is_fitted(self, "input_weights_")
        X = check_input_states(X)
        out = self.transform(X)
        w = self.input_weights_
        diag_w = np.diag(w)
        unity = np.allclose(w, np.eye(2), rtol=0, atol=UNITY_GAIN_TOL)
        points = []
        for row, orow in zip(X, out):
            n_in, s_in = row[:2], row[2:]
            n_out, s_out = orow[:2], orow[2:]
            if np.any(s_in <= 0):
                raise UndefinedTransferError("every input row needs signal power in both quadratures")
            t = (s_out / n_out) / (s_in / n_in)
            vcv = n_out - diag_w ** 2 * n_in
            fid = None
            if unity and np.all(np.abs(n_in - 1) < LIMIT_TOL):
                fid = coherent_fidelity(n_out[0], n_out[1])
            points.append(
                TVPoint(
                    gain_plus=float(self.lambda_plus),
                    gain_minus=float(self.lambda_minus),
                    t_plus=float(t[0]),
                    t_minus=float(t[1]),
                    t_q=float(t.sum()),
                    vcv_plus=float(vcv[0]),
                    vcv_minus=float(vcv[1]),
                    v_q=float(vcv.mean()),
                    vout_plus=float(n_out[0]),
                    vout_minus=float(n_out[1]),
                    fidelity=fid,
                )
            )
        return points


class ClassicalTeleporter(_Teleporter):
    """Measure-and-prepare teleporter without entanglement.

    Parameters
    ----------
    eta : float
        Transmission of the measurement beamsplitter; ``eta`` of the input
        goes to the amplitude detector.
    lambda_plus, lambda_minus : float
        Feedforward gains of the amplitude and phase channels.
    receiver_vplus, receiver_vminus : float
        Noise variances of the receiver beam.
    """

    def __init__(self, eta=0.5, lambda_plus=1.0, lambda_minus=-1.0,
                 receiver_vplus=1.0, receiver_vminus=1.0):
        self.eta = eta
        self.lambda_plus = lambda_plus
        self.lambda_minus = lambda_minus
        self.receiver_vplus = receiver_vplus
        self.receiver_vminus = receiver_vminus

    def _params(self):
        return ClassicalTeleporterParams(
            eta=self.eta,
            lambda_plus=self.lambda_plus,
            lambda_minus=self.lambda_minus,
            receiver_vplus=self.receiver_vplus,
            receiver_vminus=self.receiver_vminus,
            input_noise=_PROBE_NOISE,
            input_signal=_PROBE_SIGNAL,
        )

    def _build(self, params):
        return build_classical(params)


class QuantumTeleporter(_Teleporter):
    """Teleporter assisted by EPR beams from two squeezed sources.

    Parameters
    ----------
    v_sqz : float
        Amplitude variance of each squeezed beam, in (0, 1].
    lambda_plus, lambda_minus : float
        Feedforward gains; unity gain is ``lambda_plus = -lambda_minus = 1``.
    eta_c, eta_d, eta_e : float
        Efficiencies of the sender's EPR beam, the receiver's EPR beam and
        the sender's detectors.
    va, vb : (float, float) or None
        Optional ``(plus, minus)`` variances replacing the two squeezed beams.
    """

    def __init__(self, v_sqz=0.5, lambda_plus=1.0, lambda_minus=-1.0,
                 eta_c=1.0, eta_d=1.0, eta_e=1.0, va=None, vb=None):
        self.v_sqz = v_sqz
        self.lambda_plus = lambda_plus
        self.lambda_minus = lambda_minus
        self.eta_c = eta_c
        self.eta_d = eta_d
        self.eta_e = eta_e
        self.va = va
        self.vb = vb

    def _params(self):
        return QuantumTeleporterParams(
            v_sqz=self.v_sqz,
            lambda_plus=self.lambda_plus,
            lambda_minus=self.lambda_minus,
            eta_c=self.eta_c,
            eta_d=self.eta_d,
            eta_e=self.eta_e,
            input_noise=_PROBE_NOISE,
            input_signal=_PROBE_SIGNAL,
            va=None if self.va is None else tuple(self.va),
            vb=None if self.vb is None else tuple(self.vb),
        )

    def _build(self, params):
        return build_quantum(params)
