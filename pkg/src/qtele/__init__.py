"""Signal-transfer and conditional-variance characterization of optical teleportation."""

from .circuits import (
    ClassicalTeleporterParams,
    QuantumTeleporterParams,
    TeleporterInstance,
    build_classical,
    build_quantum,
    closed_form_classical,
    closed_form_quantum,
)
from .estimators import ClassicalTeleporter, QuantumTeleporter
from .experiments import (
    OperatingPoints,
    SweepSpec,
    check_amplifier_equivalence,
    find_operating_points,
    loss_threshold_scan,
    run_sweep,
)
from .metrics import (
    ClassicalLimitFlags,
    TVPoint,
    classical_limit_flags,
    coherent_fidelity,
    conditional_variance,
    transfer_coefficient,
    tv_point,
)
from .validation import ParameterError, UndefinedTransferError

__version__ = "0.1.0"

__all__ = [
    "ClassicalLimitFlags",
    "ClassicalTeleporter",
    "ClassicalTeleporterParams",
    "OperatingPoints",
    "ParameterError",
    "QuantumTeleporter",
    "QuantumTeleporterParams",
    "SweepSpec",
    "TVPoint",
    "TeleporterInstance",
    "UndefinedTransferError",
    "build_classical",
    "build_quantum",
    "check_amplifier_equivalence",
    "classical_limit_flags",
    "closed_form_classical",
    "closed_form_quantum",
    "coherent_fidelity",
    "conditional_variance",
    "find_operating_points",
    "loss_threshold_scan",
    "run_sweep",
    "transfer_coefficient",
    "tv_point",
]
