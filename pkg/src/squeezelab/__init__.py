"""Gaussian-state simulation of quadratic dissipative master equations.

The package propagates single-mode Gaussian states under time-dependent
quadratic dynamics with bilinear noise, builds the impurity filter that
restores purity at a privileged time, and cross-checks every shortcut
against a dense Fock-space integrator.
"""

__version__ = "0.1.0"

from .algebra import GeneralizedLoweringOp, bogoliubov, conjugate_by_flow, lowering_b, split_r
from .channels import (
    b_decay,
    dp_propagate,
    impurity_filter,
    privileged_state,
    schrodinger_propagate,
    symplectic_flow,
)
from .entropy import delta_t_formula, scan_window, wehrl_gaussian
from .errors import ConfigError, MixedStateError, NumericalError, PhysicalityError, SqueezelabError
from .gaussian import GaussianState, QuasiGaussian, coherent, eigenstate_of, fidelity, purity, vacuum
from .model import (
    QdeCoefficients,
    make_optical_model,
    make_reference_model,
    make_squeezing_model,
    make_table_model,
)
from .qubit import cnot_apply, gate, not_circuit, qubit_decode, qubit_encode
from .wsolve import WTrajectory, solve_w

__all__ = [
    "__version__",
    "GeneralizedLoweringOp",
    "GaussianState",
    "QuasiGaussian",
    "QdeCoefficients",
    "WTrajectory",
    "SqueezelabError",
    "ConfigError",
    "PhysicalityError",
    "NumericalError",
    "MixedStateError",
    "make_reference_model",
    "make_squeezing_model",
    "make_optical_model",
    "make_table_model",
    "solve_w",
    "split_r",
    "lowering_b",
    "conjugate_by_flow",
    "bogoliubov",
    "vacuum",
    "coherent",
    "eigenstate_of",
    "purity",
    "fidelity",
    "symplectic_flow",
    "b_decay",
    "impurity_filter",
    "dp_propagate",
    "schrodinger_propagate",
    "privileged_state",
    "wehrl_gaussian",
    "delta_t_formula",
    "scan_window",
    "qubit_encode",
    "qubit_decode",
    "gate",
    "not_circuit",
    "cnot_apply",
]
