"""A qubit carried by the first moments of one squeezed state.

For a state with position spread ``dq`` and momentum spread ``dp`` (standard
deviations) the qubit angles are

    theta = <q> / (sqrt(2) dq),    phi = <p> / dp  (mod 2 pi)

and a measurement of the projector onto ``q > 0`` returns 1 with probability
``erfc(-theta)/2``.  Parity acts as X, a momentum kick of ``pi dp`` as Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .algebra import GeneralizedLoweringOp
from .channels import (
    apply_symplectic,
    b_operator,
    impurity_filter,
    schrodinger_propagate,
    symplectic_flow,
)
from .entropy import wehrl_gaussian
from .errors import MixedStateError, PhysicalityError
from .gaussian import (
    GaussianState,
    apply_parity,
    apply_translation,
    canonical_frame,
    eigenstate_of,
    fidelity,
    purity,
    wavefunction,
)
from .model import QdeCoefficients
from .wsolve import WTrajectory, solve_w

__all__ = [
    "QubitCoords",
    "TwoModeGrid",
    "CnotGrid",
    "qubit_encode",
    "qubit_decode",
    "measure_p1",
    "gate",
    "rescale_amplitude",
    "not_circuit",
    "not_target",
    "filter_at",
    "cnot_apply",
    "secure_transcript",
    "TRANSCRIPT_COLUMNS",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QubitCoords:
    theta: float
    phi: float

    @property
    def a(self) -> float:
        return math.sqrt(0.5 * erfc(self.theta))

    @property
    def b(self) -> complex:
        return complex(np.exp(1j * self.phi)) * math.sqrt(0.5 * erfc(-self.theta))

    @property
    def probabilities(self) -> tuple[float, float]:
        return 0.5 * erfc(self.theta), 0.5 * erfc(-self.theta)


def qubit_encode(theta: float, phi: float, dq: float, dp: float, sigma_qp: float = 0.0,
                 hbar: float = 1.0) -> GaussianState:
    """Squeezed state with spreads ``dq, dp`` whose moments carry ``(theta, phi)``."""
    if not (dq > 0 and dp > 0):
        raise ValueError("spreads must be positive")
    det = dq**2 * dp**2 - sigma_qp**2
    if abs(det / (hbar**2 / 4.0) - 1.0) > 1e-10:
        raise MixedStateError(f"covariance with det {det!r} is not pure (need {hbar**2 / 4})")
    mean = [math.sqrt(2.0) * dq * theta, dp * phi]
    return GaussianState(mean, [[dq**2, sigma_qp], [sigma_qp, dp**2]], hbar)


def qubit_decode(s: GaussianState, strict: bool = True) -> QubitCoords:
    """Read ``(theta, phi)`` off a pure state; mixed states raise unless ``strict=False``."""
    if strict and not s.is_pure():
        raise MixedStateError(f"qubit decoding needs a pure state (purity {purity(s):.12g})")
    theta = s.mean[0] / (math.sqrt(2.0) * s.dq)
    phi = math.fmod(s.mean[1] / s.dp, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    return QubitCoords(float(theta), float(phi))


def measure_p1(s: GaussianState) -> tuple[float, float]:
    """Probabilities of outcomes 0 and 1 for the projector onto ``q > 0``."""
    p1 = 0.5 * erfc(-s.mean[0] / math.sqrt(2.0 * s.cov[0, 0]))
    return 1.0 - p1, float(p1)


def gate(s: GaussianState, which: str) -> GaussianState:
    """Single-qubit X, Y or Z, using the state's own momentum spread for Z."""
    if which == "X":
        return apply_parity(s)
    if which == "Z":
        return apply_translation(s, 0.0, math.pi * s.dp)
    if which == "Y":
        return gate(gate(s, "X"), "Z")
    raise ValueError(f"unknown gate {which!r}")


def rescale_amplitude(s: GaussianState, op: GeneralizedLoweringOp, factor: float) -> GaussianState:
    """Multiply ``<op>`` by ``factor``, leaving the covariance untouched."""
    T = canonical_frame(op)
    return GaussianState(np.linalg.solve(T, factor * (T @ s.mean)), s.cov, s.hbar)


def _traj(coeffs, t_end, traj):
    return solve_w(coeffs, t_end) if traj is None else traj


def filter_at(coeffs: QdeCoefficients, s0: GaussianState, t: float,
              split_strategy: str = "example_symmetric", traj: WTrajectory | None = None):
    """Run the master equation to ``t`` and apply the impurity filter built for ``t``."""
    traj = _traj(coeffs, t, traj)
    rho_t = schrodinger_propagate(coeffs, s0, t, split_strategy, traj)
    _, split = b_operator(traj, t, split_strategy)
    return impurity_filter(rho_t, split, traj.point(t).w4, direction="deconvolve")


def not_target(coeffs: QdeCoefficients, beta: complex, t_star: float,
               split_strategy: str = "example_symmetric",
               traj: WTrajectory | None = None) -> GaussianState:
    """``|-beta e^{-w4(t*)/2}>_{B(t*)}``, the ideal NOT-circuit output."""
    traj = _traj(coeffs, t_star, traj)
    B, _ = b_operator(traj, t_star, split_strategy)
    return eigenstate_of(B, -complex(beta) * math.exp(-0.5 * traj.point(t_star).w4))


def _primed(coeffs, beta, t_star, split_strategy, traj):
    B, _ = b_operator(traj, t_star, split_strategy)
    return apply_symplectic(symplectic_flow(coeffs, t_star, 0.0), eigenstate_of(B, beta))


def not_circuit(coeffs: QdeCoefficients, beta: complex, t_star: float,
                split_strategy: str = "example_symmetric",
                traj: WTrajectory | None = None, filter_time: float | None = None
                ) -> GaussianState:
    """NOT gate on a qubit exposed to the master equation.

    Prime ``|beta>_{B(t*)}`` with the inverse Hamiltonian flow, evolve to
    ``t*``, apply the impurity filter and then parity.  ``filter_time``
    replaces ``t*`` for the evolution and filter, which is what an
    eavesdropper ignorant of ``t*`` would do.
    """
    t_f = t_star if filter_time is None else filter_time
    traj = _traj(coeffs, max(t_star, t_f), traj)
    primed = _primed(coeffs, beta, t_star, split_strategy, traj)
    filtered = filter_at(coeffs, primed, t_f, split_strategy, traj)
    if not (filtered.exists and filtered.physical):
        raise PhysicalityError(f"impurity filter output is not a state at t={t_f}")
    return apply_parity(filtered.state())


@dataclass(frozen=True)
class CnotGrid:
    """Cell-centred grid; ``half_width`` counts standard deviations beyond the means."""

    n: int = 512
    half_width: float = 8.0


@dataclass(frozen=True, eq=False)
class TwoModeGrid:
    q1: np.ndarray
    q2: np.ndarray
    psi: np.ndarray

    @property
    def spacing(self) -> tuple[float, float]:
        return float(self.q1[1] - self.q1[0]), float(self.q2[1] - self.q2[0])

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    @property
    def norm(self) -> float:
        h1, h2 = self.spacing
        return float(self.density.sum() * h1 * h2)

    def joint_probs(self) -> np.ndarray:
        """``P(control = i, target = j)`` with outcome 1 meaning positive position."""
        h1, h2 = self.spacing
        rho = self.density * h1 * h2
        c = [self.q1 < 0, self.q1 > 0]
        t = [self.q2 < 0, self.q2 > 0]
        return np.array([[rho[np.ix_(c[i], t[j])].sum() for j in (0, 1)] for i in (0, 1)])

    @property
    def control_probs(self) -> np.ndarray:
        return self.joint_probs().sum(axis=1)


def _axis(center: float, sigma: float, reach: float, grid: CnotGrid) -> np.ndarray:
    L = reach + grid.half_width * sigma
    h = 2.0 * L / grid.n
    return center - L + h * (np.arange(grid.n) + 0.5)


def cnot_apply(beta: complex, op: GeneralizedLoweringOp, grid: CnotGrid = CnotGrid()
               ) -> tuple[TwoModeGrid, np.ndarray]:
    """Apply ``P0 x 1 + P1 x Parity`` to ``|0>_B x |beta>_B`` on a position grid.

    Returns the output wavefunction and the table of conditional outcome
    probabilities, row ``i`` being ``P(target | control = i)``.
    """
    if grid.half_width < 6.0:
        raise ValueError("grid must cover at least 6 standard deviations")
    control = eigenstate_of(op, 0.0)
    plus, minus = eigenstate_of(op, beta), eigenstate_of(op, -complex(beta))
    q1 = _axis(0.0, control.dq, 0.0, grid)
    q2 = _axis(0.0, plus.dq, abs(plus.mean[0]), grid)
    psi_c = wavefunction(control, q1)
    psi_t = np.where((q1 < 0)[:, None], wavefunction(plus, q2)[None, :],
                     wavefunction(minus, q2)[None, :])
    out = TwoModeGrid(q1, q2, psi_c[:, None] * psi_t)
    joint = out.joint_probs()
    table = joint / joint.sum(axis=1, keepdims=True)
    return out, table


TRANSCRIPT_COLUMNS = ("filter_time", "role", "purity", "wehrl", "theta", "phi",
                      "theta_err", "phi_err", "fidelity_to_target")


def _angle_diff(a: float, b: float) -> float:
    d = math.fmod(a - b, TWO_PI)
    if d > math.pi:
        d -= TWO_PI
    elif d < -math.pi:
        d += TWO_PI
    return d


def secure_transcript(coeffs: QdeCoefficients, t_star: float, beta: complex,
                      eavesdrop_times: Sequence[float],
                      split_strategy: str = "example_symmetric",
                      traj: WTrajectory | None = None) -> list[dict]:
    """Receiver at ``t*`` versus eavesdroppers filtering at other times.

    Every party evolves the sender's state ``|beta>_{C(t*)}``, applies the
    impurity filter built for its own time, undoes the known amplitude decay
    ``e^{-w4/2}`` in its own B-frame and decodes the qubit.
    """
    times = [float(t) for t in eavesdrop_times]
    if not times:
        raise ValueError("need at least one eavesdrop time")
    if any(math.isclose(t, t_star, rel_tol=0, abs_tol=1e-12) for t in times):
        raise ValueError("eavesdrop times must differ from t*")
    traj = _traj(coeffs, max([t_star, *times]), traj)
    B_star, _ = b_operator(traj, t_star, split_strategy)
    intended = qubit_decode(eigenstate_of(B_star, beta))
    target = eigenstate_of(B_star, complex(beta) * math.exp(-0.5 * traj.point(t_star).w4))
    sender = apply_symplectic(symplectic_flow(coeffs, t_star, 0.0), eigenstate_of(B_star, beta))

    rows = []
    for t in sorted([t_star, *times]):
        filtered = filter_at(coeffs, sender, t, split_strategy, traj)
        row = {"filter_time": t, "role": "receiver" if t == t_star else "eavesdropper"}
        if not (filtered.exists and filtered.physical):
            row.update(purity=float("nan"), wehrl=float("nan"), theta=float("nan"),
                       phi=float("nan"), theta_err=float("nan"), phi_err=float("nan"),
                       fidelity_to_target=0.0)
            rows.append(row)
            continue
        state = filtered.state()
        B_t, _ = b_operator(traj, t, split_strategy)
        restored = rescale_amplitude(state, B_t, math.exp(0.5 * traj.point(t).w4))
        coords = qubit_decode(restored, strict=False)
        row.update(
            purity=purity(state),
            wehrl=wehrl_gaussian(state) if state.hbar == 1.0 else float("nan"),
            theta=coords.theta,
            phi=coords.phi,
            theta_err=coords.theta - intended.theta,
            phi_err=_angle_diff(coords.phi, intended.phi),
            fidelity_to_target=fidelity(state, target),
        )
        rows.append(row)
    return rows
