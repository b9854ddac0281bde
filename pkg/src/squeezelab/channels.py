"""Gaussian propagators of the master equation and the impurity filter.

The full propagator is never exponentiated directly.  At time ``t`` it is
realized through its factorized form

    rho(t) = F^{-1} exp(-(w4/2){B^+, ., B^+}) U_s rho(0) U_s^+

where ``U_s`` is the Hamiltonian flow, ``B = B(t)`` the generalized lowering
operator and ``F = exp[e^{-w4}(r1 {q,.,q} + r2 {p,.,p})]`` the impurity filter.
Dropping ``F^{-1}`` gives the filtered (deconvolution) picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .algebra import (
    GeneralizedLoweringOp,
    RSplit,
    conjugate_by_flow,
    lowering_b,
    split_r,
)
from .errors import NumericalError, PhysicalityError
from .gaussian import GaussianState, QuasiGaussian, canonical_frame, eigenstate_of
from .model import QdeCoefficients
from .wsolve import WTrajectory, solve_w

__all__ = [
    "SymplecticMatrix",
    "symplectic_flow",
    "apply_symplectic",
    "b_decay",
    "impurity_filter",
    "schrodinger_propagate",
    "dp_propagate",
    "b_operator",
    "c_operator",
    "privileged_state",
    "two_time_mode",
]


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """Action of the Hamiltonian flow from ``t0`` to ``t1`` on quadrature means."""

    matrix: np.ndarray
    t0: float = 0.0
    t1: float = 0.0

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected 2x2 matrix, got {m.shape}")
        det = np.linalg.det(m)
        if abs(det - 1.0) > 1e-10:
            raise ValueError(f"det S = {det!r}, not symplectic")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def inverse(self) -> "SymplecticMatrix":
        (a, b), (c, d) = self.matrix
        return SymplecticMatrix(np.array([[d, -b], [-c, a]]), self.t1, self.t0)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(self.matrix @ other.matrix, other.t0, self.t1)

    @classmethod
    def identity(cls, t: float = 0.0) -> "SymplecticMatrix":
        return cls(np.eye(2), t, t)


def symplectic_flow(coeffs: QdeCoefficients, t0: float, t1: float,
                    rel_tol: float = 1e-12) -> SymplecticMatrix:
    """Integrate ``dS/dt = 2 [[b12, b22], [-b11, -b12]] S`` from ``S(t0) = I`` to ``t1``.

    ``t1 < t0`` integrates backwards, giving the inverse flow.
    """
    if t1 == t0:
        return SymplecticMatrix.identity(t0)
    coeffs.check_time(t0)
    coeffs.check_time(t1)

    def rhs(t, y):
        return (coeffs.heisenberg_matrix(t) @ y.reshape(2, 2)).ravel()

    sol = solve_ivp(rhs, (t0, t1), np.eye(2).ravel(), method="DOP853",
                    rtol=rel_tol, atol=rel_tol * 1e-2)
    if not sol.success:
        raise NumericalError(f"symplectic flow integration failed: {sol.message}")
    S = sol.y[:, -1].reshape(2, 2)
    # remove the O(rel_tol) drift of det S
    S /= math.sqrt(np.linalg.det(S))
    return SymplecticMatrix(S, t0, t1)


def apply_symplectic(S, s: GaussianState) -> GaussianState:
    M = np.asarray(getattr(S, "matrix", S), dtype=float)
    return GaussianState(M @ s.mean, M @ s.cov @ M.T, s.hbar)


def b_decay(s: GaussianState, op: GeneralizedLoweringOp, f: float) -> GaussianState:
    """Apply ``exp(-f {B^+, ., B^+})``: amplitude damping of the ``op`` mode.

    In the quadratures of ``op`` the mean shrinks by ``e^{-f}`` and the
    covariance relaxes towards the ``op`` vacuum,
    ``S_B -> e^{-2f} S_B + (1 - e^{-2f}) (hbar/2) I``.
    """
    if f < 0:
        raise ValueError(f"decay exponent must be non-negative, got {f}")
    if op.hbar != s.hbar:
        raise ValueError("hbar mismatch between state and operator")
    T = canonical_frame(op)
    Tinv = np.linalg.inv(T)
    keep = math.exp(-2.0 * f)
    mean_b = math.exp(-f) * (T @ s.mean)
    cov_b = keep * (T @ s.cov @ T.T) + (-math.expm1(-2.0 * f)) * 0.5 * s.hbar * np.eye(2)
    cov = Tinv @ cov_b @ Tinv.T
    return GaussianState(Tinv @ mean_b, 0.5 * (cov + cov.T), s.hbar)


def filter_shift(split: RSplit, w4: float, hbar: float) -> tuple[float, float]:
    """Variance removed from ``(S_qq, S_pp)`` by the impurity filter.

    ``{p,.,p}`` acts on the position marginal and ``{q,.,q}`` on the
    momentum marginal, so ``r2`` shifts ``S_qq`` and ``r1`` shifts ``S_pp``.
    """
    scale = 2.0 * hbar**2 * math.exp(-w4)
    return scale * split.r2, scale * split.r1


def impurity_filter(s: GaussianState, split: RSplit, w4: float, hbar: float | None = None,
                    direction: str = "deconvolve") -> QuasiGaussian:
    """Apply the impurity filter (``deconvolve``) or its inverse (``convolve``).

    Deconvolution may leave moments that are not a state; this is reported
    through the ``exists`` and ``physical`` flags rather than raised.
    """
    hbar = s.hbar if hbar is None else hbar
    if hbar != s.hbar:
        raise ValueError("hbar mismatch between state and filter")
    dqq, dpp = filter_shift(split, w4, hbar)
    if direction == "deconvolve":
        sign = -1.0
    elif direction == "convolve":
        sign = 1.0
    else:
        raise ValueError(f"direction must be 'deconvolve' or 'convolve', got {direction!r}")
    cov = s.cov + sign * np.diag([dqq, dpp])
    return QuasiGaussian.from_moments(s.mean, cov, hbar)


def _trajectory(coeffs: QdeCoefficients, t: float, traj: WTrajectory | None) -> WTrajectory:
    if traj is None:
        return solve_w(coeffs, t)
    if not traj.t_min <= t <= traj.t_end * (1 + 1e-12):
        raise ValueError(f"t={t} outside trajectory [{traj.t_min}, {traj.t_end}]")
    return traj


def b_operator(traj: WTrajectory, t: float, split_strategy: str = "q_filter"
               ) -> tuple[GeneralizedLoweringOp, RSplit]:
    """``B(t)`` and the split used to build it."""
    w = traj.point(t)
    split = split_r(w, traj.hbar, split_strategy)
    return lowering_b(w, split, traj.hbar), split


def c_operator(coeffs: QdeCoefficients, t_star: float, split_strategy: str = "q_filter",
               traj: WTrajectory | None = None) -> GeneralizedLoweringOp:
    """``C(t*) = U_s^+(t*) B(t*) U_s(t*)``."""
    traj = _trajectory(coeffs, t_star, traj)
    B, _ = b_operator(traj, t_star, split_strategy)
    return conjugate_by_flow(B, symplectic_flow(coeffs, 0.0, t_star))


def privileged_state(coeffs: QdeCoefficients, t_star: float, beta: complex,
                     split_strategy: str = "q_filter",
                     traj: WTrajectory | None = None) -> GaussianState:
    """Initial state ``|beta>_{C(t*)}`` that the filtered dynamics keeps pure at ``t*``."""
    return eigenstate_of(c_operator(coeffs, t_star, split_strategy, traj), beta)


def two_time_mode(coeffs: QdeCoefficients, t_star: float, t: float,
                  split_strategy: str = "example_symmetric",
                  traj: WTrajectory | None = None) -> GeneralizedLoweringOp:
    """Operator ``A(t*, t)`` whose eigenstates are the Hamiltonian-evolved privileged states at ``t``.

    The state ``U_s(t)|beta>_{C(t*)}`` is an eigenstate of ``B(t*)``
    transported back along the flow from ``t`` to ``t*``.
    """
    traj = _trajectory(coeffs, max(t, t_star), traj)
    B, _ = b_operator(traj, t_star, split_strategy)
    return conjugate_by_flow(B, symplectic_flow(coeffs, t, t_star))


def _filtered(coeffs, s0, t, split_strategy, traj):
    if s0.hbar != coeffs.hbar:
        raise ValueError("hbar mismatch between state and model")
    traj = _trajectory(coeffs, t, traj)
    w = traj.point(t)
    unitary = apply_symplectic(symplectic_flow(coeffs, 0.0, t), s0)
    if max(abs(x) for x in w) == 0.0:
        # noiseless dynamics: B(t) is undefined and the propagator is unitary
        return unitary, RSplit(0.0, 0.0, split_strategy), 0.0
    B, split = b_operator(traj, t, split_strategy)
    return b_decay(unitary, B, 0.5 * w.w4), split, w.w4


def dp_propagate(coeffs: QdeCoefficients, s0: GaussianState, t: float,
                 split_strategy: str = "q_filter",
                 traj: WTrajectory | None = None) -> GaussianState:
    """State at ``t`` in the filtered picture: Hamiltonian flow, then ``B(t)`` decay."""
    state, _, _ = _filtered(coeffs, s0, t, split_strategy, traj)
    return state


def schrodinger_propagate(coeffs: QdeCoefficients, s0: GaussianState, t: float,
                          split_strategy: str = "q_filter",
                          traj: WTrajectory | None = None) -> GaussianState:
    """State at ``t`` under the master equation, via the factorized propagator."""
    state, split, w4 = _filtered(coeffs, s0, t, split_strategy, traj)
    out = impurity_filter(state, split, w4, direction="convolve")
    if not out.physical:
        raise PhysicalityError(f"propagated moments are unphysical at t={t}")
    return out.state()
