"""Integration of the noise-coefficient system ``w1, w2, w3, w4``.

The propagator of the master equation is fixed by three coefficients obeying

    d/dt (w1, w2, w3) = 2 [[-2 b12, 0, -2 b11],
                           [0, 2 b12, 2 b22],
                           [b22, -b11, 0]] (w1, w2, w3)
                        + e^{w4} (k1, k2, Re k3)

from zero initial data, and by ``w4 = -4 hbar int_0^t Im k3``.  ``w4`` is
carried as a fourth state variable so the ``e^{w4}`` forcing is consistent
inside every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, PhysicalityError
from .model import PhysicalityReport, QdeCoefficients, check_physicality

__all__ = ["WPoint", "WTrajectory", "solve_w", "w_rhs"]

log = logging.getLogger(__name__)


class WPoint(NamedTuple):
    w1: float
    w2: float
    w3: float
    w4: float


def w_rhs(coeffs: QdeCoefficients, t: float, y: np.ndarray) -> np.ndarray:
    w1, w2, w3, w4 = y
    coeffs.check_time(t)
    b11, b12, b22 = coeffs.b11(t), coeffs.b12(t), coeffs.b22(t)
    k3 = complex(coeffs.k3(t))
    forcing = np.exp(w4)
    return np.array([
        2.0 * (-2.0 * b12 * w1 - 2.0 * b11 * w3) + forcing * coeffs.k1(t),
        2.0 * (2.0 * b12 * w2 + 2.0 * b22 * w3) + forcing * coeffs.k2(t),
        2.0 * (b22 * w1 - b11 * w2) + forcing * k3.real,
        -4.0 * coeffs.hbar * k3.imag,
    ])


@dataclass(frozen=True, eq=False)
class WTrajectory:
    """Dense solution of the w-system on ``[t_min, t_end]``.

    ``samples`` holds ``(w1, w2, w3, w4)`` at the accepted step times that lie
    in the queryable range; calling the trajectory evaluates the
    integrator's own continuous extension at any time in range.
    """

    t: np.ndarray
    samples: np.ndarray
    rel_tol: float
    interpolation_order: int
    hbar: float
    physicality: PhysicalityReport
    _solution: object

    @property
    def t_min(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.t_min, self.t_end
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(t_arr < lo - slack) or np.any(t_arr > hi + slack):
            raise ValueError(f"t outside trajectory range [{lo}, {hi}]")
        values = self._solution(np.clip(t_arr, lo, hi))
        return values.T if t_arr.ndim else values

    def point(self, t: float) -> WPoint:
        return WPoint(*map(float, self(float(t))))


def solve_w(coeffs: QdeCoefficients, t_end: float, rel_tol: float = 1e-10,
            strict: bool = False) -> WTrajectory:
    """Integrate the w-system from ``t = 0`` to ``t_end``.

    Uses the Dormand--Prince 8(5,3) embedded pair with its seventh-order
    continuous extension.  Physicality of the sampled solution is checked and
    attached to the trajectory; with ``strict=True`` a violation raises
    :class:`PhysicalityError` instead.
    """
    if not 1e-12 <= rel_tol <= 1e-4:
        raise ValueError(f"rel_tol must lie in [1e-12, 1e-4], got {rel_tol}")
    if not t_end > coeffs.t_min:
        raise ValueError(f"t_end={t_end} must exceed t_min={coeffs.t_min}")
    coeffs.check_time(t_end)

    sol = solve_ivp(
        lambda t, y: w_rhs(coeffs, t, y),
        (0.0, t_end),
        np.zeros(4),
        method="DOP853",
        rtol=rel_tol,
        atol=rel_tol * 1e-3,
        dense_output=True,
    )
    if not sol.success:
        raise NumericalError(f"w-system integration failed: {sol.message}")

    t_steps = sol.t[sol.t > coeffs.t_min]
    t = np.concatenate([[coeffs.t_min], t_steps])
    samples = sol.sol(t).T
    report = check_physicality((t, samples), coeffs.hbar)
    if not report.ok:
        msg = (f"model {coeffs.name!r} is unphysical from t={report.first_violation}")
        if strict:
            raise PhysicalityError(msg)
        log.warning(msg)
    return WTrajectory(t=t, samples=samples, rel_tol=rel_tol, interpolation_order=7,
                       hbar=coeffs.hbar, physicality=report, _solution=sol.sol)
