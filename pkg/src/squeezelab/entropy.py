"""Wehrl and von Neumann entropies, and the low-noise window around ``t*``.

All functions work in natural units (``hbar = m = omega = 1``) and refuse
states with another ``hbar``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Bogoliubov, bogoliubov
from .channels import dp_propagate, privileged_state, two_time_mode
from .errors import NumericalError
from .gaussian import GaussianState, husimi_q
from .model import QdeCoefficients
from .wsolve import WTrajectory, solve_w

__all__ = [
    "GridSpec",
    "HusimiSigma",
    "WindowResult",
    "wehrl_gaussian",
    "wehrl_numeric",
    "wehrl_quadrature",
    "wehrl_dp_closed_form",
    "husimi_sigma",
    "husimi_dp",
    "von_neumann_gaussian",
    "delta_t_formula",
    "nu_abs",
    "nu_second_derivative",
    "scan_window",
    "quartic_prefactor",
]


def _natural(s: GaussianState) -> None:
    if s.hbar != 1.0:
        raise ValueError(f"entropies are evaluated in natural units; got hbar={s.hbar}")


def wehrl_gaussian(s: GaussianState) -> float:
    """``1 + ln(det(S + I/2)) / 2``, the Wehrl entropy of a Gaussian state."""
    _natural(s)
    return 1.0 + 0.5 * math.log(np.linalg.det(s.cov + 0.5 * np.eye(2)))


@dataclass(frozen=True)
class GridSpec:
    """Square quadrature grid in ``(x, p)``, ``half_width`` in units of the Husimi spread."""

    n: int = 401
    half_width: float = 12.0


def wehrl_quadrature(qfunc, center, spread: float, grid: GridSpec = GridSpec(),
                     mass_tol: float = 1e-8) -> float:
    """``-(1/2pi) int Q ln Q dx dp`` for ``qfunc(alpha)`` on a uniform grid.

    ``alpha = (x + ip)/sqrt(2)``; the grid is centred on ``center = (x, p)``.
    Raises :class:`NumericalError` if the grid misses more than ``mass_tol``
    of the distribution.
    """
    if grid.half_width < 6.0:
        raise ValueError("grid must extend at least 6 spreads from the centre")
    L = grid.half_width * spread
    xs = center[0] + np.linspace(-L, L, grid.n)
    ps = center[1] + np.linspace(-L, L, grid.n)
    h = xs[1] - xs[0]
    X, P = np.meshgrid(xs, ps, indexing="ij")
    Q = np.asarray(qfunc((X + 1j * P) / math.sqrt(2.0)), dtype=float)
    if np.any(Q < 0):
        raise NumericalError("negative Husimi values on the grid")
    w = h * h / (2.0 * math.pi)
    mass = Q.sum() * w
    if abs(mass - 1.0) > mass_tol:
        raise NumericalError(f"Husimi mass on grid is {mass!r}; enlarge or refine the grid")
    positive = Q > 0
    return float(-(Q[positive] * np.log(Q[positive])).sum() * w)


def wehrl_numeric(s: GaussianState, grid: GridSpec = GridSpec()) -> float:
    """Wehrl entropy by direct quadrature of the Husimi function."""
    _natural(s)
    spread = math.sqrt(np.linalg.eigvalsh(s.cov + 0.5 * np.eye(2)).max())
    return wehrl_quadrature(lambda a: husimi_q(s, a), s.mean, spread, grid)


def wehrl_dp_closed_form(nu_abs: float, w4: float) -> float:
    """``1 + ln sqrt(1 + |nu|^2 e^{-w4} (2 - e^{-w4}))``."""
    if nu_abs < 0 or w4 < 0:
        raise ValueError("need |nu| >= 0 and w4 >= 0")
    x = math.exp(-w4)
    return 1.0 + 0.5 * math.log1p(nu_abs**2 * x * (2.0 - x))


@dataclass(frozen=True, eq=False)
class HusimiSigma:
    """Covariance of the Husimi function in ``(alpha, alpha*)`` coordinates."""

    matrix: np.ndarray
    mu: complex
    nu: complex
    w4: float
    tau: float


def husimi_sigma(bog: Bogoliubov, w4: float, tau: float) -> HusimiSigma:
    x = math.exp(-w4 * tau)
    mu, nu = complex(bog.mu), complex(bog.nu)
    diag = 1.0 + x * abs(nu) ** 2
    m = np.array([[-mu.conjugate() * nu * x, diag], [diag, -mu * nu.conjugate() * x]])
    return HusimiSigma(m, mu, nu, w4, tau)


def husimi_dp(bog: Bogoliubov, w4: float, tau: float, beta: complex, alpha):
    """Husimi function of the decayed squeezed state, in closed form.

    The initial state is the ``beta`` eigenstate of ``mu a + nu a^+``; it
    decays under ``exp(-(w4 tau / 2){a^+, ., a^+})``.  The mean of ``a`` in
    the initial state is ``conj(mu) beta - nu conj(beta)``.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    bog.check()
    sig = husimi_sigma(bog, w4, tau)
    det = np.linalg.det(sig.matrix)
    if abs(det) < 1e-300:
        raise ValueError("singular Husimi covariance")
    inv = np.linalg.inv(sig.matrix)
    beta = complex(beta)
    a_mean = bog.mu.conjugate() * beta - bog.nu * beta.conjugate()
    shift = a_mean * math.exp(-0.5 * w4 * tau)
    alpha = np.asarray(alpha, dtype=complex)
    z1 = alpha - shift
    z2 = np.conj(z1)
    quad = inv[0, 0] * z1 * z1 + 2.0 * inv[0, 1] * z1 * z2 + inv[1, 1] * z2 * z2
    return np.exp(-0.5 * quad).real / math.sqrt(abs(det))


def von_neumann_gaussian(s: GaussianState) -> float:
    """``-Tr rho ln rho`` from the symplectic eigenvalue ``sqrt(det S)``."""
    _natural(s)
    nu = math.sqrt(s.det)
    if nu - 0.5 < 1e-12:
        return 0.0
    return (nu + 0.5) * math.log(nu + 0.5) - (nu - 0.5) * math.log(nu - 0.5)


def delta_t_formula(epsilon: float, w4_star: float, d2nu: float) -> float:
    """Half-width of the window where ``S_W - 1 <= epsilon``, to quartic order."""
    if not (epsilon > 0 and w4_star > 0 and d2nu > 0):
        raise ValueError("epsilon, w4_star and d2nu must be positive")
    e = math.exp(w4_star)
    return (8.0 * epsilon * e * e / (2.0 * e - 1.0)) ** 0.25 * d2nu**-0.5


def quartic_prefactor(w4_star: float, d2nu: float) -> float:
    """Coefficient of ``(t - t*)^4`` in ``S_W - 1`` near ``t*``."""
    x = math.exp(-w4_star)
    return 0.125 * x * (2.0 - x) * d2nu**2


def nu_abs(coeffs: QdeCoefficients, t_star: float, t: float,
           split_strategy: str = "example_symmetric",
           traj: WTrajectory | None = None) -> float:
    """``|nu(t*, t)|`` of the two-time operator ``A(t*, t)``."""
    return abs(bogoliubov(two_time_mode(coeffs, t_star, t, split_strategy, traj)).nu)


def nu_second_derivative(coeffs: QdeCoefficients, t_star: float,
                         split_strategy: str = "example_symmetric",
                         traj: WTrajectory | None = None, h: float | None = None) -> float:
    """``d^2 |nu| / dt^2`` at ``t*`` by central differences with one Richardson step."""
    h = 1e-3 * t_star if h is None else h
    if traj is None:
        traj = solve_w(coeffs, t_star + 2 * h)
    f = lambda t: nu_abs(coeffs, t_star, t, split_strategy, traj)
    f0 = f(t_star)

    def central(step):
        return (f(t_star + step) - 2.0 * f0 + f(t_star - step)) / step**2

    return (4.0 * central(h) - central(2.0 * h)) / 3.0


@dataclass(frozen=True)
class WindowResult:
    t_lo: float
    t_hi: float
    lo_found: bool
    hi_found: bool

    @property
    def half_width(self) -> float:
        return 0.5 * (self.t_hi - self.t_lo)


def scan_window(coeffs: QdeCoefficients, t_star: float, beta: complex, epsilon: float,
                split_strategy: str = "example_symmetric", horizon: tuple[float, float] | None = None,
                traj: WTrajectory | None = None, n_grid: int = 400,
                xtol: float = 1e-10) -> WindowResult:
    """Largest interval around ``t*`` on which the filtered state has ``S_W - 1 <= epsilon``.

    The filtered trajectory starts from ``|beta>_{C(t*)}``.  Each side is
    stepped outward on a grid until the first crossing, which is then
    bisected.  A side without crossing returns the horizon edge with its
    ``found`` flag cleared.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    lo, hi = horizon if horizon is not None else (coeffs.t_min, 2.0 * t_star)
    if not lo < t_star < hi:
        raise ValueError("horizon must bracket t*")
    if traj is None:
        traj = solve_w(coeffs, hi)
    s0 = privileged_state(coeffs, t_star, beta, split_strategy, traj)

    def excess(t: float) -> float:
        return wehrl_gaussian(dp_propagate(coeffs, s0, t, split_strategy, traj)) - 1.0 - epsilon

    def side(edge: float) -> tuple[float, bool]:
        grid = np.linspace(t_star, edge, n_grid + 1)[1:]
        inner = t_star
        for t in grid:
            if excess(t) > 0:
                a, b = inner, t
                while abs(b - a) > xtol:
                    mid = 0.5 * (a + b)
                    if excess(mid) > 0:
                        b = mid
                    else:
                        a = mid
                return 0.5 * (a + b), True
            inner = t
        return edge, False

    t_lo, lo_found = side(lo)
    t_hi, hi_found = side(hi)
    return WindowResult(t_lo, t_hi, lo_found, hi_found)
