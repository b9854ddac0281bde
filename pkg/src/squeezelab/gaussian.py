"""Single-mode Gaussian states described by first and second moments.

The covariance is symmetrized, ``S_qp = <qp + pq>/2 - <q><p>``.  The vacuum has
``S = (hbar/2) I``; a state is pure iff ``det S = hbar^2 / 4``.  Global phases
are not represented.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .algebra import GeneralizedLoweringOp
from .errors import MixedStateError

__all__ = [
    "GaussianState",
    "QuasiGaussian",
    "vacuum",
    "coherent",
    "thermal",
    "canonical_frame",
    "eigenstate_of",
    "purity",
    "fidelity",
    "wavefunction",
    "husimi_q",
    "apply_parity",
    "apply_translation",
    "random_state",
    "default_rng",
    "STATE_COLUMNS",
]

STATE_COLUMNS = ("hbar", "mq", "mp", "sqq", "sqp", "spp")

_PURE_TOL = 1e-8


def _as_cov(cov) -> np.ndarray:
    cov = np.array(cov, dtype=float)
    if cov.shape != (2, 2):
        raise ValueError(f"covariance must be 2x2, got shape {cov.shape}")
    if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * (1.0 + abs(cov).max()):
        raise ValueError("covariance must be symmetric")
    off = 0.5 * (cov[0, 1] + cov[1, 0])
    cov[0, 1] = cov[1, 0] = off
    return cov


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(2)
        cov = _as_cov(self.cov)
        if not (cov[0, 0] > 0 and cov[1, 1] > 0):
            raise ValueError(f"variances must be positive, got {cov[0, 0]}, {cov[1, 1]}")
        bound = self.hbar**2 / 4.0
        if np.linalg.det(cov) < bound * (1.0 - 1e-10):
            raise ValueError(
                f"det cov = {np.linalg.det(cov):.12g} violates the uncertainty bound {bound}"
            )
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))

    @property
    def dq(self) -> float:
        """Position standard deviation."""
        return math.sqrt(self.cov[0, 0])

    @property
    def dp(self) -> float:
        return math.sqrt(self.cov[1, 1])

    def is_pure(self, tol: float = _PURE_TOL) -> bool:
        return abs(purity(self) - 1.0) <= tol

    def allclose(self, other: "GaussianState", atol: float = 1e-9) -> bool:
        return (self.hbar == other.hbar
                and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
                and np.allclose(self.cov, other.cov, rtol=0, atol=atol))

    def as_row(self) -> tuple[float, ...]:
        return (self.hbar, *self.mean, self.cov[0, 0], self.cov[0, 1], self.cov[1, 1])

    @classmethod
    def from_row(cls, row) -> "GaussianState":
        hbar, mq, mp, sqq, sqp, spp = (float(x) for x in row)
        return cls([mq, mp], [[sqq, sqp], [sqp, spp]], hbar)

    def __repr__(self) -> str:
        m, c = self.mean, self.cov
        return (f"GaussianState(mean=[{m[0]:.6g}, {m[1]:.6g}], "
                f"cov=[[{c[0, 0]:.6g}, {c[0, 1]:.6g}], [{c[1, 0]:.6g}, {c[1, 1]:.6g}]], "
                f"hbar={self.hbar})")


@dataclass(frozen=True, eq=False)
class QuasiGaussian:
    """Moments produced by the impurity filter, which need not describe a state.

    ``exists`` means the covariance is positive definite, so the Gaussian
    Wigner function is normalizable; ``physical`` additionally requires the
    uncertainty bound.
    """

    mean: np.ndarray
    cov: np.ndarray
    hbar: float
    exists: bool
    physical: bool

    @classmethod
    def from_moments(cls, mean, cov, hbar: float) -> "QuasiGaussian":
        mean = np.array(mean, dtype=float).reshape(2)
        cov = _as_cov(cov)
        det = float(np.linalg.det(cov))
        exists = bool(cov[0, 0] > 0 and cov[1, 1] > 0 and det > 0)
        physical = exists and det >= hbar**2 / 4.0 * (1.0 - 1e-10)
        return cls(mean, cov, hbar, exists, physical)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))

    def state(self) -> GaussianState:
        if not (self.exists and self.physical):
            raise ValueError(
                f"moments are not a physical state (exists={self.exists}, "
                f"physical={self.physical}, det={self.det:.6g})"
            )
        return GaussianState(self.mean, self.cov, self.hbar)


def vacuum(hbar: float = 1.0) -> GaussianState:
    return GaussianState([0.0, 0.0], 0.5 * hbar * np.eye(2), hbar)


def coherent(alpha: complex, hbar: float = 1.0) -> GaussianState:
    """Eigenstate of ``a = (q + ip)/sqrt(2 hbar)`` with eigenvalue ``alpha``."""
    alpha = complex(alpha)
    s = math.sqrt(2.0 * hbar)
    return GaussianState([s * alpha.real, s * alpha.imag], 0.5 * hbar * np.eye(2), hbar)


def thermal(nbar: float, hbar: float = 1.0) -> GaussianState:
    return GaussianState([0.0, 0.0], (nbar + 0.5) * hbar * np.eye(2), hbar)


def canonical_frame(op: GeneralizedLoweringOp) -> np.ndarray:
    """Symplectic ``T`` mapping ``(q, p)`` to the quadratures of ``op``.

    With ``(q_B, p_B) = T (q, p)``, ``op = (q_B + i p_B)/sqrt(2 hbar)``.
    """
    s = math.sqrt(2.0 * op.hbar)
    return s * np.array([[op.u.real, op.v.real], [op.u.imag, op.v.imag]])


def eigenstate_of(op: GeneralizedLoweringOp, beta: complex) -> GaussianState:
    """Pure Gaussian state with ``op |psi> = beta |psi>``."""
    beta = complex(beta)
    T = canonical_frame(op)
    Tinv = np.linalg.inv(T)
    s = math.sqrt(2.0 * op.hbar)
    mean = Tinv @ (s * np.array([beta.real, beta.imag]))
    cov = 0.5 * op.hbar * Tinv @ Tinv.T
    return GaussianState(mean, 0.5 * (cov + cov.T), op.hbar)


def purity(s: GaussianState) -> float:
    """``Tr rho^2 = hbar / (2 sqrt(det S))``."""
    return s.hbar / (2.0 * math.sqrt(s.det))


def fidelity(s1: GaussianState, s2: GaussianState) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2``."""
    if s1.hbar != s2.hbar:
        raise ValueError(f"hbar mismatch: {s1.hbar} vs {s2.hbar}")
    hbar = s1.hbar
    v1, v2 = s1.cov / hbar, s2.cov / hbar
    d = (s1.mean - s2.mean) / math.sqrt(hbar)
    vsum = v1 + v2
    delta = np.linalg.det(vsum)
    lam = 4.0 * max(np.linalg.det(v1) - 0.25, 0.0) * max(np.linalg.det(v2) - 0.25, 0.0)
    expo = math.exp(-0.5 * d @ np.linalg.solve(vsum, d))
    return float(min(1.0, expo / (math.sqrt(delta + lam) - math.sqrt(lam))))


def wavefunction(s: GaussianState, x, phase_convention: str = "coherent"):
    """Position-space wavefunction of a pure state (unit mass and frequency).

    ``phase_convention="coherent"`` carries the momentum phase as
    ``exp(i <p> x / hbar)``, which for coherent states reproduces the usual
    textbook form; ``"centered"`` uses ``exp(i <p> (x - <q>) / hbar)``.
    """
    if not s.is_pure():
        raise MixedStateError(f"wavefunction requires a pure state, purity={purity(s):.12g}")
    x = np.asarray(x, dtype=float)
    hbar = s.hbar
    mq, mp = s.mean
    sqq, sqp = s.cov[0, 0], s.cov[0, 1]
    dx = x - mq
    width = 1.0 / (4.0 * sqq) - 1j * sqp / (2.0 * hbar * sqq)
    if phase_convention == "coherent":
        phase = mp * x / hbar
    elif phase_convention == "centered":
        phase = mp * dx / hbar
    else:
        raise ValueError(f"unknown phase convention {phase_convention!r}")
    return (2.0 * math.pi * sqq) ** -0.25 * np.exp(-width * dx**2 + 1j * phase)


def husimi_q(s: GaussianState, alpha):
    """``<alpha|rho|alpha>`` for coherent states of ``a = (q + ip)/sqrt(2)``.

    Natural units only.  As a function of ``(x, p) = sqrt(2)(Re alpha, Im alpha)``
    it is a Gaussian with covariance ``S + I/2`` normalized under
    ``dx dp / 2pi``.
    """
    if s.hbar != 1.0:
        raise ValueError("husimi_q works in natural units (hbar = 1); rescale the state")
    alpha = np.asarray(alpha, dtype=complex)
    V = s.cov + 0.5 * np.eye(2)
    Vinv = np.linalg.inv(V)
    dx = math.sqrt(2.0) * alpha.real - s.mean[0]
    dp = math.sqrt(2.0) * alpha.imag - s.mean[1]
    quad = Vinv[0, 0] * dx**2 + 2.0 * Vinv[0, 1] * dx * dp + Vinv[1, 1] * dp**2
    return np.exp(-0.5 * quad) / math.sqrt(np.linalg.det(V))


def apply_parity(s: GaussianState) -> GaussianState:
    return GaussianState(-s.mean, s.cov, s.hbar)


def apply_translation(s: GaussianState, q0: float, p0: float) -> GaussianState:
    """Shift the phase-space mean by ``(q0, p0)``."""
    return GaussianState(s.mean + np.array([q0, p0], dtype=float), s.cov, s.hbar)


def default_rng(seed: int | None = None) -> np.random.Generator:
    """Random generator seeded from ``SQUEEZELAB_SEED`` unless a seed is given."""
    if seed is None:
        seed = int(os.environ.get("SQUEEZELAB_SEED", "0"))
    return np.random.default_rng(seed)


def random_state(rng: np.random.Generator, hbar: float = 1.0, pure: bool = False,
                 max_squeeze: float = 1.0, max_mean: float = 2.0,
                 max_thermal: float = 2.0) -> GaussianState:
    """Draw a Gaussian state: thermal, then squeezed, rotated and displaced."""
    r = rng.uniform(-max_squeeze, max_squeeze)
    theta = rng.uniform(0.0, math.pi)
    nbar = 0.0 if pure else rng.uniform(0.0, max_thermal)
    c, s_ = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s_], [s_, c]])
    D = np.diag([math.exp(r), math.exp(-r)])
    cov = (nbar + 0.5) * hbar * R @ D @ D @ R.T
    mean = rng.uniform(-max_mean, max_mean, size=2) * math.sqrt(hbar)
    return GaussianState(mean, 0.5 * (cov + cov.T), hbar)
