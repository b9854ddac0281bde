"""Generalized lowering operators ``u q + v p`` and their Bogoliubov form.

An operator ``B = u q + v p`` satisfies ``[B, B^+] = 1`` exactly when
``2 hbar Im(conj(u) v) = 1``.  Writing ``a = (q + i p)/sqrt(2 hbar)`` the same
operator is ``mu a + nu a^+`` with ``mu = sqrt(hbar/2)(u - i v)`` and
``nu = sqrt(hbar/2)(u + i v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = [
    "GeneralizedLoweringOp",
    "RSplit",
    "Bogoliubov",
    "standard_lowering",
    "from_bogoliubov",
    "xi_angle",
    "split_r",
    "lowering_b",
    "conjugate_by_flow",
    "bogoliubov",
    "SPLIT_STRATEGIES",
]

COMMUTATOR_TOL = 1e-9

SplitStrategy = Literal["q_filter", "p_filter", "example_symmetric"]
SPLIT_STRATEGIES = ("q_filter", "p_filter", "example_symmetric")


@dataclass(frozen=True)
class GeneralizedLoweringOp:
    """The operator ``u q + v p`` with unit commutator."""

    u: complex
    v: complex
    hbar: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", complex(self.u))
        object.__setattr__(self, "v", complex(self.v))
        err = abs(self.commutator() - 1.0)
        if not err <= COMMUTATOR_TOL:
            raise ValueError(
                f"[B, B^+] = {self.commutator():.12g}, expected 1 (u={self.u}, v={self.v})"
            )

    def commutator(self) -> float:
        return 2.0 * self.hbar * (self.u.conjugate() * self.v).imag

    def __mul__(self, phase: complex) -> "GeneralizedLoweringOp":
        if not math.isclose(abs(phase), 1.0, rel_tol=1e-12):
            raise ValueError("only unit-modulus phases keep the commutator")
        return GeneralizedLoweringOp(self.u * phase, self.v * phase, self.hbar)

    __rmul__ = __mul__

    def coefficients(self) -> np.ndarray:
        return np.array([self.u, self.v])


def standard_lowering(hbar: float = 1.0) -> GeneralizedLoweringOp:
    """``a = (q + i p)/sqrt(2 hbar)``."""
    s = 1.0 / math.sqrt(2.0 * hbar)
    return GeneralizedLoweringOp(s, 1j * s, hbar)


@dataclass(frozen=True)
class RSplit:
    r1: float
    r2: float
    strategy: str


@dataclass(frozen=True)
class Bogoliubov:
    mu: complex
    nu: complex

    def check(self, tol: float = 1e-10) -> None:
        err = abs(abs(self.mu) ** 2 - abs(self.nu) ** 2 - 1.0)
        if err > tol:
            raise ValueError(f"|mu|^2 - |nu|^2 - 1 = {err:.3g}")


def from_bogoliubov(mu: complex, nu: complex, hbar: float = 1.0) -> GeneralizedLoweringOp:
    s = 1.0 / math.sqrt(2.0 * hbar)
    return GeneralizedLoweringOp((mu + nu) * s, 1j * (mu - nu) * s, hbar)


def _unpack(w_point) -> tuple[float, float, float, float]:
    w1, w2, w3, w4 = (float(x) for x in w_point)
    return w1, w2, w3, w4


def xi_angle(w_point, hbar: float = 1.0) -> float:
    """Mixing angle of the lowering operator, in ``[0, pi/2]``.

    ``2 xi`` is the polar angle of ``(-w3, (e^{w4} - 1)/(4 hbar))``, the one
    branch of ``tan 2xi = -(e^{w4} - 1)/(4 hbar w3)`` with ``sin 2xi >= 0``.
    """
    _, _, w3, w4 = _unpack(w_point)
    if not w4 > 0:
        raise ValueError(f"w4 must be positive, got {w4}")
    return 0.5 * math.atan2(math.expm1(w4) / (4.0 * hbar), -w3)


def split_r(w_point, hbar: float = 1.0, strategy: SplitStrategy = "q_filter") -> RSplit:
    """Choose ``r1, r2 >= 0`` with ``(w1 - r1)(w2 - r2) = w3^2 + (e^{w4}-1)^2/(16 hbar^2)``.

    ``q_filter`` sets ``r1 = 0``, ``p_filter`` sets ``r2 = 0`` and
    ``example_symmetric`` (requires ``w3 = 0``) makes both factors equal to
    ``(e^{w4} - 1)/(4 hbar)``.
    """
    w1, w2, w3, w4 = _unpack(w_point)
    excess = math.expm1(w4) / (4.0 * hbar)
    target = w3**2 + excess**2
    disc = w1 * w2 - target
    slack = 1e-12 * (abs(w1 * w2) + target)

    if strategy == "q_filter":
        if not w1 > 0:
            raise ValueError(f"q_filter needs w1 > 0, got {w1}")
        r1, r2 = 0.0, disc / w1
    elif strategy == "p_filter":
        if not w2 > 0:
            raise ValueError(f"p_filter needs w2 > 0, got {w2}")
        r1, r2 = disc / w2, 0.0
    elif strategy == "example_symmetric":
        if abs(w3) > 1e-8:
            raise ValueError(f"example_symmetric split needs w3 = 0, got {w3:.3g}")
        r1, r2 = w1 - excess, w2 - excess
    else:
        raise ValueError(f"unknown split strategy {strategy!r}")

    for name, r in (("r1", r1), ("r2", r2)):
        if r < -slack:
            raise ValueError(f"{strategy} split gives {name} = {r:.3g} < 0: unphysical w-point")
    r1, r2 = max(r1, 0.0), max(r2, 0.0)
    if not (w1 - r1 > 0 and w2 - r2 > 0):
        raise ValueError("split leaves a non-positive factor; w-point is degenerate")
    return RSplit(r1, r2, strategy)


def lowering_b(w_point, split: RSplit, hbar: float = 1.0) -> GeneralizedLoweringOp:
    """Lowering operator whose eigenstates are the pure states of the filtered picture."""
    w1, w2, w3, w4 = _unpack(w_point)
    if not w4 > 0:
        raise ValueError(f"lowering operator is singular for w4 = {w4} <= 0")
    xi = xi_angle(w_point, hbar)
    norm = math.sqrt(2.0 / math.expm1(w4))
    u = norm * np.exp(-1j * xi) * math.sqrt(w1 - split.r1)
    v = norm * np.exp(1j * xi) * math.sqrt(w2 - split.r2)
    return GeneralizedLoweringOp(u, v, hbar)


def conjugate_by_flow(op: GeneralizedLoweringOp, S) -> GeneralizedLoweringOp:
    """Heisenberg-evolve ``op``: with ``U^+ (q, p) U = S (q, p)``, ``U^+ op U`` has ``(u, v) S``.

    ``S`` is a :class:`~squeezelab.channels.SymplecticMatrix` or a 2x2 array.
    """
    S = np.asarray(getattr(S, "matrix", S), dtype=float)
    if S.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {S.shape}")
    det = np.linalg.det(S)
    if abs(det - 1.0) > 1e-10:
        raise ValueError(f"matrix is not symplectic: det = {det!r}")
    u, v = op.coefficients() @ S
    return GeneralizedLoweringOp(u, v, op.hbar)


def bogoliubov(op: GeneralizedLoweringOp) -> Bogoliubov:
    s = math.sqrt(op.hbar / 2.0)
    return Bogoliubov(s * (op.u - 1j * op.v), s * (op.u + 1j * op.v))
