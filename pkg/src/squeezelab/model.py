"""Coefficient providers for quadratic dissipative master equations.

The generator acting on a density operator is

    drho/dt = [H_s, rho]/(i hbar) - k1 {q,rho,q} - k2 {p,rho,p}
              + k3 {p,rho,q} + k4 {q,rho,p}

with ``H_s = b11 q^2 + b12 (qp + pq) + b22 p^2``, ``k4 = conj(k3)`` and
``{A,rho,B} = B A^+ rho + rho B A^+ - 2 A^+ rho B``.  A provider bundles the six
coefficient functions; only ``k3`` is stored, ``k4`` is derived.

Built-in closed-form providers:

* :func:`make_reference_model` -- harmonic oscillator with exponentially
  growing isotropic noise; ``w1 = w2 = (c/4)(e^{gt} - 1)``, ``w3 = 0``,
  ``w4 = g t``.
* :func:`make_squeezing_model` -- the same noise with a linearly detuned
  Hamiltonian whose Bogoliubov ``|nu(t*, t)|`` has a smooth minimum at ``t*``;
  ``Re k3`` is chosen so that ``w3`` stays identically zero.
* :func:`make_optical_model` -- the rotating-wave optical master equation
  rewritten in the quadrature basis.
* :func:`make_table_model` -- piecewise-linear tables.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "QdeCoefficients",
    "PhysicalityReport",
    "make_reference_model",
    "make_squeezing_model",
    "make_optical_model",
    "make_table_model",
    "load_table_model",
    "check_physicality",
    "physicality_discriminant",
]

RealFn = Callable[[float], float]


def _const(value: float) -> RealFn:
    return lambda t: value


@dataclass(frozen=True)
class QdeCoefficients:
    """Time-dependent coefficients of the master equation.

    ``t_min`` is the earliest time at which the generalized lowering operator
    may be built (it is singular at ``t = 0``); the coefficients themselves
    must be defined on ``[0, t_max]``.
    """

    b11: RealFn
    b12: RealFn
    b22: RealFn
    k1: RealFn
    k2: RealFn
    k3: Callable[[float], complex]
    hbar: float = 1.0
    t_min: float = 1e-3
    t_max: float = math.inf
    name: str = "custom"
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not self.t_min > 0:
            raise ValueError(f"t_min must be positive, got {self.t_min}")

    def k4(self, t: float) -> complex:
        return complex(self.k3(t)).conjugate()

    def check_time(self, t: float) -> None:
        if t < 0 or t > self.t_max:
            raise ValueError(
                f"coefficients of model {self.name!r} are undefined at t={t} "
                f"(domain [0, {self.t_max}])"
            )

    def heisenberg_matrix(self, t: float) -> np.ndarray:
        """Matrix ``M`` with ``d(q, p)/dt = M (q, p)`` under ``H_s(t)``."""
        b11, b12, b22 = self.b11(t), self.b12(t), self.b22(t)
        return 2.0 * np.array([[b12, b22], [-b11, -b12]])

    def dissipation_rate(self, t: float) -> float:
        """``dw4/dt = -4 hbar Im k3``; positive for physical models."""
        return -4.0 * self.hbar * complex(self.k3(t)).imag


@dataclass(frozen=True)
class PhysicalityReport:
    """Per-sample outcome of the four physicality tests."""

    t: np.ndarray
    w1_positive: np.ndarray
    w2_positive: np.ndarray
    discriminant_ok: np.ndarray
    w4_positive: np.ndarray

    @property
    def passed(self) -> np.ndarray:
        return self.w1_positive & self.w2_positive & self.discriminant_ok & self.w4_positive

    @property
    def ok(self) -> bool:
        return bool(np.all(self.passed))

    @property
    def first_violation(self) -> float | None:
        bad = np.flatnonzero(~self.passed)
        return None if bad.size == 0 else float(self.t[bad[0]])

    def __bool__(self) -> bool:
        return self.ok


def physicality_discriminant(w1, w2, w3, w4, hbar: float = 1.0):
    """``w1 w2 - w3^2 - (e^{w4} - 1)^2 / (16 hbar^2)``."""
    return w1 * w2 - w3**2 - np.expm1(w4) ** 2 / (16.0 * hbar**2)


def check_physicality(w, hbar: float = 1.0) -> PhysicalityReport:
    """Test every sample of a w-trajectory against the physicality conditions.

    ``w`` is either a :class:`~squeezelab.wsolve.WTrajectory` or a pair
    ``(t, samples)`` with ``samples`` of shape ``(n, 4)``.  The discriminant
    condition is non-strict; a relative slack of 1e-12 absorbs rounding at
    the boundary.
    """
    if hasattr(w, "samples"):
        t, samples = w.t, w.samples
    else:
        t, samples = w
    t = np.atleast_1d(np.asarray(t, dtype=float))
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise ValueError("empty trajectory")
    w1, w2, w3, w4 = samples.T
    disc = physicality_discriminant(w1, w2, w3, w4, hbar)
    scale = np.abs(w1 * w2) + w3**2 + np.expm1(w4) ** 2 / (16.0 * hbar**2)
    return PhysicalityReport(
        t=t,
        w1_positive=w1 > 0,
        w2_positive=w2 > 0,
        discriminant_ok=disc >= -1e-12 * scale,
        w4_positive=w4 > 0,
    )


def _check_noise(g: float, c: float) -> None:
    if not g > 0:
        raise ValueError(f"noise growth rate g must be positive, got {g}")
    if not c > 1:
        raise ValueError(f"noise excess c must exceed 1, got {c}")


def make_reference_model(omega: float = 1.0, g: float = 1.0, c: float = 2.0,
                         t_min: float = 1e-3) -> QdeCoefficients:
    """Oscillator of frequency ``omega`` with noise ``k1 = k2 = c g / 4``, ``k3 = -i g / 4``."""
    _check_noise(g, c)
    k = c * g / 4.0
    return QdeCoefficients(
        b11=_const(omega / 2.0),
        b12=_const(0.0),
        b22=_const(omega / 2.0),
        k1=_const(k),
        k2=_const(k),
        k3=lambda t: complex(0.0, -g / 4.0),
        hbar=1.0,
        t_min=t_min,
        name="reference",
        params={"omega": omega, "g": g, "c": c},
    )


def make_squeezing_model(omega: float = 1.0, s0: float = 0.5, t_star: float = 1.0,
                         g: float = 1.0, c: float = 2.0,
                         t_min: float | None = None) -> QdeCoefficients:
    """Reference noise plus a detuning ``s0 (t - t*)`` that squeezes away from ``t*``.

    ``b11, b22 = (omega +- s0 (t - t*)) / 2``.  Because ``b11 != b22`` feeds
    ``w3`` through ``2 (b22 w1 - b11 w2)``, ``Re k3`` cancels that source using
    the closed form ``w1 = w2 = (c/4)(e^{gt} - 1)``.
    """
    if not t_star > 0:
        raise ValueError(f"t_star must be positive, got {t_star}")
    _check_noise(g, c)
    k = c * g / 4.0

    def re_k3(t: float) -> float:
        # 2 e^{-w4} w1 s0 (t - t*) with the closed forms inserted
        return 0.5 * c * (-math.expm1(-g * t)) * s0 * (t - t_star)

    return QdeCoefficients(
        b11=lambda t: 0.5 * (omega + s0 * (t - t_star)),
        b12=_const(0.0),
        b22=lambda t: 0.5 * (omega - s0 * (t - t_star)),
        k1=_const(k),
        k2=_const(k),
        k3=lambda t: complex(re_k3(t), -g / 4.0),
        hbar=1.0,
        t_min=1e-3 * t_star if t_min is None else t_min,
        name="squeezing",
        params={"omega": omega, "s0": s0, "t_star": t_star, "g": g, "c": c},
    )


def make_optical_model(gamma: float = 1.0, nbar: float = 0.0,
                       t_min: float = 1e-3) -> QdeCoefficients:
    """Rotating-wave optical master equation in the interaction picture.

    Expanding ``a = (q + i p)/sqrt(2)`` in
    ``-(gamma/2)[(nbar + 1){a+, ., a+} + nbar {a, ., a}]`` gives
    ``k1 = k2 = gamma (2 nbar + 1) / 4`` and ``k3 = -i gamma / 4``.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if nbar < 0:
        raise ValueError(f"nbar must be non-negative, got {nbar}")
    k = gamma * (2.0 * nbar + 1.0) / 4.0
    return QdeCoefficients(
        b11=_const(0.0),
        b12=_const(0.0),
        b22=_const(0.0),
        k1=_const(k),
        k2=_const(k),
        k3=lambda t: complex(0.0, -gamma / 4.0),
        hbar=1.0,
        t_min=t_min,
        name="optical",
        params={"gamma": gamma, "nbar": nbar},
    )


TABLE_COLUMNS = ("t", "b11", "b12", "b22", "k1", "k2", "k3_re", "k3_im")


def make_table_model(t, b11, b12, b22, k1, k2, k3, hbar: float = 1.0,
                     t_min: float = 1e-3) -> QdeCoefficients:
    """Piecewise-linear interpolation of sampled coefficients.

    Times must be strictly increasing and start at 0.  Queries outside the
    table raise rather than extrapolate.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("table needs at least two time samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("table times must be strictly increasing")
    if t[0] != 0.0:
        raise ValueError("table must start at t = 0")
    columns = {name: np.asarray(col, dtype=float)
               for name, col in (("b11", b11), ("b12", b12), ("b22", b22),
                                 ("k1", k1), ("k2", k2))}
    k3 = np.asarray(k3, dtype=complex)
    for name, col in {**columns, "k3": k3}.items():
        if col.shape != t.shape:
            raise ValueError(f"column {name} has shape {col.shape}, expected {t.shape}")
    t_max = float(t[-1])

    def interp(values):
        def fn(s: float):
            if s < 0 or s > t_max:
                raise ValueError(f"table model undefined at t={s} (domain [0, {t_max}])")
            return float(np.interp(s, t, values))
        return fn

    k3_re, k3_im = interp(k3.real), interp(k3.imag)
    return QdeCoefficients(
        b11=interp(columns["b11"]),
        b12=interp(columns["b12"]),
        b22=interp(columns["b22"]),
        k1=interp(columns["k1"]),
        k2=interp(columns["k2"]),
        k3=lambda s: complex(k3_re(s), k3_im(s)),
        hbar=hbar,
        t_min=t_min,
        t_max=t_max,
        name="table",
        params={"rows": float(t.size)},
    )


def load_table_model(path: str | Path, hbar: float = 1.0,
                     t_min: float = 1e-3) -> QdeCoefficients:
    """Read a table model from CSV with header ``t,b11,b12,b22,k1,k2,k3_re,k3_im``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        missing = set(TABLE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"table {path} lacks columns {sorted(missing)}")
        rows = [{k: float(row[k]) for k in TABLE_COLUMNS} for row in reader]
    col = {k: [r[k] for r in rows] for k in TABLE_COLUMNS}
    k3 = np.asarray(col["k3_re"]) + 1j * np.asarray(col["k3_im"])
    return make_table_model(col["t"], col["b11"], col["b12"], col["b22"],
                            col["k1"], col["k2"], k3, hbar=hbar, t_min=t_min)
