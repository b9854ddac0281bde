"""Brute-force truncated-Fock oracle for the master equation.

Everything here works with dense ``N x N`` matrices and shares no code path
with the Gaussian moment calculus, so it can adjudicate it.  The dissipator
is assembled from products of the truncated ``q`` and ``p`` matrices, which
keeps the generator exactly trace-free by cyclicity; the Hamiltonian uses the
exact quadratic forms in ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm, sqrtm

from .algebra import GeneralizedLoweringOp, bogoliubov
from .errors import NumericalError
from .gaussian import GaussianState
from .model import QdeCoefficients

__all__ = [
    "FockDensityMatrix",
    "lowering",
    "quadratures",
    "bracket",
    "build_generator",
    "optical_generator",
    "integrate_master",
    "integrate_ket",
    "moments",
    "purity_fock",
    "gaussian_ket",
    "gaussian_to_fock",
    "wdp_fock",
    "fidelity_fock",
    "husimi_fock",
    "von_neumann_fock",
    "operator_matrix",
]

MAX_N = 200


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    data: np.ndarray
    hbar: float = 1.0
    flags: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.data.shape[0]

    def diagnostics(self) -> dict:
        rho = self.data
        return {
            "hermiticity": float(np.abs(rho - rho.conj().T).max()),
            "trace_error": float(abs(np.trace(rho) - 1.0)),
            "min_eigenvalue": float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()),
        }

    def check(self) -> dict:
        d = self.diagnostics()
        d["ok"] = (d["hermiticity"] <= 1e-10 and d["trace_error"] <= 1e-8
                   and d["min_eigenvalue"] >= -1e-6)
        return d


def _check_n(N: int) -> None:
    if not 2 <= N <= MAX_N:
        raise ValueError(f"truncation N={N} outside [2, {MAX_N}]")


def lowering(N: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)


def quadratures(N: int, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    a = lowering(N)
    s = math.sqrt(hbar / 2.0)
    return s * (a + a.conj().T), -1j * s * (a - a.conj().T)


def _quadratic_forms(N: int, hbar: float):
    """Exact truncations of ``q^2``, ``p^2`` and ``(qp + pq)/2``."""
    a = lowering(N)
    a2 = a @ a
    n = np.diag(np.arange(N, dtype=float))
    eye = np.eye(N)
    s = hbar / 2.0
    qq = s * (a2 + a2.conj().T + 2 * n + eye)
    pp = s * (-a2 - a2.conj().T + 2 * n + eye)
    sym = -1j * s * (a2 - a2.conj().T)
    return qq, pp, sym


def operator_matrix(op: GeneralizedLoweringOp, N: int) -> np.ndarray:
    q, p = quadratures(N, op.hbar)
    return op.u * q + op.v * p


def bracket(A: np.ndarray, rho: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``{A, rho, B} = B A^+ rho + rho B A^+ - 2 A^+ rho B``."""
    Ad = A.conj().T
    BA = B @ Ad
    return BA @ rho + rho @ BA - 2.0 * Ad @ rho @ B


def build_generator(coeffs: QdeCoefficients, t: float, N: int
                    ) -> Callable[[np.ndarray], np.ndarray]:
    """``rho -> drho/dt`` of the master equation at time ``t`` on ``N`` levels."""
    _check_n(N)
    return _Generator(coeffs, N)(t)


class _Generator:
    """Operators precomputed once per truncation; coefficients bound per time."""

    def __init__(self, coeffs: QdeCoefficients, N: int):
        self.coeffs = coeffs
        hbar = coeffs.hbar
        self.q, self.p = quadratures(N, hbar)
        self.qq, self.pp = self.q @ self.q, self.p @ self.p
        self.qp, self.pq = self.q @ self.p, self.p @ self.q
        self.h_qq, self.h_pp, self.h_sym = _quadratic_forms(N, hbar)

    def __call__(self, t: float):
        c = self.coeffs
        c.check_time(t)
        hbar = c.hbar
        H = c.b11(t) * self.h_qq + 2.0 * c.b12(t) * self.h_sym + c.b22(t) * self.h_pp
        k1, k2, k3 = c.k1(t), c.k2(t), complex(c.k3(t))
        k4 = k3.conjugate()
        # B A^+ parts of the four brackets collected into one Hermitian operator
        L = -k1 * self.qq - k2 * self.pp + k3 * self.qp + k4 * self.pq
        q, p = self.q, self.p

        def generator(rho: np.ndarray) -> np.ndarray:
            sandwich = (-k1 * (q @ rho @ q) - k2 * (p @ rho @ p)
                        + k3 * (p @ rho @ q) + k4 * (q @ rho @ p))
            return ((H @ rho - rho @ H) / (1j * hbar)
                    + L @ rho + rho @ L - 2.0 * sandwich)

        return generator


def optical_generator(gamma: float, nbar: float, N: int) -> Callable[[np.ndarray], np.ndarray]:
    """Rotating-wave optical generator written with ladder operators."""
    a = lowering(N)
    ad = a.conj().T
    return lambda rho: -0.5 * gamma * ((nbar + 1.0) * bracket(ad, rho, ad)
                                       + nbar * bracket(a, rho, a))


def integrate_master(rho0, coeffs: QdeCoefficients, t_end: float, dt: float = 1e-3,
                     N: int | None = None, t0: float = 0.0,
                     strict: bool = True) -> FockDensityMatrix:
    """Fixed-step RK4 integration of the master equation from ``t0`` to ``t_end``.

    No renormalization is applied.  Positivity is monitored; a minimum
    eigenvalue below -1e-6 raises :class:`NumericalError` when ``strict``.
    """
    rho = np.array(getattr(rho0, "data", rho0), dtype=complex)
    N = rho.shape[0] if N is None else N
    if rho.shape != (N, N):
        raise ValueError(f"rho0 has shape {rho.shape}, expected ({N}, {N})")
    _check_n(N)
    steps = int(round((t_end - t0) / dt))
    if steps < 0 or not math.isclose(steps * dt, t_end - t0, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"dt={dt} does not divide [{t0}, {t_end}]")
    gen = _Generator(coeffs, N)
    t = t0
    for _ in range(steps):
        k1 = gen(t)(rho)
        mid = gen(t + 0.5 * dt)
        k2 = mid(rho + 0.5 * dt * k1)
        k3 = mid(rho + 0.5 * dt * k2)
        k4 = gen(t + dt)(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    out = FockDensityMatrix(rho, coeffs.hbar)
    diag = out.check()
    out.flags.update(diag, steps=steps, dt=dt, N=N)
    if strict and not diag["ok"]:
        raise NumericalError(f"oracle invariants breached: {diag}")
    return out


def integrate_ket(psi0: np.ndarray, coeffs: QdeCoefficients, t0: float, t1: float,
                  dt: float = 1e-3) -> np.ndarray:
    """RK4 for ``i hbar dpsi/dt = H_s(t) psi`` (Hamiltonian part only)."""
    psi = np.array(psi0, dtype=complex)
    N = psi.shape[0]
    qq, pp, sym = _quadratic_forms(N, coeffs.hbar)
    steps = int(round(abs(t1 - t0) / dt))
    if steps == 0:
        return psi
    h = (t1 - t0) / steps

    def f(t, y):
        H = coeffs.b11(t) * qq + 2.0 * coeffs.b12(t) * sym + coeffs.b22(t) * pp
        return (H @ y) / (1j * coeffs.hbar)

    t = t0
    for _ in range(steps):
        k1 = f(t, psi)
        k2 = f(t + h / 2, psi + h / 2 * k1)
        k3 = f(t + h / 2, psi + h / 2 * k2)
        k4 = f(t + h, psi + h * k3)
        psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return psi


def moments(rho, hbar: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Means and symmetrized covariance of ``q, p``."""
    if isinstance(rho, FockDensityMatrix):
        hbar = rho.hbar if hbar is None else hbar
        rho = rho.data
    hbar = 1.0 if hbar is None else hbar
    N = rho.shape[0]
    q, p = quadratures(N, hbar)
    qq, pp, sym = _quadratic_forms(N, hbar)
    ev = lambda X: np.trace(X @ rho).real
    mq, mp = ev(q), ev(p)
    cov = np.array([[ev(qq) - mq**2, ev(sym) - mq * mp],
                    [ev(sym) - mq * mp, ev(pp) - mp**2]])
    return np.array([mq, mp]), cov


def purity_fock(rho) -> float:
    rho = getattr(rho, "data", rho)
    return float(np.trace(rho @ rho).real)


def _bogoliubov_ket(mu: complex, nu: complex, beta: complex, M: int) -> np.ndarray:
    """Amplitudes of ``(mu a + nu a^+)|psi> = beta |psi>`` from the three-term recursion."""
    c = np.zeros(M, dtype=complex)
    c[0] = 1.0
    if M > 1:
        c[1] = beta * c[0] / mu
    for n in range(1, M - 1):
        c[n + 1] = (beta * c[n] - nu * math.sqrt(n) * c[n - 1]) / (mu * math.sqrt(n + 1))
    return c


def gaussian_ket(s: GaussianState, N: int, mass_tol: float = 1e-6) -> np.ndarray:
    """Fock amplitudes of a pure Gaussian state, up to a global phase.

    The state is written as the eigenstate of ``mu a + nu a^+`` and the
    amplitudes follow the squeezed-state recursion.
    """
    _check_n(N)
    if not s.is_pure():
        raise ValueError("gaussian_ket needs a pure state")
    hbar = s.hbar
    # lowering operator whose vacuum has the state's covariance
    P = s.cov / (0.5 * hbar)
    w, V = np.linalg.eigh(P)
    T = V @ np.diag(w**-0.5) @ V.T
    sc = 1.0 / math.sqrt(2.0 * hbar)
    op = GeneralizedLoweringOp(sc * complex(T[0, 0], T[1, 0]), sc * complex(T[0, 1], T[1, 1]), hbar)
    beta = op.u * s.mean[0] + op.v * s.mean[1]
    bog = bogoliubov(op)
    M = max(4 * N, N + 200)
    c = _bogoliubov_ket(bog.mu, bog.nu, beta, M)
    total = np.vdot(c, c).real
    head = c[:N]
    deficit = 1.0 - np.vdot(head, head).real / total
    if deficit > mass_tol:
        raise ValueError(f"truncation N={N} loses {deficit:.2e} of the state's mass")
    return head / math.sqrt(total)


def gaussian_to_fock(s: GaussianState, N: int, mass_tol: float = 1e-6) -> FockDensityMatrix:
    """Dense Fock image of a Gaussian state.

    Pure states use :func:`gaussian_ket`.  Mixed states are synthesized as a
    thermal state acted on by a squeeze and a displacement, built by matrix
    exponentials on an enlarged space and cropped to ``N`` levels.
    """
    _check_n(N)
    if s.is_pure(1e-12):
        psi = gaussian_ket(s, N, mass_tol)
        return FockDensityMatrix(np.outer(psi, psi.conj()), s.hbar)
    return FockDensityMatrix(_synthesize_mixed(s, N, mass_tol), s.hbar)


def _synthesize_mixed(s: GaussianState, N: int, mass_tol: float) -> np.ndarray:
    hbar = s.hbar
    kappa = 2.0 * math.sqrt(s.det) / hbar  # 2 nbar + 1
    nbar = 0.5 * (kappa - 1.0)
    M = N + 80
    x = nbar / (nbar + 1.0)
    rho = np.diag((1.0 - x) * x ** np.arange(M)).astype(complex)
    # symmetric symplectic S with S S^T = P, generated by H = x^T K x / 2
    P = s.cov / (0.5 * hbar * kappa)
    w, V = np.linalg.eigh(P)
    L = V @ np.diag(0.5 * np.log(w)) @ V.T  # log S
    Omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    K = -Omega @ L
    qq, pp, sym = _quadratic_forms(M, hbar)
    H = 0.5 * (K[0, 0] * qq + 2.0 * K[0, 1] * sym + K[1, 1] * pp)
    q, p = quadratures(M, hbar)
    G = (s.mean[1] * q - s.mean[0] * p) / hbar  # displacement by the mean
    U = expm(1j * G) @ expm(-1j * H / hbar)
    rho = U @ rho @ U.conj().T
    head = rho[:N, :N]
    deficit = 1.0 - np.trace(head).real
    if deficit > mass_tol:
        raise ValueError(f"truncation N={N} loses {deficit:.2e} of the state's mass")
    return head


def wdp_fock(ket0: np.ndarray, coeffs: QdeCoefficients, t: float, B: GeneralizedLoweringOp,
             w4: float, dt: float = 1e-3) -> np.ndarray:
    """Ket propagator of the filtered picture.

    ``exp(-(w4/2) B^+ B) U_s(t) |phi(0)>``, renormalized.  ``B`` and ``w4`` are
    the lowering operator and noise exponent at time ``t``.
    """
    psi = integrate_ket(ket0, coeffs, 0.0, t, dt)
    Bm = operator_matrix(B, psi.shape[0])
    psi = expm(-0.5 * w4 * (Bm.conj().T @ Bm)) @ psi
    norm = np.linalg.norm(psi)
    if not norm > 1e-300:
        raise NumericalError("filtered ket norm underflow")
    return psi / norm


def fidelity_fock(rho, sigma) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``; kets are accepted for either argument."""
    def as_dm(x):
        x = np.asarray(getattr(x, "data", x))
        return np.outer(x, x.conj()) if x.ndim == 1 else x

    rho, sigma = as_dm(rho), as_dm(sigma)
    sr = sqrtm(rho)
    return float(np.trace(sqrtm(sr @ sigma @ sr)).real ** 2)


def husimi_fock(rho, alpha) -> np.ndarray:
    """``<alpha|rho|alpha>`` (natural units) for an array of coherent amplitudes."""
    rho = np.asarray(getattr(rho, "data", rho))
    N = rho.shape[0]
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    n = np.arange(N)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    out = np.empty(alpha.shape, dtype=float)
    for idx, al in np.ndenumerate(alpha):
        if al == 0:
            c = np.zeros(N, dtype=complex)
            c[0] = 1.0
        else:
            c = np.exp(-0.5 * abs(al) ** 2 + n * np.log(al) - 0.5 * log_fact)
        out[idx] = np.vdot(c, rho @ c).real
    return out


def von_neumann_fock(rho) -> float:
    w = np.linalg.eigvalsh(np.asarray(getattr(rho, "data", rho)))
    w = w[w > 1e-15]
    return float(-(w * np.log(w)).sum())
