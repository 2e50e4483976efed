"""Schrodinger evolution with a complex frequency (pure-loss shortcut).

Replacing omega by omega_tilde = omega - i*gamma turns the driven oscillator
Hamiltonian into a non-Hermitian generator whose coherent states stay
coherent: |psi(t)> = prefactor * |alpha(t)> with
alpha(t) = C(t) + alpha0 e^(-i omega_tilde t). The scalar coefficients A, B,
C obey

    i B' = -f(t) e^(-i omega_tilde t),  i C' = omega_tilde C - f(t),
    i A' = -f(t) C(t),       A(0) = B(0) = C(0) = 0,

and have closed forms below for f(t) = f0 cos(Omega t). The norm decays, so
physical expectation values are taken with respect to the renormalized
state: <n> = |alpha(t)|^2, and the Husimi density is the unit-height
Gaussian e^(-|.|^2) of a pure coherent state.

Expectation values reproduce the pure-loss Lindblad dynamics (mu = 2 gamma,
nu = 0) exactly for coherent initial states, which is tested both against
the closed forms and the dense integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock_core import _check_adequacy, log_factorial
from .lindblad_engine import LindbladParams

__all__ = [
    "NHParams",
    "NHExpectations",
    "abc",
    "nh_alpha",
    "nh_expectations",
    "nh_norm",
    "nh_husimi",
]


@dataclass(frozen=True)
class NHParams:
    """Complex-frequency evolution parameters.

    gamma > 0 is mandatory (the whole construction models decay); a nonzero
    cosine drive needs Omega > 0 because the closed form of A(t) carries a
    1/(2 Omega) from the e^(+-2 i Omega t) quadratures.
    """

    omega: float
    gamma: float
    f0: float = 0.0
    Omega: float = 0.0

    def __post_init__(self):
        for name in ("omega", "gamma", "f0", "Omega"):
            v = getattr(self, name)
            if isinstance(v, complex):
                raise ValueError(f"{name} must be real, got {v!r}")
            if not math.isfinite(float(v)):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.f0 != 0.0 and not self.Omega > 0:
            raise ValueError("nonzero drive requires Omega > 0")

    @property
    def omega_tilde(self) -> complex:
        return complex(self.omega, -self.gamma)

    def to_lindblad(self) -> LindbladParams:
        """The Lindblad parameters this evolution is equivalent to."""
        return LindbladParams(omega=self.omega, mu=2.0 * self.gamma, nu=0.0,
                              f0=self.f0, Omega=self.Omega)


def abc(t, p: NHParams):
    """Closed forms of (A, B, C) for the cosine drive; broadcast over t.

    A(t) comes from integrating i A' = -f C with the closed C(t), with the
    constant fixed by A(0) = 0; a tempting algebraic shortcut fails both
    conditions, so the form is pinned against an RK4 oracle in the tests.
    """
    t = np.asarray(t, dtype=float)
    zero = np.zeros(t.shape, dtype=np.complex128)
    if p.f0 == 0.0:
        if t.ndim == 0:
            return 0j, 0j, 0j
        return zero, zero.copy(), zero.copy()

    wt, W, f0 = p.omega_tilde, p.Omega, p.f0
    d = wt * wt - W * W          # nonzero: gamma > 0 keeps wt off the real axis
    em = np.exp(-1j * (wt - W) * t)
    ep = np.exp(-1j * (wt + W) * t)

    B = (-f0 / (2.0 * d)) * ((wt + W) * em + (wt - W) * ep - 2.0 * wt)
    C = (f0 / (2.0 * d)) * ((wt - W) * np.exp(1j * W * t)
                            + (wt + W) * np.exp(-1j * W * t)
                            - 2.0 * wt * np.exp(-1j * wt * t))
    A = (f0 * f0 / (4.0 * d)) * (
        1.0 + 2j * wt * t
        + ((wt - W) / (2.0 * W)) * np.exp(2j * W * t)
        - ((wt + W) / (2.0 * W)) * np.exp(-2j * W * t)
        + (2.0 * wt / d) * ((wt + W) * em + (wt - W) * ep - 2.0 * wt)
    )
    if t.ndim == 0:
        return complex(A), complex(B), complex(C)
    return A, B, C


def nh_alpha(t, alpha0: complex, p: NHParams):
    """Coherent amplitude alpha(t) = C(t) + alpha0 e^(-i omega_tilde t)."""
    t = np.asarray(t, dtype=float)
    _, _, C = abc(t, p)
    out = C + complex(alpha0) * np.exp(-1j * p.omega_tilde * t)
    return complex(out) if t.ndim == 0 else out


@dataclass(frozen=True)
class NHExpectations:
    a: complex
    n: float


def nh_expectations(t, alpha0: complex, p: NHParams):
    """Renormalized <a> and <n>; the state is coherent, so <n> = |<a>|^2."""
    a = nh_alpha(t, alpha0, p)
    if np.ndim(a) == 0:
        return NHExpectations(a=a, n=abs(a) ** 2)
    return NHExpectations(a=a, n=np.abs(a) ** 2)


def nh_norm(t, alpha0: complex, p: NHParams, dim: int,
            method: str = "prefactor") -> float:
    """Squared norm <psi(t)|psi(t)> of the decaying state.

    method "prefactor" uses the scalar coefficients:
        exp(-gamma t + 2 Re(A + B alpha0) - |alpha0|^2 + |alpha(t)|^2);
    method "series" (f0 = 0 only) sums the Poisson-weighted decay
        sum_n |<n|alpha0>|^2 e^(-2 gamma (n + 1/2) t)
    over the truncated basis, which must be adequate for alpha0.
    """
    if int(dim) != dim or dim < 2:
        raise ValueError(f"dim must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    alpha0 = complex(alpha0)
    _check_adequacy(alpha0, dim)
    t = float(t)
    if method == "prefactor":
        A, B, _ = abc(t, p)
        a_t = nh_alpha(t, alpha0, p)
        return math.exp(-p.gamma * t + 2.0 * (A + B * alpha0).real
                        - abs(alpha0) ** 2 + abs(a_t) ** 2)
    if method == "series":
        if p.f0 != 0.0:
            raise ValueError("series method is defined for f0 = 0 only")
        n = np.arange(dim)
        decay = np.exp(-2.0 * p.gamma * (n + 0.5) * t)
        if alpha0 == 0:
            return float(decay[0])
        # Poisson weights in log space
        logw = (n * math.log(abs(alpha0) ** 2) - log_factorial(dim)
                - abs(alpha0) ** 2)
        return float(np.sum(np.exp(logw) * decay))
    raise ValueError(f"unknown method {method!r}")


def nh_husimi(alpha_pt: complex, t: float, alpha0: complex,
              p: NHParams) -> float:
    """Husimi density of the renormalized state: e^(-|alpha_pt - alpha(t)|^2)."""
    a_t = nh_alpha(float(t), alpha0, p)
    return math.exp(-abs(complex(alpha_pt) - a_t) ** 2)
