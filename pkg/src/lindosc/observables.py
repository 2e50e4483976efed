"""Mean-value dynamics in closed form, plus the classical reference oscillator.

The first moment obeys a closed linear ODE,

    d<a>/dt = -(i*omega + gamma)*<a> + i*conj(f(t)),

so <a>, <x>, <p> come out analytically for the supported drive kinds. The
occupation <n> couples back to <a>; it is solved in closed form when f=0 and
by a scalar RK4 otherwise. The classical oscillator
x'' + 2*gamma*x' + omega0**2 * x = ftilde(t) is included as the reference the
quantum means are compared against (with omega0**2 <-> omega**2 + gamma**2
as the explicit conversion between the two frequency conventions).

All time arguments accept scalars or 1-d arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .lindblad_engine import DriveFn, LindbladParams

__all__ = [
    "ClassicalLC",
    "QuantumLC",
    "LimitCycleOccupation",
    "classical_solution",
    "classical_lc",
    "limit_cycle_coefficients",
    "limit_cycle_alpha",
    "limit_cycle_alpha_max",
    "drive_response",
    "mean_a",
    "quantum_lc",
    "mean_n",
    "mean_n_limit_cycle",
    "resonance_frequency",
    "resonance_amplitude",
    "resonance_scan",
]


# ---------------------------------------------------------------------------
# classical reference oscillator


@dataclass(frozen=True)
class ClassicalLC:
    """Steady response x(t) = A*cos(Omega*t + phi) of the classical oscillator."""

    A: float
    phi: float
    omega0: float
    Omega_R: float
    A_R: float


def _classical_particular(omega0: float, gamma: float, ftilde0: float,
                          Omega: float) -> tuple[float, float]:
    d2 = (omega0 ** 2 - Omega ** 2) ** 2 + 4.0 * gamma ** 2 * Omega ** 2
    if d2 == 0.0 and ftilde0 != 0.0:
        raise ValueError(
            "undamped oscillator driven exactly at its natural frequency "
            "has no bounded periodic solution")
    if ftilde0 == 0.0:
        return 0.0, 0.0
    A = ftilde0 / math.sqrt(d2)
    phi = -math.atan2(2.0 * gamma * Omega, omega0 ** 2 - Omega ** 2)
    return A, phi


def classical_lc(omega0: float, gamma: float, ftilde0: float,
                 Omega: float) -> ClassicalLC:
    """Amplitude/phase of the classical limit cycle and its resonance point.

    The response peaks at Omega_R = sqrt(omega0^2 - 2 gamma^2) when that is
    real, otherwise at Omega = 0 (overdamped response is monotone in Omega).
    """
    A, phi = _classical_particular(omega0, gamma, ftilde0, Omega)
    s = omega0 ** 2 - 2.0 * gamma ** 2
    Omega_R = math.sqrt(s) if s > 0 else 0.0
    A_R, _ = _classical_particular(omega0, gamma, ftilde0, Omega_R)
    return ClassicalLC(A=A, phi=phi, omega0=omega0, Omega_R=Omega_R, A_R=A_R)


def classical_solution(x0: float, v0: float, t, omega0: float, gamma: float,
                       drive: tuple[float, float] | None = None):
    """Exact solution (x, xdot) of x'' + 2 gamma x' + omega0^2 x = ftilde(t).

    drive is None for the free oscillator or a pair (ftilde0, Omega) for a
    cosine force ftilde0*cos(Omega*t). All damping regimes are covered: the
    homogeneous basis switches between trigonometric (underdamped),
    hyperbolic (overdamped) and polynomial (critical) branches.
    """
    if not omega0 > 0:
        raise ValueError(f"omega0 must be > 0, got {omega0}")
    if not gamma >= 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    ftilde0, Omega = (0.0, 0.0) if drive is None else (float(drive[0]),
                                                       float(drive[1]))
    t = np.asarray(t, dtype=float)

    A, phi = _classical_particular(omega0, gamma, ftilde0, Omega)
    xp = A * np.cos(Omega * t + phi)
    vp = -A * Omega * np.sin(Omega * t + phi)
    xp0 = A * math.cos(phi)
    vp0 = -A * Omega * math.sin(phi)

    # homogeneous basis h1, h2 with h1(0)=1, h1'(0)=-gamma, h2(0)=0, h2'(0)=1;
    # both derivatives close on the pair: h1' = -gamma h1 - s h2, h2' = h1 - gamma h2
    s = omega0 ** 2 - gamma ** 2
    env = np.exp(-gamma * t)
    if s > 0:
        w = math.sqrt(s)
        c, sn = np.cos(w * t), np.sin(w * t) / w
    elif s < 0:
        k = math.sqrt(-s)
        c, sn = np.cosh(k * t), np.sinh(k * t) / k
    else:
        c, sn = np.ones_like(t), t.copy()
    h1, h2 = env * c, env * sn

    ca = x0 - xp0
    cb = v0 - vp0 + gamma * ca
    x = xp + ca * h1 + cb * h2
    v = vp + ca * (-gamma * h1 - s * h2) + cb * (h1 - gamma * h2)
    if t.ndim == 0:
        return float(x), float(v)
    return x, v


# ---------------------------------------------------------------------------
# first moment <a>


def _fourier_terms(params: LindbladParams, drive: DriveFn):
    """Drive decomposed as f(t) = sum c_k exp(i k Omega t)."""
    if drive.kind == "none" or not drive.is_active(params):
        return []
    if drive.kind == "cosine":
        return [(1, 0.5 * params.f0), (-1, 0.5 * params.f0)]
    if not params.Omega > 0:
        raise ValueError("fourier drive requires Omega > 0")
    return list(zip(drive.harmonics, drive.coefficients))


def drive_response(t, params: LindbladParams, drive: DriveFn):
    """Particular part of <a>_t (zero initial amplitude response to f)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=np.complex128)
    terms = _fourier_terms(params, drive)
    if terms:
        w, g, W = params.omega, params.gamma, params.Omega
        ep = np.exp(-(1j * w + g) * t)
        for k, c in terms:
            out += np.conj(c) * (np.exp(-1j * k * W * t) - ep) \
                / ((w - k * W) - 1j * g)
    return complex(out) if t.ndim == 0 else out


def mean_a(t, a0: complex, params: LindbladParams,
           drive: DriveFn | None = None):
    """<a>_t = exp(-(i omega + gamma) t) * a0 + driven response."""
    drive = drive if drive is not None else DriveFn.none()
    t = np.asarray(t, dtype=float)
    out = np.exp(-(1j * params.omega + params.gamma) * t) * complex(a0) \
        + drive_response(t, params, drive)
    return complex(out) if t.ndim == 0 else out


def limit_cycle_coefficients(params: LindbladParams) -> tuple[complex, complex]:
    """(c_plus, c_minus) with alpha_lc(t) = c_plus e^{i Omega t} + c_minus e^{-i Omega t}."""
    w, g, W, f0 = params.omega, params.gamma, params.Omega, params.f0
    return (0.5 * f0 / (w + W - 1j * g), 0.5 * f0 / (w - W - 1j * g))


def limit_cycle_alpha(t, params: LindbladParams):
    """Asymptotic periodic <a> under the cosine drive."""
    cp, cm = limit_cycle_coefficients(params)
    t = np.asarray(t, dtype=float)
    out = cp * np.exp(1j * params.Omega * t) + cm * np.exp(-1j * params.Omega * t)
    return complex(out) if t.ndim == 0 else out


def limit_cycle_alpha_max(params: LindbladParams) -> float:
    # |c+ e^{ix} + c- e^{-ix}| peaks at |c+|+|c-| (phases align twice a period)
    cp, cm = limit_cycle_coefficients(params)
    return abs(cp) + abs(cm)


def _limit_cycle_alpha_meansq(params: LindbladParams) -> float:
    cp, cm = limit_cycle_coefficients(params)
    return abs(cp) ** 2 + abs(cm) ** 2


# ---------------------------------------------------------------------------
# quantum limit cycle of <x>, <p>


@dataclass(frozen=True)
class QuantumLC:
    """<x> = A_q cos(Omega t + phi_q) on the asymptotic cycle; <p> follows as
    d<x>/dt + gamma <x>. The cycle is the ellipse
    (<p> - gamma <x>)^2 / Omega^2 + <x>^2 = A_q^2.
    """

    A_q: float
    phi_q: float
    Omega: float
    gamma: float

    def mean_x(self, t):
        t = np.asarray(t, dtype=float)
        out = self.A_q * np.cos(self.Omega * t + self.phi_q)
        return float(out) if t.ndim == 0 else out

    def mean_p(self, t):
        t = np.asarray(t, dtype=float)
        ph = self.Omega * t + self.phi_q
        out = self.A_q * (self.gamma * np.cos(ph) - self.Omega * np.sin(ph))
        return float(out) if t.ndim == 0 else out

    def ellipse_residual(self, t):
        x = self.mean_x(t)
        p = self.mean_p(t)
        if self.Omega == 0.0:
            out = np.abs(x ** 2 - self.A_q ** 2)
        else:
            out = np.abs((p - self.gamma * x) ** 2 / self.Omega ** 2
                         + x ** 2 - self.A_q ** 2)
        return float(out) if np.ndim(t) == 0 else out


def _require_cosine(drive: DriveFn):
    if drive.kind != "cosine":
        raise ValueError(f"cosine drive required, got kind={drive.kind!r}")


def quantum_lc(params: LindbladParams, drive: DriveFn) -> QuantumLC:
    """Amplitude and phase of the asymptotic <x> oscillation.

    A_q = ftilde0 / sqrt((omega^2+gamma^2-Omega^2)^2 + (2 gamma Omega)^2);
    the phase is continued to (-pi, 0] so it passes -pi/2 smoothly where
    Omega^2 crosses omega^2+gamma^2 (atan2 does the branch tracking).
    """
    _require_cosine(drive)
    w, g, W = params.omega, params.gamma, params.Omega
    det = w ** 2 + g ** 2 - W ** 2
    A_q = params.ftilde0 / math.hypot(det, 2.0 * g * W)
    phi_q = -math.atan2(2.0 * g * W, det)
    return QuantumLC(A_q=A_q, phi_q=phi_q, Omega=W, gamma=g)


def resonance_frequency(params: LindbladParams) -> float:
    """Drive frequency maximizing A_q: sqrt(omega^2 - gamma^2)."""
    if not params.gamma < params.omega:
        raise ValueError("resonance requires gamma < omega")
    return math.sqrt(params.omega ** 2 - params.gamma ** 2)


def resonance_amplitude(params: LindbladParams) -> float:
    """A_q at the resonance frequency: ftilde0 / (2 gamma omega)."""
    return params.ftilde0 / (2.0 * params.gamma * params.omega)


# ---------------------------------------------------------------------------
# occupation <n>


@dataclass(frozen=True)
class LimitCycleOccupation:
    """<n> on the limit cycle: nbar plus a cos(2 Omega t + phi_q) ripple.

    nbar_from_alpha is the same average computed from the period mean of
    |alpha_lc|^2 instead of the quadrature form; the two must agree.
    """

    nbar: float
    amplitude: float
    phi_q: float
    Omega: float
    nbar_from_alpha: float

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = self.nbar + self.amplitude * np.cos(2.0 * self.Omega * t
                                                  + self.phi_q)
        return float(out) if t.ndim == 0 else out


def mean_n_limit_cycle(params: LindbladParams,
                       drive: DriveFn) -> LimitCycleOccupation:
    _require_cosine(drive)
    lc = quantum_lc(params, drive)
    w, g, W = params.omega, params.gamma, params.Omega
    ft, A, phi = params.ftilde0, lc.A_q, lc.phi_q
    base = params.nu / (2.0 * g)
    nbar = base + (ft * A / (4.0 * g * w)) * (g * math.cos(phi)
                                              - W * math.sin(phi))
    return LimitCycleOccupation(
        nbar=nbar,
        amplitude=ft * A / (4.0 * w),
        phi_q=phi,
        Omega=W,
        nbar_from_alpha=base + _limit_cycle_alpha_meansq(params),
    )


def mean_n(t, n0: float, a0: complex, params: LindbladParams,
           drive: DriveFn | None = None):
    """<n>_t from n' = nu - 2 gamma n + 2 Im(f(t) <a>_t).

    Force-free this is the closed form nu/2gamma + (n0 - nu/2gamma) e^{-2 gamma t};
    with a drive the scalar ODE is stepped by RK4 with <a>_t supplied in
    closed form at the stage times.
    """
    drive = drive if drive is not None else DriveFn.none()
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    g = params.gamma
    if not drive.is_active(params):
        ninf = params.nu / (2.0 * g)
        out = ninf + (float(n0) - ninf) * np.exp(-2.0 * g * t_arr)
        return float(out[0]) if np.ndim(t) == 0 else out

    if np.any(np.diff(t_arr) < 0):
        raise ValueError("array t must be nondecreasing")

    def source(tau):
        f = drive.value(tau, params)
        a = mean_a(tau, a0, params, drive)
        return params.nu + 2.0 * (f * a).imag

    # products f*<a> oscillate at omega + k*Omega; resolve the fastest one
    h0 = 2.0 * math.pi / (500.0 * max(params.omega,
                                      drive.max_frequency(params)))
    out = np.empty_like(t_arr)
    n = float(n0)
    tcur = 0.0
    for i, target in enumerate(t_arr):
        span = target - tcur
        if span > 0:
            n_sub = max(1, math.ceil(span / h0 - 1e-9))
            h = span / n_sub
            for j in range(n_sub):
                tj = tcur + j * h
                k1 = source(tj) - 2.0 * g * n
                k2 = source(tj + 0.5 * h) - 2.0 * g * (n + 0.5 * h * k1)
                k3 = source(tj + 0.5 * h) - 2.0 * g * (n + 0.5 * h * k2)
                k4 = source(tj + h) - 2.0 * g * (n + h * k3)
                n += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            tcur = target
        out[i] = n
    return float(out[0]) if np.ndim(t) == 0 else out


# ---------------------------------------------------------------------------
# resonance scan


def resonance_scan(params: LindbladParams, Omega_range, samples: int):
    """Rows (Omega, A_q, phi_q, nbar) over a uniform Omega grid."""
    if int(samples) != samples or samples < 3:
        raise ValueError(f"samples must be an integer >= 3, got {samples!r}")
    lo, hi = float(Omega_range[0]), float(Omega_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"need Omega_range=(lo, hi) with lo < hi, "
                         f"got ({lo}, {hi})")
    if lo < 0:
        raise ValueError("Omega must be >= 0")
    drive = DriveFn.cosine()
    rows = np.empty((int(samples), 4))
    for i, W in enumerate(np.linspace(lo, hi, int(samples))):
        pk = replace(params, Omega=float(W))
        lc = quantum_lc(pk, drive)
        nbar = mean_n_limit_cycle(pk, drive).nbar if pk.f0 != 0.0 \
            else pk.nu / (2.0 * pk.gamma)
        rows[i] = (W, lc.A_q, lc.phi_q, nbar)
    return rows
