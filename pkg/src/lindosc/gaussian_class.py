"""Gaussian density operators that stay Gaussian under the damped dynamics.

A state here is rho = Z * exp(beta a+) exp(sigma n) exp(conj(beta) a) with
sigma < 0, normalized by Z = b * exp(-|beta|^2 / b) where u = e^sigma and
b = 1 - u. The class is closed under the master equation: u follows a scalar
Riccati equation with the closed-form solution in solve_u, and
alpha = beta / b follows the first-moment ODE, so propagation never touches
a matrix. The u -> 0 limit is the pure coherent state |alpha><alpha| and is
kept representable by storing u itself rather than sigma.

Also here: the equivalent single-exponential parameterization
exp(z + v n + delta a+ + conj(delta) a) and the maps between the two, the
Husimi function (a Gaussian of height b), the driven limit cycle, and the
entropy, which depends on u alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fock_core import (
    DensityMatrix,
    TruncationWarning,
    _check_adequacy,
    coherent_state,
    log_factorial,
)
from .lindblad_engine import DriveFn, LindbladParams
from .observables import limit_cycle_alpha, mean_a

__all__ = [
    "GaussianState",
    "PureExponentialForm",
    "GaussianExpectations",
    "HusimiGrid",
    "SingularTransformError",
    "PURE_U_THRESHOLD",
    "disentangle",
    "entangle",
    "disentangle_coefficients",
    "entangle_coefficients",
    "solve_u",
    "solve_alpha",
    "gaussian_flow",
    "materialize",
    "gaussian_expectations",
    "husimi_value",
    "husimi_grid",
    "limit_cycle_state",
    "entropy",
    "entropy_infinity",
]

PURE_U_THRESHOLD = 1e-300    # below this, u is treated as exactly 0
_TAIL_WARN = 1e-7            # u**dim above this leaves visible truncation


class SingularTransformError(ValueError):
    """The v=0 point where the two exponential parameterizations cannot map."""


@dataclass(frozen=True)
class GaussianState:
    """Parameters (u, beta) of a normalized Gaussian density operator.

    u = e^sigma in [0, 1) is the width parameter (0 = pure coherent state,
    nu/mu = thermal steady value); beta = alpha * (1 - u). Everything else
    (b, alpha, sigma, Z) is derived.
    """

    u: float
    beta: complex

    def __post_init__(self):
        u = float(self.u)
        beta = complex(self.beta)
        if not (math.isfinite(u) and 0.0 <= u < 1.0):
            raise ValueError(f"u must lie in [0, 1), got {self.u!r}")
        if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
            raise ValueError(f"beta must be finite, got {self.beta!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def coherent(cls, alpha) -> "GaussianState":
        return cls(u=0.0, beta=complex(alpha))

    @classmethod
    def thermal(cls, nbar: float) -> "GaussianState":
        if nbar < 0:
            raise ValueError(f"nbar must be >= 0, got {nbar}")
        return cls(u=nbar / (1.0 + nbar), beta=0.0)

    @classmethod
    def from_alpha(cls, u: float, alpha) -> "GaussianState":
        return cls(u=u, beta=complex(alpha) * (1.0 - u))

    @property
    def is_pure(self) -> bool:
        return self.u < PURE_U_THRESHOLD

    @property
    def b(self) -> float:
        return 1.0 - self.u

    @property
    def alpha(self) -> complex:
        return self.beta / self.b

    @property
    def sigma(self) -> float:
        return float("-inf") if self.is_pure else math.log(self.u)

    @property
    def Z(self) -> float:
        return self.b * math.exp(-abs(self.beta) ** 2 / self.b)


@dataclass(frozen=True)
class PureExponentialForm:
    """Coefficients of the single exponential e^(z + v n + delta a+ + conj(delta) a)."""

    z: float
    v: float
    delta: complex


# ---------------------------------------------------------------------------
# the two parameterizations and the maps between them


def disentangle_coefficients(z: float, v: float, delta: complex):
    """(c, sigma, beta) of Z e^(beta a+) e^(sigma n) e^(beta* a), Z = e^c,
    for the operator e^(z + v n + delta a+ + delta* a). No normalization
    assumed; the map is purely algebraic."""
    if v == 0.0:
        raise SingularTransformError(
            "v=0: the exponential-product coefficients degenerate "
            "(beta = delta (e^v - 1)/v has no inverse there)")
    ev = math.exp(v)
    sigma = v
    beta = complex(delta) * (ev - 1.0) / v
    c = z - abs(complex(delta) / v) ** 2 * (1.0 + v - ev)
    return c, sigma, beta


def entangle_coefficients(c: float, sigma: float, beta: complex):
    """Inverse of disentangle_coefficients: (z, v, delta)."""
    if sigma == 0.0:
        raise SingularTransformError(
            "sigma=0: the single-exponential coefficients degenerate")
    es = math.exp(sigma)
    v = sigma
    delta = complex(beta) * sigma / (es - 1.0)
    z = c + abs(complex(beta)) ** 2 * (1.0 + sigma - es) / (1.0 - es) ** 2
    return z, v, delta


def disentangle(p: PureExponentialForm) -> GaussianState:
    """Normalized state described by the single-exponential form.

    Any trace the input carries through z is divided out: the returned
    GaussianState is always unit trace (use disentangle_coefficients for
    the raw map including the constant).
    """
    if p.v > 0.0:
        raise ValueError(f"v must be < 0 for a normalizable state, got {p.v}")
    _, sigma, beta = disentangle_coefficients(p.z, p.v, p.delta)
    return GaussianState(u=math.exp(sigma), beta=beta)


def entangle(g: GaussianState) -> PureExponentialForm:
    """Single-exponential form of a normalized Gaussian state.

    For unit trace the constant works out to z = log b + sigma |alpha|^2.
    """
    if g.is_pure:
        raise ValueError("pure coherent state: sigma -> -inf has no "
                         "single-exponential form")
    c = math.log(g.Z)
    z, v, delta = entangle_coefficients(c, g.sigma, g.beta)
    return PureExponentialForm(z=z, v=v, delta=delta)


# ---------------------------------------------------------------------------
# parameter flow


def solve_u(t, u0: float, params: LindbladParams):
    """Closed-form width parameter u(t) from u(0) = u0 in [0, 1).

    Solves u' = nu - 2 gamma' u + mu u^2; fixed point nu/mu. The form below
    is stable for all t >= 0 (numerator and denominator stay O(mu)).
    """
    if not 0.0 <= u0 < 1.0:
        raise ValueError(f"u0 must lie in [0, 1), got {u0}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    mu, nu = params.mu, params.nu
    D = (mu * u0 - nu) * np.exp(-2.0 * params.gamma * t)
    out = (D + nu * (1.0 - u0)) / (D + mu * (1.0 - u0))
    return float(out) if t.ndim == 0 else out


def solve_alpha(t, alpha0: complex, params: LindbladParams,
                drive: DriveFn | None = None):
    """Coherent amplitude alpha(t); identical dynamics to the first moment."""
    return mean_a(t, alpha0, params, drive)


def gaussian_flow(g0: GaussianState, t: float, params: LindbladParams,
                  drive: DriveFn | None = None) -> GaussianState:
    """Propagate a Gaussian state: two scalar closed forms, no matrices."""
    u = solve_u(float(t), g0.u, params)
    alpha = solve_alpha(float(t), g0.alpha, params, drive)
    return GaussianState.from_alpha(u, alpha)


# ---------------------------------------------------------------------------
# materialization and expectation values


def materialize(g: GaussianState, dim: int) -> DensityMatrix:
    """Dense Fock-basis matrix of the state, exact at truncation.

    rho = Z e^(beta a+) diag(u^n) e^(beta* a) = M M+ with
    M[m, n] = sqrt(Z) u^(n/2) beta^(m-n) sqrt(m!/n!) / (m-n)!  (m >= n),
    assembled in log space. e^(beta a+) is nilpotent-triangular at
    truncation, so the series is exact; positivity holds by construction.
    """
    if int(dim) != dim or dim < 2:
        raise ValueError(f"dim must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    _check_adequacy(g.alpha, dim)
    if g.is_pure:
        return DensityMatrix.pure(coherent_state(g.alpha, dim))
    if g.u ** dim > _TAIL_WARN:
        warnings.warn(
            f"u**dim = {g.u ** dim:.3e}: thermal tail extends past the "
            f"basis, expectation values will be biased",
            TruncationWarning, stacklevel=2)

    lf = log_factorial(dim)
    n = np.arange(dim)
    half_log_Z = 0.5 * (math.log(g.b) - abs(g.beta) ** 2 / g.b)
    col = 0.5 * n * math.log(g.u) + half_log_Z
    if g.beta == 0:
        M = np.diag(np.exp(col)).astype(np.complex128)
    else:
        k = n[:, None] - n[None, :]          # m - n
        valid = k >= 0
        kc = np.where(valid, k, 0)
        logmag = (kc * math.log(abs(g.beta))
                  + 0.5 * (lf[:, None] - lf[None, :])
                  - lf[kc] + col[None, :])
        M = np.where(valid,
                     np.exp(logmag + 1j * kc * np.angle(g.beta)),
                     0.0)
    rho = M @ M.conj().T
    return DensityMatrix.from_matrix(rho)


@dataclass(frozen=True)
class GaussianExpectations:
    a: complex
    adag: complex
    n: float
    x: float
    p: float


def gaussian_expectations(g: GaussianState, omega: float) -> GaussianExpectations:
    """First moments and occupation by parameter differentiation of Z."""
    a = g.alpha
    return GaussianExpectations(
        a=a,
        adag=a.conjugate(),
        n=g.u / g.b + abs(a) ** 2,
        x=math.sqrt(2.0 / omega) * a.real,
        p=math.sqrt(2.0 * omega) * a.imag,
    )


# ---------------------------------------------------------------------------
# Husimi distribution


@dataclass(frozen=True)
class HusimiGrid:
    """<alpha|rho|alpha> sampled on a rectangle in (x, p).

    values[i, j] is the density at (x_axis[i], p_axis[j]) with the mapping
    alpha = (omega x + i p) / sqrt(2 omega).
    """

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray


def husimi_value(alpha_pt: complex, g: GaussianState) -> float:
    """<alpha_pt|rho|alpha_pt> = b exp(-b |alpha_pt - alpha|^2); peak is b."""
    return g.b * math.exp(-g.b * abs(complex(alpha_pt) - g.alpha) ** 2)


def husimi_grid(g: GaussianState, window, resolution, omega: float) -> HusimiGrid:
    """Husimi values over window = (x_min, x_max, p_min, p_max).

    resolution is the number of samples per axis (int, or a pair (nx, np)).
    """
    x_min, x_max, p_min, p_max = (float(v) for v in window)
    if not (x_min < x_max and p_min < p_max):
        raise ValueError(f"window must satisfy x_min < x_max and "
                         f"p_min < p_max, got {window!r}")
    if np.ndim(resolution) == 0:
        nx = npts = int(resolution)
    else:
        nx, npts = (int(v) for v in resolution)
    if nx < 2 or npts < 2:
        raise ValueError("resolution must be >= 2 per axis")
    x = np.linspace(x_min, x_max, nx)
    p = np.linspace(p_min, p_max, npts)
    s = math.sqrt(2.0 * omega)
    apts = (omega * x[:, None] + 1j * p[None, :]) / s
    values = g.b * np.exp(-g.b * np.abs(apts - g.alpha) ** 2)
    return HusimiGrid(x_axis=x, p_axis=p, values=values)


# ---------------------------------------------------------------------------
# limit cycle and entropy


def limit_cycle_state(t, params: LindbladParams, drive: DriveFn) -> GaussianState:
    """Asymptotic cyclic state under the cosine drive: u = nu/mu rigidly
    transported along alpha_lc(t). f0 = 0 gives the thermal steady state;
    nu = 0 gives a pure coherent limit cycle."""
    if drive.kind != "cosine":
        raise ValueError(f"cosine drive required, got kind={drive.kind!r}")
    u = params.nu / params.mu
    return GaussianState.from_alpha(u, limit_cycle_alpha(t, params))


def entropy(u: float) -> float:
    """von Neumann entropy of a Gaussian state with width parameter u.

    Depends on u alone (beta shifts the spectrum nowhere):
    S = -log(1-u) - (u/(1-u)) log u, the entropy of a geometric
    distribution with ratio u.
    """
    if u <= 1e-15:
        return 0.0
    if u >= 1.0 - 1e-12:
        raise ValueError(f"u = {u!r} too close to 1: state not normalizable")
    return -math.log1p(-u) - (u / (1.0 - u)) * math.log(u)


def entropy_infinity(params: LindbladParams) -> float:
    """Entropy of the steady state, S(u -> nu/mu), in closed form."""
    mu, nu, g2 = params.mu, params.nu, 2.0 * params.gamma
    if nu == 0.0:
        return 0.0
    return -(nu * math.log(nu) - mu * math.log(mu)
             + g2 * math.log(g2)) / g2
