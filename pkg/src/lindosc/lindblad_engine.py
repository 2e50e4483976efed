"""Brute-force master-equation evolution on the truncated Fock basis.

The generator

    d rho/dt = -i[H, rho] + (mu/2)(2 a rho a+ - a+a rho - rho a+a)
                          + (nu/2)(2 a+ rho a - a a+ rho - rho a a+)

with H = omega*(a+a + 1/2) - conj(f(t))*a+ - f(t)*a is applied through its
band structure (every operator is a shifted diagonal), so one evaluation
costs O(dim^2). Time stepping is classic fixed-step 4th-order Runge-Kutta:
the generator is linear and non-stiff at desk scale, and a fixed step keeps
convergence-order measurements clean.

This module is the numerical oracle for every closed-form solver in the
package; conversely those solvers pin down this integrator in the tests.

The real-force convention ftilde(t) = sqrt(2*omega)*f(t) is supported as a
documented conversion only (``LindbladParams.ftilde0``), never as a second
code path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fock_core import (
    HERM_TOL_EVOLVED,
    DensityMatrix,
    TruncationWarning,
    _as_matrix,
)

__all__ = [
    "LindbladParams",
    "DriveFn",
    "IntegratorOptions",
    "Trajectory",
    "IntegrationDivergedError",
    "default_dt",
    "lindblad_rhs",
    "evolve",
    "steady_state",
]

DIVERGENCE_EIG = -1e-6  # min eigenvalue below this aborts the run
TOP_POP_WARN = 1e-6     # population in the top two levels worth a warning


class IntegrationDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class LindbladParams:
    """Physical parameters: frequency omega, loss mu, gain nu, drive (f0, Omega).

    mu > nu >= 0 is required throughout (net damping). Derived quantities:
    gamma = (mu-nu)/2, gamma_prime = (mu+nu)/2, nbar = nu/(mu-nu), and
    ftilde0 = sqrt(2*omega)*f0 for the real-force convention.
    """

    omega: float
    mu: float
    nu: float
    f0: float = 0.0
    Omega: float = 0.0

    def __post_init__(self):
        for name in ("omega", "mu", "nu", "f0", "Omega"):
            v = getattr(self, name)
            if isinstance(v, complex):
                raise ValueError(f"{name} must be real, got {v!r}")
            if not math.isfinite(float(v)):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not (self.mu > self.nu >= 0):
            raise ValueError(
                f"need mu > nu >= 0, got mu={self.mu}, nu={self.nu}"
            )
        if not self.Omega >= 0:
            raise ValueError(f"Omega must be >= 0, got {self.Omega}")

    @property
    def gamma(self) -> float:
        return (self.mu - self.nu) / 2.0

    @property
    def gamma_prime(self) -> float:
        return (self.mu + self.nu) / 2.0

    @property
    def nbar(self) -> float:
        return self.nu / (self.mu - self.nu)

    @property
    def ftilde0(self) -> float:
        return math.sqrt(2.0 * self.omega) * self.f0


@dataclass(frozen=True)
class DriveFn:
    """Time dependence of the drive f(t).

    kind "none":    f(t) = 0
    kind "cosine":  f(t) = f0 * cos(Omega*t)        (f0, Omega from params)
    kind "fourier": f(t) = sum_k c_k e^{i k Omega t} with integer harmonics k
                    (requires Omega > 0)
    """

    kind: str
    harmonics: tuple = ()
    coefficients: tuple = ()

    def __post_init__(self):
        if self.kind not in ("none", "cosine", "fourier"):
            raise ValueError(f"unknown drive kind {self.kind!r}")
        if self.kind == "fourier":
            ks = tuple(int(k) for k in self.harmonics)
            cs = tuple(complex(c) for c in self.coefficients)
            if len(ks) == 0 or len(ks) != len(cs):
                raise ValueError("fourier drive needs matching, nonempty "
                                 "harmonics and coefficients")
            if len(set(ks)) != len(ks):
                raise ValueError("fourier harmonics must be distinct")
            object.__setattr__(self, "harmonics", ks)
            object.__setattr__(self, "coefficients", cs)
        else:
            object.__setattr__(self, "harmonics", ())
            object.__setattr__(self, "coefficients", ())

    @classmethod
    def none(cls) -> "DriveFn":
        return cls(kind="none")

    @classmethod
    def cosine(cls) -> "DriveFn":
        return cls(kind="cosine")

    @classmethod
    def fourier(cls, harmonics, coefficients) -> "DriveFn":
        return cls(kind="fourier", harmonics=tuple(harmonics),
                   coefficients=tuple(coefficients))

    @property
    def is_none(self) -> bool:
        return self.kind == "none"

    def value(self, t, params: LindbladParams):
        """f(t); broadcasts over array t."""
        if self.kind == "none":
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        if self.kind == "cosine":
            return params.f0 * np.cos(params.Omega * np.asarray(t, dtype=float)) \
                if np.ndim(t) else params.f0 * math.cos(params.Omega * t)
        if not params.Omega > 0:
            raise ValueError("fourier drive requires Omega > 0")
        t = np.asarray(t, dtype=float)
        out = sum(c * np.exp(1j * k * params.Omega * t)
                  for k, c in zip(self.harmonics, self.coefficients))
        return out if t.ndim else complex(out)

    def max_frequency(self, params: LindbladParams) -> float:
        """Highest angular frequency present in f(t); sets the default step."""
        if self.kind == "none":
            return 0.0
        if self.kind == "cosine":
            return params.Omega
        return max(abs(k) for k in self.harmonics) * params.Omega

    def is_active(self, params: LindbladParams) -> bool:
        if self.kind == "none":
            return False
        if self.kind == "cosine":
            return params.f0 != 0.0
        return any(c != 0 for c in self.coefficients)


@dataclass(frozen=True)
class IntegratorOptions:
    """dt=None picks the default step; renorm_every=0 disables the periodic
    re-Hermitization + trace renormalization (useful for convergence tests);
    snapshot_times must be a subset of the evolve time grid."""

    dt: float | None = None
    renorm_every: int = 100
    snapshot_times: tuple = ()


@dataclass
class Trajectory:
    """Observables recorded along an evolve run (one entry per grid time)."""

    times: np.ndarray
    mean_a: np.ndarray
    mean_n: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    purity: np.ndarray
    entropy: np.ndarray
    trace_err: np.ndarray
    min_eig: np.ndarray
    top_pop: np.ndarray
    snapshots: dict


def default_dt(params: LindbladParams, drive: DriveFn | None = None) -> float:
    drive = drive if drive is not None else DriveFn.none()
    f_max = max(params.omega, drive.max_frequency(params))
    return min(1e-3 * 2.0 * math.pi / params.omega,
               2.0 * math.pi / (200.0 * f_max))


class _Workspace:
    """Precomputed band data for one (dim, params) pair."""

    def __init__(self, dim: int, params: LindbladParams):
        m = np.arange(dim, dtype=np.float64)
        # a a+ truncated is diagonal (1, 2, ..., dim-1, 0)
        aad = np.concatenate((np.arange(1.0, dim), [0.0]))
        self.K = (
            -1j * params.omega * (m[:, None] - m[None, :])
            - 0.5 * params.mu * (m[:, None] + m[None, :])
            - 0.5 * params.nu * (aad[:, None] + aad[None, :])
        ).astype(np.complex128)
        w = np.sqrt(np.arange(1.0, dim))
        self.w = w
        self.wcol = w[:, None]
        self.muW2 = params.mu * np.outer(w, w)
        self.nuW2 = params.nu * np.outer(w, w)

    def apply(self, rho: np.ndarray, f) -> np.ndarray:
        out = self.K * rho
        out[:-1, :-1] += self.muW2 * rho[1:, 1:]   # mu * a rho a+
        out[1:, 1:] += self.nuW2 * rho[:-1, :-1]   # nu * a+ rho a
        if f is not None:
            g = np.zeros_like(rho)
            g[1:, :] = self.wcol * rho[:-1, :]     # a+ rho
            g[:, :-1] -= rho[:, 1:] * self.w       # - rho a+
            out += (1j * np.conj(f)) * g
            g2 = np.zeros_like(rho)
            g2[:-1, :] = self.wcol * rho[1:, :]    # a rho
            g2[:, 1:] -= rho[:, :-1] * self.w      # - rho a
            out += (1j * f) * g2
        return out


def lindblad_rhs(rho, t: float, params: LindbladParams,
                 drive: DriveFn | None = None) -> np.ndarray:
    """Right-hand side of the master equation at time t (dense matrix)."""
    m = _as_matrix(rho)
    if m.shape[0] < 2:
        raise ValueError("need dim >= 2")
    drive = drive if drive is not None else DriveFn.none()
    ws = _Workspace(m.shape[0], params)
    f = complex(drive.value(t, params)) if drive.is_active(params) else None
    return ws.apply(m, f)


def _mean_a(rho: np.ndarray, w: np.ndarray) -> complex:
    return complex(np.sum(w * np.diagonal(rho, -1)))


def evolve(rho0, t_grid, params: LindbladParams,
           drive: DriveFn | None = None,
           opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate the master equation, recording observables on t_grid.

    t_grid must start at 0 and increase strictly. Every opts.renorm_every
    steps the state is re-Hermitized and trace-renormalized. A minimum
    eigenvalue below -1e-6 at any recorded time aborts with
    IntegrationDivergedError.
    """
    drive = drive if drive is not None else DriveFn.none()
    opts = opts if opts is not None else IntegratorOptions()

    if not isinstance(rho0, DensityMatrix):
        rho0 = DensityMatrix.from_matrix(rho0)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d sequence")
    if t_grid[0] != 0.0:
        raise ValueError(f"t_grid must start at 0, got {t_grid[0]}")
    if t_grid.size > 1 and not np.all(np.diff(t_grid) > 0):
        raise ValueError("t_grid must be strictly increasing")
    snap_times = np.asarray(opts.snapshot_times, dtype=float)
    for ts in snap_times:
        if not np.any(np.isclose(t_grid, ts, rtol=0.0, atol=1e-12)):
            raise ValueError(f"snapshot time {ts} is not on t_grid")
    if opts.dt is not None and not opts.dt > 0:
        raise ValueError("dt must be positive")

    dim = rho0.dim
    ws = _Workspace(dim, params)
    dt = opts.dt if opts.dt is not None else default_dt(params, drive)
    active = drive.is_active(params)

    def fval(t):
        return complex(drive.value(t, params)) if active else None

    rho = rho0.matrix.copy()
    n_diag = np.arange(dim, dtype=float)
    sx = math.sqrt(2.0 / params.omega)
    sp = math.sqrt(2.0 * params.omega)

    rec = {k: [] for k in ("a", "n", "x", "p", "pur", "ent", "terr", "meig", "top")}
    snapshots: dict = {}
    warned = False

    def record(t, rho):
        nonlocal warned
        if not np.all(np.isfinite(rho)):
            raise IntegrationDivergedError(
                f"state became non-finite by t={t:g}; "
                "reduce dt or increase dim")
        a = _mean_a(rho, ws.w)
        diag = np.diagonal(rho).real
        rec["a"].append(a)
        rec["n"].append(float(np.dot(n_diag, diag)))
        rec["x"].append(sx * a.real)
        rec["p"].append(sp * a.imag)
        rec["pur"].append(float(np.sum(np.abs(rho) ** 2)))
        rec["terr"].append(abs(complex(rho.trace()) - 1.0))
        eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
        meig = float(eigs[0])
        rec["meig"].append(meig)
        pos = eigs[eigs > 1e-300]
        rec["ent"].append(float(-np.dot(pos, np.log(pos))) + 0.0)
        top = float(diag[-1] + diag[-2])
        rec["top"].append(top)
        if meig < DIVERGENCE_EIG:
            raise IntegrationDivergedError(
                f"positivity lost at t={t:g} (min eigenvalue {meig:.3e}); "
                "reduce dt or increase dim")
        if top > TOP_POP_WARN and not warned:
            warnings.warn(
                f"population {top:.3e} in the top two Fock levels at t={t:g}; "
                "results may be corrupted by truncation",
                TruncationWarning, stacklevel=3)
            warned = True
        if np.any(np.isclose(snap_times, t, rtol=0.0, atol=1e-12)):
            snapshots[float(t)] = DensityMatrix.from_matrix(
                rho, herm_tol=HERM_TOL_EVOLVED, positivity_tol=1e-6)

    record(t_grid[0], rho)
    steps = 0
    for i in range(t_grid.size - 1):
        t0, t1 = float(t_grid[i]), float(t_grid[i + 1])
        span = t1 - t0
        n_sub = max(1, math.ceil(span / dt - 1e-9))
        h = span / n_sub
        for j in range(n_sub):
            t = t0 + j * h
            k1 = ws.apply(rho, fval(t))
            k2 = ws.apply(rho + (0.5 * h) * k1, fval(t + 0.5 * h))
            k3 = ws.apply(rho + (0.5 * h) * k2, fval(t + 0.5 * h))
            k4 = ws.apply(rho + h * k3, fval(t + h))
            rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            steps += 1
            if opts.renorm_every and steps % opts.renorm_every == 0:
                rho = 0.5 * (rho + rho.conj().T)
                rho /= rho.trace().real
        record(t1, rho)

    return Trajectory(
        times=t_grid.copy(),
        mean_a=np.array(rec["a"], dtype=np.complex128),
        mean_n=np.array(rec["n"]),
        mean_x=np.array(rec["x"]),
        mean_p=np.array(rec["p"]),
        purity=np.array(rec["pur"]),
        entropy=np.array(rec["ent"]),
        trace_err=np.array(rec["terr"]),
        min_eig=np.array(rec["meig"]),
        top_pop=np.array(rec["top"]),
        snapshots=snapshots,
    )


def steady_state(params: LindbladParams, dim: int) -> DensityMatrix:
    """Drive-free stationary state: geometric diagonal with ratio nu/mu,
    renormalized over the truncated basis (|0><0| for nu=0).

    The truncated generator annihilates this state exactly: detailed balance
    mu*p_{n+1} = nu*p_n holds level by level, including the top level.
    """
    if int(dim) != dim or dim < 2:
        raise ValueError(f"dim must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    if params.nu == 0:
        psi = np.zeros(dim, dtype=np.complex128)
        psi[0] = 1.0
        return DensityMatrix.pure(psi)
    r = params.nu / params.mu
    p = r ** np.arange(dim)
    p /= p.sum()
    return DensityMatrix.from_matrix(np.diag(p).astype(np.complex128))
