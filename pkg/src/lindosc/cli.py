"""Command line front end.

Subcommands: evolve (trajectory table with analytic reference columns),
husimi (phase-space grids plus the cycle path), scan (driving-frequency
sweep), validate (cross-oracle check suite), steady-state (asymptotic
populations).  Runs are described by a flat INI config; every output
file starts with a header echoing the resolved configuration and the
library version, numbers carry 17 significant digits, and identical
configs produce byte-identical files.

Exit codes: 0 success, 1 validation failures, 2 bad configuration,
3 numerical divergence.  LINDOSC_THREADS caps worker threads.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import observables as obs
from .fock_core import DensityMatrix, TruncationError, required_dim
from .gaussian_class import (
    GaussianState,
    entropy,
    entropy_infinity,
    gaussian_flow,
    husimi_grid,
    limit_cycle_state,
    materialize,
    solve_alpha,
    solve_u,
)
from .lindblad_engine import (
    DriveFn,
    IntegrationDivergedError,
    IntegratorOptions,
    LindbladParams,
    evolve,
    steady_state,
)
from .validation import run_all


class ConfigError(Exception):
    """Bad or inconsistent run configuration; maps to exit code 2."""


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return str(x)


# ---------------------------------------------------------------------------
# config parsing

_KNOWN_KEYS = {
    "params": {"omega", "mu", "nu", "f0", "Omega"},
    "drive": {"kind", "harmonics", "coefficients"},
    "initial": {"kind", "alpha0", "nbar0", "u0", "path"},
    "grid": {"t_max", "n_times"},
    "integrator": {"dim", "dt", "renorm_every"},
    "husimi": {"times", "resolution", "window"},
    "scan": {"Omega_min", "Omega_max", "samples"},
    "run": {"seed"},
}

_INITIAL_KINDS = ("vacuum", "coherent", "thermal", "gaussian",
                  "limit-cycle", "file")

_MISSING = object()


class _Cfg:
    """configparser wrapper producing section/field diagnostics."""

    def __init__(self, cp: configparser.ConfigParser):
        self.cp = cp
        for sec in cp.sections():
            if sec not in _KNOWN_KEYS:
                raise ConfigError(f"unknown section [{sec}]")
            for key in cp.options(sec):
                if key not in _KNOWN_KEYS[sec]:
                    raise ConfigError(f"[{sec}] unknown key '{key}'")

    def has(self, sec: str, key: str) -> bool:
        return self.cp.has_option(sec, key)

    def get(self, sec: str, key: str, conv, default=_MISSING):
        if not self.cp.has_option(sec, key):
            if default is _MISSING:
                raise ConfigError(f"[{sec}] missing required key '{key}'")
            return default
        raw = self.cp.get(sec, key).strip()
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{sec}] {key} = {raw!r}: {exc}") from exc


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.split())


def _ints(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.split())


def _complexes(raw: str) -> tuple[complex, ...]:
    return tuple(complex(tok) for tok in raw.split())


@dataclass
class RunConfig:
    params: LindbladParams
    drive: DriveFn
    initial_kind: str
    initial_given: bool
    alpha0: complex
    nbar0: float
    u0: float
    initial_path: str | None
    dim: int
    t_max: float
    n_times: int
    dt: float | None
    renorm_every: int
    husimi_times: tuple | None
    resolution: tuple
    window: tuple | None
    scan_range: tuple
    scan_samples: int
    seed: int | None

    def echo(self) -> list[tuple[str, str]]:
        """Resolved settings for output-file headers, in a fixed order."""
        p = self.params
        lines = [
            ("params.omega", _fmt(p.omega)), ("params.mu", _fmt(p.mu)),
            ("params.nu", _fmt(p.nu)), ("params.f0", _fmt(p.f0)),
            ("params.Omega", _fmt(p.Omega)),
            ("drive.kind", self.drive.kind),
        ]
        if self.drive.kind == "fourier":
            lines += [
                ("drive.harmonics",
                 " ".join(str(h) for h in self.drive.harmonics)),
                ("drive.coefficients",
                 " ".join(_fmt(c) for c in self.drive.coefficients)),
            ]
        lines.append(("initial.kind", self.initial_kind))
        if self.initial_kind in ("coherent", "gaussian"):
            lines.append(("initial.alpha0", _fmt(self.alpha0)))
        if self.initial_kind == "thermal":
            lines.append(("initial.nbar0", _fmt(self.nbar0)))
        if self.initial_kind == "gaussian":
            lines.append(("initial.u0", _fmt(self.u0)))
        if self.initial_kind == "file":
            lines.append(("initial.path", str(self.initial_path)))
        lines += [
            ("integrator.dim", str(self.dim)),
            ("integrator.dt", "auto" if self.dt is None else _fmt(self.dt)),
            ("integrator.renorm_every", str(self.renorm_every)),
            ("grid.t_max", _fmt(self.t_max)),
            ("grid.n_times", str(self.n_times)),
        ]
        if self.seed is not None:
            lines.append(("run.seed", str(self.seed)))
        return lines


def resolve_config(path: str | None, dim_override: int | None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive (omega vs Omega)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    cfg = _Cfg(cp)

    try:
        params = LindbladParams(
            omega=cfg.get("params", "omega", float, 1.1),
            mu=cfg.get("params", "mu", float, 0.6),
            nu=cfg.get("params", "nu", float, 0.4),
            f0=cfg.get("params", "f0", float, 0.0),
            Omega=cfg.get("params", "Omega", float, 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[params] {exc}") from exc

    default_kind = "cosine" if params.f0 != 0.0 else "none"
    kind = cfg.get("drive", "kind", str, default_kind)
    if kind == "none":
        drive = DriveFn.none()
    elif kind == "cosine":
        drive = DriveFn.cosine()
    elif kind == "fourier":
        try:
            drive = DriveFn.fourier(cfg.get("drive", "harmonics", _ints),
                                    cfg.get("drive", "coefficients",
                                            _complexes))
        except ValueError as exc:
            raise ConfigError(f"[drive] {exc}") from exc
    else:
        raise ConfigError(f"[drive] kind = {kind!r}: "
                          "expected none, cosine or fourier")
    if drive.is_active(params) and drive.max_frequency(params) <= 0.0:
        raise ConfigError("[params] Omega must be > 0 for an active drive")

    initial_given = cp.has_section("initial")
    ikind = cfg.get("initial", "kind", str, "vacuum")
    if ikind not in _INITIAL_KINDS:
        raise ConfigError(f"[initial] kind = {ikind!r}: expected one of "
                          + ", ".join(_INITIAL_KINDS))
    alpha0 = cfg.get("initial", "alpha0", complex, 0j)
    nbar0 = cfg.get("initial", "nbar0", float, 0.0)
    u0 = cfg.get("initial", "u0", float, 0.0)
    ipath = cfg.get("initial", "path", str, None)
    if ikind == "thermal" and not cfg.has("initial", "nbar0"):
        raise ConfigError("[initial] kind = thermal needs nbar0")
    if ikind == "gaussian" and not cfg.has("initial", "u0"):
        raise ConfigError("[initial] kind = gaussian needs u0")
    if ikind == "file" and ipath is None:
        raise ConfigError("[initial] kind = file needs path")
    if nbar0 < 0:
        raise ConfigError(f"[initial] nbar0 = {nbar0}: must be >= 0")
    if not 0.0 <= u0 < 1.0:
        raise ConfigError(f"[initial] u0 = {u0}: must lie in [0, 1)")

    dim = cfg.get("integrator", "dim", int, 64)
    if dim_override is not None:
        dim = dim_override
    if dim < 2:
        raise ConfigError(f"[integrator] dim = {dim}: must be >= 2")
    dt = cfg.get("integrator", "dt", float, None)
    if dt is not None and not dt > 0:
        raise ConfigError(f"[integrator] dt = {dt}: must be > 0")
    renorm_every = cfg.get("integrator", "renorm_every", int, 100)
    if renorm_every < 0:
        raise ConfigError("[integrator] renorm_every must be >= 0")

    t_max = cfg.get("grid", "t_max", float, 10.0)
    n_times = cfg.get("grid", "n_times", int, 101)
    if not t_max > 0:
        raise ConfigError(f"[grid] t_max = {t_max}: must be > 0")
    if n_times < 1:
        raise ConfigError(f"[grid] n_times = {n_times}: empty time grid")

    husimi_times = cfg.get("husimi", "times", _floats, None)
    if husimi_times is not None and len(husimi_times) == 0:
        raise ConfigError("[husimi] times: empty list")
    res = cfg.get("husimi", "resolution", _ints, (101,))
    if len(res) == 1:
        resolution: tuple = (res[0], res[0])
    elif len(res) == 2:
        resolution = res
    else:
        raise ConfigError("[husimi] resolution: one or two integers")
    if min(resolution) < 2:
        raise ConfigError("[husimi] resolution: each axis needs >= 2 points")
    window = cfg.get("husimi", "window", _floats, None)
    if window is not None:
        if len(window) != 4:
            raise ConfigError("[husimi] window: need x_min x_max p_min p_max")
        if not (window[0] < window[1] and window[2] < window[3]):
            raise ConfigError("[husimi] window: ranges must be increasing")

    lo = cfg.get("scan", "Omega_min", float, 0.5)
    hi = cfg.get("scan", "Omega_max", float, 1.7)
    samples = cfg.get("scan", "samples", int, 400)
    if not (0.0 <= lo < hi):
        raise ConfigError(f"[scan] range [{lo}, {hi}]: need 0 <= min < max")
    if samples < 3:
        raise ConfigError(f"[scan] samples = {samples}: need at least 3 "
                          "(a single-sample range has no peak)")

    seed = cfg.get("run", "seed", int, None)

    return RunConfig(params=params, drive=drive, initial_kind=ikind,
                     initial_given=initial_given, alpha0=alpha0, nbar0=nbar0,
                     u0=u0, initial_path=ipath, dim=dim, t_max=t_max,
                     n_times=n_times, dt=dt, renorm_every=renorm_every,
                     husimi_times=husimi_times, resolution=resolution,
                     window=window, scan_range=(lo, hi),
                     scan_samples=samples, seed=seed)


# ---------------------------------------------------------------------------
# shared pieces

def _gaussian_initial(cfg: RunConfig) -> GaussianState | None:
    """The initial state in Gaussian form, or None for matrix-from-file."""
    k = cfg.initial_kind
    if k == "vacuum":
        return GaussianState.coherent(0j)
    if k == "coherent":
        return GaussianState.coherent(cfg.alpha0)
    if k == "thermal":
        return GaussianState.thermal(cfg.nbar0)
    if k == "gaussian":
        return GaussianState.from_alpha(cfg.u0, cfg.alpha0)
    if k == "limit-cycle":
        try:
            return limit_cycle_state(0.0, cfg.params, cfg.drive)
        except ValueError as exc:
            raise ConfigError(f"[initial] kind = limit-cycle: {exc}") from exc
    return None


def _alpha_reach(cfg: RunConfig, horizon: float) -> float:
    """Largest |<a>| the run will visit, from the closed-form mean."""
    g0 = _gaussian_initial(cfg)
    a0 = 0j if g0 is None else complex(g0.alpha)
    if not cfg.drive.is_active(cfg.params):
        return abs(a0)
    f_max = max(cfg.params.omega, cfg.drive.max_frequency(cfg.params))
    n = min(65536, max(512, int(32 * horizon * f_max / (2.0 * math.pi)) + 1))
    t = np.linspace(0.0, horizon, n)
    return float(np.max(np.abs(obs.mean_a(t, a0, cfg.params, cfg.drive))))


def _ensure_adequate(cfg: RunConfig, horizon: float) -> None:
    if cfg.initial_kind == "file":
        return  # no declared amplitude; runtime tail diagnostics apply
    reach = 1.02 * _alpha_reach(cfg, horizon)
    need = required_dim(reach)
    if cfg.dim < need:
        raise ConfigError(
            f"[integrator] dim = {cfg.dim} cannot hold the run: |<a>| "
            f"reaches {reach:.4g}; increase dim to >= {need}")


def _initial_density(cfg: RunConfig) -> DensityMatrix:
    if cfg.initial_kind == "file":
        try:
            m = np.load(cfg.initial_path, allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise ConfigError(
                f"[initial] path = {cfg.initial_path!r}: {exc}") from exc
        try:
            rho0 = DensityMatrix.from_matrix(m)
        except ValueError as exc:
            raise ConfigError(
                f"[initial] {cfg.initial_path!r}: {exc}") from exc
        if rho0.dim != cfg.dim:
            raise ConfigError(
                f"[initial] matrix is {rho0.dim}x{rho0.dim} but "
                f"[integrator] dim = {cfg.dim}")
        return rho0
    g0 = _gaussian_initial(cfg)
    return materialize(g0, cfg.dim)


def _open_out(out_dir: str, name: str):
    os.makedirs(out_dir, exist_ok=True)
    return open(os.path.join(out_dir, name), "w", encoding="utf-8",
                newline="\n")


def _write_header(fh, command: str, cfg: RunConfig,
                  extra: list[tuple[str, str]] = ()) -> None:
    fh.write(f"# lindosc {__version__}\n")
    fh.write(f"# command: {command}\n")
    for key, val in list(cfg.echo()) + list(extra):
        fh.write(f"# {key} = {val}\n")


def _say(quiet: bool, msg: str) -> None:
    if not quiet:
        print(msg)


# ---------------------------------------------------------------------------
# subcommands

def cmd_evolve(cfg: RunConfig, out_dir: str, quiet: bool) -> int:
    _ensure_adequate(cfg, cfg.t_max)
    rho0 = _initial_density(cfg)
    t = np.linspace(0.0, cfg.t_max, cfg.n_times)
    opts = IntegratorOptions(dt=cfg.dt, renorm_every=cfg.renorm_every)
    traj = evolve(rho0, t, cfg.params, cfg.drive, opts)

    g0 = _gaussian_initial(cfg)
    cols = ["t", "re_a", "im_a", "n", "x", "p", "S", "purity",
            "trace_err", "min_eig"]
    data = [t, traj.mean_a.real, traj.mean_a.imag, traj.mean_n,
            traj.mean_x, traj.mean_p, traj.entropy, traj.purity,
            traj.trace_err, traj.min_eig]
    footer: list[str] = []
    if g0 is not None:
        u_ref = np.asarray(solve_u(t, g0.u, cfg.params))
        a_ref = np.asarray(solve_alpha(t, g0.alpha, cfg.params, cfg.drive))
        b_ref = 1.0 - u_ref
        n_ref = u_ref / b_ref + np.abs(a_ref) ** 2
        x_ref = math.sqrt(2.0 / cfg.params.omega) * a_ref.real
        p_ref = math.sqrt(2.0 * cfg.params.omega) * a_ref.imag
        s_ref = np.array([entropy(v) for v in u_ref])
        cols += ["re_a_ref", "im_a_ref", "n_ref", "x_ref", "p_ref", "S_ref"]
        data += [a_ref.real, a_ref.imag, n_ref, x_ref, p_ref, s_ref]
        for label, err in (
            ("|a - a_ref|", float(np.max(np.abs(traj.mean_a - a_ref)))),
            ("|n - n_ref|", float(np.max(np.abs(traj.mean_n - n_ref)))),
            ("|x - x_ref|", float(np.max(np.abs(traj.mean_x - x_ref)))),
            ("|p - p_ref|", float(np.max(np.abs(traj.mean_p - p_ref)))),
            ("|S - S_ref|", float(np.max(np.abs(traj.entropy - s_ref)))),
        ):
            verdict = "OK" if err <= 1e-6 else "MISMATCH"
            footer.append(f"# check: max {label} = {err:.3e} "
                          f"(tol 1e-06) -> {verdict}")

    path = os.path.join(out_dir, "trajectory.tsv")
    with _open_out(out_dir, "trajectory.tsv") as fh:
        _write_header(fh, "evolve", cfg)
        fh.write("# columns: " + " ".join(cols) + "\n")
        for i in range(t.size):
            fh.write("\t".join(_fmt(float(col[i])) for col in data) + "\n")
        for line in footer:
            fh.write(line + "\n")
    _say(quiet, f"wrote {path} ({t.size} rows)")
    for line in footer:
        _say(quiet, line[2:])
    return 0


def _auto_window(states: list[GaussianState], omega: float) -> tuple:
    xs, ps, wx, wp = [], [], [], []
    for g in states:
        al = complex(g.alpha)
        xs.append(math.sqrt(2.0 / omega) * al.real)
        ps.append(math.sqrt(2.0 * omega) * al.imag)
        wx.append(7.0 / math.sqrt(g.b * omega))
        wp.append(7.0 * math.sqrt(omega / g.b))
    return (min(xs) - max(wx), max(xs) + max(wx),
            min(ps) - max(wp), max(ps) + max(wp))


def _worker_count(n_jobs: int) -> int:
    cap = os.environ.get("LINDOSC_THREADS")
    if cap is None:
        limit = os.cpu_count() or 1
    else:
        try:
            limit = int(cap)
        except ValueError:
            raise ConfigError(
                f"LINDOSC_THREADS = {cap!r}: must be a positive integer")
        if limit < 1:
            raise ConfigError(
                f"LINDOSC_THREADS = {limit}: must be a positive integer")
    return max(1, min(n_jobs, limit))


def cmd_husimi(cfg: RunConfig, out_dir: str, quiet: bool) -> int:
    p, drive = cfg.params, cfg.drive
    periodic = drive.kind == "cosine" and drive.is_active(p) and p.Omega > 0

    times = cfg.husimi_times
    if times is None:
        if periodic:
            period = 2.0 * math.pi / p.Omega
            times = tuple(k * period / 6.0 for k in range(6))
        else:
            times = (0.0,)
    if any(ts < 0 for ts in times):
        raise ConfigError("[husimi] times must be >= 0")

    # With no explicit [initial] section and an active cosine drive the
    # natural subject is the asymptotic cycle itself.
    kind = cfg.initial_kind
    if not cfg.initial_given and periodic:
        kind = "limit-cycle"
    if kind == "file":
        raise ConfigError("[initial] kind = file: phase-space grids need a "
                          "Gaussian-representable initial state")
    if kind == "limit-cycle":
        if not periodic:
            raise ConfigError("[initial] kind = limit-cycle needs an active "
                              "cosine drive")
        states = [limit_cycle_state(ts, p, drive) for ts in times]
    else:
        g0 = _gaussian_initial(cfg)
        states = [gaussian_flow(g0, ts, p, drive) for ts in times]

    window = cfg.window
    auto = window is None
    if auto:
        window = _auto_window(states, p.omega)
    else:
        for ts, g in zip(times, states):
            al = complex(g.alpha)
            xc = math.sqrt(2.0 / p.omega) * al.real
            pc = math.sqrt(2.0 * p.omega) * al.imag
            if not (window[0] <= xc <= window[1]
                    and window[2] <= pc <= window[3]):
                warnings.warn(
                    f"state center (x={xc:.4g}, p={pc:.4g}) at t={ts:g} "
                    "lies outside the requested window; the grid will "
                    "miss the peak")

    def make(i: int):
        return husimi_grid(states[i], window, cfg.resolution, p.omega)

    with ThreadPoolExecutor(_worker_count(len(times))) as ex:
        grids = list(ex.map(make, range(len(times))))

    extra = [("husimi.window", " ".join(_fmt(w) for w in window)
              + (" (auto)" if auto else "")),
             ("husimi.resolution",
              f"{cfg.resolution[0]} {cfg.resolution[1]}"),
             ("husimi.subject", kind)]
    for i, (ts, grid) in enumerate(zip(times, grids)):
        name = f"husimi_{i:02d}.txt"
        with _open_out(out_dir, name) as fh:
            _write_header(fh, "husimi", cfg, extra)
            fh.write(f"# x-range: {_fmt(window[0])} {_fmt(window[1])}\n")
            fh.write(f"# p-range: {_fmt(window[2])} {_fmt(window[3])}\n")
            fh.write(f"# nx: {grid.x_axis.size}\n")
            fh.write(f"# np: {grid.p_axis.size}\n")
            fh.write(f"# time: {_fmt(float(ts))}\n")
            for row in grid.values:
                fh.write(" ".join(_fmt(float(v)) for v in row) + "\n")
        _say(quiet, f"wrote {os.path.join(out_dir, name)} "
                    f"(t = {ts:g}, peak {float(grid.values.max()):.6g})")

    if periodic:
        lc = obs.quantum_lc(p, drive)
        period = 2.0 * math.pi / p.Omega
        ts = np.linspace(0.0, period, 257)
        with _open_out(out_dir, "cycle_path.tsv") as fh:
            _write_header(fh, "husimi", cfg, extra)
            fh.write("# columns: t x p\n")
            for tv in ts:
                fh.write(f"{_fmt(float(tv))}\t{_fmt(lc.mean_x(float(tv)))}"
                         f"\t{_fmt(lc.mean_p(float(tv)))}\n")
        _say(quiet, f"wrote {os.path.join(out_dir, 'cycle_path.tsv')} "
                    f"(ellipse, {ts.size} samples)")
    return 0


def cmd_scan(cfg: RunConfig, out_dir: str, quiet: bool) -> int:
    table = obs.resonance_scan(cfg.params, cfg.scan_range, cfg.scan_samples)
    lo, hi = cfg.scan_range
    step = (hi - lo) / (cfg.scan_samples - 1)
    k = int(np.argmax(table[:, 1]))
    footer = [f"# peak: Omega = {_fmt(float(table[k, 0]))} (sample {k})"]
    try:
        w_res = obs.resonance_frequency(cfg.params)
        off = abs(float(table[k, 0]) - w_res)
        inside = lo <= w_res <= hi
        verdict = "OK" if off <= step else (
            "OFF-GRID" if not inside else "MISMATCH")
        footer.append(f"# reference: sqrt(omega^2 - gamma^2) = {_fmt(w_res)}")
        footer.append(f"# |peak - reference| = {off:.6g} vs grid step "
                      f"{step:.6g} -> {verdict}")
    except ValueError:
        footer.append("# reference: overdamped (gamma >= omega), "
                      "no resonance frequency")

    path = os.path.join(out_dir, "resonance_scan.tsv")
    with _open_out(out_dir, "resonance_scan.tsv") as fh:
        _write_header(fh, "scan", cfg, [
            ("scan.Omega_min", _fmt(lo)), ("scan.Omega_max", _fmt(hi)),
            ("scan.samples", str(cfg.scan_samples))])
        fh.write("# columns: Omega A_q phi_q nbar\n")
        for row in table:
            fh.write("\t".join(_fmt(float(v)) for v in row) + "\n")
        for line in footer:
            fh.write(line + "\n")
    _say(quiet, f"wrote {path} ({cfg.scan_samples} rows)")
    for line in footer:
        _say(quiet, line[2:])
    return 0


def cmd_steady_state(cfg: RunConfig, out_dir: str, quiet: bool) -> int:
    p = cfg.params
    ss = steady_state(p, cfg.dim)
    pops = np.diagonal(ss.matrix).real
    mean_n = float(np.dot(np.arange(cfg.dim), pops))
    path = os.path.join(out_dir, "steady_state.tsv")
    with _open_out(out_dir, "steady_state.tsv") as fh:
        _write_header(fh, "steady-state", cfg)
        fh.write(f"# u = {_fmt(p.nu / p.mu)}\n")
        fh.write(f"# nbar = {_fmt(p.nbar)}\n")
        fh.write(f"# entropy = {_fmt(entropy_infinity(p))}\n")
        fh.write(f"# truncated_mean_n = {_fmt(mean_n)}\n")
        fh.write(f"# top_level_population = {_fmt(float(pops[-1]))}\n")
        fh.write("# columns: n p_n\n")
        for n, v in enumerate(pops):
            fh.write(f"{n}\t{_fmt(float(v))}\n")
    _say(quiet, f"wrote {path} (dim {cfg.dim}, <n> = {mean_n:.6g})")
    return 0


def cmd_validate(cfg: RunConfig, out_dir: str | None, quiet: bool) -> int:
    # The suite runs canonical parameters, but a supplied config must
    # still be coherent (catches dim/amplitude mistakes early).
    _ensure_adequate(cfg, cfg.t_max)
    results = run_all(seed=cfg.seed)
    fails = [r for r in results if not r.passed]
    for r in results:
        if not quiet or not r.passed:
            print(r.line())
    if out_dir is not None:
        path = os.path.join(out_dir, "validate_report.tsv")
        with _open_out(out_dir, "validate_report.tsv") as fh:
            _write_header(fh, "validate", cfg)
            fh.write("# columns: status key expected actual tolerance\n")
            for r in results:
                status = "PASS" if r.passed else "FAIL"
                fh.write(f"{status}\t{r.key}\t{r.expected}\t{r.actual}"
                         f"\t{r.tolerance}\n")
        _say(quiet, f"wrote {path}")
    print(f"{len(results) - len(fails)}/{len(results)} checks passed")
    if fails:
        print("failing keys: " + ", ".join(r.key for r in fails))
        return 1
    return 0


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lindosc",
        description="Damped, driven oscillator under Lindblad dynamics: "
                    "integrator, closed forms, and their cross-checks.")
    ap.add_argument("--version", action="version",
                    version=f"lindosc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    specs = (
        ("evolve", "integrate a trajectory and export observables", True),
        ("husimi", "export phase-space grids and the cycle path", True),
        ("scan", "sweep the driving frequency", True),
        ("validate", "run the cross-oracle check suite", False),
        ("steady-state", "export the asymptotic populations", True),
    )
    for name, help_text, needs_out in specs:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=(name != "validate"),
                        help="INI run configuration" +
                             ("" if name != "validate"
                              else " (optional; defaults used when absent)"))
        sp.add_argument("--out", required=needs_out,
                        help="output directory" +
                             ("" if needs_out
                              else " (optional; report file when given)"))
        sp.add_argument("--dim", type=int, default=None,
                        help="override [integrator] dim")
        sp.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.config, args.dim)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.out, args.quiet)
        if args.command == "husimi":
            return cmd_husimi(cfg, args.out, args.quiet)
        if args.command == "scan":
            return cmd_scan(cfg, args.out, args.quiet)
        if args.command == "validate":
            return cmd_validate(cfg, args.out, args.quiet)
        return cmd_steady_state(cfg, args.out, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TruncationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationDivergedError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
