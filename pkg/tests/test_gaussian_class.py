import math

import numpy as np
import pytest

from lindosc.fock_core import (
    DensityMatrix,
    TruncationError,
    TruncationWarning,
    coherent_state,
    expectation,
    ladder_ops,
    trace_distance,
)
from lindosc.gaussian_class import (
    GaussianState,
    PureExponentialForm,
    SingularTransformError,
    disentangle,
    disentangle_coefficients,
    entangle,
    entangle_coefficients,
    entropy,
    entropy_infinity,
    gaussian_expectations,
    gaussian_flow,
    husimi_grid,
    husimi_value,
    limit_cycle_state,
    materialize,
    solve_u,
)
from lindosc.lindblad_engine import (
    DriveFn,
    IntegratorOptions,
    LindbladParams,
    evolve,
)
from lindosc.observables import limit_cycle_alpha

P = LindbladParams(omega=1.1, mu=0.6, nu=0.4)
P_DRIVEN = LindbladParams(omega=1.1, mu=0.6, nu=0.4, f0=1.4,
                          Omega=1.0954451150103324)


def test_state_validation_and_properties():
    with pytest.raises(ValueError):
        GaussianState(u=1.0, beta=0.0)
    with pytest.raises(ValueError):
        GaussianState(u=-0.01, beta=0.0)
    with pytest.raises(ValueError):
        GaussianState(u=0.2, beta=complex("nan"))
    with pytest.raises(ValueError):
        GaussianState.thermal(-0.5)

    g = GaussianState.from_alpha(0.25, 0.4 - 0.3j)
    assert g.b == 0.75
    assert g.beta == pytest.approx((0.4 - 0.3j) * 0.75, abs=1e-16)
    assert g.alpha == pytest.approx(0.4 - 0.3j, abs=1e-16)
    assert g.sigma == pytest.approx(math.log(0.25), abs=1e-15)
    assert g.Z == pytest.approx(0.75 * math.exp(-abs(g.beta) ** 2 / 0.75),
                                abs=1e-16)

    assert GaussianState.coherent(1.0).is_pure
    assert GaussianState.coherent(1.0).sigma == float("-inf")
    th = GaussianState.thermal(2.0)
    assert th.u == pytest.approx(2.0 / 3.0, abs=1e-16)
    assert th.beta == 0.0


def test_parameterization_round_trip():
    g = GaussianState(u=0.4, beta=0.3 + 0.2j)
    back = disentangle(entangle(g))
    assert abs(back.u - g.u) < 1e-14
    assert abs(back.beta - g.beta) < 1e-14


def test_raw_coefficient_maps():
    # v = -1, delta = 1: beta = (e^v - 1)/v = 1 - 1/e
    c, sigma, beta = disentangle_coefficients(0.0, -1.0, 1.0)
    assert sigma == -1.0
    assert beta == pytest.approx(0.6321205588285577, abs=1e-16)
    assert c == pytest.approx(math.exp(-1.0), abs=1e-15)
    z, v, delta = entangle_coefficients(c, sigma, beta)
    assert v == -1.0
    assert abs(delta - 1.0) < 1e-15
    assert abs(z - 0.0) < 1e-15


def test_singular_and_domain_errors():
    with pytest.raises(SingularTransformError):
        disentangle_coefficients(0.0, 0.0, 1.0)
    with pytest.raises(SingularTransformError):
        entangle_coefficients(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        disentangle(PureExponentialForm(z=0.0, v=0.5, delta=0.0))
    with pytest.raises(ValueError):
        entangle(GaussianState.coherent(1.0))


def test_entangle_constant():
    # unit trace pins the constant at z = log b + sigma |alpha|^2
    g = GaussianState.from_alpha(0.3, 0.7 - 0.2j)
    p = entangle(g)
    want = math.log(0.7) + math.log(0.3) * abs(0.7 - 0.2j) ** 2
    assert abs(p.z - want) < 1e-14


def test_solve_u_pinned_and_fixed_point():
    p0 = LindbladParams(omega=1.1, mu=0.6, nu=0.0)
    assert solve_u(2.0, 0.5, p0) == pytest.approx(0.23147521650098238,
                                                  abs=1e-15)
    u_star = P.nu / P.mu
    out = solve_u(np.linspace(0.0, 50.0, 7), u_star, P)
    assert np.max(np.abs(out - u_star)) < 1e-15


def test_solve_u_satisfies_riccati():
    h = 1e-5
    for u0 in (0.0, 0.2, 0.9):
        for t in (0.5, 3.0):
            du = (solve_u(t + h, u0, P) - solve_u(t - h, u0, P)) / (2 * h)
            u = solve_u(t, u0, P)
            rhs = P.nu - 2.0 * P.gamma_prime * u + P.mu * u * u
            assert abs(du - rhs) < 1e-8


def test_solve_u_domain():
    with pytest.raises(ValueError):
        solve_u(1.0, 1.0, P)
    with pytest.raises(ValueError):
        solve_u(1.0, -0.1, P)
    with pytest.raises(ValueError):
        solve_u(-1.0, 0.5, P)


def test_gaussian_flow_matches_integrator():
    dim = 48
    g0 = GaussianState.from_alpha(0.3, 0.8)
    drive = DriveFn.cosine()
    t_end = 1.5
    traj = evolve(materialize(g0, dim), np.array([0.0, t_end]), P_DRIVEN,
                  drive=drive,
                  opts=IntegratorOptions(snapshot_times=(t_end,)))
    g1 = gaussian_flow(g0, t_end, P_DRIVEN, drive)
    assert trace_distance(traj.snapshots[t_end], materialize(g1, dim)) < 1e-6


def test_materialize_thermal_is_geometric():
    g = GaussianState.thermal(1.5)  # u = 0.6
    rho = materialize(g, 64)
    pops = np.diagonal(rho.matrix).real
    n = np.arange(64)
    want = 0.4 * 0.6 ** n
    assert np.max(np.abs(pops - want)) < 1e-12
    assert np.max(np.abs(rho.matrix - np.diag(pops))) == 0.0


def test_materialize_pure_is_projector():
    g = GaussianState.coherent(0.9 + 0.4j)
    rho = materialize(g, 32)
    psi = coherent_state(0.9 + 0.4j, 32)
    assert trace_distance(rho, DensityMatrix.pure(psi)) < 1e-14


def test_materialize_moments_cross_check():
    g = GaussianState.from_alpha(0.35, 0.6 - 0.4j)
    dim = 48
    rho = materialize(g, dim)
    a, _, nop = ladder_ops(dim)
    ex = gaussian_expectations(g, omega=1.1)
    assert abs(expectation(a, rho) - ex.a) < 1e-12
    assert abs(expectation(nop, rho).real - ex.n) < 1e-12


def test_materialize_truncation_paths():
    with pytest.warns(TruncationWarning):
        materialize(GaussianState.thermal(4.0), 32)  # u = 0.8
    with pytest.raises(TruncationError):
        materialize(GaussianState.from_alpha(0.2, 3.0), 8)
    with pytest.raises(ValueError):
        materialize(GaussianState.thermal(1.0), 1)


def test_gaussian_expectations_formulas():
    g = GaussianState.from_alpha(0.25, 1.2 - 0.7j)
    ex = gaussian_expectations(g, omega=1.1)
    assert ex.a == g.alpha
    assert ex.adag == g.alpha.conjugate()
    assert ex.n == pytest.approx(0.25 / 0.75 + abs(g.alpha) ** 2, abs=1e-15)
    assert ex.x == pytest.approx(math.sqrt(2 / 1.1) * 1.2, abs=1e-15)
    assert ex.p == pytest.approx(-math.sqrt(2 * 1.1) * 0.7, abs=1e-15)


def test_husimi_value_peak_and_falloff():
    g = GaussianState.from_alpha(0.4, 0.3 + 0.2j)
    assert husimi_value(g.alpha, g) == pytest.approx(g.b, abs=1e-16)
    assert husimi_value(g.alpha + 1.0, g) == pytest.approx(
        g.b * math.exp(-g.b), abs=1e-16)


def test_husimi_grid_orientation():
    g = GaussianState.from_alpha(0.4, 0.3 + 0.2j)
    omega = 1.1
    grid = husimi_grid(g, (-1.0, 2.0, -0.5, 1.5), (5, 7), omega)
    assert grid.values.shape == (5, 7)
    s = math.sqrt(2.0 * omega)
    for i, x in enumerate(grid.x_axis):
        for j, p in enumerate(grid.p_axis):
            pt = (omega * x + 1j * p) / s
            assert abs(grid.values[i, j] - husimi_value(pt, g)) < 1e-15
    square = husimi_grid(g, (-1.0, 1.0, -1.0, 1.0), 4, omega)
    assert square.values.shape == (4, 4)


def test_husimi_grid_validation():
    g = GaussianState.thermal(1.0)
    with pytest.raises(ValueError):
        husimi_grid(g, (1.0, -1.0, -1.0, 1.0), 5, 1.1)
    with pytest.raises(ValueError):
        husimi_grid(g, (-1.0, 1.0, -1.0, 1.0), 1, 1.1)


def test_limit_cycle_state():
    g = limit_cycle_state(0.7, P_DRIVEN, DriveFn.cosine())
    assert g.u == pytest.approx(0.4 / 0.6, abs=1e-15)
    assert g.alpha == pytest.approx(limit_cycle_alpha(0.7, P_DRIVEN),
                                    abs=1e-15)
    with pytest.raises(ValueError):
        limit_cycle_state(0.0, P_DRIVEN, DriveFn.none())


def test_entropy_values():
    assert entropy(0.0) == 0.0
    assert entropy(2.0 / 3.0) == pytest.approx(1.9095425048844383, abs=1e-15)
    with pytest.raises(ValueError):
        entropy(1.0)
    assert entropy_infinity(P) == pytest.approx(entropy(P.nu / P.mu),
                                                abs=1e-14)
    assert entropy_infinity(LindbladParams(omega=1.0, mu=0.5, nu=0.0)) == 0.0
