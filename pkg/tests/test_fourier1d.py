import math

import numpy as np
import pytest

from schwarzscale.bounds import rho
from schwarzscale.fourier1d import (
    build_mode_iteration,
    convention_table,
    mode_radius_vs_bound,
    power_radius,
    select_convention,
    spectral_radius,
    subdomain_mode_solution,
)
from schwarzscale.geometry import DIRICHLET_TRACE, build_chain, robin_trace

PI = math.pi


def test_dirichlet_sinh_solution():
    sol = subdomain_mode_solution(1.0, 0.0, 1.0, DIRICHLET_TRACE, 1.0, 0.0)
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(sol.value(x), np.sinh(1 - x) / np.sinh(1.0), atol=1e-15)


def test_affine_solution():
    sol = subdomain_mode_solution(0.0, 0.0, 1.0, DIRICHLET_TRACE, 0.0, 1.0)
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(sol.value(x), x, atol=1e-15)
    np.testing.assert_allclose(sol.deriv(x), 1.0, atol=1e-15)


def test_robin_trace_residual():
    trans = robin_trace(10.0)
    sol = subdomain_mode_solution(4.0, 0.0, 1.2, trans, 1.0, 1.0)
    # independent evaluation of the Robin traces from the exact hyperbolic form
    s, w = 2.0, 1.2
    u = lambda x: (sol.A * math.sinh(s * x) + sol.B * math.sinh(s * (w - x))) / math.sinh(s * w)
    du = lambda x: s * (sol.A * math.cosh(s * x) - sol.B * math.cosh(s * (w - x))) / math.sinh(s * w)
    assert abs(10 * u(0.0) - du(0.0) - 1.0) < 1e-12
    assert abs(10 * u(w) + du(w) - 1.0) < 1e-12


def test_large_lambda_is_finite():
    sol = subdomain_mode_solution(1e6, 0.0, 1.2, DIRICHLET_TRACE, 1.0, 0.0)
    assert sol.value(0.0) == pytest.approx(1.0)
    assert abs(sol.value(0.6)) < 1e-100


def test_robin_lambda_zero_system_regular():
    # at lam = 0 the Robin determinant is 1/w^2 - (p + 1/w)^2, nonzero for p > 0
    for w in (0.1, 1.2, 7.0):
        sol = subdomain_mode_solution(0.0, 0.0, w, robin_trace(1.0 / w), 1.0, 0.0)
        assert abs(sol.trace("left", 0.0, robin_trace(1.0 / w)) - 1.0) < 1e-12


def test_bad_interval_rejected():
    with pytest.raises(ValueError):
        subdomain_mode_solution(0.0, 1.0, 1.0, DIRICHLET_TRACE, 1.0, 1.0)
    with pytest.raises(ValueError):
        subdomain_mode_solution(-1.0, 0.0, 1.0, DIRICHLET_TRACE, 1.0, 1.0)


def test_two_subdomain_lambda_zero_closed_form():
    chain = build_chain(2, 1.0, 0.1)
    it = build_mode_iteration(chain, 0.0, DIRICHLET_TRACE)
    # u_1 = g x / 1.2 read at x = 1, u_2 = g (2.2 - x) / 1.2 read at x = 1.2
    expected = np.array([[0.0, 1.0 / 1.2], [1.0 / 1.2, 0.0]])
    np.testing.assert_allclose(it.matrix, expected, atol=1e-15)
    assert it.spectral_radius == pytest.approx(1 / 1.2, rel=1e-12)


def test_two_subdomain_pi_squared():
    chain = build_chain(2, 1.0, 0.1)
    it = build_mode_iteration(chain, PI**2, DIRICHLET_TRACE)
    expected = math.sinh(PI) / math.sinh(1.2 * PI)
    assert it.spectral_radius == pytest.approx(expected, rel=1e-12)
    assert it.spectral_radius < rho(PI, 0.1, 1.0)


@pytest.mark.parametrize("n", [2, 3, 7])
@pytest.mark.parametrize("lam", [0.0, 2.0, PI**2])
@pytest.mark.parametrize("trans", [DIRICHLET_TRACE, robin_trace(10.0)], ids=["D", "R"])
def test_mirror_symmetry(n, lam, trans):
    mat = build_mode_iteration(build_chain(n, 1.0, 0.1), lam, trans).matrix
    # reversing the chain maps the state vector onto its reverse
    np.testing.assert_allclose(mat[::-1, ::-1], mat, atol=1e-12)


def test_coupling_pattern():
    mat = build_mode_iteration(build_chain(5, 1.0, 0.1), 2.0, robin_trace(3.0)).matrix
    for r in range(mat.shape[0]):
        nz = np.nonzero(np.abs(mat[r]) > 0)[0]
        # each datum reads only the subdomain it is produced on, i.e. neighbour interfaces
        assert np.all(np.abs(nz // 2 - r // 2) <= 1)


@pytest.mark.parametrize("n", [3, 10, 40])
@pytest.mark.parametrize("trans", [DIRICHLET_TRACE, robin_trace(10.0)], ids=["D", "R"])
def test_power_iteration_agrees_with_dense(n, trans):
    mat = build_mode_iteration(build_chain(n, 1.0, 0.1), PI**2 / 4, trans).matrix
    assert power_radius(mat) == pytest.approx(spectral_radius(mat), abs=1e-8)


def test_lambda_zero_not_scalable():
    radii = [build_mode_iteration(build_chain(n, 1.0, 0.1), 0.0, DIRICHLET_TRACE).spectral_radius for n in (2, 5, 10, 20)]
    assert all(a < b for a, b in zip(radii, radii[1:]))
    assert radii[-1] > 0.99


@pytest.mark.parametrize("lam", [PI**2 / 4, PI**2])
def test_nonzero_modes_scalable(lam):
    radii = [build_mode_iteration(build_chain(n, 1.0, 0.1), lam, DIRICHLET_TRACE).spectral_radius for n in range(2, 31)]
    assert max(radii) < 0.9


@pytest.mark.parametrize("lam", [PI**2 / 4, PI**2])
@pytest.mark.parametrize("n", [3, 5, 10])
def test_robin_faster_than_dirichlet(lam, n):
    chain = build_chain(n, 1.0, 0.1)
    r_d = build_mode_iteration(chain, lam, DIRICHLET_TRACE).spectral_radius
    r_r = build_mode_iteration(chain, lam, robin_trace(10.0)).spectral_radius
    assert r_r <= r_d + 1e-10


def test_validated_convention_bounds_radius():
    conv = select_convention()
    assert conv == "sqrt"
    cmp = mode_radius_vs_bound(build_chain(5, 1.0, 0.1), PI**2, DIRICHLET_TRACE, conv)
    assert cmp.bound_holds


def test_literal_reading_fails_somewhere():
    rows = convention_table()
    assert not all(r.bound_holds for r in rows if r.convention == "paper")
    assert all(r.bound_holds for r in rows if r.convention == "sqrt")


def test_high_frequency_and_degenerate_limits():
    chain = build_chain(5, 1.0, 0.1)
    hi = mode_radius_vs_bound(chain, 1e4, DIRICHLET_TRACE, "sqrt")
    assert hi.radius < 1e-8 and hi.bound < 1e-8
    lo = mode_radius_vs_bound(chain, 1e-8, DIRICHLET_TRACE, "sqrt")
    r0 = build_mode_iteration(chain, 0.0, DIRICHLET_TRACE).spectral_radius
    assert lo.radius == pytest.approx(r0, abs=1e-6)
    assert lo.bound > 1 - 1e-3
    with pytest.raises(ValueError):
        mode_radius_vs_bound(chain, 0.0, DIRICHLET_TRACE, "sqrt")
