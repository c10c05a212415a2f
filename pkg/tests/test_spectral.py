import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from schwarzscale.geometry import BcPair
from schwarzscale.spectral import (
    PI,
    RootFindingError,
    char_function,
    eigenmodes,
    eval_eigenfunction,
    find_root_k,
    limit_frequency,
    root_bracket,
)

# roots of the characteristic functions to 40 digits (mpmath findroot)
MU1_Q1 = 2.028757838110434223576971124734714376108
NU1_Q1 = 0.8603335890193797624838934241376623334119
TAU1_Q10 = 2.627675432985796647962647168385906589491

ALL_PAIRS = [
    BcPair.from_label("DD"),
    BcPair.from_label("DR", 3.0),
    BcPair.from_label("DN"),
    BcPair.from_label("RR", 3.0),
    BcPair.from_label("NR", 3.0),
    BcPair.from_label("NN"),
]


def composite_gauss(n_panels=256, order=8):
    """2048-point composite Gauss-Legendre rule on [0, 1]."""
    t, w = leggauss(order)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    y = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return y, wt


def test_char_function_values():
    assert char_function("NR", 1.0, PI / 4) == pytest.approx(math.sqrt(2) / 2 * (PI / 4 - 1), abs=1e-15)
    assert char_function("NR", 1.0, PI / 4) == pytest.approx(-0.15175, abs=1e-5)
    assert char_function("DR", 1.0, PI) == pytest.approx(-PI, abs=1e-15)
    assert char_function("RR", 2.0, PI / 2) == pytest.approx(4 - PI**2 / 4, abs=1e-14)


@pytest.mark.parametrize(
    "kind, q, expected",
    [("DR", 1.0, MU1_Q1), ("NR", 1.0, NU1_Q1), ("RR", 10.0, TAU1_Q10)],
)
def test_first_roots_match_high_precision(kind, q, expected):
    assert find_root_k(kind, q, 1, tol=1e-12) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("kind", ["DR", "NR", "RR"])
@pytest.mark.parametrize("q", [0.1, 1.0, 10.0, 100.0])
def test_root_residual_and_bracket(kind, q):
    ks = (1, 2, 3) if kind != "RR" else (1,)
    for k in ks:
        x = find_root_k(kind, q, k)
        lo, hi = root_bracket(kind, k)
        assert lo < x < hi
        assert abs(char_function(kind, q, x)) <= 1e-10 * (1 + q)
    if kind == "RR":
        assert 0 < find_root_k("RR", q, 1) < PI


def test_root_failure_signalled():
    with pytest.raises(RootFindingError):
        find_root_k("DR", -1.0, 1)


def test_monotone_in_q_and_ordering():
    qs = np.logspace(-3, 3, 60)
    mu = [find_root_k("DR", q, 1) for q in qs]
    nu = [find_root_k("NR", q, 1) for q in qs]
    tau = [find_root_k("RR", q, 1) for q in qs]
    for seq in (mu, nu, tau):
        assert np.all(np.diff(seq) > 0)
    for m, n, t in zip(mu, nu, tau):
        assert n < PI / 2 < m < PI
        assert 0 < t < PI


@pytest.mark.parametrize(
    "kind, extreme, value",
    [("DR", "inf", PI), ("DR", "0", PI / 2), ("NR", "0", 0.0), ("NR", "inf", PI / 2), ("RR", "inf", PI), ("RR", "0", 0.0)],
)
def test_limits(kind, extreme, value):
    assert limit_frequency(kind, extreme) == value


def test_limits_approached():
    assert abs(find_root_k("DR", 1e8, 1) - PI) < 1e-6
    assert abs(find_root_k("NR", 1e8, 1) - PI / 2) < 1e-6
    assert abs(find_root_k("DR", 1e-8, 1) - PI / 2) < 1e-6
    # nu_1 ~ sqrt(q), tau_1 ~ sqrt(2 q) as q -> 0
    assert find_root_k("NR", 1e-10, 1) == pytest.approx(1e-5, rel=1e-4)
    assert find_root_k("RR", 1e-10, 1) == pytest.approx(math.sqrt(2e-10), rel=1e-4)


def test_closed_form_modes():
    dd = eigenmodes(BcPair.from_label("DD"), 2)
    assert [m.index for m in dd] == [1, 2]
    assert [m.eigenvalue for m in dd] == pytest.approx([PI**2, 4 * PI**2])
    nn = eigenmodes(BcPair.from_label("NN"), 1)
    assert [(m.index, m.eigenvalue) for m in nn] == [(0, 0.0), (1, pytest.approx(PI**2))]
    dn = eigenmodes(BcPair.from_label("DN"), 0)
    assert len(dn) == 1 and dn[0].eigenvalue == pytest.approx(PI**2 / 4)


def test_eigenfunction_values():
    m = eigenmodes(BcPair.from_label("DD"), 1)[0]
    assert eval_eigenfunction(m, 0.5) == pytest.approx(math.sqrt(2))
    assert eval_eigenfunction(m, 0.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        eval_eigenfunction(m, 1.5)


def test_nr_mode_bottom_neumann():
    m = eigenmodes(BcPair.from_label("NR", 1.0), 1)[0]
    assert eval_eigenfunction(m, 0.0) == pytest.approx(m.norm_const)
    h = 1e-6
    # one-sided sample points mirrored about 0: phi is even there
    d0 = (eval_eigenfunction(m, 2 * h) - eval_eigenfunction(m, 0.0)) / (2 * h)
    assert abs(d0) < 1e-5


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: p.label)
def test_gram_matrix_is_identity(pair):
    y, w = composite_gauss()
    k_max = 8 if pair.label not in ("DN", "NN") else 7
    modes = eigenmodes(pair, k_max)
    assert len(modes) == 8
    phi = np.array([eval_eigenfunction(m, y) for m in modes])
    gram = (phi * w) @ phi.T
    np.testing.assert_allclose(gram, np.eye(8), atol=1e-8)


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: p.label)
def test_boundary_conditions_hold(pair):
    q = pair.q
    h = 1e-6
    for m in eigenmodes(pair, 3 if pair.label not in ("DN", "NN") else 2):
        f = lambda s: eval_eigenfunction(m, s)
        d0 = (-3 * f(0.0) + 4 * f(h) - f(2 * h)) / (2 * h)
        d1 = (3 * f(1.0) - 4 * f(1 - h) + f(1 - 2 * h)) / (2 * h)
        bottom, top = pair.label[0], pair.label[1]
        scale = 1 + m.freq
        checks = {
            "D": (f(0.0), f(1.0)),
            "N": (d0, d1),
            "R": ((q or 0) * f(0.0) - d0, (q or 0) * f(1.0) + d1),
        }
        assert abs(checks[bottom][0]) < 1e-6 * scale * (1 + (q or 0))
        assert abs(checks[top][1]) < 1e-6 * scale * (1 + (q or 0))


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: p.label)
def test_ode_residual(pair):
    h = 1e-4
    ys = np.linspace(0.05, 0.95, 11)
    for m in eigenmodes(pair, 3):
        f = lambda s: eval_eigenfunction(m, s)
        d2 = (-f(ys + 2 * h) + 16 * f(ys + h) - 30 * f(ys) + 16 * f(ys - h) - f(ys - 2 * h)) / (12 * h * h)
        assert np.max(np.abs(d2 + m.eigenvalue * f(ys))) <= 1e-4 * max(m.eigenvalue, 1.0)


def test_flipped_pair_mirrors_mode():
    dr = eigenmodes(BcPair.from_label("DR", 2.0), 1)[0]
    rd = eigenmodes(BcPair.from_label("RD", 2.0), 1)[0]
    assert rd.eigenvalue == dr.eigenvalue
    assert eval_eigenfunction(rd, 0.3) == pytest.approx(eval_eigenfunction(dr, 0.7))


def test_eigenvalues_nonnegative():
    for pair in ALL_PAIRS:
        assert all(m.eigenvalue >= 0 for m in eigenmodes(pair, 4))
