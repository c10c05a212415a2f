import numpy as np
import pytest
from hypothesis import given, strategies as st

from schwarzscale.geometry import (
    Bc,
    BcPair,
    GeometryError,
    TransmissionKind,
    build_chain,
    robin_trace,
)


def test_chain_example():
    c = build_chain(3, 1.0, 0.1)
    # 0-based a[i] = a_{i+1}
    assert c.a[:3].tolist() == [0.0, 1.0, 2.0]
    np.testing.assert_allclose(c.b[1:], [1.2, 2.2, 3.2], rtol=0, atol=1e-15)
    assert c.subdomain(2) == pytest.approx((1.0, 2.2))


def test_chain_admissible_edge():
    c = build_chain(2, 1.0, 0.49)
    assert c.b[1] - c.a[1] == pytest.approx(0.98)


@pytest.mark.parametrize("n, L, d", [(2, 1.0, 0.5), (2, 1.0, 0.0), (2, 1.0, -0.1), (1, 1.0, 0.1), (3, 0.0, 0.1)])
def test_chain_rejects(n, L, d):
    with pytest.raises(GeometryError):
        build_chain(n, L, d)


def test_chain_immutable():
    c = build_chain(4, 1.0, 0.1)
    with pytest.raises(ValueError):
        c.a[0] = 1.0


@given(
    n=st.integers(2, 200),
    L=st.floats(1e-3, 1e3),
    frac=st.floats(1e-6, 0.4999),
)
def test_chain_invariants(n, L, frac):
    d = frac * L
    c = build_chain(n, L, d)
    tol = 1e-12 * n * L
    for j in range(1, n + 1):
        a, b = c.subdomain(j)
        assert abs((b - a) - (L + 2 * d)) <= tol
    for j in range(1, n):
        assert abs((c.b[j] - c.a[j]) - 2 * d) <= tol
    assert abs(c.total_length - (n * L + 2 * d)) <= tol


@pytest.mark.parametrize(
    "bottom, top, label",
    [("D", "D", "DD"), ("D", "R", "DR"), ("R", "D", "DR"), ("N", "D", "DN"), ("R", "N", "NR"), ("N", "N", "NN"), ("R", "R", "RR")],
)
def test_pair_labels(bottom, top, label):
    q = 2.0 if "R" in bottom + top else None
    assert BcPair(Bc(bottom), Bc(top), q).label == label


def test_pair_requires_q():
    with pytest.raises(GeometryError):
        BcPair.from_label("DR")
    with pytest.raises(GeometryError):
        BcPair.from_label("RR", 0.0)
    assert BcPair.from_label("DD", 5.0).q is None


def test_transmission_kinds():
    assert robin_trace(10).is_robin
    assert TransmissionKind("psm").kind == "dirichlet"
    with pytest.raises(GeometryError):
        robin_trace(0.0)
