"""Closed-form contraction bounds for PSM/OSM and the Robin-case auxiliaries.

All exponentials are evaluated after dividing by the largest one, so the
functions stay finite for arbitrarily large decay rates.

Two readings of the decay rate are supported.  ``"paper"`` substitutes the
eigenvalue ``lam_k`` into the bound; ``"sqrt"`` substitutes ``sqrt(lam_k)``,
the rate at which a Fourier mode of ``-u'' + lam u = 0`` actually decays in x.
``"auto"`` picks whichever reading the exact 1D mode iteration confirms as an
upper bound (see :func:`schwarzscale.fourier1d.select_convention`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BcPair
from .spectral import first_frequency

CONVENTIONS = ("paper", "sqrt")


def rho(decay, delta: float, sub_len: float):
    """Contraction bound ``(e^{2 t d} + e^{t L}) / (e^{2 t d + t L} + 1)`` at decay ``t``."""
    t = np.asarray(decay, dtype=float)
    if np.any(t < 0):
        raise ValueError("decay must be nonnegative")
    if not 0 < delta < sub_len / 2:
        raise ValueError(f"delta must lie in (0, L/2), got delta={delta}, L={sub_len}")
    e_l = np.exp(-t * sub_len)
    e_d = np.exp(-2.0 * t * delta)
    out = (e_l + e_d) / (1.0 + e_l * e_d)
    return float(out) if out.ndim == 0 else out


def phi_osm(lam: float, delta: float, p: float, sub_len: float) -> float:
    """The Robin-case auxiliary ``phi(lam, delta, p)``; ``p = 0`` reproduces :func:`rho`."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    if p < 0:
        raise ValueError("p must be nonnegative")
    # numerator and denominator scaled by (lam + p)^2 e^{lam (L + 2 delta)}
    r = (lam - p) / (lam + p)
    num = (
        math.exp(-lam * sub_len)
        - r * r * math.exp(-lam * (sub_len + 4 * delta))
        + abs(r) * (math.exp(-2 * delta * lam) - math.exp(-lam * (2 * sub_len + 2 * delta)))
    )
    den = 1.0 - r * r * math.exp(-2 * lam * (sub_len + 2 * delta))
    return num / den


def zeta_osm(lam: float, delta: float, p: float, sub_len: float) -> float:
    """The Robin-case auxiliary ``zeta(lam, delta, p)``, decreasing in ``p``.

    Raises
    ------
    ZeroDivisionError
        If the denominator degenerates.  For ``lam > 0`` and ``p >= 0`` the
        scaled denominator is at least ``1 - e^{-2 lam (L + 2 delta)}``, so this
        only happens as ``lam -> 0``.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    if lam + p == 0:
        raise ZeroDivisionError("zeta undefined at lam = p = 0")
    r = (lam - p) / (lam + p)
    num = math.exp(-lam * (2 * sub_len + 2 * delta)) + r * math.exp(-2 * lam * delta)
    den = 1.0 + r * math.exp(-2 * lam * (sub_len + 2 * delta))
    if abs(den) <= 1e-14:
        raise ZeroDivisionError(f"zeta denominator degenerate at lam={lam}, p={p}, delta={delta}")
    return num / den


def decay_for(freq: float, convention: str) -> float:
    """Decay rate substituted into :func:`rho` for a mode of frequency ``freq``."""
    if convention == "paper":
        return freq * freq
    if convention == "sqrt":
        return freq
    raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def resolve_convention(convention: str) -> str:
    if convention == "auto":
        from .fourier1d import select_convention

        return select_convention()
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    return convention


@dataclass(frozen=True)
class ContractionBound:
    label: str
    decay: float
    delta: float
    sub_len: float
    value: float
    convention: str
    q: float | None = None


def theorem3_bound(
    pair: BcPair | str,
    delta: float,
    sub_len: float,
    q: float | None = None,
    convention: str = "auto",
) -> ContractionBound:
    """L2 contraction bound of PSM/OSM for the external pair ``pair``.

    The bound is :func:`rho` at the lowest admissible frequency: pi (DD),
    mu_1 (DR), pi/2 (DN), tau_1 (RR), nu_1 (NR) and 0 (NN).
    """
    if isinstance(pair, BcPair):
        label = pair.label
        q = pair.q if q is None else q
    else:
        label = BcPair.from_label(pair, q).label
    if label in ("DD", "DN", "NN"):
        q = None
    convention = resolve_convention(convention)
    decay = decay_for(first_frequency(label, q), convention)
    return ContractionBound(label, decay, delta, sub_len, rho(decay, delta, sub_len), convention, q)


@dataclass
class OrderingReport:
    delta: float
    sub_len: float
    q: float
    convention: str
    values: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)  # (inequality, margin, ok)

    @property
    def ok(self) -> bool:
        return all(c[2] for c in self.checks)


_CHAINS = (
    ("DD", "DR", "DN", "NR", "NN"),
    ("DD", "RR", "NN"),
)


def ordering_check(
    delta: float, sub_len: float, q: float, convention: str = "auto", margin: float = 1e-14
) -> OrderingReport:
    """Check both strict orderings of the bounds for one ``(delta, q)``.

    ``rho_DD < rho_DR < rho_DN < rho_NR < rho_NN = 1`` and
    ``rho_DD < rho_RR < rho_NN = 1``.
    """
    convention = resolve_convention(convention)
    report = OrderingReport(delta, sub_len, q, convention)
    for label in ("DD", "DR", "DN", "RR", "NR", "NN"):
        report.values[label] = theorem3_bound(label, delta, sub_len, q, convention).value
    for chain in _CHAINS:
        for lo, hi in zip(chain, chain[1:]):
            gap = report.values[hi] - report.values[lo]
            report.checks.append((f"rho_{lo} < rho_{hi}", gap, gap > margin))
    nn = report.values["NN"]
    report.checks.append(("rho_NN = 1", abs(nn - 1.0), nn == 1.0))
    return report
