"""Eigenpairs of -phi'' = lam * phi on (0, 1) for the six external BC pairs.

DD, DN and NN have closed-form frequencies.  DR, NR and RR frequencies are
roots of a characteristic function, found by bisection on a bracket that is
known to contain exactly one sign change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import BcPair

PI = math.pi
_NUDGE = 1e-12
_TRANSCENDENTAL = ("DR", "RR", "NR")


class RootFindingError(RuntimeError):
    pass


def char_function(kind: str, q: float, x):
    """Characteristic function whose positive roots are the eigenfrequencies.

    ``DR``: ``q sin x + x cos x``; ``RR``: ``2 q x cos x + (q^2 - x^2) sin x``;
    ``NR``: ``x sin x - q cos x``.
    """
    if kind == "DR":
        return q * np.sin(x) + x * np.cos(x)
    if kind == "RR":
        return 2.0 * q * x * np.cos(x) + (q * q - x * x) * np.sin(x)
    if kind == "NR":
        return x * np.sin(x) - q * np.cos(x)
    raise ValueError(f"no characteristic function for {kind!r}")


def root_bracket(kind: str, k: int) -> tuple[float, float]:
    """Open interval holding exactly one root with index ``k`` (k >= 1)."""
    if k < 1:
        raise ValueError(f"root index must be >= 1, got {k}")
    if kind == "DR":
        return k * PI - PI / 2, k * PI
    if kind == "NR":
        return (k - 1) * PI, (k - 0.5) * PI
    if kind == "RR":
        # one sign change of 2qx cos x + (q^2 - x^2) sin x per ((k-1)pi, k pi)
        return (k - 1) * PI, k * PI
    raise ValueError(f"no bracket for {kind!r}")


def bisect(f, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Plain bisection; ``f(lo)`` and ``f(hi)`` must have opposite signs."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RootFindingError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_root_k(kind: str, q: float, k: int, tol: float = 1e-14) -> float:
    """Return the ``k``-th eigenfrequency (mu_k, tau_k or nu_k) for coefficient ``q``.

    Bisection on the bracket from :func:`root_bracket` with endpoints nudged
    inward, so the result lies strictly inside the open interval.

    Raises
    ------
    RootFindingError
        If the characteristic function has no sign change on the nudged
        bracket (invalid ``q`` or ``k``).
    """
    if not q > 0:
        raise RootFindingError(f"q must be positive, got {q!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = root_bracket(kind, k)
    lo += _NUDGE * max(1.0, lo)
    hi -= _NUDGE * max(1.0, hi)

    def f(x):
        return float(char_function(kind, q, x))

    if np.sign(f(lo)) == np.sign(f(hi)):
        raise RootFindingError(
            f"{kind} characteristic function keeps its sign on ({lo}, {hi}) for q={q}, k={k}"
        )
    return bisect(f, lo, hi, tol=tol)


def limit_frequency(kind: str, q_extreme: str) -> float:
    """Limit of the first frequency as ``q -> 0`` (``"0"``) or ``q -> inf`` (``"inf"``)."""
    limits = {
        "DR": (PI / 2, PI),
        "RR": (0.0, PI),
        "NR": (0.0, PI / 2),
    }
    if kind not in limits:
        raise ValueError(f"no q-limit for {kind!r}")
    key = str(q_extreme).lower().lstrip("→-> ")
    if key in ("0", "zero"):
        return limits[kind][0]
    if key in ("inf", "infinity", "∞"):
        return limits[kind][1]
    raise ValueError(f"q_extreme must be '0' or 'inf', got {q_extreme!r}")


@dataclass(frozen=True)
class EigenMode:
    index: int
    freq: float
    eigenvalue: float
    norm_const: float
    kind: str
    q: float | None = None
    flipped: bool = False  # pair given as e.g. RD: evaluate the canonical mode at 1 - y

    def __call__(self, y):
        return eval_eigenfunction(self, y)


def _shape(kind: str, freq: float, q: float | None, y):
    if kind in ("DD", "DR", "DN"):
        return np.sin(freq * y)
    if kind in ("NN", "NR"):
        return np.cos(freq * y)
    if kind == "RR":
        return q * np.sin(freq * y) + freq * np.cos(freq * y)
    raise ValueError(kind)


def _norm_const(kind: str, w: float, q: float | None) -> float:
    if kind in ("DD", "DN"):
        return math.sqrt(2.0)
    if kind == "NN":
        # sqrt(2) cos(0) has norm sqrt(2); the constant mode is normalized to 1
        return 1.0 if w == 0.0 else math.sqrt(2.0)
    if kind == "DR":
        return math.sqrt(4 * w / (2 * w - math.sin(2 * w)))
    if kind == "NR":
        return math.sqrt(4 * w / (2 * w + math.sin(2 * w)))
    if kind == "RR":
        den = (w * w - q * q) * math.sin(2 * w) + 4 * q * w * math.sin(w) ** 2 + 2 * w**3 + 2 * q * q * w
        with np.errstate(all="ignore"):
            c = math.sqrt(4 * w / den) if den > 0 else math.nan
        if math.isfinite(c) and c > 0:
            return c
        sq, _ = integrate.quad(lambda y: _shape(kind, w, q, y) ** 2, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)
        return 1.0 / math.sqrt(sq)
    raise ValueError(kind)


def eigenmodes(pair: BcPair, k_max: int, tol: float = 1e-14) -> list[EigenMode]:
    """Eigenmodes of ``pair`` for indices from the smallest admissible one up to ``k_max``.

    DN and NN start at ``k = 0``, the other pairs at ``k = 1``.  Modes are
    returned in increasing eigenvalue order.
    """
    kind = pair.label
    flipped = pair.bottom.value + pair.top.value != kind
    k_min = 0 if kind in ("DN", "NN") else 1
    if k_max < k_min:
        raise ValueError(f"{kind}: k_max must be >= {k_min}, got {k_max}")
    q = pair.q
    modes = []
    for k in range(k_min, k_max + 1):
        if kind in ("DD", "NN"):
            w = PI * k
        elif kind == "DN":
            w = (2 * k + 1) * PI / 2
        else:
            w = find_root_k(kind, q, k, tol)
        modes.append(EigenMode(k, w, w * w, _norm_const(kind, w, q), kind, q, flipped))
    return modes


def eval_eigenfunction(mode: EigenMode, y):
    """Normalized eigenfunction of ``mode`` at ``y`` (scalar or array in [0, 1])."""
    y_arr = np.asarray(y, dtype=float)
    if np.any((y_arr < 0.0) | (y_arr > 1.0)):
        raise ValueError("eigenfunctions are defined on [0, 1]")
    if mode.flipped:
        y_arr = 1.0 - y_arr
    out = mode.norm_const * _shape(mode.kind, mode.freq, mode.q, y_arr)
    return float(out) if np.ndim(out) == 0 else out


def first_frequency(label: str, q: float | None = None) -> float:
    """Frequency of the lowest mode (the one that sets the contraction bound)."""
    if label in _TRANSCENDENTAL:
        return find_root_k(label, q, 1)
    return {"DD": PI, "DN": PI / 2, "NN": 0.0}[label]
