"""Chain-of-rectangles geometry and external boundary-condition pairs.

Subdomain ``j`` (1-based) is ``(a_j, b_j) x (0, 1)`` with ``a_1 = 0``,
``a_j = L + a_{j-1}`` and ``b_j = a_{j+1} + 2*delta``.  The arrays stored on
:class:`DomainChain` are 0-based: ``a[i]`` holds ``a_{i+1}`` (i = 0..N) and
``b[i]`` holds ``b_i`` (i = 0..N).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class GeometryError(ValueError):
    """Invalid chain parameters."""


class Bc(str, enum.Enum):
    DIRICHLET = "D"
    NEUMANN = "N"
    ROBIN = "R"


_CANONICAL = {"DD", "DR", "DN", "RR", "NR", "NN"}


@dataclass(frozen=True)
class BcPair:
    """Bottom/top external condition kinds, plus the Robin coefficient ``q``."""

    bottom: Bc
    top: Bc
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "bottom", Bc(self.bottom))
        object.__setattr__(self, "top", Bc(self.top))
        if self.has_robin:
            if self.q is None or not self.q > 0:
                raise GeometryError(f"Robin side requires q > 0, got q={self.q!r}")
        elif self.q is not None:
            raise GeometryError("q given but no side is Robin")

    @property
    def has_robin(self) -> bool:
        return Bc.ROBIN in (self.bottom, self.top)

    @property
    def label(self) -> str:
        """Canonical label (DD, DR, DN, RR, NR, NN), independent of orientation."""
        raw = self.bottom.value + self.top.value
        if raw in _CANONICAL:
            return raw
        return raw[::-1]

    @classmethod
    def from_label(cls, label: str, q: float | None = None) -> "BcPair":
        """Build from a label such as ``"DR"``; the first letter is the bottom side."""
        label = label.strip().upper()
        if len(label) != 2 or any(c not in "DNR" for c in label):
            raise GeometryError(f"unknown boundary pair {label!r}")
        pair_q = q if "R" in label else None
        return cls(Bc(label[0]), Bc(label[1]), pair_q)

    def __str__(self):
        return f"{self.label}({self.q:g})" if self.has_robin else self.label


@dataclass(frozen=True)
class DomainChain:
    n_sub: int
    sub_len: float
    half_overlap: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    @property
    def width(self) -> float:
        """Width ``L + 2*delta`` of every subdomain."""
        return self.sub_len + 2.0 * self.half_overlap

    @property
    def total_length(self) -> float:
        return self.b[self.n_sub] - self.a[0]

    def subdomain(self, j: int) -> tuple[float, float]:
        """Interval ``(a_j, b_j)`` of the 1-based subdomain ``j``."""
        if not 1 <= j <= self.n_sub:
            raise IndexError(f"subdomain index {j} outside 1..{self.n_sub}")
        return float(self.a[j - 1]), float(self.b[j])


def build_chain(n_sub: int, sub_len: float, half_overlap: float) -> DomainChain:
    """Build the chain of ``n_sub`` subdomains of length ``sub_len`` + overlap.

    Raises
    ------
    GeometryError
        If ``n_sub < 2``, ``sub_len <= 0`` or ``half_overlap`` is not in
        ``(0, sub_len/2)``.
    """
    if int(n_sub) != n_sub or n_sub < 2:
        raise GeometryError(f"need at least 2 subdomains, got {n_sub!r}")
    if not sub_len > 0:
        raise GeometryError(f"subdomain length must be positive, got {sub_len!r}")
    if not 0 < half_overlap < sub_len / 2:
        raise GeometryError(
            f"half overlap must lie in (0, L/2) = (0, {sub_len / 2:g}), got {half_overlap!r}"
        )
    n_sub = int(n_sub)

    a = np.empty(n_sub + 1)
    a[0] = 0.0
    for i in range(1, n_sub + 1):
        a[i] = sub_len + a[i - 1]
    # b_j = a_{j+1} + 2 delta, j = 0..N
    b = a + 2.0 * half_overlap

    idx = np.arange(n_sub + 1)
    tol = 1e-12 * n_sub * sub_len
    if np.max(np.abs(a - idx * sub_len)) > tol or np.max(
        np.abs(b - (idx * sub_len + 2.0 * half_overlap))
    ) > tol:
        raise GeometryError("abscissae recurrence drifted from the closed form")

    a.setflags(write=False)
    b.setflags(write=False)
    return DomainChain(n_sub, float(sub_len), float(half_overlap), a, b)


@dataclass(frozen=True)
class TransmissionKind:
    """Interface traces: Dirichlet (PSM) or Robin ``p u -/+ u_x`` (OSM)."""

    kind: str = "dirichlet"
    p: float | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        if kind in ("psm", "d"):
            kind = "dirichlet"
        elif kind in ("osm", "r"):
            kind = "robin"
        object.__setattr__(self, "kind", kind)
        if kind == "robin":
            if self.p is None or not self.p > 0:
                raise GeometryError(f"Robin transmission requires p > 0, got p={self.p!r}")
        elif kind == "dirichlet":
            if self.p is not None:
                raise GeometryError("Dirichlet transmission takes no p")
        else:
            raise GeometryError(f"unknown transmission kind {self.kind!r}")

    @property
    def is_robin(self) -> bool:
        return self.kind == "robin"

    @property
    def method(self) -> str:
        return "OSM" if self.is_robin else "PSM"

    def __str__(self):
        return f"robin(p={self.p:g})" if self.is_robin else "dirichlet"


DIRICHLET_TRACE = TransmissionKind("dirichlet")


def robin_trace(p: float) -> TransmissionKind:
    return TransmissionKind("robin", p)
