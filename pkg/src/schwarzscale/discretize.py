"""Five-point finite differences for -Laplace on one subdomain of the chain.

Node arrays are indexed ``U[iy, ix]`` with ``ix = 0..nx+1`` (``x = a_j + ix*hx``)
and ``iy = 0..ny+1`` (``y = iy*hy``).  Dirichlet nodes are eliminated; Neumann
and Robin sides keep their boundary nodes as unknowns and remove the ghost
node with the centred second-order difference of the boundary condition.
Interface data always enters through the right-hand side, so one
factorization serves every Schwarz sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .geometry import Bc, BcPair, DomainChain, TransmissionKind


class GridError(ValueError):
    pass


class AssemblyError(RuntimeError):
    pass


def _as_multiple(length: float, h: float, what: str) -> int:
    ratio = length / h
    n = round(ratio)
    if abs(ratio - n) > 1e-10 * max(1.0, ratio) or n < 1:
        raise GridError(f"{what} = {length!r} is not an integer multiple of h = {h!r} (remainder {ratio - n:+.3e} cells)")
    return n


@dataclass(frozen=True)
class SubdomainGrid:
    nx: int
    ny: int
    hx: float
    hy: float
    origin: tuple[float, float]
    index: int
    i_overlap_left: int  # local ix of b_{j-1}
    i_overlap_right: int  # local ix of a_{j+1}

    @property
    def shape(self) -> tuple[int, int]:
        return self.ny + 2, self.nx + 2

    def x(self) -> np.ndarray:
        return self.origin[0] + self.hx * np.arange(self.nx + 2)

    def y(self) -> np.ndarray:
        return self.hy * np.arange(self.ny + 2)


def make_grid(
    chain: DomainChain,
    j: int,
    h: float | None = None,
    nx: int | None = None,
    ny: int | None = None,
) -> SubdomainGrid:
    """Uniform grid on subdomain ``j`` whose interface lines are grid lines.

    Either a mesh width ``h`` (counts derived) or explicit interior counts
    ``nx``, ``ny`` must be given.  With ``L = 1``, ``h = 1/51`` and
    ``delta = 10 h`` this yields ``nx = 70``, ``ny = 50``.

    Raises
    ------
    GridError
        If ``L`` or ``delta`` is not an integer number of x-cells.  Asking
        for ``delta`` (not just ``2 delta``) keeps the overlap centre
        ``a_{j+1} + delta`` on a grid line as well.
    """
    a_j, _ = chain.subdomain(j)
    width = chain.width
    if h is not None:
        if nx is not None or ny is not None:
            raise GridError("give either h or explicit (nx, ny), not both")
        if not h > 0:
            raise GridError("h must be positive")
        n_l = _as_multiple(chain.sub_len, h, "L")
        n_o = 2 * _as_multiple(chain.half_overlap, h, "delta")
        nx = n_l + n_o - 1
        ny = max(round(1.0 / h), 2) - 1
        hx = width / (nx + 1)
    else:
        if nx is None or ny is None or nx < 1 or ny < 1:
            raise GridError("explicit grid needs positive nx and ny")
        hx = width / (nx + 1)
        n_l = _as_multiple(chain.sub_len, hx, "L")
        n_o = 2 * _as_multiple(chain.half_overlap, hx, "delta")
    hy = 1.0 / (ny + 1)
    return SubdomainGrid(int(nx), int(ny), hx, hy, (float(a_j), 0.0), j, n_o, n_l)


def _second_difference(n_int: int, h: float, left: tuple[str, float], right: tuple[str, float]):
    """1D ``-d2/dx2`` on the unknown nodes; returns (matrix, first node, last node).

    ``left``/``right`` are ``("dirichlet", _)`` or ``("robin", c)`` meaning
    ``c u -/+ u' = data`` with the ghost node eliminated (Neumann is c = 0).
    """
    lo = 0 if left[0] == "robin" else 1
    hi = n_int + 1 if right[0] == "robin" else n_int
    m = hi - lo + 1
    main = np.full(m, 2.0)
    upper = np.full(m - 1, -1.0)
    lower = np.full(m - 1, -1.0)
    if left[0] == "robin":
        main[0] = 2.0 + 2.0 * h * left[1]
        upper[0] = -2.0
    if right[0] == "robin":
        main[-1] = 2.0 + 2.0 * h * right[1]
        lower[-1] = -2.0
    mat = sp.diags([lower, main, upper], [-1, 0, 1], format="csr") / (h * h)
    return mat, lo, hi


def _y_side(kind: Bc, q: float | None) -> tuple[str, float]:
    if kind == Bc.DIRICHLET:
        return ("dirichlet", 0.0)
    if kind == Bc.NEUMANN:
        return ("robin", 0.0)
    return ("robin", q)


@dataclass(eq=False)
class SubdomainOperator:
    grid: SubdomainGrid
    bc: BcPair
    transmission: TransmissionKind
    end_flags: tuple[bool, bool]  # (left end is the outer boundary, right end is)
    matrix: sp.csr_matrix = field(repr=False)
    ix: tuple[int, int] = (1, 1)  # first/last unknown node in x
    iy: tuple[int, int] = (1, 1)
    _lu: object = field(default=None, repr=False)

    @property
    def n_unknowns(self) -> int:
        return self.matrix.shape[0]

    @property
    def y_rows(self) -> slice:
        """Node rows that carry unknowns (and hence trace data)."""
        return slice(self.iy[0], self.iy[1] + 1)

    def _side(self, side: str) -> str:
        outer = self.end_flags[0] if side == "left" else self.end_flags[1]
        return "robin" if self.transmission.is_robin and not outer else "dirichlet"

    def rhs(self, g_left=None, g_right=None, f=None) -> np.ndarray:
        """Right-hand side(s) for trace data of shape ``(n_y,)`` or ``(k, n_y)``."""
        nyu = self.iy[1] - self.iy[0] + 1
        nxu = self.ix[1] - self.ix[0] + 1
        data = [np.atleast_2d(g) for g in (g_left, g_right) if g is not None]
        k = data[0].shape[0] if data else 1
        if f is not None:
            f = np.asarray(f, dtype=float)
            k = f.shape[0] if f.ndim == 3 else k
            b = np.broadcast_to(
                f[..., self.y_rows, self.ix[0] : self.ix[1] + 1], (k, nyu, nxu)
            ).copy()
        else:
            b = np.zeros((k, nyu, nxu))
        hx = self.grid.hx
        for g, col, side in ((g_left, 0, "left"), (g_right, -1, "right")):
            if g is None:
                continue
            g = np.atleast_2d(g)
            if self._side(side) == "robin":
                b[:, :, col] += 2.0 * g / hx
            else:
                b[:, :, col] += g / (hx * hx)
        return b.reshape(k, -1)

    def solve(self, g_left=None, g_right=None, f=None) -> np.ndarray:
        """Solve with trace data; returns node array(s) of shape ``(k, ny+2, nx+2)``.

        Dirichlet data is written into the boundary columns of the result.
        """
        b = self.rhs(g_left, g_right, f)
        sol = self._lu.solve(np.ascontiguousarray(b.T)).T
        k = sol.shape[0]
        out = np.zeros((k,) + self.grid.shape)
        out[:, self.y_rows, self.ix[0] : self.ix[1] + 1] = sol.reshape(
            k, self.iy[1] - self.iy[0] + 1, -1
        )
        for g, col, side in ((g_left, 0, "left"), (g_right, -1, "right")):
            if g is not None and self._side(side) == "dirichlet":
                out[:, self.y_rows, col] = np.atleast_2d(g)
        return out

    def apply(self, u_nodes: np.ndarray) -> np.ndarray:
        """Apply the matrix to the unknown-node restriction of ``u_nodes``."""
        u = u_nodes[self.y_rows, self.ix[0] : self.ix[1] + 1].ravel()
        return (self.matrix @ u).reshape(self.iy[1] - self.iy[0] + 1, -1)


_CACHE: dict = {}


def assemble_operator(
    grid: SubdomainGrid,
    bc: BcPair,
    trans: TransmissionKind,
    end_flags: tuple[bool, bool] = (False, False),
) -> SubdomainOperator:
    """Assemble and factorize ``-Laplace_h`` on ``grid``.

    Operators are cached by their signature (grid shape and widths, external
    pair, transmission kind, outer-end flags), so interior subdomains share
    one factorization.

    Raises
    ------
    AssemblyError
        If the sparse LU factorization fails.
    """
    key = (grid.nx, grid.ny, grid.hx, grid.hy, bc, trans, tuple(end_flags))
    if key in _CACHE:
        return _CACHE[key]

    p = trans.p if trans.is_robin else 0.0
    xl = ("dirichlet", 0.0) if end_flags[0] or not trans.is_robin else ("robin", p)
    xr = ("dirichlet", 0.0) if end_flags[1] or not trans.is_robin else ("robin", p)
    ax, ix0, ix1 = _second_difference(grid.nx, grid.hx, xl, xr)
    ay, iy0, iy1 = _second_difference(
        grid.ny, grid.hy, _y_side(bc.bottom, bc.q), _y_side(bc.top, bc.q)
    )
    mat = (
        sp.kron(sp.identity(ay.shape[0]), ax) + sp.kron(ay, sp.identity(ax.shape[0]))
    ).tocsr()
    try:
        lu = splu(mat.tocsc())
    except RuntimeError as exc:
        raise AssemblyError(f"factorization failed for bc={bc}, transmission={trans}, ends={end_flags}: {exc}") from exc
    op = SubdomainOperator(grid, bc, trans, tuple(end_flags), mat, (ix0, ix1), (iy0, iy1), lu)
    _CACHE[key] = op
    return op


def clear_operator_cache() -> None:
    _CACHE.clear()


def apply_trace(
    u_nodes: np.ndarray,
    ix: int,
    side: str,
    trans: TransmissionKind,
    hx: float,
    rows: slice = slice(None),
    stencil: str = "one_sided",
) -> np.ndarray:
    """Trace of a neighbour's node array on the grid column ``ix``.

    Dirichlet: the column values.  Robin: ``p u - u_x`` (``side="left"``) or
    ``p u + u_x`` (``side="right"``).  With the default one-sided stencil the
    derivative uses the column and the two next columns towards the
    receiving subdomain (increasing x for a left trace, decreasing x for a
    right trace); ``"centered"`` uses the two neighbouring columns.
    """
    u = u_nodes[..., rows, :]
    val = u[..., ix]
    if not trans.is_robin:
        return val.copy()
    if stencil == "centered":
        du = (u[..., ix + 1] - u[..., ix - 1]) / (2 * hx)
    elif side == "left":
        du = (-3 * u[..., ix] + 4 * u[..., ix + 1] - u[..., ix + 2]) / (2 * hx)
    else:
        du = (3 * u[..., ix] - 4 * u[..., ix - 1] + u[..., ix - 2]) / (2 * hx)
    return trans.p * val - du if side == "left" else trans.p * val + du


def grid_norm(u_nodes: np.ndarray, grid: SubdomainGrid, kind: str = "l2_grid") -> float:
    """Norm over the strictly interior nodes of one or more subdomain arrays."""
    inner = u_nodes[..., 1:-1, 1:-1]
    if kind == "l2_grid":
        return math.sqrt(grid.hx * grid.hy * float(np.sum(inner * inner)))
    if kind == "max":
        return float(np.max(np.abs(inner))) if inner.size else 0.0
    raise ValueError(f"unknown norm {kind!r}")
