"""Matrix connections on planar charts and numerical parallel transport.

A connection is ``d + A`` with ``A = Ax dx + Ay dy`` and ``Ax, Ay`` complex
``n x n`` matrices varying over a chart ``(xmin, xmax, ymin, ymax)``.  The
transport along a path solves ``v'(t) = -(Ax x'(t) + Ay y'(t)) v(t)`` with
``v(0) = I``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from scipy.special import erf

from . import _kernels
from .errors import (
    ChartsNotAdjacent,
    LogBranchFailure,
    PathOutsideChart,
    SingularGauge,
    SingularInterpolation,
    WeightsNotAffine,
)

DEFAULT_STEPS = 1000
CHART_TOL = 1e-12


def default_steps() -> int:
    return int(os.environ.get("TRANSPORTC_STEPS", DEFAULT_STEPS))


def _cmat(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


# paths ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PathSpec:
    """Piecewise linear path through samples ``(x, y, t)`` with increasing ``t``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if s.shape[1] != 3 or len(s) < 1:
            raise ValueError("path samples must be rows (x, y, t)")
        if np.any(np.diff(s[:, 2]) <= 0):
            raise ValueError("path parameter must be strictly increasing")
        object.__setattr__(self, "samples", s)

    @classmethod
    def straight(cls, p0, p1, t0=0.0, t1=1.0) -> "PathSpec":
        return cls([[p0[0], p0[1], t0], [p1[0], p1[1], t1]])

    @classmethod
    def constant(cls, p) -> "PathSpec":
        return cls([[p[0], p[1], 0.0], [p[0], p[1], 1.0]])

    @classmethod
    def polyline(cls, points, t0=0.0, t1=1.0) -> "PathSpec":
        pts = np.asarray(points, dtype=float)
        ts = np.linspace(t0, t1, len(pts))
        return cls(np.column_stack([pts, ts]))

    @property
    def start(self) -> np.ndarray:
        return self.samples[0, :2]

    @property
    def end(self) -> np.ndarray:
        return self.samples[-1, :2]

    def point(self, t):
        s = self.samples
        return np.stack([np.interp(t, s[:, 2], s[:, 0]), np.interp(t, s[:, 2], s[:, 1])], -1)

    def is_constant(self) -> bool:
        return bool(np.all(self.samples[:, :2] == self.samples[0, :2]))

    def reversed(self) -> "PathSpec":
        s = self.samples[::-1].copy()
        s[:, 2] = self.samples[0, 2] + self.samples[-1, 2] - s[:, 2]
        return PathSpec(s)

    def then(self, other: "PathSpec") -> "PathSpec":
        """Concatenation: ``self`` first, then ``other``, on ``[0, 1]``."""
        a = self.samples.copy()
        b = other.samples.copy()
        a[:, 2] = 0.5 * (a[:, 2] - a[0, 2]) / (a[-1, 2] - a[0, 2])
        b[:, 2] = 0.5 + 0.5 * (b[:, 2] - b[0, 2]) / (b[-1, 2] - b[0, 2])
        return PathSpec(np.vstack([a, b[1:]]) if np.allclose(a[-1, :2], b[0, :2])
                        else np.vstack([a[:-1], b]))

    def translated(self, dx: float = 0.0, dy: float = 0.0) -> "PathSpec":
        s = self.samples.copy()
        s[:, 0] += dx
        s[:, 1] += dy
        return PathSpec(s)


# gauge maps -------------------------------------------------------------

class GaugeMap:
    """Smooth map from the plane to invertible matrices (vectorized)."""

    dim: int
    chart = None

    def values(self, xs, ys) -> np.ndarray:
        raise NotImplementedError

    def derivatives(self, xs, ys) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def __call__(self, x, y) -> np.ndarray:
        return self.values(np.atleast_1d(float(x)), np.atleast_1d(float(y)))[0]


@dataclass(frozen=True, eq=False)
class ConstantGauge(GaugeMap):
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _cmat(self.matrix))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def values(self, xs, ys):
        return np.broadcast_to(self.matrix, (len(np.atleast_1d(xs)),) + self.matrix.shape).copy()

    def derivatives(self, xs, ys):
        z = np.zeros((len(np.atleast_1d(xs)),) + self.matrix.shape, dtype=np.complex128)
        return z, z.copy()


def _expm_batch(k: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """``expm(t k)`` for many ``t`` via one eigendecomposition when that is safe."""
    w, v = np.linalg.eig(k)
    if np.linalg.cond(v) < 1e6:
        vinv = np.linalg.inv(v)
        return np.einsum("ij,tj,jk->tik", v, np.exp(np.outer(ts, w)), vinv)
    return np.stack([sla.expm(t * k) for t in ts])


@dataclass(frozen=True, eq=False)
class ExpGauge(GaugeMap):
    """``g(x, y) = expm(x Kx) expm(y Ky)`` with exact derivatives."""

    kx: np.ndarray
    ky: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kx", _cmat(self.kx))
        object.__setattr__(self, "ky", _cmat(self.ky))

    @property
    def dim(self):
        return self.kx.shape[0]

    def _parts(self, xs, ys):
        return _expm_batch(self.kx, np.asarray(xs, float)), _expm_batch(self.ky, np.asarray(ys, float))

    def values(self, xs, ys):
        ex, ey = self._parts(xs, ys)
        return ex @ ey

    def derivatives(self, xs, ys):
        ex, ey = self._parts(xs, ys)
        return self.kx @ ex @ ey, ex @ self.ky @ ey


@dataclass(frozen=True, eq=False)
class ProductGauge(GaugeMap):
    """Pointwise product ``outer(p) @ inner(p)``."""

    outer: GaugeMap
    inner: GaugeMap

    @property
    def dim(self):
        return self.outer.dim

    @property
    def chart(self):
        return _chart_meet(self.outer.chart, self.inner.chart)

    def values(self, xs, ys):
        return self.outer.values(xs, ys) @ self.inner.values(xs, ys)

    def derivatives(self, xs, ys):
        a, b = self.outer.values(xs, ys), self.inner.values(xs, ys)
        ax, ay = self.outer.derivatives(xs, ys)
        bx, by = self.inner.derivatives(xs, ys)
        return ax @ b + a @ bx, ay @ b + a @ by


@dataclass(frozen=True, eq=False)
class ShiftedGauge(GaugeMap):
    base: GaugeMap
    dx: float = 0.0
    dy: float = 0.0

    @property
    def dim(self):
        return self.base.dim

    @property
    def chart(self):
        return _chart_shift(self.base.chart, self.dx, self.dy)

    def values(self, xs, ys):
        return self.base.values(np.asarray(xs) - self.dx, np.asarray(ys) - self.dy)

    def derivatives(self, xs, ys):
        return self.base.derivatives(np.asarray(xs) - self.dx, np.asarray(ys) - self.dy)


@dataclass(frozen=True, eq=False)
class SampledGauge(GaugeMap):
    """Gauge known on a grid; derivatives by finite differences on that grid."""

    xs: np.ndarray
    ys: np.ndarray
    grid_values: np.ndarray  # (nx, ny, n, n)

    def __post_init__(self):
        object.__setattr__(self, "xs", np.asarray(self.xs, float))
        object.__setattr__(self, "ys", np.asarray(self.ys, float))
        object.__setattr__(self, "grid_values", _cmat(self.grid_values))
        _check_grid(self.xs, self.ys)

    @property
    def dim(self):
        return self.grid_values.shape[-1]

    @property
    def chart(self):
        return (self.xs[0], self.xs[-1], self.ys[0], self.ys[-1])

    @cached_property
    def _grads(self):
        return _grid_gradient(self.grid_values, self.xs, self.ys)

    def values(self, xs, ys):
        return _bilinear(self.xs, self.ys, self.grid_values, xs, ys)

    def derivatives(self, xs, ys):
        gx, gy = self._grads
        return _bilinear(self.xs, self.ys, gx, xs, ys), _bilinear(self.xs, self.ys, gy, xs, ys)


def _grid_gradient(vals, xs, ys):
    """Central differences inside, second order one-sided at the rim."""
    eo = 2 if min(len(xs), len(ys)) >= 3 else 1
    gx = np.gradient(vals, xs, axis=0, edge_order=eo) if len(xs) > 1 else np.zeros_like(vals)
    gy = np.gradient(vals, ys, axis=1, edge_order=eo) if len(ys) > 1 else np.zeros_like(vals)
    return gx, gy


# charts and grids -------------------------------------------------------

def _chart_shift(chart, dx, dy):
    if chart is None:
        return None
    x0, x1, y0, y1 = chart
    return (x0 + dx, x1 + dx, y0 + dy, y1 + dy)


def _chart_meet(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), min(a[3], b[3]))


def _chart_join(a, b):
    if a is None or b is None:
        return None
    return (min(a[0], b[0]), max(a[1], b[1]), min(a[2], b[2]), max(a[3], b[3]))


def _inside(chart, xs, ys):
    if chart is None:
        return np.ones(np.shape(xs), dtype=bool)
    x0, x1, y0, y1 = chart
    return ((xs >= x0 - CHART_TOL) & (xs <= x1 + CHART_TOL)
            & (ys >= y0 - CHART_TOL) & (ys <= y1 + CHART_TOL))


def _check_grid(xs, ys):
    if xs.ndim != 1 or ys.ndim != 1 or len(xs) < 1 or len(ys) < 1:
        raise SingularInterpolation("grid axes must be non-empty 1-d arrays")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise SingularInterpolation("grid axes must be strictly increasing")


@dataclass(frozen=True)
class Grid:
    xs: np.ndarray
    ys: np.ndarray

    @classmethod
    def over(cls, chart, nx: int = 201, ny: int | None = None) -> "Grid":
        x0, x1, y0, y1 = chart
        return cls(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny or nx))

    @property
    def chart(self):
        return (self.xs[0], self.xs[-1], self.ys[0], self.ys[-1])

    def mesh(self):
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return X.ravel(), Y.ravel()


def _axis_weights(axis, q):
    if len(axis) == 1:
        z = np.zeros(len(q), dtype=int)
        return z, z, np.zeros(len(q))
    i = np.clip(np.searchsorted(axis, q, side="right") - 1, 0, len(axis) - 2)
    w = (q - axis[i]) / (axis[i + 1] - axis[i])
    return i, i + 1, np.clip(w, 0.0, 1.0)


def _bilinear(xs, ys, vals, qx, qy):
    qx = np.atleast_1d(np.asarray(qx, float))
    qy = np.atleast_1d(np.asarray(qy, float))
    if not np.all(_inside((xs[0], xs[-1], ys[0], ys[-1]), qx, qy)):
        raise PathOutsideChart("point outside the sampled chart")
    i0, i1, wx = _axis_weights(xs, qx)
    j0, j1, wy = _axis_weights(ys, qy)
    wx = wx[:, None, None]
    wy = wy[:, None, None]
    out = ((1 - wx) * (1 - wy) * vals[i0, j0] + wx * (1 - wy) * vals[i1, j0]
           + (1 - wx) * wy * vals[i0, j1] + wx * wy * vals[i1, j1])
    if not np.all(np.isfinite(out)):
        raise SingularInterpolation("non-finite value in interpolated connection")
    return out


# connections ------------------------------------------------------------

class ConnectionSpec:
    dim: int
    chart = None

    def evaluate(self, xs, ys) -> tuple[np.ndarray, np.ndarray]:
        """``(Ax, Ay)`` at the given points, shape ``(N, n, n)`` each."""
        raise NotImplementedError

    def translated(self, dx: float = 0.0, dy: float = 0.0) -> "ConnectionSpec":
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class ConstantConnection(ConnectionSpec):
    cx: np.ndarray
    cy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cx", _cmat(self.cx))
        object.__setattr__(self, "cy", _cmat(self.cy))

    @classmethod
    def zero(cls, n: int) -> "ConstantConnection":
        z = np.zeros((n, n), dtype=np.complex128)
        return cls(z, z)

    @property
    def dim(self):
        return self.cx.shape[0]

    @property
    def is_zero(self):
        return not (np.any(self.cx) or np.any(self.cy))

    def evaluate(self, xs, ys):
        k = len(np.atleast_1d(xs))
        return (np.broadcast_to(self.cx, (k,) + self.cx.shape),
                np.broadcast_to(self.cy, (k,) + self.cy.shape))

    def translated(self, dx=0.0, dy=0.0):
        return self


@dataclass(frozen=True, eq=False)
class SampledConnection(ConnectionSpec):
    xs: np.ndarray
    ys: np.ndarray
    ax: np.ndarray  # (nx, ny, n, n)
    ay: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xs", np.asarray(self.xs, float))
        object.__setattr__(self, "ys", np.asarray(self.ys, float))
        object.__setattr__(self, "ax", _cmat(self.ax))
        object.__setattr__(self, "ay", _cmat(self.ay))
        _check_grid(self.xs, self.ys)
        shape = (len(self.xs), len(self.ys))
        if self.ax.shape[:2] != shape or self.ay.shape != self.ax.shape:
            raise SingularInterpolation("connection samples do not match the grid")

    @property
    def dim(self):
        return self.ax.shape[-1]

    @property
    def chart(self):
        return (self.xs[0], self.xs[-1], self.ys[0], self.ys[-1])

    @property
    def grid(self) -> Grid:
        return Grid(self.xs, self.ys)

    @property
    def is_zero(self):
        return not (np.any(self.ax) or np.any(self.ay))

    def evaluate(self, xs, ys):
        return (_bilinear(self.xs, self.ys, self.ax, xs, ys),
                _bilinear(self.xs, self.ys, self.ay, xs, ys))

    def translated(self, dx=0.0, dy=0.0):
        return SampledConnection(self.xs + dx, self.ys + dy, self.ax, self.ay)


@dataclass(frozen=True, eq=False)
class PureGaugeConnection(ConnectionSpec):
    """``A = -(dg) g^-1``; transport from ``p`` to ``q`` is ``g(q) g(p)^-1``."""

    gauge: GaugeMap

    @property
    def dim(self):
        return self.gauge.dim

    @property
    def chart(self):
        return self.gauge.chart

    def evaluate(self, xs, ys):
        xs = np.atleast_1d(np.asarray(xs, float))
        ys = np.atleast_1d(np.asarray(ys, float))
        if not np.all(_inside(self.chart, xs, ys)):
            raise PathOutsideChart("point outside the gauge's chart")
        ginv = _inverse(self.gauge.values(xs, ys))
        gx, gy = self.gauge.derivatives(xs, ys)
        return -gx @ ginv, -gy @ ginv

    def translated(self, dx=0.0, dy=0.0):
        return PureGaugeConnection(ShiftedGauge(self.gauge, dx, dy))


@dataclass(frozen=True, eq=False)
class Bump:
    """Weight ``f(x) = (1 - erf(a x + b)) / 2`` of the left-hand connection."""

    a: float
    b: float

    @classmethod
    def at(cls, seam: float, a: float = 20.0) -> "Bump":
        return cls(a, -a * seam)

    def __call__(self, xs):
        return 0.5 * (1.0 - erf(self.a * np.asarray(xs, float) + self.b))

    def shifted(self, dx: float) -> "Bump":
        return Bump(self.a, self.b - self.a * dx)


@dataclass(frozen=True, eq=False)
class GluedConnection(ConnectionSpec):
    """``f A_left + (1 - f) A_right``; each part counts as zero off its own chart."""

    left: ConnectionSpec
    right: ConnectionSpec
    bump: Bump
    seam: float

    @property
    def dim(self):
        return self.left.dim

    @property
    def chart(self):
        return _chart_join(self.left.chart, self.right.chart)

    @property
    def is_zero(self):
        return self.left.is_zero and self.right.is_zero

    def evaluate(self, xs, ys):
        xs = np.atleast_1d(np.asarray(xs, float))
        ys = np.atleast_1d(np.asarray(ys, float))
        if not np.all(_inside(self.chart, xs, ys)):
            raise PathOutsideChart("point outside the glued chart")
        n = self.dim
        f = self.bump(xs)
        ax = np.zeros((len(xs), n, n), dtype=np.complex128)
        ay = np.zeros_like(ax)
        for part, w in ((self.left, f), (self.right, 1.0 - f)):
            m = (w != 0.0) & _inside(part.chart, xs, ys)
            if m.any():
                px, py = part.evaluate(xs[m], ys[m])
                ax[m] += w[m, None, None] * px
                ay[m] += w[m, None, None] * py
        return ax, ay

    def translated(self, dx=0.0, dy=0.0):
        return GluedConnection(self.left.translated(dx, dy), self.right.translated(dx, dy),
                               self.bump.shifted(dx), self.seam + dx)


def _inverse(g: np.ndarray) -> np.ndarray:
    try:
        inv = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise SingularGauge("gauge is singular at a sample point") from None
    if not np.all(np.isfinite(inv)) or np.any(np.linalg.cond(g) > 1e12):
        raise SingularGauge("gauge is singular at a sample point")
    return inv


# transport --------------------------------------------------------------

def transport(conn: ConnectionSpec, path: PathSpec, steps: int | None = None) -> np.ndarray:
    """Parallel transport matrix along ``path`` (RK4, ``steps`` steps in total)."""
    n = conn.dim
    eye = np.eye(n, dtype=np.complex128)
    if conn.is_zero or path.is_constant():
        return eye
    steps = default_steps() if steps is None else int(steps)
    if steps < 1:
        raise ValueError("steps must be positive")
    s = path.samples
    total = s[-1, 2] - s[0, 2]
    u = eye
    for (x0, y0, t0), (x1, y1, t1) in zip(s[:-1], s[1:]):
        if x0 == x1 and y0 == y1:
            continue
        dt = t1 - t0
        k = max(1, int(round(steps * dt / total)))
        h = dt / k
        tau = np.linspace(0.0, 1.0, 2 * k + 1)
        xs = x0 + tau * (x1 - x0)
        ys = y0 + tau * (y1 - y0)
        ax, ay = conn.evaluate(xs, ys)
        ms = -(ax * ((x1 - x0) / dt) + ay * ((y1 - y0) / dt))
        u = _kernels.rk4(ms, h) @ u
    return u


# gauge action and combinations ------------------------------------------

def _grid_for(conn: ConnectionSpec, g: GaugeMap | None, grid: Grid | None) -> Grid:
    if grid is not None:
        return grid
    if isinstance(conn, SampledConnection):
        return conn.grid
    if isinstance(g, SampledGauge):
        return Grid(g.xs, g.ys)
    chart = conn.chart or (g.chart if g is not None else None)
    if chart is None:
        raise ValueError("a grid is needed to sample the transformed connection")
    return Grid.over(chart)


def gauge_act(g: GaugeMap, conn: ConnectionSpec, grid: Grid | None = None) -> ConnectionSpec:
    """``A -> g A g^-1 - (dg) g^-1`` sampled on a grid.

    A constant gauge acting on a constant connection stays constant.
    """
    if isinstance(g, ConstantGauge) and isinstance(conn, ConstantConnection):
        ginv = _inverse(g.matrix[None])[0]
        return ConstantConnection(g.matrix @ conn.cx @ ginv, g.matrix @ conn.cy @ ginv)
    grid = _grid_for(conn, g, grid)
    X, Y = grid.mesh()
    vals = g.values(X, Y)
    ginv = _inverse(vals)
    gx, gy = g.derivatives(X, Y)
    ax, ay = conn.evaluate(X, Y)
    bx = vals @ ax @ ginv - gx @ ginv
    by = vals @ ay @ ginv - gy @ ginv
    shape = (len(grid.xs), len(grid.ys), conn.dim, conn.dim)
    return SampledConnection(grid.xs, grid.ys, bx.reshape(shape), by.reshape(shape))


def affine_combine(weights, conns, grid: Grid | None = None) -> ConnectionSpec:
    """Pointwise ``sum w_i A_i`` with weights summing to one.

    Weights are numbers or vectorized functions ``w(xs, ys)``.
    """
    conns = list(conns)
    weights = list(weights)
    if len(weights) != len(conns) or not conns:
        raise ValueError("need one weight per connection")
    scalar = all(np.isscalar(w) for w in weights)
    if scalar:
        if abs(sum(weights) - 1.0) > 1e-12:
            raise WeightsNotAffine(f"weights sum to {sum(weights)!r}, not 1")
        if all(isinstance(c, ConstantConnection) for c in conns):
            return ConstantConnection(sum(w * c.cx for w, c in zip(weights, conns)),
                                      sum(w * c.cy for w, c in zip(weights, conns)))
    if grid is None:
        grid = next((c.grid for c in conns if isinstance(c, SampledConnection)), None)
        if grid is None:
            chart = next((c.chart for c in conns if c.chart is not None), None)
            if chart is None:
                raise ValueError("a grid is needed to combine these connections")
            grid = Grid.over(chart)
    X, Y = grid.mesh()
    ws = [np.full(len(X), float(w)) if np.isscalar(w) else np.asarray(w(X, Y)) for w in weights]
    bad = np.max(np.abs(np.sum(ws, axis=0) - 1.0))
    if bad > 1e-12:
        raise WeightsNotAffine(f"weights miss one by up to {bad:.3g}")
    n = conns[0].dim
    ax = np.zeros((len(X), n, n), dtype=np.complex128)
    ay = np.zeros_like(ax)
    for w, c in zip(ws, conns):
        px, py = c.evaluate(X, Y)
        ax += w[:, None, None] * px
        ay += w[:, None, None] * py
    shape = (len(grid.xs), len(grid.ys), n, n)
    return SampledConnection(grid.xs, grid.ys, ax.reshape(shape), ay.reshape(shape))


def glue_connections(right: ConnectionSpec, left: ConnectionSpec,
                     bump: Bump | None = None, seam: float | None = None) -> GluedConnection:
    """Connection that is ``left`` before the seam and ``right`` after it."""
    if seam is None:
        if left.chart is None:
            raise ValueError("seam must be given when the left chart is unbounded")
        seam = left.chart[1]
    if left.chart is not None and abs(left.chart[1] - seam) > 1e-9:
        raise ChartsNotAdjacent(f"left chart ends at {left.chart[1]}, seam at {seam}")
    if right.chart is not None and abs(right.chart[0] - seam) > 1e-9:
        raise ChartsNotAdjacent(f"right chart starts at {right.chart[0]}, seam at {seam}")
    if left.dim != right.dim:
        raise ChartsNotAdjacent("connections act on fibres of different dimension")
    return GluedConnection(left, right, bump or Bump.at(seam), float(seam))


def synthesize_gate(u, length: float = 1.0) -> ConstantConnection:
    """Constant connection whose transport along a unit-speed x-path of ``length`` is ``u``."""
    u = _cmat(u)
    # transports are invertible, and logm happily returns huge logs for singular input
    if np.linalg.cond(u) > 1e12:
        raise LogBranchFailure("singular matrix is not a transport")
    try:
        log = sla.logm(u)
    except Exception as exc:  # scipy raises a variety of errors here
        raise LogBranchFailure(f"matrix logarithm failed: {exc}") from None
    log = np.asarray(log, dtype=np.complex128)
    scale = max(1.0, np.linalg.norm(u))
    if not np.all(np.isfinite(log)) or np.linalg.norm(sla.expm(log) - u) > 1e-10 * scale:
        raise LogBranchFailure("no logarithm reproduces the matrix")
    return ConstantConnection(-log / length, np.zeros_like(log))
