"""Observability matrices and inverse condition numbers for range-only tracking.

A target at ``o`` is observed by stationary sensors at ``p_i`` through the
squared-range measurement ``z_i = 0.5 * ||p_i - o||^2``.  The known part of
the local observability matrix stacks one row ``o - p_i`` per sensor; the
unknown target input ``u`` contributes one extra row.  Everything here works
on that 2-column structure, so the 2x2 eigenproblem is solved in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import CollisionError, EmptySetError

COLLISION_TOL = 1e-9
NEG_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class ControlInput(NamedTuple):
    ux: float
    uy: float

    @property
    def norm(self) -> float:
        return math.hypot(self.ux, self.uy)


class Sym2(NamedTuple):
    """Symmetric 2x2 matrix ``[[a11, a12], [a12, a22]]``."""

    a11: float
    a12: float
    a22: float

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def __add__(self, other):  # matrix sum, not tuple concatenation
        if not isinstance(other, Sym2):
            return NotImplemented
        return Sym2(self.a11 + other.a11, self.a12 + other.a12, self.a22 + other.a22)


class SpectralPair(NamedTuple):
    lambda_min: float
    lambda_max: float


def _finite_point(p, what="point") -> Point2:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"{what} must have finite coordinates, got ({x}, {y})")
    return Point2(x, y)


@dataclass(frozen=True)
class SensorPose:
    id: int
    position: Point2

    def __post_init__(self):
        if int(self.id) != self.id or self.id < 0:
            raise ValueError(f"sensor id must be a non-negative integer, got {self.id!r}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "position", _finite_point(self.position, "sensor position"))

    @classmethod
    def at(cls, id: int, x: float, y: float) -> "SensorPose":
        return cls(id, Point2(x, y))


@dataclass(frozen=True, eq=False)
class TargetBelief:
    """Gaussian belief over a target's planar position plus its speed bound."""

    mean: Point2
    covariance: np.ndarray
    u_max: float = 0.0
    id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mean", _finite_point(self.mean, "target mean"))
        cov = np.array(self.covariance, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(cov)):
            raise ValueError("covariance must be finite")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12:
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise ValueError("covariance must be positive definite")
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)
        if not (self.u_max >= 0 and math.isfinite(self.u_max)):
            raise ValueError(f"u_max must be finite and >= 0, got {self.u_max!r}")
        object.__setattr__(self, "u_max", float(self.u_max))


def build_relative_block(sensors: Iterable[SensorPose], target_pos) -> np.ndarray:
    """Stack ``o - p_i`` for every sensor, ordered by ascending sensor id.

    Returns a read-only ``(N, 2)`` array.  Raises :class:`EmptySetError` for no
    sensors and :class:`CollisionError` when a sensor is within
    ``COLLISION_TOL`` of the target.
    """
    ordered = sorted(sensors, key=lambda s: s.id)
    if not ordered:
        raise EmptySetError("at least one sensor is required")
    ox, oy = _finite_point(target_pos, "target position")
    rows = np.array([(ox - s.position.x, oy - s.position.y) for s in ordered], dtype=float)
    dist = np.hypot(rows[:, 0], rows[:, 1])
    bad = np.flatnonzero(dist < COLLISION_TOL)
    if bad.size:
        raise CollisionError(f"sensor {ordered[bad[0]].id} collides with target at ({ox}, {oy})")
    rows.setflags(write=False)
    return rows


def symmetric_observability(block) -> Sym2:
    """``O^T O`` for a stack of 2-vectors."""
    rows = np.asarray(block, dtype=float).reshape(-1, 2)
    x, y = rows[:, 0], rows[:, 1]
    return Sym2(float(x @ x), float(x @ y), float(y @ y))


def eig_sym2(m: Sym2, det: float | None = None) -> SpectralPair:
    """Closed-form eigenvalues of a symmetric positive semidefinite 2x2 matrix.

    Negative results can only be rounding noise and are clamped to 0.

    ``det`` may carry a more accurate determinant than ``a11*a22 - a12**2``
    (see :func:`gram_spectrum`); it is used to recover the small eigenvalue
    without cancellation.
    """
    a11, a12, a22 = m
    mid = 0.5 * (a11 + a22)
    half = 0.5 * math.hypot(a11 - a22, 2.0 * a12)
    lmax = mid + half
    if det is None:
        lmin = mid - half
    elif lmax > 0:
        lmin = det / lmax
    else:
        lmin = 0.0
    if lmin < 0:
        # only rounding noise can make a PSD spectrum negative
        lmin = 0.0
    if lmax < 0:
        lmax = 0.0
    return SpectralPair(min(lmin, lmax), lmax)


def _gram_det(rows: np.ndarray) -> float:
    # Cauchy-Binet: det(O^T O) = sum over row pairs of the squared 2x2 minors
    n = len(rows)
    if n < 2:
        return 0.0
    i, j = np.triu_indices(n, 1)
    cross = rows[i, 0] * rows[j, 1] - rows[i, 1] * rows[j, 0]
    return float(cross @ cross)


def gram_spectrum(rows) -> SpectralPair:
    """Eigenvalues of ``O^T O`` computed directly from the rows of ``O``."""
    rows = np.asarray(rows, dtype=float).reshape(-1, 2)
    return eig_sym2(symmetric_observability(rows), det=_gram_det(rows))


def inverse_condition_exact(block, u) -> float:
    """``sigma_min / sigma_max`` of the block with the control row appended."""
    rows = np.vstack([np.asarray(block, dtype=float).reshape(-1, 2),
                      np.asarray(tuple(u), dtype=float).reshape(1, 2)])
    lmin, lmax = gram_spectrum(rows)
    if lmax <= 0:
        return 0.0
    return math.sqrt(lmin / lmax)


def lower_bound(block, u_max: float) -> float:
    """Input-independent lower bound on the inverse condition number.

    ``sqrt(lambda_min / (lambda_max + u_max**2))`` of the known block.  A single
    sensor always yields 0: its block has rank one whatever its geometry.
    """
    if u_max < 0:
        raise ValueError(f"u_max must be >= 0, got {u_max}")
    rows = np.asarray(block, dtype=float).reshape(-1, 2)
    if len(rows) < 2:
        return 0.0
    lmin, lmax = gram_spectrum(rows)
    denom = lmax + u_max * u_max
    if denom <= 0:
        return 0.0
    return math.sqrt(lmin / denom)


def pairwise_lower_bounds(rows, u_max: float) -> np.ndarray:
    """:func:`lower_bound` of every two-row sub-block, vectorized.

    Entries follow ``itertools.combinations(range(len(rows)), 2)`` order.
    """
    if u_max < 0:
        raise ValueError(f"u_max must be >= 0, got {u_max}")
    rows = np.asarray(rows, dtype=float).reshape(-1, 2)
    i, j = np.triu_indices(len(rows), 1)
    xi, yi, xj, yj = rows[i, 0], rows[i, 1], rows[j, 0], rows[j, 1]
    a11 = xi * xi + xj * xj
    a12 = xi * yi + xj * yj
    a22 = yi * yi + yj * yj
    cross = xi * yj - yi * xj
    lmax = 0.5 * (a11 + a22) + 0.5 * np.hypot(a11 - a22, 2.0 * a12)
    with np.errstate(invalid="ignore", divide="ignore"):
        lmin = np.where(lmax > 0, cross * cross / lmax, 0.0)
        denom = lmax + u_max * u_max
        out = np.where(denom > 0, np.sqrt(np.minimum(lmin, lmax) / denom), 0.0)
    return out


def pair_lower_bound_polar(d_io: float, alpha: float, theta_ji: float, u_max: float) -> float:
    """Two-sensor bound from polar geometry.

    ``alpha = d_jo / d_io`` and ``theta_ji`` is the bearing of sensor j minus the
    bearing of sensor i, both seen from the target.
    """
    if not d_io > 0:
        raise ValueError(f"d_io must be > 0, got {d_io}")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    a2 = alpha * alpha
    c2 = math.cos(2.0 * theta_ji)
    # sin^2 is pi-periodic; shifting by a float pi first makes theta = pi exact
    sn = math.sin(theta_ji - math.copysign(math.pi, theta_ji) if abs(theta_ji) > math.pi / 2 else theta_ji)
    root = math.sqrt(max(1.0 + a2 * a2 + 2.0 * a2 * c2, 0.0))
    # 1 + a2 - root rewritten without cancellation (1 - cos 2t = 2 sin^2 t)
    num = 4.0 * a2 * sn * sn / (1.0 + a2 + root)
    den = 1.0 + a2 + root + 2.0 * u_max * u_max / (d_io * d_io)
    return math.sqrt(num / den)


def wrap_angle(theta: float) -> float:
    """Wrap to the half-open interval (-pi, pi]."""
    w = math.remainder(theta, 2.0 * math.pi)
    return math.pi if w <= -math.pi else w


def to_polar(sensor_i: SensorPose, sensor_j: SensorPose, target_pos) -> tuple[float, float, float]:
    """``(d_io, d_jo, theta_ji)`` for a sensor pair around a target."""
    o = _finite_point(target_pos, "target position")
    out = []
    for s in (sensor_i, sensor_j):
        dx, dy = s.position.x - o.x, s.position.y - o.y
        d = math.hypot(dx, dy)
        if d < COLLISION_TOL:
            raise CollisionError(f"sensor {s.id} collides with target at {tuple(o)}")
        out.append((d, math.atan2(dy, dx)))
    (d_i, th_i), (d_j, th_j) = out
    return d_i, d_j, wrap_angle(th_j - th_i)


def pair_bound_from_geometry(sensor_i: SensorPose, sensor_j: SensorPose, target_pos,
                             u_max: float) -> float:
    d_i, d_j, th = to_polar(sensor_i, sensor_j, target_pos)
    return pair_lower_bound_polar(d_i, d_j / d_i, th, u_max)


def sensors_from_xy(points: Sequence, start_id: int = 1) -> list[SensorPose]:
    """Convenience: number a list of ``(x, y)`` positions from ``start_id``."""
    return [SensorPose.at(start_id + k, x, y) for k, (x, y) in enumerate(points)]
