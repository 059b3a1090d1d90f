"""Set functions scoring how well a group of sensors observes one target.

``PairLowerBound`` is the input-independent inverse-condition-number bound;
it is neither monotone nor submodular.  The other four kinds are spectral
functions of the symmetric observability matrix ``M = O^T O`` and are
monotone.  Trace, LogDet and Rank are also submodular, so greedy welfare
maximization carries its 1/2 guarantee for them.  TraceInverse is accepted
by the greedy solver but is not submodular in general (see the witness in
the test suite), so the guarantee does not hold for it.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CollisionError, DuplicateSensorError, SingularCovarianceError
from .observability import (
    COLLISION_TOL,
    SensorPose,
    Sym2,
    TargetBelief,
    gram_spectrum,
    _gram_det,
    lower_bound,
    symmetric_observability,
)

DEFAULT_EPSILON = 1e-9
CHECK_TOL = 1e-9


class MeasureKind(str, enum.Enum):
    PAIR_LOWER_BOUND = "PairLowerBound"
    TRACE = "Trace"
    LOG_DET = "LogDet"
    RANK = "Rank"
    TRACE_INVERSE = "TraceInverse"

    @classmethod
    def parse(cls, value) -> "MeasureKind":
        if isinstance(value, cls):
            return value
        for k in cls:
            if value in (k.value, k.name) or str(value).lower() == k.value.lower():
                return k
        raise ValueError(f"unknown measure kind {value!r}; expected one of "
                         f"{[k.value for k in cls]}")

    @property
    def submodular(self) -> bool:
        return self is not MeasureKind.PAIR_LOWER_BOUND


class DistanceMode(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    MAHALANOBIS = "mahalanobis"

    @classmethod
    def parse(cls, value) -> "DistanceMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown distance mode {value!r}; expected "
                             f"'euclidean' or 'mahalanobis'") from None


@dataclass(frozen=True)
class MeasureContext:
    target: TargetBelief
    epsilon: float = DEFAULT_EPSILON
    distance_mode: DistanceMode = DistanceMode.EUCLIDEAN

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        object.__setattr__(self, "distance_mode", DistanceMode.parse(self.distance_mode))


def inverse_sqrt_spd(cov) -> np.ndarray:
    """``cov^{-1/2}`` for a 2x2 SPD matrix, in closed form.

    Uses ``sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))`` applied to
    ``A = cov^{-1}``; the identity maps to the identity exactly.
    """
    c = np.asarray(cov, dtype=float)
    det = c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0]
    if not det > 0 or not c[0, 0] > 0:
        raise SingularCovarianceError("covariance is not positive definite")
    inv = np.array([[c[1, 1], -c[0, 1]], [-c[1, 0], c[0, 0]]]) / det
    s = math.sqrt(inv[0, 0] * inv[1, 1] - inv[0, 1] * inv[1, 0])
    t = math.sqrt(inv[0, 0] + inv[1, 1] + 2.0 * s)
    return (inv + s * np.eye(2)) / t


def relative_rows(sensors: Iterable[SensorPose], ctx: MeasureContext) -> np.ndarray:
    """Rows ``o - p_i`` (optionally whitened by ``Sigma^{-1/2}``), by sensor id."""
    ordered = sorted(sensors, key=lambda s: s.id)
    if not ordered:
        return np.zeros((0, 2))
    ox, oy = ctx.target.mean
    rows = np.array([(ox - s.position.x, oy - s.position.y) for s in ordered], dtype=float)
    dist = np.hypot(rows[:, 0], rows[:, 1])
    bad = np.flatnonzero(dist < COLLISION_TOL)
    if bad.size:
        raise CollisionError(f"sensor {ordered[bad[0]].id} collides with target {ctx.target.id}")
    if ctx.distance_mode is DistanceMode.MAHALANOBIS:
        w = inverse_sqrt_spd(ctx.target.covariance)
        rows = rows @ w.T
    return rows


def _regularized(m: Sym2, eps: float) -> Sym2:
    return Sym2(m.a11 + eps, m.a12, m.a22 + eps)


def trace_inverse_raw(sensors: Iterable[SensorPose], ctx: MeasureContext) -> float:
    """``tr((M + eps I)^{-1})`` without the sign flip used by :func:`evaluate`."""
    rows = relative_rows(sensors, ctx)
    r = _regularized(symmetric_observability(rows), ctx.epsilon)
    return r.trace / _regularized_det(rows, ctx.epsilon)


def _regularized_det(rows: np.ndarray, eps: float) -> float:
    # det(M + eps I) = det M + eps tr M + eps^2, with det M from the row minors
    return _gram_det(rows) + eps * symmetric_observability(rows).trace + eps * eps


def evaluate(kind, sensors: Iterable[SensorPose], ctx: MeasureContext) -> float:
    kind = MeasureKind.parse(kind)
    rows = relative_rows(sensors, ctx)
    eps = ctx.epsilon
    if kind is MeasureKind.PAIR_LOWER_BOUND:
        return lower_bound(rows, ctx.target.u_max) if len(rows) else 0.0
    m = symmetric_observability(rows)
    if kind is MeasureKind.TRACE:
        return m.trace
    if kind is MeasureKind.LOG_DET:
        return math.log(_regularized_det(rows, eps))
    if kind is MeasureKind.RANK:
        lmin, lmax = gram_spectrum(rows) if len(rows) else (0.0, 0.0)
        return float((lmin > eps) + (lmax > eps))
    r = _regularized(m, eps)
    return -r.trace / _regularized_det(rows, eps)


def marginal_gain(kind, base: Iterable[SensorPose], extra: SensorPose,
                  ctx: MeasureContext) -> float:
    base = list(base)
    if any(s.id == extra.id for s in base):
        raise DuplicateSensorError(f"sensor {extra.id} is already in the base set")
    return evaluate(kind, base + [extra], ctx) - evaluate(kind, base, ctx)


@dataclass(frozen=True)
class Violation:
    property: str  # "monotone" or "submodular"
    A: tuple
    B: tuple
    s: int
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class PropertyReport:
    kind: MeasureKind
    trials: int
    monotone_violations: list = field(default_factory=list)
    submodular_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.monotone_violations and not self.submodular_violations

    @property
    def violations(self) -> list:
        return self.monotone_violations + self.submodular_violations


class _Cached:
    def __init__(self, kind, universe, ctx):
        self.kind, self.ctx = kind, ctx
        self.by_id = {s.id: s for s in universe}
        self.memo = {}

    def __call__(self, ids) -> float:
        key = frozenset(ids)
        if key not in self.memo:
            self.memo[key] = evaluate(self.kind, [self.by_id[i] for i in key], self.ctx)
        return self.memo[key]


def _test_triple(f, A, B, s, tol, report):
    fA, fB = f(A), f(B)
    fAs, fBs = f(A | {s}), f(B | {s})
    key = (tuple(sorted(A)), tuple(sorted(B)), s)
    for base, fb, fbs in ((A, fA, fAs), (B, fB, fBs)):
        if fbs < fb - tol:
            report.monotone_violations.append(
                Violation("monotone", tuple(sorted(base)), tuple(sorted(base)), s, fbs, fb))
    gain_a, gain_b = fAs - fA, fBs - fB
    if gain_a < gain_b - tol:
        report.submodular_violations.append(Violation("submodular", *key, gain_a, gain_b))


def check_submodular_monotone(kind, universe: Sequence[SensorPose], ctx: MeasureContext,
                              trials: int, rng=None, tol: float = CHECK_TOL,
                              exhaustive: bool = False) -> PropertyReport:
    """Search for monotonicity / submodularity counter-examples.

    Samples ``A ⊆ B ⊂ universe`` and ``s ∉ B``; with ``exhaustive=True`` every
    such triple is checked instead (only sensible for small universes).
    Violations carry the witness sets as sorted id tuples.
    """
    kind = MeasureKind.parse(kind)
    universe = list(universe)
    if len(universe) < 3:
        raise ValueError("need a universe of at least 3 sensors")
    rng = np.random.default_rng(rng)
    f = _Cached(kind, universe, ctx)
    ids = [s.id for s in universe]
    report = PropertyReport(kind, 0)
    if exhaustive:
        for s in ids:
            rest = [i for i in ids if i != s]
            # assign each other sensor to: outside B, in B only, in A (and B)
            for labels in itertools.product(range(3), repeat=len(rest)):
                B = {i for i, lab in zip(rest, labels) if lab >= 1}
                A = {i for i, lab in zip(rest, labels) if lab == 2}
                _test_triple(f, A, B, s, tol, report)
                report.trials += 1
        return report
    n = len(ids)
    for _ in range(trials):
        s = ids[rng.integers(n)]
        labels = rng.integers(0, 3, size=n)
        B = {i for i, lab in zip(ids, labels) if lab >= 1 and i != s}
        A = {i for i, lab in zip(ids, labels) if lab == 2 and i != s}
        _test_triple(f, A, B, s, tol, report)
        report.trials += 1
    return report
