"""Sensor-to-target assignment: unique pairs, relaxed pairs, general bundles.

Pair problems take an injected ``weight_fn(sensor_i, sensor_j, target)`` so
that the same solvers run on exact-position or Mahalanobis-distance bounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InstanceTooLargeError, TooFewPairsError, TooFewSensorsError
from .matching import max_weight_matching
from .measures import DistanceMode, MeasureContext, MeasureKind, evaluate, relative_rows
from .observability import SensorPose, TargetBelief, lower_bound, pairwise_lower_bounds

WeightFn = Callable[[SensorPose, SensorPose, TargetBelief], float]

BRUTE_FORCE_MAX_SENSORS = 10
BRUTE_FORCE_MAX_TARGETS = 4


@dataclass(frozen=True)
class PairEntry:
    target: int
    sensor_1: int
    sensor_2: int
    weight: float


@dataclass(frozen=True)
class PairAssignment:
    entries: tuple
    total_value: float
    mode: str = "unique"

    def by_target(self) -> dict:
        return {e.target: (e.sensor_1, e.sensor_2) for e in self.entries}

    def to_dict(self) -> dict:
        return {"mode": self.mode, "total_value": self.total_value,
                "entries": [{"target": e.target, "sensors": [e.sensor_1, e.sensor_2], "weight": e.weight}
                            for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "PairAssignment":
        entries = tuple(PairEntry(int(e["target"]), int(e["sensors"][0]), int(e["sensors"][1]),
                                  float(e["weight"])) for e in d["entries"])
        return cls(entries, float(d["total_value"]), d.get("mode", "unique"))


@dataclass(frozen=True)
class GeneralAssignment:
    bundles: Mapping  # target id -> tuple of sensor ids
    total_value: float

    def bundle_sizes(self) -> dict:
        return {t: len(b) for t, b in self.bundles.items()}

    def to_dict(self) -> dict:
        return {"total_value": self.total_value,
                "bundles": {str(t): list(b) for t, b in sorted(self.bundles.items())}}

    @classmethod
    def from_dict(cls, d: dict) -> "GeneralAssignment":
        bundles = {int(t): tuple(int(s) for s in b) for t, b in d["bundles"].items()}
        return cls(bundles, float(d["total_value"]))


def pair_bound_weight(distance_mode=DistanceMode.EUCLIDEAN, epsilon: float = 1e-9) -> WeightFn:
    """Weight function: two-sensor lower bound at the target's mean estimate."""
    mode = DistanceMode.parse(distance_mode)

    def weight(si: SensorPose, sj: SensorPose, target: TargetBelief) -> float:
        ctx = MeasureContext(target, epsilon, mode)
        return lower_bound(relative_rows((si, sj), ctx), target.u_max)

    def batch(ordered, target: TargetBelief) -> np.ndarray:
        # all pairs of id-sorted sensors at once, in combinations order
        ctx = MeasureContext(target, epsilon, mode)
        return pairwise_lower_bounds(relative_rows(ordered, ctx), target.u_max)

    weight.batch = batch
    return weight


def _check_unique(sensors, targets):
    if len({s.id for s in sensors}) != len(sensors):
        raise ValueError("sensor ids must be unique")
    if len({t.id for t in targets}) != len(targets):
        raise ValueError("target ids must be unique")


def _triple_weights(sensors, targets, weight_fn):
    """{(target id, s1 id, s2 id): weight} with s1 < s2.

    A ``weight_fn.batch(sorted_sensors, target)`` attribute, when present,
    supplies a whole target's pair weights in one call.
    """
    ordered = sorted(sensors, key=lambda s: s.id)
    batch = getattr(weight_fn, "batch", None)
    out = {}
    for t in sorted(targets, key=lambda t: t.id):
        pairs = list(itertools.combinations(ordered, 2))
        values = batch(ordered, t) if batch is not None else [weight_fn(si, sj, t) for si, sj in pairs]
        for (si, sj), w in zip(pairs, values):
            w = float(w)
            if not math.isfinite(w):
                raise ValueError(f"weight_fn returned {w} for ({si.id}, {sj.id}, target {t.id})")
            out[(t.id, si.id, sj.id)] = w
    return out


def _pair_assignment(chosen, mode) -> PairAssignment:
    entries = tuple(PairEntry(t, a, b, w) for (t, a, b), w in sorted(chosen.items()))
    return PairAssignment(entries, float(sum(e.weight for e in entries)), mode)


def greedy_unique_pairs(sensors: Sequence[SensorPose], targets: Sequence[TargetBelief],
                        weight_fn: WeightFn) -> PairAssignment:
    """Greedy unique-pair assignment (at least a third of the optimum).

    Each round commits the heaviest remaining ``(pair, target)`` triple and
    retires both sensors and the target.  Ties go to the smallest
    ``(target, sensor_1, sensor_2)``.  Triple weights do not depend on earlier
    rounds, so one sorted sweep is equivalent to re-scanning every round.
    """
    sensors, targets = list(sensors), list(targets)
    _check_unique(sensors, targets)
    if len(sensors) < 2 * len(targets):
        raise TooFewSensorsError(
            f"unique pair assignment needs N >= 2L sensors; got N={len(sensors)}, L={len(targets)}")
    weights = _triple_weights(sensors, targets, weight_fn)
    order = sorted(weights, key=lambda k: (-weights[k], k))
    used_s, used_t, chosen = set(), set(), {}
    for key in order:
        if len(chosen) == len(targets):
            break
        t, a, b = key
        if t in used_t or a in used_s or b in used_s:
            continue
        chosen[key] = weights[key]
        used_t.add(t)
        used_s.update((a, b))
    return _pair_assignment(chosen, "unique")


def brute_force_unique_pairs(sensors: Sequence[SensorPose], targets: Sequence[TargetBelief],
                             weight_fn: WeightFn) -> PairAssignment:
    """Exact optimum of the unique-pair problem by exhaustive search."""
    sensors, targets = list(sensors), list(targets)
    _check_unique(sensors, targets)
    if len(sensors) > BRUTE_FORCE_MAX_SENSORS or len(targets) > BRUTE_FORCE_MAX_TARGETS:
        raise InstanceTooLargeError(
            f"brute force limited to N <= {BRUTE_FORCE_MAX_SENSORS}, L <= {BRUTE_FORCE_MAX_TARGETS}")
    if len(sensors) < 2 * len(targets):
        raise TooFewSensorsError(
            f"unique pair assignment needs N >= 2L sensors; got N={len(sensors)}, L={len(targets)}")
    weights = _triple_weights(sensors, targets, weight_fn)
    tids = sorted(t.id for t in targets)
    sids = sorted(s.id for s in sensors)
    best_total, best = -math.inf, {}

    def search(k, free, acc, chosen):
        nonlocal best_total, best
        if k == len(tids):
            if acc > best_total:
                best_total, best = acc, dict(chosen)
            return
        t = tids[k]
        for a, b in itertools.combinations(free, 2):
            key = (t, a, b)
            chosen[key] = weights[key]
            search(k + 1, [s for s in free if s != a and s != b], acc + weights[key], chosen)
            del chosen[key]

    search(0, sids, 0.0, {})
    return _pair_assignment(best, "unique")


def relaxed_pair_assignment(sensors: Sequence[SensorPose], targets: Sequence[TargetBelief],
                            weight_fn: WeightFn) -> PairAssignment:
    """Optimal assignment when only the pairs (not the sensors) must be distinct.

    Solved as a maximum-weight matching between all sensor pairs and targets;
    its value upper-bounds the unique-pair optimum.
    """
    sensors, targets = list(sensors), list(targets)
    _check_unique(sensors, targets)
    n_pairs = len(sensors) * (len(sensors) - 1) // 2
    if n_pairs < len(targets):
        raise TooFewPairsError(f"need C(N,2) >= L; got C({len(sensors)},2)={n_pairs}, L={len(targets)}")
    if not targets:
        return PairAssignment((), 0.0, "relaxed")
    weights = _triple_weights(sensors, targets, weight_fn)
    pairs = list(itertools.combinations(sorted(s.id for s in sensors), 2))
    tids = sorted(t.id for t in targets)
    w = np.array([[weights[(t, a, b)] for t in tids] for a, b in pairs])
    m = max_weight_matching(w)
    chosen = {(tids[j], *pairs[i]): weights[(tids[j], *pairs[i])] for i, j in m.pairs}
    return _pair_assignment(chosen, "relaxed")


def _contexts(targets, contexts, epsilon, distance_mode):
    out = {}
    for t in targets:
        if contexts is not None and t.id in contexts:
            out[t.id] = contexts[t.id]
        else:
            out[t.id] = MeasureContext(t, epsilon, distance_mode)
    return out


def greedy_general(sensors: Sequence[SensorPose], targets: Sequence[TargetBelief], kind,
                   contexts: Mapping | None = None, epsilon: float = 1e-9,
                   distance_mode=DistanceMode.EUCLIDEAN) -> GeneralAssignment:
    """Greedy submodular-welfare assignment of sensor bundles to targets.

    Each step commits the ``(sensor, target)`` pair with the largest marginal
    gain (ties: smallest sensor id, then target id) and stops once every sensor
    is placed or no gain is positive.  ``contexts`` optionally overrides the
    per-target :class:`MeasureContext`.
    """
    kind = MeasureKind.parse(kind)
    if not kind.submodular:
        raise ValueError(f"{kind.value} is not monotone submodular; greedy welfare needs one of "
                         "Trace, LogDet, Rank, TraceInverse")
    sensors, targets = sorted(sensors, key=lambda s: s.id), sorted(targets, key=lambda t: t.id)
    _check_unique(sensors, targets)
    ctx = _contexts(targets, contexts, epsilon, distance_mode)
    bundles = {t.id: [] for t in targets}
    value = {t.id: evaluate(kind, [], ctx[t.id]) for t in targets}
    free = {s.id: s for s in sensors}

    def gains_for(tid):
        return {sid: evaluate(kind, bundles[tid] + [s], ctx[tid]) - value[tid]
                for sid, s in free.items()}

    gains = {t.id: gains_for(t.id) for t in targets}
    while free and targets:
        best = None
        for sid in free:
            for t in targets:
                g = gains[t.id][sid]
                if best is None or g > best[0]:
                    best = (g, sid, t.id)
        g, sid, tid = best
        if g <= 0:
            break
        bundles[tid].append(free.pop(sid))
        value[tid] = evaluate(kind, bundles[tid], ctx[tid])
        for t in targets:
            gains[t.id].pop(sid, None)
        gains[tid] = gains_for(tid)
    out = {tid: tuple(sorted(s.id for s in b)) for tid, b in bundles.items()}
    return GeneralAssignment(out, float(sum(value.values())))


def brute_force_general(sensors: Sequence[SensorPose], targets: Sequence[TargetBelief], kind,
                        contexts: Mapping | None = None, epsilon: float = 1e-9,
                        distance_mode=DistanceMode.EUCLIDEAN, max_sensors: int = 8) -> GeneralAssignment:
    """Exhaustive optimum over all maps sensor -> target-or-unassigned."""
    kind = MeasureKind.parse(kind)
    sensors, targets = sorted(sensors, key=lambda s: s.id), sorted(targets, key=lambda t: t.id)
    if len(sensors) > max_sensors:
        raise InstanceTooLargeError(f"exhaustive general assignment limited to {max_sensors} sensors")
    ctx = _contexts(targets, contexts, epsilon, distance_mode)
    memo = {}

    def f(tid, members):
        key = (tid, members)
        if key not in memo:
            memo[key] = evaluate(kind, [sensors[i] for i in members], ctx[tid])
        return memo[key]

    best_total, best = -math.inf, None
    for labels in itertools.product(range(len(targets) + 1), repeat=len(sensors)):
        total = 0.0
        groups = []
        for k, t in enumerate(targets):
            members = tuple(i for i, lab in enumerate(labels) if lab == k + 1)
            groups.append(members)
            total += f(t.id, members)
        if total > best_total:
            best_total = total
            best = {t.id: tuple(sensors[i].id for i in g) for t, g in zip(targets, groups)}
    return GeneralAssignment(best or {}, float(best_total if best is not None else 0.0))
