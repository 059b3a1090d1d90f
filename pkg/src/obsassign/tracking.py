"""EKF range-only tracking with observability-driven sensor selection.

The filter uses a random-walk process model (the target input is unknown):
``Q = (u_max * dt)^2 I``.  Measurements are squared ranges
``z = 0.5 * ||p - o||^2`` with additive Gaussian noise, so the measurement
Jacobian ``(o - p)^T`` is exactly one row of the observability block.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .assignment import greedy_general, greedy_unique_pairs, pair_bound_weight
from .config import Adversarial, Circular, ScenarioConfig, Waypoints
from .errors import CollisionError, SingularCovarianceError, TooFewSensorsError
from .measures import MeasureContext, inverse_sqrt_spd, relative_rows
from .serialize import dumps, fmt as _fmt
from .observability import (
    COLLISION_TOL,
    ControlInput,
    Point2,
    SensorPose,
    TargetBelief,
    inverse_condition_exact,
    lower_bound,
)

JITTER_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class EkfState:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        m = np.array(self.mean, dtype=float).reshape(2)
        c = _spd(np.array(self.covariance, dtype=float).reshape(2, 2))
        m.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "covariance", c)


def _spd(c: np.ndarray) -> np.ndarray:
    c = 0.5 * (c + c.T)
    lmin = np.linalg.eigvalsh(c)[0]
    if lmin < JITTER_FLOOR:
        c = c + (JITTER_FLOOR - lmin) * np.eye(2)
    return c


def ekf_predict(state: EkfState, u_max: float, dt: float) -> EkfState:
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    q = (u_max * dt) ** 2
    return EkfState(state.mean, state.covariance + q * np.eye(2))


def measure_range(sensor: SensorPose, position) -> float:
    dx = position[0] - sensor.position.x
    dy = position[1] - sensor.position.y
    return 0.5 * (dx * dx + dy * dy)


def ekf_update(state: EkfState, sensor: SensorPose, z: float, noise_var: float) -> EkfState:
    """One scalar EKF update with ``h(x) = 0.5 ||p - x||^2``, Joseph form."""
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    x, P = state.mean, state.covariance
    H = np.array([x[0] - sensor.position.x, x[1] - sensor.position.y])
    if math.hypot(*H) < COLLISION_TOL:
        raise CollisionError(f"estimate coincides with sensor {sensor.id}; Jacobian vanishes")
    PH = P @ H
    S = float(H @ PH) + noise_var
    K = PH / S
    innovation = z - measure_range(sensor, x)
    A = np.eye(2) - np.outer(K, H)
    P_new = A @ P @ A.T + noise_var * np.outer(K, K)
    return EkfState(x + K * innovation, P_new)


def mahalanobis(belief: TargetBelief, sensor: SensorPose) -> float:
    cov = np.asarray(belief.covariance)
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
    if not det > 0:
        raise SingularCovarianceError("covariance is singular")
    d = np.array([belief.mean.x - sensor.position.x, belief.mean.y - sensor.position.y])
    w = inverse_sqrt_spd(cov) @ d
    return float(math.sqrt(w @ w))


def adversarial_step(target_true, sensors: Sequence[SensorPose], u_max: float, dt: float,
                     sample_count: int = 64) -> ControlInput:
    """Control in the speed ball that minimizes the exact inverse condition number.

    Candidates are the zero control followed by ``sample_count`` equally spaced
    boundary controls; each is scored at the position it leads to, with the
    control itself as the unknown-input row.  The first minimum wins.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    o = np.asarray(tuple(target_true), dtype=float)
    cands = [ControlInput(0.0, 0.0)]
    if u_max > 0:
        phis = 2 * math.pi * np.arange(sample_count) / sample_count
        cands += [ControlInput(u_max * math.cos(p), u_max * math.sin(p)) for p in phis]
    pos = np.array([s.position for s in sensors], dtype=float)
    best, best_val = cands[0], math.inf
    for u in cands:
        nxt = o + dt * np.array(u)
        rows = nxt - pos
        if np.min(np.hypot(rows[:, 0], rows[:, 1])) < COLLISION_TOL:
            continue
        val = inverse_condition_exact(rows, u)
        if val < best_val:
            best, best_val = u, val
    return best


class TraceRow(NamedTuple):
    step: int
    target_id: int
    sensor_ids: tuple
    omega: float
    err: float
    cov_trace: float
    true_x: float
    true_y: float
    est_x: float
    est_y: float


CSV_COLUMNS = list(TraceRow._fields)


@dataclass
class SimulationTrace:
    rows: list = field(default_factory=list)
    name: str = ""

    def for_target(self, tid: int) -> list:
        return [r for r in self.rows if r.target_id == tid]

    def target_ids(self) -> list:
        return sorted({r.target_id for r in self.rows})

    def column(self, name: str, target_id: int | None = None) -> np.ndarray:
        rows = self.rows if target_id is None else self.for_target(target_id)
        return np.array([getattr(r, name) for r in rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.step, r.target_id, ";".join(str(s) for s in r.sensor_ids),
                        *(_fmt(v) for v in r[3:])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, name: str = "") -> "SimulationTrace":
        rd = csv.reader(io.StringIO(text))
        header = next(rd)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected trace header {header}")
        rows = []
        for rec in rd:
            sids = tuple(int(s) for s in rec[2].split(";")) if rec[2] else ()
            rows.append(TraceRow(int(rec[0]), int(rec[1]), sids, *(float(v) for v in rec[3:])))
        return cls(rows, name)

    def rounded(self) -> "SimulationTrace":
        """Copy with floats rounded to the 9 significant digits used on disk."""
        return SimulationTrace([r._replace(**{k: float(_fmt(getattr(r, k))) for k in CSV_COLUMNS[3:]})
                                for r in self.rows], self.name)


def pair_switches(rows) -> int:
    return sum(1 for a, b in zip(rows, rows[1:]) if a.sensor_ids != b.sensor_ids)


def summarize(trace: SimulationTrace, cfg: ScenarioConfig | None = None) -> dict:
    """Means, final values and pair-switch counts per target."""
    out = {"name": trace.name, "steps": max((r.step for r in trace.rows), default=0), "targets": {}}
    for tid in trace.target_ids():
        rows = trace.for_target(tid)
        om, err, ct = (np.array([getattr(r, k) for r in rows]) for k in ("omega", "err", "cov_trace"))
        entry = {
            "mean_omega": float(om.mean()), "mean_err": float(err.mean()),
            "mean_cov_trace": float(ct.mean()),
            "final_omega": float(om[-1]), "final_err": float(err[-1]),
            "final_cov_trace": float(ct[-1]),
            "pair_switches": pair_switches(rows),
            "corr_omega_cov_trace": _corr(om, ct),
        }
        if cfg is not None:
            spec = next((t for t in cfg.targets if t.id == tid), None)
            if spec is not None and isinstance(spec.motion, Adversarial):
                ceil = attainable_ceiling(rows, cfg, spec.u_max)
                frac = float(np.mean(om >= cfg.adversarial_threshold * ceil))
                entry["adversarial_threshold"] = cfg.adversarial_threshold
                entry["fraction_above_threshold"] = frac
        out["targets"][str(tid)] = entry
    return out


def _corr(a, b) -> float | None:
    if len(a) < 2 or np.std(a) == 0 or np.std(b) == 0:
        return None
    return float(np.corrcoef(a, b)[0, 1])


def attainable_ceiling(rows, cfg: ScenarioConfig, u_max: float) -> np.ndarray:
    """Best two-sensor bound reachable at each step given ``d_io``.

    ``d_io`` is the distance from the previous estimate to the lower-id sensor
    of the chosen pair; the ceiling is the bound at equal distances and a
    right angle, ``1 / sqrt(1 + u_max^2 / d_io^2)``.
    """
    by_id = {s.id: s for s in cfg.sensors}
    out = []
    prev = None
    for r in rows:
        ref = prev if prev is not None else (r.est_x, r.est_y)
        if not r.sensor_ids:
            out.append(1.0)
        else:
            s = by_id[r.sensor_ids[0]]
            d = math.dist(ref, s.position)
            out.append(1.0 / math.sqrt(1.0 + (u_max / d) ** 2) if d > 0 else 0.0)
        prev = (r.est_x, r.est_y)
    return np.array(out)


class _Target:
    def __init__(self, spec, rng, cfg):
        self.spec = spec
        self.true = np.array([spec.x, spec.y], dtype=float)
        mean = self.true + cfg.init_spread * rng.standard_normal(2)
        self.ekf = EkfState(mean, cfg.init_cov * np.eye(2))
        self.wp_index = 0
        self.k = 0
        if isinstance(spec.motion, Circular):
            cx, cy = spec.motion.center
            self.phase = math.atan2(spec.y - cy, spec.x - cx)

    def belief(self) -> TargetBelief:
        return TargetBelief(Point2(*self.ekf.mean), self.ekf.covariance, self.spec.u_max, self.spec.id)

    def move(self, dt, chosen_sensors):
        m = self.spec.motion
        self.k += 1
        if m is None:
            return
        if isinstance(m, Circular):
            ang = self.phase + m.angular_rate * self.k * dt
            self.true = np.array([m.center[0] + m.radius * math.cos(ang),
                                  m.center[1] + m.radius * math.sin(ang)])
        elif isinstance(m, Waypoints):
            budget = m.speed * dt
            for _ in range(2 * len(m.points) + 1):
                if budget <= 0 or self.wp_index >= len(m.points):
                    break
                goal = np.array(m.points[self.wp_index])
                gap = float(np.hypot(*(goal - self.true)))
                if gap <= budget:
                    self.true = goal
                    budget -= gap
                    self.wp_index += 1
                    if m.loop and self.wp_index == len(m.points):
                        self.wp_index = 0
                else:
                    self.true = self.true + (goal - self.true) * (budget / gap)
                    budget = 0
        elif isinstance(m, Adversarial):
            if len(chosen_sensors) == 0:
                return
            u = adversarial_step(self.true, chosen_sensors, m.u_max, dt, m.sample_count)
            self.true = self.true + dt * np.array(u)


def _best_pair(sensors, ctx, u_max, anchor=None):
    # highest bound wins; ties go to the smallest (id, id)
    best = None
    for si, sj in itertools.combinations(sensors, 2):
        if anchor is not None and anchor not in (si.id, sj.id):
            continue
        w = lower_bound(relative_rows((si, sj), ctx), u_max)
        if best is None or w > best[0]:
            best = (w, (si.id, sj.id))
    return best[1]


def select_sensors(cfg: ScenarioConfig, beliefs: list) -> dict:
    """Sensor ids chosen for every target from the current beliefs."""
    st = cfg.strategy
    sensors = sorted(cfg.sensors, key=lambda s: s.id)
    mode = cfg.distance_mode
    if st.kind == "GreedyUniquePairs":
        res = greedy_unique_pairs(sensors, beliefs, pair_bound_weight(mode, cfg.epsilon))
        return {tid: pair for tid, pair in res.by_target().items()}
    if st.kind == "GreedyGeneral":
        res = greedy_general(sensors, beliefs, st.measure, epsilon=cfg.epsilon, distance_mode=mode)
        return dict(res.bundles)
    out = {}
    for b in beliefs:
        ctx = MeasureContext(b, cfg.epsilon, mode)
        if st.kind == "FlexibleBestPair":
            out[b.id] = _best_pair(sensors, ctx, b.u_max)
        elif st.kind == "FlexiblePartnerFor":
            out[b.id] = _best_pair(sensors, ctx, b.u_max, anchor=st.sensors[0])
        else:
            out[b.id] = tuple(st.sensors)
    return out


def run_scenario(cfg: ScenarioConfig, seed=None) -> SimulationTrace:
    """Simulate ``cfg.steps`` timesteps; deterministic for a given seed.

    Each step: choose sensors from the previous estimates, move the true
    targets (an adversarial target sees the chosen sensors), then EKF predict
    and one update per chosen sensor.
    """
    if cfg.strategy.kind in ("FlexibleBestPair", "FlexiblePartnerFor") and len(cfg.sensors) < 2:
        raise TooFewSensorsError(f"{cfg.strategy.kind} needs at least two sensors, got {len(cfg.sensors)}")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    targets = [_Target(t, rng, cfg) for t in sorted(cfg.targets, key=lambda t: t.id)]
    by_id = {s.id: s for s in cfg.sensors}
    trace = SimulationTrace(name=cfg.name)
    noise_sd = math.sqrt(cfg.noise_var)
    for k in range(1, cfg.steps + 1):
        beliefs = [t.belief() for t in targets]
        chosen = select_sensors(cfg, beliefs)
        for t, b in zip(targets, beliefs):
            sids = tuple(sorted(chosen.get(t.spec.id, ())))
            group = [by_id[s] for s in sids]
            ctx = MeasureContext(b, cfg.epsilon, cfg.distance_mode)
            omega = lower_bound(relative_rows(group, ctx), b.u_max) if group else 0.0
            t.move(cfg.dt, group)
            state = ekf_predict(t.ekf, t.spec.u_max, cfg.dt)
            for s in group:
                z = measure_range(s, t.true) + noise_sd * rng.standard_normal()
                state = ekf_update(state, s, z, cfg.noise_var)
            t.ekf = state
            err = float(np.hypot(*(state.mean - t.true)))
            trace.rows.append(TraceRow(k, t.spec.id, sids, omega, err,
                                       float(np.trace(state.covariance)),
                                       float(t.true[0]), float(t.true[1]),
                                       float(state.mean[0]), float(state.mean[1])))
    return trace


def derive_seed(master: int, *keys: int) -> int:
    """Independent per-trial seed from a master seed and integer keys."""
    return int(np.random.SeedSequence([master, *keys]).generate_state(1)[0])


def write_outputs(trace: SimulationTrace, cfg: ScenarioConfig, out_dir) -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = cfg.name or "trace"
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}_summary.json"
    csv_path.write_text(trace.to_csv())
    json_path.write_text(dumps(summarize(trace, cfg)))
    return csv_path, json_path
