"""JSON scenario and sweep configurations.

Units: positions in meters, speeds in meters/second, ``dt`` in seconds,
``noise_var`` in m^4 (the measurement is a squared range).  Validation
collects every problem with a path such as ``targets[1].motion.radius``
and raises a single :class:`~obsassign.errors.ConfigError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .measures import DistanceMode, MeasureKind
from .observability import SensorPose


@dataclass(frozen=True)
class Circular:
    center: tuple
    radius: float
    angular_rate: float  # rad/s; the start phase comes from the target's x, y


@dataclass(frozen=True)
class Waypoints:
    points: tuple
    speed: float
    loop: bool = False


@dataclass(frozen=True)
class Adversarial:
    u_max: float
    sample_count: int = 64


@dataclass(frozen=True)
class Strategy:
    """Sensor-selection rule applied at every timestep.

    ``kind`` is one of FlexibleBestPair, FlexiblePartnerFor, FixedPair,
    GreedyUniquePairs, GreedyGeneral.
    """

    kind: str
    sensors: tuple = ()
    measure: MeasureKind | None = None

    def label(self) -> str:
        if self.kind == "FlexiblePartnerFor":
            return f"FlexiblePartnerFor(s{self.sensors[0]})"
        if self.kind == "FixedPair":
            return "FixedPair(s{}, s{})".format(*self.sensors)
        if self.kind == "GreedyGeneral":
            return f"GreedyGeneral({self.measure.value})"
        return self.kind


STRATEGY_KINDS = ("FlexibleBestPair", "FlexiblePartnerFor", "FixedPair",
                  "GreedyUniquePairs", "GreedyGeneral")


@dataclass(frozen=True)
class TargetSpec:
    id: int
    x: float
    y: float
    u_max: float
    motion: Any = None
    covariance: tuple = ((1.0, 0.0), (0.0, 1.0))


@dataclass(frozen=True)
class ScenarioConfig:
    sensors: tuple
    targets: tuple
    strategy: Strategy = Strategy("FlexibleBestPair")
    measure: MeasureKind = MeasureKind.LOG_DET
    distance_mode: DistanceMode = DistanceMode.EUCLIDEAN
    dt: float = 1.0
    steps: int = 0
    noise_var: float = 0.01
    seed: int = 0
    epsilon: float = 1e-9
    init_cov: float = 10.0
    init_spread: float = 1.0
    adversarial_threshold: float = 0.5
    name: str = ""

    def sensor(self, sid: int) -> SensorPose:
        for s in self.sensors:
            if s.id == sid:
                return s
        raise KeyError(sid)

    def with_(self, **changes) -> "ScenarioConfig":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class SweepConfig:
    mode: str  # "pair-benchmark" or "general-benchmark"
    l_values: tuple
    n_values: tuple = ()  # general-benchmark only; pair-benchmark uses N = 2L
    trials: int = 30
    area: tuple = ((0.0, 100.0), (0.0, 100.0))
    u_max: float = 1.0
    seed: int = 0
    measure: MeasureKind = MeasureKind.LOG_DET
    workers: int = 1

    def points(self) -> list[tuple[int, int]]:
        """(L, N) grid in output order."""
        if self.mode == "pair-benchmark":
            return [(L, 2 * L) for L in self.l_values]
        return [(L, N) for L in self.l_values for N in self.n_values]


class _Checker:
    def __init__(self):
        self.problems = []

    def fail(self, path, msg):
        self.problems.append((path, msg))

    def number(self, d, key, path, default=None, minimum=None, strict=False, required=False):
        if not isinstance(d, dict) or key not in d:
            if required:
                self.fail(f"{path}.{key}".lstrip("."), "is required")
            return default
        v = d[key]
        p = f"{path}.{key}".lstrip(".")
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(p, f"must be a finite number, got {v!r}")
            return default
        if minimum is not None and (v <= minimum if strict else v < minimum):
            self.fail(p, f"must be {'>' if strict else '>='} {minimum}, got {v!r}")
            return default
        return float(v)

    def integer(self, d, key, path, default=None, minimum=None, required=False):
        if not isinstance(d, dict) or key not in d:
            if required:
                self.fail(f"{path}.{key}".lstrip("."), "is required")
            return default
        v = d[key]
        p = f"{path}.{key}".lstrip(".")
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(p, f"must be an integer, got {v!r}")
            return default
        if minimum is not None and v < minimum:
            self.fail(p, f"must be >= {minimum}, got {v!r}")
            return default
        return v

    def point(self, v, path):
        if (not isinstance(v, (list, tuple)) or len(v) != 2
                or any(isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c)
                       for c in v)):
            self.fail(path, f"must be a pair of finite numbers, got {v!r}")
            return None
        return (float(v[0]), float(v[1]))

    def enum(self, d, key, path, parse, default):
        if not isinstance(d, dict) or key not in d:
            return default
        try:
            return parse(d[key])
        except (ValueError, TypeError) as exc:
            self.fail(f"{path}.{key}".lstrip("."), str(exc))
            return default


def _parse_motion(c: _Checker, m, path, target_xy, u_max, dt):
    if m is None:
        return None
    if not isinstance(m, dict):
        c.fail(path, f"must be an object, got {type(m).__name__}")
        return None
    kind = str(m.get("type", "")).lower()
    allowed = {"circular": {"center", "radius", "angular_rate"}, "waypoints": {"points", "speed", "loop"},
               "adversarial": {"u_max", "sample_count"}}.get(kind)
    if allowed is not None:
        _unknown_keys(c, m, allowed | {"type"}, path)
    if kind == "circular":
        center = c.point(m.get("center"), f"{path}.center")
        radius = c.number(m, "radius", path, minimum=0, strict=True, required=True)
        rate = c.number(m, "angular_rate", path, required=True)
        if center is None or radius is None or rate is None:
            return None
        if target_xy is not None:
            d = math.dist(center, target_xy)
            if abs(d - radius) > 1e-6 * max(1.0, radius):
                c.fail(f"{path}.radius", f"target start is {d:.6g} m from the center, not on the "
                                         f"circle of radius {radius:.6g}")
        if u_max is not None and dt is not None:
            step = 2 * radius * math.sin(min(abs(rate) * dt, math.pi) / 2)
            if step > u_max * dt * (1 + 1e-12):
                c.fail(f"{path}.angular_rate",
                       f"per-step displacement {step:.6g} m exceeds u_max*dt = {u_max * dt:.6g} m")
        return Circular(center, radius, rate)
    if kind == "waypoints":
        pts = m.get("points")
        if not isinstance(pts, list) or not pts:
            c.fail(f"{path}.points", "must be a non-empty list of [x, y]")
            return None
        parsed = [c.point(p, f"{path}.points[{k}]") for k, p in enumerate(pts)]
        speed = c.number(m, "speed", path, minimum=0, required=True)
        if speed is not None and u_max is not None and speed > u_max:
            c.fail(f"{path}.speed", f"must be <= target u_max {u_max:.6g}, got {speed!r}")
        loop = m.get("loop", False)
        if not isinstance(loop, bool):
            c.fail(f"{path}.loop", f"must be a boolean, got {loop!r}")
        if None in parsed or speed is None:
            return None
        return Waypoints(tuple(parsed), speed, bool(loop))
    if kind == "adversarial":
        samples = c.integer(m, "sample_count", path, default=64, minimum=2)
        um = c.number(m, "u_max", path, default=u_max, minimum=0)
        if um is not None and u_max is not None and um > u_max:
            c.fail(f"{path}.u_max", f"must be <= target u_max {u_max:.6g}")
        if samples is None or um is None:
            return None
        return Adversarial(um, samples)
    c.fail(f"{path}.type", f"unknown motion type {m.get('type')!r}; expected circular, waypoints or adversarial")
    return None


def _parse_strategy(c: _Checker, s, path, sensor_ids):
    if s is None:
        return Strategy("FlexibleBestPair")
    if isinstance(s, str):
        s = {"type": s}
    if not isinstance(s, dict):
        c.fail(path, f"must be a string or object, got {type(s).__name__}")
        return None
    kind = s.get("type")
    _unknown_keys(c, s, {"type", "sensor", "sensors", "measure"}, path)
    if kind not in STRATEGY_KINDS:
        c.fail(f"{path}.type", f"unknown strategy {kind!r}; expected one of {list(STRATEGY_KINDS)}")
        return None
    if kind == "FlexiblePartnerFor":
        sid = c.integer(s, "sensor", path, required=True)
        if sid is None:
            return None
        if sid not in sensor_ids:
            c.fail(f"{path}.sensor", f"references unknown sensor id {sid}")
        return Strategy(kind, (sid,))
    if kind == "FixedPair":
        pair = s.get("sensors")
        if (not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(v, bool) or not isinstance(v, int) for v in pair)):
            c.fail(f"{path}.sensors", f"must be a list of two sensor ids, got {pair!r}")
            return None
        if pair[0] == pair[1]:
            c.fail(f"{path}.sensors", "must name two distinct sensors")
        for k, sid in enumerate(pair):
            if sid not in sensor_ids:
                c.fail(f"{path}.sensors[{k}]", f"references unknown sensor id {sid}")
        return Strategy(kind, tuple(sorted(pair)))
    if kind == "GreedyGeneral":
        measure = c.enum(s, "measure", path, MeasureKind.parse, MeasureKind.LOG_DET)
        if not measure.submodular:
            c.fail(f"{path}.measure", f"{measure.value} is not monotone submodular")
        return Strategy(kind, (), measure)
    return Strategy(kind)


def _parse_sensors(c: _Checker, raw):
    sensors = []
    if not isinstance(raw, list) or not raw:
        c.fail("sensors", "must be a non-empty list of {id, x, y}")
        return sensors
    seen_ids, seen_pos = set(), set()
    for k, s in enumerate(raw):
        p = f"sensors[{k}]"
        if not isinstance(s, dict):
            c.fail(p, "must be an object with id, x, y")
            continue
        _unknown_keys(c, s, {"id", "x", "y"}, p)
        sid = c.integer(s, "id", p, minimum=0, required=True)
        x = c.number(s, "x", p, required=True)
        y = c.number(s, "y", p, required=True)
        if None in (sid, x, y):
            continue
        if sid in seen_ids:
            c.fail(f"{p}.id", f"duplicate sensor id {sid}")
            continue
        if (x, y) in seen_pos:
            c.fail(p, f"two sensors share position ({x}, {y})")
            continue
        seen_ids.add(sid)
        seen_pos.add((x, y))
        sensors.append(SensorPose.at(sid, x, y))
    return sensors


def _parse_covariance(c: _Checker, v, path):
    if v is None:
        return ((1.0, 0.0), (0.0, 1.0))
    try:
        a, b = v
        (s11, s12), (s21, s22) = a, b
        vals = [float(t) for t in (s11, s12, s21, s22)]
        if any(isinstance(t, bool) for t in (s11, s12, s21, s22)):
            raise TypeError
    except (TypeError, ValueError):
        c.fail(path, f"must be a 2x2 nested list, got {v!r}")
        return None
    s11, s12, s21, s22 = vals
    if not all(math.isfinite(t) for t in vals) or abs(s12 - s21) > 1e-12:
        c.fail(path, "must be finite and symmetric")
        return None
    if not (s11 > 0 and s11 * s22 - s12 * s21 > 0):
        c.fail(path, "must be positive definite")
        return None
    return ((s11, s12), (s21, s22))


SCENARIO_KEYS = {"name", "sensors", "targets", "strategy", "measure", "distance_mode", "dt", "steps",
                 "noise_var", "seed", "epsilon", "init_cov", "init_spread", "adversarial_threshold"}
SWEEP_KEYS = {"mode", "L", "N", "trials", "area", "u_max", "seed", "measure", "workers"}


def _unknown_keys(c: _Checker, data: dict, allowed: set, path=""):
    # keys starting with "_" are free-form comments
    for k in data:
        if not str(k).startswith("_") and k not in allowed:
            c.fail(f"{path}.{k}".lstrip("."), f"unknown key; expected one of {sorted(allowed)}")


def parse_scenario(data) -> ScenarioConfig:
    c = _Checker()
    if not isinstance(data, dict):
        raise ConfigError([("", f"config must be a JSON object, got {type(data).__name__}")])
    _unknown_keys(c, data, SCENARIO_KEYS)
    sensors = _parse_sensors(c, data.get("sensors"))
    sensor_ids = {s.id for s in sensors}
    dt = c.number(data, "dt", "", default=1.0, minimum=0, strict=True)
    steps = c.integer(data, "steps", "", default=0, minimum=0)
    noise_var = c.number(data, "noise_var", "", default=0.01, minimum=0, strict=True)
    seed = c.integer(data, "seed", "", default=0, minimum=0)
    epsilon = c.number(data, "epsilon", "", default=1e-9, minimum=0, strict=True)
    init_cov = c.number(data, "init_cov", "", default=10.0, minimum=0, strict=True)
    init_spread = c.number(data, "init_spread", "", default=1.0, minimum=0)
    threshold = c.number(data, "adversarial_threshold", "", default=0.5, minimum=0)
    measure = c.enum(data, "measure", "", MeasureKind.parse, MeasureKind.LOG_DET)
    mode = c.enum(data, "distance_mode", "", DistanceMode.parse, DistanceMode.EUCLIDEAN)
    strategy = _parse_strategy(c, data.get("strategy"), "strategy", sensor_ids)

    targets = []
    raw_t = data.get("targets")
    if not isinstance(raw_t, list):
        c.fail("targets", "must be a list of {id, x, y, u_max, motion}")
        raw_t = []
    seen = set()
    for k, t in enumerate(raw_t):
        p = f"targets[{k}]"
        if not isinstance(t, dict):
            c.fail(p, "must be an object")
            continue
        _unknown_keys(c, t, {"id", "x", "y", "u_max", "motion", "covariance"}, p)
        tid = c.integer(t, "id", p, minimum=0, required=True)
        x = c.number(t, "x", p, required=True)
        y = c.number(t, "y", p, required=True)
        u_max = c.number(t, "u_max", p, default=0.0, minimum=0)
        if tid is not None and tid in seen:
            c.fail(f"{p}.id", f"duplicate target id {tid}")
        seen.add(tid)
        xy = (x, y) if None not in (x, y) else None
        motion = _parse_motion(c, t.get("motion"), f"{p}.motion", xy, u_max, dt)
        cov = _parse_covariance(c, t.get("covariance"), f"{p}.covariance")
        if xy is not None:
            for s in sensors:
                if math.dist(xy, s.position) < 1e-9:
                    c.fail(p, f"target starts on sensor {s.id}")
        if None not in (tid, x, y, u_max, cov):
            targets.append(TargetSpec(tid, x, y, u_max, motion, cov))
    name = data.get("name", "")
    if not isinstance(name, str):
        c.fail("name", "must be a string")
        name = ""
    if c.problems:
        raise ConfigError(c.problems)
    return ScenarioConfig(tuple(sensors), tuple(targets), strategy, measure, mode, dt, steps,
                          noise_var, seed, epsilon, init_cov, init_spread, threshold, name)


def _int_values(c: _Checker, v, path, minimum):
    """Accept an int, an inclusive ``[lo, hi]`` range, or ``{"values": [...]}``."""
    if isinstance(v, bool):
        c.fail(path, f"must be an integer, range or value list, got {v!r}")
        return ()
    if isinstance(v, int):
        vals = [v]
    elif isinstance(v, dict) and isinstance(v.get("values"), list):
        vals = v["values"]
    elif isinstance(v, list) and len(v) == 2 and all(isinstance(t, int) and not isinstance(t, bool) for t in v):
        if v[0] > v[1]:
            c.fail(path, f"range is empty: {v!r}")
            return ()
        vals = list(range(v[0], v[1] + 1))
    else:
        c.fail(path, f"must be an integer, an inclusive [lo, hi] range or {{'values': [...]}}, got {v!r}")
        return ()
    if not vals:
        c.fail(path, "must not be empty")
        return ()
    for k, t in enumerate(vals):
        if isinstance(t, bool) or not isinstance(t, int) or t < minimum:
            c.fail(f"{path}[{k}]", f"must be an integer >= {minimum}, got {t!r}")
            return ()
    return tuple(vals)


def parse_sweep(data) -> SweepConfig:
    c = _Checker()
    if not isinstance(data, dict):
        raise ConfigError([("", f"sweep config must be a JSON object, got {type(data).__name__}")])
    _unknown_keys(c, data, SWEEP_KEYS)
    mode = data.get("mode")
    if mode not in ("pair-benchmark", "general-benchmark"):
        c.fail("mode", f"must be 'pair-benchmark' or 'general-benchmark', got {mode!r}")
    l_values = _int_values(c, data.get("L", [1, 20]), "L", 1)
    n_values = ()
    if mode == "general-benchmark":
        if "N" not in data:
            c.fail("N", "is required for general-benchmark")
        else:
            n_values = _int_values(c, data["N"], "N", 1)
    elif mode == "pair-benchmark" and data.get("N", "2L") != "2L":
        c.fail("N", "pair-benchmark only supports N = '2L'")
    trials = c.integer(data, "trials", "", default=30, minimum=1)
    seed = c.integer(data, "seed", "", default=0, minimum=0)
    workers = c.integer(data, "workers", "", default=1, minimum=1)
    u_max = c.number(data, "u_max", "", default=1.0, minimum=0)
    measure = c.enum(data, "measure", "", MeasureKind.parse, MeasureKind.LOG_DET)
    if mode == "general-benchmark" and not measure.submodular:
        c.fail("measure", f"{measure.value} is not monotone submodular")
    area = data.get("area", [[0, 100], [0, 100]])
    parsed_area = None
    if (isinstance(area, list) and len(area) == 2):
        xr = c.point(area[0], "area[0]")
        yr = c.point(area[1], "area[1]")
        if xr and yr:
            if xr[0] >= xr[1] or yr[0] >= yr[1]:
                c.fail("area", f"bounds must satisfy lo < hi, got {area!r}")
            else:
                parsed_area = (xr, yr)
    else:
        c.fail("area", f"must be [[xmin, xmax], [ymin, ymax]], got {area!r}")
    if c.problems:
        raise ConfigError(c.problems)
    return SweepConfig(mode, l_values, n_values, trials, parsed_area, u_max, seed, measure, workers)


def load_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([("", f"cannot read {path}: {exc.strerror or exc}")]) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")]) from None


def load_scenario(path) -> ScenarioConfig:
    return parse_scenario(load_json(path))


def load_sweep(path) -> SweepConfig:
    return parse_sweep(load_json(path))


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    """Inverse of :func:`parse_scenario` (used for round-trip checks)."""
    def motion(m):
        if m is None:
            return None
        if isinstance(m, Circular):
            return {"type": "circular", "center": list(m.center), "radius": m.radius,
                    "angular_rate": m.angular_rate}
        if isinstance(m, Waypoints):
            return {"type": "waypoints", "points": [list(p) for p in m.points],
                    "speed": m.speed, "loop": m.loop}
        return {"type": "adversarial", "u_max": m.u_max, "sample_count": m.sample_count}

    st = {"type": cfg.strategy.kind}
    if cfg.strategy.kind == "FlexiblePartnerFor":
        st["sensor"] = cfg.strategy.sensors[0]
    elif cfg.strategy.kind == "FixedPair":
        st["sensors"] = list(cfg.strategy.sensors)
    elif cfg.strategy.kind == "GreedyGeneral":
        st["measure"] = cfg.strategy.measure.value
    targets = []
    for t in cfg.targets:
        d = {"id": t.id, "x": t.x, "y": t.y, "u_max": t.u_max,
             "covariance": [list(r) for r in t.covariance]}
        if t.motion is not None:
            d["motion"] = motion(t.motion)
        targets.append(d)
    return {
        "name": cfg.name,
        "sensors": [{"id": s.id, "x": s.position.x, "y": s.position.y} for s in cfg.sensors],
        "targets": targets, "strategy": st, "measure": cfg.measure.value,
        "distance_mode": cfg.distance_mode.value, "dt": cfg.dt, "steps": cfg.steps,
        "noise_var": cfg.noise_var, "seed": cfg.seed, "epsilon": cfg.epsilon,
        "init_cov": cfg.init_cov, "init_spread": cfg.init_spread,
        "adversarial_threshold": cfg.adversarial_threshold,
    }
