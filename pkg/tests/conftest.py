import math

import numpy as np
import pytest
from hypothesis import settings

from obsassign.observability import Point2, SensorPose, TargetBelief, sensors_from_xy

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

SQRT3 = math.sqrt(3.0)


def belief(x, y, u_max=1.0, tid=1, cov=None):
    return TargetBelief(Point2(x, y), np.eye(2) if cov is None else cov, u_max, tid)


@pytest.fixture
def case1():
    """Three sensors around a target at (sqrt3, 1)."""
    sensors = sensors_from_xy([(0.0, 0.0), (2 * SQRT3, -9.0), (SQRT3, 3.0)])
    return sensors, belief(SQRT3, 1.0)


@pytest.fixture
def case2():
    sensors = sensors_from_xy([(0.0, 0.0), (2 * SQRT3, 0.0), (SQRT3, 0.1), (SQRT3, 3.0)])
    return sensors, belief(SQRT3, 1.0)


def svd_inverse_condition(rows):
    s = np.linalg.svd(np.asarray(rows, dtype=float), compute_uv=False)
    return s[-1] / s[0] if s[0] > 0 else 0.0


def by_ids(sensors, *ids):
    table = {s.id: s for s in sensors}
    return [table[i] for i in ids]





CIRCULAR_STRATEGIES = ("FlexibleBestPair", "FlexiblePartnerFor", "FixedPair")


@pytest.fixture(scope="session")
def circular_runs():
    """Per-seed summaries of the bundled six-sensor circular scenario, 30 seeds per strategy."""
    import time

    from obsassign.cli import resolve_config
    from obsassign.config import Strategy, parse_scenario
    from obsassign.tracking import derive_seed, run_scenario, summarize

    cfg = parse_scenario(resolve_config("circular6"))
    strategies = {"FlexibleBestPair": Strategy("FlexibleBestPair"),
                  "FlexiblePartnerFor": Strategy("FlexiblePartnerFor", (2,)),
                  "FixedPair": Strategy("FixedPair", (1, 2))}
    t0 = time.perf_counter()
    out = {}
    for name, st in strategies.items():
        c = cfg.with_(strategy=st)
        out[name] = [summarize(run_scenario(c, derive_seed(cfg.seed, k)), c)["targets"]["1"] for k in range(30)]
    out["_elapsed"] = time.perf_counter() - t0
    return out
