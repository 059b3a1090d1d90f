import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import belief, by_ids
from obsassign.errors import CollisionError, DuplicateSensorError, SingularCovarianceError
from obsassign.measures import (
    DistanceMode,
    MeasureContext,
    MeasureKind,
    check_submodular_monotone,
    evaluate,
    inverse_sqrt_spd,
    marginal_gain,
    relative_rows,
    trace_inverse_raw,
)
from obsassign.observability import sensors_from_xy

EPS = 1e-9
SUBMODULAR = [MeasureKind.TRACE, MeasureKind.LOG_DET, MeasureKind.RANK, MeasureKind.TRACE_INVERSE]


def gram(sensors, target):
    rows = np.array([[target.mean.x - s.position.x, target.mean.y - s.position.y] for s in sensors])
    return rows.T @ rows if len(rows) else np.zeros((2, 2))


def mp_regularized(sensors, target, eps=EPS):
    """(det, trace of inverse) of M + eps I in 50-digit arithmetic."""
    mpmath.mp.dps = 50
    a11 = a12 = a22 = mpmath.mpf(0)
    for s in sensors:
        dx = mpmath.mpf(target.mean.x) - mpmath.mpf(s.position.x)
        dy = mpmath.mpf(target.mean.y) - mpmath.mpf(s.position.y)
        a11, a12, a22 = a11 + dx * dx, a12 + dx * dy, a22 + dy * dy
    a11, a22 = a11 + mpmath.mpf(eps), a22 + mpmath.mpf(eps)
    det = a11 * a22 - a12 * a12
    return det, (a11 + a22) / det


def random_universe(rng, n=7, spread=20.0):
    return sensors_from_xy(rng.uniform(-spread, spread, size=(n, 2))), belief(*rng.uniform(-1, 1, 2))


class TestParse:
    def test_measure_kind_aliases(self):
        assert MeasureKind.parse("logdet") is MeasureKind.LOG_DET
        assert MeasureKind.parse("TRACE_INVERSE") is MeasureKind.TRACE_INVERSE
        with pytest.raises(ValueError):
            MeasureKind.parse("Entropy")
        assert not MeasureKind.PAIR_LOWER_BOUND.submodular

    def test_distance_mode(self):
        assert DistanceMode.parse("Mahalanobis") is DistanceMode.MAHALANOBIS
        with pytest.raises(ValueError):
            DistanceMode.parse("manhattan")

    def test_context_epsilon(self):
        with pytest.raises(ValueError):
            MeasureContext(belief(0, 0), epsilon=0)


class TestValuesAgainstNumpy:
    def test_all_kinds(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            sensors, t = random_universe(rng, n=rng.integers(1, 6))
            ctx = MeasureContext(t, EPS)
            m = gram(sensors, t)
            det, tr_inv = mp_regularized(sensors, t)
            assert evaluate("Trace", sensors, ctx) == pytest.approx(np.trace(m), rel=1e-12)
            assert evaluate("LogDet", sensors, ctx) == pytest.approx(float(mpmath.log(det)), abs=1e-9)
            assert evaluate("Rank", sensors, ctx) == np.sum(np.linalg.eigvalsh(m) > EPS)
            assert evaluate("TraceInverse", sensors, ctx) == pytest.approx(-float(tr_inv), rel=1e-6)
            assert trace_inverse_raw(sensors, ctx) == pytest.approx(-evaluate("TraceInverse", sensors, ctx))

    def test_empty_set(self):
        ctx = MeasureContext(belief(0, 0), EPS)
        assert evaluate("Trace", [], ctx) == 0
        assert evaluate("Rank", [], ctx) == 0
        assert evaluate("LogDet", [], ctx) == pytest.approx(2 * math.log(EPS))
        assert evaluate("TraceInverse", [], ctx) == pytest.approx(-2 / EPS)
        assert evaluate("PairLowerBound", [], ctx) == 0

    def test_rank_of_collinear(self):
        s = sensors_from_xy([(1, 0), (2, 0), (5, 0)])
        assert evaluate("Rank", s, MeasureContext(belief(0, 0), EPS)) == 1

    def test_collision(self):
        with pytest.raises(CollisionError):
            evaluate("Trace", sensors_from_xy([(0, 0)]), MeasureContext(belief(0, 0), EPS))

    def test_row_order_does_not_matter(self):
        s = sensors_from_xy([(3, 1), (-2, 4), (0, -7)])
        ctx = MeasureContext(belief(0.5, 0.5), EPS)
        for k in MeasureKind:
            assert evaluate(k, s, ctx) == evaluate(k, s[::-1], ctx)


class TestMahalanobis:
    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-0.9, 0.9))
    def test_inverse_sqrt(self, sx, sy, rho):
        cov = np.array([[sx * sx, rho * sx * sy], [rho * sx * sy, sy * sy]])
        w = inverse_sqrt_spd(cov)
        np.testing.assert_allclose(w, w.T, atol=1e-12)
        np.testing.assert_allclose(w @ cov @ w, np.eye(2), atol=1e-9)
        assert np.all(np.linalg.eigvalsh(w) > 0)

    def test_identity_is_euclidean(self):
        s = sensors_from_xy([(3, 1), (-2, 4)])
        e = relative_rows(s, MeasureContext(belief(0, 0), EPS, "euclidean"))
        m = relative_rows(s, MeasureContext(belief(0, 0), EPS, "mahalanobis"))
        np.testing.assert_array_equal(e, m)

    def test_row_norms_are_mahalanobis_distances(self):
        cov = np.array([[4.0, 1.0], [1.0, 2.0]])
        t = belief(1.0, -1.0, cov=cov)
        s = sensors_from_xy([(3, 1), (-2, 4)])
        rows = relative_rows(s, MeasureContext(t, EPS, "mahalanobis"))
        for r, sensor in zip(rows, s):
            d = np.array([1.0 - sensor.position.x, -1.0 - sensor.position.y])
            assert np.hypot(*r) == pytest.approx(math.sqrt(d @ np.linalg.solve(cov, d)))

    def test_isotropic_scaling(self):
        s = sensors_from_xy([(2, 0)])
        rows = relative_rows(s, MeasureContext(belief(0, 0, cov=4 * np.eye(2)), EPS, "mahalanobis"))
        assert np.hypot(*rows[0]) == pytest.approx(1.0)

    def test_singular(self):
        with pytest.raises(SingularCovarianceError):
            inverse_sqrt_spd(np.zeros((2, 2)))


class TestLowerBoundSetFunction:
    def test_case1_values(self, case1):
        sensors, t = case1
        ctx = MeasureContext(t, EPS)
        assert evaluate("PairLowerBound", by_ids(sensors, 1, 3), ctx) == pytest.approx(0.5345, abs=5e-5)
        assert evaluate("PairLowerBound", sensors, ctx) == pytest.approx(0.1823, abs=5e-5)

    def test_case2_values(self, case2):
        sensors, t = case2
        ctx = MeasureContext(t, EPS)
        f = lambda *ids: evaluate("PairLowerBound", by_ids(sensors, *ids), ctx)  # noqa: E731
        assert f(1, 2) == pytest.approx(0.5345, abs=5e-5)
        assert f(1, 2, 4) == pytest.approx(0.9258, abs=5e-5)
        assert f(1, 2, 3, 4) == pytest.approx(0.8765, abs=5e-5)
        # adding any sensor to {1, 2} keeps lambda_min >= 2, so the bound stays above 0.5
        assert f(1, 2, 3) == pytest.approx(0.633580, abs=5e-6)

    def test_not_monotone(self, case1):
        sensors, t = case1
        rep = check_submodular_monotone("PairLowerBound", sensors, MeasureContext(t, EPS), 0, exhaustive=True)
        assert rep.monotone_violations
        witness = rep.monotone_violations[0]
        assert witness.lhs < witness.rhs


class TestSetProperties:
    @pytest.mark.parametrize("kind", [MeasureKind.TRACE, MeasureKind.LOG_DET, MeasureKind.RANK])
    def test_exhaustive_small_universes(self, kind):
        rng = np.random.default_rng(5)
        for _ in range(5):
            sensors, t = random_universe(rng, n=5)
            rep = check_submodular_monotone(kind, sensors, MeasureContext(t, EPS), 0, exhaustive=True)
            assert rep.ok, rep.violations[:1]
            assert rep.trials == 5 * 3 ** 4

    def test_trace_is_modular(self):
        rng = np.random.default_rng(8)
        sensors, t = random_universe(rng, n=4)
        ctx = MeasureContext(t, EPS)
        total = evaluate("Trace", sensors, ctx)
        assert total == pytest.approx(sum(evaluate("Trace", [s], ctx) for s in sensors))

    def test_trace_inverse_is_monotone(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            sensors, t = random_universe(rng, n=6)
            rep = check_submodular_monotone("TraceInverse", sensors, MeasureContext(t, EPS), 300, rng=rng)
            assert not rep.monotone_violations

    def test_trace_inverse_submodularity_witness(self):
        # regularized A-optimality is monotone but not submodular
        sensors = sensors_from_xy([(-15.0, 14.1), (12.6, -14.6), (14.7, 0.8), (9.7, -9.3), (-11.4, 13.9)])
        t = belief(0.0, 0.0)
        ctx = MeasureContext(t, EPS)
        rep = check_submodular_monotone("TraceInverse", sensors, ctx, 0, exhaustive=True)
        assert not rep.monotone_violations
        assert any(v.A == (4, 5) and v.B == (1, 4, 5) and v.s == 2 for v in rep.submodular_violations)

        def f(*ids):
            return -mp_regularized(by_ids(sensors, *ids), t)[1]

        gain_small = f(2, 4, 5) - f(4, 5)
        gain_large = f(1, 2, 4, 5) - f(1, 4, 5)
        assert gain_large - gain_small > mpmath.mpf("0.03")
        for v in rep.submodular_violations:
            assert set(v.A) <= set(v.B) and v.s not in v.B and v.lhs < v.rhs

    def test_sampler_respects_subset_structure(self):
        rng = np.random.default_rng(0)
        sensors, t = random_universe(rng, n=6)
        rep = check_submodular_monotone("Trace", sensors, MeasureContext(t, EPS), 200, rng=1)
        assert rep.trials == 200 and rep.ok

    def test_universe_too_small(self):
        with pytest.raises(ValueError):
            check_submodular_monotone("Trace", sensors_from_xy([(1, 0), (0, 1)]),
                                      MeasureContext(belief(5, 5), EPS), 10)


def test_marginal_gain():
    s = sensors_from_xy([(3, 0), (0, 4)])
    ctx = MeasureContext(belief(0, 0), EPS)
    assert marginal_gain("Trace", [s[0]], s[1], ctx) == pytest.approx(16)
    with pytest.raises(DuplicateSensorError):
        marginal_gain("Trace", [s[0]], s[0], ctx)
