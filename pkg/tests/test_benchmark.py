import pytest

from obsassign.benchmark import random_instance, rows_from_csv, rows_to_csv, run_sweep, summarize_sweep, trial_seed
from obsassign.config import parse_sweep

PAIR = parse_sweep({"mode": "pair-benchmark", "L": [1, 4], "trials": 3, "seed": 11})
GENERAL = parse_sweep({"mode": "general-benchmark", "L": 3, "N": {"values": [6, 9]}, "trials": 3, "seed": 11})


def test_instances_are_seeded_and_in_area():
    s1, t1 = random_instance(PAIR, 3, 6, 0)
    s2, t2 = random_instance(PAIR, 3, 6, 0)
    assert s1 == s2 and [t.mean for t in t1] == [t.mean for t in t2]
    assert all(0 <= s.position.x <= 100 and 0 <= s.position.y <= 100 for s in s1)
    assert trial_seed(11, 3, 6, 0) != trial_seed(11, 3, 6, 1)


def test_pair_rows():
    rows = run_sweep(PAIR)
    assert [(r["L"], r["trial"]) for r in rows] == [(L, k) for L in range(1, 5) for k in range(3)]
    for r in rows:
        assert r["N"] == 2 * r["L"]
        assert r["omega_greedy"] >= r["omega_mwpbm_div3"]
        assert r["omega_greedy"] <= r["omega_mwpbm"] + 1e-12
        assert r["omega_mwpbm_div3"] == pytest.approx(r["omega_mwpbm"] / 3)
    assert summarize_sweep(rows, PAIR.mode)["all_rows_at_least_third"]


def test_general_rows():
    rows = run_sweep(GENERAL)
    assert [(r["N"], r["trial"]) for r in rows] == [(n, k) for n in (6, 9) for k in range(3)]
    for r in rows:
        sizes = [r[f"size_t{t}"] for t in (1, 2, 3)]
        assert sum(sizes) == r["N"] and r["span"] == max(sizes) - min(sizes)
        assert r["n_over_l"] == r["N"] / 3
    summary = summarize_sweep(rows, GENERAL.mode)
    assert [p["N"] for p in summary["points"]] == [6, 9]


def test_parallel_equals_serial():
    assert run_sweep(PAIR, workers=2) == run_sweep(PAIR, workers=1)


@pytest.mark.parametrize("sweep", [PAIR, GENERAL])
def test_csv_round_trip(sweep):
    rows = run_sweep(sweep)
    text = rows_to_csv(rows, sweep.mode)
    back = rows_from_csv(text)
    assert rows_to_csv(back, sweep.mode) == text
    for a, b in zip(rows, back):
        assert a.keys() == b.keys()
        for k in a:
            assert b[k] == pytest.approx(a[k], rel=1e-8)
