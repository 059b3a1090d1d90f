"""Seeded Monte Carlo sweeps: greedy vs. relaxed pair assignment, and bundle
evenness of greedy general assignment.

Every trial draws its own instance from a seed derived from
``(master seed, L, N, trial)``, so trials are independent and may run in any
order or in parallel; rows are sorted before they are returned.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .assignment import greedy_general, greedy_unique_pairs, pair_bound_weight, relaxed_pair_assignment
from .config import SweepConfig
from .observability import Point2, TargetBelief, sensors_from_xy
from .serialize import fmt

PAIR_COLUMNS = ["L", "N", "trial", "omega_greedy", "omega_mwpbm", "omega_mwpbm_div3"]


def trial_seed(master: int, L: int, N: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, L, N, trial]).generate_state(1)[0])


def random_instance(sweep: SweepConfig, L: int, N: int, trial: int):
    """Uniform sensors (ids 1..N) and targets (ids 1..L) in the sweep area."""
    rng = np.random.default_rng(trial_seed(sweep.seed, L, N, trial))
    (x0, x1), (y0, y1) = sweep.area
    lo, hi = np.array([x0, y0]), np.array([x1, y1])
    sensors = sensors_from_xy(rng.uniform(lo, hi, size=(N, 2)))
    targets = [TargetBelief(Point2(*xy), np.eye(2), sweep.u_max, k + 1)
               for k, xy in enumerate(rng.uniform(lo, hi, size=(L, 2)))]
    return sensors, targets


def pair_trial(sweep: SweepConfig, L: int, N: int, trial: int) -> dict:
    sensors, targets = random_instance(sweep, L, N, trial)
    wf = pair_bound_weight()
    g = greedy_unique_pairs(sensors, targets, wf).total_value
    m = relaxed_pair_assignment(sensors, targets, wf).total_value
    return {"L": L, "N": N, "trial": trial, "omega_greedy": g,
            "omega_mwpbm": m, "omega_mwpbm_div3": m / 3.0}


def general_trial(sweep: SweepConfig, L: int, N: int, trial: int) -> dict:
    sensors, targets = random_instance(sweep, L, N, trial)
    res = greedy_general(sensors, targets, sweep.measure)
    sizes = [len(res.bundles[t.id]) for t in targets]
    row = {"N": N, "L": L, "trial": trial}
    row.update({f"size_t{t.id}": s for t, s in zip(targets, sizes)})
    row.update({"n_over_l": N / L, "span": max(sizes) - min(sizes), "total_value": res.total_value})
    return row


def _run_one(args):
    sweep, L, N, trial = args
    fn = pair_trial if sweep.mode == "pair-benchmark" else general_trial
    return fn(sweep, L, N, trial)


def run_sweep(sweep: SweepConfig, workers: int | None = None) -> list[dict]:
    """All rows of a sweep, sorted by (L, N, trial) or (N, L, trial)."""
    jobs = [(sweep, L, N, trial) for L, N in sweep.points() for trial in range(sweep.trials)]
    workers = sweep.workers if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_run_one(j) for j in jobs]
    key = (lambda r: (r["L"], r["N"], r["trial"])) if sweep.mode == "pair-benchmark" \
        else (lambda r: (r["N"], r["L"], r["trial"]))
    return sorted(rows, key=key)


def columns(rows: list[dict], mode: str) -> list[str]:
    if mode == "pair-benchmark":
        return list(PAIR_COLUMNS)
    size_cols = sorted({k for r in rows for k in r if k.startswith("size_t")}, key=lambda k: int(k[6:]))
    return ["N", "L", "trial", *size_cols, "n_over_l", "span", "total_value"]


def rows_to_csv(rows: list[dict], mode: str) -> str:
    cols = columns(rows, mode)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else
                    (fmt(r[c]) if isinstance(r[c], float) else r[c]) for c in cols])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[dict]:
    rd = csv.DictReader(io.StringIO(text))
    ints = {"L", "N", "trial", "span"}
    out = []
    for rec in rd:
        row = {}
        for k, v in rec.items():
            if v == "":
                continue
            row[k] = int(v) if k in ints or k.startswith("size_t") else float(v)
        out.append(row)
    return out


def summarize_sweep(rows: list[dict], mode: str) -> dict:
    """Per-point aggregates; raw per-trial values stay in the CSV."""
    if mode == "pair-benchmark":
        out = {"mode": mode, "points": []}
        for L in sorted({r["L"] for r in rows}):
            sel = [r for r in rows if r["L"] == L]
            g = np.array([r["omega_greedy"] for r in sel])
            m = np.array([r["omega_mwpbm"] for r in sel])
            out["points"].append({
                "L": L, "N": sel[0]["N"], "trials": len(sel),
                "mean_omega_greedy": float(g.mean()), "mean_omega_mwpbm": float(m.mean()),
                "min_ratio_greedy_over_mwpbm": float(np.min(g / m)) if np.all(m > 0) else None,
                "rows_below_third": int(np.sum(g < m / 3.0)),
            })
        out["all_rows_at_least_third"] = all(p["rows_below_third"] == 0 for p in out["points"])
        return out
    out = {"mode": mode, "points": []}
    for N in sorted({r["N"] for r in rows}):
        sel = [r for r in rows if r["N"] == N]
        size_cols = sorted((k for k in sel[0] if k.startswith("size_t")), key=lambda k: int(k[6:]))
        sizes = np.array([[r[k] for k in size_cols] for r in sel], dtype=float)
        per_target = sizes.mean(axis=0)
        out["points"].append({
            "N": N, "L": sel[0]["L"], "trials": len(sel), "n_over_l": N / sel[0]["L"],
            "mean_span": float(np.mean([r["span"] for r in sel])),
            "span_distribution": {str(s): int(c) for s, c in
                                  zip(*np.unique([r["span"] for r in sel], return_counts=True))},
            "mean_size_per_target": [float(v) for v in per_target],
            "span_of_mean_sizes": float(per_target.max() - per_target.min()),
        })
    return out
