"""Cross-mechanism statistical properties measured on the shared sweep
(see conftest.sweep): paired method comparisons and the eigenvalue /
error correlation structure of the de-biased trainer."""

import numpy as np
from scipy.stats import spearmanr


def paired(sweep_output, n):
    rows = {}
    for t in sweep_output.trials:
        if t.n == n and t.status == "ok":
            rows.setdefault(t.seed, {})[t.method] = t
    return rows


def test_rmgm_beats_dgm_on_most_shared_seeds(sweep):
    rows = paired(sweep, 100_000)
    both = [r for r in rows.values() if "rmgm" in r and "dgm" in r]
    wins = sum(1 for r in both if r["rmgm"].distance < r["dgm"].distance)
    assert len(both) >= 100
    assert wins / len(both) >= 0.8


def test_small_eigenvalues_drive_large_errors_log_scale(sweep):
    dgm = [t for t in sweep.trials if t.method == "dgm" and t.n == 100_000 and t.status == "ok"]
    assert len(dgm) >= 190
    pearson = np.corrcoef(
        np.log([t.min_abs_eig for t in dgm]), np.log([t.distance for t in dgm])
    )[0, 1]
    assert pearson < 0


def test_spearman_correlation_is_scale_free(sweep):
    # the rank correlation matches whether computed on raw or log values
    dgm = [t for t in sweep.trials if t.method == "dgm" and t.n == 100_000 and t.status == "ok"]
    eigs = np.array([t.min_abs_eig for t in dgm])
    dist = np.array([t.distance for t in dgm])
    raw = spearmanr(eigs, dist).statistic
    logged = spearmanr(np.log(eigs), np.log(dist)).statistic
    assert abs(raw - logged) < 1e-12


def test_non_private_baseline_dominates_everything(sweep):
    for n in (10_000, 300_000):
        rows = paired(sweep, n)
        for r in rows.values():
            if "ols" in r:
                others = [r[m].distance for m in ("dgm", "rmgm", "bgm") if m in r]
                if others:
                    assert r["ols"].distance < min(others)
