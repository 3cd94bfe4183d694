import math
from pathlib import Path

import numpy as np
import pytest

import mgcnn


def chain(n, seconds=36.0):
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = seconds
    return w


def test_edge_weight():
    assert mgcnn.edge_weight(0.5, 30.0) == pytest.approx(60.0)
    assert mgcnn.edge_weight(0.5, 0.0) == pytest.approx(1800.0)


def test_laplacian_spectrum():
    w = chain(5)
    lap = mgcnn.normalized_laplacian(w)
    eig = np.linalg.eigvalsh(lap)
    assert eig.min() >= -1e-9 and eig.max() <= 2 + 1e-9
    assert mgcnn.largest_eigenvalue(w) == pytest.approx(eig.max(), abs=1e-6)
    scaled = np.linalg.eigvalsh(mgcnn.scaled_laplacian(w))
    assert scaled.max() == pytest.approx(1.0, abs=1e-6)


def test_chebyshev_matches_eigendecomposition():
    rng = np.random.default_rng(1)
    w = chain(4) + np.diag(np.zeros(4))
    w[0, 3] = w[3, 0] = 50.0
    x = rng.normal(size=(4, 2))
    basis = mgcnn.chebyshev_basis(w, x, 4)
    assert len(basis) == 4
    vals, vecs = np.linalg.eigh(mgcnn.scaled_laplacian(w))
    for k, got in enumerate(basis):
        tk = np.cos(k * np.arccos(np.clip(vals, -1, 1)))
        np.testing.assert_allclose(got, vecs @ np.diag(tk) @ vecs.T @ x, atol=1e-10)


def test_metrics():
    r = mgcnn.compute_metrics([1.0, 6.0, 3.0], [2.0, 4.0, 0.0])
    assert r["samples"] == 3
    assert r["excluded_zero"] == 1
    assert r["rmse"] ** 2 == pytest.approx(r["mse"])
    assert r["mae"] <= r["rmse"]
    assert r["mape"] == pytest.approx(50.0)
    assert mgcnn.compute_metrics([1.0], [0.0])["mape"] is None


def test_iqr():
    cleaned, replaced = mgcnn.iqr_outlier_replace([1, 2, 3, 4, 100])
    assert cleaned == [1, 2, 3, 4, 3]
    assert replaced == 1


def test_data_error():
    with pytest.raises(ValueError):
        mgcnn.compute_metrics([1.0], [1.0, 2.0])


def test_synth_and_cli(tmp_path: Path):
    data = tmp_path / "data"
    mgcnn.synth(data, seed=3, nodes=2, days=3)
    assert (data / "topology.txt").exists()
    run = tmp_path / "run"
    code, out, err = mgcnn.run_cli(
        ["train", "--data-dir", str(data), "--train-days", "2", "--total-days", "3", "--hidden1", "4",
         "--hidden2", "4", "--lookback", "3", "--horizon", "2", "--epochs", "1", "--serial", "--out-dir", str(run)]
    )
    assert code == 0, err
    assert (run / "model.ckpt").exists()
    code, out, err = mgcnn.run_cli(["evaluate", "--ckpt", str(run / "model.ckpt"), "--data-dir", str(data)])
    assert code == 0, err
    header = (run / "evaluation.csv").read_text().splitlines()[0]
    assert header.startswith("label,unit_space")
    assert mgcnn.run_cli(["--bogus"])[0] == 2
    with pytest.raises(ValueError):
        mgcnn.synth(tmp_path / "bad", nodes=1)
    assert math.isfinite(float((run / "history.csv").read_text().splitlines()[1].split(",")[1]))
