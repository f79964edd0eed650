import math

import numpy as np
import pytest

from greycast import DataError, evaluate


def oracle_metrics(actual, predicted):
    """Independent single-pass accumulation of all four statistics."""
    n = len(actual)
    sq = ab = pct = pred_sq = 0.0
    for y, f in zip(actual, predicted):
        err = f - y
        sq += err * err
        ab += abs(err)
        pct += abs(err / y)
        pred_sq += f * f
    return (
        sq / n,
        ab / n,
        pct / n * 100.0,
        math.sqrt((sq / n) / (pred_sq / n)),
    )


def test_perfect_forecast_all_zero():
    r = evaluate([3.0, 4.0, 5.0], [3.0, 4.0, 5.0])
    assert r.mse == 0.0 and r.mae == 0.0 and r.mape == 0.0 and r.theil == 0.0
    assert r.n == 3 and r.degenerate == ()


def test_two_point_hand_case():
    r = evaluate([100.0, 200.0], [110.0, 190.0])
    assert abs(r.mse - 100.0) < 1e-10
    assert abs(r.mae - 10.0) < 1e-10
    assert abs(r.mape - 7.5) < 1e-10
    # denominator is the mean squared prediction: (110^2 + 190^2)/2 = 24100
    assert abs(r.theil - math.sqrt(100.0 / 24100.0)) < 1e-10


def test_random_case_matches_oracle():
    rng = np.random.default_rng(71)
    actual = rng.uniform(50.0, 150.0, size=50)
    predicted = actual + rng.normal(0, 5.0, size=50)
    r = evaluate(actual, predicted)
    mse, mae, mape, theil = oracle_metrics(actual, predicted)
    assert abs(r.mse - mse) < 1e-10 * max(1, mse)
    assert abs(r.mae - mae) < 1e-10
    assert abs(r.mape - mape) < 1e-10
    assert abs(r.theil - theil) < 1e-10


def test_mae_bounded_by_rms():
    rng = np.random.default_rng(72)
    for _ in range(20):
        actual = rng.uniform(1.0, 10.0, size=rng.integers(1, 40))
        predicted = actual + rng.normal(size=actual.size)
        r = evaluate(actual, predicted)
        assert r.mae <= math.sqrt(r.mse) + 1e-12


def test_scale_equivariance():
    rng = np.random.default_rng(73)
    actual = rng.uniform(10.0, 20.0, size=30)
    predicted = actual + rng.normal(0, 1.0, size=30)
    base = evaluate(actual, predicted)
    for c in (0.25, 3.0, 117.49):
        scaled = evaluate(c * actual, c * predicted)
        assert math.isclose(scaled.mae, c * base.mae, rel_tol=1e-9)
        assert math.isclose(scaled.mse, c * c * base.mse, rel_tol=1e-9)
        assert math.isclose(scaled.mape, base.mape, rel_tol=1e-9)
        assert math.isclose(scaled.theil, base.theil, rel_tol=1e-9)


def test_theil_zero_iff_perfect():
    actual = np.array([5.0, 6.0, 7.0])
    assert evaluate(actual, actual).theil == 0.0
    off = evaluate(actual, actual + 1e-9)
    assert off.theil > 0.0


def test_degenerate_markers():
    r = evaluate([0.0, 2.0], [1.0, 2.0])
    assert "mape" in r.degenerate and math.isnan(r.mape)
    assert math.isfinite(r.mse)

    r = evaluate([1.0, 2.0], [0.0, 0.0])
    assert "theil" in r.degenerate and math.isnan(r.theil)
    assert r.mae == 1.5


def test_length_mismatch():
    with pytest.raises(DataError):
        evaluate([1.0, 2.0], [1.0])
