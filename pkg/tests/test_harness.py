import numpy as np
import pytest

from sketchls import NormSpec, SketchKind, SketchOperator, run_cs_experiment, run_ihs_experiment
from sketchls.harness import CS_COLUMNS, IHS_COLUMNS, ExperimentError, read_report_csv
from sketchls.sketch import identity_factory

from conftest import random_problem


@pytest.fixture(scope="module")
def prob():
    return random_problem(512, 4, seed=21)


def test_degenerate_cs_configuration(prob):
    r = run_cs_experiment(prob, "gaussian", [40], 40, alpha=0.05, B=1, trials=1, seed=3)
    assert len(r.points) == 1
    pt = r.points[0]
    assert pt.trials == 1 and pt.at == 40 and pt.estimate_std == 0.0
    # one replicate, no rescaling at m0: the mean is that replicate
    assert pt.estimate_mean == r.estimates[0, 0]
    assert pt.benchmark_quantile == r.errors[0, 0]
    assert pt.coverage in (0.0, 1.0)


def test_cs_report_structure(prob):
    r = run_cs_experiment(prob, "srht", [20, 40, 80], 20, alpha=0.1, B=10, trials=30, seed=1)
    assert [p.at for p in r.points] == [20, 40, 80]
    assert r.errors.shape == r.estimates.shape == (30, 3)
    np.testing.assert_allclose(r.estimates[:, 1], r.estimates[:, 0] * np.sqrt(20 / 40), rtol=1e-15)
    for j, p in enumerate(r.points):
        assert 0 <= p.coverage <= 1 and p.estimate_std >= 0
        assert p.benchmark_quantile in r.errors[:, j]
    assert r.columns == CS_COLUMNS


def test_cs_linf_runs(prob):
    r = run_cs_experiment(prob, "gaussian", [20, 60], alpha=0.05, B=5, trials=10,
                          norm=NormSpec.linf(), seed=2)
    assert all(np.isfinite(p.estimate_mean) for p in r.points)


def test_cs_m0_must_be_grid_minimum(prob):
    with pytest.raises(ValueError):
        run_cs_experiment(prob, "gaussian", [20, 40], 40, trials=2)
    with pytest.raises(ValueError):
        run_cs_experiment(prob, "gaussian", [], trials=2)
    with pytest.raises(ValueError):
        run_cs_experiment(prob, "gaussian", [20], trials=0)


def test_errors_are_tagged(prob):
    def bad(m, n, seed):
        return SketchOperator(SketchKind.ROWSAMPLE, m, n, seed, row_indices=np.zeros(m, dtype=int))
    with pytest.raises(ExperimentError, match=r"m=20, trial 0"):
        run_cs_experiment(prob, bad, [20], trials=2, workers=1)
    with pytest.raises(ExperimentError, match=r"iteration 1, trial 0"):
        run_ihs_experiment(prob, bad, 20, 3, trials=2, workers=1)


def test_worker_count_does_not_change_reports(prob):
    a = run_cs_experiment(prob, "gaussian", [20, 40], B=8, trials=12, seed=5, workers=1)
    b = run_cs_experiment(prob, "gaussian", [20, 40], B=8, trials=12, seed=5, workers=4)
    assert a.to_csv() == b.to_csv()
    a = run_ihs_experiment(prob, "srht", 40, 4, B=8, trials=6, seed=5, workers=1)
    b = run_ihs_experiment(prob, "srht", 40, 4, B=8, trials=6, seed=5, workers=3)
    assert a.to_csv() == b.to_csv()


def test_csv_round_trip(prob, tmp_path):
    r = run_cs_experiment(prob, "srht", [20, 30], B=6, trials=7, seed=8)
    path = tmp_path / "r.csv"
    r.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CS_COLUMNS)
    rows = read_report_csv(path)
    for row, p in zip(rows, r.points):
        assert row["m"] == p.at and row["trials"] == 7
        assert row["benchmark_quantile"] == p.benchmark_quantile
        assert row["extrap_mean"] == p.estimate_mean
        assert row["extrap_std"] == p.estimate_std
        assert row["coverage"] == p.coverage


def test_ihs_identity_hook_has_zero_error(prob):
    r = run_ihs_experiment(prob, identity_factory, prob.n, 3, B=5, trials=3, seed=1)
    assert r.columns == IHS_COLUMNS
    assert [p.at for p in r.points] == [1, 2, 3]
    for p in r.points:
        assert p.benchmark_quantile < 1e-12
        assert np.isfinite(p.estimate_mean)


def test_ihs_rows_one_and_two_are_bootstrap_estimates(prob):
    r = run_ihs_experiment(prob, "gaussian", 40, 5, alpha=0.1, B=10, trials=4, seed=2)
    est = r.estimates
    np.testing.assert_allclose(est[:, 2], est[:, 1] ** 2 / est[:, 0], rtol=1e-12)
    np.testing.assert_allclose(est[:, 4], est[:, 1] ** 4 / est[:, 0] ** 3, rtol=1e-10)


def test_ihs_needs_three_iterations(prob):
    with pytest.raises(ValueError):
        run_ihs_experiment(prob, "gaussian", 40, 2, trials=1)


@pytest.mark.slow
def test_larger_ihs_sketch_converges_faster(desk_problem):
    p, x_opt = desk_problem
    d = p.d
    small = run_ihs_experiment(p, "srht", 10 * d, 8, B=20, trials=60, seed=4, x_opt=x_opt)
    large = run_ihs_experiment(p, "srht", 50 * d, 8, B=20, trials=60, seed=4, x_opt=x_opt)
    assert small.points[-1].benchmark_quantile > large.points[-1].benchmark_quantile


@pytest.mark.slow
def test_cs_linf_desk_scale_runs(desk_problem):
    p, x_opt = desk_problem
    d = p.d
    r = run_cs_experiment(p, "srht", range(5 * d, 30 * d + 1, 5 * d), 5 * d, alpha=0.05, B=20,
                          trials=60, norm=NormSpec.linf(), seed=6, x_opt=x_opt)
    assert len(r.points) == 6
    assert all(p.estimate_mean > 0 and 0 <= p.coverage <= 1 for p in r.points)
