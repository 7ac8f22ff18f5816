""" test_benchmark.py -- synthetic generator and scaling sweep

    Language: Python 3

    + 10/18/26: Created.
"""

import json
import os

import numpy as np
import pytest

from fasc import (
    benchmark,
    exception,
    kernels,
    parameters,
    phase3,
)

################################################################
# synthetic data
################################################################

def test_generate_synthetic_is_deterministic():
    first = benchmark.generate_synthetic(60, 30, 3, 0.05, seed=5)
    second = benchmark.generate_synthetic(60, 30, 3, 0.05, seed=5)
    assert (first.matrix != second.matrix).nnz == 0
    np.testing.assert_array_equal(first.labels, second.labels)
    assert np.bincount(first.labels).tolist() == [20, 20, 20]
    assert first.matrix.min() >= 0.0

    third = benchmark.generate_synthetic(60, 30, 3, 0.05, seed=6)
    assert (first.matrix != third.matrix).nnz > 0


def test_noise_free_classes_are_identical_directions():
    dataset = benchmark.generate_synthetic(40, 50, 4, 0.0, seed=1)
    cosine = kernels.CosineKernel()
    dense = dataset.matrix.toarray()
    for k in range(4):
        members = dense[dataset.labels == k]
        for row in members[1:]:
            assert cosine.similarity(members[0], row) == pytest.approx(1.0, abs=1e-12)


def test_dual_polarity_fills_both_channels():
    dataset = benchmark.generate_synthetic(20, 40, 2, 0.0, seed=2, dual_polarity=True)
    assert dataset.split.split_index == 20
    dense = dataset.matrix.toarray()
    assert np.all(dense[:, :20].sum(axis=1) > 0)
    assert np.all(dense[:, 20:].sum(axis=1) > 0)


def test_fasc_recovers_noise_free_classes():
    dataset = benchmark.generate_synthetic(100, 100, 2, 0.0, seed=3)
    config = parameters.FascConfig(tau_intra=0.99, tau_inter=0.99, k_max=10)
    result = phase3.run(dataset, config, kernels.CosineKernel())
    assert result.state.K == 2
    assert result.state.outlier_count == 0


@pytest.mark.parametrize("arguments, field", [
    ((0, 10, 1, 0.0, 0), "n"),
    ((10, 10, 11, 0.0, 0), "k_true"),
    ((10, 0, 2, 0.0, 0), "d"),
    ((10, 10, 2, -0.1, 0), "noise"),
])
def test_generate_synthetic_rejects_bad_parameters(arguments, field):
    with pytest.raises(exception.ConfigError) as info:
        benchmark.generate_synthetic(*arguments)
    assert info.value.field == field

################################################################
# scaling sweep
################################################################

def small_config():
    return parameters.FascConfig(tau_intra=0.9, tau_inter=0.9, k_max=10)


def test_small_sweep(tmp_path):
    report = benchmark.scaling_sweep([200, 400], small_config(), kernels.CosineKernel(), repetitions=1, d=50)
    assert [record.N for record in report.records] == [200, 400]
    assert not report.insufficient_points
    assert 0.0 <= report.r2 <= 1.0 + 1e-12
    for record in report.records:
        assert record.iterations >= 1
        assert record.seconds_per_iteration >= 0.0
        assert record.working_set_bytes > 0

    benchmark.write_scaling_report(report, str(tmp_path / "sweep"))
    lines = (tmp_path / "sweep" / "scaling.csv").read_text().splitlines()
    assert lines[0] == "N,iters,total_s,s_per_iter"
    assert [line.split(",")[0] for line in lines[1:]] == ["200", "400"]
    summary = json.loads((tmp_path / "sweep" / "scaling.json").read_text())
    assert summary["sizes"] == [200, 400]
    assert set(summary) >= {"slope", "intercept", "r2"}


def test_single_size_is_flagged():
    report = benchmark.scaling_sweep([100], small_config(), kernels.CosineKernel(), repetitions=1, d=50)
    assert report.insufficient_points
    assert report.r2 is None
    assert report.slope is None


def test_streaming_sweep_reads_triplet_files(tmp_path):
    report = benchmark.scaling_sweep(
        [200, 400], small_config(), kernels.CosineKernel(), repetitions=1, d=50,
        streaming=True, work_dir=str(tmp_path),
    )
    assert [record.N for record in report.records] == [200, 400]
    assert all(record.iterations >= 1 for record in report.records)
    assert sorted(os.listdir(str(tmp_path))) == [
        "synthetic-200.csv", "synthetic-200.csv.json", "synthetic-400.csv", "synthetic-400.csv.json",
    ]


@pytest.mark.parametrize("sizes, repetitions", [
    ([400, 200], 1),
    ([200, 200], 1),
    ([50, 200], 1),
    ([], 1),
    ([200], 0),
])
def test_sweep_rejects_bad_arguments(sizes, repetitions):
    with pytest.raises(exception.ConfigError):
        benchmark.scaling_sweep(sizes, small_config(), kernels.CosineKernel(), repetitions=repetitions, d=50)


def test_fit_linear():
    slope, intercept, r2 = benchmark.fit_linear([1, 2, 3], [2.0, 4.0, 6.0])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(0.0, abs=1e-12)
    assert r2 == pytest.approx(1.0)
    assert benchmark.fit_linear([1], [1.0]) == (None, None, None)


def test_steady_timing_drops_warm_up():
    assert benchmark.steady_seconds_per_iteration([5.0, 1.0, 2.0, 3.0]) == 2.0
    assert benchmark.steady_seconds_per_iteration([4.0]) == 4.0
    assert benchmark.iteration_spread([9.0, 1.0, 1.0]) == 0.0


@pytest.mark.slow
def test_default_sweep_is_linear():
    config = parameters.FascConfig(tau_intra=0.8, tau_inter=0.8, k_max=50)
    report = benchmark.scaling_sweep(
        [10000, 20000, 40000, 80000, 160000], config, kernels.CosineKernel(), repetitions=3, d=600, workers=4
    )
    assert report.r2 >= 0.99
