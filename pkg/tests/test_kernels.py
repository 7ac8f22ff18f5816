""" test_kernels.py -- similarity kernels and Frechet means

    Language: Python 3

    + 10/18/26: Created.
"""

import itertools
import math

import numpy as np
import pytest

from fasc import (
    exception,
    kernels,
)

################################################################
# scalar kernels
################################################################

def test_cosine_examples():
    assert kernels.cosine([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert kernels.cosine([1, 0], [0, 1]) == 0.0
    assert kernels.cosine([1, 1], [1, 0]) == pytest.approx(1/math.sqrt(2), abs=1e-12)
    assert kernels.cosine([0, 0], [1, 0]) == 0.0


def test_cosine_dimension_mismatch():
    with pytest.raises(exception.ContractViolation):
        kernels.cosine([1, 0, 0], [1, 0])


def test_dual_cosine_examples():
    score = kernels.dual_cosine([1, 2, 3, 4], [1, 2, 3, 4], 2)
    assert (score.pos, score.neg, score.combined) == pytest.approx((1.0, 1.0, 1.0), abs=1e-15)

    score = kernels.dual_cosine([1, 1, 1, 0], [1, 1, 0, 1], 2)
    assert score.pos == pytest.approx(1.0, abs=1e-15)
    assert score.combined == 0.0

    score = kernels.dual_cosine([1, 0, 1, 1], [1, 0, 1, 0], 2)
    assert score.pos == 1.0
    assert score.combined == pytest.approx(1/math.sqrt(2), abs=1e-12)
    assert score.combined == min(score.pos, score.neg)


def test_dual_cosine_degenerate_channel_scores_zero():
    score = kernels.dual_cosine([1, 2, 0, 0], [1, 2, 0, 0], 2)
    assert score.neg == 0.0
    assert score.combined == 0.0


def test_degenerate_representatives():
    assert kernels.CosineKernel().degenerate([[0.0, 0.0], [1.0, 0.0]]).tolist() == [True, False]
    assert kernels.DualCosineKernel(1).degenerate([[1.0, 0.0], [1.0, 1.0]]).tolist() == [True, False]
    assert kernels.SqEuclideanKernel().degenerate([[0.0, 0.0]]).tolist() == [False]
    assert kernels.CosineKernel().degenerate(np.zeros((0, 2))).tolist() == []


def test_dual_cosine_dissimilarity_examples():
    assert kernels.dual_cosine_dissimilarity([1, 0, 1, 0], [1, 0, 1, 0], 2) == 0.0
    assert kernels.dual_cosine_dissimilarity([1, 0, 1, 0], [1, 0, 0, 1], 2) == pytest.approx(math.pi/2)
    assert kernels.dual_cosine_dissimilarity([1, 0, 1, 1], [1, 0, 1, 0], 2) == pytest.approx(math.pi/4, abs=1e-7)


def test_dual_cosine_dissimilarity_is_larger_channel_angle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        u, v = rng.uniform(size=(2, 6))
        score = kernels.dual_cosine(u, v, 3)
        angle = kernels.dual_cosine_dissimilarity(u, v, 3)
        expected = max(math.acos(min(1.0, score.pos)), math.acos(min(1.0, score.neg)))
        assert angle == pytest.approx(expected, abs=1e-12)
        assert 0.0 <= angle <= math.pi
        assert 0.0 <= score.combined <= 1.0


def test_dual_cosine_violates_identity_of_indiscernibles():
    u = np.array([1.0, 0.0, 2.0, 0.0])
    v = np.array([3.0, 0.0, 1.0, 0.0])
    assert not np.array_equal(u, v)
    assert kernels.dual_cosine_dissimilarity(u, v, 2) == 0.0


def test_dual_cosine_masking():
    u = np.array([1.0, 0.1, 1.0, 0.6])
    v = np.array([1.0, 0.0, 1.0, 0.0])
    base = kernels.dual_cosine(u, v, 2)
    assert base.neg < base.pos
    assert base.combined <= base.pos and base.combined <= base.neg

    weaker = u.copy()
    weaker[3] = 0.3
    assert kernels.dual_cosine(weaker, v, 2).combined != base.combined

    stronger = u.copy()
    stronger[1] = 0.05
    perturbed = kernels.dual_cosine(stronger, v, 2)
    assert perturbed.pos > perturbed.neg
    assert perturbed.combined == base.combined


def test_dual_cosine_needs_split():
    with pytest.raises(exception.ConfigError):
        kernels.get_kernel("dual-cosine")


def test_sq_euclidean_divergence_examples():
    assert kernels.sq_euclidean_divergence([1, 2], [1, 2]) == 0.0
    assert kernels.sq_euclidean_divergence([1, 0], [0, 0]) == 1.0
    assert kernels.sq_euclidean_divergence([3, 4], [0, 0]) == 25.0
    with pytest.raises(exception.ContractViolation):
        kernels.sq_euclidean_divergence([1], [1, 2])


def test_unknown_kernel():
    with pytest.raises(exception.ConfigError) as info:
        kernels.get_kernel("kl")
    assert info.value.field == "kernel"

################################################################
# kernel properties
################################################################

def all_kernels():
    return [kernels.get_kernel(name, split_index=4) for name in kernels.kernel_names]


@pytest.mark.parametrize("kernel", all_kernels(), ids=kernels.kernel_names)
def test_symmetry_is_exact(kernel):
    rng = np.random.default_rng(17)
    for _ in range(1000):
        u, v = rng.uniform(size=(2, 8))*(rng.uniform(size=(2, 8)) > 0.4)
        assert kernel.similarity(u, v) == kernel.similarity(v, u)


@pytest.mark.parametrize("kernel", all_kernels(), ids=kernels.kernel_names)
def test_block_scores_match_scalar_calls(kernel):
    rng = np.random.default_rng(23)
    X = rng.uniform(size=(5, 8))*(rng.uniform(size=(5, 8)) > 0.3)
    C = rng.uniform(size=(3, 8))
    block = kernel.affinities(kernels.as_sparse_rows(X), C)
    for (i, j) in itertools.product(range(5), range(3)):
        assert block[i, j] == kernel.similarity(X[i], C[j])


def test_bounded_kernels_stay_in_range():
    rng = np.random.default_rng(29)
    X = kernels.as_sparse_rows(rng.uniform(size=(20, 8)))
    C = rng.uniform(size=(4, 8))
    for kernel in (kernels.CosineKernel(), kernels.DualCosineKernel(4)):
        scores = kernel.affinities(X, C)
        assert np.all(scores >= -1.0) and np.all(scores <= 1.0)

################################################################
# Frechet means
################################################################

def test_frechet_mean_examples():
    np.testing.assert_allclose(
        kernels.frechet_mean(kernels.CosineKernel(), np.array([[1.0, 0.0], [0.0, 1.0]])),
        [1/math.sqrt(2), 1/math.sqrt(2)], atol=1e-15,
    )
    np.testing.assert_array_equal(
        kernels.frechet_mean(kernels.SqEuclideanKernel(), np.array([[0.0, 0.0], [2.0, 2.0]])), [1.0, 1.0]
    )
    np.testing.assert_array_equal(
        kernels.frechet_mean(kernels.ManhattanKernel(), np.array([[0.0], [0.0], [10.0]])), [0.0]
    )


def test_manhattan_lower_median_on_even_count():
    mean = kernels.ManhattanKernel().frechet_mean(np.array([[4.0], [1.0], [3.0], [2.0]]))
    assert mean.tolist() == [2.0]


def test_dual_cosine_frechet_mean_is_channelwise():
    kernel = kernels.DualCosineKernel(2)
    members = np.array([[1.0, 0.0, 0.0, 2.0], [0.0, 1.0, 0.0, 2.0]])
    mean = kernel.frechet_mean(members)
    np.testing.assert_allclose(mean, [1/math.sqrt(2), 1/math.sqrt(2), 0.0, 1.0], atol=1e-15)


def test_frechet_mean_of_empty_membership():
    with pytest.raises(exception.ContractViolation):
        kernels.CosineKernel().frechet_mean(np.zeros((0, 3)))


def grid(dims, low, high, steps):
    axis = np.linspace(low, high, steps)
    return np.array(list(itertools.product(axis, repeat=dims)))


def test_frechet_means_beat_grid_search():
    rng = np.random.default_rng(31)
    for _ in range(20):
        m = int(rng.integers(1, 6))
        d = int(rng.integers(1, 4))
        members = rng.uniform(0.0, 2.0, size=(m, d))
        points = grid(d, 0.0, 2.0, 41)
        residuals = members[np.newaxis, :, :] - points[:, np.newaxis, :]

        mean = kernels.SqEuclideanKernel().frechet_mean(members)
        grid_best = np.min(np.sum(residuals**2, axis=(1, 2)))
        assert np.sum((members - mean)**2) <= grid_best + 1e-9

        median = kernels.ManhattanKernel().frechet_mean(members)
        grid_best = np.min(np.sum(np.abs(residuals), axis=(1, 2)))
        assert np.sum(np.abs(members - median)) <= grid_best + 1e-9

        unit = kernels.CosineKernel().frechet_mean(members)
        directions = grid(d, -1.0, 1.0, 41)
        directions = directions[np.linalg.norm(directions, axis=1) > 0]
        directions /= np.linalg.norm(directions, axis=1)[:, np.newaxis]
        normalized = members/np.linalg.norm(members, axis=1)[:, np.newaxis]
        grid_best = np.max(np.sum(directions @ normalized.T, axis=1))
        assert np.sum(normalized @ unit) >= grid_best - 1e-9


@pytest.mark.parametrize("kernel", [kernels.CosineKernel(), kernels.DualCosineKernel(4), kernels.SqEuclideanKernel()], ids=["cosine", "dual-cosine", "sq-euclidean"])
def test_block_partials_rebuild_frechet_mean(kernel):
    rng = np.random.default_rng(37)
    members = rng.uniform(size=(9, 8))*(rng.uniform(size=(9, 8)) > 0.3)
    members[:, 0] += 0.1
    members[:, 4] += 0.1
    total = kernel.mean_partial(members[:4]) + kernel.mean_partial(members[4:])
    np.testing.assert_allclose(kernel.mean_finish(total, 9), kernel.frechet_mean(members), atol=1e-12)
    assert kernel.streams


def test_manhattan_needs_resident_members():
    kernel = kernels.ManhattanKernel()
    assert not kernel.streams
    with pytest.raises(exception.ConfigError):
        kernel.mean_partial(np.ones((2, 3)))
