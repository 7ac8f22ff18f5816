""" test_metrics.py -- ARI, NMI, majority vote and blending analysis

    Language: Python 3

    + 10/18/26: Created.
"""

import itertools
import math
import types

import numpy as np
import pytest

from fasc import (
    exception,
    kernels,
    metrics,
)

################################################################
# brute-force references
################################################################

def pair_counts(true_labels, predicted):
    """ (both same, same true only, same predicted only, both different)."""
    N = len(true_labels)
    upper = np.triu(np.ones((N, N), dtype=bool), k=1)
    same_true = (true_labels[:, np.newaxis] == true_labels[np.newaxis, :])[upper]
    same_pred = (predicted[:, np.newaxis] == predicted[np.newaxis, :])[upper]
    return (
        int(np.count_nonzero(same_true & same_pred)),
        int(np.count_nonzero(same_true & ~same_pred)),
        int(np.count_nonzero(~same_true & same_pred)),
        int(np.count_nonzero(~same_true & ~same_pred)),
    )


def reference_ari(true_labels, predicted):
    a, b, c, d = pair_counts(true_labels, predicted)
    denominator = (a + b)*(b + d) + (a + c)*(c + d)
    if denominator == 0:
        return None
    return 2*(a*d - b*c)/denominator


def reference_nmi(true_labels, predicted):
    N = len(true_labels)
    classes = sorted(set(true_labels.tolist()))
    clusters = sorted(set(predicted.tolist()))
    if len(classes) == 1 or len(clusters) == 1:
        return None
    p_true = {y: np.count_nonzero(true_labels == y)/N for y in classes}
    p_pred = {c: np.count_nonzero(predicted == c)/N for c in clusters}
    mutual = 0.0
    for (y, c) in itertools.product(classes, clusters):
        p_joint = np.count_nonzero((true_labels == y) & (predicted == c))/N
        if p_joint > 0:
            mutual += p_joint*math.log(p_joint/(p_true[y]*p_pred[c]))
    h_true = -sum(p*math.log(p) for p in p_true.values())
    h_pred = -sum(p*math.log(p) for p in p_pred.values())
    return 2*mutual/(h_true + h_pred)

################################################################
# ARI and NMI
################################################################

def test_ari_and_nmi_match_references():
    rng = np.random.default_rng(50)
    checked = 0
    for _ in range(200):
        N = int(rng.integers(2, 201))
        true_labels = rng.integers(0, int(rng.integers(1, 8)), size=N)
        predicted = rng.integers(-1, int(rng.integers(1, 10)), size=N)
        ari = reference_ari(true_labels, predicted)
        if ari is not None:
            assert metrics.adjusted_rand_index(true_labels, predicted) == pytest.approx(ari, abs=1e-10)
            checked += 1
        nmi = reference_nmi(true_labels, predicted)
        if nmi is not None:
            assert metrics.normalized_mutual_information(true_labels, predicted) == pytest.approx(nmi, abs=1e-10)
    assert checked > 150


def test_ari_examples():
    assert metrics.adjusted_rand_index([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert metrics.adjusted_rand_index([0, 0, 1, 1], [5, 5, 3, 3]) == 1.0
    assert metrics.adjusted_rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5)
    assert metrics.adjusted_rand_index([0, 0, 0], [1, 1, 1]) == 1.0
    assert metrics.adjusted_rand_index([0, 0, 0], [0, 1, 2]) == 0.0


def test_nmi_examples():
    assert metrics.normalized_mutual_information([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert metrics.normalized_mutual_information([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)
    assert metrics.normalized_mutual_information([2, 2, 2], [7, 7, 7]) == 1.0
    assert metrics.normalized_mutual_information([2, 2, 2], [0, 1, 1]) == 0.0


def test_outliers_count_as_a_class():
    true_labels = [0, 0, 1, 1]
    assert metrics.adjusted_rand_index(true_labels, [0, 0, -1, -1]) == 1.0
    assert metrics.adjusted_rand_index(true_labels, [0, -1, 1, -1]) < 1.0


def test_scores_ignore_label_values():
    rng = np.random.default_rng(51)
    for _ in range(20):
        true_labels = rng.integers(0, 4, size=60)
        predicted = rng.integers(0, 5, size=60)
        relabeled = rng.permutation(5)[predicted] + 10
        assert metrics.adjusted_rand_index(true_labels, relabeled) == pytest.approx(
            metrics.adjusted_rand_index(true_labels, predicted), abs=1e-12
        )
        assert metrics.normalized_mutual_information(true_labels, relabeled) == pytest.approx(
            metrics.normalized_mutual_information(true_labels, predicted), abs=1e-12
        )


def test_length_mismatch():
    for score in (metrics.adjusted_rand_index, metrics.normalized_mutual_information, metrics.majority_vote_map):
        with pytest.raises(exception.ConfigError) as info:
            score([0, 1, 1], [0, 1])
        assert info.value.field == "labels"


def test_contingency_matrix():
    table = metrics.contingency_matrix([0, 0, 1, 2], [3, -1, 3, 3])
    assert table.classes.tolist() == [0, 1, 2]
    assert table.clusters.tolist() == [-1, 3]
    assert table.counts.tolist() == [[1, 1], [0, 1], [0, 1]]
    assert table.total == 4

################################################################
# majority vote
################################################################

def test_majority_vote_examples():
    mapped = metrics.majority_vote_map([0, 0, 1], np.array([0, 0, 0]))
    assert mapped.cluster_to_class == {0: 0}
    assert mapped.core_purity == pytest.approx(2/3)
    assert mapped.all_accuracy == pytest.approx(2/3)

    mapped = metrics.majority_vote_map([0, 0, 1, 1], np.array([0, 0, 1, -1]))
    assert mapped.cluster_to_class == {0: 0, 1: 1}
    assert mapped.core_purity == 1.0
    assert mapped.all_accuracy == 0.75
    assert mapped.mapped_labels.tolist() == [0, 0, 1, -1]


def test_majority_vote_ties_go_to_smaller_class():
    assert metrics.majority_vote_map([1, 0], [0, 0]).cluster_to_class == {0: 0}


def test_majority_vote_all_outliers():
    mapped = metrics.majority_vote_map([0, 1, 1], [-1, -1, -1])
    assert mapped.cluster_to_class == {}
    assert mapped.all_accuracy == 0.0
    assert not mapped.purity_defined

################################################################
# blending
################################################################

def unit(angle_degrees):
    angle = math.radians(angle_degrees)
    return [math.cos(angle), math.sin(angle)]


def centroid_set(representatives, supports):
    return types.SimpleNamespace(representatives=np.array(representatives), supports=np.array(supports))


def test_blending_identical_centroids():
    report = metrics.blending_pairs(centroid_set([unit(30), unit(30)], [4, 6]), kernels.CosineKernel(), 0.9)
    assert [(j, k) for (j, k, _) in report.pairs] == [(0, 1)]
    assert report.pairs[0][2] == pytest.approx(1.0)
    np.testing.assert_allclose(report.fractions, [0.4, 0.6])


def test_blending_pairs_are_exhaustive():
    kernel = kernels.CosineKernel()
    report = metrics.blending_pairs(centroid_set([unit(0), unit(20), unit(80)], [1, 1, 1]), kernel, 0.9)
    assert [(j, k) for (j, k, _) in report.pairs] == [(0, 1)]

    rng = np.random.default_rng(52)
    for _ in range(20):
        representatives = rng.uniform(size=(6, 3))
        supports = rng.integers(0, 4, size=6)
        report = metrics.blending_pairs(centroid_set(representatives, supports), kernel, 0.9)
        expected = [
            (j, k) for (j, k) in itertools.combinations(range(6), 2)
            if supports[j] > 0 and supports[k] > 0 and kernel.similarity(representatives[j], representatives[k]) >= 0.9
        ]
        assert [(j, k) for (j, k, _) in report.pairs] == expected


def test_blending_without_live_clusters():
    report = metrics.blending_pairs(centroid_set(np.zeros((2, 2)), [0, 0]), kernels.CosineKernel(), 0.5)
    assert report.pairs == []

################################################################
# report
################################################################

def test_metrics_report_fields():
    true_labels = [0, 0, 1, 1, 1]
    assignments = [0, 0, 1, 1, -1]
    state = centroid_set([unit(0), unit(90)], [2, 2])
    report = metrics.metrics_report(true_labels, assignments, state, kernels.CosineKernel(), 0.8)
    assert report["ari_core"] == 1.0
    assert report["nmi_core"] == pytest.approx(1.0)
    assert report["core_purity"] == 1.0
    assert report["all_accuracy"] == 0.8
    assert report["K_active"] == 2
    assert report["outlier_fraction"] == 0.2
    assert report["purity_defined"]
    assert report["blending_pairs"] == []
    assert report["ari"] < 1.0


def test_metrics_report_scores_mapped_labels():
    true_labels = [0, 0, 0, 1, 1, 1]
    assignments = [0, 1, 1, 2, 2, -1]
    report = metrics.metrics_report(true_labels, assignments)
    assert report["ari_mapped"] == 1.0
    assert report["nmi_mapped"] == pytest.approx(1.0)
    assert report["ari_core"] < 1.0
    assert metrics.metrics_report([0, 1], [-1, -1])["ari_mapped"] is None


def test_metrics_report_blending_needs_state():
    with pytest.raises(exception.ConfigError):
        metrics.metrics_report([0, 1], [0, 1], blending_threshold=0.8)
