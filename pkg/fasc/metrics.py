""" metrics.py -- external validity metrics and majority-vote mapping

    Predicted label -1 (provisional outlier) counts as one more predicted
    class in ARI and NMI.  The *_core variants use assigned samples only;
    the *_mapped variants score the majority-vote labels of assigned samples.

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Add blending-pair analysis.
    + 10/18/26: Take contingency tables, ARI and NMI from scikit-learn.
    + 10/18/26: Report ARI and NMI of the majority-vote mapped partition.
"""

import dataclasses
import math

import numpy as np
import sklearn.metrics
import sklearn.metrics.cluster

from . import exception

################################################################
# contingency table
################################################################

@dataclasses.dataclass
class ContingencyTable:
    """ Counts n_ij of true class i against predicted cluster j.

    Fields:
        counts (np.ndarray of int64): classes x clusters
        classes (np.ndarray): true label values, ascending
        clusters (np.ndarray): predicted label values, ascending
    """
    counts: np.ndarray
    classes: np.ndarray
    clusters: np.ndarray

    @property
    def total(self):
        return int(self.counts.sum())

    def is_identity_partition(self):
        """ Whether both labelings induce the same partition."""
        nonzero = self.counts > 0
        return bool(np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1))


def _check_lengths(true_labels, predicted):
    true_labels = np.asarray(true_labels, dtype=np.int64).ravel()
    predicted = np.asarray(predicted, dtype=np.int64).ravel()
    if true_labels.shape != predicted.shape:
        raise exception.ConfigError(
            "labels", "length mismatch: {} labels, {} assignments".format(true_labels.shape[0], predicted.shape[0])
        )
    return true_labels, predicted

def contingency_matrix(true_labels, predicted):
    true_labels, predicted = _check_lengths(true_labels, predicted)
    counts = sklearn.metrics.cluster.contingency_matrix(true_labels, predicted).astype(np.int64)
    return ContingencyTable(counts=counts, classes=np.unique(true_labels), clusters=np.unique(predicted))

################################################################
# pair counting and information
################################################################

def adjusted_rand_index(true_labels, predicted):
    """ Chance-corrected pair agreement.

    Arguments:
        true_labels (array-like of int): ground truth
        predicted (array-like of int): cluster ids, -1 for outliers

    Returns:
        (float): ARI, at most 1
    """
    true_labels, predicted = _check_lengths(true_labels, predicted)
    if true_labels.shape[0] <= 1:
        return 1.0
    return float(sklearn.metrics.adjusted_rand_score(true_labels, predicted))

def normalized_mutual_information(true_labels, predicted):
    """ 2 I(Y;C) / (H(Y) + H(C)), natural logarithms.

    Zero entropy in either labeling gives 1 for identical partitions and
    0 otherwise.

    Returns:
        (float): NMI in [0, 1]
    """
    true_labels, predicted = _check_lengths(true_labels, predicted)
    if true_labels.shape[0] == 0:
        return 1.0
    table = contingency_matrix(true_labels, predicted)
    if len(table.classes) == 1 or len(table.clusters) == 1:
        return 1.0 if table.is_identity_partition() else 0.0
    score = sklearn.metrics.normalized_mutual_info_score(true_labels, predicted, average_method="arithmetic")
    return float(min(1.0, max(0.0, score)))

################################################################
# majority-vote mapping
################################################################

@dataclasses.dataclass
class MappedPartition:
    """ Majority-vote labeling of a clustering.

    Fields:
        cluster_to_class (dict): live cluster -> majority class
        mapped_labels (np.ndarray): per-sample mapped class, -1 for outliers
        core_purity (float): correct fraction among assigned samples
        all_accuracy (float): correct fraction among all samples
        assigned (int): number of assigned samples
        purity_defined (bool): false when no sample is assigned
    """
    cluster_to_class: dict
    mapped_labels: np.ndarray
    core_purity: float
    all_accuracy: float
    assigned: int
    purity_defined: bool

def _assignments_of(state_or_assignments):
    return np.asarray(getattr(state_or_assignments, "assignments", state_or_assignments), dtype=np.int64)

def majority_vote_map(true_labels, state):
    """ Map each live cluster to its majority class (smaller class on ties).

    Arguments:
        true_labels (array-like of int): ground truth, non-negative
        state (ClusterState or array-like): assignments, -1 for outliers

    Returns:
        (MappedPartition): mapping and purities
    """
    true_labels, assignments = _check_lengths(true_labels, _assignments_of(state))
    mapped = np.full(assignments.shape[0], -1, dtype=np.int64)
    mapping = {}
    for cluster in np.unique(assignments[assignments >= 0]):
        members = assignments == cluster
        votes = np.bincount(true_labels[members])
        mapping[int(cluster)] = int(np.argmax(votes))
        mapped[members] = mapping[int(cluster)]

    assigned = int(np.count_nonzero(assignments >= 0))
    correct = int(np.count_nonzero((mapped == true_labels) & (assignments >= 0)))
    N = assignments.shape[0]
    return MappedPartition(
        cluster_to_class=mapping,
        mapped_labels=mapped,
        core_purity=(correct/assigned if assigned else 0.0),
        all_accuracy=(correct/N if N else 0.0),
        assigned=assigned,
        purity_defined=assigned > 0,
    )

################################################################
# blending analysis
################################################################

@dataclasses.dataclass
class BlendingReport:
    """ Centroid overlap data.

    Fields:
        pairs (list of tuple): (j, k, sigma) with j < k and sigma >= threshold
        similarity (np.ndarray): K x K centroid similarities
        fractions (np.ndarray): per-cluster share of the samples
        clusters (np.ndarray): cluster indices covered (live clusters)
    """
    pairs: list
    similarity: np.ndarray
    fractions: np.ndarray
    clusters: np.ndarray

def blending_pairs(state, kernel, threshold):
    """ Live centroid pairs scoring at or above threshold.

    Arguments:
        state: object with representatives and supports (FASC state or
            baseline result)
        kernel (kernels.SimilarityKernel): similarity
        threshold (float): acceptance threshold to test against

    Returns:
        (BlendingReport): pairs plus the full similarity matrix
    """
    supports = np.asarray(state.supports)
    live = np.flatnonzero(supports > 0)
    representatives = np.asarray(state.representatives)[live]
    if len(live) == 0:
        return BlendingReport(pairs=[], similarity=np.zeros((0, 0)), fractions=np.zeros(0), clusters=live)
    similarity = kernel.pairwise(representatives)
    pairs = []
    for a in range(len(live)):
        for b in range(a + 1, len(live)):
            if similarity[a, b] >= threshold:
                pairs.append((int(live[a]), int(live[b]), float(similarity[a, b])))
    total = getattr(state, "N", None) or int(supports.sum())
    return BlendingReport(
        pairs=pairs,
        similarity=similarity,
        fractions=supports[live]/total,
        clusters=live,
    )

################################################################
# report
################################################################

def _finite_or_none(value):
    return value if (value is not None and math.isfinite(value)) else None

def metrics_report(true_labels, assignments, state=None, kernel=None, blending_threshold=None):
    """ Metrics report as a JSON-ready dict.

    Arguments:
        true_labels (array-like): ground truth
        assignments (array-like): cluster ids, -1 for outliers
        state (optional): representatives and supports for blending analysis
        kernel (kernels.SimilarityKernel, optional): kernel for blending analysis
        blending_threshold (float, optional): adds blending_pairs when given

    Returns:
        (dict): ari, nmi, ari_core, nmi_core, ari_mapped, nmi_mapped,
            core_purity, all_accuracy,
            K_active, outlier_fraction, purity_defined[, blending_pairs]
    """
    true_labels, assignments = _check_lengths(true_labels, assignments)
    mapped = majority_vote_map(true_labels, assignments)
    core = assignments >= 0
    N = assignments.shape[0]
    report = {
        "ari": adjusted_rand_index(true_labels, assignments),
        "nmi": normalized_mutual_information(true_labels, assignments),
        "ari_core": (adjusted_rand_index(true_labels[core], assignments[core]) if np.any(core) else None),
        "nmi_core": (normalized_mutual_information(true_labels[core], assignments[core]) if np.any(core) else None),
        "ari_mapped": (adjusted_rand_index(true_labels[core], mapped.mapped_labels[core]) if np.any(core) else None),
        "nmi_mapped": (normalized_mutual_information(true_labels[core], mapped.mapped_labels[core]) if np.any(core) else None),
        "core_purity": mapped.core_purity,
        "all_accuracy": mapped.all_accuracy,
        "purity_defined": mapped.purity_defined,
        "K_active": int(np.unique(assignments[core]).shape[0]),
        "outlier_fraction": (float(np.count_nonzero(~core))/N if N else 0.0),
    }
    if blending_threshold is not None:
        if state is None or kernel is None:
            raise exception.ConfigError("blending_threshold", "blending analysis needs a state and a kernel")
        blending = blending_pairs(state, kernel, blending_threshold)
        report["blending_pairs"] = [[j, k, _finite_or_none(sigma)] for (j, k, sigma) in blending.pairs]
    return report
