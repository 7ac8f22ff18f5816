""" baselines.py -- ART2A and spherical K-means reference clusterers

    ART2A processes samples once, in the given order, and is therefore
    order dependent.  Spherical K-means runs Lloyd iterations with cosine
    assignment over the canonical sample order, seeded by k-means++ from a
    seeded generator.

    Both results expose assignments (input order, -1 for skipped
    samples), representatives and supports, so they flow through the same
    metrics and blending analysis as a FASC state.

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Add multi-epoch ART2A and farthest-sample reseeding.
    + 10/18/26: Seed K-means with scikit-learn k-means++.
"""

import dataclasses

import numpy as np
import sklearn.cluster

from . import (
    control,
    exception,
    kernels,
    spectra,
)

################################################################
# ART2A
################################################################

@dataclasses.dataclass
class Art2aState:
    """ Online ART2A prototypes.

    Fields:
        vigilance (float): match threshold in (0, 1]
        eta (float): learning rate in (0, 1]
        k_max (int): prototype budget
        prototypes (np.ndarray): K x D unit vectors
        supports (np.ndarray of int64): samples assigned per prototype
    """
    vigilance: float
    eta: float
    k_max: int
    prototypes: np.ndarray
    supports: np.ndarray

    @property
    def K(self):
        return self.prototypes.shape[0]

    def present(self, x):
        """ Process one unit-norm sample; returns its prototype index."""
        if self.K == 0:
            return self._create(x)
        scores = self.prototypes @ x
        best = int(np.argmax(scores))
        if scores[best] >= self.vigilance:
            updated = (1 - self.eta)*self.prototypes[best] + self.eta*x
            self.prototypes[best] = updated/np.linalg.norm(updated)
        elif self.K < self.k_max:
            return self._create(x)
        return best

    def _create(self, x):
        self.prototypes = np.vstack([self.prototypes, x[np.newaxis, :]])
        self.supports = np.append(self.supports, 0)
        return self.K - 1


@dataclasses.dataclass
class Art2aResult:
    assignments: np.ndarray
    state: Art2aState
    skipped: list

    @property
    def representatives(self):
        return self.state.prototypes

    @property
    def supports(self):
        return self.state.supports

    @property
    def N(self):
        return self.assignments.shape[0]


def art2a_run(dataset, vigilance, eta=0.5, k_max=50, order=None, epochs=1, verbose=False):
    """ ART2A pass(es) over the samples in the given order.

    A match at or above vigilance moves the prototype to
    normalize((1 - eta) w + eta x).  Otherwise a prototype is created
    while the budget allows, and the best match is taken without update
    once it is exhausted.  All-zero samples are skipped and get -1.

    Arguments:
        dataset (spectra.Dataset): samples
        vigilance (float): match threshold in (0, 1]
        eta (float, optional): learning rate in (0, 1]
        k_max (int, optional): prototype budget
        order (array-like, optional): row positions in presentation order
        epochs (int, optional): passes over the order

    Returns:
        (Art2aResult): assignments in input order and final prototypes
    """
    if not (0 < vigilance <= 1):
        raise exception.ConfigError("vigilance", "must lie in (0, 1], got {}".format(vigilance))
    if not (0 < eta <= 1):
        raise exception.ConfigError("eta", "must lie in (0, 1], got {}".format(eta))
    if k_max < 1:
        raise exception.ConfigError("k_max", "must be >= 1, got {}".format(k_max))
    if epochs < 1:
        raise exception.ConfigError("epochs", "must be >= 1, got {}".format(epochs))

    state = Art2aState(
        vigilance=vigilance, eta=eta, k_max=k_max,
        prototypes=np.zeros((0, dataset.D)), supports=np.zeros(0, dtype=np.int64),
    )
    assignments = np.full(dataset.N, -1, dtype=np.int64)
    order = np.arange(dataset.N) if order is None else np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(dataset.N)):
        raise exception.ConfigError("order", "not a permutation of the sample positions")

    normalized = kernels.normalize_rows(dataset.matrix)
    skipped = np.flatnonzero(dataset.degenerate).tolist()
    if skipped and verbose:
        print("WARNING: skipping {:d} all-zero samples".format(len(skipped)))
    for _ in range(epochs):
        for i in order:
            if dataset.degenerate[i]:
                continue
            assignments[i] = state.present(normalized[i].toarray()[0])
    state.supports = np.bincount(assignments[assignments >= 0], minlength=state.K).astype(np.int64)
    return Art2aResult(assignments=assignments, state=state, skipped=skipped)

################################################################
# spherical K-means
################################################################

@dataclasses.dataclass
class KMeansState:
    """ Spherical K-means outcome.

    Fields:
        K (int): cluster count
        centroids (np.ndarray): K x D unit vectors
        assignments (np.ndarray of int64): input-order cluster per sample
        rng_seed (int): seed of the k-means++ generator
        iterations (int): Lloyd iterations run
        converged (bool): assignments stopped changing before max_iters
        inertia (float): sum of cosine dissimilarities 1 - cos
    """
    K: int
    centroids: np.ndarray
    assignments: np.ndarray
    rng_seed: int
    iterations: int
    converged: bool
    inertia: float

    @property
    def representatives(self):
        return self.centroids

    @property
    def supports(self):
        return np.bincount(self.assignments, minlength=self.K).astype(np.int64)

    @property
    def N(self):
        return self.assignments.shape[0]


def _cosine_assign(normalized, centroids, batch_size, workers):
    kernel = kernels.CosineKernel()

    def process(start):
        scores = kernel.affinities(normalized[start:start+batch_size], centroids)
        return np.argmax(scores, axis=1), scores.max(axis=1)

    results = control.parallel_map(process, range(0, normalized.shape[0], batch_size), workers=workers)
    labels = np.concatenate([labels for (labels, _) in results]).astype(np.int64)
    best = np.concatenate([best for (_, best) in results])
    return labels, best

def spherical_kmeans(dataset, K, seed=0, max_iters=100, batch_size=4096, workers=1):
    """ Lloyd iterations with cosine assignment and normalized-sum centroids.

    Empty clusters are reseeded from the samples farthest from their
    centroids.  A final assignment against the final centroids makes the
    returned labels the argmax-cosine of the returned centroids.

    Arguments:
        dataset (spectra.Dataset): samples
        K (int): cluster count, at most N
        seed (int, optional): generator seed for k-means++
        max_iters (int, optional): Lloyd iteration cap
        batch_size (int, optional): assignment batch size
        workers (int, optional): assignment worker threads

    Returns:
        (KMeansState): centroids and input-order assignments
    """
    if K < 1 or K > dataset.N:
        raise exception.ConfigError("k", "must lie in [1, N={}], got {}".format(dataset.N, K))
    order = spectra.canonical_positions(dataset)
    normalized = kernels.normalize_rows(dataset.matrix[order])
    kernel = kernels.CosineKernel()
    centroids, _ = sklearn.cluster.kmeans_plusplus(normalized, K, random_state=seed)
    centroids = np.array(centroids, dtype=np.float64)
    labels = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        new_labels, best = _cosine_assign(normalized, centroids, batch_size, workers)
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=K)
        farthest = iter(np.lexsort((np.arange(len(best)), best)).tolist())
        for j in range(K):
            if counts[j]:
                centroids[j] = kernel.frechet_mean(normalized[labels == j])
            else:
                centroids[j] = normalized[next(farthest)].toarray()[0]

    labels, best = _cosine_assign(normalized, centroids, batch_size, workers)
    assignments = np.empty(dataset.N, dtype=np.int64)
    assignments[order] = labels
    return KMeansState(
        K=K,
        centroids=centroids,
        assignments=assignments,
        rng_seed=seed,
        iterations=iterations,
        converged=converged,
        inertia=float(np.sum(1.0 - best)),
    )
