""" conftest.py -- shared fixtures for the fasc test suite

    Language: Python 3

    + 10/18/26: Created.
"""

import numpy as np
import pytest

from fasc import (
    kernels,
    parameters,
    spectra,
    state as fasc_state,
)


def two_bundle_array(n_per_bundle=10, seed=0):
    """ Two tight bundles on disjoint supports (cross-bundle cosine exactly 0)."""
    rng = np.random.default_rng(seed)
    D = 6
    rows = []
    for bundle in range(2):
        mask = np.zeros(D)
        mask[3*bundle:3*bundle+3] = 1.0
        for _ in range(n_per_bundle):
            rows.append(mask*(1.0 + rng.uniform(0.0, 0.05, size=D)))
    labels = np.repeat([0, 1], n_per_bundle)
    return np.array(rows), labels


@pytest.fixture
def two_bundles():
    array, labels = two_bundle_array()
    return spectra.Dataset.from_array(array, ids=np.arange(100, 100 + len(array)), labels=labels)


@pytest.fixture
def cosine():
    return kernels.CosineKernel()


@pytest.fixture
def quiet_run():
    """ Run parameters for tests: one worker, no diagnostics."""
    parameters.run.populate(workers=1, verbose=False)
    return parameters.run


@pytest.fixture
def make_state():
    """ Factory for a consistent state from an assignment vector."""

    def build(dataset, assignments, kernel, K=None, iteration=0):
        assignments = np.asarray(assignments, dtype=np.int64)
        if K is None:
            K = int(assignments.max()) + 1 if np.any(assignments >= 0) else 0
        representatives = np.zeros((K, dataset.D))
        for j in range(K):
            members = np.flatnonzero(assignments == j)
            if len(members):
                representatives[j] = kernel.frechet_mean(dataset.matrix[members])
        return fasc_state.ClusterState(
            representatives=representatives,
            supports=np.bincount(assignments[assignments >= 0], minlength=K).astype(np.int64),
            born=np.zeros(K, dtype=np.int64),
            newly_promoted=np.zeros(K, dtype=bool),
            assignments=assignments.copy(),
            iteration=iteration,
        )

    return build
