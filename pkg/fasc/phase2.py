""" phase2.py -- consolidation phase

    Language: Python 3

    + 10/18/26: Created.  Order of edits: recompute, merge to a fixed
      point, dissolve, renumber.
    + 10/18/26: Recompute representatives of streamed data from
      per-block kernel partials.
"""

import dataclasses

import numpy as np

from . import (
    exception,
    kernels,
    spectra,
)

################################################################
# data types
################################################################

@dataclasses.dataclass
class MergePlan:
    """ Anchor j, the clusters it absorbed and the members they carried."""
    anchor: int
    absorbed: list
    volume: int = 0


@dataclasses.dataclass
class ConsolidationReport:
    """ Structural edits of one Phase 2.

    Fields:
        merges (list of MergePlan): merges in the order applied
        emptied (int): clusters left without members by Phase 1
        dissolved (int): clusters dissolved for support below Z
        degenerate (list of int): surviving clusters whose representative
            the kernel cannot score
    """
    merges: list
    emptied: int
    dissolved: int
    degenerate: list = dataclasses.field(default_factory=list)

    @property
    def merged(self):
        return sum(len(plan.absorbed) for plan in self.merges)

    @property
    def merge_volume(self):
        return sum(plan.volume for plan in self.merges)

    @property
    def edits(self):
        return self.merged + self.emptied + self.dissolved

################################################################
# centroid update
################################################################

def streamed_means(dataset, assignments, clusters, kernel):
    """ Frechet means of the given clusters from one scan over the data.

    Kernel partials are summed block by block in canonical order, so the
    result does not depend on any batch size.

    Returns:
        (dict): cluster index -> (representative, support) for clusters
            with members
    """
    wanted = set(int(j) for j in clusters)
    totals, counts = {}, {}
    for (start, matrix) in dataset.batches(spectra.SCAN_ROWS):
        labels = assignments[start:start + matrix.shape[0]]
        for j in np.unique(labels[labels >= 0]).tolist():
            if j not in wanted:
                continue
            rows = np.flatnonzero(labels == j)
            partial = kernel.mean_partial(matrix[rows])
            totals[j] = partial if j not in totals else totals[j] + partial
            counts[j] = counts.get(j, 0) + len(rows)
    return {j: (kernel.mean_finish(totals[j], counts[j]), counts[j]) for j in totals}

def _recompute(dataset, state, kernel, j):
    if not dataset.resident:
        means = streamed_means(dataset, state.assignments, [j], kernel)
        state.supports[j] = means[j][1] if j in means else 0
        if j in means:
            state.representatives[j] = means[j][0]
        return
    members = np.flatnonzero(state.assignments == j)
    state.supports[j] = len(members)
    if len(members):
        state.representatives[j] = kernel.frechet_mean(dataset.matrix[members])

def recompute_representatives(dataset, state, kernel):
    """ Frechet mean and support of every cluster from its full membership.

    Clusters without members get support 0 and keep their old
    representative until dissolution removes them.  Data that is not
    resident is scanned once, accumulating kernel partials per cluster.

    Arguments:
        dataset (spectra.Dataset or spectra.TripletStream): samples
        state (state.ClusterState): state after Phase 1, modified in place
        kernel (kernels.SimilarityKernel): Frechet rule

    Returns:
        (state.ClusterState): the updated state
    """
    state.representatives = state.representatives.copy()
    if not dataset.resident:
        means = streamed_means(dataset, state.assignments, range(state.K), kernel)
        for j in range(state.K):
            state.supports[j] = means[j][1] if j in means else 0
            if j in means:
                state.representatives[j] = means[j][0]
        return state
    members = state.member_lists()
    for j in range(state.K):
        state.supports[j] = len(members[j])
        if len(members[j]):
            state.representatives[j] = kernel.frechet_mean(dataset.matrix[members[j]])
    return state

################################################################
# merging
################################################################

def merge_pass(dataset, state, kernel, tau_inter):
    """ Merge live clusters whose representatives score >= tau_inter.

    Anchors are visited by descending support, then ascending index.  An
    anchor absorbs every live cluster within tau_inter of it, after which
    its representative is recomputed from the merged membership.  Sweeps
    repeat until one completes without a merge, so on return no live pair
    scores >= tau_inter.  A member counts toward a plan's volume the first
    time a merge moves it, so the volumes of one pass sum to at most N.

    Arguments:
        dataset (spectra.Dataset): samples
        state (state.ClusterState): freshly recomputed state, modified in place
        kernel (kernels.SimilarityKernel): similarity and Frechet rule
        tau_inter (float): merge threshold

    Returns:
        (list of MergePlan): merges in the order applied
    """
    plans = []
    if state.K < 2:
        return plans
    scores = kernel.pairwise(state.representatives)
    touched = np.zeros(len(state.assignments), dtype=bool)

    while True:
        alive = state.supports > 0
        anchors = sorted(np.flatnonzero(alive).tolist(), key=lambda j: (-int(state.supports[j]), j))
        merged = False
        for j in anchors:
            if not alive[j]:
                continue
            others = np.flatnonzero(alive)
            others = others[others != j]
            absorbed = others[scores[j, others] >= tau_inter]
            if len(absorbed) == 0:
                continue

            moved = np.isin(state.assignments, absorbed)
            volume = int(np.count_nonzero(moved & ~touched))
            touched |= moved
            state.assignments[moved] = j
            state.supports[absorbed] = 0
            alive[absorbed] = False
            _recompute(dataset, state, kernel, j)
            row = kernel.affinities(kernels.as_sparse_rows(state.representatives[j]), state.representatives)[0]
            scores[j, :] = row
            scores[:, j] = row
            plans.append(MergePlan(anchor=int(j), absorbed=absorbed.tolist(), volume=volume))
            merged = True
        if not merged:
            break
    return plans

################################################################
# dissolution and renumbering
################################################################

def dissolve_small(state, config):
    """ Dissolve clusters below minimum support.

    Clusters with support < Z that were not promoted this iteration lose
    their members to the outlier pool.  Dead clusters, including empty
    ones, keep support 0 until renumber() drops them.  Newly promoted
    flags are cleared afterwards.

    Returns:
        (int): number of non-empty clusters dissolved
    """
    dissolve = (state.supports > 0) & (state.supports < config.z_min) & ~state.newly_promoted
    if np.any(dissolve):
        state.assignments[np.isin(state.assignments, np.flatnonzero(dissolve))] = -1
        state.supports[dissolve] = 0
    state.newly_promoted = np.zeros(state.K, dtype=bool)
    return int(np.count_nonzero(dissolve))

def renumber(state):
    """ Reindex live clusters consecutively, keeping their relative order."""
    state.keep_clusters(state.supports > 0)
    return state

def consolidate(dataset, state, config, kernel):
    """ Full Phase 2 on state (modified in place).

    Returns:
        (ConsolidationReport): merges and dissolutions performed
    """
    recompute_representatives(dataset, state, kernel)
    emptied = int(np.count_nonzero(state.supports == 0))
    plans = merge_pass(dataset, state, kernel, config.tau_inter)
    dissolved = dissolve_small(state, config)
    renumber(state)
    report = ConsolidationReport(
        merges=plans, emptied=emptied, dissolved=dissolved,
        degenerate=np.flatnonzero(kernel.degenerate(state.representatives)).tolist(),
    )
    if config.check_invariants:
        state.check_supports()
        if report.merge_volume > dataset.N:
            raise exception.InvariantViolation(
                "merge-volume", "merges moved {} members, N = {}".format(report.merge_volume, dataset.N)
            )
    return report
