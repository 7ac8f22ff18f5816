""" phase1.py -- assignment phase

    Samples are scored in batches against the representatives frozen at
    the start of the iteration, filtered by the acceptance threshold, and
    assigned by the SF or DASS rule.  Batches may run on worker threads;
    each writes a disjoint slice of the assignment vector.  Outliers are
    then promoted to singleton clusters up to the capacity K_t.

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Add working-set meter.
    + 10/18/26: Feed batches to the workers lazily.
"""

import dataclasses

import numpy as np

from . import (
    control,
    exception,
    parameters,
    spectra,
)

################################################################
# data types
################################################################

@dataclasses.dataclass
class Batch:
    indices: np.ndarray
    matrix: object


@dataclasses.dataclass
class AffinityBlock:
    """ Scores of one batch against the frozen representatives.

    Fields:
        indices (np.ndarray): sample positions of the batch
        scores (np.ndarray): |batch| x K similarities
    """
    indices: np.ndarray
    scores: np.ndarray


@dataclasses.dataclass
class AssignmentResult:
    """ Outcome of one assignment pass.

    Fields:
        assignments (np.ndarray of int64): new cluster index or -1 per sample
        best_scores (np.ndarray): max similarity over all clusters, -inf if K=0
        label_changes (int): samples whose index changed
        working_set_bytes (int): peak bytes of batch buffers, affinity
            blocks and representatives
    """
    assignments: np.ndarray
    best_scores: np.ndarray
    label_changes: int
    working_set_bytes: int

################################################################
# scoring
################################################################

def make_batches(dataset, batch_size):
    """ Consecutive row batches of at most batch_size samples, produced lazily."""
    for (start, matrix) in dataset.batches(batch_size):
        yield Batch(indices=np.arange(start, start + matrix.shape[0]), matrix=matrix)

def compute_affinities(batch, state, kernel):
    """ Affinity block S = sigma(x_i, c_j) for a batch.

    Arguments:
        batch (Batch): sample rows and their positions
        state (state.ClusterState): frozen representatives
        kernel (kernels.SimilarityKernel): similarity

    Returns:
        (AffinityBlock): |batch| x K scores (zero columns when K = 0)
    """
    if state.K == 0:
        scores = np.zeros((len(batch.indices), 0))
    else:
        scores = kernel.affinities(batch.matrix, state.representatives)
        if not np.all(np.isfinite(scores)):
            raise exception.InvariantViolation("finite-affinities", "non-finite score in batch")
    return AffinityBlock(indices=batch.indices, scores=scores)

################################################################
# selection rules
################################################################

def candidate_set(scores_row, tau_intra):
    """ Cluster indices j with score >= tau_intra, ascending."""
    return [int(j) for j in np.flatnonzero(np.asarray(scores_row) >= tau_intra)]

def select_sf(scores_row, candidates):
    """ Candidate of maximal score, lowest index on ties."""
    if len(candidates) == 0:
        raise exception.ContractViolation("select_sf called with no candidates")
    best = None
    for j in sorted(candidates):
        if best is None or scores_row[j] > scores_row[best]:
            best = j
    return best

def density_terms(supports, lam, phi):
    """ lambda * phi(n_j) for each cluster."""
    if isinstance(phi, str):
        phi = parameters.phi_functions[phi]
    return np.array([lam*phi(int(n)) for n in supports], dtype=np.float64)

def select_dass(scores_row, candidates, supports, lam, phi):
    """ Candidate maximizing sigma + lambda phi(n_j), lowest index on ties.

    Arguments:
        scores_row (array): similarities against each cluster
        candidates (iterable of int): admissible clusters
        supports (array): frozen supports n_j
        lam (float): density weight
        phi (callable or str): density function

    Returns:
        (int): selected cluster
    """
    if len(candidates) == 0:
        raise exception.ContractViolation("select_dass called with no candidates")
    density = density_terms(supports, lam, phi)
    best, best_value = None, None
    for j in sorted(candidates):
        value = scores_row[j] + density[j]
        if best is None or value > best_value:
            best, best_value = j, value
    return best

################################################################
# batched assignment
################################################################

def _assign_block(block, tau_intra, density):
    """ Vectorized candidate filtering and selection for one block."""
    scores = block.scores
    n = scores.shape[0]
    if scores.shape[1] == 0:
        return np.full(n, -1, dtype=np.int64), np.full(n, -np.inf)
    admissible = scores >= tau_intra
    objective = scores if density is None else scores + density[np.newaxis, :]
    objective = np.where(admissible, objective, -np.inf)
    # argmax returns the first maximum, i.e. the lowest index
    chosen = np.argmax(objective, axis=1).astype(np.int64)
    chosen[~admissible.any(axis=1)] = -1
    return chosen, scores.max(axis=1)

def assign_all(dataset, state, config, kernel, workers=1):
    """ Phase-1 assignment of every sample against the frozen state.

    Arguments:
        dataset (spectra.Dataset): samples
        state (state.ClusterState): frozen representatives and supports
        config (parameters.FascConfig): thresholds and rule
        kernel (kernels.SimilarityKernel): similarity
        workers (int, optional): batch worker threads

    Returns:
        (AssignmentResult): new assignments and best scores
    """
    density = None
    if config.rule == "dass":
        density = density_terms(state.supports, config.lam, config.phi_function())
    representative_bytes = state.representatives.nbytes

    def process(batch):
        block = compute_affinities(batch, state, kernel)
        chosen, best = _assign_block(block, config.tau_intra, density)
        matrix = batch.matrix
        buffer_bytes = matrix.data.nbytes + matrix.indices.nbytes + matrix.indptr.nbytes
        return batch.indices, chosen, best, buffer_bytes + block.scores.nbytes

    assignments = np.full(dataset.N, -1, dtype=np.int64)
    best_scores = np.full(dataset.N, -np.inf)
    peak_batch_bytes = 0
    batches = make_batches(dataset, config.batch_size)
    for (indices, chosen, best, batch_bytes) in control.parallel_imap(process, batches, workers=workers):
        assignments[indices] = chosen
        best_scores[indices] = best
        peak_batch_bytes = max(peak_batch_bytes, batch_bytes)

    batch_count = -(-dataset.N // config.batch_size)
    concurrent = max(1, min(workers, batch_count))
    return AssignmentResult(
        assignments=assignments,
        best_scores=best_scores,
        label_changes=int(np.count_nonzero(assignments != state.assignments)),
        working_set_bytes=concurrent*peak_batch_bytes + representative_bytes,
    )

################################################################
# promotion
################################################################

def promote_outliers(dataset, state, config, kernel, best_scores, admissible=None):
    """ Promote outliers to singleton clusters until K reaches K_t.

    Most novel outliers (lowest best score) go first, ties by position
    in the canonical order of the dataset.  Samples outside the kernel's
    admissible mask are never promoted.

    Arguments:
        dataset (spectra.Dataset): samples, in canonical order
        state (state.ClusterState): state after assignment, modified in place
        config (parameters.FascConfig): capacity schedule
        kernel (kernels.SimilarityKernel): Frechet rule for the singletons
        best_scores (np.ndarray): from assign_all
        admissible (np.ndarray of bool, optional): precomputed kernel mask

    Returns:
        (list of int): promoted sample positions
    """
    free = config.capacity(state.iteration) - state.K
    if free <= 0:
        return []
    if admissible is None:
        admissible = spectra.admissible_mask(dataset, kernel)
    outliers = np.flatnonzero((state.assignments < 0) & admissible)
    if len(outliers) == 0:
        return []

    ranked = outliers[np.lexsort((outliers, best_scores[outliers]))]
    promoted = ranked[:free]
    first = state.K
    rows = dataset.rows(promoted)
    representatives = np.array([kernel.frechet_mean(rows[k]) for k in range(len(promoted))])
    state.append_clusters(
        representatives,
        supports=np.ones(len(promoted)),
        born=np.full(len(promoted), state.iteration + 1),
        newly_promoted=np.ones(len(promoted)),
    )
    state.assignments[promoted] = np.arange(first, first + len(promoted))
    return promoted.tolist()
