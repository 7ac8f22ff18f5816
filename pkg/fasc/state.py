""" state.py -- clustering state, seeding, hashing and checkpoints

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Add checkpoint file (magic line, JSON header, binary
      representatives, ids and assignments).
"""

import copy
import dataclasses
import hashlib
import json

import numpy as np

from . import (
    exception,
    spectra,
)

CHECKPOINT_MAGIC = b"FASC-CHECKPOINT 1\n"

# representative quantum for state hashing
HASH_QUANTUM = 1e-6

################################################################
# state types
################################################################

@dataclasses.dataclass(eq=False)
class ClusterState:
    """ Representatives, supports and the sample assignment vector.

    Cluster attributes are stored column-wise; index j of each array
    refers to cluster j.  An assignment of -1 marks a provisional outlier.

    Fields:
        representatives (np.ndarray): K x D
        supports (np.ndarray of int64): n_j
        born (np.ndarray of int64): iteration of creation
        newly_promoted (np.ndarray of bool): promoted this iteration
        assignments (np.ndarray of int64): per-sample cluster index or -1
        iteration (int): t
    """

    representatives: np.ndarray
    supports: np.ndarray
    born: np.ndarray
    newly_promoted: np.ndarray
    assignments: np.ndarray
    iteration: int = 0

    @classmethod
    def empty(cls, N, D, iteration=0):
        return cls(
            representatives=np.zeros((0, D)),
            supports=np.zeros(0, dtype=np.int64),
            born=np.zeros(0, dtype=np.int64),
            newly_promoted=np.zeros(0, dtype=bool),
            assignments=np.full(N, -1, dtype=np.int64),
            iteration=iteration,
        )

    @property
    def K(self):
        return self.representatives.shape[0]

    @property
    def D(self):
        return self.representatives.shape[1]

    @property
    def N(self):
        return self.assignments.shape[0]

    @property
    def outlier_count(self):
        return int(np.count_nonzero(self.assignments < 0))

    def copy(self):
        return copy.deepcopy(self)

    def append_clusters(self, representatives, supports, born, newly_promoted):
        """ Add clusters at the end of the index range."""
        self.representatives = np.vstack([self.representatives, np.atleast_2d(representatives)])
        self.supports = np.concatenate([self.supports, np.asarray(supports, dtype=np.int64)])
        self.born = np.concatenate([self.born, np.asarray(born, dtype=np.int64)])
        self.newly_promoted = np.concatenate([self.newly_promoted, np.asarray(newly_promoted, dtype=bool)])

    def keep_clusters(self, keep):
        """ Drop clusters not in the boolean mask keep, preserving order.

        Members of dropped clusters become outliers and the assignment
        vector is remapped to the surviving indices.
        """
        keep = np.asarray(keep, dtype=bool)
        remap = np.full(self.K + 1, -1, dtype=np.int64)
        remap[:-1][keep] = np.arange(np.count_nonzero(keep))
        # index -1 reads the last slot, which stays -1
        self.assignments = remap[self.assignments]
        self.representatives = self.representatives[keep]
        self.supports = self.supports[keep]
        self.born = self.born[keep]
        self.newly_promoted = self.newly_promoted[keep]

    def member_lists(self):
        """ Ascending sample positions for each cluster."""
        order = np.argsort(self.assignments, kind="stable")
        counts = np.bincount(self.assignments[self.assignments >= 0], minlength=self.K)
        start = self.outlier_count
        members = []
        for j in range(self.K):
            members.append(order[start:start+counts[j]])
            start += counts[j]
        return members

    def partition(self):
        """ Partition as a set of frozensets of sample positions."""
        return {frozenset(members.tolist()) for members in self.member_lists() if len(members)}

    def check_supports(self):
        """ Raise InvariantViolation unless n_j == |{i : ID_i = j}|."""
        if np.any(self.assignments >= self.K) or np.any(self.assignments < -1):
            raise exception.InvariantViolation("assignment-range", "cluster index outside [-1, {})".format(self.K))
        counts = np.bincount(self.assignments[self.assignments >= 0], minlength=self.K)
        if not np.array_equal(counts, self.supports):
            raise exception.InvariantViolation("support-consistency", "supports {} but counts {}".format(self.supports.tolist(), counts.tolist()))
        if not np.all(np.isfinite(self.representatives)):
            raise exception.InvariantViolation("finite-representatives", "non-finite representative entry")

################################################################
# seeding
################################################################

def seed_positions(N, seed_budget):
    """ Evenly spaced positions floor(k N / S_0), k = 0..S_0-1."""
    return [(k*N)//seed_budget for k in range(seed_budget)]

def initialize(dataset, config, kernel, order=None, admissible=None):
    """ Initial state with S_0 singleton seed clusters.

    Seeds are drawn at stratified positions of the canonical order,
    restricted to samples the kernel can score.  The default budget is
    clamped to N; an explicit budget above N is an error.

    Arguments:
        dataset (spectra.Dataset): input samples
        config (FascConfig): configuration
        kernel (kernels.SimilarityKernel): kernel for the seed representatives
        order (np.ndarray, optional): canonical row positions, computed
            when not given
        admissible (np.ndarray of bool, optional): kernel admissibility
            per row, computed when not given

    Returns:
        (ClusterState): state at t = 0
    """
    if dataset.N == 0:
        raise exception.DataError("empty dataset")
    seed_budget = config.resolved_seed_budget(dataset.N)
    if seed_budget > min(dataset.N, config.capacity(0)):
        raise exception.ConfigError(
            "seed_budget", "must not exceed min(N, K_0) = {}, got {}".format(min(dataset.N, config.capacity(0)), seed_budget)
        )

    state = ClusterState.empty(dataset.N, dataset.D)
    if seed_budget == 0:
        return state
    if order is None:
        order = spectra.canonical_positions(dataset)

    if admissible is None:
        admissible = spectra.admissible_mask(dataset, kernel)
    candidates = [int(i) for i in order if admissible[i]]
    seed_budget = min(seed_budget, len(candidates))
    if seed_budget == 0:
        return state
    seeds = [candidates[position] for position in seed_positions(len(candidates), seed_budget)]
    rows = dataset.rows(seeds)
    representatives = np.array([kernel.frechet_mean(rows[k]) for k in range(seed_budget)])
    state.append_clusters(
        representatives,
        supports=np.ones(seed_budget),
        born=np.zeros(seed_budget),
        newly_promoted=np.ones(seed_budget),
    )
    state.assignments[seeds] = np.arange(seed_budget)
    return state

################################################################
# cluster ordering and hashing
################################################################

def quantized_representatives(state):
    return np.rint(state.representatives/HASH_QUANTUM).astype("<i8")

def cluster_order(state):
    """ Cluster indices by descending support, then content, then index."""
    quantized = quantized_representatives(state)
    return sorted(
        range(state.K),
        key=lambda j: (-int(state.supports[j]), quantized[j].tobytes(), j)
    )

def state_hash(state, kernel=None):
    """ 64-bit digest of supports and quantized representatives.

    Listing order of clusters does not enter the digest.

    Arguments:
        state (ClusterState): state to hash
        kernel (kernels.SimilarityKernel, optional): mixed in by name

    Returns:
        (str): 16 hex digits
    """
    order = cluster_order(state)
    quantized = quantized_representatives(state)
    digest = hashlib.blake2b(digest_size=8)
    if kernel is not None:
        digest.update(kernel.name.encode())
    digest.update(np.array([state.K, state.D], dtype="<i8").tobytes())
    digest.update(state.supports[order].astype("<i8").tobytes())
    digest.update(quantized[order].tobytes())
    return digest.hexdigest()

################################################################
# checkpoints
################################################################

def save_checkpoint(path, state, ids, config, kernel):
    """ Write state to checkpoint file.

    Layout: magic line, one line of JSON header, then little-endian
    float64 representatives (K x D), int64 ids (N), int64 assignments (N).

    Arguments:
        path (str): output file
        state (ClusterState): state, assignments in the order of ids
        ids (np.ndarray): sample ids
        config (FascConfig or dict): configuration to record
        kernel (kernels.SimilarityKernel): kernel to record
    """
    header = {
        "t": state.iteration,
        "K": state.K,
        "D": state.D,
        "N": state.N,
        "kernel": kernel.name,
        "split_index": getattr(kernel, "split_index", None),
        "config": (config.to_dict() if hasattr(config, "to_dict") else config),
        "supports": state.supports.tolist(),
        "born": state.born.tolist(),
        "newly_promoted": state.newly_promoted.tolist(),
    }
    with open(path, "wb") as stream:
        stream.write(CHECKPOINT_MAGIC)
        stream.write(json.dumps(header, sort_keys=True).encode())
        stream.write(b"\n")
        stream.write(np.ascontiguousarray(state.representatives, dtype="<f8").tobytes())
        stream.write(np.asarray(ids, dtype="<i8").tobytes())
        stream.write(state.assignments.astype("<i8").tobytes())

def load_checkpoint(path):
    """ Read checkpoint file.

    Returns:
        (tuple): (ClusterState, ids, header dict)
    """
    with open(path, "rb") as stream:
        if stream.readline() != CHECKPOINT_MAGIC:
            raise exception.DataError("not a checkpoint file: {}".format(path))
        try:
            header = json.loads(stream.readline())
        except json.JSONDecodeError as err:
            raise exception.DataError("malformed checkpoint header: {}".format(err))
        payload = stream.read()

    K, D, N = header["K"], header["D"], header["N"]
    expected = 8*(K*D + 2*N)
    if len(payload) != expected:
        raise exception.DataError("truncated payload in {}: {} of {} bytes".format(path, len(payload), expected))
    representatives = np.frombuffer(payload, dtype="<f8", count=K*D).reshape(K, D).astype(np.float64)
    ids = np.frombuffer(payload, dtype="<i8", count=N, offset=8*K*D).astype(np.int64)
    assignments = np.frombuffer(payload, dtype="<i8", count=N, offset=8*(K*D+N)).astype(np.int64)
    state = ClusterState(
        representatives=representatives,
        supports=np.array(header["supports"], dtype=np.int64),
        born=np.array(header["born"], dtype=np.int64),
        newly_promoted=np.array(header["newly_promoted"], dtype=bool),
        assignments=assignments,
        iteration=header["t"],
    )
    return state, ids, header
