""" kernels.py -- similarity kernels and their Frechet-mean rules

    A kernel scores a block of samples (sparse rows) against a set of
    representatives (dense rows).  All scores go through sparse-row by
    dense products, so each score is accumulated over the sample's own
    nonzeros in ascending dimension order.  A sample's scores therefore do
    not depend on which other samples share its batch, and
    similarity(u, v) == similarity(v, u) holds exactly.

    Kernels, by name:
        cosine: u_hat . v_hat, zero for an all-zero vector
        dual-cosine: min of positive- and negative-channel cosines
        sqeuclidean: -||u-v||^2 (Bregman, thresholds on that scale)
        manhattan: -||u-v||_1

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Route scalar similarity through the block path.
"""

import dataclasses
import math

import numpy as np
import scipy.sparse

from . import exception

################################################################
# row arithmetic
################################################################

def as_sparse_rows(X):
    """ Canonical CSR view of a vector or row block."""
    if scipy.sparse.issparse(X):
        X = scipy.sparse.csr_matrix(X, dtype=np.float64)
    else:
        X = scipy.sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    X.eliminate_zeros()
    X.sort_indices()
    return X

def row_squared_norms(X):
    """ Sum of squares per CSR row, accumulated in nonzero order."""
    squared = X.copy()
    squared.data = X.data*X.data
    return squared @ np.ones(X.shape[1])

def normalize_rows(X):
    """ Rows of a CSR block scaled to unit l2 norm; zero rows stay zero."""
    norms = np.sqrt(row_squared_norms(X))
    normalized = X.copy()
    normalized.data = X.data/np.repeat(norms, np.diff(X.indptr))
    return normalized

def normalize_dense(C):
    """ Dense rows normalized exactly as normalize_rows would."""
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    if C.shape[0] == 0:
        return C.copy()
    return normalize_rows(as_sparse_rows(C)).toarray()

def _check_dims(u, v):
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise exception.ContractViolation(
            "dimension mismatch: {} vs {}".format(u.shape[0], v.shape[0])
        )
    return u, v

################################################################
# kernel classes
################################################################

class SimilarityKernel(object):
    """ Base class for pluggable similarity oracles.

    Attributes:
        name (str): registry name
        is_bounded (bool): scores lie in [-1, 1]
        is_symmetric (bool): similarity(u, v) == similarity(v, u)
        bregman (bool): dissimilarity is a Bregman divergence
        streams (bool): Frechet mean decomposes into summable partials
    """

    name = None
    is_bounded = True
    is_symmetric = True
    bregman = False
    streams = False

    def affinities(self, X, C):
        """ Score block.

        Arguments:
            X (scipy.sparse.csr_matrix): n x D samples
            C (np.ndarray): K x D representatives

        Returns:
            (np.ndarray): n x K scores
        """
        raise NotImplementedError

    def frechet_mean(self, members):
        """ Representative minimizing the kernel's Frechet objective.

        Arguments:
            members (scipy.sparse.csr_matrix or array): m x D member rows, m >= 1

        Returns:
            (np.ndarray): D-vector
        """
        raise NotImplementedError

    def mean_partial(self, members):
        """ Additive partial of the Frechet mean over a block of members.

        Partials of disjoint blocks add up, and mean_finish turns their
        sum into the representative.
        """
        raise exception.ConfigError("kernel", "{} representatives need resident data".format(self.name))

    def mean_finish(self, total, count):
        raise exception.ConfigError("kernel", "{} representatives need resident data".format(self.name))

    def admissible(self, X):
        """ Mask of samples able to score above zero against anything."""
        return np.ones(X.shape[0], dtype=bool)

    def degenerate(self, C):
        """ Mask of representatives the kernel cannot score, such as an all-zero
        cosine mean of members that sum to zero."""
        C = np.atleast_2d(np.asarray(C, dtype=np.float64))
        if C.shape[0] == 0:
            return np.zeros(0, dtype=bool)
        return ~self.admissible(as_sparse_rows(C))

    def similarity(self, u, v):
        u, v = _check_dims(u, v)
        return float(self.affinities(as_sparse_rows(u), v[np.newaxis, :])[0, 0])

    def dissimilarity(self, u, v):
        return -self.similarity(u, v)

    def pairwise(self, C):
        """ K x K score matrix among representatives."""
        C = np.atleast_2d(np.asarray(C, dtype=np.float64))
        return self.affinities(as_sparse_rows(C), C)

    def check_members(self, members):
        members = as_sparse_rows(members)
        if members.shape[0] == 0:
            raise exception.ContractViolation("Frechet mean of empty membership")
        return members

    def __repr__(self):
        return "{}()".format(type(self).__name__)


class CosineKernel(SimilarityKernel):
    name = "cosine"
    streams = True

    def affinities(self, X, C):
        C = np.atleast_2d(np.asarray(C, dtype=np.float64))
        if C.shape[0] == 0:
            return np.zeros((X.shape[0], 0))
        return np.asarray(normalize_rows(X) @ normalize_dense(C).T)

    def frechet_mean(self, members):
        members = self.check_members(members)
        total = np.asarray(normalize_rows(members).sum(axis=0)).ravel()
        return normalize_dense(total)[0]

    def mean_partial(self, members):
        return np.asarray(normalize_rows(as_sparse_rows(members)).sum(axis=0)).ravel()

    def mean_finish(self, total, count):
        return normalize_dense(total)[0]

    def admissible(self, X):
        return np.diff(X.indptr) > 0

    def dissimilarity(self, u, v):
        return math.acos(min(1.0, max(-1.0, self.similarity(u, v))))


class DualCosineKernel(SimilarityKernel):
    """ Cosine on each polarity channel, combined by min.

    A channel that is all-zero in either vector scores 0, so the combined
    score is 0.
    """

    name = "dual-cosine"
    streams = True

    def __init__(self, split_index):
        if split_index is None or split_index <= 0:
            raise exception.ConfigError("kernel", "dual-cosine requires a polarity split")
        self.split_index = int(split_index)
        self._channel = CosineKernel()

    def channel_affinities(self, X, C):
        """ Positive- and negative-channel score blocks."""
        p = self.split_index
        C = np.atleast_2d(np.asarray(C, dtype=np.float64))
        if X.shape[1] <= p:
            raise exception.ContractViolation(
                "split index {} not inside dimension {}".format(p, X.shape[1])
            )
        pos = self._channel.affinities(X[:, :p], C[:, :p])
        neg = self._channel.affinities(X[:, p:], C[:, p:])
        return pos, neg

    def affinities(self, X, C):
        pos, neg = self.channel_affinities(X, C)
        return np.minimum(pos, neg)

    def frechet_mean(self, members):
        members = self.check_members(members)
        p = self.split_index
        return np.concatenate(
            [self._channel.frechet_mean(members[:, :p]), self._channel.frechet_mean(members[:, p:])]
        )

    def mean_partial(self, members):
        members = as_sparse_rows(members)
        p = self.split_index
        return np.concatenate(
            [self._channel.mean_partial(members[:, :p]), self._channel.mean_partial(members[:, p:])]
        )

    def mean_finish(self, total, count):
        p = self.split_index
        return np.concatenate(
            [self._channel.mean_finish(total[:p], count), self._channel.mean_finish(total[p:], count)]
        )

    def admissible(self, X):
        p = self.split_index
        return (X[:, :p].getnnz(axis=1) > 0) & (X[:, p:].getnnz(axis=1) > 0)

    def dissimilarity(self, u, v):
        return math.acos(min(1.0, max(-1.0, self.similarity(u, v))))

    def __repr__(self):
        return "DualCosineKernel(split_index={})".format(self.split_index)


class SqEuclideanKernel(SimilarityKernel):
    """ Squared Euclidean distance as a negated similarity."""

    name = "sqeuclidean"
    is_bounded = False
    bregman = True
    streams = True

    def affinities(self, X, C):
        C = np.atleast_2d(np.asarray(C, dtype=np.float64))
        if C.shape[0] == 0:
            return np.zeros((X.shape[0], 0))
        x_sq = row_squared_norms(X)
        c_sq = row_squared_norms(as_sparse_rows(C))
        dots = np.asarray(X @ C.T)
        distances = (x_sq[:, np.newaxis] + c_sq[np.newaxis, :]) - 2.0*dots
        return -np.maximum(distances, 0.0)

    def frechet_mean(self, members):
        members = self.check_members(members)
        return np.asarray(members.sum(axis=0)).ravel()/members.shape[0]

    def mean_partial(self, members):
        return np.asarray(as_sparse_rows(members).sum(axis=0)).ravel()

    def mean_finish(self, total, count):
        return np.asarray(total, dtype=np.float64)/count

    def divergence_sum(self, members, c):
        """ Sum of ||x - c||^2 over member rows."""
        residual = as_sparse_rows(members).toarray() - np.asarray(c, dtype=np.float64)
        return float(np.sum(residual*residual))


class ManhattanKernel(SimilarityKernel):
    """ Negated L1 distance; Frechet mean is the coordinate-wise lower median."""

    name = "manhattan"
    is_bounded = False

    def affinities(self, X, C):
        C = np.atleast_2d(np.asarray(C, dtype=np.float64))
        dense = X.toarray()
        scores = np.empty((X.shape[0], C.shape[0]))
        for (k, c) in enumerate(C):
            scores[:, k] = -np.abs(dense - c).sum(axis=1)
        return scores

    def frechet_mean(self, members):
        members = self.check_members(members)
        ordered = np.sort(members.toarray(), axis=0)
        return ordered[(ordered.shape[0]-1)//2].copy()

################################################################
# kernel registry
################################################################

kernel_names = ("cosine", "dual-cosine", "sqeuclidean", "manhattan")

def get_kernel(name, split_index=None):
    """ Kernel instance by name.

    Arguments:
        name (str): one of kernel_names
        split_index (int, optional): polarity split, required by dual-cosine

    Returns:
        (SimilarityKernel): the kernel
    """
    if name == "cosine":
        return CosineKernel()
    elif name == "dual-cosine":
        return DualCosineKernel(split_index)
    elif name == "sqeuclidean":
        return SqEuclideanKernel()
    elif name == "manhattan":
        return ManhattanKernel()
    raise exception.ConfigError("kernel", "unknown kernel {!r}, expected one of {}".format(name, ", ".join(kernel_names)))

################################################################
# scalar entry points
################################################################

@dataclasses.dataclass(frozen=True)
class DualCosineScore:
    pos: float
    neg: float
    combined: float

def cosine(u, v):
    """ Cosine similarity; 0 if either vector is all-zero."""
    return CosineKernel().similarity(u, v)

def dual_cosine(u, v, split_index):
    """ Per-channel cosines and their minimum.

    Arguments:
        u, v (array-like): vectors of equal dimension
        split_index (int): first dimension of the negative channel

    Returns:
        (DualCosineScore): channel scores and combined score
    """
    u, v = _check_dims(u, v)
    kernel = DualCosineKernel(split_index)
    pos, neg = kernel.channel_affinities(as_sparse_rows(u), v[np.newaxis, :])
    pos, neg = float(pos[0, 0]), float(neg[0, 0])
    return DualCosineScore(pos=pos, neg=neg, combined=min(pos, neg))

def dual_cosine_dissimilarity(u, v, split_index):
    """ Angle arccos(combined) in [0, pi], the larger channel angle."""
    return DualCosineKernel(split_index).dissimilarity(u, v)

def sq_euclidean_divergence(x, c):
    x, c = _check_dims(x, c)
    residual = x - c
    return float(residual @ residual)

def frechet_mean(kernel, members):
    return kernel.frechet_mean(members)
