""" spectra.py -- sparse spectrum data model and file formats

    Samples are held row-wise in a CSR matrix (float64, sorted indices, no
    stored zeros).  Readers validate on the way in, so a Dataset that
    exists satisfies the data invariants.

    Formats:
        dense CSV: header id,f0,...,f{D-1}[,label]
        sparse triplets: sample_id,dim,intensity plus sidecar {path}.json
            holding {"D": ..., "N": ..., "split_index": ...}
        IDX: big-endian, magic 0x00000803 (images) or 0x00000801 (labels),
            optionally gzip compressed

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Add writers and labels reader for round trips.
    + 10/18/26: Add content-derived canonical ordering.
    + 10/18/26: Add TripletStream, row batches read from a triplet file.
"""

import csv
import dataclasses
import gzip
import hashlib
import json
import math

import numpy as np
import scipy.sparse

from . import exception

# absolute quantum for content hashing
HASH_DECIMALS = 9

# rows per block in full-data scans
SCAN_ROWS = 4096

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

################################################################
# data types
################################################################

@dataclasses.dataclass(frozen=True)
class PolaritySplit:
    """ Channel boundary: dims [0, p) positive, [p, D) negative."""
    split_index: int

    def validate(self, D):
        if not (0 < self.split_index < D):
            raise exception.ConfigError(
                "split_index", "must satisfy 0 < p < D={}, got {}".format(D, self.split_index)
            )


@dataclasses.dataclass(eq=False)
class Dataset:
    """ Sample collection.

    Fields:
        ids (np.ndarray of int64): sample keys, unique
        matrix (scipy.sparse.csr_matrix): N x D intensities
        split (PolaritySplit, optional): polarity channel boundary
        labels (np.ndarray of int64, optional): ground-truth classes
    """

    ids: np.ndarray
    matrix: scipy.sparse.csr_matrix
    split: PolaritySplit = None
    labels: np.ndarray = None

    resident = True

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        matrix = scipy.sparse.csr_matrix(self.matrix, dtype=np.float64)
        matrix.eliminate_zeros()
        matrix.sort_indices()
        self.matrix = matrix
        if self.ids.ndim != 1 or self.ids.shape[0] != matrix.shape[0]:
            raise exception.DataError("id count {} does not match row count {}".format(self.ids.shape[0], matrix.shape[0]))
        if np.any(self.ids < 0):
            raise exception.DataError("sample ids must be non-negative")
        if np.unique(self.ids).shape[0] != self.ids.shape[0]:
            raise exception.DataError("duplicate sample id")
        if not np.all(np.isfinite(matrix.data)):
            raise exception.DataError("non-finite intensity")
        if np.any(matrix.data < 0):
            raise exception.DataError("negative intensity")
        if self.split is not None:
            self.split.validate(self.D)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != self.ids.shape:
                raise exception.DataError("count mismatch between labels and samples")
            if np.any(self.labels < 0):
                raise exception.DataError("labels must be non-negative")

    @classmethod
    def from_array(cls, array, ids=None, labels=None, split_index=None):
        """ Build a dataset from a dense or sparse N x D array.

        Arguments:
            array (array-like or sparse matrix): intensities
            ids (array-like, optional): sample keys, default 0..N-1
            labels (array-like, optional): classes
            split_index (int, optional): polarity split

        Returns:
            (Dataset): the dataset
        """
        if scipy.sparse.issparse(array):
            matrix = scipy.sparse.csr_matrix(array, dtype=np.float64)
        else:
            matrix = scipy.sparse.csr_matrix(np.atleast_2d(np.asarray(array, dtype=np.float64)))
        if ids is None:
            ids = np.arange(matrix.shape[0], dtype=np.int64)
        split = PolaritySplit(split_index) if split_index is not None else None
        return cls(ids=ids, matrix=matrix, split=split, labels=labels)

    @property
    def N(self):
        return self.matrix.shape[0]

    @property
    def D(self):
        return self.matrix.shape[1]

    @property
    def degenerate(self):
        """ Boolean mask of all-zero samples."""
        return np.diff(self.matrix.indptr) == 0

    def rows(self, positions):
        """ CSR rows at the given positions."""
        return self.matrix[np.asarray(positions, dtype=np.int64)]

    def batches(self, batch_size):
        """ Consecutive (start, rows) blocks of at most batch_size samples."""
        for start in range(0, self.N, batch_size):
            yield start, self.matrix[start:start+batch_size]

    def content_digests(self):
        return [_content_digest(*_row_entries(self.matrix, i)) for i in range(self.N)]

    def entries(self, i):
        return _row_entries(self.matrix, i)

    def take(self, positions):
        """ Dataset restricted to (and reordered by) row positions."""
        positions = np.asarray(positions, dtype=np.int64)
        return Dataset(
            ids=self.ids[positions],
            matrix=self.matrix[positions],
            split=self.split,
            labels=(self.labels[positions] if self.labels is not None else None),
        )

    def with_labels(self, label_map):
        """ Attach labels given as a mapping id -> class.

        Raises:
            (fasc.exception.DataError): a sample has no label
        """
        return Dataset(ids=self.ids, matrix=self.matrix, split=self.split, labels=_labels_for(self.ids, label_map))

    def identical(self, other):
        """ Exact equality of ids, content, split and labels."""
        if self.matrix.shape != other.matrix.shape or self.split != other.split:
            return False
        if not np.array_equal(self.ids, other.ids):
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        if self.labels is not None and not np.array_equal(self.labels, other.labels):
            return False
        return (
            np.array_equal(self.matrix.indptr, other.matrix.indptr)
            and np.array_equal(self.matrix.indices, other.matrix.indices)
            and np.array_equal(self.matrix.data, other.matrix.data)
        )

def _labels_for(ids, label_map):
    try:
        return np.array([label_map[int(sample_id)] for sample_id in ids], dtype=np.int64)
    except KeyError as err:
        raise exception.DataError("count mismatch: no label for sample id {}".format(err.args[0]))

################################################################
# canonical ordering
################################################################

def _row_entries(matrix, i):
    row = slice(matrix.indptr[i], matrix.indptr[i+1])
    return matrix.indices[row], matrix.data[row]

def _content_digest(indices, values):
    digest = hashlib.blake2b(digest_size=16)
    digest.update(indices.astype("<i8").tobytes())
    digest.update(np.round(values, HASH_DECIMALS).astype("<f8").tobytes())
    return digest.digest()

def canonical_positions(dataset):
    """ Row positions of the dataset in canonical order.

    The order is a function of content alone: quantized-content hash,
    then lexicographic comparison of the (dim, value) entries, then id.

    Arguments:
        dataset (Dataset or TripletStream): input

    Returns:
        (np.ndarray of int64): positions p such that dataset.take(p) is canonical
    """
    digests = dataset.content_digests()
    order = sorted(range(dataset.N), key=lambda i: (digests[i], int(dataset.ids[i])))

    # hash collisions between distinct content fall back to entry comparison
    result = []
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and digests[order[stop]] == digests[order[start]]:
            stop += 1
        run = order[start:stop]
        if len(run) > 1:
            def entry_key(i):
                indices, values = dataset.entries(i)
                return (list(zip(indices.tolist(), values.tolist())), int(dataset.ids[i]))
            run = sorted(run, key=entry_key)
        result.extend(run)
        start = stop
    return np.array(result, dtype=np.int64)

def admissible_mask(dataset, kernel):
    """ Kernel admissibility of every sample, scanned block by block."""
    masks = [kernel.admissible(matrix) for (_, matrix) in dataset.batches(SCAN_ROWS)]
    if not masks:
        return np.zeros(0, dtype=bool)
    return np.concatenate(masks)

def canonical_order(dataset):
    """ Sample ids in canonical order."""
    return dataset.ids[canonical_positions(dataset)]

################################################################
# dense CSV
################################################################

def _parse_float(text, line):
    try:
        value = float(text)
    except ValueError:
        raise exception.DataError("malformed value {!r}".format(text), line)
    if not math.isfinite(value):
        raise exception.DataError("non-finite value {!r}".format(text), line)
    return value

def _parse_int(text, line, what):
    try:
        value = int(text)
    except ValueError:
        raise exception.DataError("malformed {} {!r}".format(what, text), line)
    if value < 0:
        raise exception.DataError("negative {} {}".format(what, value), line)
    return value

def load_dense_csv(path, split_index=None):
    """ Read dense CSV with header id,f0,...,f{D-1}[,label].

    Arguments:
        path (str): input file
        split_index (int, optional): polarity split

    Returns:
        (Dataset): the data

    Raises:
        (fasc.exception.DataError): malformed content, with line number
    """
    with open(path, newline="") as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None:
            raise exception.DataError("missing header", 1)
        header = [field.strip() for field in header]
        has_label = header[-1] == "label"
        features = header[1:-1] if has_label else header[1:]
        if header[0] != "id" or any(name != "f{:d}".format(j) for (j, name) in enumerate(features)):
            raise exception.DataError("header must read id,f0,...,f{D-1}[,label]", 1)
        D = len(features)
        width = len(header)

        ids, rows, labels = [], [], []
        for (offset, fields) in enumerate(reader):
            line = offset + 2
            if not fields:
                continue
            if len(fields) != width:
                raise exception.DataError("row width mismatch", line)
            ids.append(_parse_int(fields[0], line, "id"))
            values = [_parse_float(text, line) for text in fields[1:1+D]]
            if any(value < 0 for value in values):
                raise exception.DataError("negative intensity", line)
            rows.append(values)
            if has_label:
                labels.append(_parse_int(fields[-1], line, "label"))

    array = np.array(rows, dtype=np.float64).reshape(len(rows), D)
    return Dataset.from_array(
        array, ids=ids, labels=(labels if has_label else None), split_index=split_index
    )

def write_dense_csv(dataset, path):
    """ Write dataset as dense CSV (labels included when present)."""
    header = ["id"] + ["f{:d}".format(j) for j in range(dataset.D)]
    if dataset.labels is not None:
        header.append("label")
    dense = dataset.matrix.toarray()
    with open(path, "w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for i in range(dataset.N):
            row = [str(int(dataset.ids[i]))] + [repr(float(value)) for value in dense[i]]
            if dataset.labels is not None:
                row.append(str(int(dataset.labels[i])))
            writer.writerow(row)

################################################################
# sparse triplets
################################################################

def sidecar_path(path):
    return "{}.json".format(path)

def _triplet_settings(path, D, split_index):
    """ D, split index and sidecar header, explicit arguments first."""
    header = {}
    try:
        with open(sidecar_path(path)) as stream:
            header = json.load(stream)
    except FileNotFoundError:
        pass
    except json.JSONDecodeError as err:
        raise exception.DataError("malformed sidecar header: {}".format(err))
    if D is None:
        D = header.get("D")
    if D is None:
        raise exception.ConfigError("D", "dimensionality not given and no sidecar header")
    if split_index is None:
        split_index = header.get("split_index")
    return D, split_index, header

def _parse_triplet(fields, line, D):
    if len(fields) != 3:
        raise exception.DataError("row width mismatch", line)
    sample_id = _parse_int(fields[0], line, "sample id")
    dim = _parse_int(fields[1], line, "dimension")
    intensity = _parse_float(fields[2], line)
    if dim >= D:
        raise exception.DataError("dimension out of range", line)
    if intensity < 0:
        raise exception.DataError("negative intensity", line)
    return sample_id, dim, intensity

def _check_count(header, N):
    if "N" in header and header["N"] != N:
        raise exception.DataError("count mismatch: header N={} but {} samples read".format(header["N"], N))

def load_sparse_triplets(path, D=None, split_index=None):
    """ Read sparse triplets sample_id,dim,intensity.

    D and split_index default to the sidecar header when not given.
    Samples appear in order of first occurrence.  A zero intensity
    registers a sample without storing an entry.

    Arguments:
        path (str): input file
        D (int, optional): dimensionality
        split_index (int, optional): polarity split

    Returns:
        (Dataset): the data
    """
    D, split_index, header = _triplet_settings(path, D, split_index)

    position = {}
    row_ind, col_ind, data = [], [], []
    seen = set()
    with open(path, newline="") as stream:
        for (offset, fields) in enumerate(csv.reader(stream)):
            line = offset + 1
            if not fields:
                continue
            if line == 1 and fields[0].strip() == "sample_id":
                continue
            (sample_id, dim, intensity) = _parse_triplet(fields, line, D)
            if (sample_id, dim) in seen:
                raise exception.DataError("duplicate entry ({}, {})".format(sample_id, dim), line)
            seen.add((sample_id, dim))
            row = position.setdefault(sample_id, len(position))
            if intensity > 0:
                row_ind.append(row)
                col_ind.append(dim)
                data.append(intensity)

    N = len(position)
    _check_count(header, N)
    matrix = scipy.sparse.csr_matrix((data, (row_ind, col_ind)), shape=(N, D), dtype=np.float64)
    ids = np.fromiter(position.keys(), dtype=np.int64, count=N)
    return Dataset.from_array(matrix, ids=ids, split_index=split_index)

def _entry_arrays(entries):
    """ Sorted dims and values of the nonzero entries of one sample."""
    nonzero = sorted((dim, value) for (dim, value) in entries.items() if value > 0)
    indices = np.array([dim for (dim, _) in nonzero], dtype=np.int64)
    values = np.array([value for (_, value) in nonzero], dtype=np.float64)
    return indices, values


class TripletStream(object):
    """ Sparse triplet file read back in row batches.

    open() makes one sequential pass that validates the file and records,
    per sample, its id, the byte offset of its first entry and its content
    digest.  Rows are read from the file on demand, so the intensities are
    never held in memory all at once.  The entries of a sample must be
    contiguous in the file.

    A stream answers the same row queries as a Dataset (N, D, ids, split,
    labels, rows, batches, content_digests, entries), which is all the
    clustering engine asks of its data.
    """

    resident = False

    def __init__(self, path, D, ids, offsets, digests, nonempty, split=None, labels=None):
        self.path = path
        self._D = int(D)
        self.ids = np.asarray(ids, dtype=np.int64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.digests = list(digests)
        self.nonempty = np.asarray(nonempty, dtype=bool)
        self.split = split
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)

    @classmethod
    def open(cls, path, D=None, split_index=None):
        """ Index a triplet file.

        Arguments:
            path (str): input file
            D (int, optional): dimensionality, default from the sidecar
            split_index (int, optional): polarity split, default from the sidecar

        Returns:
            (TripletStream): the indexed stream

        Raises:
            (fasc.exception.DataError): malformed or non-contiguous input
        """
        D, split_index, header = _triplet_settings(path, D, split_index)
        split = PolaritySplit(split_index) if split_index is not None else None
        if split is not None:
            split.validate(D)

        ids, offsets, digests, nonempty = [], [], [], []
        finished = set()
        current, entries = None, {}

        def close_sample():
            indices, values = _entry_arrays(entries)
            digests.append(_content_digest(indices, values))
            nonempty.append(len(indices) > 0)
            finished.add(current)

        with open(path, "rb") as stream:
            position = 0
            for (offset, raw) in enumerate(stream):
                line = offset + 1
                start = position
                position += len(raw)
                text = raw.decode("utf-8").strip()
                if not text:
                    continue
                fields = next(csv.reader([text]))
                if line == 1 and fields[0].strip() == "sample_id":
                    continue
                (sample_id, dim, intensity) = _parse_triplet(fields, line, D)
                if sample_id != current:
                    if current is not None:
                        close_sample()
                    if sample_id in finished:
                        raise exception.DataError("entries of sample id {} are not contiguous".format(sample_id), line)
                    current, entries = sample_id, {}
                    ids.append(sample_id)
                    offsets.append(start)
                if dim in entries:
                    raise exception.DataError("duplicate entry ({}, {})".format(sample_id, dim), line)
                entries[dim] = intensity
        if current is not None:
            close_sample()

        _check_count(header, len(ids))
        return cls(path, D, ids, offsets, digests, nonempty, split=split)

    @property
    def N(self):
        return self.ids.shape[0]

    @property
    def D(self):
        return self._D

    @property
    def degenerate(self):
        return ~self.nonempty

    def _read_rows(self, stream, positions):
        indptr, indices, data = [0], [], []
        for p in positions:
            stream.seek(int(self.offsets[p]))
            sample_id = int(self.ids[p])
            entries = {}
            while True:
                raw = stream.readline()
                if not raw:
                    break
                text = raw.decode("utf-8").strip()
                if not text:
                    continue
                fields = next(csv.reader([text]))
                if int(fields[0]) != sample_id:
                    break
                entries[int(fields[1])] = float(fields[2])
            row_indices, row_values = _entry_arrays(entries)
            indices.extend(row_indices.tolist())
            data.extend(row_values.tolist())
            indptr.append(len(indices))
        return scipy.sparse.csr_matrix(
            (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(len(indptr) - 1, self.D),
        )

    def rows(self, positions):
        """ CSR rows at the given positions, read from the file."""
        with open(self.path, "rb") as stream:
            return self._read_rows(stream, positions)

    def batches(self, batch_size):
        """ Consecutive (start, rows) blocks of at most batch_size samples."""
        with open(self.path, "rb") as stream:
            for start in range(0, self.N, batch_size):
                yield start, self._read_rows(stream, range(start, min(start + batch_size, self.N)))

    def content_digests(self):
        return list(self.digests)

    def entries(self, i):
        return _row_entries(self.rows([i]), 0)

    def take(self, positions):
        positions = np.asarray(positions, dtype=np.int64)
        return TripletStream(
            self.path, self.D, self.ids[positions], self.offsets[positions],
            [self.digests[p] for p in positions], self.nonempty[positions], split=self.split,
            labels=(self.labels[positions] if self.labels is not None else None),
        )

    def with_labels(self, label_map):
        labels = _labels_for(self.ids, label_map)
        return TripletStream(
            self.path, self.D, self.ids, self.offsets, self.digests, self.nonempty, split=self.split, labels=labels
        )

def write_sparse_triplets(dataset, path):
    """ Write dataset as sparse triplets plus sidecar header.

    All-zero samples are written as a single zero entry on dim 0.
    """
    with open(path, "w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["sample_id", "dim", "intensity"])
        for (start, block) in dataset.batches(SCAN_ROWS):
            for r in range(block.shape[0]):
                sample_id = str(int(dataset.ids[start + r]))
                indices, values = _row_entries(block, r)
                if len(indices) == 0:
                    writer.writerow([sample_id, "0", "0.0"])
                for (dim, value) in zip(indices.tolist(), values.tolist()):
                    writer.writerow([sample_id, str(dim), repr(value)])
    header = {"D": dataset.D, "N": dataset.N}
    if dataset.split is not None:
        header["split_index"] = dataset.split.split_index
    with open(sidecar_path(path), "w") as stream:
        json.dump(header, stream, sort_keys=True)
        stream.write("\n")

################################################################
# IDX
################################################################

def _read_bytes(path):
    with open(path, "rb") as stream:
        payload = stream.read()
    if payload[:2] == b"\x1f\x8b":
        payload = gzip.decompress(payload)
    return payload

def _idx_header(payload, magic, count, path):
    words = 4*(1+count)
    if len(payload) < words:
        raise exception.DataError("truncated header in {}".format(path))
    header = np.frombuffer(payload, dtype=">u4", count=1+count)
    if int(header[0]) != magic:
        raise exception.DataError("bad magic 0x{:08x} in {}, expected 0x{:08x}".format(int(header[0]), path, magic))
    return [int(value) for value in header[1:]], words

def read_idx_labels(path):
    payload = _read_bytes(path)
    (n,), offset = _idx_header(payload, IDX_LABELS_MAGIC, 1, path)
    if len(payload) < offset + n:
        raise exception.DataError("truncated payload in {}".format(path))
    return np.frombuffer(payload, dtype=np.uint8, count=n, offset=offset).astype(np.int64)

def load_idx_images(images_path, labels_path=None):
    """ Read IDX image file (and optional label file).

    Arguments:
        images_path (str): IDX3 image file
        labels_path (str, optional): IDX1 label file

    Returns:
        (Dataset): N x (rows*cols) raw pixel intensities, ids 0..N-1
    """
    payload = _read_bytes(images_path)
    (n, rows, cols), offset = _idx_header(payload, IDX_IMAGES_MAGIC, 3, images_path)
    D = rows*cols
    if len(payload) < offset + n*D:
        raise exception.DataError("truncated payload in {}".format(images_path))
    pixels = np.frombuffer(payload, dtype=np.uint8, count=n*D, offset=offset).reshape(n, D)
    labels = None
    if labels_path is not None:
        labels = read_idx_labels(labels_path)
        if labels.shape[0] != n:
            raise exception.DataError("count mismatch: {} images but {} labels".format(n, labels.shape[0]))
    return Dataset.from_array(scipy.sparse.csr_matrix(pixels.astype(np.float64)), labels=labels)

################################################################
# labels
################################################################

def load_labels(path):
    """ Read labels as a mapping id -> class.

    Accepts an IDX label file (ids 0..n-1) or a CSV with header id,label.
    """
    with open(path, "rb") as stream:
        head = stream.read(4)
    if head[:2] == b"\x1f\x8b" or head == IDX_LABELS_MAGIC.to_bytes(4, "big"):
        labels = read_idx_labels(path)
        return {i: int(label) for (i, label) in enumerate(labels)}

    label_map = {}
    with open(path, newline="") as stream:
        for (offset, fields) in enumerate(csv.reader(stream)):
            line = offset + 1
            if not fields or (line == 1 and fields[0].strip() == "id"):
                continue
            if len(fields) != 2:
                raise exception.DataError("row width mismatch", line)
            sample_id = _parse_int(fields[0], line, "id")
            if sample_id in label_map:
                raise exception.DataError("duplicate id {}".format(sample_id), line)
            label_map[sample_id] = _parse_int(fields[1], line, "label")
    return label_map

def write_labels_csv(ids, labels, path):
    with open(path, "w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["id", "label"])
        for (sample_id, label) in zip(ids, labels):
            writer.writerow([int(sample_id), int(label)])
