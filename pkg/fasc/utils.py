""" utils -- shared utility functions

    Language: Python 3

    10/18/26: Created from the scripting utilities.
        + Keep time stamps, path expansion, directory creation and the
          task timer.
        + Add content digests and line-oriented file output.
"""

import hashlib
import os
import pathlib
import time

################################################################
# file output
################################################################

def write_lines(filename, lines, verbose=False):
    """ Write text file with contents given line-by-line.

    Arguments:
        filename (str or path-like): output file
        lines (iterable of str): lines, without trailing newlines
        verbose (bool, optional): whether to log the file name
    """

    with open(filename, "w", newline="\n") as stream:
        for line in lines:
            stream.write(line)
            stream.write("\n")

    if verbose:
        print("Wrote {}".format(filename))

def content_digest(path, chunk_size=1 << 20):
    """ SHA-256 hex digest of a file's bytes.

    Arguments:
        path (str or path-like): file to digest
        chunk_size (int, optional): read block size

    Returns:
        (str): hex digest
    """
    digest = hashlib.sha256()
    with open(path, "rb") as stream:
        while True:
            block = stream.read(chunk_size)
            if not block:
                break
            digest.update(block)
    return digest.hexdigest()

################################################################
# timestamp utilities
################################################################

def time_stamp():
    """Returns time stamp string.

    Returns:
        (str): text for use as time stamp
    """

    return time.asctime()

################################################################
# filesystem
################################################################

def expand_path(path_or_list):
    """Expand and normalize path.

    Arguments which are `None` will return `None`.

    Arguments:
        path_or_list: (str or list of str) path (or list of paths) as string(s)
    Returns:
        (str or list of str): expanded and normalized path(s)
    """
    if path_or_list is None:
        return None
    elif isinstance(path_or_list, (str, bytes, os.PathLike)):
        expanded_path = os.path.expanduser(os.path.expandvars(path_or_list))
        norm_path = os.path.normpath(expanded_path)
        return norm_path
    else:
        return list(map(expand_path, path_or_list))

def mkdir(dirname, exist_ok=False, parents=False):
    """Create directory.

    Arguments:
        dirname (str): name for directory to create
        exist_ok (bool): accept an existing directory
        parents (bool): make parent directories as necessary
    """
    pathlib.Path(dirname).mkdir(parents=parents, exist_ok=exist_ok)

################################################################
# timing tracking
################################################################

class TaskTimer(object):
    """A class for tracking timing statistics of repeated tasks.

    Timings come from the monotonic performance counter.

    Attributes:
        timings (list of float): elapsed time for past timings
    """

    def __init__(self):
        self.timings = []
        self._task_start_time = None

    @property
    def last_time(self):
        """Time (in seconds) for last timing."""
        if len(self.timings) == 0:
            return 0.
        return self.timings[-1]

    @property
    def average_time(self):
        """Average time (in seconds) of past timings."""
        if len(self.timings) == 0:
            return 0.
        return sum(self.timings)/len(self.timings)

    def start_timer(self):
        """Start timer.

        Raises:
            (RuntimeError): timer already running
        """
        if self._task_start_time is not None:
            raise RuntimeError("timer already started")

        self._task_start_time = time.perf_counter()

    def stop_timer(self):
        """Stop timer and save timing information.

        Returns:
            (float): current timing information

        Raises:
            (RuntimeError): timer not already running
        """
        if self._task_start_time is None:
            raise RuntimeError("timer not running")
        task_time = time.perf_counter() - self._task_start_time
        self.timings.append(task_time)
        self._task_start_time = None
        return task_time
