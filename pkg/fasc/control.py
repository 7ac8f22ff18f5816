""" control.py -- provide overall run control code

    Language: Python 3

    - 10/18/26: Created from the scripting control module.
        + init() and termination() print the run banners.
        + Exit codes are an enum with a fixed taxonomy.
        + parallel_map() fans Phase-1 batches out to worker threads.
        + parallel_imap() keeps a bounded window of batches in flight.
"""

import collections
import concurrent.futures
import enum
import sys

from . import (
    parameters,
    utils,
)

################################################################
# exit codes
################################################################

class ExitCode(enum.Enum):
    kSuccess = 0
    kConfigError = 2
    kIOError = 3
    kInvariantViolation = 4

################################################################
# initialization code
################################################################

def init(title, workers=None, verbose=None):
    """ Carry out run setup.

    Arguments:
        title (str): command name for the banner
        workers (int, optional): worker override for RunParameters
        verbose (bool, optional): verbosity override for RunParameters
    """

    parameters.run.populate(workers=workers, verbose=verbose)

    if parameters.run.verbose:
        print("-"*64)
        print("fasc {}".format(title))
        print(parameters.run.run_data_string())
        print("-"*64)
        print(utils.time_stamp())
        sys.stdout.flush()


################################################################
# termination code
################################################################

def termination(exit_code=ExitCode.kSuccess, message=None):
    """Do global termination tasks.

    Arguments:
        exit_code (ExitCode, optional): termination status
        message (str, optional): diagnostic for a failure

    Returns:
        (int): process exit code
    """

    if message is not None:
        print("ERROR: {}".format(message), file=sys.stderr)
    if parameters.run.verbose:
        sys.stdout.flush()
        print("-"*64)
        print("Termination status: {}".format("success" if exit_code is ExitCode.kSuccess else "failure"))
        print(utils.time_stamp())
        print("-"*64)
    sys.stdout.flush()

    return exit_code.value


################################################################
# parallel execution
################################################################

def parallel_imap(function, items, workers=1, window=None):
    """Apply function to each item, yielding results in item order.

    Items are drawn from the iterable only as workers free up: at most
    window items are in flight, so a lazy source of batches is never
    materialized in full.

    Arguments:
        function (callable): function of one item
        items (iterable): work items
        workers (int, optional): thread count; 1 runs inline
        window (int, optional): items in flight, default 2*workers

    Yields:
        function(item) for each item
    """
    if workers <= 1:
        for item in items:
            yield function(item)
        return
    if window is None:
        window = 2*workers
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        pending = collections.deque()
        for item in items:
            pending.append(executor.submit(function, item))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()

def parallel_map(function, items, workers=1, window=None):
    """Apply function to each item, possibly on worker threads.

    Results are returned in the order of items regardless of
    scheduling, so any reduction over them is order-fixed.

    Returns:
        (list): function(item) for each item
    """
    return list(parallel_imap(function, items, workers=workers, window=window))
