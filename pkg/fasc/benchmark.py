""" benchmark.py -- synthetic data and the runtime scaling sweep

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Exclude warm-up iteration; fit with scipy linregress.
    + 10/18/26: Add streaming sweeps over triplet files.
"""

import dataclasses
import json
import os
import statistics
import tempfile

import numpy as np
import scipy.stats

from . import (
    exception,
    phase3,
    spectra,
    utils,
)

################################################################
# synthetic data
################################################################

def generate_synthetic(n, d, k_true, noise, seed, dual_polarity=False, density=0.1):
    """ Noisy copies of k_true sparse non-negative directions.

    Each direction has round(density*d) nonzeros (at least one per
    channel with a polarity split) drawn uniformly from [0.5, 1.5].  A
    sample adds noise*uniform(-1, 1) on its direction's support and is
    clipped at zero.  Sample i belongs to class i mod k_true, with sample
    positions shuffled.

    Arguments:
        n (int): sample count
        d (int): dimensionality
        k_true (int): number of directions, at most n
        noise (float): noise amplitude, >= 0
        seed (int): generator seed
        dual_polarity (bool, optional): split channels at d/2
        density (float, optional): nonzero fraction per direction

    Returns:
        (spectra.Dataset): samples with labels
    """
    if n < 1:
        raise exception.ConfigError("n", "must be >= 1, got {}".format(n))
    if not (1 <= k_true <= n):
        raise exception.ConfigError("k_true", "must lie in [1, n={}], got {}".format(n, k_true))
    if d < (2 if dual_polarity else 1):
        raise exception.ConfigError("d", "too small: {}".format(d))
    if noise < 0:
        raise exception.ConfigError("noise", "must be >= 0, got {}".format(noise))
    if not (0 < density <= 1):
        raise exception.ConfigError("density", "must lie in (0, 1], got {}".format(density))

    rng = np.random.default_rng(seed)
    directions = np.zeros((k_true, d))
    if dual_polarity:
        half = d//2
        channels = [(0, half), (half, d)]
    else:
        channels = [(0, d)]
    for k in range(k_true):
        for (start, stop) in channels:
            width = stop - start
            m = max(1, int(round(density*width)))
            support = start + rng.choice(width, size=m, replace=False)
            directions[k, support] = rng.uniform(0.5, 1.5, size=m)

    labels = rng.permutation(np.arange(n) % k_true)
    samples = directions[labels]
    if noise > 0:
        support = samples > 0
        samples = samples + noise*rng.uniform(-1.0, 1.0, size=samples.shape)*support
        samples = np.maximum(samples, 0.0)
    return spectra.Dataset.from_array(
        samples, labels=labels, split_index=(d//2 if dual_polarity else None)
    )

################################################################
# scaling sweep
################################################################

@dataclasses.dataclass
class SizeRecord:
    N: int
    iterations: int
    total_seconds: float
    seconds_per_iteration: float
    working_set_bytes: int
    spread: float


@dataclasses.dataclass
class ScalingReport:
    """ Per-size timings and the least-squares fit of s/iteration vs N.

    Fit fields are None when fewer than two sizes were measured.
    """
    records: list
    slope: float = None
    intercept: float = None
    r2: float = None
    insufficient_points: bool = False


def iteration_spread(timings):
    """ Relative standard deviation of iteration times after warm-up."""
    steady = timings[1:]
    if len(steady) < 2:
        return 0.0
    mean = statistics.fmean(steady)
    return statistics.pstdev(steady)/mean if mean > 0 else 0.0

def steady_seconds_per_iteration(timings):
    """ Median iteration time with the warm-up iteration excluded."""
    steady = timings[1:] if len(timings) > 1 else timings
    return statistics.median(steady)

def fit_linear(sizes, seconds):
    """ Ordinary least squares of seconds against sizes.

    Returns:
        (tuple): (slope, intercept, r2), or Nones with fewer than two points
    """
    if len(sizes) < 2:
        return None, None, None
    fit = scipy.stats.linregress(np.asarray(sizes, dtype=float), np.asarray(seconds, dtype=float))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)

def stream_to_file(dataset, path):
    """ Write dataset as sparse triplets and reopen it as a TripletStream."""
    spectra.write_sparse_triplets(dataset, path)
    return spectra.TripletStream.open(path)

def scaling_sweep(sizes, config, kernel, repetitions=3, d=600, k_true=20, noise=0.05, seed=0,
                  dual_polarity=False, workers=1, streaming=False, work_dir=None, verbose=False):
    """ Time FASC on synthetic data of increasing size.

    Arguments:
        sizes (list of int): ascending sample counts, each >= 10 K_max
        config (parameters.FascConfig): run configuration
        kernel (kernels.SimilarityKernel): similarity
        repetitions (int, optional): runs per size, median taken
        d, k_true, noise, seed, dual_polarity: generator parameters
        workers (int, optional): Phase-1 worker threads
        streaming (bool, optional): write each synthetic set as sparse
            triplets and run on a TripletStream over that file
        work_dir (str, optional): directory for the triplet files,
            default a temporary directory

    Returns:
        (ScalingReport): records and linear fit
    """
    sizes = list(sizes)
    if not sizes:
        raise exception.ConfigError("sizes", "no sizes given")
    if any(b <= a for (a, b) in zip(sizes, sizes[1:])):
        raise exception.ConfigError("sizes", "must be strictly increasing")
    if sizes[0] < 10*config.capacity(0):
        raise exception.ConfigError("sizes", "each size must be >= 10 K_max = {}".format(10*config.capacity(0)))
    if repetitions < 1:
        raise exception.ConfigError("reps", "must be >= 1, got {}".format(repetitions))

    if streaming and work_dir is None:
        with tempfile.TemporaryDirectory() as scratch:
            return scaling_sweep(
                sizes, config, kernel, repetitions=repetitions, d=d, k_true=k_true, noise=noise, seed=seed,
                dual_polarity=dual_polarity, workers=workers, streaming=True, work_dir=scratch, verbose=verbose,
            )

    records = []
    for size in sizes:
        dataset = generate_synthetic(size, d, k_true, noise, seed, dual_polarity=dual_polarity)
        if streaming:
            dataset = stream_to_file(dataset, os.path.join(work_dir, "synthetic-{:d}.csv".format(size)))
        per_iteration, totals, spreads = [], [], []
        working_set = 0
        iterations = 0
        for _ in range(repetitions):
            result = phase3.run(dataset, config, kernel, workers=workers)
            per_iteration.append(steady_seconds_per_iteration(result.timings))
            totals.append(sum(result.timings))
            spreads.append(iteration_spread(result.timings))
            working_set = max(working_set, result.working_set_bytes)
            iterations = result.iterations
        record = SizeRecord(
            N=size,
            iterations=iterations,
            total_seconds=statistics.median(totals),
            seconds_per_iteration=statistics.median(per_iteration),
            working_set_bytes=working_set,
            spread=statistics.median(spreads),
        )
        records.append(record)
        if verbose:
            print("N {:8d}: {:3d} iterations, {:.4f} s/iteration".format(size, iterations, record.seconds_per_iteration))

    slope, intercept, r2 = fit_linear([r.N for r in records], [r.seconds_per_iteration for r in records])
    return ScalingReport(
        records=records, slope=slope, intercept=intercept, r2=r2,
        insufficient_points=(len(records) < 2),
    )

def write_scaling_report(report, out_dir):
    """ Write scaling.csv (N,iters,total_s,s_per_iter) and scaling.json."""
    utils.mkdir(out_dir, exist_ok=True, parents=True)
    lines = ["N,iters,total_s,s_per_iter"]
    for record in report.records:
        lines.append("{:d},{:d},{!r},{!r}".format(record.N, record.iterations, record.total_seconds, record.seconds_per_iteration))
    utils.write_lines(os.path.join(out_dir, "scaling.csv"), lines)
    summary = {
        "slope": report.slope,
        "intercept": report.intercept,
        "r2": report.r2,
        "insufficient_points": report.insufficient_points,
        "sizes": [record.N for record in report.records],
        "working_set_bytes": [record.working_set_bytes for record in report.records],
        "iteration_spread": [record.spread for record in report.records],
    }
    with open(os.path.join(out_dir, "scaling.json"), "w") as stream:
        json.dump(summary, stream, indent=2, sort_keys=True)
        stream.write("\n")
