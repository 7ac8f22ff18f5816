""" cli.py -- command line front end

    Subcommands:
        fasc cluster   run FASC and write the output bundle
        fasc evaluate  metrics report for an assignments file
        fasc baseline  spherical K-means or ART2A with the same bundle
        fasc sweep     runtime scaling sweep on synthetic data

    Output bundle (cluster, baseline):
        assignments.csv  id,cluster_id (-1 for outliers)
        centroids.csv    cluster_id,support,f0,...,f{D-1}
        trace.jsonl      one monitor record per iteration
        summary.json     K_active, outliers, termination, iterations, objective
        state.fasc       checkpoint of the selected state
        manifest.json    resolved configuration and input digests
        labels.csv       id,label (when labels are known)

    No time stamps or timings enter the bundle, so a rerun with the same
    manifest reproduces it byte for byte.

    Exit codes: 0 success, 2 configuration error, 3 I/O error,
    4 invariant violation.

    Language: Python 3

    + 10/18/26: Created from the submission script argument layout.
    + 10/18/26: Add --stream for cluster and sweep.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import (
    baselines,
    benchmark,
    control,
    exception,
    kernels,
    metrics,
    parameters,
    phase3,
    spectra,
    state as fasc_state,
    utils,
)

# configuration fields to command-line flags, for error messages
flag_names = {
    "tau_intra": "--tau-intra",
    "tau_inter": "--tau-inter",
    "z_min": "--z-min",
    "k_max": "--k-max",
    "rule": "--rule",
    "lam": "--lambda",
    "phi": "--phi",
    "seed_budget": "--seed-budget",
    "batch_size": "--batch-size",
    "max_iterations": "--max-iters",
    "tolerance": "--tol",
    "kernel": "--kernel",
    "split_index": "--split-index",
    "D": "--dim",
    "workers": "--workers",
    "labels": "--labels",
    "k": "--k",
    "vigilance": "--vigilance",
    "eta": "--eta",
    "epochs": "--epochs",
    "order": "--order-seed",
    "sizes": "--sizes",
    "reps": "--reps",
    "n": "--sizes",
    "d": "--dim",
    "k_true": "--k-true",
    "noise": "--noise",
    "blending_threshold": "--blending-threshold",
    "stream": "--stream",
}

################################################################
# argument parsing
################################################################

def add_input_arguments(parser):
    group = parser.add_argument_group("input")
    group.add_argument("--input", required=True, help="Input data file")
    group.add_argument("--format", choices=["dense", "sparse", "idx"], default="dense", help="Input format")
    group.add_argument("--labels", help="Labels file (id,label CSV or IDX labels)")
    group.add_argument("--dim", type=int, help="Dimensionality for sparse input without sidecar header")
    group.add_argument("--split-index", type=int, help="Polarity split index (overrides sidecar header)")

def add_stream_argument(parser, help_text):
    parser.add_argument("--stream", action="store_true", help=help_text)

def add_config_arguments(parser):
    defaults = parameters.FascConfig()
    group = parser.add_argument_group("algorithm options")
    group.add_argument("--kernel", choices=kernels.kernel_names, default="cosine", help="Similarity kernel")
    group.add_argument("--tau-intra", type=float, default=defaults.tau_intra, help="Assignment acceptance threshold")
    group.add_argument("--tau-inter", type=float, default=defaults.tau_inter, help="Merge threshold")
    group.add_argument("--k-max", type=int, default=defaults.k_max, help="Cluster capacity")
    group.add_argument("--z-min", type=int, default=defaults.z_min, help="Minimum support Z")
    group.add_argument("--rule", choices=["sf", "dass"], default=defaults.rule, help="Assignment rule")
    group.add_argument("--lambda", dest="lam", type=float, default=defaults.lam, help="Density weight for DASS")
    group.add_argument("--phi", choices=sorted(parameters.phi_functions), default=defaults.phi, help="Density function for DASS")
    group.add_argument("--seed-budget", type=int, default=None, help="Seed clusters S_0 (default min(K_max, 8, N))")
    group.add_argument("--batch-size", type=int, default=defaults.batch_size, help="Samples per Phase-1 batch")
    group.add_argument("--max-iters", type=int, default=defaults.max_iterations, help="Iteration cap")
    group.add_argument("--tol", type=float, default=defaults.tolerance, help="Monitor tolerance")
    group.add_argument("--no-check-invariants", action="store_true", help="Skip runtime invariant checks")

def add_run_arguments(parser):
    group = parser.add_argument_group("execution options")
    group.add_argument("--out-dir", default=".", help="Output directory")
    group.add_argument("--workers", type=int, default=None, help="Phase-1 worker threads (default FASC_WORKERS or available cores)")
    group.add_argument("-q", "--quiet", action="store_true", help="Suppress diagnostic output")

def build_parser():
    """ Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="fasc",
        description="Deterministic streaming-batch clustering with dual-threshold consolidation.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        epilog="Environment: FASC_WORKERS sets the default worker count, FASC_VERBOSE=0 silences diagnostics.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    cluster = subparsers.add_parser("cluster", help="Run FASC", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    add_input_arguments(cluster)
    add_stream_argument(cluster, "Read sparse input in row batches instead of loading it whole")
    add_config_arguments(cluster)
    add_run_arguments(cluster)
    cluster.set_defaults(handler=cmd_cluster)

    evaluate = subparsers.add_parser("evaluate", help="Evaluate assignments against labels", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    evaluate.add_argument("--assignments", required=True, help="assignments.csv (id,cluster_id)")
    evaluate.add_argument("--labels", required=True, help="Labels file (id,label CSV or IDX labels)")
    evaluate.add_argument("--state", help="Checkpoint file for blending analysis")
    evaluate.add_argument("--blending-threshold", type=float, help="Report centroid pairs at or above this similarity")
    evaluate.add_argument("--output", help="Also write the report to this file")
    evaluate.set_defaults(handler=cmd_evaluate)

    baseline = subparsers.add_parser("baseline", help="Run a baseline clusterer", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    add_input_arguments(baseline)
    group = baseline.add_argument_group("baseline options")
    group.add_argument("--algo", choices=["kmeans", "art2a"], required=True, help="Baseline algorithm")
    group.add_argument("--k", type=int, default=10, help="K-means cluster count")
    group.add_argument("--seed", type=int, default=0, help="K-means seeding generator seed")
    group.add_argument("--max-iters", type=int, default=100, help="K-means iteration cap")
    group.add_argument("--vigilance", type=float, default=0.8, help="ART2A vigilance")
    group.add_argument("--eta", type=float, default=0.5, help="ART2A learning rate")
    group.add_argument("--k-max", type=int, default=50, help="ART2A prototype budget")
    group.add_argument("--epochs", type=int, default=1, help="ART2A passes")
    group.add_argument("--order-seed", type=int, default=None, help="ART2A presentation order seed (default file order)")
    add_run_arguments(baseline)
    baseline.set_defaults(handler=cmd_baseline)

    sweep = subparsers.add_parser("sweep", help="Runtime scaling sweep", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    group = sweep.add_argument_group("sweep options")
    group.add_argument("--sizes", default="10000,20000,40000,80000,160000", help="Comma-separated sample counts")
    group.add_argument("--reps", type=int, default=3, help="Repetitions per size")
    group.add_argument("--dim", type=int, default=600, help="Synthetic dimensionality")
    group.add_argument("--k-true", type=int, default=20, help="Synthetic directions")
    group.add_argument("--noise", type=float, default=0.05, help="Synthetic noise amplitude")
    group.add_argument("--seed", type=int, default=0, help="Synthetic generator seed")
    group.add_argument("--dual-polarity", action="store_true", help="Split synthetic channels at dim/2")
    add_stream_argument(group, "Run each size on a triplet file read in row batches")
    add_config_arguments(sweep)
    add_run_arguments(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    return parser

################################################################
# shared helpers
################################################################

def config_from_args(args):
    return parameters.FascConfig(
        tau_intra=args.tau_intra,
        tau_inter=args.tau_inter,
        z_min=args.z_min,
        k_max=args.k_max,
        rule=args.rule,
        lam=args.lam,
        phi=args.phi,
        seed_budget=args.seed_budget,
        batch_size=args.batch_size,
        max_iterations=args.max_iters,
        tolerance=args.tol,
        check_invariants=not args.no_check_invariants,
    )

def load_input(args):
    """ Dataset from --input/--format, with --labels attached."""
    path = utils.expand_path(args.input)
    if getattr(args, "stream", False):
        if args.format != "sparse":
            raise exception.ConfigError("stream", "requires --format sparse, got {}".format(args.format))
        dataset = spectra.TripletStream.open(path, D=args.dim, split_index=args.split_index)
    elif args.format == "dense":
        dataset = spectra.load_dense_csv(path, split_index=args.split_index)
    elif args.format == "sparse":
        dataset = spectra.load_sparse_triplets(path, D=args.dim, split_index=args.split_index)
    else:
        dataset = spectra.load_idx_images(path)
    if args.labels:
        dataset = dataset.with_labels(spectra.load_labels(utils.expand_path(args.labels)))
    return dataset

def kernel_for(name, dataset):
    split_index = dataset.split.split_index if dataset.split is not None else None
    return kernels.get_kernel(name, split_index=split_index)

def input_digests(args):
    paths = [args.input]
    if args.format == "sparse" and os.path.exists(spectra.sidecar_path(args.input)):
        paths.append(spectra.sidecar_path(args.input))
    if args.labels:
        paths.append(args.labels)
    return {path: utils.content_digest(path) for path in paths}

def read_assignments(path):
    """ ids and cluster ids from assignments.csv."""
    ids, clusters = [], []
    with open(path, newline="") as stream:
        for (offset, fields) in enumerate(csv.reader(stream)):
            line = offset + 1
            if not fields or (line == 1 and fields[0] == "id"):
                continue
            if len(fields) != 2:
                raise exception.DataError("row width mismatch", line)
            try:
                ids.append(int(fields[0]))
                clusters.append(int(fields[1]))
            except ValueError:
                raise exception.DataError("malformed row", line)
    return np.array(ids, dtype=np.int64), np.array(clusters, dtype=np.int64)

def _write_json(path, data):
    with open(path, "w") as stream:
        json.dump(data, stream, indent=2, sort_keys=True)
        stream.write("\n")

def write_bundle(out_dir, dataset, state, summary, manifest, config, kernel, trace=None):
    """ Write the output bundle (trace only when given)."""
    utils.mkdir(out_dir, exist_ok=True, parents=True)
    verbose = parameters.run.verbose
    utils.write_lines(
        os.path.join(out_dir, "assignments.csv"),
        ["id,cluster_id"] + ["{:d},{:d}".format(int(i), int(j)) for (i, j) in zip(dataset.ids, state.assignments)],
        verbose=verbose,
    )
    header = ",".join(["cluster_id", "support"] + ["f{:d}".format(j) for j in range(dataset.D)])
    utils.write_lines(
        os.path.join(out_dir, "centroids.csv"),
        [header] + [
            ",".join(["{:d}".format(j), "{:d}".format(int(state.supports[j]))] + [repr(float(v)) for v in state.representatives[j]])
            for j in range(state.K)
        ],
        verbose=verbose,
    )
    if trace is not None:
        trace.write_jsonl(os.path.join(out_dir, "trace.jsonl"))
    _write_json(os.path.join(out_dir, "summary.json"), summary)
    fasc_state.save_checkpoint(os.path.join(out_dir, "state.fasc"), state, dataset.ids, config, kernel)
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    if dataset.labels is not None:
        spectra.write_labels_csv(dataset.ids, dataset.labels, os.path.join(out_dir, "labels.csv"))

def check_summary(summary, N, k_max):
    if summary["K_active"] + summary["outliers"] > N or summary["outliers"] > N:
        raise exception.InvariantViolation("summary-mass", "cluster sizes and outliers exceed N")
    if k_max is not None and summary["K_active"] > k_max:
        raise exception.InvariantViolation("summary-capacity", "K_active {} exceeds k-max {}".format(summary["K_active"], k_max))

################################################################
# commands
################################################################

def cmd_cluster(args):
    """ Run FASC on the input and write the output bundle."""
    dataset = load_input(args)
    kernel = kernel_for(args.kernel, dataset)
    config = config_from_args(args)
    config.validate(kernel)
    utils.mkdir(args.out_dir, exist_ok=True, parents=True)

    result = phase3.run(
        dataset, config, kernel,
        workers=parameters.run.workers,
        trace_path=os.path.join(args.out_dir, "trace.jsonl"),
        verbose=parameters.run.verbose,
    )
    summary = result.summary()
    summary["N"] = dataset.N
    summary["cluster_sizes"] = result.state.supports.tolist()
    if sum(summary["cluster_sizes"]) + summary["outliers"] != dataset.N:
        raise exception.InvariantViolation("summary-mass", "cluster sizes plus outliers != N")
    check_summary(summary, dataset.N, max(config.capacity(t) for t in range(result.iterations + 1)))

    manifest = {
        "command": "cluster",
        "code_version": parameters.code_version,
        "config": config.to_dict(),
        "kernel": kernel.name,
        "split_index": getattr(kernel, "split_index", None),
        "input": args.input,
        "format": args.format,
        "stream": args.stream,
        "labels": args.labels,
        "digests": input_digests(args),
    }
    write_bundle(args.out_dir, dataset, result.state, summary, manifest, config, kernel)
    if parameters.run.verbose:
        print("Peak Phase-1 working set: {:d} bytes".format(result.working_set_bytes))
    return control.ExitCode.kSuccess

def cmd_evaluate(args):
    """ Print a metrics report for an assignments file."""
    ids, assignments = read_assignments(args.assignments)
    label_map = spectra.load_labels(args.labels)
    missing = [int(i) for i in ids if int(i) not in label_map]
    if missing or len(label_map) != len(ids):
        raise exception.ConfigError("labels", "label/assignment mismatch: {} ids without label, {} labels for {} ids".format(len(missing), len(label_map), len(ids)))
    true_labels = np.array([label_map[int(i)] for i in ids], dtype=np.int64)

    state, kernel = None, None
    if args.state:
        state, state_ids, header = fasc_state.load_checkpoint(args.state)
        if not np.array_equal(state_ids, ids):
            raise exception.ConfigError("labels", "checkpoint ids do not match the assignments file")
        kernel = kernels.get_kernel(header["kernel"], split_index=header.get("split_index"))
    if args.blending_threshold is not None and state is None:
        raise exception.ConfigError("blending_threshold", "blending analysis needs --state")

    report = metrics.metrics_report(
        true_labels, assignments, state=state, kernel=kernel, blending_threshold=args.blending_threshold
    )
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.output:
        utils.write_lines(args.output, [text])
    return control.ExitCode.kSuccess

def cmd_baseline(args):
    """ Run a baseline clusterer and write the output bundle."""
    dataset = load_input(args)
    kernel = kernels.CosineKernel()
    if args.algo == "kmeans":
        result = baselines.spherical_kmeans(
            dataset, args.k, seed=args.seed, max_iters=args.max_iters, workers=parameters.run.workers
        )
        summary = {"algo": "kmeans", "iterations": result.iterations, "converged": result.converged, "inertia": result.inertia}
        algo_config = {"k": args.k, "seed": args.seed, "max_iters": args.max_iters}
        k_max = args.k
    else:
        order = None
        if args.order_seed is not None:
            order = np.random.default_rng(args.order_seed).permutation(dataset.N)
        result = baselines.art2a_run(
            dataset, args.vigilance, eta=args.eta, k_max=args.k_max, order=order,
            epochs=args.epochs, verbose=parameters.run.verbose,
        )
        summary = {"algo": "art2a", "skipped": len(result.skipped)}
        algo_config = {"vigilance": args.vigilance, "eta": args.eta, "k_max": args.k_max, "epochs": args.epochs, "order_seed": args.order_seed}
        k_max = args.k_max

    supports = result.supports
    state = fasc_state.ClusterState(
        representatives=np.asarray(result.representatives, dtype=np.float64),
        supports=np.asarray(supports, dtype=np.int64),
        born=np.zeros(len(supports), dtype=np.int64),
        newly_promoted=np.zeros(len(supports), dtype=bool),
        assignments=result.assignments,
    )
    summary.update({
        "K_active": int(np.count_nonzero(state.supports)),
        "outliers": state.outlier_count,
        "N": dataset.N,
        "cluster_sizes": state.supports.tolist(),
    })
    check_summary(summary, dataset.N, k_max)
    manifest = {
        "command": "baseline",
        "code_version": parameters.code_version,
        "config": algo_config,
        "kernel": kernel.name,
        "input": args.input,
        "format": args.format,
        "labels": args.labels,
        "digests": input_digests(args),
    }
    write_bundle(args.out_dir, dataset, state, summary, manifest, algo_config, kernel, trace=phase3.MonitorTrace())
    return control.ExitCode.kSuccess

def cmd_sweep(args):
    """ Scaling sweep on synthetic data; writes scaling.csv and scaling.json."""
    try:
        sizes = [int(size) for size in args.sizes.split(",") if size.strip()]
    except ValueError:
        raise exception.ConfigError("sizes", "not a comma-separated integer list: {!r}".format(args.sizes))
    config = config_from_args(args)
    split_index = args.dim//2 if args.dual_polarity else None
    kernel = kernels.get_kernel(args.kernel, split_index=split_index)
    config.validate(kernel)
    report = benchmark.scaling_sweep(
        sizes, config, kernel, repetitions=args.reps, d=args.dim, k_true=args.k_true,
        noise=args.noise, seed=args.seed, dual_polarity=args.dual_polarity,
        workers=parameters.run.workers, streaming=args.stream,
        verbose=parameters.run.verbose,
    )
    benchmark.write_scaling_report(report, args.out_dir)
    if parameters.run.verbose:
        if report.insufficient_points:
            print("Linear fit: insufficient points")
        else:
            print("Linear fit: slope {:.3e} s/sample, intercept {:.3e} s, R^2 {:.4f}".format(report.slope, report.intercept, report.r2))
    return control.ExitCode.kSuccess

################################################################
# main
################################################################

def main(argv=None):
    """ Parse arguments, dispatch, and map errors to exit codes.

    Returns:
        (int): process exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    verbose = False if args.command == "evaluate" else (False if args.quiet else None)
    try:
        control.init(args.command, workers=getattr(args, "workers", None), verbose=verbose)
        exit_code = args.handler(args)
    except exception.ConfigError as err:
        flag = flag_names.get(err.field, err.field)
        return control.termination(control.ExitCode.kConfigError, "{}: {}".format(flag, err.value))
    except (exception.DataError, OSError) as err:
        return control.termination(control.ExitCode.kIOError, str(err))
    except (exception.InvariantViolation, exception.ContractViolation) as err:
        return control.termination(control.ExitCode.kInvariantViolation, str(err))
    return control.termination(exit_code)

if __name__ == "__main__":
    sys.exit(main())
