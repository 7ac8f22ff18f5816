""" phase3.py -- objectives, convergence monitors and the run loop

    Each iteration runs assignment and promotion (phase1), then
    consolidation (phase2), then the checks below:

        Converged: 1 - s_centroid < tol, 1 - s_structure < tol, and no
            structural edit or label change in the iteration
        LimitCycle: the state hash repeats one seen p iterations ago; the
            cycle is played once more and its best-objective state returned
        MaxIterations: the best-objective state seen is returned

    The run works on the dataset in canonical order and maps assignments
    back to input order at the end, so any permutation of the input
    yields the same trace and the same partition.

    Language: Python 3

    + 10/18/26: Created.
    + 10/18/26: Add label-change conjunct and per-edit trace counts.
    + 10/18/26: Add descent_pass for objective monotonicity checks.
"""

import dataclasses
import enum
import json
import math
import sys

import numpy as np

from . import (
    exception,
    phase1,
    phase2,
    spectra,
    state as fasc_state,
    utils,
)

################################################################
# trace types
################################################################

@dataclasses.dataclass
class MonitorRecord:
    """ Per-iteration monitor values.

    Fields:
        t (int): iteration
        k_active (int): clusters after Phase 2
        outlier_count (int): samples with ID -1
        s_centroid (float): similarity of sorted supports to previous iteration
        s_structure (float): similarity of aligned representatives
        objective (float): objective value of the state
        state_hash (str): state digest
        structural_edits (int): promotions + merges + dissolutions + emptied clusters
        label_changes (int): samples whose ID changed in Phase 1
        promotions, merges, dissolutions, emptied, merge_volume (int): edit breakdown
    """
    t: int
    k_active: int
    outlier_count: int
    s_centroid: float
    s_structure: float
    objective: float
    state_hash: str
    structural_edits: int
    label_changes: int
    promotions: int
    merges: int
    dissolutions: int
    emptied: int
    merge_volume: int

    def to_json(self):
        return json.dumps(dataclasses.asdict(self))


class MonitorTrace(object):
    """ Ordered list of MonitorRecord, optionally streamed to a file."""

    def __init__(self, stream=None):
        self.records = []
        self._stream = stream

    def append(self, record):
        if self.records and record.t <= self.records[-1].t:
            raise exception.InvariantViolation("trace-order", "record t={} after t={}".format(record.t, self.records[-1].t))
        self.records.append(record)
        if self._stream is not None:
            self._stream.write(record.to_json())
            self._stream.write("\n")
            self._stream.flush()

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def write_jsonl(self, path):
        utils.write_lines(path, (record.to_json() for record in self.records))

    @classmethod
    def from_jsonl(cls, path):
        trace = cls()
        with open(path) as stream:
            for line in stream:
                if line.strip():
                    trace.append(MonitorRecord(**json.loads(line)))
        return trace


class Termination(enum.Enum):
    kConverged = "converged"
    kLimitCycle = "limit-cycle"
    kMaxIterations = "max-iterations"


@dataclasses.dataclass
class RunResult:
    """ Outcome of a clustering run.

    Fields:
        state (fasc_state.ClusterState): selected state, assignments in input order
        ids (np.ndarray): input sample ids
        trace (MonitorTrace): one record per iteration
        termination (Termination): how the run ended
        period (int): cycle period for kLimitCycle, else None
        iterations (int): iterations executed
        selected_iteration (int): iteration that produced state
        objective (float): objective of state
        objective_name (str): "psi", "lyapunov" or "similarity"
        canonical_state (fasc_state.ClusterState): state in canonical sample order
        order (np.ndarray): canonical row positions of the input
        timings (list of float): seconds per iteration
        working_set_bytes (int): peak Phase-1 working set
    """
    state: fasc_state.ClusterState
    ids: np.ndarray
    trace: MonitorTrace
    termination: Termination
    period: int
    iterations: int
    selected_iteration: int
    objective: float
    objective_name: str
    canonical_state: fasc_state.ClusterState
    order: np.ndarray
    timings: list
    working_set_bytes: int

    def summary(self):
        return {
            "K_active": self.state.K,
            "outliers": self.state.outlier_count,
            "termination": self.termination.value,
            "period": self.period,
            "iterations": self.iterations,
            "selected_iteration": self.selected_iteration,
            "objective": self.objective,
            "objective_name": self.objective_name,
        }

################################################################
# objectives
################################################################

def _scan_clusters(dataset, assignments):
    """ (start, rows of cluster j within the block, block, j) over a data scan."""
    for (start, matrix) in dataset.batches(spectra.SCAN_ROWS):
        labels = assignments[start:start + matrix.shape[0]]
        for j in np.unique(labels[labels >= 0]).tolist():
            yield start, np.flatnonzero(labels == j), matrix, j

def member_scores(dataset, state, kernel):
    """ sigma(x_i, c_ID_i) per sample; NaN for outliers."""
    scores = np.full(dataset.N, np.nan)
    if not dataset.resident:
        for (start, rows, matrix, j) in _scan_clusters(dataset, state.assignments):
            scores[start + rows] = kernel.affinities(matrix[rows], state.representatives[j:j+1])[:, 0]
        return scores
    for (j, members) in enumerate(state.member_lists()):
        if len(members):
            scores[members] = kernel.affinities(dataset.matrix[members], state.representatives[j:j+1])[:, 0]
    return scores

def potential_psi(dataset, state, kernel):
    """ Psi = sum of member similarities + sum_j C(n_j, 2).

    Arguments:
        dataset (spectra.Dataset): samples
        state (fasc_state.ClusterState): supports consistent with assignments
        kernel (kernels.SimilarityKernel): similarity

    Returns:
        (float): potential
    """
    if state.K == 0:
        return 0.0
    scores = member_scores(dataset, state, kernel)
    pairs = int(np.sum(state.supports*(state.supports - 1)//2))
    return float(np.sum(scores[~np.isnan(scores)])) + pairs

def lyapunov(dataset, state, kernel):
    """ Sum of Bregman divergences of members from their representatives.

    Raises:
        (fasc.exception.ConfigError): kernel has no Bregman form
    """
    if not kernel.bregman:
        raise exception.ConfigError("kernel", "SF objective requires a Bregman kernel")
    total = 0.0
    if not dataset.resident:
        for (_, rows, matrix, j) in _scan_clusters(dataset, state.assignments):
            total += kernel.divergence_sum(matrix[rows], state.representatives[j])
        return total
    for (j, members) in enumerate(state.member_lists()):
        if len(members):
            total += kernel.divergence_sum(dataset.matrix[members], state.representatives[j])
    return total

def objective_for(config, kernel):
    """ Objective name and sense ("max" or "min") for the configuration."""
    if config.rule == "dass":
        return "psi", "max"
    if kernel.bregman:
        return "lyapunov", "min"
    return "similarity", "max"

def evaluate_objective(dataset, state, config, kernel):
    name, _ = objective_for(config, kernel)
    if name == "psi":
        return potential_psi(dataset, state, kernel)
    elif name == "lyapunov":
        return lyapunov(dataset, state, kernel)
    scores = member_scores(dataset, state, kernel)
    return float(np.sum(scores[~np.isnan(scores)]))

def _better(value, incumbent, sense):
    if incumbent is None:
        return True
    return value > incumbent if sense == "max" else value < incumbent

################################################################
# monitors
################################################################

def _vector_cosine(a, b):
    squared = float(np.dot(a, a))*float(np.dot(b, b))
    if squared == 0:
        return 0.0
    if np.array_equal(a, b):
        return 1.0
    return float(np.clip(np.dot(a, b)/math.sqrt(squared), -1.0, 1.0))

def monitor_similarities(prev_state, state, kernel=None):
    """ Size and structure similarities between consecutive states.

    Clusters of each state are aligned by descending support (content
    and index break ties); the shorter state is padded with zeros.

    Returns:
        (tuple of float): (s_centroid, s_structure), both 0 if either state is empty
    """
    if prev_state.K == 0 or state.K == 0:
        return 0.0, 0.0
    K = max(prev_state.K, state.K)
    D = state.D

    def aligned(s):
        order = fasc_state.cluster_order(s)
        supports = np.zeros(K)
        supports[:s.K] = s.supports[order]
        representatives = np.zeros((K, D))
        representatives[:s.K] = s.representatives[order]
        return supports, representatives.ravel()

    prev_supports, prev_representatives = aligned(prev_state)
    supports, representatives = aligned(state)
    return (
        _vector_cosine(prev_supports, supports),
        _vector_cosine(prev_representatives, representatives),
    )

################################################################
# iteration
################################################################

@dataclasses.dataclass
class IterationReport:
    assignment: phase1.AssignmentResult
    promotions: int
    consolidation: phase2.ConsolidationReport

    @property
    def structural_edits(self):
        return self.promotions + self.consolidation.edits


def iterate(dataset, state, config, kernel, workers=1, admissible=None):
    """ One full iteration (Phase 1 and Phase 2) from state.

    Arguments:
        dataset (spectra.Dataset): samples in canonical order
        state (fasc_state.ClusterState): state at iteration t (not modified)
        config (parameters.FascConfig): configuration
        kernel (kernels.SimilarityKernel): similarity
        workers (int, optional): Phase-1 worker threads
        admissible (np.ndarray of bool, optional): promotion mask

    Returns:
        (tuple): (state at t+1, IterationReport)
    """
    assignment = phase1.assign_all(dataset, state, config, kernel, workers=workers)
    new_state = state.copy()
    new_state.assignments = assignment.assignments
    promoted = phase1.promote_outliers(dataset, new_state, config, kernel, assignment.best_scores, admissible)
    consolidation = phase2.consolidate(dataset, new_state, config, kernel)
    new_state.iteration = state.iteration + 1
    return new_state, IterationReport(assignment=assignment, promotions=len(promoted), consolidation=consolidation)


def descent_pass(dataset, state, config, kernel, workers=1):
    """ Assignment then representative update with structure frozen.

    No promotion, merge, dissolution or renumbering takes place.

    Returns:
        (fasc_state.ClusterState): updated copy of state
    """
    assignment = phase1.assign_all(dataset, state, config, kernel, workers=workers)
    new_state = state.copy()
    new_state.assignments = assignment.assignments
    phase2.recompute_representatives(dataset, new_state, kernel)
    new_state.iteration = state.iteration + 1
    return new_state

################################################################
# invariant checks
################################################################

def check_mass(state):
    if int(state.supports.sum()) + state.outlier_count != state.N:
        raise exception.InvariantViolation(
            "mass-conservation", "supports {} + outliers {} != N {}".format(int(state.supports.sum()), state.outlier_count, state.N)
        )

def check_fixed_point(dataset, state, config, kernel):
    """ Compactness and separation of a converged state."""
    scores = member_scores(dataset, state, kernel)
    assigned = ~np.isnan(scores)
    if np.any(scores[assigned] < config.tau_intra):
        raise exception.InvariantViolation("fixed-point-compactness", "assigned sample below tau_intra")
    if state.K > 1:
        pairwise = kernel.pairwise(state.representatives)
        off_diagonal = pairwise[~np.eye(state.K, dtype=bool)]
        if np.any(off_diagonal >= config.tau_inter):
            raise exception.InvariantViolation("separation", "centroid pair at or above tau_inter")

def check_psi_bound(psi, N):
    bound = N*1.0 + N*(N-1)//2
    if psi > bound*(1 + 1e-12):
        raise exception.InvariantViolation("psi-bound", "Psi {} exceeds {}".format(psi, bound))

################################################################
# run loop
################################################################

def _record(t, prev_state, state, report, objective, kernel):
    s_centroid, s_structure = monitor_similarities(prev_state, state, kernel)
    consolidation = report.consolidation
    return MonitorRecord(
        t=t,
        k_active=state.K,
        outlier_count=state.outlier_count,
        s_centroid=s_centroid,
        s_structure=s_structure,
        objective=objective,
        state_hash=fasc_state.state_hash(state, kernel),
        structural_edits=report.structural_edits,
        label_changes=report.assignment.label_changes,
        promotions=report.promotions,
        merges=consolidation.merged,
        dissolutions=consolidation.dissolved,
        emptied=consolidation.emptied,
        merge_volume=consolidation.merge_volume,
    )

def run(dataset, config, kernel, workers=1, trace_path=None, verbose=False):
    """ Cluster dataset until convergence, limit cycle or iteration cap.

    Arguments:
        dataset (spectra.Dataset or spectra.TripletStream): input samples, any order
        config (parameters.FascConfig): configuration
        kernel (kernels.SimilarityKernel): similarity
        workers (int, optional): Phase-1 worker threads
        trace_path (str, optional): stream the trace as JSON lines
        verbose (bool, optional): print one line per iteration

    Returns:
        (RunResult): selected state and trace
    """
    config.validate(kernel)
    if not (dataset.resident or kernel.streams):
        raise exception.ConfigError("kernel", "{} needs resident data".format(kernel.name))
    order = spectra.canonical_positions(dataset)
    data = dataset.take(order)
    admissible = spectra.admissible_mask(data, kernel)
    objective_name, sense = objective_for(config, kernel)

    state = fasc_state.initialize(data, config, kernel, order=np.arange(data.N), admissible=admissible)
    history = {fasc_state.state_hash(state, kernel): 0}
    timer = utils.TaskTimer()
    working_set = 0
    best = None
    termination, period = Termination.kMaxIterations, None

    stream = open(trace_path, "w") if trace_path is not None else None
    try:
        trace = MonitorTrace(stream)

        def step(current):
            nonlocal working_set
            timer.start_timer()
            new_state, report = iterate(data, current, config, kernel, workers=workers, admissible=admissible)
            objective = evaluate_objective(data, new_state, config, kernel)
            timer.stop_timer()
            working_set = max(working_set, report.assignment.working_set_bytes)
            if config.check_invariants:
                check_mass(new_state)
                if objective_name == "psi" and kernel.is_bounded:
                    check_psi_bound(objective, data.N)
            record = _record(new_state.iteration, current, new_state, report, objective, kernel)
            trace.append(record)
            if verbose:
                print(
                    "Iteration {:4d}: K {:5d} outliers {:7d} s_c {:.6f} s_s {:.6f} edits {:5d} changes {:7d} ({:.3f} s)".format(
                        record.t, record.k_active, record.outlier_count, record.s_centroid,
                        record.s_structure, record.structural_edits, record.label_changes, timer.last_time
                    )
                )
                if report.consolidation.degenerate:
                    print("Degenerate representatives: {}".format(report.consolidation.degenerate))
                sys.stdout.flush()
            return new_state, record

        for _ in range(config.max_iterations):
            new_state, record = step(state)
            if _better(record.objective, best and best[0], sense):
                best = (record.objective, record.t, new_state)

            converged = (
                1 - record.s_centroid < config.tolerance
                and 1 - record.s_structure < config.tolerance
                and record.structural_edits == 0
                and record.label_changes == 0
            )
            if converged:
                if config.check_invariants:
                    check_fixed_point(data, new_state, config, kernel)
                termination = Termination.kConverged
                best = (record.objective, record.t, new_state)
                break

            if record.state_hash in history:
                termination = Termination.kLimitCycle
                period = record.t - history[record.state_hash]
                cycle = [(record.objective, record.t, new_state)]
                current = new_state
                for _ in range(period - 1):
                    current, cycle_record = step(current)
                    cycle.append((cycle_record.objective, cycle_record.t, current))
                best = None
                for candidate in cycle:
                    if _better(candidate[0], best and best[0], sense):
                        best = candidate
                break

            history[record.state_hash] = record.t
            state = new_state
    finally:
        if stream is not None:
            stream.close()

    objective, selected_iteration, canonical_state = best
    output_state = canonical_state.copy()
    output_state.assignments = np.empty_like(canonical_state.assignments)
    output_state.assignments[order] = canonical_state.assignments

    if verbose:
        print("Termination: {} after {:d} iterations (selected t={:d}, {} {})".format(
            termination.value, len(trace), selected_iteration, objective_name, objective
        ))
        print("Mean iteration time: {:.3f} s".format(timer.average_time))
        sys.stdout.flush()

    return RunResult(
        state=output_state,
        ids=dataset.ids.copy(),
        trace=trace,
        termination=termination,
        period=period,
        iterations=len(trace),
        selected_iteration=selected_iteration,
        objective=objective,
        objective_name=objective_name,
        canonical_state=canonical_state,
        order=order,
        timings=list(timer.timings),
        working_set_bytes=working_set,
    )
