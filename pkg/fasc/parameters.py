""" parameters.py -- algorithm configuration and runtime environment

  Language: Python 3

  + 10/18/26: Created from the run parameters module.
    - FascConfig bundles the clustering hyperparameters.
    - RunParameters reads execution settings from the environment.
  + 10/18/26: Add capacity schedule and JSON conversion.

"""

import dataclasses
import math
import os

from . import exception

code_version = "1.0.0"

################################################################
# density functions for DASS
################################################################

phi_functions = {
    "linear": (lambda n: float(n)),
    "log": (lambda n: math.log1p(n)),
    "const": (lambda n: 1.0),
}

################################################################
# algorithm configuration
################################################################

@dataclasses.dataclass
class FascConfig:
    """ Hyperparameters of a clustering run.

    Fields:
        tau_intra (float): assignment acceptance threshold
        tau_inter (float): merge threshold for representative pairs
        z_min (int): minimum support Z below which clusters dissolve
        k_max (int): capacity K_max, used when no schedule is given
        k_schedule (tuple of int, optional): per-iteration capacities K_t,
            with the last entry repeated for later iterations
        rule (str): assignment rule, "sf" or "dass"
        lam (float): weight lambda of the density term
        phi (str): name of the density function (see phi_functions)
        seed_budget (int, optional): S_0, defaults to min(K_0, 8)
        batch_size (int): samples per Phase-1 batch
        max_iterations (int): iteration cap
        tolerance (float): monitor tolerance
        rng_seed (int): seed for baselines and synthetic data only
        check_invariants (bool): verify invariants after each Phase 2
    """

    tau_intra: float = 0.8
    tau_inter: float = 0.8
    z_min: int = 1
    k_max: int = 50
    k_schedule: tuple = None
    rule: str = "dass"
    lam: float = 1.0
    phi: str = "linear"
    seed_budget: int = None
    batch_size: int = 4096
    max_iterations: int = 100
    tolerance: float = 1e-3
    rng_seed: int = 0
    check_invariants: bool = True

    def capacity(self, t):
        """ Capacity K_t for iteration t."""
        if not self.k_schedule:
            return self.k_max
        return self.k_schedule[min(t, len(self.k_schedule)-1)]

    def resolved_seed_budget(self, N=None):
        """ Seed budget S_0, defaulting to min(K_0, 8), and to at most N when given."""
        if self.seed_budget is None:
            if N is None:
                return min(self.capacity(0), 8)
            return min(self.capacity(0), 8, N)
        return self.seed_budget

    def phi_function(self):
        return phi_functions[self.phi]

    def validate(self, kernel=None):
        """ Check hyperparameter ranges.

        Threshold ranges are only enforced for bounded kernels, since
        unbounded kernels score on their own scale.

        Arguments:
            kernel (SimilarityKernel, optional): kernel the run will use

        Raises:
            (fasc.exception.ConfigError): naming the offending field
        """
        bounded = (kernel is None) or kernel.is_bounded
        for field in ("tau_intra", "tau_inter"):
            value = getattr(self, field)
            if not math.isfinite(value):
                raise exception.ConfigError(field, "must be finite, got {}".format(value))
            if bounded and not (0 < value <= 1):
                raise exception.ConfigError(
                    field, "must lie in (0, 1] for a bounded kernel, got {}".format(value)
                )
        if self.z_min < 1:
            raise exception.ConfigError("z_min", "must be >= 1, got {}".format(self.z_min))
        if self.k_max < 0:
            raise exception.ConfigError("k_max", "must be >= 0, got {}".format(self.k_max))
        if self.k_schedule is not None and any(k < 0 for k in self.k_schedule):
            raise exception.ConfigError("k_schedule", "capacities must be >= 0")
        if self.rule not in ("sf", "dass"):
            raise exception.ConfigError("rule", "must be 'sf' or 'dass', got {!r}".format(self.rule))
        if not (self.lam > 0):
            raise exception.ConfigError("lam", "must be > 0, got {}".format(self.lam))
        if self.phi not in phi_functions:
            raise exception.ConfigError(
                "phi", "must be one of {}, got {!r}".format(sorted(phi_functions), self.phi)
            )
        seed_budget = self.resolved_seed_budget()
        if seed_budget < 0 or seed_budget > self.capacity(0):
            raise exception.ConfigError(
                "seed_budget", "must lie in [0, K_0={}], got {}".format(self.capacity(0), seed_budget)
            )
        if self.batch_size < 1:
            raise exception.ConfigError("batch_size", "must be >= 1, got {}".format(self.batch_size))
        if self.max_iterations < 1:
            raise exception.ConfigError("max_iterations", "must be >= 1, got {}".format(self.max_iterations))
        if not (self.tolerance > 0):
            raise exception.ConfigError("tolerance", "must be > 0, got {}".format(self.tolerance))

    def to_dict(self):
        data = dataclasses.asdict(self)
        if self.k_schedule is not None:
            data["k_schedule"] = list(self.k_schedule)
        return data

    @classmethod
    def from_dict(cls, data):
        known = {field.name for field in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise exception.ConfigError(sorted(unknown)[0], "unknown configuration field")
        data = dict(data)
        if data.get("k_schedule") is not None:
            data["k_schedule"] = tuple(data["k_schedule"])
        return cls(**data)

################################################################
# run parameters object
################################################################

class RunParameters(object):
    """ Object to bundle execution parameters into common name space.

    These settings never change results, only how a run is carried out.

        workers: number of Phase-1 worker threads, from FASC_WORKERS
        (defaults to the available cores)

        verbose: whether to print diagnostic output, from FASC_VERBOSE

    Example usage:
        run = fasc.parameters.RunParameters()
        run.populate()
        print(run.run_data_string())

    """
    def __init__(self):
        """ Create default run parameters."""
        self.workers = 1
        self.verbose = True

    def populate(self, workers=None, verbose=None):
        """ Fill in parameters from the environment, then explicit overrides.

        Arguments:
            workers (int, optional): overrides FASC_WORKERS
            verbose (bool, optional): overrides FASC_VERBOSE
        """
        env_workers = os.environ.get("FASC_WORKERS")
        if workers is not None:
            self.workers = workers
        elif env_workers:
            try:
                self.workers = int(env_workers)
            except ValueError:
                raise exception.ConfigError("workers", "FASC_WORKERS is not an integer: {!r}".format(env_workers))
        else:
            self.workers = os.cpu_count() or 1
        if self.workers < 1:
            raise exception.ConfigError("workers", "must be >= 1, got {}".format(self.workers))

        if verbose is not None:
            self.verbose = verbose
        else:
            self.verbose = os.environ.get("FASC_VERBOSE", "1") not in ("0", "false", "False", "")

    def run_data_string(self):
        """ Generate multiline string documenting run variables for
        diagnostic output.

        Returns:
            (str): diagnostic string
        """

        message = "\n".join(
            [
                "Code version: {}".format(code_version),
                "Workers: {:d}".format(self.workers),
                "Verbose: {}".format(self.verbose),
            ]
            )

        return message

# instantiate with defaults; the command line populates it
run = RunParameters()
