""" runex01.py

  Two well-separated bundles clustered with DASS, with the monitor
  trace printed per iteration.

  % python3 runex01.py

  Language: Python 3

  10/18/26: Created.

"""

import numpy as np

import fasc.control
import fasc.kernels
import fasc.metrics
import fasc.parameters
import fasc.phase3
import fasc.spectra

fasc.control.init("runex01", workers=2)

##################################################################
# main body
##################################################################

# two bundles on disjoint dimensions, ten noisy copies each
rng = np.random.default_rng(0)
rows, labels = [], []
for (label, dims) in enumerate([(0, 1, 2), (3, 4, 5)]):
    for _ in range(10):
        row = np.zeros(6)
        row[list(dims)] = 1.0 + rng.uniform(0.0, 0.05, size=3)
        rows.append(row)
        labels.append(label)
dataset = fasc.spectra.Dataset.from_array(np.array(rows), labels=np.array(labels))

config = fasc.parameters.FascConfig(tau_intra=0.7, tau_inter=0.7, k_max=10, rule="dass")
kernel = fasc.kernels.CosineKernel()
result = fasc.phase3.run(dataset, config, kernel, workers=fasc.parameters.run.workers, verbose=True)

print()
print("Summary:", result.summary())
print("ARI:", fasc.metrics.adjusted_rand_index(dataset.labels, result.state.assignments))
print("Cluster sizes:", result.state.supports.tolist())

################################################################
# termination
################################################################

fasc.control.termination()
