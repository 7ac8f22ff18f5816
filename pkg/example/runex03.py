""" runex03.py

  MNIST validation run: FASC at tau = 0.90 against spherical K-means
  with K = 10, both scored by majority-vote mapping, ARI and NMI.

  The MNIST test files are read from FASC_MNIST_DIR:

    t10k-images-idx3-ubyte.gz
    t10k-labels-idx1-ubyte.gz

  % FASC_MNIST_DIR=~/data/mnist python3 runex03.py

  Language: Python 3

  10/18/26: Created.

"""

import json
import os

import fasc.baselines
import fasc.control
import fasc.kernels
import fasc.metrics
import fasc.parameters
import fasc.phase3
import fasc.spectra
import fasc.utils

fasc.control.init("runex03")

##################################################################
# main body
##################################################################

data_dir = fasc.utils.expand_path(os.environ.get("FASC_MNIST_DIR", "."))
dataset = fasc.spectra.load_idx_images(
    os.path.join(data_dir, "t10k-images-idx3-ubyte.gz"),
    os.path.join(data_dir, "t10k-labels-idx1-ubyte.gz"),
)
kernel = fasc.kernels.CosineKernel()
workers = fasc.parameters.run.workers

config = fasc.parameters.FascConfig(tau_intra=0.9, tau_inter=0.9, k_max=1000, rule="dass")
result = fasc.phase3.run(dataset, config, kernel, workers=workers, verbose=True)
report = fasc.metrics.metrics_report(
    dataset.labels, result.state.assignments, result.state, kernel, blending_threshold=config.tau_inter
)
print("FASC:", json.dumps(report, indent=2, sort_keys=True))

for seed in range(5):
    kmeans = fasc.baselines.spherical_kmeans(dataset, 10, seed=seed, workers=workers)
    report = fasc.metrics.metrics_report(dataset.labels, kmeans.assignments)
    print("K-means seed {:d}: accuracy {:.4f} ARI {:.4f} NMI {:.4f}".format(
        seed, report["all_accuracy"], report["ari"], report["nmi"]
    ))

################################################################
# termination
################################################################

fasc.control.termination()
