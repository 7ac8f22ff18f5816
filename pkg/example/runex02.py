""" runex02.py

  Centroid blending: ART2A presented with samples at 0, 36, 56 and 40
  degrees ends with two prototypes 30 degrees apart, which score above
  the vigilance against each other.  FASC on the same samples returns
  centroids separated below tau_inter.

  % python3 runex02.py

  Language: Python 3

  10/18/26: Created.

"""

import math

import numpy as np

import fasc.baselines
import fasc.control
import fasc.kernels
import fasc.metrics
import fasc.parameters
import fasc.phase3
import fasc.spectra

fasc.control.init("runex02", workers=1)

##################################################################
# main body
##################################################################

threshold = 0.8
angles = [0.0, 36.0, 56.0, 40.0]
dataset = fasc.spectra.Dataset.from_array(
    np.array([[math.cos(math.radians(a)), math.sin(math.radians(a))] for a in angles])
)
kernel = fasc.kernels.CosineKernel()

art2a = fasc.baselines.art2a_run(dataset, threshold, eta=0.5)
print("ART2A prototypes (degrees):", [round(math.degrees(math.atan2(y, x)), 6) for (x, y) in art2a.representatives])
print("ART2A pairs >= {}:".format(threshold), fasc.metrics.blending_pairs(art2a, kernel, threshold).pairs)

config = fasc.parameters.FascConfig(tau_intra=threshold, tau_inter=threshold, k_max=10, seed_budget=1)
result = fasc.phase3.run(dataset, config, kernel)
print("FASC centroids (degrees):", [round(math.degrees(math.atan2(y, x)), 6) for (x, y) in result.state.representatives])
print("FASC pairs >= {}:".format(threshold), fasc.metrics.blending_pairs(result.state, kernel, threshold).pairs)

################################################################
# termination
################################################################

fasc.control.termination()
