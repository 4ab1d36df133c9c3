"""Reference 4x4 two-pair instance with a known rank-2 optimizer.

The data below is a fixed regression anchor: a pair of non-symmetric 4x4
targets with their transforms, two starting points (one 4x2, one 4x3), and
the optimizer X_HAT known to four decimal places.  Both starting points
lead to the same X_HAT (the rank-3 run finds the rank-2 solution), which
pins down the solver end to end: coefficients, steps, directions, and the
assembled X.
"""

import numpy as np

from psdfit import ProblemInstance

A1 = np.array(
    [
        [0.6938, 0.1093, 0.0503, 0.8637],
        [0.9452, 0.3899, 0.2287, 0.0781],
        [0.7842, 0.5909, 0.8342, 0.6690],
        [0.7056, 0.4594, 0.0156, 0.5002],
    ]
)
A2 = np.array(
    [
        [0.2180, 0.5996, 0.0196, 0.5201],
        [0.5716, 0.0560, 0.4352, 0.8639],
        [0.1222, 0.0563, 0.8322, 0.0977],
        [0.6712, 0.1523, 0.6174, 0.9081],
    ]
)
B1 = np.array(
    [
        [0.1080, 0.0046, 0.9870, 0.5078],
        [0.5170, 0.7667, 0.5051, 0.5856],
        [0.1432, 0.8487, 0.2714, 0.7629],
        [0.5594, 0.9168, 0.1008, 0.0830],
    ]
)
B2 = np.array(
    [
        [0.6616, 0.5905, 0.4519, 0.6801],
        [0.5170, 0.4406, 0.8397, 0.3672],
        [0.1710, 0.9419, 0.5326, 0.2393],
        [0.9386, 0.6559, 0.5539, 0.5789],
    ]
)

# start for the rank-2 run
Y0_RANK2 = np.array(
    [
        [0.8669, 0.3002],
        [0.4068, 0.4014],
        [0.1126, 0.8334],
        [0.4438, 0.4036],
    ]
)

# start for the rank-3 run (converges to the same rank-2 optimizer)
Y0_RANK3 = np.array(
    [
        [0.5211, 0.6791, 0.0377],
        [0.2316, 0.3955, 0.8852],
        [0.4889, 0.3674, 0.9133],
        [0.6241, 0.9880, 0.7962],
    ]
)

# the optimizer, entries accurate to ~2e-4
X_HAT = np.array(
    [
        [1.5731, -0.9596, -0.1357, -0.1008],
        [-0.9596, 0.7651, 0.3156, 0.1344],
        [-0.1357, 0.3156, 0.3133, 0.1032],
        [-0.1008, 0.1344, 0.1032, 0.0360],
    ]
)


def instance(k: int) -> ProblemInstance:
    return ProblemInstance(pairs=((A1, B1), (A2, B2)), n=4, k=k)
