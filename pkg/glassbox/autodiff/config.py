import numpy as np

DEFAULT_DTYPE=np.float32
ACCUMULATE_DTYPE=np.float64

LAYER_NORM_EPS=1e-5

ADAM_LR=3e-4
ADAM_BETAS=(0.9,0.999)
ADAM_EPS=1e-8

GRADCHECK_STEP=1e-3
GRADCHECK_RTOL=1e-3
GRADCHECK_ATOL=1e-6
