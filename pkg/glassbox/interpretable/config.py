COORDINATE_TOLERANCE=1e-7
MAX_SWEEPS=10_000
# unpenalized fits whose margins pass this are diverging on separable data
SATURATION_MARGIN=30.0

N_FOLDS=4
N_LAMBDA=100
LAMBDA_MIN_RATIO=1e-3

HOLDOUT_FRACTION=0.25
MIN_LEAF=5
MIN_TREE_SAMPLES=10

MISCLASSIFICATION='misclassification'
GINI='gini'
