N_SUBJECTS=500
N_TIMEPOINTS=50
N_SPECIES=144
N_COMMUNITIES=25

LAMBDA_U=0.3
LAMBDA_BLOOM=2.0
LAMBDA_THETA=0.5

TUKEY_BANDWIDTH=0.9
TUKEY_WINDOW=9

N_CLUSTERS=24
N_DISEASE_CLUSTERS=12
CONCEPT_THRESHOLD=0.1
NOISE_HIGH=0.01

# noise, increase, decrease, bloom
KIND_PROBS=(0.7,0.1,0.1,0.1)

TRAIN_FRACTION=0.75

KMEANS_MAX_ITER=100

SEED=0
