N_STEPS=64
# gradient passes per integrated-gradients chunk
IG_CHUNK=16
OCCLUSION_WINDOW=1
OCCLUSION_BATCH=256

ZERO_BASELINE='zero'
MEAN_BASELINE='mean'

INTEGRATED_GRADIENTS='integrated_gradients'
OCCLUSION='occlusion'

GRID_RESOLUTION=20
GRID_PERCENTILES=(0.05,0.95)

N_COMPONENTS=2
SPCA_TOL=1e-6
SPCA_MAX_ITER=1000

MEAN_POOLING='mean'
TOKEN_POOLING='none'
SPECIES_POOLING='species'
