from glassbox.explain.views import Attribution, PdpProfile, SparsePCAResult, EmbeddingSet, ProbeStep
from glassbox.explain.attribution import TrajectoryModel, integrated_gradients, occlusion, explain_samples, resolve_baseline
from glassbox.explain.embeddings import (extract_embeddings, species_contribution, sparse_pca, project,
interpolation_probe)
from glassbox.explain.adapters import GlassboxTrajectoryModel
from glassbox.explain.pdp import pdp, grid_from_values

__all__=[
    'Attribution',
    'PdpProfile',
    'SparsePCAResult',
    'EmbeddingSet',
    'ProbeStep',
    'TrajectoryModel',
    'integrated_gradients',
    'occlusion',
    'explain_samples',
    'resolve_baseline',
    'extract_embeddings',
    'species_contribution',
    'sparse_pca',
    'project',
    'interpolation_probe',
    'GlassboxTrajectoryModel',
    'pdp',
    'grid_from_values',
]
