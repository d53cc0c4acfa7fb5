from glassbox.store.views import (Manifest, ArtifactRef, ArraySpec, ArtifactError, HashMismatchError, ProvenanceError,
ArtifactKindError, UnsupportedVersionError)
from glassbox.store.codec import encode_array, decode_array, write_array, read_array, encode_csv, decode_csv
from glassbox.store.service import (Artifact, write_artifact, read_artifact, read_manifest, artifact_hash, ref_to,
array_payload)
from glassbox.store.artifacts import (LoadedModel, save_dataset, load_dataset, save_features, load_features,
save_glassbox_model, save_transformer, load_transformer, load_model, save_attributions, load_attributions, save_embeddings,
load_embeddings, load_probe, save_pdp, load_pdp, save_report, load_report)

__all__=[
    'Manifest',
    'ArtifactRef',
    'ArraySpec',
    'ArtifactError',
    'HashMismatchError',
    'ProvenanceError',
    'ArtifactKindError',
    'UnsupportedVersionError',
    'encode_array',
    'decode_array',
    'write_array',
    'read_array',
    'encode_csv',
    'decode_csv',
    'Artifact',
    'write_artifact',
    'read_artifact',
    'read_manifest',
    'artifact_hash',
    'ref_to',
    'array_payload',
    'LoadedModel',
    'save_dataset',
    'load_dataset',
    'save_features',
    'load_features',
    'save_glassbox_model',
    'save_transformer',
    'load_transformer',
    'load_model',
    'save_attributions',
    'load_attributions',
    'save_embeddings',
    'load_embeddings',
    'load_probe',
    'save_pdp',
    'load_pdp',
    'save_report',
    'load_report',
]
