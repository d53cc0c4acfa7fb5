from glassbox.transformer.service import (TrainedTransformer, self_attention, build_model, forward_classifier, forward_cbm,
intervene_concepts, train)
from glassbox.transformer.layers import Module, Encoder, TransformerClassifier, ConceptBottleneck, MultiHeadAttention
from glassbox.transformer.views import TransformerConfig, EpochLog, TrainingError

__all__=[
    'TransformerConfig',
    'EpochLog',
    'TrainingError',
    'TrainedTransformer',
    'Module',
    'Encoder',
    'MultiHeadAttention',
    'TransformerClassifier',
    'ConceptBottleneck',
    'self_attention',
    'build_model',
    'forward_classifier',
    'forward_cbm',
    'intervene_concepts',
    'train'
]
