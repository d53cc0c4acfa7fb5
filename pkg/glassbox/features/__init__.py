from glassbox.features.views import FeatureMatrix, FeaturizeConfig, Standardization
from glassbox.features.service import (concat_raw, unflatten_raw, trend_feature, curvature_feature, trend_features,
curvature_features, summarize, standardize, featurize)

__all__=[
    'FeatureMatrix',
    'FeaturizeConfig',
    'Standardization',
    'concat_raw',
    'unflatten_raw',
    'trend_feature',
    'curvature_feature',
    'trend_features',
    'curvature_features',
    'summarize',
    'standardize',
    'featurize'
]
