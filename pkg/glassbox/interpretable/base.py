from typing import Protocol, runtime_checkable
import numpy as np

@runtime_checkable
class FitModel(Protocol):

    @property
    def n_features(self) -> int:
        ...

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        ...

def check_dimension(features:np.ndarray, expected:int)->np.ndarray:
    features=np.asarray(features,dtype=np.float64)
    if features.ndim==1:
        features=features[None,:]
    if features.shape[1]!=expected:
        raise ValueError(f"Feature dimension mismatch: expected P={expected}, got P={features.shape[1]}")
    return features

def predict_proba(fit:FitModel, features:np.ndarray)->np.ndarray:
    '''Probability of class 1 for every row; the contract shared by all fitted classifiers.'''
    return fit.predict_proba(features)

def accuracy(fit:FitModel, features:np.ndarray, labels:np.ndarray)->float:
    if len(labels)==0:
        return float('nan')
    return float(np.mean((fit.predict_proba(features)>=0.5).astype(np.int64)==np.asarray(labels)))
