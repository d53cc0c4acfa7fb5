from glassbox.features.views import FeatureMatrix, FeaturizeConfig, Standardization
from glassbox.features.config import RAW, FEATURIZED, SECOND
from glassbox.simulation.views import SubjectDataset
import numpy as np
import logging

logger = logging.getLogger(__name__)

def raw_feature_names(T:int, D:int)->list[str]:
    return [f'raw:t={t}:d={d}' for t in range(T) for d in range(D)]

def summary_feature_names(D:int)->list[str]:
    return [f'trend:d={d}' for d in range(D)]+[f'curv:d={d}' for d in range(D)]

def concat_raw(dataset:SubjectDataset)->FeatureMatrix:
    '''Flatten each subject's T x D trajectory time-major into one row. No standardization.'''
    if dataset.n_subjects==0:
        raise ValueError("concat_raw needs a nonempty dataset")
    N,T,D=dataset.X.shape
    return FeatureMatrix(values=dataset.X.reshape(N,T*D).astype(np.float64),
        feature_names=raw_feature_names(T,D),representation=RAW)

def unflatten_raw(values:np.ndarray, T:int, D:int)->np.ndarray:
    return np.asarray(values).reshape(-1,T,D)

def trend_features(X:np.ndarray)->np.ndarray:
    '''OLS slope over t = 1..T along axis 1 of an (N, T, D) array.'''
    T=X.shape[1]
    if T<2:
        raise ValueError(f"Trend needs at least 2 timepoints, got {T}")
    t=np.arange(1,T+1,dtype=np.float64)
    centered=t-t.mean()
    shape=(1,T)+(1,)*(X.ndim-2)
    return np.sum(centered.reshape(shape)*X,axis=1)/np.sum(centered**2)

def curvature_features(X:np.ndarray, curvature:str='central')->np.ndarray:
    '''
    Mean squared difference along axis 1 of an (N, T, D) array.

    "central" averages (x[t+1] - x[t-1])^2 over the T-2 interior points; "second" uses the second
    difference x[t+1] - 2 x[t] + x[t-1] instead.
    '''
    T=X.shape[1]
    if T<3:
        raise ValueError(f"Curvature needs at least 3 timepoints, got {T}")
    if curvature==SECOND:
        differences=X[:,2:]-2*X[:,1:-1]+X[:,:-2]
    else:
        differences=X[:,2:]-X[:,:-2]
    return np.sum(differences**2,axis=1)/(T-2)

def trend_feature(trajectory:np.ndarray)->float:
    return float(trend_features(np.asarray(trajectory,dtype=np.float64)[None,:])[0])

def curvature_feature(trajectory:np.ndarray, curvature:str='central')->float:
    return float(curvature_features(np.asarray(trajectory,dtype=np.float64)[None,:],curvature)[0])

def fit_standardization(values:np.ndarray, train_mask:np.ndarray|None=None)->Standardization:
    reference=values if train_mask is None else values[train_mask]
    mean=reference.mean(axis=0)
    std=reference.std(axis=0)
    zero_variance=std<=1e-12*np.maximum(1.0,np.abs(mean))
    return Standardization(mean=mean,std=std,zero_variance=zero_variance)

def standardize(matrix:FeatureMatrix, train_mask:np.ndarray|None=None)->FeatureMatrix:
    '''
    Standardize columns to zero mean and unit variance using the training rows only.

    Zero-variance columns become all zeros and are flagged on the stored standardization.
    '''
    if matrix.standardization is not None:
        return matrix
    standardization=fit_standardization(matrix.values,train_mask)
    n_flat=int(standardization.zero_variance.sum())
    if n_flat:
        logger.warning(f"[Features] {n_flat} zero-variance {matrix.representation} columns standardized to zero")
    return FeatureMatrix(values=standardization.apply(matrix.values),feature_names=matrix.feature_names,
        representation=matrix.representation,standardization=standardization)

def summarize(dataset:SubjectDataset, config:FeaturizeConfig|None=None, train_mask:np.ndarray|None=None,
    standardized:bool=True)->FeatureMatrix:
    '''
    Per-species trend and curvature features, columns ordered (trend 0..D-1, curv 0..D-1).

    Standardization parameters come from the dataset's training split unless train_mask overrides it.
    '''
    config=config or FeaturizeConfig()
    if dataset.n_subjects==0:
        raise ValueError("summarize needs a nonempty dataset")
    X=dataset.X.astype(np.float64)
    values=np.concatenate([trend_features(X),curvature_features(X,config.curvature)],axis=1)
    matrix=FeatureMatrix(values=values,feature_names=summary_feature_names(dataset.n_species),representation=FEATURIZED)
    if not standardized:
        return matrix
    return standardize(matrix,dataset.train_mask if train_mask is None else train_mask)

def featurize(dataset:SubjectDataset, representation:str, standardized:bool=True,
    config:FeaturizeConfig|None=None, train_mask:np.ndarray|None=None)->FeatureMatrix:
    if representation==RAW:
        matrix=concat_raw(dataset)
        if not standardized:
            return matrix
        return standardize(matrix,dataset.train_mask if train_mask is None else train_mask)
    if representation==FEATURIZED:
        return summarize(dataset,config,train_mask=train_mask,standardized=standardized)
    raise ValueError(f"Unknown representation '{representation}', expected '{RAW}' or '{FEATURIZED}'")
