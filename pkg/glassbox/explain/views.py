from dataclasses import dataclass, replace
from typing import Optional
import numpy as np

@dataclass(frozen=True)
class Attribution:
    '''Per-cell (T x D) attribution of one sample; positive values raise the target-class probability.'''
    sample_id:int
    method:str
    values:np.ndarray
    target_class:int
    baseline:str
    prediction:float
    baseline_prediction:float
    n_steps:Optional[int]=None
    completeness_gap:Optional[float]=None
    window:Optional[int]=None

    @property
    def shape(self)->tuple[int,int]:
        return self.values.shape

    def top_cells(self,k:int)->np.ndarray:
        '''Flat indices of the k cells with the largest |attribution|, ties broken by index.'''
        order=np.argsort(-np.abs(self.values).reshape(-1),kind='stable')
        return order[:k]

    def summary(self)->dict:
        return {
            'sample_id':self.sample_id,
            'method':self.method,
            'target_class':self.target_class,
            'baseline':self.baseline,
            'prediction':self.prediction,
            'baseline_prediction':self.baseline_prediction,
            'n_steps':self.n_steps,
            'completeness_gap':self.completeness_gap,
            'window':self.window,
        }

@dataclass(frozen=True)
class PdpProfile:
    feature:int
    grid:np.ndarray
    profile:np.ndarray
    feature_name:Optional[str]=None

    def __post_init__(self):
        if len(self.grid)!=len(self.profile):
            raise ValueError(f"PDP grid has {len(self.grid)} points but profile has {len(self.profile)}")

@dataclass(frozen=True)
class SparsePCAResult:
    components:np.ndarray
    scores:np.ndarray
    explained_variance:np.ndarray
    total_variance:float
    converged:bool=True

    @property
    def sparsity(self)->float:
        '''Fraction of zero loadings.'''
        return float(np.mean(self.components==0))

    @property
    def explained_ratio(self)->np.ndarray:
        return self.explained_variance/self.total_variance

@dataclass(frozen=True)
class EmbeddingSet:
    layer:str
    pooling:str
    vectors:np.ndarray
    sample_ids:np.ndarray
    species:Optional[int]=None
    projection:Optional[np.ndarray]=None
    scores:Optional[np.ndarray]=None
    explained_variance:Optional[np.ndarray]=None
    loadings_sparsity:Optional[float]=None

    @property
    def n_samples(self)->int:
        return self.vectors.shape[0]

    def flat(self)->np.ndarray:
        '''Vectors as N x (everything else).'''
        return self.vectors.reshape(self.n_samples,-1)

    def with_projection(self,result:SparsePCAResult)->'EmbeddingSet':
        return replace(self,projection=result.components,scores=result.scores,
            explained_variance=result.explained_variance,loadings_sparsity=result.sparsity)

@dataclass(frozen=True)
class ProbeStep:
    alpha:float
    interpolant:np.ndarray
    nearest_id:int
    distance:float
