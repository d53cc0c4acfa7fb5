from glassbox.features.config import CURVATURE
from pydantic import BaseModel, ConfigDict
from dataclasses import dataclass, replace
from typing import Literal, Optional
import numpy as np

class FeaturizeConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    curvature: Literal['central','second'] = CURVATURE

@dataclass(frozen=True)
class Standardization:
    mean:np.ndarray
    std:np.ndarray
    zero_variance:np.ndarray

    def apply(self,values:np.ndarray)->np.ndarray:
        safe_std=np.where(self.zero_variance,1.0,self.std)
        standardized=(values-self.mean)/safe_std
        return np.where(self.zero_variance,0.0,standardized)

    def inverse(self,values:np.ndarray)->np.ndarray:
        return np.where(self.zero_variance,self.mean,values*self.std+self.mean)

@dataclass(frozen=True)
class FeatureMatrix:
    values:np.ndarray
    feature_names:list[str]
    representation:Literal['raw','featurized']
    standardization:Optional[Standardization]=None

    def __post_init__(self):
        if self.values.ndim!=2 or self.values.shape[1]!=len(self.feature_names):
            raise ValueError(f"FeatureMatrix has {self.values.shape} values but {len(self.feature_names)} feature names")

    @property
    def n_features(self)->int:
        return self.values.shape[1]

    @property
    def n_rows(self)->int:
        return self.values.shape[0]

    @property
    def zero_variance(self)->np.ndarray:
        if self.standardization is None:
            return np.zeros(self.n_features,dtype=bool)
        return self.standardization.zero_variance

    def index_of(self,name:str)->int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise ValueError(f"Unknown feature '{name}'") from None

    def rows(self,mask:np.ndarray)->'FeatureMatrix':
        return replace(self,values=self.values[mask])

    def unstandardized(self)->np.ndarray:
        if self.standardization is None:
            return self.values
        return self.standardization.inverse(self.values)
