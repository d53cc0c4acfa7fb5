from glassbox.explain.config import GRID_RESOLUTION, GRID_PERCENTILES
from glassbox.interpretable.base import FitModel
from glassbox.explain.views import PdpProfile
import numpy as np
import logging

logger = logging.getLogger(__name__)

def grid_from_values(values:np.ndarray, resolution:int=GRID_RESOLUTION,
    percentiles:tuple[float,float]=GRID_PERCENTILES)->np.ndarray:
    '''
    Evaluation grid for one feature column: the unique observed values when there are at most `resolution`
    of them, otherwise `resolution` equally spaced points between the given percentiles.
    '''
    values=np.asarray(values,dtype=np.float64)
    unique=np.unique(values)
    if len(unique)<=resolution:
        return unique
    lower,upper=np.quantile(values,percentiles)
    return np.unique(np.linspace(lower,upper,resolution))

def pdp(model:FitModel, features:np.ndarray, d:int, grid:np.ndarray|list[float]|None=None,
    feature_name:str|None=None, resolution:int=GRID_RESOLUTION)->PdpProfile:
    '''
    Partial dependence of the predicted class-1 probability on feature d:
    profile[g] = mean_i f(x_i with x_id := grid[g]).
    '''
    features=np.asarray(features,dtype=np.float64)
    if features.ndim!=2 or features.shape[0]==0:
        raise ValueError(f"pdp expects a non-empty N x P feature matrix, got shape {features.shape}")
    if not 0<=d<features.shape[1]:
        raise ValueError(f"Feature index d={d} out of range for P={features.shape[1]}")
    if grid is None:
        grid=grid_from_values(features[:,d],resolution)
    else:
        requested=np.asarray(grid,dtype=np.float64).reshape(-1)
        grid=np.unique(requested)
        if len(grid)!=len(requested) or np.any(grid!=requested):
            logger.warning(f"[PDP] Grid for feature {d} was not strictly increasing; evaluating the {len(grid)} sorted "
                f"distinct values of the {len(requested)} given")
    if len(grid)==0:
        raise ValueError("pdp needs a non-empty grid")
    profile=np.empty(len(grid))
    modified=features.copy()
    for g,value in enumerate(grid):
        modified[:,d]=value
        profile[g]=float(np.mean(model.predict_proba(modified)))
    return PdpProfile(feature=d,grid=grid,profile=profile,feature_name=feature_name)
