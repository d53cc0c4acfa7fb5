from glassbox.explain.config import (N_STEPS, IG_CHUNK, OCCLUSION_WINDOW, OCCLUSION_BATCH, ZERO_BASELINE, MEAN_BASELINE,
INTEGRATED_GRADIENTS, OCCLUSION)
from glassbox.explain.views import Attribution
from typing import Protocol, runtime_checkable
import numpy as np
import logging

logger = logging.getLogger(__name__)

@runtime_checkable
class TrajectoryModel(Protocol):
    '''A classifier over standardized (N, T, D) trajectories that can report target-class scores and their gradients.'''
    def score(self,Z:np.ndarray,target:int|np.ndarray=1)->np.ndarray:
        ...

    def score_and_gradient(self,Z:np.ndarray,target:int|np.ndarray=1)->tuple[np.ndarray,np.ndarray]:
        ...

def _resolve_baseline(x:np.ndarray, baseline:np.ndarray|None)->tuple[np.ndarray,str]:
    if baseline is None:
        return np.zeros_like(x),ZERO_BASELINE
    baseline=np.asarray(baseline,dtype=np.float64)
    if baseline.shape!=x.shape:
        raise ValueError(f"Baseline shape {baseline.shape} does not match sample shape {x.shape}")
    return baseline,'custom'

def integrated_gradients(model:TrajectoryModel, x:np.ndarray, target_class:int=1, baseline:np.ndarray|None=None,
    n_steps:int=N_STEPS, sample_id:int=0, baseline_name:str|None=None)->Attribution:
    '''
    Midpoint-rule integrated gradients of the target-class score from baseline to x (both T x D, standardized).

    IG = (x - x0) * mean_m grad f(x0 + (m - 1/2)/n (x - x0)), with the gradient passes evaluated in chunks.
    The completeness gap |sum IG - (f(x) - f(x0))| is recorded on the result.
    '''
    x=np.asarray(x,dtype=np.float64)
    if x.ndim!=2:
        raise ValueError(f"integrated_gradients expects one T x D sample, got shape {x.shape}")
    if n_steps<1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    x0,name=_resolve_baseline(x,baseline)
    delta=x-x0
    alphas=(np.arange(1,n_steps+1)-0.5)/n_steps
    total=np.zeros_like(x)
    for start in range(0,n_steps,IG_CHUNK):
        chunk=alphas[start:start+IG_CHUNK]
        points=x0[None]+chunk[:,None,None]*delta[None]
        _,gradients=model.score_and_gradient(points,target_class)
        total+=gradients.sum(axis=0)
    values=delta*total/n_steps
    endpoints=model.score(np.stack([x,x0]),target_class)
    gap=float(abs(values.sum()-(endpoints[0]-endpoints[1])))
    logger.debug(f"[IG] sample {sample_id}: f(x)={endpoints[0]:.4f} f(x0)={endpoints[1]:.4f} gap={gap:.3g}")
    return Attribution(sample_id=sample_id,method=INTEGRATED_GRADIENTS,values=values,target_class=target_class,
        baseline=baseline_name or name,prediction=float(endpoints[0]),baseline_prediction=float(endpoints[1]),
        n_steps=n_steps,completeness_gap=gap)

def occlusion(model:TrajectoryModel, x:np.ndarray, target_class:int=1, window:int=OCCLUSION_WINDOW,
    baseline:np.ndarray|None=None, sample_id:int=0, baseline_name:str|None=None)->Attribution:
    '''
    Prediction drop f(x) - f(x with a block replaced by the baseline) for non-overlapping blocks of `window`
    consecutive timepoints of one species; every cell of a block carries that block's drop.
    '''
    x=np.asarray(x,dtype=np.float64)
    if x.ndim!=2:
        raise ValueError(f"occlusion expects one T x D sample, got shape {x.shape}")
    T,D=x.shape
    if not 1<=window<=T:
        raise ValueError(f"Occlusion window must lie in [1, T={T}], got {window}")
    x0,name=_resolve_baseline(x,baseline)
    blocks=[(start,d) for start in range(0,T,window) for d in range(D)]
    reference=float(model.score(x[None],target_class)[0])
    values=np.zeros_like(x)
    for first in range(0,len(blocks),OCCLUSION_BATCH):
        batch=blocks[first:first+OCCLUSION_BATCH]
        occluded=np.repeat(x[None],len(batch),axis=0)
        for row,(start,d) in enumerate(batch):
            occluded[row,start:start+window,d]=x0[start:start+window,d]
        drops=reference-model.score(occluded,target_class)
        for (start,d),drop in zip(batch,drops):
            values[start:start+window,d]=drop
    return Attribution(sample_id=sample_id,method=OCCLUSION,values=values,target_class=target_class,
        baseline=baseline_name or name,prediction=reference,baseline_prediction=float(model.score(x0[None],target_class)[0]),
        window=window)

def explain_samples(model:TrajectoryModel, Z:np.ndarray, sample_ids:list[int], method:str=INTEGRATED_GRADIENTS,
    target_classes:np.ndarray|list[int]|None=None, baseline:np.ndarray|None=None, n_steps:int=N_STEPS,
    window:int=OCCLUSION_WINDOW, baseline_name:str|None=None)->list[Attribution]:
    '''Attributions for the given rows of a standardized (N, T, D) array; target defaults to class 1.'''
    attributions=[]
    for position,sample_id in enumerate(sample_ids):
        if not 0<=sample_id<Z.shape[0]:
            raise ValueError(f"Sample id {sample_id} out of range for {Z.shape[0]} subjects")
        target=1 if target_classes is None else int(target_classes[position])
        if method==INTEGRATED_GRADIENTS:
            attributions.append(integrated_gradients(model,Z[sample_id],target,baseline,n_steps,sample_id,baseline_name))
        elif method==OCCLUSION:
            attributions.append(occlusion(model,Z[sample_id],target,window,baseline,sample_id,baseline_name))
        else:
            raise ValueError(f"Unknown attribution method '{method}', expected '{INTEGRATED_GRADIENTS}' or '{OCCLUSION}'")
    return attributions

def resolve_baseline(kind:str, Z:np.ndarray, train_mask:np.ndarray|None=None)->np.ndarray:
    '''T x D baseline in standardized units: all zeros, or the mean trajectory of the training subjects.'''
    if kind==ZERO_BASELINE:
        return np.zeros(Z.shape[1:])
    if kind==MEAN_BASELINE:
        rows=Z if train_mask is None else Z[train_mask]
        return np.asarray(rows,dtype=np.float64).mean(axis=0)
    raise ValueError(f"Unknown baseline '{kind}', expected '{ZERO_BASELINE}' or '{MEAN_BASELINE}'")
