from glassbox.autodiff.config import GRADCHECK_STEP, GRADCHECK_RTOL, GRADCHECK_ATOL, ACCUMULATE_DTYPE
from glassbox.autodiff.tensor import Tensor, backward, no_grad
from dataclasses import dataclass
from typing import Callable
import numpy as np
import logging

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class GradcheckReport:
    passed:bool
    max_abs_error:float
    max_rel_error:float
    analytic:list[np.ndarray]
    numeric:list[np.ndarray]

def numerical_gradient(fn:Callable[...,Tensor], inputs:list[Tensor], position:int, eps:float=GRADCHECK_STEP)->np.ndarray:
    '''Central finite differences of a scalar function with respect to inputs[position], in float64.'''
    tensor=inputs[position]
    numeric=np.zeros(tensor.shape,dtype=ACCUMULATE_DTYPE)
    with no_grad():
        for i in range(tensor.size):
            original=tensor.data.flat[i]
            tensor.data.flat[i]=original+eps
            upper=fn(*inputs).item()
            tensor.data.flat[i]=original-eps
            lower=fn(*inputs).item()
            tensor.data.flat[i]=original
            numeric.flat[i]=(upper-lower)/(2*eps)
    return numeric

def gradcheck(fn:Callable[...,Tensor], inputs:list[Tensor], eps:float=GRADCHECK_STEP, rtol:float=GRADCHECK_RTOL,
    atol:float=GRADCHECK_ATOL)->GradcheckReport:
    '''
    Compare reverse-mode gradients of a scalar fn(*inputs) against central differences for every input that
    requires grad. Passes when |analytic - numeric| <= atol + rtol * |numeric| everywhere.
    '''
    for tensor in inputs:
        tensor.zero_grad()
    backward(fn(*inputs))
    analytic,numeric=[],[]
    for position,tensor in enumerate(inputs):
        if not tensor.requires_grad:
            continue
        analytic.append(np.zeros(tensor.shape) if tensor.grad is None else tensor.grad.astype(ACCUMULATE_DTYPE))
        numeric.append(numerical_gradient(fn,inputs,position,eps))
    errors=[np.abs(a-n) for a,n in zip(analytic,numeric)]
    max_abs=max((float(error.max(initial=0.0)) for error in errors),default=0.0)
    max_rel=max((float(np.max(error/np.maximum(np.abs(n),atol),initial=0.0)) for error,n in zip(errors,numeric)),default=0.0)
    passed=all(np.all(error<=atol+rtol*np.abs(n)) for error,n in zip(errors,numeric))
    if not passed:
        logger.warning(f"[Gradcheck] Mismatch: max abs error {max_abs:.3g}, max rel error {max_rel:.3g}")
    return GradcheckReport(passed=passed,max_abs_error=max_abs,max_rel_error=max_rel,analytic=analytic,numeric=numeric)

def parameter(rng:np.random.Generator, shape:tuple[int,...], std:float=0.02, name:str|None=None)->Tensor:
    '''Trainable tensor drawn from N(0, std^2).'''
    return Tensor(rng.normal(0.0,std,size=shape),requires_grad=True,name=name)

def zeros(shape:tuple[int,...], requires_grad:bool=False, name:str|None=None)->Tensor:
    return Tensor(np.zeros(shape),requires_grad=requires_grad,name=name)

def ones(shape:tuple[int,...], requires_grad:bool=False, name:str|None=None)->Tensor:
    return Tensor(np.ones(shape),requires_grad=requires_grad,name=name)
