from glassbox.autodiff.config import ADAM_LR, ADAM_BETAS, ADAM_EPS, ACCUMULATE_DTYPE
from glassbox.autodiff.tensor import Tensor
from dataclasses import dataclass, field
import numpy as np

@dataclass
class AdamState:
    step:int=0
    first_moments:list[np.ndarray]=field(default_factory=list)
    second_moments:list[np.ndarray]=field(default_factory=list)

    @classmethod
    def zeros_like(cls,params:list[np.ndarray])->'AdamState':
        return cls(step=0,first_moments=[np.zeros(param.shape,dtype=ACCUMULATE_DTYPE) for param in params],
            second_moments=[np.zeros(param.shape,dtype=ACCUMULATE_DTYPE) for param in params])

def adam_step(params:list[np.ndarray], grads:list[np.ndarray|None], state:AdamState, lr:float=ADAM_LR,
    betas:tuple[float,float]=ADAM_BETAS, eps:float=ADAM_EPS)->tuple[list[np.ndarray],AdamState]:
    '''
    One Adam update with bias correction. Pure: returns new parameter arrays and a new state.
    A missing gradient counts as zero.
    '''
    if len(params)!=len(grads):
        raise ValueError(f"adam_step: {len(params)} parameters but {len(grads)} gradients")
    if not state.first_moments:
        state=AdamState.zeros_like(params)
    beta1,beta2=betas
    step=state.step+1
    correction1=1-beta1**step
    correction2=1-beta2**step
    new_params,first_moments,second_moments=[],[],[]
    for param,grad,m,v in zip(params,grads,state.first_moments,state.second_moments):
        if grad is not None and grad.shape!=param.shape:
            raise ValueError(f"adam_step: gradient shape {grad.shape} does not match parameter shape {param.shape}")
        grad=np.zeros(param.shape,dtype=ACCUMULATE_DTYPE) if grad is None else grad.astype(ACCUMULATE_DTYPE)
        m=beta1*m+(1-beta1)*grad
        v=beta2*v+(1-beta2)*grad**2
        update=lr*(m/correction1)/(np.sqrt(v/correction2)+eps)
        new_params.append((param.astype(ACCUMULATE_DTYPE)-update).astype(param.dtype))
        first_moments.append(m)
        second_moments.append(v)
    return new_params,AdamState(step=step,first_moments=first_moments,second_moments=second_moments)

class Adam:
    def __init__(self,params:list[Tensor],lr:float=ADAM_LR,betas:tuple[float,float]=ADAM_BETAS,eps:float=ADAM_EPS):
        self.params=list(params)
        self.lr=lr
        self.betas=betas
        self.eps=eps
        self.state=AdamState.zeros_like([param.data for param in self.params])

    def step(self):
        new_params,self.state=adam_step([param.data for param in self.params],[param.grad for param in self.params],
            self.state,self.lr,self.betas,self.eps)
        for param,value in zip(self.params,new_params):
            param.data[...]=value

    def zero_grad(self):
        for param in self.params:
            param.zero_grad()
