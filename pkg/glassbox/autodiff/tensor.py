from glassbox.autodiff.config import DEFAULT_DTYPE
from dataclasses import dataclass, field
from contextlib import contextmanager
from typing import Callable, Optional
import numpy as np
import threading

_state=threading.local()

def _local(name:str, default):
    if not hasattr(_state,name):
        setattr(_state,name,default())
    return getattr(_state,name)

def get_default_dtype()->np.dtype:
    return _local('dtype',lambda:np.dtype(DEFAULT_DTYPE))

def is_grad_enabled()->bool:
    return _local('grad_enabled',lambda:True)

@contextmanager
def default_dtype(dtype):
    '''Tensors created inside the block default to dtype (float64 for gradient checks).'''
    previous=get_default_dtype()
    _state.dtype=np.dtype(dtype)
    try:
        yield
    finally:
        _state.dtype=previous

@contextmanager
def no_grad():
    previous=is_grad_enabled()
    _state.grad_enabled=False
    try:
        yield
    finally:
        _state.grad_enabled=previous

@dataclass(eq=False)
class TapeNode:
    op:str
    inputs:tuple['Tensor',...]
    output:'Tensor'
    backward:Callable[['TapeNode',np.ndarray],tuple[Optional[np.ndarray],...]]
    saved:dict=field(default_factory=dict)
    released:bool=False

    def release(self):
        self.saved={}
        self.released=True

class Tape:
    '''Operations recorded in execution order, which is a topological order of the graph.'''
    def __init__(self):
        self.nodes:list[TapeNode]=[]

    def __len__(self)->int:
        return len(self.nodes)

    def append(self,node:TapeNode):
        self.nodes.append(node)

    def clear(self):
        for node in self.nodes:
            node.release()
        self.nodes=[]

def get_tape()->Tape:
    return _local('tape',Tape)

class Tensor:
    def __init__(self,data,requires_grad:bool=False,dtype=None,name:str|None=None):
        dtype=np.dtype(dtype) if dtype is not None else get_default_dtype()
        self.data=np.array(data,dtype=dtype)
        self.requires_grad=requires_grad
        self.grad:Optional[np.ndarray]=None
        self.node:Optional[TapeNode]=None
        self.name=name

    @property
    def shape(self)->tuple[int,...]:
        return self.data.shape

    @property
    def ndim(self)->int:
        return self.data.ndim

    @property
    def size(self)->int:
        return self.data.size

    @property
    def dtype(self)->np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self)->bool:
        return self.node is None

    def numpy(self)->np.ndarray:
        return self.data

    def item(self)->float:
        return float(self.data.reshape(-1)[0]) if self.size==1 else float(self.data)

    def detach(self)->'Tensor':
        return Tensor(self.data,dtype=self.dtype)

    def zero_grad(self):
        self.grad=None

    def backward(self):
        backward(self)

    def __repr__(self)->str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    def __add__(self,other):
        return ops.add(self,other)

    def __radd__(self,other):
        return ops.add(self,other)

    def __sub__(self,other):
        return ops.sub(self,other)

    def __mul__(self,other):
        if isinstance(other,(int,float)):
            return ops.scale(self,other)
        return ops.mul(self,other)

    def __rmul__(self,other):
        return self.__mul__(other)

    def __neg__(self):
        return ops.scale(self,-1.0)

    def __matmul__(self,other):
        return ops.matmul(self,other)

    def __getitem__(self,index):
        return ops.slice(self,index)

    def sum(self,axis:int|None=None):
        return ops.sum(self,axis)

    def mean(self,axis:int|None=None):
        return ops.mean_pool(self,axis)

    def reshape(self,*shape):
        return ops.reshape(self,shape[0] if len(shape)==1 and isinstance(shape[0],tuple) else shape)

    def transpose(self,axes:tuple[int,...]|None=None):
        return ops.transpose(self,axes)

def as_tensor(value)->Tensor:
    return value if isinstance(value,Tensor) else Tensor(value)

def record(op:str, inputs:tuple[Tensor,...], data:np.ndarray, backward_fn, **saved)->Tensor:
    '''Wrap an op result and put it on the tape when any input takes part in differentiation.'''
    output=Tensor(data,dtype=inputs[0].dtype)
    if is_grad_enabled() and any(tensor.requires_grad for tensor in inputs):
        output.requires_grad=True
        node=TapeNode(op=op,inputs=inputs,output=output,backward=backward_fn,saved=saved)
        output.node=node
        get_tape().append(node)
    return output

def _accumulate(tensor:Tensor, grad:np.ndarray):
    grad=grad.astype(tensor.dtype,copy=False).reshape(tensor.shape)
    tensor.grad=grad.copy() if tensor.grad is None else tensor.grad+grad

def backward(loss:Tensor):
    '''
    Reverse-mode pass from a scalar loss into the .grad of every leaf that requires it. Each tape node is
    visited once, then the tape is cleared, so a second call without a new forward pass fails.
    '''
    if loss.size!=1:
        raise RuntimeError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss.node is None:
        if not loss.requires_grad:
            raise RuntimeError("backward called on a tensor that does not require grad")
        _accumulate(loss,np.ones_like(loss.data))
        return
    if loss.node.released:
        raise RuntimeError("backward called twice on the same graph; run the forward pass again")
    tape=get_tape()
    grads={id(loss):np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        grad=grads.pop(id(node.output),None)
        if grad is None:
            continue
        for tensor,input_grad in zip(node.inputs,node.backward(node,grad)):
            if input_grad is None or not tensor.requires_grad:
                continue
            if tensor.node is None:
                _accumulate(tensor,input_grad)
            elif id(tensor) in grads:
                grads[id(tensor)]=grads[id(tensor)]+input_grad
            else:
                grads[id(tensor)]=input_grad
    tape.clear()

from glassbox.autodiff import ops  # noqa: E402
