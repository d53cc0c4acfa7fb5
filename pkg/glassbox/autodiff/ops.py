'''
Differentiable operations. Every op checks its shapes, computes the forward value with numpy (reductions
accumulate in float64) and records a backward rule on the tape.

Broadcasting is limited to the bias-add pattern: the second operand may match the trailing dimensions of
the first.
'''
from glassbox.autodiff.config import ACCUMULATE_DTYPE, LAYER_NORM_EPS
from glassbox.autodiff.tensor import Tensor, as_tensor, record
from scipy.special import expit
import builtins
import numpy as np

def _shape_error(op:str, *shapes)->ValueError:
    return ValueError(f"{op}: incompatible shapes {', '.join(str(tuple(shape)) for shape in shapes)}")

def _trailing(a:Tensor, b:Tensor, op:str):
    if a.shape==b.shape:
        return
    if b.ndim<=a.ndim and a.shape[a.ndim-b.ndim:]==b.shape:
        return
    raise _shape_error(op,a.shape,b.shape)

def _reduce_to(grad:np.ndarray, shape:tuple[int,...])->np.ndarray:
    '''Sum a gradient over the leading axes that were broadcast.'''
    extra=grad.ndim-len(shape)
    return grad.sum(axis=tuple(range(extra)),dtype=ACCUMULATE_DTYPE) if extra else grad

def _backward_add(node,grad):
    return grad,_reduce_to(grad,node.inputs[1].shape)

def add(a:Tensor, b)->Tensor:
    a,b=as_tensor(a),as_tensor(b)
    _trailing(a,b,'add')
    return record('add',(a,b),a.data+b.data,_backward_add)

def _backward_sub(node,grad):
    return grad,-_reduce_to(grad,node.inputs[1].shape)

def sub(a:Tensor, b)->Tensor:
    a,b=as_tensor(a),as_tensor(b)
    _trailing(a,b,'sub')
    return record('sub',(a,b),a.data-b.data,_backward_sub)

def _backward_mul(node,grad):
    a,b=node.inputs
    return grad*b.data,_reduce_to(grad*a.data,b.shape)

def mul(a:Tensor, b)->Tensor:
    '''Elementwise product.'''
    a,b=as_tensor(a),as_tensor(b)
    _trailing(a,b,'mul')
    return record('mul',(a,b),a.data*b.data,_backward_mul)

def _backward_scale(node,grad):
    return (grad*node.saved['factor'],)

def scale(a:Tensor, factor:float)->Tensor:
    return record('scale',(a,),a.data*factor,_backward_scale,factor=float(factor))

def _backward_matmul(node,grad):
    a,b=node.inputs
    grad=grad.astype(ACCUMULATE_DTYPE)
    grad_a=grad@np.swapaxes(b.data,-1,-2).astype(ACCUMULATE_DTYPE)
    grad_b=np.swapaxes(a.data,-1,-2).astype(ACCUMULATE_DTYPE)@grad
    return grad_a,_reduce_to(grad_b,b.shape)

def matmul(a:Tensor, b:Tensor)->Tensor:
    '''
    Matrix product over the last two axes. b is either a matrix shared by every leading index of a or has the
    same leading shape as a.
    '''
    a,b=as_tensor(a),as_tensor(b)
    if a.ndim<2 or b.ndim<2 or a.shape[-1]!=b.shape[-2] or (b.ndim>2 and a.shape[:-2]!=b.shape[:-2]):
        raise _shape_error('matmul',a.shape,b.shape)
    data=np.matmul(a.data.astype(ACCUMULATE_DTYPE),b.data.astype(ACCUMULATE_DTYPE))
    return record('matmul',(a,b),data,_backward_matmul)

def _backward_softmax(node,grad):
    y=node.output.data
    axis=node.saved['axis']
    return (y*(grad-np.sum(grad*y,axis=axis,keepdims=True,dtype=ACCUMULATE_DTYPE)),)

def softmax(a:Tensor, axis:int=-1)->Tensor:
    '''Softmax along axis (rows by default), computed after subtracting the row maximum.'''
    shifted=a.data.astype(ACCUMULATE_DTYPE)-np.max(a.data,axis=axis,keepdims=True)
    exponentials=np.exp(shifted)
    data=exponentials/np.sum(exponentials,axis=axis,keepdims=True)
    return record('softmax',(a,),data,_backward_softmax,axis=axis)

def _backward_relu(node,grad):
    return (grad*(node.inputs[0].data>0),)

def relu(a:Tensor)->Tensor:
    return record('relu',(a,),np.maximum(a.data,0),_backward_relu)

def _backward_sigmoid(node,grad):
    y=node.output.data
    return (grad*y*(1-y),)

def sigmoid(a:Tensor)->Tensor:
    return record('sigmoid',(a,),expit(a.data),_backward_sigmoid)

def _backward_sum(node,grad):
    axis=node.saved['axis']
    shape=node.inputs[0].shape
    if axis is not None:
        grad=np.expand_dims(grad,axis)
    return (np.broadcast_to(grad,shape).copy(),)

def sum(a:Tensor, axis:int|None=None)->Tensor:
    return record('sum',(a,),np.sum(a.data,axis=axis,dtype=ACCUMULATE_DTYPE),_backward_sum,axis=axis)

def _backward_mean(node,grad):
    axis=node.saved['axis']
    shape=node.inputs[0].shape
    count=np.prod(shape) if axis is None else shape[axis]
    if axis is not None:
        grad=np.expand_dims(grad,axis)
    return (np.broadcast_to(grad/count,shape).copy(),)

def mean_pool(a:Tensor, axis:int|None=None)->Tensor:
    '''Mean over one axis (all axes when None).'''
    if axis is not None and not -a.ndim<=axis<a.ndim:
        raise ValueError(f"mean_pool: axis {axis} out of range for shape {a.shape}")
    return record('mean_pool',(a,),np.mean(a.data,axis=axis,dtype=ACCUMULATE_DTYPE),_backward_mean,axis=axis)

def _backward_concat(node,grad):
    boundaries=np.cumsum([tensor.shape[node.saved['axis']] for tensor in node.inputs])[:-1]
    return tuple(np.split(grad,boundaries,axis=node.saved['axis']))

def concat(tensors:list[Tensor], axis:int=-1)->Tensor:
    tensors=tuple(as_tensor(tensor) for tensor in tensors)
    if not tensors:
        raise ValueError("concat: needs at least one tensor")
    reference=list(tensors[0].shape)
    for tensor in tensors[1:]:
        other=list(tensor.shape)
        if len(other)!=len(reference) or other[:axis%len(reference)]+other[axis%len(reference)+1:]!=\
            reference[:axis%len(reference)]+reference[axis%len(reference)+1:]:
            raise _shape_error('concat',*(t.shape for t in tensors))
    return record('concat',tensors,np.concatenate([tensor.data for tensor in tensors],axis=axis),_backward_concat,
        axis=axis)

def _backward_slice(node,grad):
    full=np.zeros(node.inputs[0].shape,dtype=grad.dtype)
    full[node.saved['index']]+=grad
    return (full,)

def slice(a:Tensor, index)->Tensor:
    '''Basic (view) indexing: integers, slices and Ellipsis.'''
    parts=index if isinstance(index,tuple) else (index,)
    if not builtins.all(isinstance(part,(int,np.integer,builtins.slice,type(Ellipsis))) for part in parts):
        raise ValueError(f"slice: only basic indexing is supported, got {index!r}")
    try:
        data=a.data[index]
    except IndexError as error:
        raise ValueError(f"slice: {error} for shape {a.shape}") from error
    return record('slice',(a,),data,_backward_slice,index=index)

def _backward_transpose(node,grad):
    return (np.transpose(grad,np.argsort(node.saved['axes'])),)

def transpose(a:Tensor, axes:tuple[int,...]|None=None)->Tensor:
    '''Permute axes; swaps the last two by default.'''
    if axes is None:
        if a.ndim<2:
            raise ValueError(f"transpose: needs at least 2 dimensions, got shape {a.shape}")
        axes=tuple(range(a.ndim-2))+(a.ndim-1,a.ndim-2)
    if sorted(axes)!=list(range(a.ndim)):
        raise ValueError(f"transpose: axes {axes} do not permute shape {a.shape}")
    return record('transpose',(a,),np.transpose(a.data,axes),_backward_transpose,axes=tuple(axes))

def _backward_reshape(node,grad):
    return (grad.reshape(node.inputs[0].shape),)

def reshape(a:Tensor, shape:tuple[int,...])->Tensor:
    try:
        data=a.data.reshape(shape)
    except ValueError as error:
        raise ValueError(f"reshape: cannot reshape {a.shape} to {tuple(shape)}") from error
    return record('reshape',(a,),data,_backward_reshape)

def _backward_layer_norm(node,grad):
    x,gamma,beta=node.inputs
    normalized,inv_std=node.saved['normalized'],node.saved['inv_std']
    grad=grad.astype(ACCUMULATE_DTYPE)
    grad_normalized=grad*gamma.data
    grad_x=inv_std*(grad_normalized-grad_normalized.mean(axis=-1,keepdims=True)
        -normalized*np.mean(grad_normalized*normalized,axis=-1,keepdims=True))
    return grad_x,_reduce_to(grad*normalized,gamma.shape),_reduce_to(grad,beta.shape)

def layer_norm(x:Tensor, gamma:Tensor, beta:Tensor, eps:float=LAYER_NORM_EPS)->Tensor:
    '''Normalize the last axis to zero mean and unit variance, then apply gamma * x + beta.'''
    if gamma.shape!=(x.shape[-1],) or beta.shape!=(x.shape[-1],):
        raise _shape_error('layer_norm',x.shape,gamma.shape,beta.shape)
    values=x.data.astype(ACCUMULATE_DTYPE)
    centered=values-values.mean(axis=-1,keepdims=True)
    inv_std=1.0/np.sqrt(np.mean(centered**2,axis=-1,keepdims=True)+eps)
    normalized=centered*inv_std
    return record('layer_norm',(x,gamma,beta),normalized*gamma.data+beta.data,_backward_layer_norm,
        normalized=normalized,inv_std=inv_std)

def _backward_embedding_add(node,grad):
    T=node.inputs[0].shape[-2]
    offset=node.saved['offset']
    grad_table=np.zeros(node.inputs[1].shape,dtype=ACCUMULATE_DTYPE)
    grad_table[offset:offset+T]=_reduce_to(grad,(T,grad.shape[-1]))
    return grad,grad_table

def embedding_add(x:Tensor, table:Tensor, offset:int=0)->Tensor:
    '''Add rows offset..offset+T-1 of a positional table (n_positions x E) to a (..., T, E) input.'''
    T,E=x.shape[-2],x.shape[-1]
    if table.ndim!=2 or table.shape[1]!=E:
        raise _shape_error('embedding_add',x.shape,table.shape)
    if offset+T>table.shape[0]:
        raise ValueError(f"embedding_add: sequence length T={T} exceeds n_positions={table.shape[0]}")
    return record('embedding_add',(x,table),x.data+table.data[offset:offset+T],_backward_embedding_add,offset=offset)

def _backward_masked_fill(node,grad):
    return (np.where(node.saved['mask'],0.0,grad),)

def masked_fill(a:Tensor, mask:np.ndarray, value:float)->Tensor:
    '''Replace entries where mask is True; mask matches a's trailing dimensions.'''
    mask=np.asarray(mask,dtype=bool)
    if mask.ndim>a.ndim or a.shape[a.ndim-mask.ndim:]!=mask.shape:
        raise _shape_error('masked_fill',a.shape,mask.shape)
    return record('masked_fill',(a,),np.where(mask,value,a.data),_backward_masked_fill,mask=mask)

def _backward_bce(node,grad):
    logits=node.inputs[0].data.astype(ACCUMULATE_DTYPE)
    targets=node.saved['targets']
    return (grad*(expit(logits)-targets)/logits.size,None)

def binary_cross_entropy(logits:Tensor, targets)->Tensor:
    '''Mean binary cross-entropy of sigmoid(logits) against {0,1} (or soft) targets, computed from logits.'''
    targets=np.asarray(targets.data if isinstance(targets,Tensor) else targets,dtype=ACCUMULATE_DTYPE)
    if targets.shape!=logits.shape:
        raise _shape_error('binary_cross_entropy',logits.shape,targets.shape)
    values=logits.data.astype(ACCUMULATE_DTYPE)
    loss=np.mean(np.logaddexp(0.0,values)-targets*values)
    return record('binary_cross_entropy',(logits,Tensor(targets,dtype=logits.dtype)),loss,_backward_bce,targets=targets)
