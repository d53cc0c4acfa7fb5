from glassbox.autodiff.tensor import Tensor, TapeNode, Tape, get_tape, backward, no_grad, default_dtype, is_grad_enabled
from glassbox.autodiff.utils import gradcheck, numerical_gradient, GradcheckReport, parameter, zeros, ones
from glassbox.autodiff.optim import Adam, AdamState, adam_step
from glassbox.autodiff import ops

__all__=[
    'Tensor',
    'TapeNode',
    'Tape',
    'get_tape',
    'backward',
    'no_grad',
    'default_dtype',
    'is_grad_enabled',
    'ops',
    'Adam',
    'AdamState',
    'adam_step',
    'gradcheck',
    'numerical_gradient',
    'GradcheckReport',
    'parameter',
    'zeros',
    'ones'
]
