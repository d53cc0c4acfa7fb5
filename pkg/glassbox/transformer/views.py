from glassbox.transformer.config import (N_EMBD, N_POSITIONS, N_LAYER, DESK_N_LAYER, N_HEAD, N_CONCEPT, N_CLASS, EPOCHS,
BATCH_SIZE, LR, CBM_LAMBDA, PLAIN, CBM)
from glassbox.simulation.utils import config_digest
from pydantic import BaseModel, ConfigDict, Field, model_validator
from dataclasses import dataclass, asdict
from typing import Literal, Optional

class TrainingError(RuntimeError):
    '''Training produced a non-finite loss.'''

class TransformerConfig(BaseModel):
    model_config=ConfigDict(extra='forbid',frozen=True)

    n_embd:int=Field(default=N_EMBD,gt=0,description="Token width; equals the number of species")
    n_positions:int=Field(default=N_POSITIONS,gt=0,description="Longest sequence the positional table covers")
    n_layer:int=Field(default=N_LAYER,ge=0)
    n_head:int=Field(default=N_HEAD,gt=0)
    n_concept:int=Field(default=N_CONCEPT,gt=0)
    n_class:int=Field(default=N_CLASS,ge=2)
    causal_mask:bool=True
    epochs:int=Field(default=EPOCHS,ge=0)
    batch_size:int=Field(default=BATCH_SIZE,gt=0)
    lr:float=Field(default=LR,ge=0.0)
    cbm_lambda:float=Field(default=CBM_LAMBDA,gt=0.0,description="Weight of the class loss in the joint concept/class loss")
    seed:int=Field(default=0,ge=0,lt=2**64)

    @model_validator(mode='after')
    def check_heads(self)->'TransformerConfig':
        if self.n_embd%self.n_head!=0:
            raise ValueError(f"n_embd ({self.n_embd}) must be divisible by n_head ({self.n_head})")
        if self.n_class!=2:
            raise ValueError("Only binary classification (n_class=2) is supported")
        return self

    @classmethod
    def desk(cls,**overrides)->'TransformerConfig':
        '''Reduced-depth preset for laptop-scale runs.'''
        return cls(**({'n_layer':DESK_N_LAYER}|overrides))

    @property
    def head_dim(self)->int:
        return self.n_embd//self.n_head

    def config_hash(self)->str:
        return config_digest(self)

Mode=Literal['plain','cbm']
MODES=(PLAIN,CBM)

@dataclass(frozen=True)
class EpochLog:
    epoch:int
    train_loss:float
    train_accuracy:float
    val_loss:float
    val_accuracy:float
    val_concept_auc:Optional[float]=None

    def to_dict(self)->dict:
        return asdict(self)
