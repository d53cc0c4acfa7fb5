from glassbox.cli.config import DESK, DEFAULT_SAMPLES, DEFAULT_OUT
from glassbox.simulation.config import N_SUBJECTS, N_TIMEPOINTS, N_SPECIES, N_COMMUNITIES, SEED
from glassbox.evalbench.config import MODELS, SPARSE_LOGISTIC, ABLATION_Q, ABLATION_SAMPLES, TOP_K, N_SHUFFLES
from glassbox.explain.config import N_STEPS, OCCLUSION_WINDOW, ZERO_BASELINE, MEAN_POOLING, N_COMPONENTS, GRID_RESOLUTION, INTEGRATED_GRADIENTS
from glassbox.interpretable.config import N_FOLDS, N_LAMBDA
from glassbox.transformer.config import N_HEAD
from glassbox.features.config import RAW, FEATURIZED
from glassbox.store.config import BINARY
from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Literal, Optional
from pathlib import Path

class CommandResult(BaseModel):
    is_success:bool
    content:str|None=None
    error:str|None=None
    exit_code:int=0
    artifacts:list[str]=Field(default_factory=list)

class RunConfig(BaseModel):
    '''Options shared by every subcommand.'''
    model_config=ConfigDict(extra='forbid',frozen=True)

    out:Path=Field(default=Path(DEFAULT_OUT),description="Output root for all artifacts")
    threads:Optional[int]=Field(default=None,ge=1,description="BLAS/OpenMP thread limit (unlimited when unset)")
    deterministic:bool=Field(default=False,description="Force single-threaded numerics")
    overwrite:bool=False

    @property
    def thread_limit(self)->Optional[int]:
        return 1 if self.deterministic else self.threads

class CommandArgs(BaseModel):
    model_config=ConfigDict(extra='forbid',frozen=True)

    name:Optional[str]=Field(default=None,description="Artifact directory name under its kind folder")

class SimulateArgs(CommandArgs):
    n:int=Field(default=N_SUBJECTS,gt=0,description="Number of subjects")
    timepoints:int=Field(default=N_TIMEPOINTS,gt=0)
    species:int=Field(default=N_SPECIES,gt=0)
    communities:int=Field(default=N_COMMUNITIES,gt=0)
    seed:int=Field(default=SEED,ge=0,lt=2**64)
    format:Literal['binary','csv']=BINARY

class FeaturizeArgs(CommandArgs):
    dataset:str
    representation:Literal['raw','featurized']=FEATURIZED
    standardized:bool=True
    format:Literal['binary','csv']=BINARY

class TransformerArgs(CommandArgs):
    preset:Literal['desk','full']=DESK
    epochs:Optional[int]=Field(default=None,ge=0)
    n_head:int=Field(default=N_HEAD,gt=0)
    seed:int=Field(default=0,ge=0,lt=2**64)

class FitArgs(TransformerArgs):
    dataset:str
    model:str=SPARSE_LOGISTIC
    representation:Optional[Literal['raw','featurized']]=Field(default=None,description="featurized for glass-box models, raw for sequence models")
    n_folds:int=Field(default=N_FOLDS,ge=2)
    n_lambda:int=Field(default=N_LAMBDA,ge=1)

    @field_validator('model')
    @classmethod
    def check_model(cls,model:str)->str:
        if model not in MODELS:
            raise ValueError(f"Unknown model '{model}', available: {', '.join(MODELS)}")
        return model

class ExplainArgs(CommandArgs):
    model:str
    method:Literal['integrated_gradients','occlusion','embeddings','pdp']=INTEGRATED_GRADIENTS
    samples:list[int]=Field(default_factory=lambda:list(DEFAULT_SAMPLES))
    target_class:Optional[int]=Field(default=None,ge=0,le=1,description="Class explained; the true label when unset")
    baseline:Literal['zero','mean']=ZERO_BASELINE
    n_steps:int=Field(default=N_STEPS,ge=1)
    window:int=Field(default=OCCLUSION_WINDOW,ge=1)
    layer:Optional[str]=None
    pooling:Literal['mean','none','species']=MEAN_POOLING
    species:Optional[int]=Field(default=None,ge=0)
    n_components:int=Field(default=N_COMPONENTS,ge=1)
    sparsity_penalty:float=Field(default=0.0,ge=0.0,lt=1.0)
    probe:Optional[tuple[int,int]]=None
    features:list[str]=Field(default_factory=list,description="PDP features by name or column index")
    resolution:int=Field(default=GRID_RESOLUTION,ge=2)
    figures:bool=True

    @field_validator('samples')
    @classmethod
    def check_samples(cls,samples:list[int])->list[int]:
        if not samples or any(sample<0 for sample in samples):
            raise ValueError(f"samples must be a nonempty list of subject indices, got {samples}")
        return samples

class EvalArgs(TransformerArgs):
    suite:Literal['table1','ablation','stability','faithfulness']
    n:list[int]=Field(default_factory=lambda:[N_SUBJECTS])
    seeds:list[int]=Field(default_factory=lambda:[0])
    models:Optional[list[str]]=None
    representations:list[Literal['raw','featurized']]=Field(default_factory=lambda:[RAW,FEATURIZED])
    dataset:Optional[str]=Field(default=None,description="Dataset artifact used instead of a fresh simulation")
    model:Literal['sparse_logistic','transformer','cbm']=SPARSE_LOGISTIC
    method:Literal['integrated_gradients','occlusion']=INTEGRATED_GRADIENTS
    q:float=Field(default=ABLATION_Q,gt=0.0,lt=1.0)
    n_samples:int=Field(default=ABLATION_SAMPLES,ge=1)
    n_steps:int=Field(default=N_STEPS,ge=1)
    window:int=Field(default=OCCLUSION_WINDOW,ge=1)
    attributions:Optional[str]=Field(default=None,description="Attribution artifact scored by the faithfulness suite")
    occlusions:Optional[str]=None
    k:int=Field(default=TOP_K,ge=1)
    n_shuffles:int=Field(default=N_SHUFFLES,ge=1)
    n_folds:int=Field(default=N_FOLDS,ge=2)
    n_lambda:int=Field(default=N_LAMBDA,ge=1)

    @field_validator('n')
    @classmethod
    def check_sizes(cls,n:list[int])->list[int]:
        if not n or any(value<=0 for value in n):
            raise ValueError(f"--n needs positive subject counts, got {n}")
        return n

class ReportArgs(CommandArgs):
    artifacts:list[str]=Field(min_length=1)
    figures:bool=True
