from glassbox.evalbench.config import (MODELS, REPRESENTATIONS, N_LIST, SEEDS, ABLATION_Q, ABLATION_SAMPLES,
SPARSE_LOGISTIC, OK)
from glassbox.explain.config import INTEGRATED_GRADIENTS, N_STEPS, OCCLUSION_WINDOW
from glassbox.transformer.views import TransformerConfig
from glassbox.interpretable.views import OverlapReport
from glassbox.interpretable.config import N_FOLDS, N_LAMBDA
from glassbox.simulation.views import SimConfig
from glassbox.simulation.utils import config_digest
from pydantic import BaseModel, ConfigDict, Field, field_validator
from dataclasses import dataclass, field, asdict
from typing import Literal, Optional
from tabulate import tabulate
import numpy as np

class MissingGroundTruthError(ValueError):
    '''The dataset carries no generative ground truth to score against.'''

class Table1Config(BaseModel):
    model_config=ConfigDict(extra='forbid',frozen=True)

    n_list:tuple[int,...]=Field(default=N_LIST,description="Numbers of subjects to simulate")
    seeds:tuple[int,...]=Field(default=SEEDS)
    models:tuple[str,...]=Field(default=MODELS)
    representations:tuple[str,...]=Field(default=REPRESENTATIONS)
    sim:SimConfig=Field(default_factory=SimConfig,description="Base simulation; n_subjects and seed are set per row")
    transformer:TransformerConfig=Field(default_factory=TransformerConfig.desk)
    n_folds:int=Field(default=N_FOLDS,ge=2)
    n_lambda:int=Field(default=N_LAMBDA,ge=1)

    @field_validator('models')
    @classmethod
    def check_models(cls,models:tuple[str,...])->tuple[str,...]:
        unknown=[name for name in models if name not in MODELS]
        if unknown:
            raise ValueError(f"Unknown models {unknown}, available: {list(MODELS)}")
        return models

    @field_validator('representations')
    @classmethod
    def check_representations(cls,representations:tuple[str,...])->tuple[str,...]:
        unknown=[name for name in representations if name not in REPRESENTATIONS]
        if unknown:
            raise ValueError(f"Unknown representations {unknown}, available: {list(REPRESENTATIONS)}")
        return representations

    @field_validator('n_list')
    @classmethod
    def check_sizes(cls,n_list:tuple[int,...])->tuple[int,...]:
        if not n_list or any(n<=0 for n in n_list):
            raise ValueError(f"n_list must hold positive subject counts, got {n_list}")
        return n_list

    def config_hash(self)->str:
        return config_digest(self)

class AblationConfig(BaseModel):
    model_config=ConfigDict(extra='forbid',frozen=True)

    q:float=Field(default=ABLATION_Q,gt=0.0,lt=1.0,description="Fraction of (t, d) cells masked")
    model:Literal['sparse_logistic','transformer','cbm']=SPARSE_LOGISTIC
    method:Literal['integrated_gradients','occlusion']=INTEGRATED_GRADIENTS
    n_steps:int=Field(default=N_STEPS,ge=1)
    window:int=Field(default=OCCLUSION_WINDOW,ge=1)
    n_samples:int=Field(default=ABLATION_SAMPLES,ge=1,description="Validation subjects attributed")
    transformer:TransformerConfig=Field(default_factory=TransformerConfig.desk)
    n_folds:int=Field(default=N_FOLDS,ge=2)
    n_lambda:int=Field(default=N_LAMBDA,ge=1)
    seed:int=Field(default=0,ge=0,lt=2**64)

    def config_hash(self)->str:
        return config_digest(self)

@dataclass(frozen=True)
class MachineDescriptor:
    platform:str
    python:str
    processor:str
    cpu_count:int
    memory_gb:float

@dataclass
class Table1Row:
    representation:str
    model:str
    n_subjects:int
    seed:int
    config_hash:str
    in_sample_acc:Optional[float]=None
    out_sample_acc:Optional[float]=None
    train_time_s:Optional[float]=None
    n_active_features:Optional[int]=None
    n_splits:Optional[int]=None
    intervention_acc:Optional[float]=None
    error:Optional[str]=None

    @property
    def is_success(self)->bool:
        return self.error is None

    def to_dict(self)->dict:
        return asdict(self)

@dataclass(frozen=True)
class AblationRecord:
    q:float
    model:str
    method:str
    n_masked_cells:int
    n_random_cells:int
    base_accuracy:float
    guided_accuracy:float
    random_accuracy:float
    seed:int
    config_hash:str

    @property
    def guided_drop(self)->float:
        return self.base_accuracy-self.guided_accuracy

    @property
    def random_drop(self)->float:
        return self.base_accuracy-self.random_accuracy

    @property
    def gap(self)->float:
        '''Guided minus random accuracy drop; positive when attributions found cells the model relied on.'''
        return self.guided_drop-self.random_drop

    def to_dict(self)->dict:
        return asdict(self)|{'guided_drop':self.guided_drop,'random_drop':self.random_drop,'gap':self.gap}

@dataclass(frozen=True)
class FaithfulnessScore:
    status:str
    method:str
    n_samples:int
    k:int
    precision_at_k:Optional[float]=None
    base_rate:Optional[float]=None
    shuffled_precision:Optional[float]=None
    rank_correlation:Optional[float]=None
    per_sample_precision:list[float]=field(default_factory=list)

    @property
    def has_signal(self)->bool:
        return self.status==OK

    def to_dict(self)->dict:
        return asdict(self)

@dataclass(frozen=True)
class StabilityRecord:
    representation:str
    seed:int
    n_subjects:int
    active_sizes:list[int]
    overlap:int
    sign_agreement:float
    intersection:list[str]

    @classmethod
    def from_report(cls,report:OverlapReport,seed:int,n_subjects:int)->'StabilityRecord':
        return cls(representation=report.representation,seed=seed,n_subjects=n_subjects,active_sizes=report.active_sizes,
            overlap=report.overlap,sign_agreement=report.sign_agreement,intersection=report.intersection_names())

    def to_dict(self)->dict:
        return asdict(self)

def _percent(value:Optional[float])->str:
    return '' if value is None or np.isnan(value) else f'{100*value:.1f}%'

@dataclass
class EvalReport:
    '''Everything an evaluation run measured, plus where it ran.'''
    machine:MachineDescriptor
    suite:str
    config:dict=field(default_factory=dict)
    rows:list[Table1Row]=field(default_factory=list)
    ablations:list[AblationRecord]=field(default_factory=list)
    faithfulness:list[FaithfulnessScore]=field(default_factory=list)
    stability:list[StabilityRecord]=field(default_factory=list)

    def table1(self)->str:
        '''Text table of the benchmark grid: data, model, samples, accuracies and training time.'''
        ordered=sorted(self.rows,key=lambda row:(row.representation,row.model,row.n_subjects,row.seed))
        table=[]
        for row in ordered:
            if row.error is not None:
                table.append([row.representation,row.model,row.n_subjects,row.seed,'','','',f'error: {row.error}'])
                continue
            size=row.n_active_features if row.n_active_features is not None else row.n_splits
            table.append([row.representation,row.model,row.n_subjects,row.seed,_percent(row.in_sample_acc),
                _percent(row.out_sample_acc),f'{row.train_time_s:.2f}','' if size is None else size])
        return tabulate(table,headers=['Data','Model','Samples','Seed','In-sample','Out-of-sample','Train (s)',
            'Features / splits'],tablefmt='github')

    def ablation_table(self)->str:
        table=[[record.model,record.method,record.q,record.n_masked_cells,_percent(record.base_accuracy),
            _percent(record.guided_accuracy),_percent(record.random_accuracy),f'{record.gap:+.3f}']
            for record in self.ablations]
        return tabulate(table,headers=['Model','Method','q','Cells','Unmasked','Guided','Random','Gap'],tablefmt='github')

    def faithfulness_table(self)->str:
        table=[[score.method,score.status,score.n_samples,score.k,_percent(score.precision_at_k),
            _percent(score.base_rate),_percent(score.shuffled_precision),
            '' if score.rank_correlation is None else f'{score.rank_correlation:.3f}'] for score in self.faithfulness]
        return tabulate(table,headers=['Method','Status','Samples','k','Precision@k','Base rate','Shuffled',
            'Spearman vs occlusion'],tablefmt='github')

    def stability_table(self)->str:
        table=[[record.representation,record.seed,record.n_subjects,' / '.join(map(str,record.active_sizes)),
            record.overlap] for record in self.stability]
        return tabulate(table,headers=['Data','Seed','Samples','Active per half','Overlap'],tablefmt='github')

    def render(self)->str:
        sections=[]
        if self.rows:
            sections.append(self.table1())
        if self.ablations:
            sections.append(self.ablation_table())
        if self.faithfulness:
            sections.append(self.faithfulness_table())
        if self.stability:
            sections.append(self.stability_table())
        machine=self.machine
        sections.append(f'Machine: {machine.platform}, {machine.processor or "unknown CPU"}, {machine.cpu_count} CPUs, '
            f'{machine.memory_gb:.1f} GB, Python {machine.python}')
        return '\n\n'.join(sections)

    def to_dict(self)->dict:
        return {
            'suite':self.suite,
            'machine':asdict(self.machine),
            'config':self.config,
            'rows':[row.to_dict() for row in self.rows],
            'ablations':[record.to_dict() for record in self.ablations],
            'faithfulness':[score.to_dict() for score in self.faithfulness],
            'stability':[record.to_dict() for record in self.stability],
        }

    @classmethod
    def from_dict(cls,document:dict)->'EvalReport':
        ablations=[{key:value for key,value in record.items() if key not in ('guided_drop','random_drop','gap')}
            for record in document.get('ablations',[])]
        return cls(machine=MachineDescriptor(**document['machine']),suite=document['suite'],
            config=document.get('config',{}),rows=[Table1Row(**row) for row in document.get('rows',[])],
            ablations=[AblationRecord(**record) for record in ablations],
            faithfulness=[FaithfulnessScore(**score) for score in document.get('faithfulness',[])],
            stability=[StabilityRecord(**record) for record in document.get('stability',[])])
