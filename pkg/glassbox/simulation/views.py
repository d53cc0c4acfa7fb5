from glassbox.simulation.config import (N_SUBJECTS, N_TIMEPOINTS, N_SPECIES, N_COMMUNITIES, LAMBDA_U,
LAMBDA_BLOOM, LAMBDA_THETA, TUKEY_BANDWIDTH, TUKEY_WINDOW, N_CLUSTERS, N_DISEASE_CLUSTERS,
CONCEPT_THRESHOLD, NOISE_HIGH, KIND_PROBS, SEED)
from glassbox.simulation.utils import config_digest
from pydantic import BaseModel, ConfigDict, Field, model_validator
from dataclasses import dataclass, field
from typing import Optional
from tabulate import tabulate
from enum import IntEnum
import numpy as np

class TrajectoryKind(IntEnum):
    NOISE=0
    INCREASE=1
    DECREASE=2
    BLOOM=3

class Split:
    TRAIN='train'
    VAL='val'

class SimConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    n_subjects: int = Field(N_SUBJECTS, gt=0, description="Number of subjects N")
    n_timepoints: int = Field(N_TIMEPOINTS, gt=0, description="Number of timepoints T")
    n_species: int = Field(N_SPECIES, gt=0, description="Number of species D")
    n_communities: int = Field(N_COMMUNITIES, gt=0, description="Number of latent community trajectories K")
    lambda_u: float = Field(LAMBDA_U, gt=0, description="Dirichlet concentration of the increase/decrease jumps")
    tukey_bandwidth: float = Field(TUKEY_BANDWIDTH, ge=0, le=1, description="Taper fraction r of the bloom window")
    tukey_window: int = Field(TUKEY_WINDOW, gt=0, description="Bloom window length L (odd)")
    lambda_bloom: float = Field(LAMBDA_BLOOM, gt=0, description="Expected number of blooms per bloom column")
    lambda_theta: float = Field(LAMBDA_THETA, gt=0, description="Dirichlet concentration of the mixture weights")
    n_clusters: int = Field(N_CLUSTERS, gt=0, description="Number of k-means clusters over theta")
    n_disease_clusters: int = Field(N_DISEASE_CLUSTERS, ge=0, description="Number of clusters labelled disease")
    concept_threshold: float = Field(CONCEPT_THRESHOLD, gt=0, lt=1, description="theta threshold t defining concepts")
    noise_high: float = Field(NOISE_HIGH, gt=0, description="Upper bound of the uniform noise columns")
    kind_probs: tuple[float, float, float, float] = Field(KIND_PROBS, description="Probabilities of noise/increase/decrease/bloom columns")
    seed: int = Field(SEED, ge=0, lt=2**64, description="Master seed")

    @model_validator(mode='after')
    def check_consistency(self):
        if any(p < 0 for p in self.kind_probs) or abs(sum(self.kind_probs)-1.0) > 1e-9:
            raise ValueError(f"kind_probs must be nonnegative and sum to 1, got {self.kind_probs}")
        if self.n_disease_clusters > self.n_clusters:
            raise ValueError(f"n_disease_clusters ({self.n_disease_clusters}) exceeds n_clusters ({self.n_clusters})")
        if self.tukey_window % 2 == 0:
            raise ValueError(f"tukey_window must be odd, got {self.tukey_window}")
        if self.n_timepoints <= self.tukey_window:
            raise ValueError(f"n_timepoints ({self.n_timepoints}) must exceed tukey_window ({self.tukey_window})")
        return self

    def config_hash(self) -> str:
        return config_digest(self)

@dataclass(frozen=True)
class TrajectoryDictionary:
    entries:np.ndarray
    kinds:np.ndarray
    bloom_centers:list[tuple[int,int,int]]=field(default_factory=list)

    @property
    def n_communities(self)->int:
        return self.entries.shape[0]

    @property
    def n_timepoints(self)->int:
        return self.entries.shape[1]

    @property
    def n_species(self)->int:
        return self.entries.shape[2]

    def kind_counts(self)->dict[str,int]:
        return {kind.name.lower(): int(np.sum(self.kinds==kind)) for kind in TrajectoryKind}

@dataclass(frozen=True)
class GroundTruth:
    '''Generative bookkeeping needed to score explanations: mixture weights, column kinds, bloom centers and clusters.'''
    theta:np.ndarray
    dictionary:TrajectoryDictionary
    cluster_id:np.ndarray
    disease_clusters:tuple[int,...]
    tukey_window:int
    concept_threshold:float

    def truth_mask(self, subject:int)->np.ndarray:
        '''
        Cells (t, d) of subject's trajectory that carry generative signal.

        A cell is in the mask when it belongs to a non-noise column of a community whose weight exceeds the
        concept threshold. For bloom columns only the window around each recorded bloom center counts.
        '''
        T,D=self.dictionary.n_timepoints,self.dictionary.n_species
        mask=np.zeros((T,D),dtype=bool)
        half=(self.tukey_window-1)//2
        active=np.flatnonzero(self.theta[subject]>self.concept_threshold)
        for k in active:
            kinds=self.dictionary.kinds[k]
            trend_columns=(kinds==TrajectoryKind.INCREASE)|(kinds==TrajectoryKind.DECREASE)
            mask[:,trend_columns]=True
        active_set=set(int(k) for k in active)
        for k,d,center in self.dictionary.bloom_centers:
            if k in active_set:
                mask[max(center-half,0):min(center+half+1,T),d]=True
        return mask

@dataclass(frozen=True)
class DatasetSummary:
    n_subjects:int
    n_timepoints:int
    n_species:int
    n_communities:int
    disease_fraction:float
    n_train:int
    n_val:int
    kind_counts:dict[str,int]

    def to_string(self)->str:
        rows=[
            ['Subjects (N)',self.n_subjects],
            ['Timepoints (T)',self.n_timepoints],
            ['Species (D)',self.n_species],
            ['Communities (K)',self.n_communities],
            ['Disease fraction',f'{self.disease_fraction:.3f}'],
            ['Train / Val',f'{self.n_train} / {self.n_val}'],
        ]
        rows.extend([[f'Columns: {kind}',count] for kind,count in self.kind_counts.items()])
        return tabulate(rows,headers=['Quantity','Value'],tablefmt='simple')

@dataclass(frozen=True)
class SubjectDataset:
    X:np.ndarray
    y:np.ndarray
    concepts:np.ndarray
    split:np.ndarray
    config:SimConfig
    ground_truth:Optional[GroundTruth]=None

    @property
    def n_subjects(self)->int:
        return self.X.shape[0]

    @property
    def n_timepoints(self)->int:
        return self.X.shape[1]

    @property
    def n_species(self)->int:
        return self.X.shape[2]

    @property
    def theta(self)->np.ndarray|None:
        return self.ground_truth.theta if self.ground_truth else None

    @property
    def cluster_id(self)->np.ndarray|None:
        return self.ground_truth.cluster_id if self.ground_truth else None

    @property
    def train_mask(self)->np.ndarray:
        return self.split==Split.TRAIN

    @property
    def val_mask(self)->np.ndarray:
        return self.split==Split.VAL

    def reconstruct(self)->np.ndarray:
        '''Rebuild X from the stored mixture weights and dictionary.'''
        if self.ground_truth is None:
            raise ValueError("Dataset has no ground truth to reconstruct from")
        return np.einsum('nk,ktd->ntd',self.ground_truth.theta,self.ground_truth.dictionary.entries)

    def subset(self,index:np.ndarray)->'SubjectDataset':
        index=np.asarray(index)
        truth=self.ground_truth
        if truth is not None:
            truth=GroundTruth(
                theta=truth.theta[index],dictionary=truth.dictionary,cluster_id=truth.cluster_id[index],
                disease_clusters=truth.disease_clusters,tukey_window=truth.tukey_window,
                concept_threshold=truth.concept_threshold
            )
        return SubjectDataset(X=self.X[index],y=self.y[index],concepts=self.concepts[index],
            split=self.split[index],config=self.config,ground_truth=truth)

    def summary(self)->DatasetSummary:
        kind_counts=self.ground_truth.dictionary.kind_counts() if self.ground_truth else {}
        return DatasetSummary(
            n_subjects=self.n_subjects,
            n_timepoints=self.n_timepoints,
            n_species=self.n_species,
            n_communities=self.concepts.shape[1],
            disease_fraction=float(np.mean(self.y)) if self.n_subjects else 0.0,
            n_train=int(self.train_mask.sum()),
            n_val=int(self.val_mask.sum()),
            kind_counts=kind_counts
        )
