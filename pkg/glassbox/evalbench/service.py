from glassbox.evalbench.config import (SPARSE_LOGISTIC, TREE, CBM, SEQUENCE_MODELS, TOP_K,
N_SHUFFLES, NO_SIGNAL, OK)
from glassbox.evalbench.views import (Table1Config, AblationConfig, Table1Row, AblationRecord, FaithfulnessScore,
StabilityRecord, EvalReport, MachineDescriptor, MissingGroundTruthError)
from glassbox.interpretable import cv_lambda_path, fit_tree, MajorityClassifier, accuracy, stability_overlap
from glassbox.explain import Attribution, TrajectoryModel, GlassboxTrajectoryModel, explain_samples
from glassbox.transformer import TransformerConfig, train
from glassbox.simulation import SimConfig, SubjectDataset, simulate
from glassbox.simulation.utils import make_rng
from glassbox.features import featurize
from glassbox.features.config import RAW, FEATURIZED
from glassbox.interpretable.config import N_FOLDS, N_LAMBDA
from dataclasses import dataclass, replace
from typing import Callable
from scipy.stats import spearmanr
import numpy as np
import platform
import hashlib
import logging
import psutil
import time

logger = logging.getLogger(__name__)

def machine_descriptor()->MachineDescriptor:
    return MachineDescriptor(platform=platform.platform(),python=platform.python_version(),
        processor=platform.processor(),cpu_count=psutil.cpu_count(logical=True) or 1,
        memory_gb=psutil.virtual_memory().total/2**30)

def _row_hash(config:Table1Config, sim:SimConfig, model:str, representation:str)->str:
    return hashlib.sha256(f'{config.config_hash()}:{sim.config_hash()}:{model}:{representation}'.encode('utf-8')).hexdigest()

def _fit_glassbox(dataset:SubjectDataset, representation:str, model:str, config:Table1Config, row:Table1Row):
    matrix=featurize(dataset,representation)
    train_mask,val_mask=dataset.train_mask,dataset.val_mask
    X_train,y_train=matrix.values[train_mask],dataset.y[train_mask]
    start=time.perf_counter()
    if model==SPARSE_LOGISTIC:
        fit=cv_lambda_path(X_train,y_train,n_folds=config.n_folds,n_lambda=config.n_lambda,seed=row.seed,
            feature_names=matrix.feature_names)
    elif model==TREE:
        fit=fit_tree(X_train,y_train,seed=row.seed,feature_names=matrix.feature_names)
    else:
        fit=MajorityClassifier.fit(X_train,y_train)
    row.train_time_s=time.perf_counter()-start
    row.in_sample_acc=accuracy(fit,X_train,y_train)
    row.out_sample_acc=accuracy(fit,matrix.values[val_mask],dataset.y[val_mask])
    if model==SPARSE_LOGISTIC:
        row.n_active_features=fit.n_active
    elif model==TREE:
        row.n_splits=fit.n_splits

def _fit_sequence(dataset:SubjectDataset, model:str, config:Table1Config, row:Table1Row):
    trained=train('cbm' if model==CBM else 'plain',dataset,config.transformer.model_copy(update={'seed':row.seed}))
    train_mask,val_mask=dataset.train_mask,dataset.val_mask
    row.train_time_s=trained.train_seconds
    row.in_sample_acc=trained.accuracy(dataset.X[train_mask],dataset.y[train_mask])
    row.out_sample_acc=trained.accuracy(dataset.X[val_mask],dataset.y[val_mask])
    if model==CBM:
        oracle=trained.oracle_concept_logits(dataset.concepts[val_mask])
        logits=trained.intervene(dataset.X[val_mask],overrides=oracle)
        row.intervention_acc=float(np.mean((logits>=0.0)==dataset.y[val_mask]))

def fit_row(dataset:SubjectDataset, representation:str, model:str, config:Table1Config, seed:int)->Table1Row:
    '''
    Fit one (representation, model) pair on the training split and measure it. Failures are recorded on the row
    instead of raised.
    '''
    row=Table1Row(representation=representation,model=model,n_subjects=dataset.n_subjects,seed=seed,
        config_hash=_row_hash(config,dataset.config,model,representation))
    try:
        if model in SEQUENCE_MODELS:
            if representation!=RAW:
                raise ValueError(f"{model} consumes the raw token representation, not '{representation}'")
            _fit_sequence(dataset,model,config,row)
        else:
            _fit_glassbox(dataset,representation,model,config,row)
        logger.info(f"[Eval] {representation}/{model} N={row.n_subjects} seed={seed}: "
            f"in {row.in_sample_acc:.3f}, out {row.out_sample_acc:.3f}, {row.train_time_s:.2f}s")
    except Exception as error:
        row.error=f'{type(error).__name__}: {error}'
        logger.warning(f"[Eval] {representation}/{model} N={row.n_subjects} seed={seed} failed: {row.error}")
    return row

def run_table1(config:Table1Config|None=None)->EvalReport:
    '''Simulate every (seed, N), then fit and score each requested model on each representation.'''
    config=config or Table1Config()
    report=EvalReport(machine=machine_descriptor(),suite='table1',config=config.model_dump(mode='json'))
    for seed in config.seeds:
        for n_subjects in config.n_list:
            dataset=simulate(config.sim.model_copy(update={'n_subjects':n_subjects,'seed':seed}))
            for representation in config.representations:
                for model in config.models:
                    if model in SEQUENCE_MODELS and representation!=RAW:
                        continue
                    report.rows.append(fit_row(dataset,representation,model,config,seed))
    failed=sum(not row.is_success for row in report.rows)
    if failed:
        logger.warning(f"[Eval] {failed} of {len(report.rows)} rows failed")
    return report

@dataclass
class FittedLearner:
    '''A model retrained by the ablation benchmark, seen through the trajectory-model interface.'''
    model:TrajectoryModel
    standardize:Callable[[np.ndarray],np.ndarray]
    accuracy:Callable[[np.ndarray,np.ndarray],float]

Learner=Callable[[SubjectDataset],FittedLearner]

def sparse_logistic_learner(n_folds:int=N_FOLDS, n_lambda:int=N_LAMBDA, seed:int=0)->Learner:
    '''Cross-validated sparse logistic regression on the standardized raw representation.'''
    def fit(dataset:SubjectDataset)->FittedLearner:
        matrix=featurize(dataset,RAW)
        train_mask=dataset.train_mask
        logistic=cv_lambda_path(matrix.values[train_mask],dataset.y[train_mask],n_folds=n_folds,n_lambda=n_lambda,
            seed=seed,feature_names=matrix.feature_names)
        standardization=matrix.standardization
        def standardize(X:np.ndarray)->np.ndarray:
            X=np.asarray(X,dtype=np.float64)
            return standardization.apply(X.reshape(len(X),-1)).reshape(X.shape)
        def score(X:np.ndarray,y:np.ndarray)->float:
            return accuracy(logistic,standardize(X).reshape(len(X),-1),y)
        return FittedLearner(model=GlassboxTrajectoryModel(logistic,dataset.n_timepoints,dataset.n_species),
            standardize=standardize,accuracy=score)
    return fit

def transformer_learner(config:TransformerConfig, mode:str='plain')->Learner:
    def fit(dataset:SubjectDataset)->FittedLearner:
        trained=train(mode,dataset,config)
        return FittedLearner(model=trained,standardize=trained.standardize,accuracy=trained.accuracy)
    return fit

def learner_for(config:AblationConfig)->Learner:
    if config.model==SPARSE_LOGISTIC:
        return sparse_logistic_learner(config.n_folds,config.n_lambda,config.seed)
    return transformer_learner(config.transformer.model_copy(update={'seed':config.seed}),
        'cbm' if config.model==CBM else 'plain')

def cell_importance(attributions:list[Attribution])->np.ndarray:
    '''Mean |attribution| per (t, d) cell.'''
    if not attributions:
        raise ValueError("cell_importance needs at least one attribution")
    return np.mean([np.abs(attribution.values) for attribution in attributions],axis=0)

def rank_cells(importance:np.ndarray, n_cells:int, rng:np.random.Generator)->np.ndarray:
    '''Flat indices of the n_cells most important cells; ties are broken by a seeded permutation.'''
    flat=np.asarray(importance,dtype=np.float64).reshape(-1)
    shuffled=rng.permutation(flat.size)
    order=shuffled[np.argsort(-flat[shuffled],kind='stable')]
    return order[:n_cells]

def mask_cells(X:np.ndarray, cells:np.ndarray, fill:np.ndarray)->np.ndarray:
    '''Copy of X (N, T, D) with the given flat (t, d) cells replaced by fill[t, d] for every subject.'''
    T,D=X.shape[1:]
    masked=X.copy()
    t,d=np.unravel_index(np.asarray(cells,dtype=np.int64),(T,D))
    masked[:,t,d]=fill[t,d]
    return masked

def _masked_accuracy(dataset:SubjectDataset, learner:Learner, cells:np.ndarray, fill:np.ndarray)->float:
    masked=replace(dataset,X=mask_cells(dataset.X,cells,fill))
    refit=learner(masked)
    val_mask=masked.val_mask
    return refit.accuracy(masked.X[val_mask],masked.y[val_mask])

def ablation_benchmark(dataset:SubjectDataset, learner:Learner|None=None, config:AblationConfig|None=None,
    importance:np.ndarray|None=None)->AblationRecord:
    '''
    Mask the top-q fraction of (t, d) cells ranked by mean |attribution| over validation subjects, retrain from
    scratch on the masked data and compare the accuracy drop with a random mask of the same size. Masked cells
    take their training-mean value, the zero baseline in standardized units. A precomputed importance map skips
    the attribution step.
    '''
    config=config or AblationConfig()
    learner=learner or learner_for(config)
    T,D=dataset.n_timepoints,dataset.n_species
    val_mask=dataset.val_mask
    if not val_mask.any() or not dataset.train_mask.any():
        raise ValueError("ablation_benchmark needs both training and validation subjects")
    base=learner(dataset)
    base_accuracy=base.accuracy(dataset.X[val_mask],dataset.y[val_mask])
    if importance is None:
        subjects=np.flatnonzero(val_mask)[:config.n_samples]
        Z=base.standardize(dataset.X[subjects])
        attributions=explain_samples(base.model,Z,list(range(len(subjects))),config.method,
            n_steps=config.n_steps,window=config.window)
        importance=cell_importance(attributions)
    elif np.shape(importance)!=(T,D):
        raise ValueError(f"Importance map has shape {np.shape(importance)}, expected {(T,D)}")
    n_cells=int(round(config.q*T*D))
    guided=rank_cells(importance,n_cells,make_rng(config.seed,'ablation-ties'))
    random_cells=make_rng(config.seed,'ablation-random').choice(T*D,size=n_cells,replace=False)
    if len(guided)!=len(random_cells):
        raise RuntimeError(f"Guided mask has {len(guided)} cells but random mask has {len(random_cells)}")
    fill=dataset.X[dataset.train_mask].mean(axis=0)
    guided_accuracy=_masked_accuracy(dataset,learner,guided,fill)
    random_accuracy=_masked_accuracy(dataset,learner,random_cells,fill)
    record=AblationRecord(q=config.q,model=config.model,method=config.method,n_masked_cells=len(guided),
        n_random_cells=len(random_cells),base_accuracy=base_accuracy,guided_accuracy=guided_accuracy,
        random_accuracy=random_accuracy,seed=config.seed,config_hash=config.config_hash())
    logger.info(f"[Eval] Ablation q={config.q} ({len(guided)} cells): unmasked {base_accuracy:.3f}, "
        f"guided {guided_accuracy:.3f}, random {random_accuracy:.3f}, gap {record.gap:+.3f}")
    return record

def precision_at_k(values:np.ndarray, truth:np.ndarray, k:int)->float:
    '''Fraction of the k largest-|value| cells that are truth cells.'''
    top=np.argsort(-np.abs(np.asarray(values)).reshape(-1),kind='stable')[:k]
    return float(np.mean(np.asarray(truth).reshape(-1)[top]))

def ground_truth_faithfulness(attributions:list[Attribution], dataset:SubjectDataset,
    occlusions:list[Attribution]|None=None, k:int=TOP_K, n_shuffles:int=N_SHUFFLES, seed:int=0)->FaithfulnessScore:
    '''
    Score attributions against the simulator's signal cells: mean precision@k over subjects with a nonempty
    truth mask, the truth-cell base rate, the precision of shuffled attributions and the mean Spearman
    correlation with occlusion drops of the same subjects. Attribution sample ids index the dataset.
    '''
    if dataset.ground_truth is None:
        raise MissingGroundTruthError("Faithfulness scoring needs a dataset with ground truth")
    if not attributions:
        raise ValueError("ground_truth_faithfulness needs at least one attribution")
    if k<1:
        raise ValueError(f"k must be positive, got {k}")
    method=attributions[0].method
    truths=[dataset.ground_truth.truth_mask(attribution.sample_id) for attribution in attributions]
    scored=[(attribution,truth) for attribution,truth in zip(attributions,truths) if truth.any()]
    if not scored:
        logger.warning("[Eval] No truth cells in any attributed subject; reporting no signal")
        return FaithfulnessScore(status=NO_SIGNAL,method=method,n_samples=len(attributions),k=k)
    k=min(k,truths[0].size)
    precisions=[precision_at_k(attribution.values,truth,k) for attribution,truth in scored]
    base_rate=float(np.mean([truth.mean() for _,truth in scored]))
    rng=make_rng(seed,'faithfulness-shuffles')
    shuffled=[precision_at_k(rng.permutation(attribution.values.reshape(-1)),truth,k)
        for attribution,truth in scored for _ in range(n_shuffles)]
    correlation=None
    if occlusions is not None:
        by_id={occlusion.sample_id:occlusion for occlusion in occlusions}
        correlations=[spearmanr(attribution.values.reshape(-1),by_id[attribution.sample_id].values.reshape(-1)).statistic
            for attribution in attributions if attribution.sample_id in by_id]
        correlations=[value for value in correlations if np.isfinite(value)]
        correlation=float(np.mean(correlations)) if correlations else None
    return FaithfulnessScore(status=OK,method=method,n_samples=len(scored),k=k,precision_at_k=float(np.mean(precisions)),
        base_rate=base_rate,shuffled_precision=float(np.mean(shuffled)) if shuffled else None,
        rank_correlation=correlation,per_sample_precision=precisions)

def run_stability(sim:SimConfig|None=None, seeds:tuple[int,...]=(0,), representations:tuple[str,...]=(RAW,FEATURIZED),
    n_folds:int=N_FOLDS, n_lambda:int=N_LAMBDA)->EvalReport:
    '''Active-set overlap between independent halves of the subjects, per seed and representation.'''
    sim=sim or SimConfig()
    report=EvalReport(machine=machine_descriptor(),suite='stability',
        config={'sim':sim.model_dump(mode='json'),'seeds':list(seeds),'representations':list(representations),
            'n_folds':n_folds,'n_lambda':n_lambda})
    for seed in seeds:
        dataset=simulate(sim.model_copy(update={'seed':seed}))
        for representation in representations:
            overlap=stability_overlap(dataset,representation,seed=seed,n_folds=n_folds,n_lambda=n_lambda)
            report.stability.append(StabilityRecord.from_report(overlap,seed,dataset.n_subjects))
    return report
