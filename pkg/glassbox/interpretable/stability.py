from glassbox.interpretable.config import N_FOLDS, N_LAMBDA
from glassbox.interpretable.views import SparseLogisticFit, OverlapReport
from glassbox.interpretable.logistic import cv_lambda_path
from glassbox.simulation.views import SubjectDataset
from glassbox.simulation.utils import make_rng
from glassbox.features.service import featurize
import numpy as np
import logging

logger = logging.getLogger(__name__)

def active_set_overlap(fits:list[SparseLogisticFit], representation:str, feature_names:list[str])->OverlapReport:
    active_sets=[fit.active_set.tolist() for fit in fits]
    intersection=sorted(set.intersection(*(set(active) for active in active_sets))) if active_sets else []
    if intersection:
        signs=np.sign(np.stack([fit.beta[intersection] for fit in fits]))
        sign_agreement=float(np.mean(np.all(signs==signs[0],axis=0)))
    else:
        sign_agreement=float('nan')
    return OverlapReport(representation=representation,active_sets=active_sets,intersection=intersection,
        sign_agreement=sign_agreement,feature_names=list(feature_names))

def stability_overlap(dataset:SubjectDataset, representation:str, n_splits:int=2, seed:int=0,
    partitions:list[np.ndarray]|None=None, n_folds:int=N_FOLDS, n_lambda:int=N_LAMBDA)->OverlapReport:
    '''
    Fit cross-validated sparse logistic regressions on disjoint parts of the subjects and compare their active
    sets. Each part is featurized and standardized on its own rows.
    '''
    if partitions is None:
        order=make_rng(seed,'stability').permutation(dataset.n_subjects)
        partitions=[np.sort(part) for part in np.array_split(order,n_splits)]
    fits=[]
    feature_names=[]
    for index in partitions:
        part=dataset.subset(index)
        matrix=featurize(part,representation,train_mask=np.ones(part.n_subjects,dtype=bool))
        fits.append(cv_lambda_path(matrix.values,part.y,n_folds=n_folds,n_lambda=n_lambda,seed=seed,
            feature_names=matrix.feature_names))
        feature_names=matrix.feature_names
    report=active_set_overlap(fits,representation,feature_names)
    logger.info(f"[Stability] {representation}: active sets {report.active_sizes}, overlap {report.overlap}")
    return report
