from glassbox.interpretable.views import SparseLogisticFit, DecisionTreeFit, TreeNode, PruningStep, MajorityClassifier, OverlapReport
from glassbox.interpretable.logistic import fit_sparse_logistic, cv_lambda_path, lambda_max, objective, kkt_violation
from glassbox.interpretable.stability import stability_overlap, active_set_overlap
from glassbox.interpretable.base import FitModel, predict_proba, accuracy
from glassbox.interpretable.tree import fit_tree

__all__=[
    'FitModel',
    'SparseLogisticFit',
    'DecisionTreeFit',
    'TreeNode',
    'PruningStep',
    'MajorityClassifier',
    'OverlapReport',
    'fit_sparse_logistic',
    'cv_lambda_path',
    'lambda_max',
    'objective',
    'kkt_violation',
    'fit_tree',
    'predict_proba',
    'accuracy',
    'stability_overlap',
    'active_set_overlap'
]
