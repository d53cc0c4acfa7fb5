from glassbox.interpretable.config import (COORDINATE_TOLERANCE, MAX_SWEEPS, SATURATION_MARGIN, N_FOLDS, N_LAMBDA,
LAMBDA_MIN_RATIO)
from glassbox.interpretable.views import SparseLogisticFit
from sklearn.model_selection import StratifiedKFold
from scipy.special import expit
import numpy as np
import logging

logger = logging.getLogger(__name__)

def _check_inputs(features:np.ndarray, labels:np.ndarray)->tuple[np.ndarray,np.ndarray]:
    X=np.asarray(features,dtype=np.float64)
    y=np.asarray(labels,dtype=np.float64)
    if X.ndim!=2 or X.shape[0]!=y.shape[0]:
        raise ValueError(f"features {X.shape} and labels {y.shape} do not align")
    if not np.all((y==0)|(y==1)):
        raise ValueError("labels must be binary {0, 1}")
    return X,y

def negative_log_likelihood(eta:np.ndarray, y:np.ndarray)->float:
    # labels in {0,1}; equivalent to sum log(1 + exp(-s eta)) with s in {-1,+1}
    return float(np.sum(np.logaddexp(0.0,eta)-y*eta))

def objective(beta:np.ndarray, intercept:float, features:np.ndarray, labels:np.ndarray, lam:float)->float:
    '''Summed negative log-likelihood plus lam times the l1 norm of beta (intercept unpenalized).'''
    X,y=_check_inputs(features,labels)
    return negative_log_likelihood(intercept+X@beta,y)+lam*float(np.abs(beta).sum())

def smooth_gradient(beta:np.ndarray, intercept:float, features:np.ndarray, labels:np.ndarray)->np.ndarray:
    X,y=_check_inputs(features,labels)
    return X.T@(expit(intercept+X@beta)-y)

def kkt_violation(beta:np.ndarray, intercept:float, features:np.ndarray, labels:np.ndarray, lam:float)->float:
    '''Largest deviation from the l1 optimality conditions over all coordinates.'''
    gradient=smooth_gradient(beta,intercept,features,labels)
    zero=beta==0
    violation_zero=np.maximum(np.abs(gradient[zero])-lam,0.0)
    violation_active=np.abs(gradient[~zero]+lam*np.sign(beta[~zero]))
    return float(max(violation_zero.max(initial=0.0),violation_active.max(initial=0.0)))

def lambda_max(features:np.ndarray, labels:np.ndarray)->float:
    '''Smallest lam whose solution has every coefficient at zero.'''
    X,y=_check_inputs(features,labels)
    return float(np.max(np.abs(X.T@(y-y.mean()))))

def _soft_threshold(value:float, threshold:float)->float:
    if value>threshold:
        return value-threshold
    if value<-threshold:
        return value+threshold
    return 0.0

class CoordinateDescentSolver:
    '''
    Cyclic coordinate descent for l1-penalized logistic regression.

    Each coordinate takes a proximal Newton step and falls back to the step under the 1/4 curvature bound
    whenever the Newton step fails to decrease the objective, so every update is a descent step. Sweeps run
    over the active set until coefficient changes drop below tol, then a full gradient check admits any
    coordinate violating the optimality conditions.
    '''
    def __init__(self,features:np.ndarray,labels:np.ndarray,tol:float=COORDINATE_TOLERANCE,max_sweeps:int=MAX_SWEEPS):
        X,y=_check_inputs(features,labels)
        self.X=np.asfortranarray(X)
        self.y=y
        self.tol=tol
        self.max_sweeps=max_sweeps
        self.column_bound=0.25*np.sum(X**2,axis=0)

    def _coordinate_step(self,x:np.ndarray,bound:float,value:float,eta:np.ndarray,lam:float)->float:
        p=expit(eta)
        gradient=float(x@(p-self.y))
        curvature=float((x*x)@(p*(1.0-p)))
        current=negative_log_likelihood(eta,self.y)+lam*abs(value)
        if curvature>1e-12:
            candidate=_soft_threshold(curvature*value-gradient,lam)/curvature
            if negative_log_likelihood(eta+(candidate-value)*x,self.y)+lam*abs(candidate)<=current:
                return candidate
        if bound<=0:
            return value
        return _soft_threshold(bound*value-gradient,lam)/bound

    def solve(self,lam:float,beta:np.ndarray|None=None,intercept:float|None=None)->SparseLogisticFit:
        X,y=self.X,self.y
        P=X.shape[1]
        beta=np.zeros(P) if beta is None else np.array(beta,dtype=np.float64)
        if intercept is None:
            rate=np.clip(y.mean(),1e-12,1-1e-12)
            intercept=float(np.log(rate/(1-rate)))
        eta=intercept+X@beta
        ones=np.ones_like(y)
        active=set(np.flatnonzero(beta).tolist())
        converged=False
        n_sweeps=0
        while n_sweeps<self.max_sweeps:
            n_sweeps+=1
            new_intercept=self._coordinate_step(ones,0.25*len(y),intercept,eta,0.0)
            max_change=abs(new_intercept-intercept)
            eta+=new_intercept-intercept
            intercept=new_intercept
            for j in sorted(active):
                x=X[:,j]
                new_value=self._coordinate_step(x,self.column_bound[j],beta[j],eta,lam)
                change=new_value-beta[j]
                if change!=0.0:
                    eta+=change*x
                    beta[j]=new_value
                    max_change=max(max_change,abs(change))
            if lam==0 and np.max(np.abs(eta))>SATURATION_MARGIN:
                logger.warning(f"[SparseLogistic] Margins saturated at lambda={lam:.4g}; coefficients diverge (separable data)")
                break
            if max_change<self.tol:
                gradient=X.T@(expit(eta)-y)
                violators=np.flatnonzero((beta==0)&(np.abs(gradient)>lam*(1+1e-9)+1e-12))
                violators=[j for j in violators.tolist() if j not in active]
                if not violators:
                    converged=True
                    break
                active.update(violators)
        if not converged and n_sweeps>=self.max_sweeps:
            logger.warning(f"[SparseLogistic] No convergence after {n_sweeps} sweeps at lambda={lam:.4g}")
        return SparseLogisticFit(beta=beta,intercept=float(intercept),lam=float(lam),converged=converged,n_sweeps=n_sweeps)

def fit_sparse_logistic(features:np.ndarray, labels:np.ndarray, lam:float, beta_init:np.ndarray|None=None,
    intercept_init:float|None=None, tol:float=COORDINATE_TOLERANCE, max_sweeps:int=MAX_SWEEPS,
    feature_names:list[str]|None=None)->SparseLogisticFit:
    '''
    Minimize sum_i NLL(y_i | x_i, beta) + lam * ||beta||_1 with an unpenalized intercept.

    Returns the last iterate with converged=False when the sweep cap is hit or the margins saturate.
    '''
    if lam<0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    fit=CoordinateDescentSolver(features,labels,tol=tol,max_sweeps=max_sweeps).solve(lam,beta_init,intercept_init)
    fit.feature_names=feature_names
    return fit

def lambda_grid(features:np.ndarray, labels:np.ndarray, n_lambda:int=N_LAMBDA,
    min_ratio:float=LAMBDA_MIN_RATIO)->np.ndarray:
    return lambda_max(features,labels)*np.logspace(0.0,np.log10(min_ratio),n_lambda)

def fit_path(features:np.ndarray, labels:np.ndarray, grid:np.ndarray, tol:float=COORDINATE_TOLERANCE,
    max_sweeps:int=MAX_SWEEPS)->list[SparseLogisticFit]:
    '''Warm-started fits along a descending lambda grid.'''
    solver=CoordinateDescentSolver(features,labels,tol=tol,max_sweeps=max_sweeps)
    fits=[]
    beta,intercept=None,None
    for index,lam in enumerate(grid):
        fit=solver.solve(float(lam),beta,intercept)
        beta,intercept=fit.beta.copy(),fit.intercept
        fits.append(fit)
        logger.debug(f"[SparseLogistic] lambda[{index}]={lam:.4g} active={fit.n_active} sweeps={fit.n_sweeps}")
    return fits

def stratified_folds(labels:np.ndarray, n_folds:int, seed:int)->np.ndarray:
    fold_ids=np.empty(len(labels),dtype=np.int64)
    splitter=StratifiedKFold(n_splits=n_folds,shuffle=True,random_state=seed%(2**32))
    for fold,(_,val_index) in enumerate(splitter.split(np.zeros(len(labels)),labels)):
        fold_ids[val_index]=fold
    return fold_ids

def cv_lambda_path(features:np.ndarray, labels:np.ndarray, n_folds:int=N_FOLDS, n_lambda:int=N_LAMBDA,
    seed:int=0, fold_ids:np.ndarray|None=None, feature_names:list[str]|None=None,
    min_ratio:float=LAMBDA_MIN_RATIO, tol:float=COORDINATE_TOLERANCE)->SparseLogisticFit:
    '''
    Choose lam by n_folds-fold cross-validated accuracy over a log-spaced grid from lambda_max down to
    min_ratio * lambda_max, then return the full-data fit at that lam together with the whole path.
    Ties in mean accuracy go to the larger lam.
    '''
    X,y=_check_inputs(features,labels)
    if X.shape[0]<n_folds:
        raise ValueError(f"Need at least {n_folds} rows for {n_folds}-fold cross-validation, got {X.shape[0]}")
    grid=lambda_grid(X,y,n_lambda,min_ratio)
    if fold_ids is None:
        fold_ids=stratified_folds(y,n_folds,seed)
    folds=np.unique(fold_ids)
    accuracy=np.empty((len(folds),n_lambda))
    for row,fold in enumerate(folds):
        train,val=fold_ids!=fold,fold_ids==fold
        if len(np.unique(y[train]))<2 or not val.any():
            raise ValueError(f"degenerate fold {fold}: training part must contain both classes")
        for column,fit in enumerate(fit_path(X[train],y[train],grid,tol=tol)):
            accuracy[row,column]=np.mean((fit.predict_proba(X[val])>=0.5)==y[val])
    cv_mean=accuracy.mean(axis=0)
    cv_stderr=accuracy.std(axis=0,ddof=1)/np.sqrt(len(folds)) if len(folds)>1 else np.zeros(n_lambda)
    selected=int(np.flatnonzero(cv_mean==cv_mean.max())[0])
    path=fit_path(X,y,grid,tol=tol)
    chosen=path[selected]
    logger.info(f"[SparseLogistic] Selected lambda={grid[selected]:.4g} (index {selected}/{n_lambda}), "
        f"cv accuracy {cv_mean[selected]:.3f}, {chosen.n_active} active features")
    return SparseLogisticFit(beta=chosen.beta,intercept=chosen.intercept,lam=chosen.lam,converged=chosen.converged,
        n_sweeps=chosen.n_sweeps,feature_names=feature_names,lambda_path=grid,
        path_coefficients=np.stack([fit.beta for fit in path]),path_intercepts=np.array([fit.intercept for fit in path]),
        cv_mean=cv_mean,cv_stderr=cv_stderr,selected_index=selected)
