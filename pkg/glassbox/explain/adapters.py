from glassbox.interpretable.views import SparseLogisticFit
from glassbox.features.views import FeatureMatrix
from glassbox.features.config import RAW
from scipy.special import expit
import numpy as np

class GlassboxTrajectoryModel:
    '''
    A sparse logistic fit on the raw representation seen as a trajectory model, so the same attribution and
    ablation code runs on glass-box and transformer models. Inputs are (N, T, D) in the standardized units of
    the raw feature matrix; the gradient is analytic.
    '''
    def __init__(self,fit:SparseLogisticFit,n_timepoints:int,n_species:int):
        if fit.n_features!=n_timepoints*n_species:
            raise ValueError(f"Fit has P={fit.n_features} coefficients, expected T*D={n_timepoints*n_species}")
        self.fit=fit
        self.n_timepoints=n_timepoints
        self.n_species=n_species
        self.weights=fit.beta.reshape(n_timepoints,n_species)

    @classmethod
    def from_matrix(cls,fit:SparseLogisticFit,matrix:FeatureMatrix,n_timepoints:int,n_species:int)->'GlassboxTrajectoryModel':
        if matrix.representation!=RAW:
            raise ValueError("GlassboxTrajectoryModel needs a fit on the raw representation")
        return cls(fit,n_timepoints,n_species)

    def _probability(self,Z:np.ndarray)->np.ndarray:
        Z=np.asarray(Z,dtype=np.float64)
        return expit(self.fit.intercept+np.einsum('ntd,td->n',Z,self.weights))

    def score(self,Z:np.ndarray,target:int|np.ndarray=1)->np.ndarray:
        p=self._probability(Z)
        return np.where(np.broadcast_to(np.asarray(target),p.shape)==1,p,1.0-p)

    def score_and_gradient(self,Z:np.ndarray,target:int|np.ndarray=1)->tuple[np.ndarray,np.ndarray]:
        p=self._probability(Z)
        signs=np.where(np.broadcast_to(np.asarray(target),p.shape)==1,1.0,-1.0)
        scores=np.where(signs>0,p,1.0-p)
        gradient=(signs*p*(1.0-p))[:,None,None]*self.weights[None]
        return scores,gradient
