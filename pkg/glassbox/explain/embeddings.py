from glassbox.explain.config import (N_COMPONENTS, SPCA_TOL, SPCA_MAX_ITER, MEAN_POOLING, TOKEN_POOLING,
SPECIES_POOLING)
from glassbox.explain.views import EmbeddingSet, SparsePCAResult, ProbeStep
from glassbox.transformer.service import TrainedTransformer
import numpy as np
import logging

logger = logging.getLogger(__name__)

POOLINGS=(MEAN_POOLING,TOKEN_POOLING,SPECIES_POOLING)

def _default_layer(model:TrainedTransformer)->str:
    return f'block_{model.config.n_layer-1}'

def species_contribution(model:TrainedTransformer, X:np.ndarray, species:int, layer:str|None=None)->np.ndarray:
    '''
    Time-averaged change in the hidden state when species d's standardized channel is set to zero (its training
    mean): mean_t [h(z)_t - h(z with z[:, d] = 0)_t], an (N, n_embd) array.
    '''
    layer=layer or _default_layer(model)
    Z=model.standardize(X)
    if not 0<=species<Z.shape[-1]:
        raise ValueError(f"Species index {species} out of range for D={Z.shape[-1]}")
    masked=Z.copy()
    masked[:,:,species]=0.0
    full=model.hidden_states(Z,layer,standardized=True)
    without=model.hidden_states(masked,layer,standardized=True)
    return (full-without).mean(axis=1)

def extract_embeddings(model:TrainedTransformer, X:np.ndarray, layer:str|None=None, pooling:str=MEAN_POOLING,
    species:int|None=None, sample_ids:np.ndarray|None=None)->EmbeddingSet:
    '''
    Hidden states of a trained transformer at a named layer (default: output of the last block).

    pooling 'mean' averages over time (N x n_embd), 'none' keeps every token (N x T x n_embd) and 'species'
    returns the species contribution of `species` (N x n_embd).
    '''
    layer=layer or _default_layer(model)
    if pooling not in POOLINGS:
        raise ValueError(f"Unknown pooling '{pooling}', expected one of {list(POOLINGS)}")
    if pooling==SPECIES_POOLING:
        if species is None:
            raise ValueError("Species pooling needs a species index")
        vectors=species_contribution(model,X,species,layer)
    else:
        states=model.hidden_states(X,layer)
        vectors=states.mean(axis=1) if pooling==MEAN_POOLING else states
    sample_ids=np.arange(len(vectors)) if sample_ids is None else np.asarray(sample_ids)
    logger.debug(f"[Embeddings] {layer} ({pooling}): {vectors.shape}")
    return EmbeddingSet(layer=layer,pooling=pooling,vectors=vectors,sample_ids=sample_ids,species=species)

def _soft_threshold(u:np.ndarray, penalty:float)->np.ndarray:
    '''Shrink u by penalty * max|u|, keeping at least the largest coordinate.'''
    scale=np.max(np.abs(u))
    shrunk=np.sign(u)*np.maximum(np.abs(u)-penalty*scale,0.0)
    if not shrunk.any():
        shrunk=np.zeros_like(u)
        top=int(np.argmax(np.abs(u)))
        shrunk[top]=u[top]
    return shrunk

def _leading_loading(X:np.ndarray, penalty:float, tol:float, max_iter:int)->tuple[np.ndarray,bool]:
    '''L1-penalized power iteration on the covariance X^T X / (N-1), applied matrix-free.'''
    N=X.shape[0]
    # start at the covariance column with the largest norm: diag(S^2) = sum_i X_ij (X X^T X)_ij
    column_norms=np.einsum('ij,ij->j',X,(X@X.T)@X)
    v=np.zeros(X.shape[1])
    v[int(np.argmax(column_norms))]=1.0
    for _ in range(max_iter):
        u=X.T@(X@v)/(N-1)
        if not u.any():
            return v,True
        u=_soft_threshold(u,penalty)
        update=u/np.linalg.norm(u)
        change=np.linalg.norm(update-v)
        v=update
        if change<tol:
            return v,True
    return v,False

def sparse_pca(vectors:np.ndarray, n_components:int=N_COMPONENTS, sparsity_penalty:float=0.0, tol:float=SPCA_TOL,
    max_iter:int=SPCA_MAX_ITER)->SparsePCAResult:
    '''
    Sparse principal directions of the rows of `vectors` (flattened to N x P and centered).

    Each loading comes from power iteration on the covariance with a soft threshold of
    sparsity_penalty * max|u| applied before every renormalization (0 gives plain PCA); later loadings are found
    after removing the projection on earlier ones. Loadings are sorted by explained variance and signed so that
    their largest-magnitude entry is positive.
    '''
    X=np.asarray(vectors,dtype=np.float64)
    X=X.reshape(X.shape[0],-1)
    N,P=X.shape
    if N<2:
        raise ValueError(f"sparse_pca needs at least 2 rows, got {N}")
    if not 0<=sparsity_penalty<1:
        raise ValueError(f"sparsity_penalty must lie in [0, 1), got {sparsity_penalty}")
    if not 1<=n_components<=P:
        raise ValueError(f"n_components must lie in [1, P={P}], got {n_components}")
    X=X-X.mean(axis=0)
    total=float(np.sum(X**2)/(N-1))
    if total<=1e-300:
        raise ValueError("sparse_pca: degenerate covariance (zero variance input)")
    residual=X.copy()
    components=np.zeros((P,n_components))
    variances=np.zeros(n_components)
    converged=True
    for c in range(n_components):
        v,ok=_leading_loading(residual,sparsity_penalty,tol,max_iter)
        if not ok:
            logger.warning(f"[SparsePCA] component {c} did not converge in {max_iter} iterations")
        converged&=ok
        top=int(np.argmax(np.abs(v)))
        v=v if v[top]>=0 else -v
        components[:,c]=v
        projection=residual@v
        variances[c]=float(projection@projection/(N-1))
        residual=residual-np.outer(projection,v)
    order=np.argsort(-variances,kind='stable')
    components,variances=components[:,order],variances[order]
    return SparsePCAResult(components=components,scores=X@components,explained_variance=variances,
        total_variance=total,converged=converged)

def project(embeddings:EmbeddingSet, n_components:int=N_COMPONENTS, sparsity_penalty:float=0.0)->EmbeddingSet:
    return embeddings.with_projection(sparse_pca(embeddings.flat(),n_components,sparsity_penalty))

def interpolation_probe(embeddings:EmbeddingSet|np.ndarray, id_a:int, id_b:int, n_points:int=11)->list[ProbeStep]:
    '''
    Walk the segment between two embeddings in n_points equal steps and report, for every interpolant, the
    nearest dataset embedding (Euclidean, ties to the lower index) and its distance.
    '''
    vectors=embeddings.flat() if isinstance(embeddings,EmbeddingSet) else np.asarray(embeddings,dtype=np.float64)
    vectors=vectors.reshape(vectors.shape[0],-1)
    N=vectors.shape[0]
    for name,index in (('id_a',id_a),('id_b',id_b)):
        if not 0<=index<N:
            raise ValueError(f"{name}={index} out of range for {N} embeddings")
    if n_points<2:
        raise ValueError(f"n_points must be at least 2, got {n_points}")
    steps=[]
    for alpha in np.linspace(0.0,1.0,n_points):
        interpolant=(1.0-alpha)*vectors[id_a]+alpha*vectors[id_b]
        distances=np.linalg.norm(vectors-interpolant,axis=1)
        nearest=int(np.argmin(distances))
        steps.append(ProbeStep(alpha=float(alpha),interpolant=interpolant,nearest_id=nearest,distance=float(distances[nearest])))
    return steps
