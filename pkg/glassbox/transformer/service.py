from glassbox.transformer.config import PLAIN, CBM, EVAL_BATCH_SIZE, ORACLE_LOGIT, FINAL_LAYER, INPUT_LAYER
from glassbox.transformer.layers import Encoder, TransformerClassifier, ConceptBottleneck, Module, scaled_dot_product
from glassbox.transformer.views import TransformerConfig, EpochLog, TrainingError
from glassbox.autodiff import Tensor, ops, backward, no_grad, Adam
from glassbox.features.views import Standardization
from glassbox.simulation.views import SubjectDataset
from glassbox.simulation.utils import make_rng
from sklearn.metrics import roc_auc_score
from dataclasses import dataclass, field
from scipy.special import expit
from typing import Mapping, Optional
import numpy as np
import logging
import time

logger = logging.getLogger(__name__)

def self_attention(X, W_q, W_k, W_v, mask:np.ndarray|None=None)->Tensor:
    '''
    Single-head attention softmax((X W_q)(X W_k)^T / sqrt(D_A)) (X W_v) over a T x D_in sequence (or a batch of
    them). mask is True where a score is excluded.
    '''
    X,W_q,W_k,W_v=(value if isinstance(value,Tensor) else Tensor(value) for value in (X,W_q,W_k,W_v))
    if W_q.shape!=W_k.shape:
        raise ValueError(f"self_attention: W_q {W_q.shape} and W_k {W_k.shape} must match")
    output,_=scaled_dot_product(ops.matmul(X,W_q),ops.matmul(X,W_k),ops.matmul(X,W_v),mask)
    return output

def build_model(config:TransformerConfig, mode:str=PLAIN, rng:np.random.Generator|None=None)->Module:
    rng=rng or make_rng(config.seed,'transformer-init')
    encoder=Encoder(config.n_embd,config.n_positions,config.n_layer,config.n_head,rng,causal=config.causal_mask)
    if mode==PLAIN:
        return TransformerClassifier(encoder,rng)
    if mode==CBM:
        return ConceptBottleneck(encoder,config.n_positions,config.n_concept,rng)
    raise ValueError(f"Unknown transformer mode '{mode}', expected '{PLAIN}' or '{CBM}'")

def forward_classifier(model:TransformerClassifier, X_batch)->Tensor:
    '''Class logits (B,) for a batch of B x T x n_embd tokens.'''
    return model(X_batch if isinstance(X_batch,Tensor) else Tensor(X_batch))

def forward_cbm(model:ConceptBottleneck, X_batch)->tuple[Tensor,Tensor]:
    '''Concept logits (B, K) and class logits (B,); the class path reads only the concept logits.'''
    return model(X_batch if isinstance(X_batch,Tensor) else Tensor(X_batch))

def fit_token_standardization(X:np.ndarray, train_mask:np.ndarray)->Standardization:
    '''Per-species mean and standard deviation over training subjects and all timepoints.'''
    reference=X[train_mask].reshape(-1,X.shape[-1]).astype(np.float64)
    mean,std=reference.mean(axis=0),reference.std(axis=0)
    return Standardization(mean=mean,std=std,zero_variance=std<=1e-12*np.maximum(1.0,np.abs(mean)))

def _concept_auc(concept_logits:np.ndarray, concepts:np.ndarray)->float:
    '''Mean ROC AUC over concepts that take both values.'''
    scores=[roc_auc_score(concepts[:,k],concept_logits[:,k]) for k in range(concepts.shape[1])
        if 0<concepts[:,k].sum()<concepts.shape[0]]
    return float(np.mean(scores)) if scores else float('nan')

def _resolve_overrides(overrides, N:int, K:int)->np.ndarray:
    '''Overrides as an (N, K) array with NaN meaning "keep the predicted value".'''
    resolved=np.full((N,K),np.nan)
    if overrides is None:
        return resolved
    if isinstance(overrides,Mapping):
        for k,value in overrides.items():
            if not 0<=k<K:
                raise ValueError(f"Concept index {k} out of range for K={K}")
            resolved[:,k]=value
        return resolved
    values=np.asarray(overrides,dtype=np.float64)
    if values.ndim==1:
        values=np.broadcast_to(values,(N,values.shape[0]))
    if values.shape[-1]!=K:
        raise ValueError(f"Concept overrides have {values.shape[-1]} columns, expected K={K}")
    return np.broadcast_to(values,(N,K)).copy()

def intervene_concepts(model:ConceptBottleneck, X, overrides=None, masked:list[int]|tuple[int,...]=())->np.ndarray:
    '''
    Class logits after editing the concept layer: override coordinates with supplied values (a {k: value} map or
    an (N, K) array where NaN keeps the prediction) and zero the masked concepts, then re-run only the head.
    '''
    if not isinstance(model,ConceptBottleneck):
        raise ValueError("intervene_concepts needs a concept bottleneck model")
    with no_grad():
        concept_logits=model.concepts(X if isinstance(X,Tensor) else Tensor(X)).data.astype(np.float64)
        N,K=concept_logits.shape
        resolved=_resolve_overrides(overrides,N,K)
        edited=np.where(np.isnan(resolved),concept_logits,resolved)
        for k in masked:
            if not 0<=k<K:
                raise ValueError(f"Concept index {k} out of range for K={K}")
            edited[:,k]=0.0
        return model.head(Tensor(edited)).data.astype(np.float64)

@dataclass
class TrainedTransformer:
    '''
    A trained plain or concept-bottleneck transformer plus the per-species token standardization it was trained
    with. Methods taking X expect raw (N, T, D) abundances; score and score_and_gradient work in standardized units.
    '''
    model:Module
    config:TransformerConfig
    mode:str
    standardization:Standardization
    log:list[EpochLog]=field(default_factory=list)
    concept_medians:Optional[np.ndarray]=None
    train_seconds:float=0.0

    def standardize(self,X:np.ndarray)->np.ndarray:
        return self.standardization.apply(np.asarray(X,dtype=np.float64)).astype(self.dtype)

    @property
    def dtype(self)->np.dtype:
        return self.model.parameters()[0].dtype

    def _batched(self,Z:np.ndarray,function)->list:
        with no_grad():
            return [function(Tensor(Z[start:start+EVAL_BATCH_SIZE],dtype=self.dtype))
                for start in range(0,Z.shape[0],EVAL_BATCH_SIZE)]

    def _logits_standardized(self,Z:np.ndarray)->np.ndarray:
        if self.mode==CBM:
            parts=self._batched(Z,lambda batch:self.model(batch)[1].data)
        else:
            parts=self._batched(Z,lambda batch:self.model(batch).data)
        return np.concatenate(parts).astype(np.float64) if parts else np.zeros(0)

    def logits(self,X:np.ndarray)->np.ndarray:
        return self._logits_standardized(self.standardize(X))

    def predict_proba(self,X:np.ndarray)->np.ndarray:
        return expit(self.logits(X))

    def concept_logits(self,X:np.ndarray)->np.ndarray:
        self._require_cbm()
        parts=self._batched(self.standardize(X),lambda batch:self.model.concepts(batch).data)
        return np.concatenate(parts).astype(np.float64)

    def hidden_states(self,X:np.ndarray,layer:str=FINAL_LAYER,standardized:bool=False)->np.ndarray:
        '''Per-token states (N, T, n_embd) at 'input', 'block_<i>' or 'final'.'''
        names=[INPUT_LAYER]+[f'block_{i}' for i in range(self.config.n_layer)]+[FINAL_LAYER]
        if layer not in names:
            raise ValueError(f"Unknown layer '{layer}', expected one of {names}")
        position=names.index(layer)
        encoder=self.model.encoder
        Z=np.asarray(X,dtype=self.dtype) if standardized else self.standardize(X)
        parts=self._batched(Z,lambda batch:encoder.hidden_states(batch)[position].data)
        return np.concatenate(parts).astype(np.float64)

    def score(self,Z:np.ndarray,target:int|np.ndarray=1)->np.ndarray:
        '''Probability of the target class for standardized inputs Z (N, T, D).'''
        p=expit(self._logits_standardized(np.asarray(Z,dtype=self.dtype)))
        target=np.broadcast_to(np.asarray(target),p.shape)
        return np.where(target==1,p,1.0-p)

    def score_and_gradient(self,Z:np.ndarray,target:int|np.ndarray=1)->tuple[np.ndarray,np.ndarray]:
        '''Target-class probabilities and their gradients with respect to standardized inputs Z.'''
        Z=np.asarray(Z,dtype=self.dtype)
        inputs=Tensor(Z,requires_grad=True,dtype=self.dtype)
        logits=self.model(inputs)[1] if self.mode==CBM else self.model(inputs)
        signs=np.where(np.broadcast_to(np.asarray(target),(Z.shape[0],))==1,1.0,-1.0)
        # p(target) = sigmoid(sign * logit)
        probabilities=ops.sigmoid(ops.mul(logits,Tensor(signs,dtype=self.dtype)))
        scores=probabilities.data.astype(np.float64)
        backward(ops.sum(probabilities))
        gradient=inputs.grad.astype(np.float64)
        self.model.zero_grad()
        return scores,gradient

    def intervene(self,X:np.ndarray,overrides=None,masked:list[int]|tuple[int,...]=())->np.ndarray:
        self._require_cbm()
        return intervene_concepts(self.model,Tensor(self.standardize(X),dtype=self.dtype),overrides,masked)

    def concept_auc(self,X:np.ndarray,concepts:np.ndarray)->float:
        return _concept_auc(self.concept_logits(X),np.asarray(concepts))

    def oracle_concept_logits(self,concepts:np.ndarray)->np.ndarray:
        '''Map binary concepts to the median training concept logit of subjects sharing that concept value.'''
        self._require_cbm()
        concepts=np.asarray(concepts,dtype=bool)
        medians=self.concept_medians
        return np.where(concepts,medians[1],medians[0])

    def accuracy(self,X:np.ndarray,y:np.ndarray)->float:
        return float(np.mean((self.predict_proba(X)>=0.5)==np.asarray(y)))

    def _require_cbm(self):
        if self.mode!=CBM:
            raise ValueError("Concept operations need a concept bottleneck model")

def compute_concept_medians(concept_logits:np.ndarray, concepts:np.ndarray)->np.ndarray:
    '''(2, K) medians of concept logits over negatives (row 0) and positives (row 1), falling back to -/+3.'''
    K=concept_logits.shape[1]
    medians=np.empty((2,K))
    for value,fallback in ((0,-ORACLE_LOGIT),(1,ORACLE_LOGIT)):
        for k in range(K):
            rows=concepts[:,k]==value
            medians[value,k]=np.median(concept_logits[rows,k]) if rows.any() else fallback
    return medians

def _loss(model:Module, mode:str, batch:Tensor, labels:np.ndarray, concepts:np.ndarray|None, cbm_lambda:float)->Tensor:
    if mode==CBM:
        concept_logits,class_logits=forward_cbm(model,batch)
        concept_loss=ops.binary_cross_entropy(concept_logits,concepts.astype(np.float64))
        return ops.add(concept_loss,ops.scale(ops.binary_cross_entropy(class_logits,labels),cbm_lambda))
    return ops.binary_cross_entropy(forward_classifier(model,batch),labels)

def _evaluate(trained:TrainedTransformer, Z:np.ndarray, y:np.ndarray, concepts:np.ndarray|None)->tuple[float,float,Optional[float]]:
    if Z.shape[0]==0:
        return float('nan'),float('nan'),None
    if trained.mode==CBM:
        parts=trained._batched(Z,lambda batch:[output.data for output in trained.model(batch)])
        concept_logits=np.concatenate([part[0] for part in parts]).astype(np.float64)
        logits=np.concatenate([part[1] for part in parts]).astype(np.float64)
    else:
        logits=trained._logits_standardized(Z)
    class_loss=float(np.mean(np.logaddexp(0.0,logits)-y*logits))
    accuracy=float(np.mean((logits>=0)==(y==1)))
    if trained.mode!=CBM:
        return class_loss,accuracy,None
    concept_loss=float(np.mean(np.logaddexp(0.0,concept_logits)-concepts*concept_logits))
    return concept_loss+trained.config.cbm_lambda*class_loss,accuracy,_concept_auc(concept_logits,concepts)

def train(mode:str, dataset:SubjectDataset, config:TransformerConfig|None=None, X:np.ndarray|None=None)->TrainedTransformer:
    '''
    Train a plain (class loss only) or concept-bottleneck (concept loss + cbm_lambda * class loss) transformer
    on the dataset's training split with Adam and seeded per-epoch shuffles.

    X replaces the dataset's trajectories (used by ablation retraining on masked copies).
    '''
    config=config or TransformerConfig(n_embd=dataset.n_species,n_positions=dataset.n_timepoints)
    X=dataset.X if X is None else np.asarray(X)
    N,T,D=X.shape
    if D!=config.n_embd:
        raise ValueError(f"Tokens have {D} species but n_embd={config.n_embd}")
    if T>config.n_positions:
        raise ValueError(f"Sequence length T={T} exceeds n_positions={config.n_positions}")
    if mode==CBM and dataset.concepts.shape[1]!=config.n_concept:
        raise ValueError(f"Dataset has {dataset.concepts.shape[1]} concepts but n_concept={config.n_concept}")
    train_index=np.flatnonzero(dataset.train_mask)
    val_index=np.flatnonzero(dataset.val_mask)
    if len(train_index)==0:
        raise ValueError("Training split is empty")
    model=build_model(config,mode)
    trained=TrainedTransformer(model=model,config=config,mode=mode,
        standardization=fit_token_standardization(X,dataset.train_mask))
    Z=trained.standardize(X)
    y=dataset.y.astype(np.float64)
    concepts=dataset.concepts.astype(np.float64) if mode==CBM else None
    optimizer=Adam(model.parameters(),lr=config.lr)
    shuffler=make_rng(config.seed,'transformer-batches')
    logger.info(f"[Trainer] Training {mode} transformer: {model.n_parameters()} parameters, {config.n_layer} layers, "
        f"{len(train_index)} train / {len(val_index)} val subjects, {config.epochs} epochs")
    started=time.perf_counter()
    for epoch in range(1,config.epochs+1):
        order=train_index[shuffler.permutation(len(train_index))]
        for batch_number,start in enumerate(range(0,len(order),config.batch_size)):
            rows=order[start:start+config.batch_size]
            optimizer.zero_grad()
            loss=_loss(model,mode,Tensor(Z[rows],dtype=trained.dtype),y[rows],
                None if concepts is None else concepts[rows],config.cbm_lambda)
            if not np.isfinite(loss.item()):
                raise TrainingError(f"Non-finite loss {loss.item()} at epoch {epoch}, batch {batch_number}")
            backward(loss)
            optimizer.step()
        train_loss,train_accuracy,_=_evaluate(trained,Z[train_index],y[train_index],
            None if concepts is None else concepts[train_index])
        val_loss,val_accuracy,val_auc=_evaluate(trained,Z[val_index],y[val_index],
            None if concepts is None else concepts[val_index])
        trained.log.append(EpochLog(epoch=epoch,train_loss=train_loss,train_accuracy=train_accuracy,val_loss=val_loss,
            val_accuracy=val_accuracy,val_concept_auc=val_auc))
        auc_text=f" concept AUC {val_auc:.3f}" if val_auc is not None else ''
        logger.info(f"[Trainer] epoch {epoch}/{config.epochs} train loss {train_loss:.4f} acc {train_accuracy:.3f} | "
            f"val loss {val_loss:.4f} acc {val_accuracy:.3f}{auc_text}")
    trained.train_seconds=time.perf_counter()-started
    if mode==CBM:
        trained.concept_medians=compute_concept_medians(trained.concept_logits(X[train_index]),
            dataset.concepts[train_index])
    return trained
