from glassbox.interpretable.base import check_dimension
from dataclasses import dataclass, field
from scipy.special import expit
from typing import Optional
import numpy as np

@dataclass
class SparseLogisticFit:
    beta:np.ndarray
    intercept:float
    lam:float
    converged:bool=True
    n_sweeps:int=0
    feature_names:Optional[list[str]]=None
    lambda_path:Optional[np.ndarray]=None
    path_coefficients:Optional[np.ndarray]=None
    path_intercepts:Optional[np.ndarray]=None
    cv_mean:Optional[np.ndarray]=None
    cv_stderr:Optional[np.ndarray]=None
    selected_index:Optional[int]=None

    @property
    def n_features(self)->int:
        return self.beta.shape[0]

    @property
    def active_set(self)->np.ndarray:
        return np.flatnonzero(self.beta!=0)

    @property
    def n_active(self)->int:
        return int(np.count_nonzero(self.beta))

    def decision_function(self,features:np.ndarray)->np.ndarray:
        features=check_dimension(features,self.n_features)
        return self.intercept+features@self.beta

    def predict_proba(self,features:np.ndarray)->np.ndarray:
        return expit(self.decision_function(features))

    def coefficient_table(self)->list[tuple[str,float]]:
        names=self.feature_names or [f'x{j}' for j in range(self.n_features)]
        return [(names[j],float(self.beta[j])) for j in self.active_set]

    def to_dict(self)->dict:
        document={
            'model':'sparse_logistic',
            'lambda':self.lam,
            'intercept':self.intercept,
            'converged':self.converged,
            'n_sweeps':self.n_sweeps,
            'n_features':self.n_features,
            'coefficients':[{'feature':name,'index':int(j),'value':value}
                for j,(name,value) in zip(self.active_set,self.coefficient_table())],
        }
        if self.feature_names is not None:
            document['feature_names']=list(self.feature_names)
        if self.lambda_path is not None:
            document['lambda_path']=self.lambda_path.tolist()
            document['cv_mean']=None if self.cv_mean is None else self.cv_mean.tolist()
            document['cv_stderr']=None if self.cv_stderr is None else self.cv_stderr.tolist()
            document['selected_index']=self.selected_index
        return document

    @classmethod
    def from_dict(cls,document:dict)->'SparseLogisticFit':
        beta=np.zeros(document['n_features'],dtype=np.float64)
        for entry in document['coefficients']:
            beta[entry['index']]=entry['value']
        def optional_array(key):
            value=document.get(key)
            return None if value is None else np.asarray(value,dtype=np.float64)
        return cls(beta=beta,intercept=float(document['intercept']),lam=float(document['lambda']),
            converged=bool(document.get('converged',True)),n_sweeps=int(document.get('n_sweeps',0)),
            feature_names=document.get('feature_names'),lambda_path=optional_array('lambda_path'),
            cv_mean=optional_array('cv_mean'),cv_stderr=optional_array('cv_stderr'),
            selected_index=document.get('selected_index'))

@dataclass
class TreeNode:
    probability:float
    n_samples:int
    n_errors:int
    depth:int=0
    feature:Optional[int]=None
    threshold:Optional[float]=None
    left:Optional['TreeNode']=None
    right:Optional['TreeNode']=None

    @property
    def is_leaf(self)->bool:
        return self.left is None

    @property
    def predicted_class(self)->int:
        return int(self.probability>=0.5)

    def leaves(self)->list['TreeNode']:
        if self.is_leaf:
            return [self]
        return self.left.leaves()+self.right.leaves()

    def internal_nodes(self)->list['TreeNode']:
        if self.is_leaf:
            return []
        return [self]+self.left.internal_nodes()+self.right.internal_nodes()

    def collapse(self):
        self.feature=None
        self.threshold=None
        self.left=None
        self.right=None

    def to_dict(self)->dict:
        node={'probability':self.probability,'n_samples':self.n_samples,'n_errors':self.n_errors,'depth':self.depth}
        if not self.is_leaf:
            node|={'feature':self.feature,'threshold':self.threshold,
                'left':self.left.to_dict(),'right':self.right.to_dict()}
        return node

    @classmethod
    def from_dict(cls,node:dict)->'TreeNode':
        if 'left' not in node:
            return cls(probability=node['probability'],n_samples=node['n_samples'],n_errors=node['n_errors'],depth=node['depth'])
        return cls(probability=node['probability'],n_samples=node['n_samples'],n_errors=node['n_errors'],
            depth=node['depth'],feature=node['feature'],threshold=node['threshold'],
            left=cls.from_dict(node['left']),right=cls.from_dict(node['right']))

@dataclass(frozen=True)
class PruningStep:
    alpha:float
    n_leaves:int
    holdout_accuracy:float

@dataclass
class DecisionTreeFit:
    root:TreeNode
    n_features:int
    pruning_alpha:float=0.0
    criterion:str='misclassification'
    pruning_path:list[PruningStep]=field(default_factory=list)
    feature_names:Optional[list[str]]=None

    @property
    def n_leaves(self)->int:
        return len(self.root.leaves())

    @property
    def n_splits(self)->int:
        return self.n_leaves-1

    @property
    def depth(self)->int:
        return max(leaf.depth for leaf in self.root.leaves())

    def split_features(self)->set[int]:
        return {node.feature for node in self.root.internal_nodes()}

    def predict_proba(self,features:np.ndarray)->np.ndarray:
        features=check_dimension(features,self.n_features)
        output=np.empty(features.shape[0],dtype=np.float64)
        stack=[(self.root,np.arange(features.shape[0]))]
        while stack:
            node,index=stack.pop()
            if node.is_leaf:
                output[index]=node.probability
                continue
            goes_left=features[index,node.feature]<=node.threshold
            stack.append((node.left,index[goes_left]))
            stack.append((node.right,index[~goes_left]))
        return output

    def describe(self)->str:
        '''Indented rule listing of the tree.'''
        names=self.feature_names or [f'x{j}' for j in range(self.n_features)]
        lines=[]
        def visit(node:TreeNode,indent:str):
            if node.is_leaf:
                lines.append(f'{indent}predict {node.predicted_class} (p={node.probability:.3f}, n={node.n_samples})')
                return
            lines.append(f'{indent}if {names[node.feature]} <= {node.threshold:.6g}:')
            visit(node.left,indent+'    ')
            lines.append(f'{indent}else:')
            visit(node.right,indent+'    ')
        visit(self.root,'')
        return '\n'.join(lines)

    def to_dict(self)->dict:
        document={
            'model':'decision_tree',
            'n_features':self.n_features,
            'pruning_alpha':self.pruning_alpha,
            'criterion':self.criterion,
            'n_leaves':self.n_leaves,
            'pruning_path':[{'alpha':step.alpha,'n_leaves':step.n_leaves,'holdout_accuracy':step.holdout_accuracy}
                for step in self.pruning_path],
            'root':self.root.to_dict(),
        }
        if self.feature_names is not None:
            document['feature_names']=list(self.feature_names)
        return document

    @classmethod
    def from_dict(cls,document:dict)->'DecisionTreeFit':
        return cls(root=TreeNode.from_dict(document['root']),n_features=document['n_features'],
            pruning_alpha=document['pruning_alpha'],criterion=document['criterion'],
            pruning_path=[PruningStep(**step) for step in document.get('pruning_path',[])],
            feature_names=document.get('feature_names'))

@dataclass(frozen=True)
class MajorityClassifier:
    '''Predicts the training class-1 rate for every row.'''
    probability:float
    n_features:int

    @classmethod
    def fit(cls,features:np.ndarray,labels:np.ndarray)->'MajorityClassifier':
        return cls(probability=float(np.mean(labels)),n_features=np.asarray(features).shape[1])

    def predict_proba(self,features:np.ndarray)->np.ndarray:
        features=check_dimension(features,self.n_features)
        return np.full(features.shape[0],self.probability)

@dataclass(frozen=True)
class OverlapReport:
    representation:str
    active_sets:list[list[int]]
    intersection:list[int]
    sign_agreement:float
    feature_names:list[str]

    @property
    def overlap(self)->int:
        return len(self.intersection)

    @property
    def active_sizes(self)->list[int]:
        return [len(active) for active in self.active_sets]

    def intersection_names(self)->list[str]:
        return [self.feature_names[j] for j in self.intersection]
