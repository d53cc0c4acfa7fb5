from glassbox.interpretable.config import HOLDOUT_FRACTION, MIN_LEAF, MIN_TREE_SAMPLES, MISCLASSIFICATION, GINI
from glassbox.interpretable.views import DecisionTreeFit, TreeNode, PruningStep
from glassbox.simulation.utils import make_rng
from copy import deepcopy
import numpy as np
import logging

logger = logging.getLogger(__name__)

def _make_node(labels:np.ndarray, depth:int)->TreeNode:
    n=len(labels)
    positives=int(labels.sum())
    return TreeNode(probability=positives/n if n else 0.0,n_samples=n,n_errors=min(positives,n-positives),depth=depth)

def _weighted_gini(positives:np.ndarray, counts:np.ndarray)->np.ndarray:
    negatives=counts-positives
    return counts-(positives**2+negatives**2)/np.maximum(counts,1)

def best_split(X:np.ndarray, y:np.ndarray, min_leaf:int=MIN_LEAF,
    criterion:str=MISCLASSIFICATION)->tuple[int,float,float]|None:
    '''
    Best (feature, threshold, gain) over all features and midpoints between distinct sorted values.

    Misclassification gain counts the training errors removed by the split. If no split removes an error the
    Gini decrease ranks the candidates instead. Ties go to the smallest feature index, then the smallest
    threshold. Returns None when no split leaves min_leaf samples on both sides with positive gain.
    '''
    n,P=X.shape
    if n<2*min_leaf or P==0:
        return None
    order=np.argsort(X,axis=0,kind='stable')
    sorted_x=np.take_along_axis(X,order,axis=0)
    sorted_y=y[order]
    left_positives=np.cumsum(sorted_y,axis=0)[:-1].astype(np.float64)
    left_counts=np.arange(1,n,dtype=np.float64)[:,None]
    right_counts=n-left_counts
    total_positives=float(y.sum())
    right_positives=total_positives-left_positives
    valid=(sorted_x[1:]>sorted_x[:-1])&(left_counts>=min_leaf)&(right_counts>=min_leaf)
    if not valid.any():
        return None
    gini_gain=(_weighted_gini(np.array(total_positives),np.array(float(n)))
        -_weighted_gini(left_positives,left_counts)-_weighted_gini(right_positives,right_counts))
    if criterion==GINI:
        gain=gini_gain
    else:
        parent_errors=min(total_positives,n-total_positives)
        gain=parent_errors-(np.minimum(left_positives,left_counts-left_positives)
            +np.minimum(right_positives,right_counts-right_positives))
        if np.max(np.where(valid,gain,-np.inf))<=0:
            gain=gini_gain
    gain=np.where(valid,gain,-np.inf)
    best=float(gain.max())
    if not best>1e-12:
        return None
    positions,features=np.nonzero(gain>=best-1e-12)
    pick=np.lexsort((positions,features))[0]
    position,feature=int(positions[pick]),int(features[pick])
    threshold=float((sorted_x[position,feature]+sorted_x[position+1,feature])/2)
    return feature,threshold,best

def grow_tree(X:np.ndarray, y:np.ndarray, min_leaf:int=MIN_LEAF, criterion:str=MISCLASSIFICATION)->TreeNode:
    '''Greedy growth to purity or until no admissible split remains.'''
    root=_make_node(y,0)
    stack=[(root,np.arange(len(y)))]
    while stack:
        node,index=stack.pop()
        if node.n_errors==0:
            continue
        split=best_split(X[index],y[index],min_leaf,criterion)
        if split is None:
            continue
        feature,threshold,gain=split
        goes_left=X[index,feature]<=threshold
        node.feature,node.threshold=feature,threshold
        node.left=_make_node(y[index[goes_left]],node.depth+1)
        node.right=_make_node(y[index[~goes_left]],node.depth+1)
        logger.debug(f"[Tree] depth={node.depth} split x{feature} <= {threshold:.6g} gain={gain:.4g} n={node.n_samples}")
        stack.append((node.right,index[~goes_left]))
        stack.append((node.left,index[goes_left]))
    return root

def _leaf_errors(node:TreeNode)->int:
    return sum(leaf.n_errors for leaf in node.leaves())

def pruning_sequence(root:TreeNode)->list[tuple[float,TreeNode]]:
    '''
    Cost-complexity (weakest link) pruning sequence, from the full tree down to the root alone.

    Alphas are in units of training misclassification rate per removed leaf.
    '''
    n_total=max(root.n_samples,1)
    tree=deepcopy(root)
    sequence=[(0.0,deepcopy(tree))]
    while not tree.is_leaf:
        internal=tree.internal_nodes()
        strengths=[(node.n_errors-_leaf_errors(node))/(len(node.leaves())-1) for node in internal]
        weakest=min(strengths)
        for node,strength in zip(internal,strengths):
            if strength<=weakest+1e-12 and not node.is_leaf:
                node.collapse()
        sequence.append((weakest/n_total,deepcopy(tree)))
    return sequence

def _holdout_split(n:int, holdout_fraction:float, seed:int)->tuple[np.ndarray,np.ndarray]:
    order=make_rng(seed,'tree-holdout').permutation(n)
    n_holdout=min(max(int(round(holdout_fraction*n)),1),n-1)
    return np.sort(order[n_holdout:]),np.sort(order[:n_holdout])

def fit_tree(features:np.ndarray, labels:np.ndarray, holdout_fraction:float=HOLDOUT_FRACTION, min_leaf:int=MIN_LEAF,
    criterion:str=MISCLASSIFICATION, seed:int=0, feature_names:list[str]|None=None)->DecisionTreeFit:
    '''
    Grow a classification tree on (1 - holdout_fraction) of the rows and prune it back to the subtree with the
    best holdout accuracy (ties go to fewer leaves).
    '''
    X=np.asarray(features,dtype=np.float64)
    y=np.asarray(labels,dtype=np.int64)
    if X.shape[0]<MIN_TREE_SAMPLES:
        raise ValueError(f"fit_tree needs at least {MIN_TREE_SAMPLES} rows, got {X.shape[0]}")
    if criterion not in (MISCLASSIFICATION,GINI):
        raise ValueError(f"Unknown split criterion '{criterion}'")
    if not 0<holdout_fraction<1:
        raise ValueError(f"holdout_fraction must lie in (0, 1), got {holdout_fraction}")
    grow_index,holdout_index=_holdout_split(len(y),holdout_fraction,seed)
    root=grow_tree(X[grow_index],y[grow_index],min_leaf,criterion)
    probe=DecisionTreeFit(root=root,n_features=X.shape[1],criterion=criterion)
    path=[]
    best=None
    for alpha,subtree in pruning_sequence(root):
        probe.root=subtree
        holdout_accuracy=float(np.mean((probe.predict_proba(X[holdout_index])>=0.5)==y[holdout_index]))
        step=PruningStep(alpha=float(alpha),n_leaves=len(subtree.leaves()),holdout_accuracy=holdout_accuracy)
        path.append(step)
        if best is None or holdout_accuracy>=best[0].holdout_accuracy:
            best=(step,subtree)
    step,subtree=best
    logger.info(f"[Tree] Grown to {path[0].n_leaves} leaves, pruned to {step.n_leaves} "
        f"(alpha={step.alpha:.4g}, holdout accuracy {step.holdout_accuracy:.3f})")
    return DecisionTreeFit(root=subtree,n_features=X.shape[1],pruning_alpha=step.alpha,criterion=criterion,
        pruning_path=path,feature_names=feature_names)
