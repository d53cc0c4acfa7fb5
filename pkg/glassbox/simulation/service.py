from glassbox.simulation.views import SimConfig, TrajectoryDictionary, SubjectDataset, GroundTruth, TrajectoryKind, Split
from glassbox.simulation.config import TRAIN_FRACTION, KMEANS_MAX_ITER
from glassbox.simulation.utils import make_rng, derive_seed
from scipy.signal.windows import tukey
from sklearn.cluster import KMeans
import numpy as np
import logging

logger = logging.getLogger(__name__)

def increase_from_weights(u:np.ndarray)->np.ndarray:
    '''Cumulative sum of nonnegative jump weights, renormalized to sum to T.'''
    u=np.asarray(u,dtype=np.float64)
    trajectory=np.cumsum(u)
    return trajectory*(len(u)/trajectory.sum())

def bloom_from_centers(centers:list[int], T:int, r:float, L:int)->np.ndarray:
    '''Sum of Tukey windows of length L and taper r centered at each t*, renormalized to sum to T.'''
    window=tukey(L,alpha=r,sym=True)
    half=(L-1)//2
    trajectory=np.zeros(T,dtype=np.float64)
    for center in centers:
        trajectory[center-half:center+half+1]+=window
    return trajectory*(T/trajectory.sum())

def sample_increase(rng:np.random.Generator, T:int, lambda_u:float)->np.ndarray:
    u=rng.dirichlet(np.full(T,lambda_u))
    return increase_from_weights(u)

def sample_decrease(rng:np.random.Generator, T:int, lambda_u:float)->np.ndarray:
    # time reversal keeps the trajectory nonnegative with sum T
    return sample_increase(rng,T,lambda_u)[::-1].copy()

def bloom_center_range(T:int, L:int)->tuple[int,int]:
    '''
    Inclusive range of bloom centers: [L, T-L], narrowed to [(L-1)/2, T-1-(L-1)/2] when T < 2L so that
    every window still lies inside the series.
    '''
    if T<=L:
        raise ValueError(f"Bloom windows of length L={L} need more than L timepoints, got T={T}")
    if T>=2*L:
        return L,T-L
    half=(L-1)//2
    return half,T-1-half

def sample_bloom_centers(rng:np.random.Generator, T:int, lambda_bloom:float, L:int)->list[int]:
    low,high=bloom_center_range(T,L)
    n_bloom=0
    while n_bloom==0:
        n_bloom=int(rng.poisson(lambda_bloom))
    return [int(center) for center in rng.integers(low,high,size=n_bloom,endpoint=True)]

def sample_bloom(rng:np.random.Generator, T:int, lambda_bloom:float, r:float, L:int)->np.ndarray:
    centers=sample_bloom_centers(rng,T,lambda_bloom,L)
    return bloom_from_centers(centers,T,r,L)

def sample_dictionary(rng:np.random.Generator, config:SimConfig)->TrajectoryDictionary:
    K,T,D=config.n_communities,config.n_timepoints,config.n_species
    kinds=rng.choice(len(TrajectoryKind),size=(K,D),p=np.asarray(config.kind_probs))
    entries=np.empty((K,T,D),dtype=np.float64)
    bloom_centers=[]
    for k in range(K):
        for d in range(D):
            match TrajectoryKind(kinds[k,d]):
                case TrajectoryKind.NOISE:
                    entries[k,:,d]=rng.uniform(0.0,config.noise_high,size=T)
                case TrajectoryKind.INCREASE:
                    entries[k,:,d]=sample_increase(rng,T,config.lambda_u)
                case TrajectoryKind.DECREASE:
                    entries[k,:,d]=sample_decrease(rng,T,config.lambda_u)
                case TrajectoryKind.BLOOM:
                    centers=sample_bloom_centers(rng,T,config.lambda_bloom,config.tukey_window)
                    entries[k,:,d]=bloom_from_centers(centers,T,config.tukey_bandwidth,config.tukey_window)
                    bloom_centers.extend((k,d,center) for center in centers)
    return TrajectoryDictionary(entries=entries,kinds=kinds.astype(np.int8),bloom_centers=bloom_centers)

def cluster_theta(theta:np.ndarray, n_clusters:int, seed:int)->np.ndarray:
    '''
    k-means++ clustering of the mixture weights (Euclidean, 100 iterations, one initialization).

    Empty clusters are reseeded from the points farthest from their centroids. When theta has fewer
    distinct rows than n_clusters, the number of clusters shrinks to the number of distinct rows.
    '''
    n_distinct=np.unique(theta,axis=0).shape[0]
    n_effective=min(n_clusters,n_distinct)
    if n_effective<n_clusters:
        logger.warning(f"[Simulator] Only {n_distinct} distinct mixture rows, using {n_effective} clusters instead of {n_clusters}")
    if n_effective==1:
        return np.zeros(theta.shape[0],dtype=np.int64)
    kmeans=KMeans(n_clusters=n_effective,init='k-means++',n_init=1,max_iter=KMEANS_MAX_ITER,
        random_state=seed%(2**32),algorithm='lloyd')
    return kmeans.fit_predict(theta).astype(np.int64)

def sample_subjects(rng:np.random.Generator, dictionary:TrajectoryDictionary, config:SimConfig)->SubjectDataset:
    N,K=config.n_subjects,config.n_communities
    if dictionary.n_communities!=K:
        raise ValueError(f"Dictionary has {dictionary.n_communities} communities, config expects {K}")
    if K==1:
        theta=np.ones((N,1),dtype=np.float64)
    else:
        theta=rng.dirichlet(np.full(K,config.lambda_theta),size=N)
    X=np.einsum('nk,ktd->ntd',theta,dictionary.entries)

    cluster_id=cluster_theta(theta,config.n_clusters,derive_seed(config.seed,'kmeans'))
    n_effective=int(cluster_id.max())+1
    if n_effective==config.n_clusters:
        n_disease=config.n_disease_clusters
    else:
        n_disease=int(round(n_effective*config.n_disease_clusters/config.n_clusters))
    disease_clusters=tuple(sorted(int(c) for c in rng.permutation(n_effective)[:n_disease]))
    y=np.isin(cluster_id,disease_clusters).astype(np.int64)

    concepts=(theta>config.concept_threshold).astype(np.int8)

    order=rng.permutation(N)
    n_train=int(round(TRAIN_FRACTION*N))
    split=np.full(N,Split.VAL,dtype='<U5')
    split[order[:n_train]]=Split.TRAIN

    truth=GroundTruth(theta=theta,dictionary=dictionary,cluster_id=cluster_id,disease_clusters=disease_clusters,
        tukey_window=config.tukey_window,concept_threshold=config.concept_threshold)
    return SubjectDataset(X=X,y=y,concepts=concepts,split=split,config=config,ground_truth=truth)

class Simulator:
    '''Runs the generator with purpose-keyed random streams so that (seed, config) fixes every draw.'''
    def __init__(self,config:SimConfig|None=None):
        self.config=config or SimConfig()

    def generate_dictionary(self)->TrajectoryDictionary:
        return sample_dictionary(make_rng(self.config.seed,'dictionary'),self.config)

    def generate(self)->SubjectDataset:
        dictionary=self.generate_dictionary()
        dataset=sample_subjects(make_rng(self.config.seed,'subjects'),dictionary,self.config)
        summary=dataset.summary()
        logger.info(f"[Simulator] Generated N={summary.n_subjects} T={summary.n_timepoints} D={summary.n_species} "
            f"K={summary.n_communities}, disease fraction {summary.disease_fraction:.3f}")
        return dataset

def simulate(config:SimConfig|None=None)->SubjectDataset:
    return Simulator(config).generate()
