SPARSE_LOGISTIC='sparse_logistic'
TREE='tree'
MAJORITY='majority'
TRANSFORMER='transformer'
CBM='cbm'

GLASSBOX_MODELS=(SPARSE_LOGISTIC,TREE,MAJORITY)
SEQUENCE_MODELS=(TRANSFORMER,CBM)
MODELS=GLASSBOX_MODELS+SEQUENCE_MODELS
REPRESENTATIONS=('raw','featurized')

N_LIST=(500,)
SEEDS=(0,)

ABLATION_Q=0.1
# validation subjects attributed when ranking cells for the guided mask
ABLATION_SAMPLES=64

TOP_K=50
N_SHUFFLES=100
NO_SIGNAL='no signal'
OK='ok'
