N_EMBD=144
N_POSITIONS=50
N_LAYER=6
DESK_N_LAYER=2
N_HEAD=4
N_CONCEPT=25
N_CLASS=2
MLP_RATIO=4
EPOCHS=70
BATCH_SIZE=32
LR=3e-4
CBM_LAMBDA=1.0
INIT_STD=0.02

EVAL_BATCH_SIZE=128

PLAIN='plain'
CBM='cbm'

# oracle concept logit when a concept never takes one of its values on the training split
ORACLE_LOGIT=3.0

# hidden-state names accepted by extract_embeddings: 'input', 'block_0'..'block_{n_layer-1}', 'final'
FINAL_LAYER='final'
INPUT_LAYER='input'
