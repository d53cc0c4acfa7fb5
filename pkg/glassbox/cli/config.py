OUT_ENV='GLASSBOX_OUT'
THREADS_ENV='GLASSBOX_THREADS'
DEFAULT_OUT='runs'

LOG_FORMAT='[%(levelname)s] %(message)s'

# exit codes: argparse already uses 2 for usage errors
EXIT_OK=0
EXIT_FAILURE=1
EXIT_USAGE=2

DATASETS_DIR='datasets'
FEATURES_DIR='features'
MODELS_DIR='models'
EXPLANATIONS_DIR='explanations'
REPORTS_DIR='reports'
REGENERATED_DIR='regenerated'

EMBEDDINGS='embeddings'
PDP='pdp'
EXPLAIN_METHODS=('integrated_gradients','occlusion',EMBEDDINGS,PDP)

TABLE1='table1'
ABLATION='ablation'
STABILITY='stability'
FAITHFULNESS='faithfulness'
SUITES=(TABLE1,ABLATION,STABILITY,FAITHFULNESS)

DESK='desk'
FULL='full'
PRESETS=(DESK,FULL)

DEFAULT_SAMPLES=(0,1,2,3,4)
