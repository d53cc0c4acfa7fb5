MAGIC=b'GBL1'
FORMAT_VERSION=1
SUPPORTED_VERSIONS=(1,)

MANIFEST_NAME='manifest.json'
TRUTH_DIR='truth'

BINARY='binary'
CSV='csv'
FORMATS=(BINARY,CSV)
BINARY_SUFFIX='.gbl'

DATASET='dataset'
FEATURES='features'
MODEL='model'
ATTRIBUTIONS='attributions'
EMBEDDINGS='embeddings'
PDP='pdp'
REPORT='report'
KINDS=(DATASET,FEATURES,MODEL,ATTRIBUTIONS,EMBEDDINGS,PDP,REPORT)

# an artifact of the key kind must name an upstream artifact of the value kind
REQUIRED_UPSTREAM={
    FEATURES:DATASET,
    MODEL:DATASET,
    ATTRIBUTIONS:MODEL,
    EMBEDDINGS:MODEL,
    PDP:MODEL,
}

# float32 survives a text round trip at 9 significant digits
CSV_FLOAT_FORMAT='%.9g'
