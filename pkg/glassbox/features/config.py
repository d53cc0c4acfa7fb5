RAW='raw'
FEATURIZED='featurized'

CENTRAL='central'
SECOND='second'

CURVATURE=CENTRAL
