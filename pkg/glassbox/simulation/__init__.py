from glassbox.simulation.views import SimConfig, TrajectoryDictionary, SubjectDataset, GroundTruth, TrajectoryKind, Split
from glassbox.simulation.service import (Simulator, simulate, sample_increase, sample_decrease, sample_bloom,
sample_dictionary, sample_subjects)

__all__=[
    'SimConfig',
    'TrajectoryDictionary',
    'SubjectDataset',
    'GroundTruth',
    'TrajectoryKind',
    'Split',
    'Simulator',
    'simulate',
    'sample_increase',
    'sample_decrease',
    'sample_bloom',
    'sample_dictionary',
    'sample_subjects'
]
