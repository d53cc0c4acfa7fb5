from glassbox.evalbench.views import (Table1Config, AblationConfig, Table1Row, AblationRecord, FaithfulnessScore,
StabilityRecord, EvalReport, MachineDescriptor, MissingGroundTruthError)
from glassbox.evalbench.service import (run_table1, fit_row, ablation_benchmark, ground_truth_faithfulness,
run_stability, machine_descriptor, sparse_logistic_learner, transformer_learner, learner_for, FittedLearner,
cell_importance, rank_cells, mask_cells, precision_at_k)

__all__=[
    'Table1Config',
    'AblationConfig',
    'Table1Row',
    'AblationRecord',
    'FaithfulnessScore',
    'StabilityRecord',
    'EvalReport',
    'MachineDescriptor',
    'MissingGroundTruthError',
    'run_table1',
    'fit_row',
    'ablation_benchmark',
    'ground_truth_faithfulness',
    'run_stability',
    'machine_descriptor',
    'sparse_logistic_learner',
    'transformer_learner',
    'learner_for',
    'FittedLearner',
    'cell_importance',
    'rank_cells',
    'mask_cells',
    'precision_at_k'
]
