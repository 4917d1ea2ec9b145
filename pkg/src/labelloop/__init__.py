"""Pool-based active-learning workbench for multi-label classification."""

from .core import (
    Dataset,
    LabelCombination,
    LabelSchema,
    PoolPartition,
    ProbabilityVector,
    Sample,
    StateMatrix,
    commit_annotations,
    decode_combination,
    encode_combination,
)
from .classifier import (
    ClassifierModel,
    TrainConfig,
    fine_tune,
    grad_check,
    init_model,
    predict_proba,
    sigmoid_ce_loss,
    train,
)
from .selection import (
    ActionBatch,
    SelectionStrategy,
    StrategyKind,
    score_lc,
    score_mle,
    score_mlm,
    select,
)
from .correlation import (
    CorrelationTable,
    RefinementOutcome,
    assign_pseudo,
    build_table,
    nearest_combination,
    normalize_rv,
    refine_pseudo,
    update_table,
)
from .annotation import (
    AnnotationQueue,
    AnnotationResult,
    AnnotationTask,
    SimulatedOracle,
    oracle_confirm,
)
from .metrics import (
    LabelMetrics,
    confusion_counts,
    label_metrics,
    roc_auc,
    roc_auc_trapezoid,
    roc_curve_points,
)
from .driver import (
    ALConfig,
    ALState,
    IterationReport,
    baseline,
    evaluate,
    finalize_iteration,
    new_state,
    prepare_iteration,
    run,
    run_iteration,
)
from .data import (
    SynthConfig,
    dataset_hash,
    generate_synthetic,
    load_dataset,
    lusms_synth_v1,
    lusms_synth_v1_config,
    read_report_series,
    report_series_to_csv,
    save_dataset,
    stratified_warm_start,
    write_report_series,
)

__version__ = "0.1.0"
