"""Fitness-landscape analysis for software configuration tuning.

The package measures how faithfully cheap surrogate models reproduce
the optimization-relevant structure of measured configuration
landscapes, and uses those structural deviations to compare and rank
(model, tuner) pairings.
"""

from .dominance import (
    DeltaPReport,
    DominancePair,
    FeatureFidelity,
    ObjectivePair,
    all_objectives,
    delta_p,
    dg_dd_pairs,
    dominates,
    fidelity_report,
    objective_pair,
)
from .errors import (
    AnalysisError,
    DataFormatError,
    IncompleteMatrixError,
    SparseLandscapeError,
    TunescapeError,
    UndefinedFeatureError,
    UndefinedMetricError,
)
from .influence import (
    FeatureMatrix,
    InfluenceResult,
    KMeansResult,
    ablate_option,
    build_matrices,
    build_matrix,
    influential_options,
    kmeans2,
)
from .landscape import (
    ALL_FEATURES,
    DEFAULT_WALKS,
    DEFAULT_WALK_LENGTH,
    GLOBAL_FEATURES,
    LOCAL_FEATURES,
    FeatureProfile,
    LandscapeView,
    WalkSequence,
    build_view,
    compute_feature,
    correlation_length,
    fbd,
    fdc,
    feature_profile,
    global_optima,
    kurtosis,
    lag1_autocorrelation,
    local_optima,
    mie,
    nbc,
    orient_local,
    pair_entropy,
    plo,
    random_walks,
    sequence_correlation_length,
    skewness,
    symbolize,
)
from .metrics import (
    AccuracyReport,
    CorrelationResult,
    WilcoxonResult,
    accuracy_report,
    average_ranks,
    correlation_strength,
    mape,
    murd,
    spearman,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)
from .pipeline import (
    ModelRun,
    ProfileStudy,
    RepeatResult,
    aggregate_profiles,
    mean_accuracy,
    profile_models,
    repeat_seed,
)
from .ranking import (
    BATCH_DOMAIN,
    BATCH_HEURISTIC,
    SEQ_ACQUISITION,
    SEQ_HEURISTIC,
    SEQ_REDUCTION,
    LooReport,
    RankerParams,
    RankingRecord,
    RankModel,
    TunerCharacteristics,
    ap_at_k,
    assemble_records,
    decode_tuner,
    encode_tuner,
    load_ranker,
    loo_evaluate,
    ndcg_at_k,
    predict_ranker,
    rank_by_scores,
    read_records,
    record_columns,
    save_ranker,
    top_half_relevance,
    train_ranker,
    write_records,
)
from .reporting import PACKAGE_VERSION, canonical_json, machine_report, render_table
from .space import (
    Configuration,
    ConfigurationSpace,
    OptionSchema,
    PerformanceDataset,
    hamming,
    load_dataset,
    load_metadata,
    neighbors,
    split_train_test,
    write_dataset,
    write_metadata,
)
from .surrogate import (
    MODEL_FORMAT_VERSION,
    MODEL_KINDS,
    PredictionSet,
    SurrogateModel,
    emulated_view,
    encode_configs,
    load_external_predictions,
    load_model,
    predict,
    save_model,
    train,
    write_predictions,
)
from .tuning import (
    BATCH_ALGORITHMS,
    BUDGET_PRESETS,
    SEQUENTIAL_ALGORITHMS,
    SyntheticSystem,
    TunerSpec,
    TuningResult,
    rank_pairs,
    run_batch,
    run_sequential,
    synth_system,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
