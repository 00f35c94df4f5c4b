"""Neural distinguisher, logistic baseline, metrics and advantage estimation."""
from .checkpoint import load_model, save_model
from .metrics import (
    AdvantageEstimate,
    ConfusionCounts,
    Metrics,
    RocCurve,
    advantage,
    advantage_from_predictions,
    evaluate,
    metrics_from_confusion,
    roc_auc,
)
from .mlp import (
    DEFAULT_HIDDEN,
    LabeledDataset,
    MlpParameters,
    Standardizer,
    TrainConfig,
    forward,
    gradients,
    init_parameters,
    logistic_baseline,
    loss_bce,
    objective,
    predict,
    train,
)
