"""Semi-supervised elastic net.

Penalized linear and logistic models whose loss mixes the labeled risk with
the risk of an SVD-based transform of unlabeled rows pulled toward the
label mean, solved by accelerated proximal gradient. Includes synthetic
source/target designs, random hyperparameter search, and a benchmark
harness; see the CLI entry point ``s2net``.
"""

__version__ = "0.1.0"

from .backend import ACTIVE_BACKEND, NUMBA_AVAILABLE
from .data import (
    ColumnEncoding,
    Dataset,
    Preprocess,
    RawTable,
    build_dataset,
    preprocess_from_dict,
    preprocess_to_dict,
    read_csv,
    replay,
    split_label,
)
from .errors import DataError, NumericError, S2netError
from .losses import (
    CompositeLoss,
    composite_value,
    composite_value_grad,
    risk_grad,
    risk_value,
    sigmoid,
    stable_log1pexp,
)
from .metrics import EvalOutcome, accuracy, auc, deviance, mse
from .model import FittedModel, Hyperparams, fit, model_from_dict, \
    model_to_dict, predict
from .search import SearchResult, SearchSpace, TrialRecord, baseline_space, \
    default_metric, random_search, sample_hyperparams, score_model
from .simulate import (
    ExtrapSpec,
    SimBundle,
    TwoGroupSpec,
    simulate_extrapolation,
    simulate_two_group,
)
from .solver import FistaConfig, SolveReport, fista_momentum, kkt_residual, \
    prox_update, soft_threshold, solve
from .transform import (
    TransformedUnlabeled,
    UnlabeledSvd,
    build_transform,
    decompose,
    shift_projection,
)

__all__ = [
    "ACTIVE_BACKEND",
    "ColumnEncoding",
    "CompositeLoss",
    "DataError",
    "Dataset",
    "EvalOutcome",
    "ExtrapSpec",
    "FistaConfig",
    "FittedModel",
    "Hyperparams",
    "NUMBA_AVAILABLE",
    "NumericError",
    "Preprocess",
    "RawTable",
    "S2netError",
    "SearchResult",
    "SearchSpace",
    "SimBundle",
    "SolveReport",
    "TransformedUnlabeled",
    "TrialRecord",
    "TwoGroupSpec",
    "UnlabeledSvd",
    "__version__",
    "accuracy",
    "auc",
    "baseline_space",
    "build_dataset",
    "build_transform",
    "composite_value",
    "composite_value_grad",
    "decompose",
    "default_metric",
    "deviance",
    "fista_momentum",
    "fit",
    "kkt_residual",
    "model_from_dict",
    "model_to_dict",
    "mse",
    "predict",
    "preprocess_from_dict",
    "preprocess_to_dict",
    "prox_update",
    "random_search",
    "read_csv",
    "replay",
    "risk_grad",
    "risk_value",
    "sample_hyperparams",
    "score_model",
    "shift_projection",
    "sigmoid",
    "simulate_extrapolation",
    "simulate_two_group",
    "soft_threshold",
    "solve",
    "split_label",
    "stable_log1pexp",
]
