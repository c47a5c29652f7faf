"""Classification by projective measurement on a bipartite density matrix."""
from .datasets import LabeledDataset, accuracy, generate, read_csv, split, write_csv
from .encoders import EncoderSpec, FeatureMap, FeatureScaler, RffProjection, encode_batch, encode_sample, fit_feature_map
from .errors import QMCError, ZeroSupportError
from .prediction import PredictionResult, predict, predict_batch, predict_labels, predict_proba
from .states import BipartiteShape, validate_density
from .training import Accumulator, TrainedModel, train

__all__ = [
    "Accumulator",
    "BipartiteShape",
    "EncoderSpec",
    "FeatureMap",
    "FeatureScaler",
    "LabeledDataset",
    "PredictionResult",
    "QMCError",
    "RffProjection",
    "TrainedModel",
    "ZeroSupportError",
    "accuracy",
    "encode_batch",
    "encode_sample",
    "fit_feature_map",
    "generate",
    "predict",
    "predict_batch",
    "predict_labels",
    "predict_proba",
    "read_csv",
    "split",
    "train",
    "validate_density",
    "write_csv",
]

__version__ = "0.1.0"
