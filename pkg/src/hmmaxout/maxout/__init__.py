"""Maxout networks: layers, dropout, training and persistence."""
from .estimator import MaxoutClassifier, predict_posteriors, train_classifier
from .layers import (ConvMaxout, DenseMaxout, Softmax, conv_output_size, dense_maxout_forward,
                     dropout_apply, softmax, softmax_xent)
from .network import (Network, NetworkSpec, TrainConfig, TrainingDivergedError,
                      sgd_momentum_step, train_network)
from .presets import PRESETS, char_net, char_net_full, small_net, small_net_full
from .serialize import ModelFormatError

__all__ = [
    "MaxoutClassifier", "predict_posteriors", "train_classifier", "ConvMaxout", "DenseMaxout",
    "Softmax", "conv_output_size", "dense_maxout_forward", "dropout_apply", "softmax",
    "softmax_xent", "Network", "NetworkSpec", "TrainConfig", "TrainingDivergedError",
    "sgd_momentum_step", "train_network", "PRESETS", "char_net", "char_net_full", "small_net",
    "small_net_full", "ModelFormatError",
]
