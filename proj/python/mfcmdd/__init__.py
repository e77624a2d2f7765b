# Copyright 2026  mfc-mdd authors
# Apache 2.0

"""Mispronunciation detection with a hybrid CTC-attention recognizer."""

from mfcmdd._core import (
    ConfigError,
    ContractError,
    DimensionError,
    FormatError,
    IoError,
    LookupError,
    MddError,
    NumericError,
    PhoneInventory,
    Recognizer,
    SizeError,
    corpus_metrics,
    ctc_collapse,
    ctc_grad,
    ctc_log_prob,
    edit_distance,
    expected_f1_loss,
    mdd_counts,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DimensionError",
    "FormatError",
    "IoError",
    "LookupError",
    "MddError",
    "NumericError",
    "PhoneInventory",
    "Recognizer",
    "SizeError",
    "corpus_metrics",
    "ctc_collapse",
    "ctc_grad",
    "ctc_log_prob",
    "edit_distance",
    "expected_f1_loss",
    "mdd_counts",
]
