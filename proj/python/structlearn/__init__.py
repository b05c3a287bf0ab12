"""Structured output learning with perceptron and dual coordinate descent trainers."""

from ._core import (
    Algorithm,
    ContractError,
    DataError,
    DependencyParser,
    EpochRecord,
    LearnerConfig,
    ModelMismatch,
    MulticlassClassifier,
    NumericError,
    ParseError,
    SequenceTagger,
    StructlearnError,
    TrainReport,
    VersionError,
    attachment_loss,
    chu_liu_edmonds,
    hamming_loss,
    is_valid_tree,
    run_cli,
    viterbi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
