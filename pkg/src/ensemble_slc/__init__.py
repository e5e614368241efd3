"""Sampling-based learning control of inhomogeneous quantum ensembles.

Train one piecewise-constant pulse on a deterministic grid of ensemble
members by gradient flow, then test it on randomly drawn members.
"""

__version__ = "0.1.0"

from .dynamics import ControlField, Trajectory, bloch_coordinates, propagate
from .errors import ConfigurationError, DimensionError, NumericalFailure, ValidationError
from .model import MemberParams, ModelKind, SystemModel, generator, make_model
from .objective import GradientArray, fidelity, gradient, performance
from .sampling import DispersionSpec, build_training_grid, sample_test_members
from .slc import TestReport, TrainConfig, TrainResult, evaluate, train

__all__ = [
    "ConfigurationError",
    "ControlField",
    "DimensionError",
    "DispersionSpec",
    "GradientArray",
    "MemberParams",
    "ModelKind",
    "NumericalFailure",
    "SystemModel",
    "TestReport",
    "TrainConfig",
    "TrainResult",
    "Trajectory",
    "ValidationError",
    "bloch_coordinates",
    "build_training_grid",
    "evaluate",
    "fidelity",
    "generator",
    "gradient",
    "make_model",
    "performance",
    "propagate",
    "sample_test_members",
    "train",
]
