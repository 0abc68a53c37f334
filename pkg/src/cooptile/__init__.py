"""Cooperative tiling of input space by box-shaped agents with online
linear models, for non-linear binary classification."""

from .agents import ContextAgent, EngineConfig, Normalization, PerceptTracker
from .datasets import Dataset, gen_circles, gen_linear, gen_moons, load_csv, save_csv, standardize
from .engine import CycleReport, Engine, NcsEvent, NcsKind, Resolution, select_winner
from .geometry import Hypercube
from .linear import LinearModelConfig, ModelKind, OnlineLinearModel, Penalty

__version__ = "0.1.0"

__all__ = [
    "ContextAgent",
    "CycleReport",
    "Dataset",
    "Engine",
    "EngineConfig",
    "Hypercube",
    "LinearModelConfig",
    "ModelKind",
    "NcsEvent",
    "NcsKind",
    "Normalization",
    "OnlineLinearModel",
    "Penalty",
    "PerceptTracker",
    "Resolution",
    "gen_circles",
    "gen_linear",
    "gen_moons",
    "load_csv",
    "save_csv",
    "select_winner",
    "standardize",
    "__version__",
]
