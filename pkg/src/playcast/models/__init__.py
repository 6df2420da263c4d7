"""Predictors: GraN-MA plus the baselines, with dense or sparse heads."""

from .spec import CONDITIONABLE, DENSE_EMITTERS, KINDS, ConfigError, ModelSpec
from .scene import (
    SceneBatch,
    SceneInput,
    ScenePrediction,
    arrays_to_batch,
    batch_anchor_state,
    out_agent_slice,
    windows_to_batch,
)
from .baselines import (
    AutoregCNN,
    GRUEncDec,
    LinearExtrapolation,
    MLPBaseline,
    REDStyle,
    SimpleGRU,
    linear_extrapolate,
)
from .granma import GraNMA, graph_layer
from .densify import densify_controls, densify_controls_np
from .api import (
    build_model,
    forward_densified,
    forward_with_controls,
    load_model,
    n_parameters,
    named_parameters,
    predict,
    save_model,
)

__all__ = [
    "CONDITIONABLE", "DENSE_EMITTERS", "KINDS", "ConfigError", "ModelSpec",
    "SceneBatch", "SceneInput", "ScenePrediction", "arrays_to_batch",
    "batch_anchor_state", "out_agent_slice", "windows_to_batch",
    "AutoregCNN", "GRUEncDec", "LinearExtrapolation", "MLPBaseline", "REDStyle",
    "SimpleGRU", "linear_extrapolate", "GraNMA", "graph_layer",
    "densify_controls", "densify_controls_np",
    "build_model", "forward_densified", "forward_with_controls", "load_model",
    "n_parameters", "named_parameters", "predict", "save_model",
]
