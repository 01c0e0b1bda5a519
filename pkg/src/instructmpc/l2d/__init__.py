"""Context-to-forecast layer.

Maps instruction text to scenario weights (affine or softmax models, or an
external predictor process) and mixes per-scenario trajectory banks into a
k-step disturbance forecast for the controller.
"""

from .features import ContextFeatures, Vocabulary, featurize
from .library import (
    LibraryError,
    Scenario,
    ScenarioLibrary,
    load_library,
    register_trajectory_generator,
)
from .models import (
    AffineMixer,
    PredictionWindow,
    SoftmaxScorer,
    predict_window,
    prediction_jacobian,
    scenario_decay_vectors,
    window_span,
)
from .adapter_client import (
    AdapterError,
    AdapterProcessError,
    AdapterProtocolError,
    AdapterTimeoutError,
    AdapterWeightsError,
    ExternalPredictorClient,
)

__all__ = [
    "ContextFeatures",
    "Vocabulary",
    "featurize",
    "Scenario",
    "ScenarioLibrary",
    "LibraryError",
    "load_library",
    "register_trajectory_generator",
    "AffineMixer",
    "SoftmaxScorer",
    "PredictionWindow",
    "predict_window",
    "prediction_jacobian",
    "scenario_decay_vectors",
    "window_span",
    "ExternalPredictorClient",
    "AdapterError",
    "AdapterProcessError",
    "AdapterProtocolError",
    "AdapterTimeoutError",
    "AdapterWeightsError",
]
