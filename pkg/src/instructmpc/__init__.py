"""Context-aware MPC with closed-loop forecast tuning.

A linear plant is driven by a prediction-aware MPC whose disturbance
forecasts come from a context-to-scenario-weights model. After each step
the realized disturbance feeds a delayed online-gradient (or preference
based) update of that model. The analysis layer certifies the regret of
the adapted parameter sequence against the best fixed parameter in
hindsight and evaluates the matching performance bounds numerically.
"""

__version__ = "0.1.0"
