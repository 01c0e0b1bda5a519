"""Configuration, persistence, experiment orchestration, the acceptance
verification suite and the live session engine."""

from .config import ConfigError, RunConfig, load_config, serialize_config
from .traces import TRACE_SCHEMA_VERSION, read_trace, trace_file_digest, write_trace
from .experiment import ExperimentError, build_setup, run_experiment, sweep
from .session import SessionEngine
from .transcripts import adapter_conformance, default_transcript

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "serialize_config",
    "TRACE_SCHEMA_VERSION",
    "write_trace",
    "read_trace",
    "trace_file_digest",
    "ExperimentError",
    "build_setup",
    "run_experiment",
    "sweep",
    "SessionEngine",
    "adapter_conformance",
    "default_transcript",
]
