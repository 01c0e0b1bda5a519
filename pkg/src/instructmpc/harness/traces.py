"""Versioned CSV trace files.

Column order is fixed per schema version: step index, state, input, realized
disturbance, first forecast row, stage and cumulative cost, the per-step
diagnostics, and the context identifier. The first line carries the schema
tag as a comment so readers can refuse unknown layouts.
"""

from __future__ import annotations

import csv
import hashlib
import io
from pathlib import Path
from typing import Union

import numpy as np

from ..sims.episode import EpisodeResult

TRACE_SCHEMA_VERSION = 1


def trace_columns(n: int, m: int) -> list:
    cols = ["t"]
    cols += [f"x{i}" for i in range(n)]
    cols += [f"u{i}" for i in range(m)]
    cols += [f"w{i}" for i in range(n)]
    cols += [f"what0_{i}" for i in range(n)]
    cols += ["stage_cost", "cum_cost", "psi_norm", "loss", "eta", "theta_norm", "context_id"]
    return cols


def render_trace(result: EpisodeResult) -> str:
    trace = result.trace
    n = trace.w.shape[1]
    m = trace.u.shape[1]
    buf = io.StringIO()
    buf.write(f"# instructmpc-trace v{TRACE_SCHEMA_VERSION}\r\n")
    writer = csv.writer(buf)
    writer.writerow(trace_columns(n, m))
    cum = 0.0
    for t in range(trace.horizon):
        cum += trace.stage_costs[t]
        row = [t]
        row += [repr(float(v)) for v in trace.x[t]]
        row += [repr(float(v)) for v in trace.u[t]]
        row += [repr(float(v)) for v in trace.w[t]]
        row += [repr(float(v)) for v in trace.windows[t][0]]
        row += [
            repr(float(trace.stage_costs[t])),
            repr(float(cum)),
            repr(float(result.psi_norms[t])),
            repr(float(result.loss_series[t])),
            repr(float(result.eta_series[t])),
            repr(float(result.theta_norms[t])),
            trace.context_ids[t],
        ]
        writer.writerow(row)
    return buf.getvalue()


def write_trace(result: EpisodeResult, path: Union[str, Path]) -> str:
    text = render_trace(result)
    Path(path).write_text(text, encoding="utf-8", newline="")
    return text


def read_trace(path: Union[str, Path]) -> dict:
    """Parse a trace file back into arrays keyed by column name."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# instructmpc-trace v"):
        raise ValueError("not a trace file")
    version = int(lines[0].rsplit("v", 1)[1])
    if version != TRACE_SCHEMA_VERSION:
        raise ValueError(f"unsupported trace schema v{version}")
    reader = csv.reader(lines[1:])
    header = next(reader)
    rows = list(reader)
    out: dict = {"version": version}
    for j, col in enumerate(header):
        vals = [row[j] for row in rows]
        if col == "context_id":
            out[col] = vals
        elif col == "t":
            out[col] = np.array([int(v) for v in vals])
        else:
            out[col] = np.array([float(v) for v in vals])
    return out


def trace_file_digest(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
