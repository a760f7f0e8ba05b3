"""
Signal and file I/O shared by the CLI and the HTTP API.

Current signals are CSV files with the header ``time,current`` sampled on a
uniform grid; simulated traces add a ``voltage`` column.
"""
import io
import logging
from pathlib import Path
from typing import IO, Type, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from focir.config import RunConfig
from focir.errors import InputError
from focir.models import CoefficientFileSchema, ModelSchema
from focir.services.ss_sim import SimulationTrace

logger = logging.getLogger(__name__)

SIGNAL_COLUMNS = ["time", "current"]
TRACE_COLUMNS = ["time", "current", "voltage"]

Source = Union[str, Path, IO]
SchemaT = TypeVar("SchemaT", bound=BaseModel)


def read_signal(source: Source, ts: float, rtol: float = 1e-6) -> pd.DataFrame:
    """
    Read and validate a current signal.

    Args:
        source: CSV path or open file/buffer
        ts: Model sample time the signal must be sampled at
        rtol: Allowed relative deviation of every time step from ts

    Returns:
        DataFrame with float columns time, current
    """
    try:
        frame = pd.read_csv(source)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputError(f"Cannot read signal CSV: {e}") from e

    frame.columns = [str(column).strip() for column in frame.columns]
    if list(frame.columns) != SIGNAL_COLUMNS:
        raise InputError(f"Signal CSV header must be 'time,current', got '{','.join(frame.columns)}'")
    if frame.empty:
        raise InputError("Signal CSV has no samples")
    try:
        frame = frame.astype(float)
    except ValueError as e:
        raise InputError(f"Signal CSV contains non-numeric values: {e}") from e
    if not np.all(np.isfinite(frame.to_numpy())):
        raise InputError("Signal CSV contains missing or non-finite values")

    steps = np.diff(frame["time"].to_numpy())
    if steps.size:
        deviation = np.abs(steps - ts) / ts
        worst = int(np.argmax(deviation))
        if deviation[worst] > rtol:
            raise InputError(
                f"Non-uniform sampling: step {worst} is {steps[worst]} s, model Ts is {ts} s "
                f"(relative deviation {deviation[worst]:.3e} > {rtol:g})"
            )
    logger.info(f"Read signal: {len(frame)} samples at Ts={ts}")
    return frame


def trace_frame(time: np.ndarray, trace: SimulationTrace) -> pd.DataFrame:
    """Simulation output as a time,current,voltage table on the input time grid."""
    return pd.DataFrame({"time": time, "current": trace.u, "voltage": trace.y}, columns=TRACE_COLUMNS)


def format_trace(frame: pd.DataFrame, output_format: str = "csv") -> str:
    """Render a trace table as CSV or as JSON records."""
    if output_format == "json":
        return frame.to_json(orient="records", double_precision=15)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False)
    return buffer.getvalue()


def _load(path: Union[str, Path], schema: Type[SchemaT], what: str) -> SchemaT:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"Cannot read {what} file {path}: {e}") from e
    try:
        return schema.model_validate_json(text)
    except ValidationError as e:
        raise InputError(f"Invalid {what} file {path}: {e}") from e


def load_model(path: Union[str, Path]) -> ModelSchema:
    return _load(path, ModelSchema, "model")


def load_coefficients(path: Union[str, Path]) -> CoefficientFileSchema:
    return _load(path, CoefficientFileSchema, "coefficient")


def load_run_config(path: Union[str, Path]) -> RunConfig:
    return _load(path, RunConfig, "config")


def write_text(text: str, path: Union[str, Path, None]) -> None:
    """Write to ``path``, or to standard output when no path is given."""
    if path is None:
        print(text)
        return
    Path(path).write_text(text if text.endswith("\n") else text + "\n")
    logger.info(f"Wrote {path}")


def dump_json(document: BaseModel) -> str:
    return document.model_dump_json(indent=2)
