"""
Simulation API Router
Runs the full-history fractional-order simulation on an uploaded current signal
"""
import io
import logging

from fastapi import APIRouter, File, Form, HTTPException, UploadFile
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import StreamingResponse

from focir.config import settings
from focir.models import ModelSchema
from focir.routers.common import http_error
from focir.services.ecm_models import to_state_space
from focir.services.ss_sim import simulate
from focir.utils.signals import format_trace, read_signal, trace_frame

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["simulation"])


def _run(model: ModelSchema, payload: bytes) -> str:
    params = model.to_params()
    frame = read_signal(io.BytesIO(payload), params.ts, settings.sampling_rtol)
    current = frame["current"].to_numpy()
    trace = simulate(to_state_space(params, max(current.size - 1, 1)), current, window=settings.window)
    return format_trace(trace_frame(frame["time"].to_numpy(), trace), "csv")


@router.post("/simulate")
async def simulate_signal(model: str = Form(...), signal: UploadFile = File(...)):
    """
    Simulate the terminal voltage for a current signal

    Args:
        model: Model JSON text
        signal: CSV upload with header time,current

    Returns:
        text/csv stream with columns time,current,voltage
    """
    logger.info(f"Simulation request: {signal.filename}")
    payload = await signal.read()
    if len(payload) == 0:
        raise HTTPException(status_code=400, detail="Empty signal file")

    try:
        schema = ModelSchema.model_validate_json(model)
        text = await run_in_threadpool(_run, schema, payload)
    except Exception as e:
        raise http_error(e, "simulate") from e

    return StreamingResponse(
        io.BytesIO(text.encode()),
        media_type="text/csv",
        headers={"Content-Disposition": "inline; filename=trace.csv"},
    )
