"""FastAPI wrapper exposing the classifiers over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..classify import PreconditionError
from . import handlers, models

app = FastAPI(title="psd-rigidity", version=__version__)


def _run(handler, payload: dict) -> dict:
    try:
        return handler(payload)
    except PreconditionError as e:
        raise HTTPException(
            status_code=422,
            detail={"message": str(e), "violations": list(e.violations)},
        )
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.get("/health", response_model=models.HealthResponse)
def health():
    return {"status": "ok", "version": __version__}


@app.post("/classify", response_model=models.RigidityResponse,
          response_model_exclude_none=True)
def classify(req: models.ClassifyRequest):
    return _run(handlers.handle_classify, req.model_dump())


@app.post("/uniqueness", response_model=models.RigidityResponse,
          response_model_exclude_none=True)
def uniqueness(req: models.ClassifyRequest):
    return _run(handlers.handle_uniqueness, req.model_dump())


@app.post("/validate", response_model=models.ValidateResponse)
def validate(req: models.ValidateRequest):
    return _run(handlers.handle_validate, req.model_dump())


@app.post("/generate", response_model=models.GenerateResponse)
def generate(req: models.GenerateRequest):
    return _run(handlers.handle_generate, req.model_dump())


@app.post("/boundary", response_model=models.BoundaryResponse)
def boundary(req: models.ValidateRequest):
    return _run(handlers.handle_boundary, req.model_dump())


@app.post("/motions", response_model=models.MotionsResponse,
          response_model_exclude_none=True)
def motions(req: models.ClassifyRequest):
    return _run(handlers.handle_motions, req.model_dump())


@app.post("/oracle", response_model=models.OracleResponse,
          response_model_exclude_none=True)
def oracle(req: models.OracleRequest):
    return _run(handlers.handle_oracle, req.model_dump())
