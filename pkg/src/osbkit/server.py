"""HTTP/1.1 JSON wire protocol in front of OcdService.

Bodies are validated by hand so malformed fields come back as 400 with
field-level messages (FastAPI's own 422 is bypassed on purpose).
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .core_data import BiomarkerVector, DataError, LabeledSample, OcdClass
from .service import NotReadyError, OcdService, ServiceError

FEATURE_FIELDS = ("sd", "gp", "cat", "mal", "sc")
PROVENANCE_FIELDS = ("hospital_id", "lab_id")


def _parse_features(body: dict) -> tuple[BiomarkerVector | None, dict[str, str]]:
    errors = {}
    values = []
    for f in FEATURE_FIELDS:
        v = body.get(f)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            errors[f] = "must be a finite number"
        else:
            values.append(float(v))
    if errors:
        return None, errors
    return BiomarkerVector(*values), {}


def create_app(service: OcdService) -> FastAPI:
    app = FastAPI(title="osbkit")

    async def _json_body(request: Request) -> dict | None:
        try:
            body = await request.json()
        except Exception:
            return None
        return body if isinstance(body, dict) else None

    @app.post("/v1/samples")
    async def ingest(request: Request):
        body = await _json_body(request)
        if body is None:
            return JSONResponse({"errors": {"body": "must be a JSON object"}}, status_code=400)
        features, errors = _parse_features(body)
        label = None
        try:
            label = OcdClass.from_name(str(body.get("label", "")))
        except DataError:
            errors["label"] = "must be one of HI, GAI, OAI"
        if errors:
            return JSONResponse({"errors": errors}, status_code=400)
        provenance = tuple(
            str(body[f]) for f in PROVENANCE_FIELDS if body.get(f)
        )
        seq = service.ingest_sample(LabeledSample(features, label, provenance))
        service.maybe_retrain()
        return JSONResponse({"sequence_id": seq}, status_code=201)

    @app.post("/v1/predict")
    async def predict(request: Request):
        body = await _json_body(request)
        if body is None:
            return JSONResponse({"errors": {"body": "must be a JSON object"}}, status_code=400)
        features, errors = _parse_features(body)
        if errors:
            return JSONResponse({"errors": errors}, status_code=400)
        try:
            return service.predict(features)
        except NotReadyError:
            return JSONResponse({"error": "service not ready"}, status_code=503)

    @app.get("/v1/model")
    async def model_info():
        try:
            return service.model_info()
        except NotReadyError:
            return JSONResponse({"error": "service not ready"}, status_code=503)

    @app.post("/v1/retrain")
    async def retrain():
        try:
            record = service.maybe_retrain(force=True)
        except ServiceError as e:
            return JSONResponse({"error": str(e)}, status_code=500)
        return JSONResponse({"version": record.version}, status_code=202)

    return app
