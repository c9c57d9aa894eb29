"""JSON classification service: GET /health and POST /classify."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, field_validator

from bibliome.pipeline import VttClassifier
from bibliome.vtt import VttDecision


class ClassifyRequest(BaseModel):
    text: str

    @field_validator("text")
    @classmethod
    def _nonempty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("text must not be empty")
        return v


class ClassifyResponse(BaseModel):
    label: str
    confidence: Optional[float]
    band: str
    np: int
    p_sum: float
    n_sum: float
    threshold: float
    model_version: str

    @classmethod
    def from_decision(cls, d: VttDecision, version: str) -> "ClassifyResponse":
        return cls(
            label=d.label.value,
            confidence=d.confidence,
            band=d.band,
            np=d.np,
            p_sum=d.p_sum,
            n_sum=d.n_sum,
            threshold=d.threshold,
            model_version=version,
        )


def create_app(classifier: VttClassifier, max_text_bytes: int = 100_000) -> FastAPI:
    app = FastAPI(title="bibliome", version=classifier.version)

    @app.get("/health")
    def health():
        return {"status": "ok", "model_version": classifier.version}

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(req: ClassifyRequest):
        if len(req.text.encode("utf-8")) > max_text_bytes:
            raise HTTPException(status_code=413, detail=f"text exceeds {max_text_bytes} bytes")
        return ClassifyResponse.from_decision(classifier.classify_text(req.text), classifier.version)

    return app
