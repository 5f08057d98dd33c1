"""HTTP service exposing a loaded model: schema discovery, program text,
explanation, and what-if comparison. The model is loaded once at startup and
never mutated; every request is answered from the compiled programs.
"""
from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .explain import ExplanationTree
from .model import Case
from .pipeline import (ENCODINGS, CaseReport, LoadedModel, explain_case,
                       validate_case_values)

PROGRAM_NAMES = ("nodes", "paths", "extra")


# ---------------------------------------------------------------------------
# wire types


class FeatureInfo(BaseModel):
    name: str
    kind: str
    categories: Optional[list[str]] = None
    thresholds: Optional[list[float]] = None


class TargetInfo(BaseModel):
    name: str
    classes: list[str]


class ModelResponse(BaseModel):
    target: TargetInfo
    features: list[FeatureInfo]
    labels: dict[str, dict[str, str]]


class ExplanationNode(BaseModel):
    label: str
    children: list["ExplanationNode"] = Field(default_factory=list)


class ExplainRequest(BaseModel):
    case: dict[str, Any]
    encoding: str = "paths"
    case_id: int = 0


class ExplainResponse(BaseModel):
    prediction: str
    explanations: list[ExplanationNode]
    rendered: str


class WhatIfOverride(BaseModel):
    feature: str
    value: Any = None


class WhatIfRequest(BaseModel):
    case: dict[str, Any]
    overrides: list[WhatIfOverride] = Field(default_factory=list)
    encoding: str = "paths"
    case_id: int = 0


class WhatIfItem(BaseModel):
    override: WhatIfOverride
    prediction: str
    changed: bool
    explanations: list[ExplanationNode]
    rendered: str


ExplanationNode.model_rebuild()


def _to_node(tree: ExplanationTree) -> ExplanationNode:
    return ExplanationNode(label=tree.label,
                           children=[_to_node(c) for c in tree.children])


def _to_response(report: CaseReport) -> ExplainResponse:
    return ExplainResponse(prediction=report.prediction,
                           explanations=[_to_node(t)
                                         for t in report.explanations],
                           rendered=report.rendered)


# ---------------------------------------------------------------------------
# app factory


def create_app(model: Optional[LoadedModel] = None) -> FastAPI:
    app = FastAPI(title="dtrules", version="0.1.0")
    # the browser console is served from another origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def require_model() -> LoadedModel:
        if model is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        return model

    def check_encoding(encoding: str) -> str:
        if encoding not in ENCODINGS:
            raise HTTPException(status_code=400,
                                detail=f"unknown encoding {encoding!r}")
        return encoding

    def checked_case(m: LoadedModel, values: dict, case_id: int,
                     extra_errors: list[tuple[str, str]] = ()) -> Case:
        clean, errors = validate_case_values(m.tree.features, values)
        errors = list(errors) + list(extra_errors)
        if errors:
            raise HTTPException(
                status_code=422,
                detail=[{"field": f, "message": msg} for f, msg in errors])
        return Case(case_id, clean)

    @app.get("/health")
    def health() -> dict:
        require_model()
        return {"status": "ok"}

    @app.get("/model", response_model=ModelResponse)
    def model_info() -> ModelResponse:
        m = require_model()
        features = []
        for f in m.tree.features:
            features.append(FeatureInfo(
                name=f.name, kind=f.kind,
                categories=list(f.categories) if f.categories else None,
                thresholds=m.thresholds.get(f.name)))
        return ModelResponse(
            target=TargetInfo(name=m.tree.target.name,
                              classes=list(m.tree.target.categories)),
            features=features,
            labels=m.labels)

    @app.get("/schema")
    def schemas() -> dict:
        return {
            "model_response": ModelResponse.model_json_schema(),
            "explain_request": ExplainRequest.model_json_schema(),
            "explain_response": ExplainResponse.model_json_schema(),
            "whatif_request": WhatIfRequest.model_json_schema(),
            "whatif_response": WhatIfItem.model_json_schema(),
        }

    @app.get("/programs/{name}", response_class=PlainTextResponse)
    def program_text(name: str) -> str:
        m = require_model()
        if name not in PROGRAM_NAMES:
            raise HTTPException(status_code=404,
                                detail=f"unknown program {name!r}")
        if name == "extra":
            from .compiler import serialize_program
            return serialize_program(m.prediction_rules)
        return m.program_text(name)

    @app.post("/explain", response_model=ExplainResponse)
    def explain_endpoint(request: ExplainRequest) -> ExplainResponse:
        m = require_model()
        check_encoding(request.encoding)
        case = checked_case(m, request.case, request.case_id)
        return _to_response(explain_case(m, case, request.encoding))

    @app.post("/whatif", response_model=list[WhatIfItem])
    def whatif_endpoint(request: WhatIfRequest) -> list[WhatIfItem]:
        m = require_model()
        check_encoding(request.encoding)
        known = {f.name for f in m.tree.features}
        by_name = {f.name: f for f in m.tree.features}

        override_errors: list[tuple[str, str]] = []
        for i, override in enumerate(request.overrides):
            where = f"overrides[{i}]"
            if override.feature not in known:
                override_errors.append(
                    (where, f"unknown feature {override.feature!r}"))
                continue
            _, errs = validate_case_values(
                [by_name[override.feature]],
                {override.feature: override.value})
            override_errors += [(where, f"{override.feature}: {msg}")
                                for _, msg in errs]
        base = checked_case(m, request.case, request.case_id, override_errors)

        base_report = explain_case(m, base, request.encoding)
        items = []
        for override in request.overrides:
            feat = by_name[override.feature]
            clean, _ = validate_case_values([feat],
                                            {override.feature: override.value})
            values = dict(base.values)
            values[override.feature] = clean[override.feature]
            report = explain_case(m, Case(request.case_id, values),
                                  request.encoding)
            items.append(WhatIfItem(
                override=override,
                prediction=report.prediction,
                changed=report.prediction != base_report.prediction,
                explanations=[_to_node(t) for t in report.explanations],
                rendered=report.rendered))
        return items

    return app
