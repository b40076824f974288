"""Local HTTP service exposing a fitted network to the companion UI.

Stateless apart from the immutable network loaded at startup: every request
carries its own seed (or falls back to the configured default), so identical
payloads always return identical answers. Malformed requests come back as
400 with field-level messages; structurally valid but impossible queries
(zero-probability evidence, contradictory constraints) come back as 422.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .core import Evidence, Network
from .errors import (
    AllZeroWeights,
    InconsistentQuery,
    TurfBbnError,
    UnknownState,
    UnknownVariable,
    ZeroProbabilityEvidence,
)
from .infer import QueryEvent, exact_query, lw_query, reverse_query
from .netdoc import Strengths, deserialize_network_with_strengths
from .pipeline import RESPONSE_VARIABLES
from .scenarios import DEFAULT_SAMPLES, Scenario, load_scenarios

_EXACT_NODE_LIMIT = 20


class ApiClause(BaseModel):
    model_config = ConfigDict(extra="forbid")
    var: str
    states: list[str] = Field(min_length=1)


class ApiQueryRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    evidence: list[ApiClause] = Field(default_factory=list)
    event: list[ApiClause] = Field(min_length=1)
    n_samples: int | None = Field(default=None, ge=1)
    seed: int | None = None


class ApiQueryResponse(BaseModel):
    estimate: float
    ci_low: float
    ci_high: float
    method: str
    n_samples: int
    exact: float | None


class ApiReverseRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    driver: str
    event: list[ApiClause] = Field(min_length=1)


def _clauses_to_constraints(clauses: list[ApiClause], field: str) -> dict:
    constraints: dict[str, frozenset[str]] = {}
    for i, clause in enumerate(clauses):
        if clause.var in constraints:
            raise _bad_request(f"{field}[{i}].var",
                               f"variable {clause.var!r} appears twice")
        constraints[clause.var] = frozenset(clause.states)
    return constraints


class _BadRequest(Exception):
    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message


def _bad_request(field: str, message: str) -> _BadRequest:
    return _BadRequest(field, message)


def default_scenarios() -> list[Scenario]:
    """The shipped scenario presets bundled with the package."""
    path = resources.files("turfbbn").joinpath("data/table1.scenarios")
    with resources.as_file(path) as p:
        return load_scenarios(p)


def create_app(network: Network, strengths: Strengths | None = None,
               default_samples: int = DEFAULT_SAMPLES, default_seed: int = 0,
               scenarios: list[Scenario] | None = None) -> FastAPI:
    app = FastAPI(title="turfbbn service", docs_url=None, redoc_url=None)
    # the explorer page is usually served from a different local origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    presets = scenarios if scenarios is not None else default_scenarios()
    strengths = strengths or {}

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(part) for part in err["loc"]),
             "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": errors})

    @app.exception_handler(_BadRequest)
    async def _on_bad_request(request: Request, exc: _BadRequest):
        return JSONResponse(
            status_code=400,
            content={"errors": [{"field": exc.field, "message": exc.message}]},
        )

    @app.exception_handler(TurfBbnError)
    async def _on_domain_error(request: Request, exc: TurfBbnError):
        impossible = isinstance(
            exc, (ZeroProbabilityEvidence, AllZeroWeights, InconsistentQuery)
        )
        if isinstance(exc, (UnknownVariable, UnknownState)):
            return JSONResponse(
                status_code=400,
                content={"errors": [{"field": "", "message": str(exc)}]},
            )
        return JSONResponse(
            status_code=422 if impossible else 500,
            content={"detail": f"{type(exc).__name__}: {exc}"},
        )

    @app.get("/network")
    def get_network() -> dict:
        return {
            "variables": [
                {"name": v.name, "states": list(v.states), "kind": v.kind}
                for v in network.dag.variables
            ],
            "edges": [
                {"parent": p, "child": c, "strength": strengths.get((p, c))}
                for p, c in sorted(network.dag.edges)
            ],
            "response_variables": [
                name for name in RESPONSE_VARIABLES
                if any(v.name == name for v in network.dag.variables)
            ],
        }

    @app.post("/query")
    def post_query(request: ApiQueryRequest) -> ApiQueryResponse:
        event = QueryEvent(constraints=_clauses_to_constraints(request.event, "event"))
        evidence = Evidence(
            constraints=_clauses_to_constraints(request.evidence, "evidence")
        )
        n = request.n_samples if request.n_samples is not None else default_samples
        seed = request.seed if request.seed is not None else default_seed
        sampled = lw_query(network, event, evidence, n=n, seed=seed)
        exact_value = None
        if len(network.dag.variables) <= _EXACT_NODE_LIMIT:
            exact_value = exact_query(network, event, evidence).estimate
        return ApiQueryResponse(
            estimate=sampled.estimate,
            ci_low=sampled.ci_low,
            ci_high=sampled.ci_high,
            method=sampled.method,
            n_samples=sampled.n_samples,
            exact=exact_value,
        )

    @app.post("/reverse")
    def post_reverse(request: ApiReverseRequest) -> dict:
        event = QueryEvent(constraints=_clauses_to_constraints(request.event, "event"))
        distribution = reverse_query(network, request.driver, event)
        return {"driver": request.driver, "distribution": distribution}

    @app.get("/scenarios")
    def get_scenarios() -> dict:
        return {"scenarios": [
            {
                "name": s.name,
                "evidence": [
                    {"var": var, "states": sorted(states)}
                    for var, states in s.evidence.constraints.items()
                ],
                "event": [
                    {"var": var, "states": sorted(states)}
                    for var, states in s.event.constraints.items()
                ],
                "n_samples": s.n_samples,
                "seed": s.seed,
            }
            for s in presets
        ]}

    return app


def load_app(network_path: str | Path, default_samples: int = DEFAULT_SAMPLES,
             default_seed: int = 0) -> FastAPI:
    """Build the app from a serialized network document."""
    text = Path(network_path).read_text(encoding="utf-8")
    network, strengths = deserialize_network_with_strengths(text)
    return create_app(network, strengths, default_samples=default_samples,
                      default_seed=default_seed)
