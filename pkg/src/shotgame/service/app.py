"""FastAPI app exposing scenario evaluation and the bundled fixtures.

Models are loaded once at startup and shared read-only across requests;
evaluation is pure, so concurrent identical requests return identical bodies.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from .. import __version__
from .engine import ScenarioEngine, ScenarioFixture, load_bundled_fixtures
from .schemas import (
    FixtureListResponse,
    FixtureResponse,
    FixtureSummary,
    HealthResponse,
    ScenarioRequest,
    ScenarioResponse,
)


def create_app(engine: ScenarioEngine | None = None,
               fixtures: list[ScenarioFixture] | None = None,
               webui_dir: str | Path | None = None) -> FastAPI:
    engine = engine or ScenarioEngine.load()
    fixtures = load_bundled_fixtures() if fixtures is None else fixtures
    by_id = {f.id: f for f in fixtures}

    app = FastAPI(title="shotgame scenario service", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/fixtures", response_model=FixtureListResponse)
    def list_fixtures() -> FixtureListResponse:
        return FixtureListResponse(fixtures=[
            FixtureSummary(id=f.id, title=f.title, description=f.description)
            for f in fixtures
        ])

    @app.get("/fixtures/{fixture_id}", response_model=FixtureResponse)
    def get_fixture(fixture_id: str) -> FixtureResponse:
        f = by_id.get(fixture_id)
        if f is None:
            raise HTTPException(status_code=404, detail=f"unknown fixture {fixture_id!r}")
        return FixtureResponse(id=f.id, title=f.title, description=f.description,
                               request=f.request)

    @app.post("/scenario/evaluate", response_model=ScenarioResponse)
    def evaluate(req: ScenarioRequest) -> ScenarioResponse:
        return engine.evaluate(req)

    if webui_dir is not None and Path(webui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(webui_dir), html=True), name="webui")

    return app
