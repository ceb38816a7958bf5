from .app import create_app
from .engine import ScenarioEngine, load_bundled_fixtures

__all__ = ["create_app", "ScenarioEngine", "load_bundled_fixtures"]
