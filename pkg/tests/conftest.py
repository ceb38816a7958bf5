import pytest

from shotgame.ingest import load_events, load_freeze_frames, split_dataset
from shotgame.service.engine import ScenarioEngine, load_bundled_fixtures

from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
CORPUS = REPO / "fixtures" / "corpus"


@pytest.fixture(scope="session")
def corpus_events():
    return load_events(CORPUS / "events")


@pytest.fixture(scope="session")
def corpus_frames():
    return load_freeze_frames(CORPUS / "three-sixty")


@pytest.fixture(scope="session")
def corpus_split(corpus_events):
    return split_dataset(corpus_events, seed=42)


@pytest.fixture(scope="session")
def engine():
    return ScenarioEngine.load()


@pytest.fixture(scope="session")
def bundled_fixtures():
    return {f.id: f for f in load_bundled_fixtures()}
