import json
from pathlib import Path

import pytest

from sectorbound import reference

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "sectorbound" / "data"


@pytest.fixture(scope="session")
def josephson_config():
    return reference.josephson_config()


@pytest.fixture(scope="session")
def josephson_text():
    return (DATA_DIR / "josephson.json").read_text(encoding="utf-8")


@pytest.fixture()
def tiny_search_doc():
    """Config document factory with a small tau1 grid for fast CLI tests."""

    def make(**overrides):
        doc = json.loads(json.dumps(reference.JOSEPHSON_CONFIG))
        doc["tau1"] = {"search": {"grid_min": 0.25, "grid_max": 4.0,
                                  "grid_points": 5, "refine_iters": 4}}
        doc.update(overrides)
        return doc

    return make


@pytest.fixture()
def write_config(tmp_path):
    def write(doc, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
        return path

    return write
