import os

import numpy as np
import pytest

from irrcontact.graph_gen import PlanarCandidate, generate_candidates
from irrcontact.pipeline import RunManifest, enumerate_records

OCTAHEDRON = PlanarCandidate(6, (
    (2, 4, 3, 5), (2, 5, 3, 4), (0, 5, 1, 4), (0, 4, 1, 5), (0, 2, 1, 3), (0, 3, 1, 2),
))


def octahedron_points():
    return np.vstack([np.eye(3), -np.eye(3)])


def cube_points():
    p = np.array([(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)], dtype=float)
    return p / np.sqrt(3.0)


@pytest.fixture(scope="session")
def octahedron():
    return OCTAHEDRON


@pytest.fixture(scope="session")
def record_cache(tmp_path_factory):
    """Cache directory for enumerations; IRRCONTACT_CACHE reuses results
    between sessions."""
    return os.environ.get("IRRCONTACT_CACHE") or str(tmp_path_factory.mktemp("cache"))


@pytest.fixture(scope="session")
def records_by_n(record_cache):
    """Full enumerations for n = 6..9, computed once per session."""
    return {n: enumerate_records(RunManifest(n), cache_dir=record_cache) for n in (6, 7, 8, 9)}


@pytest.fixture(scope="session")
def candidates_by_n():
    return {n: list(generate_candidates(n)) for n in (4, 5, 6, 7, 8)}
