import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from continua import gallery

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def tree_from_seed(seed: int, **kw):
    return gallery.random_tree(np.random.default_rng(seed), **kw)


def grid_graph(n: int = 3, spacing: float = 1.0):
    """n x n lattice of points joined to their right and upper neighbours."""
    verts = [[i * spacing, j * spacing] for j in range(n) for i in range(n)]
    edges = []
    for j in range(n):
        for i in range(n):
            v = j * n + i
            if i + 1 < n:
                edges.append((v, v + 1))
            if j + 1 < n:
                edges.append((v, v + n))
    from continua.graph import EmbeddedGraph

    return EmbeddedGraph(verts, edges)


@pytest.fixture
def named_graphs():
    return {
        "segment": gallery.segment(),
        "tripod": gallery.tripod(),
        "l_shape": gallery.l_shape(),
        "square": gallery.square_boundary(),
        "heptagon": gallery.polygon(7),
        "64-gon": gallery.polygon(64),
        "theta": gallery.theta_graph(),
        "grid": grid_graph(3),
        "v_shape": gallery.v_shape(math.radians(40)),
    }
