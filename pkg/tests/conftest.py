import numpy as np
import pytest

import aqsp as A


@pytest.fixture
def g4():
    """Diamond with two s-t paths: the linearly shorter one carries a big
    interaction cost, so the compound optimum (11) goes the other way."""
    return A.build_graph(
        4,
        [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 10.0)],
        {(0, 1, 3): 10.0, (0, 2, 3): 0.0},
    )


def make_detour_graph(shortcut_penalty):
    """Five-node graph where the direct hop 1->4 pays ``shortcut_penalty``
    while the loop 1->2->3->1->4 pays nothing extra; unit arc costs."""
    return A.build_graph(
        5,
        [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0), (1, 4, 1.0)],
        {(0, 1, 4): shortcut_penalty},
    )


@pytest.fixture
def detour_graph():
    return make_detour_graph(100.0)


def random_instance(n, p, seed):
    g = A.gen_erdos_renyi(n, p, seed)
    return g, 0, n - 1


def seeds(master, count):
    rng = np.random.default_rng(master)
    return [int(s) for s in rng.integers(0, 1 << 30, size=count)]
