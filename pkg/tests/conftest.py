import random

import pytest

from leolat import Constellation, ConstellationConfig, NodeRef, SnapshotGraph, TopologyParams

# Distance that makes one edge weigh exactly 1 ms at the vacuum speed of light.
KM_PER_MS = 299.792458


@pytest.fixture(scope="session")
def default_cfg():
    return ConstellationConfig()


@pytest.fixture(scope="session")
def default_constellation(default_cfg):
    return Constellation(default_cfg)


@pytest.fixture(scope="session")
def small_constellation():
    # 4 planes x 6 sats: small enough for all-pairs oracles.
    return Constellation(ConstellationConfig(num_planes=4, sats_per_plane=6))


@pytest.fixture
def default_params():
    return TopologyParams()


def random_snapshot(rng: random.Random, max_nodes: int = 10, max_edges: int = 20) -> SnapshotGraph:
    """Random connected-or-not weighted graph for routing cross-checks."""
    n = rng.randint(2, max_nodes)
    nodes = [NodeRef.ground(f"n{k:02d}") for k in range(n)]
    possible = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(possible)
    n_edges = rng.randint(1, min(max_edges, len(possible)))
    edges = [
        (nodes[i], nodes[j], rng.uniform(0.1, 2000.0))
        for i, j in possible[:n_edges]
    ]
    return SnapshotGraph.from_edge_list(edges, nodes=nodes)
