"""Shared instance builders for the test suite."""

import numpy as np
import pytest

from haarfht.chain import chain_from_parent_maps
from haarfht.graphs import make_graph


@pytest.fixture
def pair_chain8():
    """Balanced 8 -> 4 -> 2 chain with consecutive-id clusters."""
    return balanced_chain()


@pytest.fixture
def paired_graph8():
    """8-vertex graph whose heavy pairs coarsen to the balanced chain."""
    return make_graph(
        8,
        [(0, 1, 2.0), (2, 3, 2.0), (4, 5, 2.0), (6, 7, 2.0),
         (1, 2, 1.0), (3, 4, 1.0), (5, 6, 1.0)],
    )


def balanced_chain(levels: int = 3):
    """Dyadic chain 2^(levels-1) <- ... <- 2 with consecutive-id pairs."""
    parents = []
    for i in range(1, levels):
        n = 2 ** (i + 1)
        parents.append(np.repeat(np.arange(n // 2), 2))
    return chain_from_parent_maps(parents, 2 ** levels)


def er_graph(n: int, p: float, seed: int, weighted: bool = False):
    """Erdos-Renyi graph; weights uniform in (0.5, 2) when weighted."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    iu, iv = iu[keep], iv[keep]
    if weighted:
        ws = rng.uniform(0.5, 2.0, size=len(iu))
    else:
        ws = np.ones(len(iu))
    return make_graph(n, zip(iu, iv, ws))


def random_chain(n: int, rng: np.random.Generator):
    """Random parent maps with singleton and size>=3 clusters mixed in."""
    parents = []
    cur = n
    while cur > 1:
        target = max(1, int(cur * rng.uniform(0.3, 0.7)))
        if target >= cur:
            target = cur - 1
        pm = np.concatenate([np.arange(target), rng.integers(0, target, size=cur - target)])
        rng.shuffle(pm)
        parents.append(pm)
        cur = target
        if rng.random() < 0.15:
            break
    parents.reverse()
    return chain_from_parent_maps(parents, n)
