import random
from pathlib import Path

import pytest

from mackeydim import groups, posets

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def lattice_cache():
    cache = {}

    def get(spec):
        if spec not in cache:
            cache[spec] = groups.subgroup_lattice(groups.parse_group(spec))
        return cache[spec]

    return get


def random_poset(n, rng, edge_prob=0.35):
    labels = [f"p{i}" for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                pairs.append((i, j))
    return posets.FinitePoset.from_covers(labels, pairs)


@pytest.fixture
def rng():
    return random.Random(20260808)
