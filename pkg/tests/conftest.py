import random

import pytest

from gridcw.deltaspec import BondSource, DeltaSpec
from gridcw.grid import GridVertex


def fixture_colouring_1():
    """Published worked colouring on a 7-column window of chain links."""
    blue = [(1, 4), (1, 15), (1, 22), (2, 4), (2, 21), (2, 22), (3, 3), (3, 20), (3, 21)]
    yellow = [(2, 15), (3, 12), (3, 13), (3, 14), (4, 3), (4, 11), (4, 18), (4, 19),
              (5, 3), (5, 9), (5, 10), (5, 11), (5, 18), (6, 3), (6, 9), (6, 18),
              (7, 1), (7, 2), (7, 3), (7, 5), (7, 6), (7, 7), (7, 8), (7, 9),
              (7, 16), (7, 18)]
    green = [(1, 3), (1, 5), (1, 9), (1, 12), (1, 17), (1, 18), (1, 23), (1, 24),
             (2, 1), (2, 7), (2, 16), (2, 23), (3, 6), (3, 7), (3, 22), (4, 4), (4, 21)]
    red = [(2, 19), (3, 8), (3, 17), (3, 24), (4, 1), (4, 8), (4, 14), (4, 24),
           (5, 5), (5, 6), (5, 7), (5, 13), (5, 14), (5, 22), (5, 23), (5, 24),
           (6, 4), (6, 11), (6, 12), (6, 13), (6, 14), (6, 21), (7, 20), (7, 21), (7, 24)]
    expected = {}
    for vs, c in ((blue, "blue"), (yellow, "yellow"), (green, "green"), (red, "red")):
        for v in vs:
            expected[GridVertex(*v)] = c
    spec = DeltaSpec.make(alpha_period="2", gamma_period="0")
    return spec, 1, 7, expected


def fixture_colouring_3():
    """Published worked colouring with a 222000022 letter window; the
    drawn green/pink split inside one slice is partly arbitrary, so the
    authoritative comparison is after merging pink into green."""
    blue = [(1, 24), (2, 23), (3, 21), (4, 12), (5, 12), (6, 12), (7, 12), (8, 12),
            (2, 24), (3, 22), (3, 23),
            (4, 13), (4, 14), (4, 15), (4, 16), (4, 17), (4, 18), (4, 19), (4, 20), (4, 21),
            (5, 14), (5, 15), (5, 18), (5, 19), (5, 20),
            (6, 13), (6, 14), (6, 15), (6, 18), (6, 19),
            (7, 15), (7, 16), (7, 19), (7, 21), (8, 15), (8, 19), (8, 21)]
    yellow = [(9, 8), (9, 9), (9, 10), (9, 11), (9, 12), (10, 5), (10, 6), (10, 7), (10, 8)]
    green = [(1, 36), (2, 35), (3, 33), (4, 30), (5, 30), (6, 30), (7, 30), (8, 30), (9, 19),
             (1, 35), (2, 33), (3, 31), (4, 28), (4, 27), (4, 26), (4, 25),
             (5, 27), (6, 27), (7, 27), (8, 27), (9, 16)]
    pink = [(5, 23), (5, 26), (6, 29), (6, 26), (6, 25), (6, 24), (6, 23),
            (7, 29), (7, 26), (7, 25), (7, 24), (7, 23), (8, 24), (8, 23)]
    red = [(3, 36), (4, 35), (5, 35), (6, 35), (7, 35), (8, 35), (9, 34)]
    expected = {}
    for vs, c in ((blue, "blue"), (yellow, "yellow"), (green, "green"),
                  (pink, "pink"), (red, "red")):
        for v in vs:
            expected[GridVertex(*v)] = c
    spec = DeltaSpec.make(alpha_prefix="222000022", alpha_period="0", gamma_period="0")
    return spec, 1, 10, expected


CATALOG_NAMES = [
    "bipartite-permutation", "unit-interval", "bichain", "split-permutation",
    "binary-alpha-periodic", "quaternary-alpha-recurrent", "clique-columns",
    "hub-bonds", "offset-bonds", "odd-parity-bonds", "even-parity-bonds",
    "range-bonds",
]


def random_bond_source(rng: random.Random, top: int = 30) -> BondSource:
    pairs = set()
    for _ in range(rng.randint(1, 12)):
        x = rng.randint(1, top - 2)
        y = rng.randint(x + 2, top)
        pairs.add((x, y))
    return BondSource.explicit(pairs)


def random_spec(rng: random.Random) -> DeltaSpec:
    alpha = "".join(rng.choice("0123") for _ in range(rng.randint(1, 4)))
    gamma = "".join(rng.choice("01") for _ in range(rng.randint(1, 2)))
    beta = rng.choice([
        BondSource.empty(),
        BondSource.offset(rng.randint(2, 4)),
        BondSource.distance_range(rng.randint(2, 4)),
        BondSource("parity-odd-diff"),
        BondSource("parity-even-diff"),
        random_bond_source(rng),
    ])
    return DeltaSpec.make(alpha_period=alpha, beta=beta, gamma_period=gamma)


@pytest.fixture
def rng():
    return random.Random(20240811)
