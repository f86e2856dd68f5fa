import random

import pytest

from bratteli import (
    BratteliDiagram,
    StationaryTail,
    br_diagram,
    odometer,
    stationary,
    telescope,
)


@pytest.fixture(scope="session")
def od2():
    return odometer(2)


@pytest.fixture(scope="session")
def br():
    return br_diagram()


@pytest.fixture(scope="session")
def st_ones():
    return stationary([[1, 1], [1, 1]])


@pytest.fixture(scope="session")
def degenerate():
    # a single chain of forced edges; the path space is one point
    return BratteliDiagram([1, 1], [[[1]]], StationaryTail(((1,),)))


@pytest.fixture(scope="session")
def tel_br(br):
    return telescope(br, (0, 2, 4, 6, 8))


@pytest.fixture(scope="session")
def tel_od8(od2):
    # bundle size 8 per level
    return telescope(od2, (0, 3, 6))


@pytest.fixture()
def rng():
    return random.Random(20240811)


def random_explicit_diagram(rng, max_depth=3, max_verts=3, max_mult=2):
    """A random small explicit diagram with no zero rows or columns."""
    depth = rng.randint(1, max_depth)
    counts = [1] + [rng.randint(1, max_verts) for _ in range(depth)]
    mats = []
    for n in range(depth):
        rows, cols = counts[n + 1], counts[n]
        mat = [[rng.randint(0, max_mult) for _ in range(cols)] for _ in range(rows)]
        for v in range(cols):  # fix zero columns
            if all(mat[w][v] == 0 for w in range(rows)):
                mat[rng.randrange(rows)][v] = rng.randint(1, max_mult)
        for w in range(rows):  # fix zero rows
            if all(x == 0 for x in mat[w]):
                mat[w][rng.randrange(cols)] = rng.randint(1, max_mult)
        mats.append(mat)
    return BratteliDiagram(counts, mats)


def random_element(rng, d, level):
    from bratteli import GroupElement

    perms = []
    for h in d.path_counts(level):
        p = list(range(h))
        rng.shuffle(p)
        perms.append(tuple(p))
    return GroupElement(d, level, tuple(perms))


def random_clopen(rng, d, level):
    from bratteli import ClopenSet

    parts = []
    for h in d.path_counts(level):
        parts.append(frozenset(i for i in range(h) if rng.random() < 0.5))
    return ClopenSet(d, level, tuple(parts))
