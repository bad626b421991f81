from __future__ import annotations

from itertools import combinations

import pytest

from twistorcount.curvecount import ZetaTriple
from twistorcount.exactfield import ZERO, GaussRational
from twistorcount.rootsys import build_root_system


@pytest.fixture(scope="session")
def a2():
    return build_root_system("A", 2)


@pytest.fixture(scope="session")
def a3():
    return build_root_system("A", 3)


def root_index(system, *coeffs):
    return system.index[tuple(coeffs)]


def zeta_of(system, z1, z2, z3) -> ZetaTriple:
    return ZetaTriple.of(system, z1, z2, z3)


def det_by_expansion(m: list[list[GaussRational]]) -> GaussRational:
    """Laplace expansion along the first row; small matrices only."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = ZERO
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_by_expansion(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def rank_by_minors(rows) -> int:
    """Largest k with a nonzero k x k minor."""
    if not rows:
        return 0
    m = [[GaussRational.coerce(x) for x in r] for r in rows]
    nr, nc = len(m), len(m[0])
    for k in range(min(nr, nc), 0, -1):
        for rs in combinations(range(nr), k):
            for cs in combinations(range(nc), k):
                if not det_by_expansion([[m[i][j] for j in cs] for i in rs]).is_zero():
                    return k
    return 0
