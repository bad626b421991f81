"""Double-precision cross-check of Q1 and Q2.

Independent of the exact engine: every positive root's quadratic is solved
with ``cmath``, all roots are clustered under the chordal metric on P^1,
and each cluster is weighted by the rank of the roots vanishing there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from ..curvecount import ZetaTriple
from ..exactfield import integer_rank

CLUSTER_TOL = 1e-9
BAND = (1e-12, 1e-6)


@dataclass(frozen=True)
class OracleResult:
    q1: int
    q2: int
    near_degenerate: bool
    min_gap: float | None  # smallest chordal distance between distinct clusters


def chordal(p: tuple[complex, complex], q: tuple[complex, complex]) -> float:
    num = abs(p[0] * q[1] - p[1] * q[0])
    return num / (math.hypot(abs(p[0]), abs(p[1])) * math.hypot(abs(q[0]), abs(q[1])))


def quadratic_roots(a: complex, b: complex, c: complex) -> list[tuple[complex, complex]]:
    """Projective roots of a z1^2 + b z1 z2 + c z2^2 with multiplicity."""
    if a == 0:
        return [(1, 0), (-c, b)]
    s = cmath.sqrt(b * b - 4 * a * c)
    if (b.conjugate() * s).real < 0:
        s = -s
    q = -(b + s) / 2
    if q == 0:
        return [(0, 1), (0, 1)]
    return [(q, a), (c, q)]


def float_oracle(
    zeta: ZetaTriple, tol: float = CLUSTER_TOL, band: tuple[float, float] = BAND
) -> OracleResult:
    system = zeta.system
    z = [[float(x) for x in v] for v in zeta.components()]
    points: list[tuple[complex, complex]] = []
    owners: list[int] = []
    for k in system.positive_roots:
        x1, x2, x3 = (sum(c * v[j] for j, c in enumerate(system.roots[k])) for v in z)
        for p in quadratic_roots(complex(x2, x3), complex(2 * x1, 0), complex(-x2, x3)):
            points.append(p)
            owners.append(k)

    parent = list(range(len(points)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    flagged = False
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = chordal(points[i], points[j])
            if band[0] <= d <= band[1]:
                flagged = True
            if d < tol:
                parent[find(i)] = find(j)

    clusters: dict[int, set[int]] = {}
    for i, k in enumerate(owners):
        clusters.setdefault(find(i), set()).add(k)
    reps = {find(i): points[i] for i in range(len(points))}
    keys = list(reps)
    gaps = [chordal(reps[a], reps[b]) for n, a in enumerate(keys) for b in keys[n + 1:]]
    q2 = sum(integer_rank([system.roots[k] for k in roots]) for roots in clusters.values())
    return OracleResult(len(clusters), q2, flagged, min(gaps) if gaps else None)
