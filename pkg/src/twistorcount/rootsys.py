"""Simply-laced root systems in simple-root coordinates.

Roots are integer coefficient vectors with respect to the simple roots.
Vectors of the complexified Cartan algebra are stored by the values the
simple roots take on them, so evaluating a root is a dot product.
Cartan matrices follow Bourbaki numbering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .errors import RootSystemError
from .exactfield import ZERO, GaussRational, integer_rank

Root = tuple[int, ...]

_EXPECTED_SIZE = {
    "A": lambda n: n * (n + 1),
    "D": lambda n: 2 * n * (n - 1),
    "E": lambda n: {6: 72, 7: 126, 8: 240}[n],
}


def _edges(family: str, n: int) -> list[tuple[int, int]]:
    if family == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if family == "D":
        chain = [(i, i + 1) for i in range(n - 2)]
        return chain + [(n - 3, n - 1)]
    if family == "E":
        # 1-3-4-5-6-7-8 with 2 hanging off 4 (zero-based below)
        chain = [(0, 2)] + [(i, i + 1) for i in range(2, n - 1)]
        return chain + [(1, 3)]
    raise RootSystemError(f"unknown family {family!r}")


def check_legal(family: str, n: int) -> None:
    ok = (
        (family == "A" and n >= 1)
        or (family == "D" and n >= 3)
        or (family == "E" and n in (6, 7, 8))
    )
    if not ok:
        raise RootSystemError(f"{family}{n} is not a simply-laced irreducible root system")


def cartan_matrix(family: str, n: int) -> tuple[tuple[int, ...], ...]:
    check_legal(family, n)
    m = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in _edges(family, n):
        m[i][j] = m[j][i] = -1
    return tuple(tuple(row) for row in m)


def reflect(theta: Root, i: int, cartan: Sequence[Sequence[int]]) -> Root:
    """Simple reflection s_i(theta) = theta - <theta, alpha_i> alpha_i."""
    pairing = sum(c * cartan[j][i] for j, c in enumerate(theta))
    if pairing == 0:
        return theta
    out = list(theta)
    out[i] -= pairing
    return tuple(out)


@dataclass(frozen=True, eq=False)
class RootSystem:
    family: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    roots: tuple[Root, ...]
    positive_roots: tuple[int, ...]
    index: dict = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def __len__(self) -> int:
        return len(self.roots)

    def negate(self, idx: int) -> int:
        return self.index[tuple(-c for c in self.roots[idx])]

    def is_positive(self, idx: int) -> bool:
        return any(c > 0 for c in self.roots[idx])

    def simple_root(self, i: int) -> int:
        return self.index[tuple(int(j == i) for j in range(self.rank))]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "roots": [list(r) for r in self.roots],
            "cartan": [list(r) for r in self.cartan],
        }


@lru_cache(maxsize=None)
def build_root_system(family: str, n: int) -> RootSystem:
    """Close the simple roots under simple reflections."""
    family = family.upper()
    cartan = cartan_matrix(family, n)
    simple = [tuple(int(j == i) for j in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for theta in frontier:
            for i in range(n):
                r = reflect(theta, i, cartan)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    roots = tuple(sorted(seen))
    for r in roots:
        if not (all(c >= 0 for c in r) or all(c <= 0 for c in r)):
            raise AssertionError(f"root {r} is not sign coherent")
    expected = _EXPECTED_SIZE[family](n)
    if len(roots) != expected:
        raise AssertionError(f"{family}{n}: closure gave {len(roots)} roots, expected {expected}")
    index = {r: k for k, r in enumerate(roots)}
    positive = tuple(k for k, r in enumerate(roots) if any(c > 0 for c in r))
    return RootSystem(family, n, cartan, roots, positive, index)


def root_system_from_json(obj: dict) -> RootSystem:
    system = build_root_system(str(obj["family"]), int(obj["rank"]))
    if "roots" in obj and [tuple(r) for r in obj["roots"]] != list(system.roots):
        raise RootSystemError("root list does not match the canonical construction")
    return system


# --------------------------------------------------------------------------
# Evaluation and subsystems
# --------------------------------------------------------------------------

HVector = tuple  # tuple[GaussRational | Fraction, ...] of length rank


def root_eval(system: RootSystem, theta: int, lam: Sequence) -> GaussRational:
    coeffs = system.roots[theta]
    if len(lam) != system.rank:
        raise ValueError(f"vector has length {len(lam)}, expected {system.rank}")
    total = ZERO
    for c, x in zip(coeffs, lam):
        if c:
            total = total + GaussRational.coerce(x) * c
    return total


def real_root_eval(coeffs: Root, vec: Sequence[Fraction]) -> Fraction:
    return sum((c * x for c, x in zip(coeffs, vec) if c), Fraction(0))


@dataclass(frozen=True)
class RootSubsystem:
    parent: RootSystem = field(compare=False, repr=False)
    members: frozenset[int]
    span_closed: bool = False

    def __len__(self) -> int:
        return len(self.members)

    def positive(self) -> list[int]:
        return sorted(i for i in self.members if self.parent.is_positive(i))

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


def _nullspace_basis(rows: Sequence[Sequence[int]], width: int) -> list[tuple[int, ...]]:
    """Integer vectors w with row . w = 0 for every row."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * width
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fcol]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        basis.append(tuple(int(x * den) for x in v))
    return basis


class SpanOracle:
    """Membership test for span_R of a fixed set of roots."""

    def __init__(self, system: RootSystem, generators: Iterable[int]) -> None:
        gens = [system.roots[i] for i in generators]
        self.rank = integer_rank(gens) if gens else 0
        self._annihilator = _nullspace_basis(gens, system.rank) if gens else None
        self._width = system.rank

    def contains(self, vec: Root) -> bool:
        if self._annihilator is None:
            return not any(vec)
        return all(sum(a * b for a, b in zip(w, vec)) == 0 for w in self._annihilator)


def span_closure(system: RootSystem, subset: Iterable[int]) -> RootSubsystem:
    """Phi intersected with the real span of ``subset``."""
    subset = list(subset)
    if not subset:
        raise ValueError("span_closure needs a nonempty subset")
    oracle = SpanOracle(system, subset)
    members = frozenset(k for k, r in enumerate(system.roots) if oracle.contains(r))
    return RootSubsystem(system, members, True)


def is_span_closed(system: RootSystem, members: Iterable[int]) -> bool:
    members = frozenset(members)
    if not members:
        return True
    return span_closure(system, members).members == members


def subsystem_rank(system: RootSystem, members: Iterable[int]) -> int:
    rows = [system.roots[i] for i in members]
    return integer_rank(rows) if rows else 0


def phi_lambda(system: RootSystem, lam: Sequence) -> RootSubsystem:
    """Roots vanishing at ``lam``; certified span closed."""
    members = frozenset(k for k in range(len(system.roots)) if root_eval(system, k, lam).is_zero())
    if members and span_closure(system, members).members != members:
        raise AssertionError("kernel subsystem is not span closed")
    return RootSubsystem(system, members, True)


# --------------------------------------------------------------------------
# A_n inside a rank n+1 system
# --------------------------------------------------------------------------

def an_chain(system: RootSystem) -> list[int]:
    """Zero-based simple-root indices spanning the embedded A_n."""
    n = system.rank - 1
    if system.rank < 2:
        raise RootSystemError("need rank at least 2")
    if system.family in ("A", "D"):
        return list(range(n))
    if system.family == "E":
        return [0] + list(range(2, system.rank))
    raise RootSystemError(f"unsupported system {system.name}")


@dataclass(frozen=True)
class ExtraRoots:
    an: RootSubsystem
    extra: frozenset[int]
    span_rank: int


def an_embedding_and_extra_roots(system: RootSystem) -> ExtraRoots:
    chain = an_chain(system)
    an = span_closure(system, [system.simple_root(i) for i in chain])
    n = len(chain)
    if len(an) != n * (n + 1):
        raise AssertionError(f"chain in {system.name} does not span an A{n}")
    extra = frozenset(range(len(system.roots))) - an.members
    return ExtraRoots(an, extra, subsystem_rank(system, extra))
