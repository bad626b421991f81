"""Decompositions of a root system into span-closed subsystems.

Pieces are handled internally as bitmasks over the positive roots (every
span-closed subsystem is closed under negation, so the positive half
determines it).  The solvers are depth-first branch and bound: branch on
the lowest uncovered positive root, prune with the rank of what is still
uncovered, since the remaining pieces must jointly span it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BudgetExceededError, InadmissiblePlaneError, TheoremViolation
from .exactfield import GaussRational, ProjectivePoint1, integer_rank, rank_of_matrix
from .rootsys import (
    RootSubsystem,
    RootSystem,
    SpanOracle,
    build_root_system,
    is_span_closed,
    root_eval,
    subsystem_rank,
)

INDUCED, TYPE1, TYPE2 = "induced", "type1", "type2"
LITERAL, GEOMETRIC = "literal", "geometric"


# --------------------------------------------------------------------------
# bitmask view of subsystems
# --------------------------------------------------------------------------

class PositiveMasks:
    """Translate between full root-index sets and positive-root bitmasks."""

    def __init__(self, system: RootSystem) -> None:
        self.system = system
        self.positive = list(system.positive_roots)
        self.bit = {k: i for i, k in enumerate(self.positive)}
        for k in self.positive:
            self.bit[system.negate(k)] = self.bit[k]
        self.full = (1 << len(self.positive)) - 1
        self._rank_cache: dict[int, int] = {0: 0}

    def mask(self, members: Iterable[int]) -> int:
        m = 0
        for k in members:
            m |= 1 << self.bit[k]
        return m

    def bits(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def members(self, mask: int) -> frozenset[int]:
        out = set()
        for b in self.bits(mask):
            k = self.positive[b]
            out.add(k)
            out.add(self.system.negate(k))
        return frozenset(out)

    def subsystem(self, mask: int) -> RootSubsystem:
        return RootSubsystem(self.system, self.members(mask), True)

    def rank(self, mask: int) -> int:
        r = self._rank_cache.get(mask)
        if r is None:
            r = integer_rank([self.system.roots[self.positive[b]] for b in self.bits(mask)])
            self._rank_cache[mask] = r
        return r


# --------------------------------------------------------------------------
# decompositions
# --------------------------------------------------------------------------

@dataclass
class Decomposition:
    system: RootSystem
    pieces: list[RootSubsystem]
    kind: str
    split: int | None = None  # type2: pieces[:split] overlap-permitted, the rest disjoint
    mode: str | None = None
    lines: list[ProjectivePoint1] | None = None  # induced: [theta(b1) : theta(b2)] per piece

    @property
    def ranks(self) -> list[int]:
        return [subsystem_rank(self.system, p.members) for p in self.pieces]

    @property
    def simple_counts(self) -> list[int]:
        simple = {self.system.simple_root(i) for i in range(self.system.rank)}
        return [len(simple & p.members) for p in self.pieces]

    @property
    def rank_sum(self) -> int:
        return sum(self.ranks)

    def to_json(self) -> dict:
        out = {
            "family": self.system.family,
            "rank": self.system.rank,
            "kind": self.kind,
            "pieces": [p.sorted_members() for p in self.pieces],
            "ranks": self.ranks,
            "rank_sum": self.rank_sum,
        }
        if self.kind == TYPE2:
            out["split"] = self.split
            out["mode"] = self.mode
        if self.lines is not None:
            out["lines"] = [p.to_json() for p in self.lines]
            out["simple_counts"] = self.simple_counts
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Decomposition":
        system = build_root_system(str(obj["family"]).upper(), int(obj["rank"]))
        kind = obj.get("kind", TYPE1)
        if kind not in (INDUCED, TYPE1, TYPE2):
            raise ValueError(f"unknown decomposition kind {kind!r}")
        pieces = []
        for p in obj["pieces"]:
            idx = [int(k) for k in p]
            if any(not 0 <= k < len(system.roots) for k in idx):
                raise ValueError(f"root index out of range in piece {p}")
            pieces.append(RootSubsystem(system, frozenset(idx), False))
        split = obj.get("split")
        if kind == TYPE2 and split is None:
            split = len(pieces)
        return cls(system, pieces, kind, split, obj.get("mode"))


def validate_decomposition(d: Decomposition, mode: str | None = None) -> list[str]:
    """Every violated condition, as readable strings; empty means valid."""
    system = d.system
    everything = frozenset(range(len(system.roots)))
    problems = []
    union = frozenset().union(*(p.members for p in d.pieces)) if d.pieces else frozenset()
    if union != everything:
        problems.append(f"union of pieces misses {len(everything - union)} roots")
    for i, p in enumerate(d.pieces):
        if not p.members:
            problems.append(f"piece {i} is empty")
            continue
        if p.members == everything:
            problems.append(f"piece {i} is not proper")
        if any(system.negate(k) not in p.members for k in p.members):
            problems.append(f"piece {i} is not closed under negation")
        if not is_span_closed(system, p.members):
            problems.append(f"piece {i} is not span closed")

    def overlaps(idx: Sequence[int]) -> list[tuple[int, int]]:
        return [
            (i, j)
            for a, i in enumerate(idx)
            for j in idx[a + 1:]
            if d.pieces[i].members & d.pieces[j].members
        ]

    if d.kind in (INDUCED, TYPE1):
        for i, j in overlaps(list(range(len(d.pieces)))):
            problems.append(f"pieces {i} and {j} are not disjoint")
    elif d.kind == TYPE2:
        split = len(d.pieces) if d.split is None else d.split
        s_idx = list(range(split))
        t_idx = list(range(split, len(d.pieces)))
        if len(d.pieces) < 2:
            problems.append("type-2 decomposition needs s + t >= 2")
        for i, j in overlaps(t_idx):
            problems.append(f"t-part pieces {i} and {j} are not disjoint")
        s_union = frozenset().union(*(d.pieces[i].members for i in s_idx)) if s_idx else frozenset()
        for j in t_idx:
            if d.pieces[j].members & s_union:
                problems.append(f"t-part piece {j} meets the s-part")
        if (mode or d.mode) == GEOMETRIC:
            for k in everything:
                n = sum(k in d.pieces[i].members for i in s_idx)
                if n > 2:
                    problems.append(f"root {k} lies in {n} s-part pieces (at most 2 allowed)")
                    break
    else:
        problems.append(f"unknown kind {d.kind!r}")
    return problems


# --------------------------------------------------------------------------
# decomposition induced by a plane
# --------------------------------------------------------------------------

def induced_decomposition(system: RootSystem, b1: Sequence, b2: Sequence, check: bool = True) -> Decomposition:
    """Group roots by the line ker(theta) cut out on L = span(b1, b2)."""
    b1 = tuple(GaussRational.coerce(x) for x in b1)
    b2 = tuple(GaussRational.coerce(x) for x in b2)
    if rank_of_matrix([b1, b2]) != 2:
        raise InadmissiblePlaneError("basis vectors are linearly dependent")
    classes: dict[ProjectivePoint1, set[int]] = {}
    for k in system.positive_roots:
        v1, v2 = root_eval(system, k, b1), root_eval(system, k, b2)
        if v1.is_zero() and v2.is_zero():
            root = system.roots[k]
            raise InadmissiblePlaneError(f"plane lies in the kernel of root {list(root)}", root)
        cls = classes.setdefault(ProjectivePoint1(v1, v2), set())
        cls.update((k, system.negate(k)))
    keys = sorted(classes, key=lambda p: min(classes[p]))
    pieces = [RootSubsystem(system, frozenset(classes[p]), True) for p in keys]
    d = Decomposition(system, pieces, INDUCED, lines=keys)
    if check:
        s, half, total = len(pieces), len(system.roots) // 2, d.rank_sum
        if not 3 <= s <= half:
            raise TheoremViolation(f"induced decomposition has s = {s}, outside [3, {half}]", d)
        if not system.rank + 1 <= total <= half:
            raise TheoremViolation(f"rank sum {total} outside [{system.rank + 1}, {half}]", d)
    return d


# --------------------------------------------------------------------------
# span-closed subsystem enumeration
# --------------------------------------------------------------------------

DEFAULT_MAX_SUBSYSTEMS = 50_000


def enumerate_span_closed(
    system: RootSystem, max_rank: int | None = None, max_subsystems: int = DEFAULT_MAX_SUBSYSTEMS
) -> list[RootSubsystem]:
    """All proper nonempty span-closed subsystems of rank <= max_rank.

    Ordered by rank ascending, then size descending, then sorted members.
    """
    return [PositiveMasks(system).subsystem(m) for m in _flat_masks(system, max_rank, max_subsystems)]


def _flat_masks(system: RootSystem, max_rank: int | None, max_subsystems: int) -> list[int]:
    masks = PositiveMasks(system)
    if max_rank is None:
        max_rank = system.rank - 1
    if max_rank > system.rank - 1:
        raise ValueError("proper span-closed subsystems have rank at most rank - 1")
    pos_roots = [system.roots[k] for k in masks.positive]
    level = {1 << b for b in range(len(pos_roots))} if max_rank >= 1 else set()
    found: list[tuple[int, int]] = [(1, m) for m in level]
    for r in range(2, max_rank + 1):
        nxt: set[int] = set()
        for flat in level:
            done = flat
            for b in range(len(pos_roots)):
                if done >> b & 1:
                    continue
                oracle = SpanOracle(system, [masks.positive[x] for x in masks.bits(flat)] + [masks.positive[b]])
                closed = 0
                for c, root in enumerate(pos_roots):
                    if oracle.contains(root):
                        closed |= 1 << c
                done |= closed
                nxt.add(closed)
            if len(found) + len(nxt) > max_subsystems:
                raise BudgetExceededError(
                    f"{system.name}: more than {max_subsystems} span-closed subsystems"
                )
        found.extend((r, m) for m in nxt)
        level = nxt
    found.sort(key=lambda rm: (rm[0], -bin(rm[1]).count("1"), sorted(masks.members(rm[1]))))
    return [m for _, m in found]


# --------------------------------------------------------------------------
# solvers
# --------------------------------------------------------------------------

@dataclass
class SolverBudget:
    allow_large: bool = False  # ranks 5 and 6
    max_nodes: int = 5_000_000
    max_subsystems: int = DEFAULT_MAX_SUBSYSTEMS

    def admit(self, system: RootSystem) -> None:
        if system.rank < 2:
            raise ValueError(f"{system.name}: decompositions need rank >= 2")
        if system.rank >= 7:
            raise BudgetExceededError(f"{system.name}: exhaustive decomposition search is refused above rank 6")
        if system.rank >= 5 and not self.allow_large:
            raise BudgetExceededError(f"{system.name}: rank {system.rank} needs allow_large")


@dataclass
class SolverResult:
    value: int
    witness: Decomposition
    explored: int
    mode: str
    proven_optimal: bool
    bounds: dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "mode": self.mode,
            "explored": self.explored,
            "proven_optimal": self.proven_optimal,
            "bounds": dict(self.bounds),
            "witness": self.witness.to_json(),
        }


class _Search:
    def __init__(self, system: RootSystem, budget: SolverBudget) -> None:
        self.system = system
        self.masks = PositiveMasks(system)
        self.budget = budget
        pieces = _flat_masks(system, system.rank - 1, budget.max_subsystems)
        self.pieces = pieces
        self.piece_rank = {m: self.masks.rank(m) for m in pieces}
        nbits = len(self.masks.positive)
        self.containing = [[m for m in pieces if m >> b & 1] for b in range(nbits)]
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceededError(
                f"{self.system.name}: node ceiling {self.budget.max_nodes} reached"
            )


def _pair_partition(masks: PositiveMasks) -> list[int]:
    return [1 << b for b in range(len(masks.positive))]


def f1_solve(system: RootSystem, budget: SolverBudget | None = None) -> SolverResult:
    """Minimal rank sum over partitions into proper span-closed subsystems."""
    budget = budget or SolverBudget()
    budget.admit(system)
    search = _Search(system, budget)
    masks = search.masks
    full = masks.full

    best_pieces = _pair_partition(masks)
    best = [len(best_pieces), best_pieces]

    def dfs(covered: int, cost: int, chosen: list[int]) -> None:
        search.tick()
        if covered == full:
            if cost < best[0]:
                best[0], best[1] = cost, list(chosen)
            return
        uncovered = full & ~covered
        if cost + masks.rank(uncovered) >= best[0]:
            return
        low = (uncovered & -uncovered).bit_length() - 1
        for piece in search.containing[low]:
            if piece & covered:
                continue
            chosen.append(piece)
            dfs(covered | piece, cost + search.piece_rank[piece], chosen)
            chosen.pop()

    dfs(0, 0, [])
    witness = Decomposition(system, [masks.subsystem(m) for m in best[1]], TYPE1)
    result = SolverResult(best[0], witness, search.nodes, TYPE1, True)
    result.bounds = _solver_bounds(system, best[0], upper=True)
    _check_witness(result)
    return result


def f2_solve(system: RootSystem, mode: str = GEOMETRIC, budget: SolverBudget | None = None) -> SolverResult:
    """Minimal rank sum over type-2 decompositions.

    Pieces of the overlap-permitted part may share roots; pieces that end up
    disjoint from every other piece are reported as the disjoint part.  In
    geometric mode no root may lie in more than two pieces.
    """
    if mode not in (LITERAL, GEOMETRIC):
        raise ValueError(f"unknown mode {mode!r}")
    budget = budget or SolverBudget()
    budget.admit(system)
    search = _Search(system, budget)
    masks = search.masks
    full = masks.full
    capped = mode == GEOMETRIC

    best_pieces = _pair_partition(masks)
    best = [len(best_pieces), best_pieces]

    def dfs(once: int, twice: int, cost: int, chosen: list[int]) -> None:
        search.tick()
        if once == full:
            if cost < best[0]:
                best[0], best[1] = cost, list(chosen)
            return
        uncovered = full & ~once
        if cost + masks.rank(uncovered) >= best[0]:
            return
        low = (uncovered & -uncovered).bit_length() - 1
        for piece in search.containing[low]:
            if capped and piece & twice:
                continue
            chosen.append(piece)
            dfs(once | piece, twice | (piece & once), cost + search.piece_rank[piece], chosen)
            chosen.pop()

    dfs(0, 0, 0, [])
    result = SolverResult(best[0], _type2_witness(masks, best[1], mode), search.nodes, mode, True)
    result.bounds = _solver_bounds(system, best[0], upper=False)
    _check_witness(result)
    return result


def _type2_witness(masks: PositiveMasks, chosen: list[int], mode: str) -> Decomposition:
    s_part, t_part = [], []
    for i, m in enumerate(chosen):
        others = 0
        for j, o in enumerate(chosen):
            if j != i:
                others |= o
        (t_part if not m & others else s_part).append(m)
    pieces = [masks.subsystem(m) for m in s_part + t_part]
    return Decomposition(masks.system, pieces, TYPE2, split=len(s_part), mode=mode)


def _solver_bounds(system: RootSystem, value: int, upper: bool) -> dict[str, bool]:
    n = system.rank
    flags = {"value_ge_2n_minus_1": value >= 2 * n - 1, "value_ge_r_plus_1": value >= n + 1}
    if upper:
        flags["value_le_half_card"] = value <= len(system.roots) // 2
    return flags


def _check_witness(result: SolverResult) -> None:
    problems = validate_decomposition(result.witness, result.witness.mode)
    if problems:
        raise AssertionError(f"solver witness is invalid: {problems}")
    if result.witness.rank_sum != result.value:
        raise AssertionError("witness rank sum differs from the reported value")


def extra_root_span_check(system: RootSystem) -> int:
    from .rootsys import an_embedding_and_extra_roots

    return an_embedding_and_extra_roots(system).span_rank


def conic_decomposition(report) -> Decomposition:
    """Type-2 decomposition read off a count report: transversal points first."""
    s_part = [p for p in report.points if p.kind == "transversal"]
    t_part = [p for p in report.points if p.kind == "tangential"]
    pieces = [RootSubsystem(report.system, p.subsystem, True) for p in s_part + t_part]
    return Decomposition(report.system, pieces, TYPE2, split=len(s_part), mode=GEOMETRIC)
