"""Fiberwise rational-curve counts for the twistor space of X_zeta.

For each root theta the period map composed with theta is the binary
quadratic

    q_theta(z1, z2) = theta(z2' + i z3') z1^2 + 2 theta(z1') z1 z2
                      - theta(z2' - i z3') z2^2,

where (z1', z2', z3') = zeta.  A twistor parameter u = [z1 : z2] carries
rational curves iff some q_theta vanishes there, and it carries exactly
rank Phi_u of them, Phi_u being the roots whose quadratic vanishes at u.
Everything below is exact over Q(i).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

from .errors import InadmissibleZetaError, RankMismatchError, TheoremViolation
from .exactfield import (
    ONE,
    ZERO,
    BinaryQuadratic,
    GaussRational,
    ProjectivePoint1,
    distinct_root_count,
    exact_divide,
    form_gcd,
    format_rational,
    linear_factor,
    parse_rational,
    rank_of_matrix,
    squarefree_root_count,
)
from .rootsys import RootSystem, build_root_system, real_root_eval, subsystem_rank

log = logging.getLogger(__name__)

RealVector = tuple  # tuple[Fraction, ...]


# --------------------------------------------------------------------------
# zeta
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaTriple:
    system: RootSystem = field(compare=False)
    zeta1: RealVector
    zeta2: RealVector
    zeta3: RealVector

    def __post_init__(self) -> None:
        for k, vec in enumerate(self.components(), 1):
            if len(vec) != self.system.rank:
                raise ValueError(f"zeta{k} has length {len(vec)}, expected {self.system.rank}")

    @classmethod
    def of(cls, system: RootSystem, z1: Iterable, z2: Iterable, z3: Iterable) -> "ZetaTriple":
        conv = lambda v: tuple(Fraction(x) for x in v)  # noqa: E731
        return cls(system, conv(z1), conv(z2), conv(z3))

    def components(self) -> tuple[RealVector, RealVector, RealVector]:
        return (self.zeta1, self.zeta2, self.zeta3)

    def root_triple(self, theta: int) -> tuple[Fraction, Fraction, Fraction]:
        c = self.system.roots[theta]
        return tuple(real_root_eval(c, v) for v in self.components())  # type: ignore[return-value]

    def violating_root(self) -> int | None:
        for k in self.system.positive_roots:
            if not any(self.root_triple(k)):
                return k
        return None

    @property
    def admissible(self) -> bool:
        return self.violating_root() is None

    def require_admissible(self) -> None:
        k = self.violating_root()
        if k is not None:
            root = self.system.roots[k]
            raise InadmissibleZetaError(f"root {list(root)} vanishes on zeta1, zeta2 and zeta3", root)

    def to_json(self) -> dict:
        return {
            "family": self.system.family,
            "rank": self.system.rank,
            "zeta": [[format_rational(x) for x in v] for v in self.components()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ZetaTriple":
        system = build_root_system(str(obj["family"]).upper(), int(obj["rank"]))
        rows = obj["zeta"]
        if not isinstance(rows, list) or len(rows) != 3:
            raise ValueError("'zeta' must be a list of three vectors")
        vecs = [tuple(parse_rational(x) for x in row) for row in rows]
        return cls(system, *vecs)


def rank_of_zeta(zeta: ZetaTriple) -> int:
    zeta.require_admissible()
    return rank_of_matrix(zeta.components())


# --------------------------------------------------------------------------
# period map
# --------------------------------------------------------------------------

def period_quadratic(zeta: ZetaTriple, theta: int) -> BinaryQuadratic:
    x1, x2, x3 = zeta.root_triple(theta)
    return BinaryQuadratic(GaussRational(x2, x3), GaussRational(2 * x1), GaussRational(-x2, x3))


def period_eval(zeta: ZetaTriple, z1, z2) -> tuple[GaussRational, ...]:
    z1 = GaussRational.coerce(z1)
    z2 = GaussRational.coerce(z2)
    if z1.is_zero() and z2.is_zero():
        raise ValueError("the lift (0, 0) does not represent a point of P^1")
    w1, w2, w3 = z1 * z1, z1 * z2 * 2, z2 * z2
    return tuple(
        GaussRational(b, c) * w1 + w2 * a - GaussRational(b, -c) * w3
        for a, b, c in zip(*zeta.components())
    )


def rotation_tilde(zeta: ZetaTriple, u) -> tuple[RealVector, RealVector]:
    """Components 2 and 3 of the rotated parameter for the fiber over finite u.

    The fiber of the twistor space over u is biholomorphic to (X, I) for
    the rotated parameter; the identity checked on return is
    rot2 + i rot3 = period_eval(zeta, 1, u).
    """
    u = GaussRational.coerce(u)
    u1, u2 = u.re, u.im
    z1, z2, z3 = zeta.components()
    rot2 = tuple(2 * u1 * a + (1 - u1 * u1 + u2 * u2) * b - 2 * u1 * u2 * c for a, b, c in zip(z1, z2, z3))
    rot3 = tuple(2 * u2 * a - 2 * u1 * u2 * b + (1 + u1 * u1 - u2 * u2) * c for a, b, c in zip(z1, z2, z3))
    lhs = tuple(GaussRational(p, q) for p, q in zip(rot2, rot3))
    if lhs != period_eval(zeta, ONE, u):
        raise AssertionError("rotation identity failed")
    return rot2, rot3


def rotation_tilde_at_infinity(zeta: ZetaTriple) -> tuple[RealVector, RealVector]:
    """The u = oo variant: (X, -I) matches zeta with its second component negated."""
    rot2 = tuple(-b for b in zeta.zeta2)
    rot3 = zeta.zeta3
    lhs = tuple(GaussRational(p, q) for p, q in zip(rot2, rot3))
    if lhs != period_eval(zeta, ZERO, ONE):
        raise AssertionError("rotation identity at infinity failed")
    return rot2, rot3


# --------------------------------------------------------------------------
# incidence
# --------------------------------------------------------------------------

TANGENTIAL = "tangential"
TRANSVERSAL = "transversal"


@dataclass(frozen=True)
class SpecialPoint:
    """A twistor parameter whose fiber contains rational curves.

    ``location`` is None for roots of a class residual that were counted
    without being constructed; ``private`` then names (class id, slot).
    """

    location: ProjectivePoint1 | None
    private: tuple[int, int] | None
    multiplicity: dict  # class id -> 1 | 2
    subsystem: frozenset[int]
    subsystem_rank: int

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(sorted(self.multiplicity))

    @property
    def kind(self) -> str:
        if all(m == 2 for m in self.multiplicity.values()):
            return TANGENTIAL
        return TRANSVERSAL


@dataclass
class CurveCountReport:
    system: RootSystem
    rank_zeta: int | None
    classes: list[tuple[int, ...]]  # positive root indices per line class
    points: list[SpecialPoint]
    bounds: dict[str, bool] = field(default_factory=dict)

    @property
    def q1(self) -> int:
        return len(self.points)

    @property
    def q2(self) -> int:
        return sum(p.subsystem_rank for p in self.points)

    @property
    def s_count(self) -> int:
        return sum(p.kind == TRANSVERSAL for p in self.points)

    @property
    def t_count(self) -> int:
        return sum(p.kind == TANGENTIAL for p in self.points)

    @property
    def bounds_ok(self) -> bool:
        return all(self.bounds.values())

    def to_json(self) -> dict:
        points = []
        for p in self.points:
            entry: dict = {}
            if p.location is not None:
                entry["location"] = p.location.to_json()
            else:
                entry["private"] = {"class": p.private[0], "slot": p.private[1]}
            entry["classes"] = [list(self.classes[c]) for c in p.classes]
            entry["kind"] = p.kind
            entry["subsystem_rank"] = p.subsystem_rank
            points.append(entry)
        return {
            "family": self.system.family,
            "rank": self.system.rank,
            "rank_zeta": self.rank_zeta,
            "q1": self.q1,
            "q2": self.q2,
            "s_count": self.s_count,
            "t_count": self.t_count,
            "points": points,
            "bounds": dict(self.bounds),
        }


def _resultant(p: BinaryQuadratic, q: BinaryQuadratic) -> GaussRational:
    """Sylvester resultant of two binary quadratics (zero iff a common root)."""
    ac = p.a * q.c - q.a * p.c
    ab = p.a * q.b - q.a * p.b
    bc = p.b * q.c - q.b * p.c
    return ac * ac - ab * bc


def _root_of_linear(g) -> ProjectivePoint1:
    g0, g1 = g.coeffs
    return ProjectivePoint1(-g1, g0)


def incidence(system: RootSystem, forms: dict[int, BinaryQuadratic]) -> CurveCountReport:
    """Special points of a family of per-root quadratics, without bound checks.

    ``forms`` maps positive root indices to nonzero quadratics.  Roots whose
    forms are proportional form one line class; distinct classes meet only
    in exact Q(i)-points, found as degree-one gcds.
    """
    by_key: dict[BinaryQuadratic, list[int]] = {}
    for k in sorted(forms):
        by_key.setdefault(forms[k].monic(), []).append(k)
    classes = [tuple(v) for v in by_key.values()]
    reps = [forms[c[0]] for c in classes]
    class_roots = []
    for c in classes:
        full = set(c) | {system.negate(k) for k in c}
        class_roots.append(frozenset(full))

    shared: dict[ProjectivePoint1, set[int]] = {}
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            if not _resultant(reps[i], reps[j]).is_zero():
                continue
            g = form_gcd(reps[i], reps[j])
            if g.degree != 1:
                raise AssertionError("distinct line classes with proportional forms")
            shared.setdefault(_root_of_linear(g), set()).update((i, j))

    multiplicity: dict[ProjectivePoint1, dict[int, int]] = {p: {} for p in shared}
    private_points: list[SpecialPoint] = []
    for cid, rep in enumerate(reps):
        residual = rep
        for p in sorted(shared, key=ProjectivePoint1.sort_key):
            if cid not in shared[p]:
                continue
            lin = linear_factor(p)
            mult = 0
            while residual.degree > 0 and residual.at(p).is_zero():
                residual = exact_divide(residual, lin)
                mult += 1
            multiplicity[p][cid] = mult
        rank_c = subsystem_rank(system, class_roots[cid])
        if residual.degree == 1:
            private_points.append(
                SpecialPoint(_root_of_linear(residual), None, {cid: 1}, class_roots[cid], rank_c)
            )
        elif residual.degree == 2:
            count, double = distinct_root_count(BinaryQuadratic(*residual.coeffs))
            if count == 1:
                private_points.append(SpecialPoint(double, None, {cid: 2}, class_roots[cid], rank_c))
            else:
                for slot in range(2):
                    private_points.append(SpecialPoint(None, (cid, slot), {cid: 1}, class_roots[cid], rank_c))

    points = []
    for p in sorted(shared, key=ProjectivePoint1.sort_key):
        members = frozenset().union(*(class_roots[c] for c in multiplicity[p]))
        points.append(SpecialPoint(p, None, multiplicity[p], members, subsystem_rank(system, members)))
    points.extend(private_points)
    return CurveCountReport(system, None, classes, points)


def theorem_bounds(rank_zeta: int, q1: int, q2: int, s: int, t: int, r: int, card: int) -> dict[str, bool]:
    """Flags for every counting bound that applies at this rank of zeta."""
    flags = {"tally_s_plus_t": s + t == q1}
    if rank_zeta == 1:
        flags.update(rank1_q1_eq_2=q1 == 2, rank1_q2_eq_2r=q2 == 2 * r)
    elif rank_zeta == 2:
        flags.update(
            rank2_q1_ge_4=q1 >= 4,
            rank2_q1_le_card=q1 <= card,
            rank2_q2_ge_2r=q2 >= 2 * r,
            rank2_q2_le_card=q2 <= card,
        )
    elif rank_zeta == 3:
        flags.update(
            rank3_q1_ge_3=q1 >= 3,
            rank3_q1_le_card=q1 <= card,
            rank3_q2_ge_2r_minus_1=q2 >= 2 * r - 1,
            rank3_q2_le_card=q2 <= card,
            rank3_s_nonzero=s != 0,
            rank3_t0_implies_s_ge_3=(t != 0) or s >= 3,
            rank3_s2_implies_t_ge_2=(s != 2) or t >= 2,
        )
    return flags


def period_forms(zeta: ZetaTriple) -> dict[int, BinaryQuadratic]:
    return {k: period_quadratic(zeta, k) for k in zeta.system.positive_roots}


def count_curves(zeta: ZetaTriple, strict: bool = True) -> CurveCountReport:
    """Q1, Q2 and the special points of the twistor space of X_zeta.

    With ``strict`` a failed bound raises :class:`TheoremViolation`; the
    harness passes ``strict=False`` and reads ``report.bounds`` instead.
    """
    zeta.require_admissible()
    system = zeta.system
    rz = rank_of_matrix(zeta.components())
    report = incidence(system, period_forms(zeta))
    report.rank_zeta = rz
    report.bounds = theorem_bounds(
        rz, report.q1, report.q2, report.s_count, report.t_count, system.rank, len(system.roots)
    )
    if rz == 2 and report.t_count:
        log.warning("rank-2 zeta with a double root: %s", zeta.to_json())
    if strict and not report.bounds_ok:
        failed = [k for k, v in report.bounds.items() if not v]
        raise TheoremViolation(f"bound check failed: {failed}", report)
    return report


# --------------------------------------------------------------------------
# rank one
# --------------------------------------------------------------------------

def rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class Rank1Report:
    direction: RealVector
    xyz: tuple[Fraction, Fraction, Fraction]
    form: BinaryQuadratic
    roots: tuple[ProjectivePoint1, ProjectivePoint1] | None  # None when irrational
    q1: int
    q2: int


def count_rank1_closed_form(zeta: ZetaTriple) -> Rank1Report:
    """Rank-one zeta = (x v, y v, z v): one quadratic, never tangent."""
    rz = rank_of_zeta(zeta)
    if rz != 1:
        raise RankMismatchError(f"zeta has rank {rz}, expected 1")
    v = next(vec for vec in zeta.components() if any(vec))
    j = next(i for i, x in enumerate(v) if x)
    xyz = tuple(vec[j] / v[j] for vec in zeta.components())
    for coef, vec in zip(xyz, zeta.components()):
        assert all(coef * a == b for a, b in zip(v, vec))
    x, y, z = xyz
    form = BinaryQuadratic(GaussRational(y, z), GaussRational(2 * x), GaussRational(-y, z))
    disc = form.discriminant()
    assert disc == GaussRational(4 * (x * x + y * y + z * z))
    if disc.is_zero():
        raise TheoremViolation("rank-one quadratic has a double root")

    roots = None
    if form.a.is_zero():
        roots = (ProjectivePoint1(1, 0), ProjectivePoint1(0, 1))
    else:
        sq = rational_sqrt(disc.re)
        if sq is not None:
            two_a = form.a * 2
            roots = tuple(
                sorted(
                    (ProjectivePoint1(-form.b + sq, two_a), ProjectivePoint1(-form.b - sq, two_a)),
                    key=ProjectivePoint1.sort_key,
                )
            )
    r = zeta.system.rank
    out = Rank1Report(v, xyz, form, roots, 2, 2 * r)
    full = count_curves(zeta)
    if (full.q1, full.q2) != (out.q1, out.q2):
        raise TheoremViolation("rank-one closed form disagrees with the incidence engine", full)
    return out


# --------------------------------------------------------------------------
# semi-continuity
# --------------------------------------------------------------------------

@dataclass
class ProbeReport:
    base_q1: int
    radius: Fraction
    trials: int
    min_q1: int | None
    violations: list[ZetaTriple]

    @property
    def violation_count(self) -> int:
        return len(self.violations)

    def to_json(self) -> dict:
        return {
            "base_q1": self.base_q1,
            "radius": format_rational(self.radius),
            "trials": self.trials,
            "min_q1": self.min_q1,
            "violations": self.violation_count,
            "violating_samples": [z.to_json() for z in self.violations],
        }


def q1_only(zeta: ZetaTriple) -> int:
    return incidence(zeta.system, period_forms(zeta)).q1


def perturb(zeta: ZetaTriple, radius: Fraction, rng: random.Random, grid: int = 64) -> ZetaTriple:
    """Component-wise rational jitter with |delta|_inf <= radius."""
    def jitter(v):
        return tuple(x + radius * Fraction(rng.randint(-grid, grid), grid) for x in v)

    return ZetaTriple(zeta.system, *(jitter(v) for v in zeta.components()))


def semicontinuity_probe(
    zeta0: ZetaTriple, radius, trials: int, seed: int | str = 0, grid: int = 64
) -> ProbeReport:
    """Falsification harness for lower semi-continuity of Q1 at zeta0."""
    zeta0.require_admissible()
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    base = q1_only(zeta0)
    rng = random.Random(f"semicont:{seed}")
    violations: list[ZetaTriple] = []
    min_q1 = None
    for _ in range(trials):
        while True:
            z = perturb(zeta0, radius, rng, grid)
            if z.admissible:
                break
        q = q1_only(z)
        min_q1 = q if min_q1 is None else min(min_q1, q)
        if q < base:
            violations.append(z)
    return ProbeReport(base, radius, trials, min_q1, violations)


def refine_until_clean(
    zeta0: ZetaTriple, radius, trials: int, seed: int | str = 0, max_halvings: int = 5
) -> tuple[ProbeReport, int]:
    """Halve the radius until a probe reports no violations.

    Returns the last probe and the number of halvings used; the probe still
    carries violations if ``max_halvings`` was not enough.
    """
    radius = Fraction(radius)
    report = semicontinuity_probe(zeta0, radius, trials, seed)
    halvings = 0
    while report.violations and halvings < max_halvings:
        radius /= 2
        halvings += 1
        report = semicontinuity_probe(zeta0, radius, trials, seed)
    return report, halvings


def squarefree_oracle_q1(report: CurveCountReport, forms: dict[int, BinaryQuadratic]) -> int:
    """Independent Q1: distinct roots of the product of one form per class."""
    return squarefree_root_count([forms[c[0]] for c in report.classes])
