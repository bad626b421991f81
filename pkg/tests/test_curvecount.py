from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import root_index, zeta_of
from twistorcount.curvecount import (
    TANGENTIAL,
    TRANSVERSAL,
    ZetaTriple,
    count_curves,
    count_rank1_closed_form,
    incidence,
    period_eval,
    period_forms,
    period_quadratic,
    q1_only,
    rank_of_zeta,
    refine_until_clean,
    rotation_tilde,
    rotation_tilde_at_infinity,
    semicontinuity_probe,
    squarefree_oracle_q1,
    theorem_bounds,
)
from twistorcount.errors import InadmissibleZetaError, RankMismatchError
from twistorcount.exactfield import I, ONE, BinaryQuadratic, GaussRational, ProjectivePoint1
from twistorcount.harness.sampling import sample_rng, sample_zeta
from twistorcount.rootsys import build_root_system, root_eval

A2_EXAMPLE = ((1, 0), (0, 1), (0, 0))
A3_EXAMPLE = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

fractions = st.fractions(min_value=-4, max_value=4, max_denominator=5)


def random_zeta(system, rng: random.Random) -> ZetaTriple:
    while True:
        z = ZetaTriple(
            system,
            *(tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(system.rank)) for _ in range(3)),
        )
        if z.admissible:
            return z


# -- zeta -------------------------------------------------------------------------

@pytest.mark.parametrize(
    "family, n, zeta, rank",
    [("A", 1, ((1,), (0,), (0,)), 1), ("A", 2, A2_EXAMPLE, 2), ("A", 3, A3_EXAMPLE, 3)],
)
def test_rank_of_zeta(family, n, zeta, rank):
    assert rank_of_zeta(zeta_of(build_root_system(family, n), *zeta)) == rank


def test_inadmissible_zeta_names_the_root(a2):
    z = zeta_of(a2, (1, -1), (2, -2), (0, 0))  # alpha1 + alpha2 vanishes on all three
    with pytest.raises(InadmissibleZetaError) as info:
        rank_of_zeta(z)
    assert info.value.root == (1, 1)


def test_zeta_json_round_trip(a3):
    z = zeta_of(a3, *A3_EXAMPLE)
    obj = z.to_json()
    assert obj["zeta"][0] == ["1/1", "0/1", "0/1"]
    assert ZetaTriple.from_json(obj) == z


@pytest.mark.parametrize(
    "obj",
    [
        {"family": "A", "rank": 1, "zeta": [["1/0"], ["0/1"], ["0/1"]]},
        {"family": "A", "rank": 1, "zeta": [["1/1"], ["0/1"]]},
        {"family": "A", "rank": 2, "zeta": [["1/1"], ["0/1"], ["0/1"]]},
    ],
)
def test_zeta_json_rejects(obj):
    with pytest.raises(ValueError):
        ZetaTriple.from_json(obj)


# -- period map -------------------------------------------------------------------

def test_period_eval_examples(a2):
    z = zeta_of(a2, *A2_EXAMPLE)
    assert period_eval(z, 1, 0) == (GaussRational(0), GaussRational(1))
    assert period_eval(z, 0, 1) == (GaussRational(0), GaussRational(-1))
    assert period_eval(z, 1, 1) == (GaussRational(2), GaussRational(0))
    with pytest.raises(ValueError):
        period_eval(z, 0, 0)


def test_period_forms_of_a2_example(a2):
    z = zeta_of(a2, *A2_EXAMPLE)
    a1, a2_, a12 = root_index(a2, 1, 0), root_index(a2, 0, 1), root_index(a2, 1, 1)
    assert period_quadratic(z, a1) == BinaryQuadratic(0, 2, 0)
    assert period_quadratic(z, a2_) == BinaryQuadratic(1, 0, -1)
    assert period_quadratic(z, a12) == BinaryQuadratic(1, 2, -1)


def test_period_form_of_a3_root(a3):
    z = zeta_of(a3, *A3_EXAMPLE)
    q = period_quadratic(z, root_index(a3, 0, 1, 1))
    assert q == BinaryQuadratic(ONE + I, 0, -ONE + I)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_period_identities(seed):
    system = build_root_system("A", 3)
    z = random_zeta(system, random.Random(seed))
    at_zero, at_inf = period_eval(z, 1, 0), period_eval(z, 0, 1)
    for k, (p, m) in enumerate(zip(at_zero, at_inf)):
        assert p - m == GaussRational(2 * z.zeta2[k])
        assert p + m == GaussRational(0, 2 * z.zeta3[k])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), fractions, fractions)
def test_quadratic_is_root_of_period(seed, s, t):
    system = build_root_system("A", 3)
    z = random_zeta(system, random.Random(seed))
    lam = period_eval(z, GaussRational(s, t), ONE)
    for k in system.positive_roots:
        assert period_quadratic(z, k)(GaussRational(s, t), ONE) == root_eval(system, k, lam)


@pytest.mark.parametrize("family, n", [("A", 2), ("A", 3), ("D", 4)])
def test_negative_roots_give_negated_forms(family, n):
    system = build_root_system(family, n)
    z = random_zeta(system, random.Random(3))
    for k in system.positive_roots:
        assert period_quadratic(z, system.negate(k)) == -period_quadratic(z, k)


# -- rotation ----------------------------------------------------------------------

def test_rotation_examples(a2):
    z = zeta_of(a2, (1, 2), (3, 4), (5, 6))
    assert rotation_tilde(z, 0) == (z.zeta2, z.zeta3)
    rot2, rot3 = rotation_tilde(z, I)
    assert rot2 == tuple(2 * x for x in z.zeta2)
    assert rot3 == tuple(2 * x for x in z.zeta1)
    assert rotation_tilde_at_infinity(z) == (tuple(-x for x in z.zeta2), z.zeta3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), fractions, fractions)
def test_rotation_identity(seed, u1, u2):
    system = build_root_system("D", 4)
    z = random_zeta(system, random.Random(seed))
    u = GaussRational(u1, u2)
    rot2, rot3 = rotation_tilde(z, u)
    expected = tuple(
        GaussRational(b, c) + u * 2 * a - u * u * GaussRational(b, -c) for a, b, c in zip(*z.components())
    )
    assert tuple(GaussRational(p, q) for p, q in zip(rot2, rot3)) == expected


# -- counting ----------------------------------------------------------------------

def test_count_a1():
    system = build_root_system("A", 1)
    report = count_curves(zeta_of(system, (1,), (0,), (0,)))
    assert (report.q1, report.q2, report.rank_zeta) == (2, 2, 1)
    assert report.bounds_ok


def test_count_a2_example(a2):
    report = count_curves(zeta_of(a2, *A2_EXAMPLE))
    assert (report.q1, report.q2) == (6, 6)
    assert len(report.classes) == 3
    assert all(len(p.classes) == 1 for p in report.points)
    assert report.bounds["rank2_q1_ge_4"]


def test_count_a3_example(a3):
    report = count_curves(zeta_of(a3, *A3_EXAMPLE))
    assert (report.q1, report.q2, report.s_count, report.t_count) == (12, 12, 12, 0)
    assert len(report.classes) == 6


def test_report_json_shape(a2):
    obj = count_curves(zeta_of(a2, *A2_EXAMPLE)).to_json()
    assert set(obj) >= {"rank_zeta", "q1", "q2", "s_count", "t_count", "points", "bounds"}
    assert all({"classes", "kind", "subsystem_rank"} <= set(p) for p in obj["points"])
    assert all(("location" in p) != ("private" in p) for p in obj["points"])


def test_proportional_triples_form_one_class(a3):
    # alpha1, alpha2 and alpha1 + alpha2 have triples (1,0,0), (2,0,0), (3,0,0)
    z = zeta_of(a3, (1, 2, 0), (0, 0, 1), (0, 0, 3))
    report = count_curves(z)
    a2_roots = {root_index(a3, 1, 0, 0), root_index(a3, 0, 1, 0), root_index(a3, 1, 1, 0)}
    assert [set(c) for c in report.classes if len(c) > 1] == [a2_roots]
    big = [p for p in report.points if p.subsystem_rank == 2]
    assert len(big) == 2 and all(p.location is None for p in big)  # residual roots are counted, not built
    assert report.q2 == report.q1 + 2


def test_membership_soundness():
    rng = random.Random(11)
    for name, rc in [("A3", 2), ("A4", 3), ("D4", 3), ("D4", 1)]:
        system = build_root_system(name[0], int(name[1]))
        for i in range(5):
            z = sample_zeta(system, rc, sample_rng(5, system, rc, i))
            report = count_curves(z)
            for p in report.points:
                if p.location is None:
                    continue
                for k in system.positive_roots:
                    vanishes = period_quadratic(z, k).at(p.location).is_zero()
                    assert vanishes == (k in p.subsystem)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([("A", 2), ("A", 3), ("D", 4)]))
def test_no_tangency_and_squarefree_agreement(seed, fam):
    system = build_root_system(*fam)
    z = random_zeta(system, random.Random(seed))
    forms = period_forms(z)
    assert all(not f.discriminant().is_zero() for f in forms.values())
    report = count_curves(z)
    assert report.t_count == 0
    assert report.q1 == squarefree_oracle_q1(report, forms)
    assert report.q1 == len(report.points) == report.s_count + report.t_count


# -- synthetic incidence: shared and tangent points over Q(i) ------------------

def class_of(report, root):
    return next(i for i, c in enumerate(report.classes) if root in c)


def test_incidence_with_shared_point(a2):
    a1, a2_, a12 = root_index(a2, 1, 0), root_index(a2, 0, 1), root_index(a2, 1, 1)
    forms = {
        a1: BinaryQuadratic(0, 1, 0),  # z1 z2: roots [1:0], [0:1]
        a2_: BinaryQuadratic(1, 0, 0),  # z1^2: double root [0:1]
        a12: BinaryQuadratic(1, -1, 0),  # z1 (z1 - z2): roots [0:1], [1:1]
    }
    report = incidence(a2, forms)
    assert report.q1 == 3
    origin = next(p for p in report.points if p.location == ProjectivePoint1(0, 1))
    assert origin.multiplicity == {class_of(report, a1): 1, class_of(report, a2_): 2, class_of(report, a12): 1}
    assert origin.kind == TRANSVERSAL
    assert origin.subsystem_rank == 2
    assert report.q2 == 4


def test_incidence_all_tangential(a2):
    a1, a2_, a12 = root_index(a2, 1, 0), root_index(a2, 0, 1), root_index(a2, 1, 1)
    forms = {a1: BinaryQuadratic(1, 0, 0), a2_: BinaryQuadratic(1, -2, 1), a12: BinaryQuadratic(0, 0, I)}
    report = incidence(a2, forms)
    assert (report.q1, report.q2, report.s_count, report.t_count) == (3, 3, 0, 3)
    assert {p.location for p in report.points} == {
        ProjectivePoint1(0, 1),
        ProjectivePoint1(1, 1),
        ProjectivePoint1(1, 0),
    }
    assert all(p.kind == TANGENTIAL for p in report.points)


def test_incidence_tangent_meets_transversal(a2):
    a1, a2_, a12 = root_index(a2, 1, 0), root_index(a2, 0, 1), root_index(a2, 1, 1)
    forms = {
        a1: BinaryQuadratic(1, 0, 0),  # tangent at [0:1]
        a2_: BinaryQuadratic(0, 1, 0),  # through [0:1] and [1:0]
        a12: BinaryQuadratic(1, 0, 1),  # roots [1:i], [1:-i], private to the class
    }
    report = incidence(a2, forms)
    assert report.q1 == 4
    shared = next(p for p in report.points if p.location == ProjectivePoint1(0, 1))
    assert shared.kind == TRANSVERSAL
    assert shared.multiplicity == {class_of(report, a1): 2, class_of(report, a2_): 1}


def test_irrational_private_points_are_counted(a2):
    a1, a2_, a12 = root_index(a2, 1, 0), root_index(a2, 0, 1), root_index(a2, 1, 1)
    forms = {a1: BinaryQuadratic(1, 0, -2), a2_: BinaryQuadratic(0, 1, 0), a12: BinaryQuadratic(1, 0, -3)}
    report = incidence(a2, forms)
    assert report.q1 == 6
    assert all(p.location is None and p.private is not None for p in report.points)


# -- bounds ----------------------------------------------------------------------------

def test_theorem_bounds_flags():
    assert theorem_bounds(1, 2, 6, 2, 0, 3, 12) == {
        "tally_s_plus_t": True,
        "rank1_q1_eq_2": True,
        "rank1_q2_eq_2r": True,
    }
    bad = theorem_bounds(3, 4, 5, 2, 0, 3, 12)
    assert not bad["rank3_s2_implies_t_ge_2"]
    assert not bad["rank3_t0_implies_s_ge_3"]
    assert bad["rank3_q2_ge_2r_minus_1"]


# -- rank one ----------------------------------------------------------------------------

@pytest.mark.parametrize(
    "xyz, roots",
    [
        ((1, 0, 0), (ProjectivePoint1(1, 0), ProjectivePoint1(0, 1))),
        ((0, 1, 0), (ProjectivePoint1(1, -1), ProjectivePoint1(1, 1))),
    ],
)
def test_rank1_closed_form(xyz, roots):
    system = build_root_system("A", 1)
    report = count_rank1_closed_form(zeta_of(system, *((c,) for c in xyz)))
    assert set(report.roots) == set(roots)
    assert (report.q1, report.q2) == (2, 2)


def test_rank1_irrational_roots_not_built():
    system = build_root_system("A", 2)
    v = (1, 2)
    report = count_rank1_closed_form(zeta_of(system, v, v, (0, 0)))  # disc 8
    assert report.roots is None
    assert (report.q1, report.q2) == (2, 4)


def test_rank1_rejects_other_ranks(a2):
    with pytest.raises(RankMismatchError):
        count_rank1_closed_form(zeta_of(a2, *A2_EXAMPLE))


# -- semi-continuity ----------------------------------------------------------------------

def test_probe_rank1_never_violates():
    system = build_root_system("A", 3)
    z0 = zeta_of(system, (1, 2, 3), (2, 4, 6), (0, 0, 0))
    report = semicontinuity_probe(z0, Fraction(1, 2), 30, seed=1)
    assert report.base_q1 == 2 and report.violation_count == 0


def test_probe_a2_example(a2):
    report = semicontinuity_probe(zeta_of(a2, *A2_EXAMPLE), Fraction(1, 1000), 40, seed=2)
    assert report.min_q1 >= 6 and report.violation_count == 0


def test_probe_zero_trials(a2):
    report = semicontinuity_probe(zeta_of(a2, *A2_EXAMPLE), Fraction(1, 10), 0)
    assert report.violation_count == 0 and report.min_q1 is None


def test_probe_rejects_bad_input(a2):
    with pytest.raises(ValueError):
        semicontinuity_probe(zeta_of(a2, *A2_EXAMPLE), 0, 5)
    with pytest.raises(InadmissibleZetaError):
        semicontinuity_probe(zeta_of(a2, (1, -1), (0, 0), (0, 0)), Fraction(1, 10), 5)


def test_probe_is_seeded(a2):
    z0 = zeta_of(a2, *A2_EXAMPLE)
    one = semicontinuity_probe(z0, Fraction(1, 3), 10, seed=9).to_json()
    two = semicontinuity_probe(z0, Fraction(1, 3), 10, seed=9).to_json()
    assert one == two


def test_refine_until_clean(a2):
    report, halvings = refine_until_clean(zeta_of(a2, *A2_EXAMPLE), 1, 20, seed=4)
    assert report.violation_count == 0
    assert 0 <= halvings <= 5


def test_q1_only_matches(a3):
    z = zeta_of(a3, *A3_EXAMPLE)
    assert q1_only(z) == count_curves(z).q1
