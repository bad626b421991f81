from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rank_by_minors
from twistorcount.errors import DegenerateFormError
from twistorcount.exactfield import (
    I,
    ONE,
    ZERO,
    BinaryForm,
    BinaryQuadratic,
    GaussRational,
    ProjectivePoint1,
    distinct_root_count,
    exact_divide,
    form_gcd,
    format_rational,
    integer_rank,
    linear_factor,
    parse_rational,
    poly_degree,
    poly_gcd,
    poly_gcd_degree,
    poly_mul,
    poly_trim,
    rank_of_matrix,
    squarefree_root_count,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussRational, small, small)
unit_entries = st.sampled_from([ZERO, ONE, -ONE, I, -I])


# -- rationals ----------------------------------------------------------------

@pytest.mark.parametrize(
    "text, value",
    [("3/4", Fraction(3, 4)), ("-6/8", Fraction(-3, 4)), ("5", Fraction(5)), (" 0/7 ", Fraction(0)), (2, Fraction(2))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "a/2", "1.5", "", "1/2/3", None, True])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_format_rational_is_canonical():
    assert format_rational(Fraction(-6, 8)) == "-3/4"
    assert format_rational(0) == "0/1"


# -- Gaussian rationals ---------------------------------------------------------

def test_i_squared():
    assert I * I == -ONE
    assert (ONE + I) * (ONE - I) == GaussRational(2)


def test_json_round_trip():
    z = GaussRational(Fraction(-1, 3), Fraction(5, 2))
    assert z.to_json() == {"re": "-1/3", "im": "5/2"}
    assert GaussRational.from_json(z.to_json()) == z
    assert GaussRational.from_json("7/2") == GaussRational(Fraction(7, 2))


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@given(gauss, gauss, gauss)
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    if not y.is_zero():
        assert (x / y) * y == x


@given(gauss)
def test_conjugation_and_norm(x):
    assert x.conj().conj() == x
    assert x * x.conj() == GaussRational(x.norm())
    assert x.norm() >= 0
    assert (x.norm() == 0) == x.is_zero()


# -- rank -----------------------------------------------------------------------

@pytest.mark.parametrize(
    "rows, expected",
    [
        ([], 0),
        ([(1, 0), (0, 1), (1, 1)], 2),
        ([(ONE, I), (I, -ONE)], 1),
        ([(0, 0), (0, 0)], 0),
    ],
)
def test_rank_examples(rows, expected):
    assert rank_of_matrix(rows) == expected


def test_rank_rejects_ragged_rows():
    with pytest.raises(ValueError):
        rank_of_matrix([(1, 2), (3,)])


@settings(max_examples=300)
@given(
    st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(unit_entries, min_size=n, max_size=n), min_size=1, max_size=4)
    )
)
def test_rank_matches_minor_expansion(rows):
    assert rank_of_matrix(rows) == rank_by_minors(rows)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=5))
def test_integer_rank_agrees(rows):
    assert integer_rank(rows) == rank_of_matrix(rows)


# -- forms ------------------------------------------------------------------------

def q(a, b, c):
    return BinaryQuadratic(a, b, c)


@pytest.mark.parametrize(
    "p, r, degree",
    [
        (q(0, 1, 0), q(1, 0, 0), 1),
        (q(1, 0, -1), q(0, 1, 0), 0),
        (q(1, 2, -1), q(3, 6, -3), 2),
    ],
)
def test_form_gcd_examples(p, r, degree):
    assert form_gcd(p, r).degree == degree


def test_form_gcd_exposes_shared_root():
    g = form_gcd(q(0, 1, 0), q(1, 0, 0))
    assert g == BinaryForm([1, 0])  # z1
    assert g.at(ProjectivePoint1(0, 1)).is_zero()


def test_form_gcd_rejects_zero_form():
    with pytest.raises(DegenerateFormError):
        form_gcd(q(0, 0, 0), q(1, 0, 0))


@pytest.mark.parametrize(
    "form, count, root",
    [
        (q(0, 2, 0), 2, None),
        (q(1, -2, 1), 1, ProjectivePoint1(1, 1)),
        (q(ONE + I, 2, -ONE + I), 2, None),
        (q(0, 0, 3), 1, ProjectivePoint1(1, 0)),
        (q(5, 0, 0), 1, ProjectivePoint1(0, 1)),
    ],
)
def test_distinct_root_count_examples(form, count, root):
    assert distinct_root_count(form) == (count, root)


def test_discriminant_example():
    assert q(ONE + I, 2, -ONE + I).discriminant() == GaussRational(12)


def test_squarefree_examples():
    assert squarefree_root_count([q(0, 1, 0), q(1, 0, 0)]) == 2
    assert squarefree_root_count([q(1, -2, 1), q(1, -2, 1)]) == 1
    assert squarefree_root_count([q(0, 0, 1), q(1, 0, -1)]) == 3
    with pytest.raises(DegenerateFormError):
        squarefree_root_count([q(0, 0, 0)])


def test_projective_point_normal_form():
    assert ProjectivePoint1(2, 4) == ProjectivePoint1(1, 2)
    assert ProjectivePoint1(0, I) == ProjectivePoint1(0, 1)
    with pytest.raises(ValueError):
        ProjectivePoint1(0, 0)


def test_exact_divide():
    f = BinaryForm([1, 0, -1])  # z1^2 - z2^2
    assert exact_divide(f, linear_factor(ProjectivePoint1(1, 1))) == BinaryForm([1, 1])
    with pytest.raises(ArithmeticError):
        exact_divide(f, BinaryForm([1, 0]))


nonzero_quadratic = st.builds(q, gauss, gauss, gauss).filter(lambda f: not f.is_zero())


@settings(max_examples=200)
@given(nonzero_quadratic, nonzero_quadratic)
def test_form_gcd_divides_both(p, r):
    g = form_gcd(p, r)
    exact_divide(p, g)
    exact_divide(r, g)
    first = next(c for c in g.coeffs if not c.is_zero())
    assert first == ONE


@settings(max_examples=1000)
@given(nonzero_quadratic)
def test_distinct_root_count_matches_squarefree(form):
    count, _ = distinct_root_count(form)
    assert count == squarefree_root_count([form])


@given(nonzero_quadratic)
def test_double_root_is_a_root(form):
    count, root = distinct_root_count(form)
    if count == 1:
        assert form.at(root).is_zero()


@settings(max_examples=200)
@given(st.lists(gauss, max_size=4), st.lists(gauss, max_size=4), st.lists(gauss, min_size=1, max_size=3))
def test_gcd_degree_matches_euclid(a, b, c):
    a, b, c = poly_trim(a), poly_trim(b), poly_trim(c)
    pa, pb = poly_mul(a, c), poly_mul(b, c)
    if not pa and not pb:
        return
    assert poly_gcd_degree(pa, pb) == poly_degree(poly_gcd(pa, pb))
