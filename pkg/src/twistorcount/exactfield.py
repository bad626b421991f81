"""Exact arithmetic over Q and Q(i).

Rationals are :class:`fractions.Fraction`.  Everything complex lives in
:class:`GaussRational`; binary forms and points of the projective line are
kept in normal form so that equality is syntactic.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import DegenerateFormError

Number = Union[int, Fraction, "GaussRational"]


# --------------------------------------------------------------------------
# Rationals and their wire format
# --------------------------------------------------------------------------

def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str | int) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) into a Fraction.

    Raises ``ValueError`` on a zero denominator or anything that is not a
    plain integer ratio; decimal notation is refused on purpose.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(p, q)


# --------------------------------------------------------------------------
# Gaussian rationals
# --------------------------------------------------------------------------

class GaussRational:
    """An element re + i*im of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction | int = 0, im: Fraction | int = 0) -> None:
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x: Number) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        return cls(x, 0)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: Number) -> "GaussRational":
        o = GaussRational.coerce(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "GaussRational":
        o = GaussRational.coerce(other)
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Number) -> "GaussRational":
        return GaussRational.coerce(other) - self

    def __mul__(self, other: Number) -> "GaussRational":
        if not isinstance(other, GaussRational):
            o = Fraction(other)
            return GaussRational(self.re * o, self.im * o)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "GaussRational":
        if not isinstance(other, GaussRational):
            o = Fraction(other)
            if o == 0:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussRational(self.re / o, self.im / o)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        c, d = other.re, other.im
        return GaussRational((self.re * c + self.im * d) / n, (self.im * c - self.re * d) / n)

    def __rtruediv__(self, other: Number) -> "GaussRational":
        return GaussRational.coerce(other) / self

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __pos__(self) -> "GaussRational":
        return self

    def __pow__(self, k: int) -> "GaussRational":
        if k < 0:
            return (ONE / self) ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- comparison / hashing ------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"GaussRational({self.re})"
        return f"GaussRational({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    # -- wire format ------------------------------------------------------
    def to_json(self) -> dict[str, str]:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, obj: object) -> "GaussRational":
        """Accept ``{"re": .., "im": ..}`` or a bare rational string."""
        if isinstance(obj, dict):
            extra = set(obj) - {"re", "im"}
            if extra:
                raise ValueError(f"unexpected keys {sorted(extra)} in Gaussian rational")
            return cls(parse_rational(obj.get("re", "0/1")), parse_rational(obj.get("im", "0/1")))
        return cls(parse_rational(obj))  # type: ignore[arg-type]


ZERO = GaussRational(0, 0)
ONE = GaussRational(1, 0)
I = GaussRational(0, 1)

QiVector = tuple  # tuple[GaussRational, ...]


def gauss_vector(values: Iterable[Number]) -> tuple[GaussRational, ...]:
    return tuple(GaussRational.coerce(v) for v in values)


# --------------------------------------------------------------------------
# Linear algebra
# --------------------------------------------------------------------------

def _gauss_int_rows(rows: Sequence[Sequence[Number]]) -> list[list[tuple[int, int]]]:
    """Scale each row to Gaussian-integer entries (pairs of ints)."""
    out = []
    for row in rows:
        entries = [GaussRational.coerce(x) for x in row]
        den = 1
        for e in entries:
            for part in (e.re, e.im):
                d = part.denominator
                den = den * d // gcd(den, d)
        out.append([(int(e.re * den), int(e.im * den)) for e in entries])
    return out


def _gmul(x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gexact_div(x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    n = y[0] * y[0] + y[1] * y[1]
    re = x[0] * y[0] + x[1] * y[1]
    im = x[1] * y[0] - x[0] * y[1]
    assert re % n == 0 and im % n == 0, "Gaussian division not exact"
    return (re // n, im // n)


def rank_of_matrix(rows: Sequence[Sequence[Number]]) -> int:
    """Rank over Q(i) by fraction-free (Bareiss) elimination on Z[i]."""
    if not rows:
        return 0
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("rows must have equal length")
    m = _gauss_int_rows(rows)
    nrows = len(m)
    rank = 0
    prev = (1, 0)
    for col in range(width):
        pivot = next((r for r in range(rank, nrows) if m[r][col] != (0, 0)), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, nrows):
            f = m[r][col]
            row = m[r]
            prow = m[rank]
            for c in range(col, width):
                a = _gmul(p, row[c])
                b = _gmul(f, prow[c])
                row[c] = _gexact_div((a[0] - b[0], a[1] - b[1]), prev)
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by Bareiss elimination (the hot path for roots)."""
    if not rows:
        return 0
    m = [list(r) for r in rows]
    width = len(m[0])
    nrows = len(m)
    rank = 0
    prev = 1
    for col in range(width):
        pivot = next((r for r in range(rank, nrows) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        prow = m[rank]
        for r in range(rank + 1, nrows):
            row = m[r]
            f = row[col]
            for c in range(col, width):
                row[c] = (p * row[c] - f * prow[c]) // prev
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


# --------------------------------------------------------------------------
# Univariate polynomials over Q(i): coefficient tuples, lowest degree first
# --------------------------------------------------------------------------

Poly = tuple  # tuple[GaussRational, ...], trailing zeros stripped


def poly_trim(p: Sequence[GaussRational]) -> Poly:
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return tuple(p)


def poly_degree(p: Poly) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(p) - 1


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return poly_trim(out)


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_trim([a - b for a, b in zip_longest(p, q, fillvalue=ZERO)])


def poly_derivative(p: Poly) -> Poly:
    return poly_trim([c * k for k, c in enumerate(p)][1:])


def poly_divmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(poly_trim(p))
    dq = len(q) - 1
    lead = q[-1]
    quot = [ZERO] * max(len(r) - dq, 0)
    while len(r) - 1 >= dq:
        c = r[-1] / lead
        k = len(r) - 1 - dq
        quot[k] = c
        for j, b in enumerate(q):
            r[k + j] = r[k + j] - c * b
        r = list(poly_trim(r))
    return poly_trim(quot), tuple(r)


def poly_monic(p: Poly) -> Poly:
    if not p:
        return p
    lead = p[-1]
    return tuple(c / lead for c in p)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0."""
    a, b = poly_trim(p), poly_trim(q)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, poly_monic(r)
    return poly_monic(a)


def _gpow(x: tuple[int, int], k: int) -> tuple[int, int]:
    out = (1, 0)
    for _ in range(k):
        out = _gmul(out, x)
    return out


def _gprem(a: list, b: list) -> list:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b over Z[i]."""
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    for k in range(len(a) - 1 - db, -1, -1):
        top = r[k + db]
        r = [_gmul(lead, x) for x in r]
        for j, y in enumerate(b):
            t = _gmul(top, y)
            x = r[k + j]
            r[k + j] = (x[0] - t[0], x[1] - t[1])
        r.pop()
    while r and r[-1] == (0, 0):
        r.pop()
    return r


def _primitive(p: list) -> list:
    content = 0
    for x in p:
        content = gcd(content, x[0], x[1])
    return [(x[0] // content, x[1] // content) for x in p]


def poly_gcd_degree(p: Poly, q: Poly) -> int:
    """Degree of gcd(p, q) via the subresultant remainder sequence on Z[i].

    Same answer as ``poly_degree(poly_gcd(p, q))`` without rational
    normalization, which keeps high-degree inputs cheap.
    """
    a, b = poly_trim(p), poly_trim(q)
    if not a or not b:
        return poly_degree(a or b)
    if len(a) < len(b):
        a, b = b, a
    a, b = (_primitive(row) for row in _gauss_int_rows([a, b]))
    g = h = (1, 0)
    while True:
        delta = len(a) - len(b)
        r = _gprem(a, b)
        if not r:
            return len(b) - 1
        if len(r) == 1:
            return 0
        div = _gmul(g, _gpow(h, delta))
        a, b = b, [_gexact_div(x, div) for x in r]
        g = a[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = _gexact_div(_gpow(g, delta), _gpow(h, delta - 1))


# --------------------------------------------------------------------------
# Binary forms
# --------------------------------------------------------------------------

class BinaryForm:
    """Homogeneous polynomial sum_k c_k z1^(d-k) z2^k of fixed degree d.

    ``coeffs[0]`` multiplies ``z1**d``.  The zero form is allowed but most
    operations refuse it.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number]) -> None:
        self.coeffs = tuple(GaussRational.coerce(c) for c in coeffs)
        if not self.coeffs:
            raise ValueError("a binary form needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __call__(self, z1: Number, z2: Number) -> GaussRational:
        z1 = GaussRational.coerce(z1)
        z2 = GaussRational.coerce(z2)
        d = self.degree
        total = ZERO
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                total = total + c * z1 ** (d - k) * z2 ** k
        return total

    def at(self, point: "ProjectivePoint1") -> GaussRational:
        return self(point.z1, point.z2)

    def scale(self, s: Number) -> "BinaryForm":
        return BinaryForm._raw(tuple(c * s for c in self.coeffs))

    @classmethod
    def _raw(cls, coeffs: tuple) -> "BinaryForm":
        obj = BinaryForm.__new__(BinaryForm)
        obj.coeffs = coeffs
        return obj

    def monic(self) -> "BinaryForm":
        """Scale so the first nonzero coefficient is 1."""
        if self.is_zero():
            raise DegenerateFormError("the zero form has no monic normalization")
        lead = next(c for c in self.coeffs if not c.is_zero())
        return BinaryForm._raw(tuple(c / lead for c in self.coeffs))

    def infinity_multiplicity(self) -> int:
        """Order of vanishing at [1:0], i.e. the number of leading zero coefficients."""
        if self.is_zero():
            raise DegenerateFormError("the zero form vanishes everywhere")
        return next(k for k, c in enumerate(self.coeffs) if not c.is_zero())

    def dehomogenized(self) -> Poly:
        """f(s, 1) as a polynomial in s (lowest degree first)."""
        return poly_trim(reversed(self.coeffs))

    @classmethod
    def from_dehomogenized(cls, p: Poly, degree: int) -> "BinaryForm":
        if poly_degree(p) > degree:
            raise ValueError("polynomial degree exceeds form degree")
        padded = list(p) + [ZERO] * (degree + 1 - len(p))
        return BinaryForm(reversed(padded))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(str(c) for c in self.coeffs)})"

    def to_json(self) -> list[dict[str, str]]:
        return [c.to_json() for c in self.coeffs]


class BinaryQuadratic(BinaryForm):
    """a*z1^2 + b*z1*z2 + c*z2^2."""

    __slots__ = ()

    def __init__(self, a: Number, b: Number, c: Number) -> None:
        super().__init__((a, b, c))

    @property
    def a(self) -> GaussRational:
        return self.coeffs[0]

    @property
    def b(self) -> GaussRational:
        return self.coeffs[1]

    @property
    def c(self) -> GaussRational:
        return self.coeffs[2]

    def discriminant(self) -> GaussRational:
        return self.b * self.b - self.a * self.c * 4

    def scale(self, s: Number) -> "BinaryQuadratic":
        return BinaryQuadratic(self.a * s, self.b * s, self.c * s)

    def __neg__(self) -> "BinaryQuadratic":
        return BinaryQuadratic(-self.a, -self.b, -self.c)


def linear_factor(point: "ProjectivePoint1") -> BinaryForm:
    """The linear form z2_p*z1 - z1_p*z2 vanishing exactly at ``point``."""
    return BinaryForm((point.z2, -point.z1))


def exact_divide(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Quotient f / g of binary forms; raises ``ArithmeticError`` on a remainder."""
    if g.is_zero():
        raise DegenerateFormError("division by the zero form")
    if f.is_zero():
        return BinaryForm([ZERO] * (f.degree - g.degree + 1))
    if g.degree > f.degree:
        raise ArithmeticError("divisor has larger degree")
    mg = g.infinity_multiplicity()
    mf = f.infinity_multiplicity()
    if mf < mg:
        raise ArithmeticError("form is not divisible (factor at [1:0])")
    # Both sides carry a z2^m factor at [1:0]; the remaining parts divide in s.
    fq = poly_trim(reversed(f.coeffs[mf:]))
    gq = poly_trim(reversed(g.coeffs[mg:]))
    quot, rem = poly_divmod(fq, gq)
    if rem:
        raise ArithmeticError("form is not divisible")
    qdeg = f.degree - g.degree
    inner = BinaryForm.from_dehomogenized(quot, qdeg - (mf - mg))
    return BinaryForm(tuple([ZERO] * (mf - mg)) + inner.coeffs)


def _require_nonzero(*forms: BinaryForm) -> None:
    for f in forms:
        if f.is_zero():
            raise DegenerateFormError("operation undefined on the zero form")


def form_gcd(p: BinaryForm, q: BinaryForm) -> BinaryForm:
    """Monic gcd of two nonzero binary forms.

    The factor at [1:0] (powers of z2) is split off explicitly; the rest is
    a univariate gcd after setting z2 = 1.
    """
    _require_nonzero(p, q)
    mp, mq = p.infinity_multiplicity(), q.infinity_multiplicity()
    fp = poly_trim(reversed(p.coeffs[mp:]))
    fq = poly_trim(reversed(q.coeffs[mq:]))
    g = poly_gcd(fp, fq)
    m = min(mp, mq)
    inner = BinaryForm.from_dehomogenized(g, poly_degree(g))
    return BinaryForm(tuple([ZERO] * m) + inner.coeffs).monic()


# --------------------------------------------------------------------------
# Points of P^1(Q(i))
# --------------------------------------------------------------------------

class ProjectivePoint1:
    """[z1 : z2] normalized to [1 : t] or [0 : 1]."""

    __slots__ = ("z1", "z2")

    def __init__(self, z1: Number, z2: Number) -> None:
        z1 = GaussRational.coerce(z1)
        z2 = GaussRational.coerce(z2)
        if z1.is_zero() and z2.is_zero():
            raise ValueError("[0:0] is not a point of P^1")
        if not z1.is_zero():
            self.z1, self.z2 = ONE, z2 / z1
        else:
            self.z1, self.z2 = ZERO, ONE

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectivePoint1):
            return NotImplemented
        return self.z1 == other.z1 and self.z2 == other.z2

    def __hash__(self) -> int:
        return hash((self.z1, self.z2))

    def __repr__(self) -> str:
        return f"[{self.z1} : {self.z2}]"

    def sort_key(self) -> tuple:
        return (self.z1.re, self.z2.re, self.z2.im)

    def to_json(self) -> dict[str, object]:
        return {"z1": self.z1.to_json(), "z2": self.z2.to_json()}


def distinct_root_count(q: BinaryQuadratic) -> tuple[int, ProjectivePoint1 | None]:
    """Number of distinct projective roots of a nonzero quadratic form.

    Returns ``(1, double_root)`` when the discriminant vanishes and
    ``(2, None)`` otherwise.  A form with a = b = 0 is c*z2^2, whose double
    root is [1:0].  No square roots are taken.
    """
    _require_nonzero(q)
    if not q.discriminant().is_zero():
        return 2, None
    if q.a.is_zero():
        return 1, ProjectivePoint1(1, 0)
    return 1, ProjectivePoint1(-q.b, q.a * 2)


def squarefree_root_count(forms: Sequence[BinaryForm]) -> int:
    """Distinct projective roots of the product of ``forms``.

    Counted as the degree of the squarefree part of the product evaluated at
    z2 = 1, plus one if the product vanishes at [1:0].
    """
    _require_nonzero(*forms)
    if not forms:
        return 0
    product: Poly = (ONE,)
    at_infinity = False
    for f in forms:
        product = poly_mul(product, f.dehomogenized())
        if f.coeffs[0].is_zero():
            at_infinity = True
    deg = poly_degree(product)
    if deg <= 0:
        finite = 0
    else:
        finite = deg - poly_gcd_degree(product, poly_derivative(product))
    return finite + int(at_infinity)
