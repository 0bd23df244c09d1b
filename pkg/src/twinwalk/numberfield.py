"""Exact arithmetic for characteristic polynomials and eigenvalue recognition.

Eigenvalues of integer matrices are recognised as integers, quadratic
irrationals ``(a + b*sqrt(delta))/2`` or, for even quartic factors, as
``+-sqrt(q)`` with ``q`` quadratic.  Recognised values can be mapped to
coordinates over a basis that is linearly independent over the rationals,
which turns questions about rational ratios and integer relations into
finite exact linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "ExactPoly",
    "InexactError",
    "QuadraticValue",
    "SqrtQuadratic",
    "Unrecognized",
    "char_poly",
    "recognize_support",
    "nu2",
    "squarefree_part",
    "is_rational_ratio",
    "is_rational_square",
    "quadratic_sqrt",
    "coordinates",
    "proportional",
    "integer_kernel",
    "lcm",
    "minimal_poly",
    "rational_gcd",
    "scale_value",
]


class InexactError(ValueError):
    """Raised when an exact path receives non-rational input."""


def lcm(*values: int) -> int:
    return reduce(lambda x, y: x * y // gcd(x, y) if x and y else 0, values, 1)


def nu2(b) -> int:
    """Exponent of the largest power of two dividing ``b``.

    Rationals are accepted: ``nu2(p/q) = nu2(p) - nu2(q)``.
    """
    if isinstance(b, Fraction) and b.denominator != 1:
        return nu2(b.numerator) - nu2(b.denominator)
    b = int(b)
    if b == 0:
        raise ValueError("undefined valuation: nu2(0)")
    b = abs(b)
    return (b & -b).bit_length() - 1


def rational_gcd(values: Iterable) -> Fraction:
    """Largest positive rational ``g`` with every value an integer multiple of ``g``."""
    fr = [Fraction(x) for x in values if x != 0]
    if not fr:
        raise ValueError("gcd of zeros is undefined")
    den = lcm(*(x.denominator for x in fr))
    return Fraction(reduce(gcd, (abs(int(x * den)) for x in fr)), den)


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, k)`` with ``n == k*k*s`` and ``s`` square-free."""
    n = int(n)
    if n < 1:
        raise ValueError("squarefree_part needs n >= 1")
    s, k = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            s *= p
        p += 1 if p == 2 else 2
    s *= m
    return s, k


def is_rational_square(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    x = Fraction(x)
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _continued_fraction(x: Fraction):
    while True:
        a = math.floor(x)
        yield a
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def is_rational_ratio(x: float, y: float, qmax: int = 10**6, tol: float = 1e-9):
    """Detect ``x/y == p/q`` with ``q <= qmax`` via continued-fraction convergents.

    A convergent is accepted when ``|q*(x/y) - p| < tol * max(1, |x/y|)``,
    i.e. the integer relation ``q*x - p*y = 0`` holds to tolerance.  Returns
    ``(p, q)`` or None; None means "no small rational found", not a proof.
    """
    if y == 0:
        raise ValueError("y must be nonzero")
    r = x / y
    scale = max(1.0, abs(r))
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    for a in _continued_fraction(Fraction(r)):
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > qmax:
            return None
        if abs(k1 * r - h1) < tol * scale:
            return (int(h1), int(k1))
    return None


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class ExactPoly:
    """Polynomial with rational coefficients, stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def from_roots(cls, roots: Iterable) -> "ExactPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def monic(self) -> "ExactPoly":
        lc = self.leading
        return ExactPoly(c / lc for c in self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            if isinstance(x, (float, complex, np.floating, np.complexfloating)):
                acc = acc * x + float(c)
            else:
                acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "ExactPoly") -> "ExactPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return ExactPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "ExactPoly":
        return ExactPoly(-c for c in self.coeffs)

    def __sub__(self, other: "ExactPoly") -> "ExactPoly":
        return self + (-other)

    def __mul__(self, other: "ExactPoly") -> "ExactPoly":
        if self.is_zero() or other.is_zero():
            return ExactPoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return ExactPoly(out)

    def __divmod__(self, other: "ExactPoly") -> tuple["ExactPoly", "ExactPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.leading
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lc
            if c:
                quot[k - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return ExactPoly(quot), ExactPoly(rem[:dq])

    def __floordiv__(self, other: "ExactPoly") -> "ExactPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "ExactPoly") -> "ExactPoly":
        return divmod(self, other)[1]

    def derivative(self) -> "ExactPoly":
        return ExactPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def gcd(self, other: "ExactPoly") -> "ExactPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def squarefree(self) -> "ExactPoly":
        """Product of the distinct irreducible factors (monic)."""
        g = self.gcd(self.derivative())
        return (self // g).monic()

    def divides(self, other: "ExactPoly") -> bool:
        return (other % self).is_zero()

    def multiplicity(self, factor: "ExactPoly") -> int:
        k, p = 0, self
        while True:
            q, r = divmod(p, factor)
            if not r.is_zero():
                return k
            k, p = k + 1, q

    def to_float_array(self) -> np.ndarray:
        """Coefficients highest degree first, for ``numpy.roots``."""
        return np.array([float(c) for c in reversed(self.coeffs)])

    def __repr__(self) -> str:
        return f"ExactPoly({str(self)!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def char_poly(matrix) -> ExactPoly:
    """Exact characteristic polynomial det(tI - M) of a rational matrix.

    Faddeev-LeVerrier on the integer matrix ``d*M`` (``d`` the common
    denominator), then rescaled, so every step is integer arithmetic.
    """
    rows = [list(r) for r in matrix]
    n = len(rows)
    for r in rows:
        for x in r:
            if not isinstance(x, (int, Fraction)) or isinstance(x, bool):
                raise InexactError("char_poly needs int/Fraction entries (inexact mode)")
    fr = [[Fraction(x) for x in r] for r in rows]
    d = lcm(*(x.denominator for r in fr for x in r)) if n else 1
    b = np.array([[int(x * d) for x in r] for r in fr], dtype=object).reshape(n, n)
    ident = np.zeros((n, n), dtype=object)
    for i in range(n):
        ident[i, i] = 1
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = ident
    for k in range(1, n + 1):
        am = b.dot(mk)
        q, r = divmod(-sum(am[i, i] for i in range(n)), k)
        if r:
            raise ArithmeticError("Faddeev-LeVerrier produced a non-integral trace")
        coeffs[n - k] = q
        mk = am + q * ident
    return ExactPoly(Fraction(coeffs[k], d ** (n - k)) for k in range(n + 1))


# ---------------------------------------------------------------------------
# recognised values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticValue:
    """The number ``(a + b*sqrt(delta))/2``; ``delta == 1`` means rational."""

    a: Fraction
    b: Fraction
    delta: int

    def __post_init__(self):
        a, b, d = Fraction(self.a), Fraction(self.b), int(self.delta)
        if d < 1:
            raise ValueError("delta must be a positive square-free integer")
        s, k = squarefree_part(d)
        b *= k
        d = s
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "delta", d)

    @classmethod
    def rational(cls, x) -> "QuadraticValue":
        return cls(2 * Fraction(x), Fraction(0), 1)

    @property
    def rational_part(self) -> Fraction:
        return self.a / 2

    @property
    def surd_part(self) -> Fraction:
        return self.b / 2

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_integer(self) -> bool:
        return self.is_rational and self.rational_part.denominator == 1

    def __float__(self) -> float:
        return float(self.rational_part) + float(self.surd_part) * math.sqrt(self.delta)

    def _coerce(self, other) -> "QuadraticValue":
        if isinstance(other, QuadraticValue):
            if self.delta != 1 and other.delta != 1 and other.delta != self.delta:
                raise ValueError("values live in different quadratic fields")
            return other
        return QuadraticValue.rational(other)

    def _field(self, other: "QuadraticValue") -> int:
        return self.delta if self.delta != 1 else other.delta

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticValue(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticValue(-self.a, -self.b, self.delta)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        p1, q1, p2, q2 = self.rational_part, self.surd_part, o.rational_part, o.surd_part
        p = p1 * p2 + q1 * q2 * d
        q = p1 * q2 + q1 * p2
        return QuadraticValue(2 * p, 2 * q, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticValue":
        return QuadraticValue(self.a, -self.b, self.delta)

    def norm(self) -> Fraction:
        p, q = self.rational_part, self.surd_part
        return p * p - q * q * self.delta

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conjugate()
        return QuadraticValue(num.a / n, num.b / n, num.delta)

    def __rtruediv__(self, other):
        return QuadraticValue.rational(other) / self

    def __str__(self) -> str:
        p, q = self.rational_part, self.surd_part
        if q == 0:
            return str(p)
        root = f"sqrt({self.delta})"
        if self.a.denominator == 1 and self.b.denominator == 1 and (self.a % 2 or self.b % 2):
            a, b = int(self.a), int(self.b)
            surd = root if abs(b) == 1 else f"{abs(b)}*{root}"
            if a == 0:
                return f"{'-' if b < 0 else ''}{surd}/2"
            return f"({a} {'-' if b < 0 else '+'} {surd})/2"
        surd = root if abs(q) == 1 else f"{abs(q)}*{root}"
        if p == 0:
            return f"{'-' if q < 0 else ''}{surd}"
        return f"{p} {'-' if q < 0 else '+'} {surd}"


def quadratic_sqrt(x: QuadraticValue) -> QuadraticValue | None:
    """A square root of ``x`` inside its own field, or None."""
    p, q, d = x.rational_part, x.surd_part, x.delta
    if q == 0:
        r = is_rational_square(p)
        if r is not None:
            return QuadraticValue.rational(r)
        if d != 1:
            r = is_rational_square(p / d)
            if r is not None:
                return QuadraticValue(0, 2 * r, d)
        return None
    # (c + e*sqrt(d))^2 = p + q*sqrt(d)  ->  c^2 = (p +- sqrt(norm))/2
    rn = is_rational_square(x.norm())
    if rn is None:
        return None
    for c2 in ((p + rn) / 2, (p - rn) / 2):
        c = is_rational_square(c2)
        if c is None or c == 0:
            continue
        e = q / (2 * c)
        cand = QuadraticValue(2 * c, 2 * e, d)
        if cand * cand == x:
            return cand
    return None


@dataclass(frozen=True)
class SqrtQuadratic:
    """The number ``sign * sqrt(square)`` with ``square`` an irrational quadratic."""

    sign: int
    square: QuadraticValue

    def __float__(self) -> float:
        return self.sign * math.sqrt(float(self.square))

    @property
    def delta(self) -> int:
        return self.square.delta

    def __str__(self) -> str:
        return f"{'-' if self.sign < 0 else ''}sqrt({self.square})"


@dataclass(frozen=True)
class Unrecognized:
    value: float
    reason: str

    def __str__(self) -> str:
        return f"{self.value!r} (unrecognized: {self.reason})"


Recognized = Union[QuadraticValue, SqrtQuadratic]


def scale_value(x, c):
    """``c * x`` for a recognised value and a positive rational ``c``."""
    c = Fraction(c)
    if c <= 0:
        raise ValueError("scale must be positive")
    if isinstance(x, QuadraticValue):
        return x * QuadraticValue.rational(c)
    if isinstance(x, SqrtQuadratic):
        return SqrtQuadratic(x.sign, x.square * QuadraticValue.rational(c * c))
    return x


def minimal_poly(x: Recognized) -> ExactPoly:
    """Monic minimal polynomial over the rationals of a recognised value."""
    if isinstance(x, QuadraticValue):
        if x.is_rational:
            return ExactPoly([-x.rational_part, 1])
        return ExactPoly([x.norm(), -x.a, 1])
    sq = x.square
    if sq.is_rational:
        return ExactPoly([-sq.rational_part, 0, 1])
    return ExactPoly([sq.norm(), 0, -sq.a, 0, 1])


def _round_int(x: float, tol: float) -> int | None:
    r = round(x)
    return int(r) if abs(x - r) < tol * max(1.0, abs(x)) else None


def recognize_support(
    poly: ExactPoly,
    numeric_support: Sequence[float],
    spectrum: Sequence[float] | None = None,
    tol: float = 1e-7,
) -> list:
    """Match each numeric eigenvalue to an exact root of an integral ``poly``.

    Integer roots, roots of irreducible quadratic factors and roots of
    irreducible even quartics ``t^4 + p t^2 + q`` are recognised; anything
    else comes back as :class:`Unrecognized`.  Candidate factors are
    proposed from ``spectrum`` (default: numeric roots of the square-free
    part) and always verified by exact division.
    """
    if not poly.is_integral or poly.leading != 1:
        return [Unrecognized(float(x), "non-integral char poly") for x in numeric_support]
    sqf = poly.squarefree()
    if spectrum is None:
        spectrum = [float(z.real) for z in np.roots(sqf.to_float_array())] if sqf.degree > 0 else []
    cands = sorted(set(float(s) for s in spectrum))
    roots: list[tuple[float, Recognized]] = []
    seen: set[ExactPoly] = set()

    def add_factor(f: ExactPoly, values: list[Recognized]):
        if f not in seen:
            seen.add(f)
            roots.extend((float(v), v) for v in values)

    for x in numeric_support:
        x = float(x)
        if any(abs(x - r) < tol for r, _ in roots):
            continue
        r = _round_int(x, tol)
        if r is not None and sqf(Fraction(r)) == 0:
            add_factor(ExactPoly([-r, 1]), [QuadraticValue.rational(r)])
            continue
        for y in cands:
            if abs(y - x) < tol:
                continue
            s = _round_int(x + y, tol)
            p = _round_int(x * y, tol)
            if s is None or p is None:
                continue
            f = ExactPoly([p, -s, 1])
            disc = s * s - 4 * p
            if disc <= 0 or isqrt(disc) ** 2 == disc or not f.divides(sqf):
                continue
            delta, k = squarefree_part(disc)
            add_factor(f, [QuadraticValue(s, k, delta), QuadraticValue(s, -k, delta)])
            break
        else:
            for y in cands:
                if abs(abs(y) - abs(x)) < tol:
                    continue
                p = _round_int(-(x * x + y * y), tol)
                q = _round_int(x * x * y * y, tol)
                if p is None or q is None:
                    continue
                disc = p * p - 4 * q
                if disc <= 0 or isqrt(disc) ** 2 == disc:
                    continue
                f = ExactPoly([q, 0, p, 0, 1])
                if not f.divides(sqf):
                    continue
                delta, k = squarefree_part(disc)
                vals: list[Recognized] = []
                for sq in (QuadraticValue(-p, k, delta), QuadraticValue(-p, -k, delta)):
                    if float(sq) > 0:
                        vals += [SqrtQuadratic(1, sq), SqrtQuadratic(-1, sq)]
                if len(vals) == 4:
                    add_factor(f, vals)
                    break

    out = []
    for x in numeric_support:
        x = float(x)
        near = [v for r, v in roots if abs(r - x) < tol]
        if len(near) == 1:
            out.append(near[0])
        elif len(near) > 1:
            out.append(Unrecognized(x, "ambiguous match"))
        else:
            out.append(Unrecognized(x, "root of an irreducible factor of degree > 2"))
    return out


# ---------------------------------------------------------------------------
# rational coordinates and integer relations
# ---------------------------------------------------------------------------

Key = tuple


def coordinates(values: Sequence) -> list[dict[Key, Fraction]] | None:
    """Coordinates of recognised values over a Q-linearly independent basis.

    Basis elements are ``1``, ``sqrt(delta)`` for each square-free radicand
    (linearly independent by Besicovitch), and for values ``sqrt(A)`` with
    ``A`` in a single field ``Q(sqrt(delta))``, ``sqrt(R)`` and
    ``sqrt(delta)*sqrt(R)`` for one representative ``R`` per square class
    (independent by Kummer theory).  Returns None when a value is
    unrecognised or nested radicals from different fields are mixed.
    """
    if any(isinstance(v, Unrecognized) for v in values):
        return None
    nested = [v for v in values if isinstance(v, SqrtQuadratic)]
    if nested:
        deltas = {v.delta for v in nested}
        deltas |= {v.delta for v in values if isinstance(v, QuadraticValue) and v.delta != 1}
        if len(deltas) > 1:
            return None
    reps: list[QuadraticValue] = []
    out = []
    for v in values:
        c: dict[Key, Fraction] = {}
        if isinstance(v, QuadraticValue):
            if v.rational_part:
                c[("1",)] = v.rational_part
            if v.surd_part:
                c[("sqrt", v.delta)] = v.surd_part
        else:
            a = v.square
            for rep in reps:
                s = quadratic_sqrt(a / rep)
                if s is not None:
                    break
            else:
                reps.append(a)
                rep, s = a, QuadraticValue.rational(1)
            if float(s) < 0:
                s = -s
            s = s * v.sign
            tag = (rep.a, rep.b, rep.delta)
            if s.rational_part:
                c[("nested", tag, 0)] = s.rational_part
            if s.surd_part:
                c[("nested", tag, 1)] = s.surd_part
        out.append(c)
    return out


def sub_coords(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, Fraction(0)) - v
        if out[k] == 0:
            del out[k]
    return out


def proportional(x: dict, y: dict) -> Fraction | None:
    """Rational ``c`` with ``x == c*y`` (``y`` nonzero), else None."""
    if not y:
        raise ValueError("reference vector is zero")
    if set(x) - set(y):
        return None
    k0 = next(iter(y))
    c = x.get(k0, Fraction(0)) / y[k0]
    for k, v in y.items():
        if x.get(k, Fraction(0)) != c * v:
            return None
    return c


def integer_kernel(rows: Sequence[Sequence]) -> list[list[int]]:
    """Z-basis of ``{l in Z^k : C l = 0}`` for a rational matrix ``C``.

    Unimodular column reduction of ``C`` tracked on an identity matrix;
    the columns that end up zero in ``C`` span the integer kernel.
    """
    if not rows:
        raise ValueError("need at least one row")
    k = len(rows[0])
    a = []
    for r in rows:
        fr = [Fraction(x) for x in r]
        d = lcm(*(x.denominator for x in fr))
        a.append([int(x * d) for x in fr])
    u = [[int(i == j) for j in range(k)] for i in range(k)]

    def colop(dst: int, src: int, q: int):
        for row in a:
            row[dst] -= q * row[src]
        for row in u:
            row[dst] -= q * row[src]

    def swap(i: int, j: int):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    piv = 0
    for row in a:
        if piv == k:
            break
        while True:
            nz = [j for j in range(piv, k) if row[j] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(row[j]))
            for j in nz:
                if j != j0:
                    colop(j, j0, row[j] // row[j0])
        if nz:
            swap(piv, nz[0])
            piv += 1
    return [[u[i][j] for i in range(k)] for j in range(piv, k)]
