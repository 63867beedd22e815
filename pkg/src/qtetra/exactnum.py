"""Exact Laurent polynomials in q with rational coefficients.

Everything downstream (r-matrix elements, PBW coefficients, series
coefficients) lives in the ring Q[q, q^-1], so the identities being
verified reduce to structural equality of coefficient maps.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LaurentQ",
    "Q",
    "ONE",
    "ZERO",
    "qpochhammer",
    "one_minus_qpow",
    "bracket",
    "bracket_factorial",
    "eval_at",
    "interpolate_laurent",
    "InterpolationError",
]

# exponents beyond this are treated as runaway degree growth
EXPONENT_LIMIT = 2**31 - 1


def _norm(c):
    """Collapse integral Fractions to int; int arithmetic is much faster."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _coerce_coeff(c):
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _check_exponent(e: int) -> int:
    if e > EXPONENT_LIMIT or e < -EXPONENT_LIMIT:
        raise OverflowError(f"q exponent {e} outside the supported range")
    return e


class LaurentQ:
    """Immutable element of Q[q, q^-1].

    Stored as a map exponent -> nonzero rational coefficient, so the zero
    polynomial has no terms and equality is map equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean: dict[int, object] = {}
        if terms:
            for e, c in terms.items():
                c = _coerce_coeff(c)
                if c:
                    clean[_check_exponent(int(e))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentQ":
        # trusted constructor: terms already normalized, zeros removed
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "LaurentQ":
        return cls({0: c})

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "LaurentQ":
        return cls({exponent: coeff})

    @classmethod
    def coerce(cls, x) -> "LaurentQ":
        if isinstance(x, LaurentQ):
            return x
        return cls.const(x)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[int, object]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, exponent: int):
        return self._terms.get(exponent, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def min_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self._terms)

    def max_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentQ):
            try:
                other = LaurentQ.const(other)
            except TypeError:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                out.pop(e, None)
        return LaurentQ._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentQ._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentQ):
            try:
                other = LaurentQ.const(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentQ):
            try:
                c = _coerce_coeff(other)
            except TypeError:
                return NotImplemented
            if not c:
                return ZERO
            return LaurentQ._raw({e: _norm(v * c) for e, v in self._terms.items()})
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((eb, cb),) = b.items()
            return LaurentQ._raw(
                {_check_exponent(e + eb): _norm(c * cb) for e, c in a.items()}
            )
        out: dict[int, object] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                out[e] = out.get(e, 0) + ca * cb
        for e in [e for e, c in out.items() if not c]:
            del out[e]
        for e, c in out.items():
            _check_exponent(e)
            out[e] = _norm(c)
        return LaurentQ._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            if isinstance(n, int) and self.is_monomial():
                ((e, c),) = self._terms.items()
                return LaurentQ({e * n: Fraction(c) ** n})
            raise ValueError("only nonnegative powers of non-monomials")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k: int) -> "LaurentQ":
        """Multiply by q**k."""
        if k == 0:
            return self
        return LaurentQ._raw(
            {_check_exponent(e + k): c for e, c in self._terms.items()}
        )

    def subs_power(self, k: int) -> "LaurentQ":
        """Substitute q -> q**k."""
        if k == 0:
            return LaurentQ.const(sum(self._terms.values()))
        return LaurentQ._raw(
            {_check_exponent(e * k): c for e, c in self._terms.items()}
        )

    def divmod_exact(self, divisor: "LaurentQ") -> tuple["LaurentQ", "LaurentQ"]:
        """Long division in Q[q, q^-1] viewed as Q[q] after shifting.

        Returns (quotient, remainder) with the remainder's q-degree range
        strictly narrower than the divisor's; zero remainder means exact.
        """
        divisor = LaurentQ.coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return ZERO, ZERO
        dlow, dhigh = divisor.min_exp(), divisor.max_exp()
        dlead = Fraction(divisor._terms[dhigh])
        rem = dict(self._terms)
        quot: dict[int, object] = {}
        low = self.min_exp()
        # remove from the top until the remainder spans less than the divisor
        while rem:
            top = max(rem)
            if top - low < dhigh - dlow:
                break
            factor = _norm(Fraction(rem[top]) / dlead)
            shift = top - dhigh
            quot[shift] = factor
            for e, c in divisor._terms.items():
                k = e + shift
                v = rem.get(k, 0) - factor * c
                if v:
                    rem[k] = _norm(v)
                else:
                    rem.pop(k, None)
        return LaurentQ(quot), LaurentQ(rem)

    def exact_div(self, divisor) -> "LaurentQ":
        """Quotient in the Laurent ring; ArithmeticError if not exact."""
        divisor = LaurentQ.coerce(divisor)
        if divisor.is_monomial():
            ((e, c),) = divisor._terms.items()
            inv = Fraction(1) / Fraction(c)
            return LaurentQ._raw(
                {k - e: _norm(v * inv) for k, v in self._terms.items()}
            )
        quot, rem = self.divmod_exact(divisor)
        if rem:
            raise ArithmeticError(f"{self!r} is not divisible by {divisor!r}")
        return quot

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, LaurentQ):
            return self._terms == other._terms
        try:
            return self._terms == LaurentQ.const(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation -------------------------------------------------------

    def __call__(self, q0):
        return eval_at(self, q0)

    def evalf(self, q0):
        """Evaluate at a float or mpmath number; no exactness implied."""
        total = 0
        for e, c in self._terms.items():
            if isinstance(c, Fraction):
                total += q0**e * c.numerator / c.denominator
            else:
                total += q0**e * c
        return total

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "terms": [
                [e, f"{Fraction(c).numerator}/{Fraction(c).denominator}"]
                for e, c in self.items()
            ]
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "LaurentQ":
        return cls({int(e): Fraction(c) for e, c in obj["terms"]})

    def __repr__(self):
        return f"LaurentQ({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                qpart = "q" if e == 1 else f"q^{e}"
                body = qpart if mag == 1 else f"{mag}*{qpart}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


ZERO = LaurentQ()
ONE = LaurentQ.const(1)
Q = LaurentQ.monomial(1)


def one_minus_qpow(k: int) -> LaurentQ:
    """1 - q^k (zero when k == 0)."""
    return ONE - LaurentQ.monomial(k)


@lru_cache(maxsize=None)
def qpochhammer(n: int) -> LaurentQ:
    """(q^2; q^2)_n = (1 - q^2)(1 - q^4)...(1 - q^{2n})."""
    if n < 0:
        raise ValueError("qpochhammer needs n >= 0")
    if n == 0:
        return ONE
    return qpochhammer(n - 1) * one_minus_qpow(2 * n)


@lru_cache(maxsize=None)
def bracket(n: int) -> LaurentQ:
    """[n] = q^-n - q^n."""
    return LaurentQ.monomial(-n) - LaurentQ.monomial(n)


@lru_cache(maxsize=None)
def bracket_factorial(n: int) -> LaurentQ:
    """[n]! = [1][2]...[n]."""
    if n < 0:
        raise ValueError("bracket_factorial needs n >= 0")
    if n == 0:
        return ONE
    return bracket_factorial(n - 1) * bracket(n)


def eval_at(p: LaurentQ, q0) -> Fraction:
    """Exact substitution q -> q0 for a nonzero rational q0."""
    q0 = Fraction(q0)
    if q0 == 0:
        raise ValueError("cannot evaluate a Laurent polynomial at q = 0")
    total = Fraction(0)
    for e, c in p._terms.items():
        total += c * q0**e
    return total


class InterpolationError(ValueError):
    pass


def interpolate_laurent(
    samples: Sequence, values: Sequence, low: int, high: int
) -> LaurentQ:
    """Recover p = sum_{low<=e<=high} c_e q^e from exact samples.

    Needs at least high - low + 1 samples; any extra samples are used to
    confirm the reconstruction and raise InterpolationError on mismatch.
    """
    if high < low:
        raise ValueError("empty exponent window")
    need = high - low + 1
    xs = [Fraction(x) for x in samples]
    ys = [Fraction(y) for y in values]
    if len(xs) != len(ys):
        raise ValueError("samples and values differ in length")
    if len(xs) < need:
        raise InterpolationError(
            f"{len(xs)} samples cannot fix {need} unknown coefficients"
        )
    if len(set(xs)) != len(xs) or any(x == 0 for x in xs):
        raise InterpolationError("samples must be distinct and nonzero")
    # q^-low * p(q) is an ordinary polynomial of degree high - low
    fit_x = xs[:need]
    fit_y = [y / x**low for x, y in zip(fit_x, ys[:need])]
    coeffs = _newton_to_monomial(fit_x, _divided_differences(fit_x, fit_y))
    p = LaurentQ({low + k: c for k, c in enumerate(coeffs)})
    for x, y in zip(xs[need:], ys[need:]):
        if eval_at(p, x) != y:
            raise InterpolationError(
                f"reconstruction disagrees with sample q={x}; "
                f"exponent window [{low}, {high}] too small"
            )
    return p


def _divided_differences(xs: list[Fraction], ys: list[Fraction]) -> list[Fraction]:
    coef = list(ys)
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    return coef


def _newton_to_monomial(xs: list[Fraction], dd: list[Fraction]) -> list[Fraction]:
    # Horner on the Newton form: p = dd0 + (x-x0)(dd1 + (x-x1)(...))
    poly = [Fraction(0)] * len(dd)
    poly[0] = dd[-1]
    deg = 0
    for k in range(len(dd) - 2, -1, -1):
        # poly <- poly * (x - xs[k]) + dd[k]
        new = [Fraction(0)] * len(dd)
        for i in range(deg + 1):
            new[i + 1] += poly[i]
            new[i] -= poly[i] * xs[k]
        new[0] += dd[k]
        poly = new
        deg += 1
    return poly


def sum_laurent(items: Iterable[LaurentQ]) -> LaurentQ:
    out: dict[int, object] = {}
    for p in items:
        for e, c in p._terms.items():
            out[e] = out.get(e, 0) + c
    return LaurentQ(out)
