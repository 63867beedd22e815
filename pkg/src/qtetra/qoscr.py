"""The q-oscillator r-matrix acting on three Fock spaces.

Orientation is fixed throughout the package: ``r_element(m, n)`` is the
bra-ket element <m|r|n>, ``r_apply(n)`` is the column r|n> (a sum over m)
and ``r_row(m)`` is the row <m|r (a sum over n).

No Fock-space cutoff exists. The conservation deltas make every image of
a basis state finite, so all checks compare finite sparse vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .exactnum import ONE, ZERO, LaurentQ, qpochhammer
from .report import VerifyReport, timed

FockIndex = tuple[int, ...]
SparseVec = dict[FockIndex, LaurentQ]


class TriPoly:
    """Polynomial in x, y, z with Laurent-in-q coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, int, int], LaurentQ] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __add__(self, other: "TriPoly") -> "TriPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return TriPoly(out)

    def __neg__(self) -> "TriPoly":
        return TriPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TriPoly") -> "TriPoly":
        return self + (-other)

    def __mul__(self, other: "TriPoly") -> "TriPoly":
        out: dict[tuple[int, int, int], LaurentQ] = {}
        for (a, b, c), u in self.terms.items():
            for (d, e, f), v in other.terms.items():
                k = (a + d, b + e, c + f)
                out[k] = out.get(k, ZERO) + u * v
        return TriPoly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, TriPoly) and self.terms == other.terms

    def scale_vars(self, sx: int, sy: int, sz: int) -> "TriPoly":
        """Substitute x -> q^sx x, y -> q^sy y, z -> q^sz z."""
        return TriPoly(
            {(i, j, k): c.shift(sx * i + sy * j + sz * k) for (i, j, k), c in self.terms.items()}
        )

    def at_q_powers(self, ex: int, ey: int, ez: int) -> LaurentQ:
        """Value at x = q^ex, y = q^ey, z = q^ez."""
        out: dict[int, object] = {}
        for (i, j, k), c in self.terms.items():
            s = ex * i + ey * j + ez * k
            for e, v in c._terms.items():
                out[e + s] = out.get(e + s, 0) + v
        return LaurentQ(out)

    def total_degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def degree_in(self, var: int) -> int:
        return max((k[var] for k in self.terms), default=0)

    def __repr__(self) -> str:
        return f"TriPoly({len(self.terms)} terms)"


def _tri(terms: dict[tuple[int, int, int], object]) -> TriPoly:
    return TriPoly({k: LaurentQ.coerce(v) for k, v in terms.items()})


_ONE_MINUS_X_ONE_MINUS_Z = _tri({(0, 0, 0): 1, (1, 0, 0): -1, (0, 0, 1): -1, (1, 0, 1): 1})
_P_TABLE: list[TriPoly] = [_tri({(0, 0, 0): 1})]


def p_poly(m: int) -> TriPoly:
    """P_m(x, y, z), filled into an append-only table in increasing m."""
    if m < 0:
        raise ValueError("p_poly needs m >= 0")
    while len(_P_TABLE) <= m:
        k = len(_P_TABLE) - 1
        prev = _P_TABLE[k]
        # xz (1 - y) / q^{2k}
        second = TriPoly({(1, 0, 1): LaurentQ({-2 * k: 1}), (1, 1, 1): LaurentQ({-2 * k: -1})})
        _P_TABLE.append(
            _ONE_MINUS_X_ONE_MINUS_Z * prev.scale_vars(-2, 0, -2)
            - second * prev.scale_vars(0, -2, 0)
        )
    return _P_TABLE[m]


def conserves(m: Sequence[int], n: Sequence[int]) -> bool:
    return m[0] + m[1] == n[0] + n[1] and m[1] + m[2] == n[1] + n[2]


@lru_cache(maxsize=None)
def _r_element(m: FockIndex, n: FockIndex) -> LaurentQ:
    if min(m) < 0 or min(n) < 0 or not conserves(m, n):
        return ZERO
    m1, m2, m3 = m
    n1, n2, n3 = n
    numer = p_poly(m2).at_q_powers(2 * n1, 2 * n2, 2 * n3).shift((m1 - n2) * (m3 - n2))
    try:
        return numer.exact_div(qpochhammer(m2))
    except ArithmeticError as exc:
        raise AssertionError(
            f"r-matrix element <{m}|r|{n}> is not a Laurent polynomial"
        ) from exc


def r_element(m: Sequence[int], n: Sequence[int]) -> LaurentQ:
    """<m|r|n>; negative indices give zero."""
    return _r_element(tuple(m), tuple(n))


@lru_cache(maxsize=None)
def _r_apply(n: FockIndex) -> tuple[tuple[FockIndex, LaurentQ], ...]:
    n1, n2, n3 = n
    out = []
    for m2 in range(0, min(n1 + n2, n2 + n3) + 1):
        m = (n1 + n2 - m2, m2, n2 + n3 - m2)
        v = _r_element(m, n)
        if v:
            out.append((m, v))
    return tuple(out)


def r_apply(n: Sequence[int]) -> SparseVec:
    """Column r|n> = sum_m <m|r|n> |m>."""
    return dict(_r_apply(tuple(n)))


@lru_cache(maxsize=None)
def _r_row(m: FockIndex) -> tuple[tuple[FockIndex, LaurentQ], ...]:
    m1, m2, m3 = m
    out = []
    for n2 in range(0, min(m1 + m2, m2 + m3) + 1):
        n = (m1 + m2 - n2, n2, m2 + m3 - n2)
        v = _r_element(m, n)
        if v:
            out.append((n, v))
    return tuple(out)


def r_row(m: Sequence[int]) -> SparseVec:
    """Row <m|r = sum_n <m|r|n> <n|."""
    return dict(_r_row(tuple(m)))


def states(slots: int, degree_bound: int) -> Iterator[FockIndex]:
    """All occupation tuples with total occupation <= degree_bound."""
    if slots == 0:
        yield ()
        return
    for first in range(degree_bound + 1):
        for rest in states(slots - 1, degree_bound - first):
            yield (first,) + rest


# -- sparse vector helpers -------------------------------------------------


def vec_add(acc: SparseVec, other: SparseVec, scale: LaurentQ = ONE) -> SparseVec:
    for k, v in other.items():
        w = acc.get(k, ZERO) + v * scale
        if w:
            acc[k] = w
        else:
            acc.pop(k, None)
    return acc


def vec_clean(v: SparseVec) -> SparseVec:
    return {k: c for k, c in v.items() if c}


# -- oscillator algebra on number states ------------------------------------
#
# An operator word is a tuple of factors applied right to left. Factors:
#   ("+", i)      a^+ on slot i
#   ("-", i)      a^- on slot i
#   ("N", i, k)   q^{k N_i}
#   ("r", i, j, l) the r-matrix on slots (i, j, l)
#   ("c", c)      scalar LaurentQ


def _apply_factor(factor: tuple, vec: SparseVec) -> SparseVec:
    kind = factor[0]
    out: SparseVec = {}
    if kind == "c":
        c = factor[1]
        return {k: v * c for k, v in vec.items()} if c else {}
    if kind == "r":
        i, j, l = factor[1:]
        for key, v in vec.items():
            col = _r_apply((key[i], key[j], key[l]))
            for (a, b, c), w in col:
                k = list(key)
                k[i], k[j], k[l] = a, b, c
                vec_add(out, {tuple(k): w}, v)
        return out
    i = factor[1]
    for key, v in vec.items():
        n = key[i]
        if kind == "+":
            k = list(key)
            k[i] = n + 1
            vec_add(out, {tuple(k): v})
        elif kind == "-":
            if n == 0:
                continue
            k = list(key)
            k[i] = n - 1
            vec_add(out, {tuple(k): v - v.shift(2 * n)})
        elif kind == "N":
            vec_add(out, {key: v.shift(factor[2] * n)})
        else:
            raise ValueError(f"unknown operator factor {factor!r}")
    return out


def apply_word(word: Sequence[tuple], vec: SparseVec) -> SparseVec:
    for factor in reversed(word):
        vec = _apply_factor(factor, vec)
        if not vec:
            break
    return vec


def apply_sum(terms: Iterable[Sequence[tuple]], vec: SparseVec) -> SparseVec:
    out: SparseVec = {}
    for word in terms:
        vec_add(out, apply_word(word, vec))
    return out


def _c(value) -> tuple:
    return ("c", LaurentQ.coerce(value))


def intertwining_relations() -> list[tuple[str, list[tuple], list[tuple]]]:
    """The six relations r X = Y r as (label, lhs words, rhs words).

    Slots are 0-based: factor 1 of the triple is slot 0.
    """
    r = ("r", 0, 1, 2)
    rels = []
    for s, label in ((+1, "+"), (-1, "-")):
        a = "+" if s > 0 else "-"
        b = "-" if s > 0 else "+"
        # r q^{N2} a1 = (q^{N3} a1 + q^{N1} a2 a3') r
        rels.append(
            (
                f"1{label}",
                [(r, ("N", 1, 1), (a, 0))],
                [(("N", 2, 1), (a, 0), r), (("N", 0, 1), (a, 1), (b, 2), r)],
            )
        )
        # r a2 = (a1 a3 - q^{1+N1+N3} a2) r
        rels.append(
            (
                f"2{label}",
                [(r, (a, 1))],
                [((a, 0), (a, 2), r), (_c(-LaurentQ.monomial(1)), ("N", 0, 1), ("N", 2, 1), (a, 1), r)],
            )
        )
        # r q^{N2} a3 = (q^{N1} a3 + q^{N3} a1' a2) r
        rels.append(
            (
                f"3{label}",
                [(r, ("N", 1, 1), (a, 2))],
                [(("N", 0, 1), (a, 2), r), (("N", 2, 1), (b, 0), (a, 1), r)],
            )
        )
    return rels


# -- spectral dressing ------------------------------------------------------


def _as_unit(x) -> tuple[Fraction, int]:
    """A spectral parameter as c * q^k with rational c != 0."""
    if isinstance(x, LaurentQ):
        if not x.is_monomial():
            raise ValueError(f"spectral parameter {x} is not a monomial in q")
        ((k, c),) = x._terms.items()
        return Fraction(c), k
    c = Fraction(x)
    if c == 0:
        raise ValueError("spectral parameters must be nonzero")
    return c, 0


def _unit_power(c: Fraction, k: int, n: int) -> LaurentQ:
    return LaurentQ({k * n: c**n})


@dataclass(frozen=True)
class SpectralParams:
    """lambda_1..3 and mu_1..3 for one r-factor.

    Entries are nonzero rationals, or monomials c*q^k given as LaurentQ.
    """

    lam: tuple
    mu: tuple

    def __post_init__(self):
        if len(self.lam) != 3 or len(self.mu) != 3:
            raise ValueError("need three lambdas and three mus")
        for x in self.lam + self.mu:
            _as_unit(x)

    @classmethod
    def ones(cls) -> "SpectralParams":
        return cls((1, 1, 1), (1, 1, 1))

    def factors(self):
        """(unit for N2 prefactor, unit for N1 suffix, unit for N3 suffix)."""
        l1, l2, l3 = (_as_unit(x) for x in self.lam)
        m1, m2, m3 = (_as_unit(x) for x in self.mu)
        # -lambda1 mu3 / q
        pre = (-l1[0] * m3[0], l1[1] + m3[1] - 1)
        suf1 = (l3[0] / l2[0], l3[1] - l2[1])
        suf3 = (m1[0] / m2[0], m1[1] - m2[1])
        return pre, suf1, suf3


def spectral_r_apply(n: Sequence[int], sp: SpectralParams) -> SparseVec:
    """R_123|n> with R = (-l1 m3/q)^{N2} r (l3/l2)^{N1} (m1/m2)^{N3}."""
    n = tuple(n)
    pre, suf1, suf3 = sp.factors()
    scale = _unit_power(*suf1, n[0]) * _unit_power(*suf3, n[2])
    out: SparseVec = {}
    for m, v in _r_apply(n):
        out[m] = v * scale * _unit_power(*pre, m[1])
    return out


# -- verification -----------------------------------------------------------


def verify_involution(degree_bound: int) -> VerifyReport:
    rep = VerifyReport("involution", {"degree": degree_bound})
    with timed(rep):
        for n in states(3, degree_bound):
            image: SparseVec = {}
            for m, v in _r_apply(n):
                vec_add(image, r_apply(m), v)
            rep.checked += 1
            if image != {n: ONE}:
                rep.fail(state=list(n), image={str(k): str(v) for k, v in image.items()})
    return rep


def symmetry_sides(m: FockIndex, n: FockIndex) -> tuple[LaurentQ, LaurentQ]:
    left = (
        p_poly(m[1]).at_q_powers(2 * n[0], 2 * n[1], 2 * n[2])
        * qpochhammer(m[0])
        * qpochhammer(m[2])
    )
    right = (
        p_poly(n[1]).at_q_powers(2 * m[0], 2 * m[1], 2 * m[2])
        * qpochhammer(n[0])
        * qpochhammer(n[2])
    )
    return left, right


def conserving_pairs(degree_bound: int) -> Iterator[tuple[FockIndex, FockIndex]]:
    for n in states(3, degree_bound):
        n1, n2, n3 = n
        for m2 in range(0, min(n1 + n2, n2 + n3) + 1):
            yield (n1 + n2 - m2, m2, n2 + n3 - m2), n


def verify_symmetry(degree_bound: int) -> VerifyReport:
    rep = VerifyReport("symmetry", {"degree": degree_bound})
    with timed(rep):
        for m, n in conserving_pairs(degree_bound):
            left, right = symmetry_sides(m, n)
            rep.checked += 1
            if left != right:
                rep.fail(m=list(m), n=list(n), left=str(left), right=str(right))
    return rep


def verify_intertwining(degree_bound: int) -> VerifyReport:
    rep = VerifyReport("intertwining", {"degree": degree_bound})
    rels = intertwining_relations()
    with timed(rep):
        for n in states(3, degree_bound):
            basis = {n: ONE}
            for label, lhs, rhs in rels:
                rep.checked += 1
                if apply_sum(lhs, basis) != apply_sum(rhs, basis):
                    rep.fail(relation=label, state=list(n))
    return rep


def verify_operator_identity(
    name: str,
    lhs: list[tuple],
    rhs: list[tuple],
    slots: int,
    degree_bound: int,
) -> VerifyReport:
    rep = VerifyReport(name, {"degree": degree_bound})
    with timed(rep):
        for n in states(slots, degree_bound):
            basis = {n: ONE}
            rep.checked += 1
            if apply_sum(lhs, basis) != apply_sum(rhs, basis):
                rep.fail(state=list(n))
    return rep


def r_table(degree_bound: int) -> list[dict]:
    """All nonzero <m|r|n> with |n| <= degree_bound as JSON records."""
    rows = []
    for m, n in conserving_pairs(degree_bound):
        v = r_element(m, n)
        if v:
            rows.append({"m": list(m), "n": list(n), "value": v.to_json()})
    return rows
