"""Formal psi-series and the coherent-state form of the basis change.

psi(u) = sum_n u^n / [n]!, with 1/[n]! = q^{n(n+1)/2} / (q^2;q^2)_n kept
as a (numerator, Pochhammer index) pair so the scalar ring stays Laurent.
Comparisons cross-multiply denominators instead of dividing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactnum import ONE, ZERO, LaurentQ, bracket, qpochhammer
from .pbw import B2_SOURCE, B2_TARGET, straighten_b2
from .qoscr import r_apply, states
from .report import VerifyReport, timed


@dataclass(frozen=True)
class QRatio:
    """num / den with den a nonzero Laurent polynomial; never reduced."""

    num: LaurentQ
    den: LaurentQ = ONE

    def __mul__(self, other: "QRatio") -> "QRatio":
        if isinstance(other, QRatio):
            return QRatio(self.num * other.num, self.den * other.den)
        return QRatio(self.num * other, self.den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QRatio):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("QRatio equality is by cross-multiplication; not hashable")

    def is_zero(self) -> bool:
        return self.num.is_zero()


@dataclass
class FormalSeries:
    order: int
    coeffs: dict[int, tuple[LaurentQ, int]] = field(default_factory=dict)

    def ratio(self, n: int) -> QRatio:
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond truncation order {self.order}")
        num, k = self.coeffs[n]
        return QRatio(num, qpochhammer(k))


def psi_coeffs(D: int) -> FormalSeries:
    if D < 0:
        raise ValueError("order must be >= 0")
    return FormalSeries(D, {n: (LaurentQ.monomial(n * (n + 1) // 2), n) for n in range(D + 1)})


def verify_psi_identity(D: int) -> VerifyReport:
    """psi(u/q) - psi(q u) = u psi(u), coefficient by coefficient."""
    rep = VerifyReport("psi", {"order": D})
    with timed(rep):
        psi = psi_coeffs(D)
        for n in range(D + 1):
            left = psi.ratio(n) * bracket(n)
            right = psi.ratio(n - 1) if n else QRatio(ZERO)
            rep.checked += 1
            if left != right:
                rep.fail(order=n)
    return rep


# MixedElement: (B2 key in e2^a e12^b e1^c order, Fock state) -> QRatio
MixedElement = dict


def _psi_product(psi: FormalSeries, exps) -> QRatio:
    out = QRatio(ONE)
    for k in exps:
        out = out * psi.ratio(k)
    return out


def master_lhs(D: int) -> MixedElement:
    """r_123 psi(e2 a3+) psi(e12 a2+) psi(e1 a1+) |0>, weighted degree <= D."""
    psi = psi_coeffs(D)
    out: MixedElement = {}
    for n in states(3, D):
        if n[0] + 2 * n[1] + n[2] > D:
            continue
        key = B2_TARGET.from_indexed(n)
        coeff = _psi_product(psi, n)
        for m, v in r_apply(n).items():
            out[(key, m)] = coeff * v
    return out


def master_rhs(D: int) -> MixedElement:
    """psi(e1 a1+) psi(t12 a2+) psi(e2 a3+) |0>, B2 factor straightened."""
    psi = psi_coeffs(D)
    out: MixedElement = {}
    for m in states(3, D):
        if m[0] + 2 * m[1] + m[2] > D:
            continue
        coeff = _psi_product(psi, m)
        for key, c in straighten_b2(B2_SOURCE.monomial(m)).terms.items():
            out[(key, m)] = coeff * c
    return out


def verify_master_identity(D: int) -> VerifyReport:
    rep = VerifyReport("master", {"degree": D})
    rep.notes.append("checked coefficient-wise in the basis e2^a e12^b e1^c (x) |n1 n2 n3>")
    with timed(rep):
        lhs, rhs = master_lhs(D), master_rhs(D)
        for k in sorted(set(lhs) | set(rhs)):
            rep.checked += 1
            a = lhs.get(k, QRatio(ZERO))
            b = rhs.get(k, QRatio(ZERO))
            if a != b:
                key, fock = k
                rep.fail(b2_key=list(key), fock=list(fock))
    return rep
