"""Spin-s Yang-Baxter R-matrices as layered sums of two r-matrices.

    <m1,m2|R(u)|n1,n2> = sum_{m3} u^m3 <s1+m1, s2+m2, m3| r |s1+n1, s2+n2, n3>
                                       <s1-m1, s2-m2, n3| r |s1-n1, s2-n2, m3>

with n3 = m3 + m2 - n2 fixed by conservation. r-elements are exact and
only evaluated numerically (mpmath) at the end. The sum is truncated by a
heuristic: stop after three consecutive terms below tol * max(1, |sum|).
There is no rigorous tail bound behind it.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import mpmath

from .qoscr import r_element
from .report import VerifyReport, timed

DEFAULT_DPS = 30
TERM_CAP = 4000
QUIET_RUN = 3
MIN_TERMS = 4


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpinLabel:
    """Spin stored doubled, so s = 1/2 has twice_s = 1."""

    twice_s: int

    def __post_init__(self):
        if self.twice_s < 1:
            raise ValueError("spin must be positive")

    @classmethod
    def parse(cls, text) -> "SpinLabel":
        if isinstance(text, SpinLabel):
            return text
        s = Fraction(str(text))
        if s <= 0 or (2 * s).denominator != 1:
            raise ValueError(f"{text!r} is not a positive half-integer spin")
        return cls(int(2 * s))

    @property
    def dim(self) -> int:
        return self.twice_s + 1

    def magnetic(self) -> list[Fraction]:
        """m = -s, -s+1, ..., s; list position equals s + m."""
        return [Fraction(k * 2 - self.twice_s, 2) for k in range(self.dim)]

    def __str__(self) -> str:
        return str(Fraction(self.twice_s, 2))


@dataclass
class NumericRMatrix:
    """Entries keyed by (k1, k2, l1, l2) with k = s + m the shifted indices."""

    s1: SpinLabel
    s2: SpinLabel
    q: float
    u: float
    entries: dict[tuple[int, int, int, int], mpmath.mpf] = field(default_factory=dict)
    order: int = 0
    tail: float = 0.0
    dps: int = DEFAULT_DPS

    def __getitem__(self, key):
        return self.entries.get(key, mpmath.mpf(0))

    def matrix(self) -> mpmath.matrix:
        d1, d2 = self.s1.dim, self.s2.dim
        out = mpmath.matrix(d1 * d2, d1 * d2)
        for (k1, k2, l1, l2), v in self.entries.items():
            out[k1 * d2 + k2, l1 * d2 + l2] = v
        return out

    def metadata(self) -> dict:
        return {
            "s1": str(self.s1),
            "s2": str(self.s2),
            "q": self.q,
            "u": self.u,
            "truncation_order": self.order,
            "tail_estimate": self.tail,
            "dps": self.dps,
            "convergence": "heuristic: three consecutive increments below tol",
        }

    def to_json(self) -> str:
        rows = []
        for (k1, k2, l1, l2), v in sorted(self.entries.items()):
            rows.append(
                {
                    "m": [str(self.s1.magnetic()[k1]), str(self.s2.magnetic()[k2])],
                    "n": [str(self.s1.magnetic()[l1]), str(self.s2.magnetic()[l2])],
                    "value": mpmath.nstr(v, self.dps),
                }
            )
        return json.dumps({"metadata": self.metadata(), "entries": rows}, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["m1", "m2", "n1", "n2", "value"])
        ms1, ms2 = self.s1.magnetic(), self.s2.magnetic()
        for (k1, k2, l1, l2), v in sorted(self.entries.items()):
            w.writerow([ms1[k1], ms2[k2], ms1[l1], ms2[l2], mpmath.nstr(v, self.dps)])
        return buf.getvalue()


def _entry(s1: int, s2: int, key, q, u, tol, cap, fixed_terms):
    k1, k2, l1, l2 = key
    start = max(0, l2 - k2)
    total = mpmath.mpf(0)
    quiet = 0
    last = mpmath.mpf(0)
    count = 0
    m3 = start
    while True:
        n3 = m3 + k2 - l2
        a = r_element((k1, k2, m3), (l1, l2, n3))
        b = r_element((s1 - k1, s2 - k2, n3), (s1 - l1, s2 - l2, m3))
        term = u**m3 * a.evalf(q) * b.evalf(q) if a and b else mpmath.mpf(0)
        total += term
        count += 1
        last = abs(term)
        m3 += 1
        if fixed_terms is not None:
            if count >= fixed_terms:
                break
            continue
        if last < tol * max(1, abs(total)):
            quiet += 1
        else:
            quiet = 0
        if quiet >= QUIET_RUN and count >= MIN_TERMS:
            break
        if count >= cap:
            raise ConvergenceError(
                f"entry {key} not converged after {cap} terms; last term {mpmath.nstr(last, 5)}"
            )
    return total, count, last


def yb_build(
    s1,
    s2,
    q: float,
    u: float,
    tol: float = 1e-20,
    *,
    dps: int = DEFAULT_DPS,
    cap: int = TERM_CAP,
    fixed_terms: int | None = None,
) -> NumericRMatrix:
    s1, s2 = SpinLabel.parse(s1), SpinLabel.parse(s2)
    if not 0 < q < 1:
        raise ValueError("need 0 < q < 1 for the layered sum to converge")
    if not abs(u) < 1:
        raise ValueError("need |u| < 1 for the layered sum to converge")
    if tol <= 0:
        raise ValueError("tol must be positive")
    with mpmath.workdps(dps):
        qq, uu = mpmath.mpf(q), mpmath.mpf(u)
        out = NumericRMatrix(s1, s2, q, u, dps=dps)
        a, b = s1.twice_s, s2.twice_s
        for key in product(range(a + 1), range(b + 1), range(a + 1), range(b + 1)):
            k1, k2, l1, l2 = key
            if k1 + k2 != l1 + l2:
                # never summed: the deltas inside r force this to vanish
                continue
            val, count, last = _entry(a, b, key, qq, uu, tol, cap, fixed_terms)
            out.order = max(out.order, count)
            out.tail = max(out.tail, float(last))
            if val != 0:
                out.entries[key] = val
    return out


def _embed(R: NumericRMatrix, dims: Sequence[int], i: int, j: int) -> mpmath.matrix:
    """R acting on tensor factors i < j of the product space."""
    total = dims[0] * dims[1] * dims[2]
    out = mpmath.matrix(total, total)
    other = ({0, 1, 2} - {i, j}).pop()

    def flat(idx):
        return (idx[0] * dims[1] + idx[1]) * dims[2] + idx[2]

    for (k1, k2, l1, l2), v in R.entries.items():
        for spectator in range(dims[other]):
            row = [0, 0, 0]
            col = [0, 0, 0]
            row[i], row[j], row[other] = k1, k2, spectator
            col[i], col[j], col[other] = l1, l2, spectator
            out[flat(row), flat(col)] = v
    return out


def _max_abs(m: mpmath.matrix):
    best = mpmath.mpf(0)
    for i in range(m.rows):
        for j in range(m.cols):
            best = max(best, abs(m[i, j]))
    return best


def verify_ybe(
    s1,
    s2,
    s3,
    q: float,
    u: float,
    v: float,
    tol: float = 1e-9,
    *,
    dps: int = DEFAULT_DPS,
) -> VerifyReport:
    """Residual of R12(u) R13(uv) R23(v) = R23(v) R13(uv) R12(u), relative."""
    spins = [SpinLabel.parse(s) for s in (s1, s2, s3)]
    rep = VerifyReport(
        "ybe",
        {"spins": [str(s) for s in spins], "q": q, "u": u, "v": v, "tol": tol, "dps": dps},
        mode="numeric",
    )
    # precision and truncation floor below which no verdict is possible
    floor = 10.0 ** (-(dps - 8))
    sum_tol = max(tol * 1e-6, 10.0 ** (-(dps - 4)))
    with timed(rep), mpmath.workdps(dps):
        dims = [s.dim for s in spins]
        r12 = yb_build(spins[0], spins[1], q, u, sum_tol, dps=dps)
        r13 = yb_build(spins[0], spins[2], q, u * v, sum_tol, dps=dps)
        r23 = yb_build(spins[1], spins[2], q, v, sum_tol, dps=dps)
        A, B, C = _embed(r12, dims, 0, 1), _embed(r13, dims, 0, 2), _embed(r23, dims, 1, 2)
        lhs = A * B * C
        rhs = C * B * A
        scale = max(_max_abs(lhs), _max_abs(rhs))
        resid = _max_abs(lhs - rhs) / scale if scale else mpmath.mpf(0)
        rep.residual = float(resid)
        rep.checked = lhs.rows * lhs.cols
        rep.notes.append(
            f"truncation orders {r12.order}/{r13.order}/{r23.order}; "
            "convergence heuristic, no rigorous tail bound"
        )
        if resid >= tol:
            if tol < floor:
                rep.inconclusive = True
                rep.notes.append(f"tol {tol:g} is below the precision floor {floor:g}")
            else:
                rep.fail(residual=float(resid), tol=tol)
    return rep


def conservation_violations(R: NumericRMatrix) -> list[tuple[int, int, int, int]]:
    return [k for k in R.entries if k[0] + k[1] != k[2] + k[3]]
