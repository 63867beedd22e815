"""Tetrahedron equation on six Fock spaces, checked state by state.

Both sides of R123 R145 R246 R356 = R356 R246 R145 R123 are applied to
each basis ket (rightmost factor first) and the finite images compared.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb
from typing import Sequence

from .exactnum import ONE, ZERO
from .qoscr import (
    FockIndex,
    SparseVec,
    SpectralParams,
    _r_apply,
    _r_row,
    spectral_r_apply,
    states,
)
from .report import VerifyReport, parallel_map, timed

# factor slots, 1-based, in the order they are written on the left side
LEFT_ORDER = ((1, 2, 3), (1, 4, 5), (2, 4, 6), (3, 5, 6))
RIGHT_ORDER = tuple(reversed(LEFT_ORDER))


def _check_slots(slots: Sequence[int]) -> tuple[int, int, int]:
    if len(slots) != 3 or len(set(slots)) != 3:
        raise ValueError(f"r needs three distinct slots, got {tuple(slots)}")
    if not all(1 <= s <= 6 for s in slots):
        raise ValueError(f"slots must lie in 1..6, got {tuple(slots)}")
    return tuple(s - 1 for s in slots)


def _embed(v: SparseVec, slots, column) -> SparseVec:
    i, j, k = _check_slots(slots)
    out: SparseVec = {}
    for key, c in v.items():
        for (a, b, d), w in column((key[i], key[j], key[k])):
            new = list(key)
            new[i], new[j], new[k] = a, b, d
            new = tuple(new)
            x = out.get(new, ZERO) + w * c
            if x:
                out[new] = x
            else:
                out.pop(new, None)
    return out


def r_embed_apply(slots: Sequence[int], v: SparseVec) -> SparseVec:
    """Apply the constant r to the three given tensor slots (1-based)."""
    return _embed(v, slots, _r_apply)


def r_embed_row(slots: Sequence[int], bra: SparseVec) -> SparseVec:
    """Right action of r on a bra: <v| r on the given slots."""
    return _embed(bra, slots, _r_row)


def spectral_embed_apply(
    slots: Sequence[int], v: SparseVec, lam: Sequence, mu: Sequence
) -> SparseVec:
    """Apply R_ijk carrying the spectral pairs of slots i, j, k.

    ``lam`` and ``mu`` hold one value per tensor slot (six each).
    """
    i, j, k = _check_slots(slots)
    sp = SpectralParams((lam[i], lam[j], lam[k]), (mu[i], mu[j], mu[k]))
    return _embed(v, slots, lambda n: tuple(spectral_r_apply(n, sp).items()))


def apply_chain(order, v: SparseVec, step) -> SparseVec:
    # order is written left to right; a ket meets the rightmost factor first
    for slots in reversed(order):
        v = step(slots, v)
        if not v:
            break
    return v


def state_count(slots: int, degree_bound: int) -> int:
    return comb(degree_bound + slots, slots)


def _constant_case(n: FockIndex) -> tuple[FockIndex, str | None]:
    ket = {n: ONE}
    lhs = apply_chain(LEFT_ORDER, ket, r_embed_apply)
    rhs = apply_chain(RIGHT_ORDER, ket, r_embed_apply)
    return n, _compare(lhs, rhs)


def _compare(lhs: SparseVec, rhs: SparseVec) -> str | None:
    if set(lhs) != set(rhs):
        return "support"
    if lhs != rhs:
        return "value"
    return None


def verify_tetrahedron(degree_bound: int, threads: int | None = 1) -> VerifyReport:
    rep = VerifyReport("tetrahedron", {"degree": degree_bound}, mode="constant")
    with timed(rep):
        for n, bad in parallel_map(_constant_case, states(6, degree_bound), threads):
            rep.checked += 1
            if bad:
                rep.fail(state=list(n), mismatch=bad)
    return rep


def random_spectral(rng: random.Random, count: int = 6, height: int = 7) -> list[Fraction]:
    """Small random nonzero rationals, zero rejected."""
    out = []
    while len(out) < count:
        num = rng.randint(-height, height)
        if num == 0:
            continue
        out.append(Fraction(num, rng.randint(1, height)))
    return out


def spectral_case(n: FockIndex, lam: Sequence, mu: Sequence) -> str | None:
    ket = {n: ONE}

    def step(slots, v):
        return spectral_embed_apply(slots, v, lam, mu)

    return _compare(apply_chain(LEFT_ORDER, ket, step), apply_chain(RIGHT_ORDER, ket, step))


def _spectral_task(args):
    n, lam, mu = args
    return n, spectral_case(n, lam, mu)


def verify_spectral_reduction(
    degree_bound: int,
    trials: int,
    seed: int | None = 0,
    draws: Sequence[tuple[Sequence, Sequence]] | None = None,
    threads: int | None = 1,
) -> VerifyReport:
    """Spectral tetrahedron equation at random rational parameter draws.

    Each tensor slot a carries a pair (lambda_a, mu_a); the factor R_ijk
    uses the pairs of its own slots i, j, k.
    """
    if trials < 1 and not draws:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    if draws is None:
        draws = [(random_spectral(rng), random_spectral(rng)) for _ in range(trials)]
    rep = VerifyReport(
        "spectral",
        {
            "degree": degree_bound,
            "seed": seed,
            "convention": "R_ijk carries (lambda_i, lambda_j, lambda_k; mu_i, mu_j, mu_k)",
            "draws": [
                {"lambda": [str(x) for x in lam], "mu": [str(x) for x in mu]}
                for lam, mu in draws
            ],
        },
        mode="spectral",
    )
    with timed(rep):
        for t, (lam, mu) in enumerate(draws):
            tasks = [(n, tuple(lam), tuple(mu)) for n in states(6, degree_bound)]
            for n, bad in parallel_map(_spectral_task, tasks, threads):
                rep.checked += 1
                if bad:
                    rep.fail(
                        state=list(n),
                        trial=t,
                        mismatch=bad,
                        draw={"lambda": [str(x) for x in lam], "mu": [str(x) for x in mu]},
                    )
    return rep
