from fractions import Fraction
from math import comb

import pytest
import sympy as sp

from qtetra.exactnum import ONE, ZERO, LaurentQ, Q
from qtetra.qoscr import (
    SpectralParams,
    apply_sum,
    conserving_pairs,
    intertwining_relations,
    p_poly,
    r_apply,
    r_element,
    r_row,
    spectral_r_apply,
    states,
    symmetry_sides,
    verify_intertwining,
    verify_involution,
    verify_symmetry,
)

qs, xs, ys, zs = sp.symbols("q x y z")


def L(d):
    return LaurentQ(d)


@pytest.fixture(scope="module")
def sympy_p():
    """P_m straight from the recursion, expanded by sympy."""
    table = [sp.Integer(1)]
    for m in range(5):
        prev = table[m]
        nxt = (1 - xs) * (1 - zs) * prev.subs({xs: xs / qs**2, zs: zs / qs**2}, simultaneous=True)
        nxt -= xs * zs / qs ** (2 * m) * (1 - ys) * prev.subs(ys, ys / qs**2)
        table.append(sp.expand(nxt))
    return table


def tripoly_to_sympy(t):
    out = 0
    for (i, j, k), c in t.terms.items():
        out += sum(sp.Rational(v) * qs**e for e, v in c.terms.items()) * xs**i * ys**j * zs**k
    return sp.expand(out)


def laurent_to_sympy(p):
    return sum((sp.Rational(Fraction(v)) * qs**e for e, v in p.terms.items()), sp.Integer(0))


def test_p0_and_p1():
    assert tripoly_to_sympy(p_poly(0)) == 1
    assert tripoly_to_sympy(p_poly(1)) == sp.expand((1 - xs) * (1 - zs) - xs * zs * (1 - ys))


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_p_matches_symbolic_expansion(sympy_p, m):
    assert sp.expand(tripoly_to_sympy(p_poly(m)) - sympy_p[m]) == 0


@pytest.mark.parametrize("m", range(0, 13))
def test_p_degree_bounds(m):
    P = p_poly(m)
    # each step multiplies by at most x y z
    assert P.total_degree() == 3 * m
    assert all(P.degree_in(v) == m for v in range(3))


def test_r_element_examples():
    assert r_element((0, 0, 0), (0, 0, 0)) == ONE
    assert r_element((0, 1, 0), (0, 1, 0)) == -Q
    assert r_element((0, 1, 0), (1, 0, 1)) == L({0: 1, 2: -1})
    assert r_element((1, 0, 0), (0, 1, 0)) == ZERO


def test_r_element_negative_indices_vanish():
    assert r_element((-1, 1, 0), (0, 0, 0)) == ZERO
    assert r_element((0, 0, 0), (0, -1, 0)) == ZERO


@pytest.mark.parametrize(
    "m,n",
    [((1, 2, 0), (3, 0, 2)), ((2, 1, 2), (1, 2, 1)), ((0, 3, 1), (2, 1, 3)), ((2, 2, 2), (3, 1, 3))],
)
def test_r_element_against_symbolic_division(sympy_p, m, n):
    m1, m2, m3 = m
    n1, n2, n3 = n
    expr = qs ** ((m1 - n2) * (m3 - n2)) * sympy_p[m2].subs(
        {xs: qs ** (2 * n1), ys: qs ** (2 * n2), zs: qs ** (2 * n3)}
    )
    poch = sp.prod([1 - qs ** (2 * k) for k in range(1, m2 + 1)])
    want = sp.cancel(expr / poch)
    assert sp.expand(want - laurent_to_sympy(r_element(m, n))) == 0


def test_conservation_exhaustive_degree_8():
    for n in states(3, 8):
        for m in states(3, 8):
            ok = m[0] + m[1] == n[0] + n[1] and m[1] + m[2] == n[1] + n[2]
            if not ok:
                assert r_element(m, n) == ZERO


def test_divisibility_to_degree_8():
    # r_element raises if the Pochhammer division is not exact
    for m, n in conserving_pairs(8):
        r_element(m, n)


def test_r_apply_examples():
    assert r_apply((0, 0, 0)) == {(0, 0, 0): ONE}
    assert r_apply((0, 1, 0)) == {(1, 0, 1): ONE, (0, 1, 0): -Q}
    assert r_apply((1, 0, 1)) == {(0, 1, 0): L({0: 1, 2: -1}), (1, 0, 1): Q}


def test_r_row_is_transpose_of_r_apply():
    for m in states(3, 4):
        for n, v in r_row(m).items():
            assert r_apply(n)[m] == v


def test_involution_counts():
    rep = verify_involution(0)
    assert rep.passed and rep.checked == 1
    rep = verify_involution(4)
    assert rep.passed and rep.checked == comb(7, 3) == 35


def test_symmetry_examples():
    left, right = symmetry_sides((0, 0, 0), (0, 0, 0))
    assert left == right == ONE
    left, right = symmetry_sides((0, 1, 0), (1, 0, 1))
    assert left == right == L({0: 1, 2: -1}) ** 2


def test_symmetry_degree_6():
    assert verify_symmetry(6).passed


def test_intertwining_vacuum_examples():
    rels = {label: (lhs, rhs) for label, lhs, rhs in intertwining_relations()}
    vac = {(0, 0, 0): ONE}
    lhs, rhs = rels["2+"]
    want = {(1, 0, 1): ONE, (0, 1, 0): -Q}
    # r a2+ |000> = r|010>, and (a1+ a3+ - q^{1+N1+N3} a2+) r|000>
    assert apply_sum(lhs, vac) == r_apply((0, 1, 0))
    assert apply_sum(rhs, vac) == want
    lhs, rhs = rels["1-"]
    assert apply_sum(lhs, vac) == {} == apply_sum(rhs, vac)


def test_intertwining_degree_5():
    rep = verify_intertwining(5)
    assert rep.passed
    assert rep.checked == 6 * comb(8, 3)


def test_intertwining_detects_wrong_sign():
    # flipping the sign of the q^{1+N1+N3} term must break relation 2
    from qtetra import qoscr

    rels = intertwining_relations()
    label, lhs, rhs = rels[1]
    assert label == "2+"
    bad = [rhs[0], (("c", Q),) + rhs[1][1:]]
    basis = {(0, 1, 0): ONE}
    assert qoscr.apply_sum(lhs, basis) != qoscr.apply_sum(bad, basis)


def test_spectral_trivial_dressing():
    # lambda1 = -q makes (-lambda1 mu3 / q)^{N2} = 1
    sp_ = SpectralParams((-Q, 1, 1), (1, 1, 1))
    for n in states(3, 3):
        assert spectral_r_apply(n, sp_) == r_apply(n)


def test_spectral_vacuum():
    sp_ = SpectralParams((2, 3, 5), (7, Fraction(1, 2), 3))
    assert spectral_r_apply((0, 0, 0), sp_) == {(0, 0, 0): ONE}


def test_spectral_all_ones_on_010():
    # r|010> = |101> - q|010>; (-1/q)^{N2} turns -q|010> into |010>
    assert spectral_r_apply((0, 1, 0), SpectralParams.ones()) == {(1, 0, 1): ONE, (0, 1, 0): ONE}


def test_spectral_hand_computed():
    sp_ = SpectralParams((2, 3, 5), (7, 11, 13))
    # (l3/l2)^{N1} (m1/m2)^{N3} on |101>: (5/3)(7/11); then (-2*13/q)^{N2}
    got = spectral_r_apply((1, 0, 1), sp_)
    scale = Fraction(5, 3) * Fraction(7, 11)
    assert got[(1, 0, 1)] == Q * scale
    assert got[(0, 1, 0)] == L({0: 1, 2: -1}) * scale * LaurentQ.monomial(-1, -26)


def test_spectral_rejects_zero():
    with pytest.raises(ValueError):
        SpectralParams((0, 1, 1), (1, 1, 1))
    with pytest.raises(ValueError):
        SpectralParams((1, 1, 1), (1, 1 + Q, 1))
