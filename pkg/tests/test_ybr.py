import csv
import io
import json
from functools import lru_cache

import mpmath
import pytest

from qtetra.ybr import (
    ConvergenceError,
    SpinLabel,
    conservation_violations,
    verify_ybe,
    yb_build,
)

SIX_VERTEX = {(0, 0, 0, 0), (0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0), (1, 1, 1, 1)}


def oracle_r(q, m, n):
    """<m|r|n> from the P recursion evaluated numerically at x = q^(2 n1) etc."""
    m1, m2, m3 = m
    n1, n2, n3 = n
    if min(m + n) < 0 or m1 + m2 != n1 + n2 or m2 + m3 != n2 + n3:
        return mpmath.mpf(0)

    @lru_cache(maxsize=None)
    def P(k, a, b, c):
        if k == 0:
            return mpmath.mpf(1)
        x, y, z = q ** (2 * a), q ** (2 * b), q ** (2 * c)
        out = (1 - x) * (1 - z) * P(k - 1, a - 1, b, c - 1)
        out -= x * z * q ** (-2 * (k - 1)) * (1 - y) * P(k - 1, a, b - 1, c)
        return out

    poch = mpmath.fprod(1 - q ** (2 * j) for j in range(1, m2 + 1))
    return q ** ((m1 - n2) * (m3 - n2)) * P(m2, n1, n2, n3) / poch


def oracle_entry(s2x, t2x, key, q, u, terms=200):
    k1, k2, l1, l2 = key
    total = mpmath.mpf(0)
    for m3 in range(terms):
        n3 = m3 + k2 - l2
        a = oracle_r(q, (k1, k2, m3), (l1, l2, n3))
        b = oracle_r(q, (s2x - k1, t2x - k2, n3), (s2x - l1, t2x - l2, m3))
        total += u**m3 * a * b
    return total


def test_spin_parsing():
    assert SpinLabel.parse("1/2").twice_s == 1
    assert SpinLabel.parse("1").dim == 3
    assert [str(m) for m in SpinLabel.parse("3/2").magnetic()] == ["-3/2", "-1/2", "1/2", "3/2"]
    for bad in ("0", "-1", "1/3"):
        with pytest.raises(ValueError):
            SpinLabel.parse(bad)


def test_six_vertex_shape():
    R = yb_build("1/2", "1/2", 0.3, 0.2)
    assert set(R.entries) == SIX_VERTEX
    assert conservation_violations(R) == []


def test_spin_one_conserves():
    R = yb_build("1", "1/2", 0.5, 0.1)
    assert conservation_violations(R) == []
    assert all(k[0] + k[1] == k[2] + k[3] for k in R.entries)


def test_frozen_values():
    with mpmath.workdps(30):
        R = yb_build("1/2", "1/2", 0.3, 0.2)
        assert abs(R[(1, 1, 1, 1)] - mpmath.mpf("0.140020366598778028580468600411")) < 1e-10
        assert abs(R[(0, 1, 1, 0)] - mpmath.mpf("1.15835030549898169422285963559")) < 1e-10


@pytest.mark.parametrize("key", sorted(SIX_VERTEX))
def test_entries_match_numeric_oracle(key):
    with mpmath.workdps(30):
        q, u = mpmath.mpf(0.3), mpmath.mpf(0.2)
        R = yb_build("1/2", "1/2", 0.3, 0.2)
        want = oracle_entry(1, 1, key, q, u, terms=80)
        assert abs(R[key] - want) < 1e-15


def test_spin_one_entry_matches_oracle():
    with mpmath.workdps(30):
        q, u = mpmath.mpf(0.5), mpmath.mpf(0.1)
        R = yb_build("1", "1", 0.5, 0.1)
        for key in [(1, 1, 1, 1), (2, 0, 1, 1), (0, 2, 2, 0)]:
            assert abs(R[key] - oracle_entry(2, 2, key, q, u, terms=80)) < 1e-15


def test_truncation_robust():
    base = yb_build("1/2", "1/2", 0.3, 0.2)
    longer = yb_build("1/2", "1/2", 0.3, 0.2, fixed_terms=2 * base.order)
    for key, v in base.entries.items():
        assert abs(v - longer[key]) < 1e-18


@pytest.mark.parametrize("spin", ["1/2", "1"])
@pytest.mark.parametrize("q,u,v", [(0.3, 0.2, 0.4), (0.5, 0.1, 0.3)])
def test_ybe(spin, q, u, v):
    rep = verify_ybe(spin, spin, spin, q, u, v)
    assert rep.passed, rep.residual
    assert rep.residual < 1e-9


def test_ybe_mixed_spins_and_equal_parameters():
    assert verify_ybe("1/2", "1", "1/2", 0.3, 0.2, 0.4).passed
    assert verify_ybe("1/2", "1/2", "1/2", 0.4, 0.3, 0.3).passed


def test_ybe_inconclusive_below_precision():
    rep = verify_ybe("1/2", "1/2", "1/2", 0.3, 0.2, 0.4, tol=1e-30, dps=15)
    assert rep.inconclusive or rep.passed
    assert not rep.failures


def test_range_errors():
    with pytest.raises(ValueError):
        yb_build("1/2", "1/2", 1.2, 0.2)
    with pytest.raises(ValueError):
        yb_build("1/2", "1/2", 0.3, 1.0)
    with pytest.raises(ValueError):
        yb_build("1/2", "1/2", 0.3, 0.2, tol=0)


def test_term_cap():
    with pytest.raises(ConvergenceError):
        yb_build("1/2", "1/2", 0.99, 0.999, tol=1e-25, cap=5)


def test_csv_and_json_output():
    R = yb_build("1/2", "1/2", 0.3, 0.2)
    rows = list(csv.reader(io.StringIO(R.to_csv())))
    assert rows[0] == ["m1", "m2", "n1", "n2", "value"]
    assert len(rows) == 7
    doc = json.loads(R.to_json())
    assert doc["metadata"]["s1"] == "1/2"
    assert doc["metadata"]["truncation_order"] == R.order
    assert len(doc["entries"]) == 6
