"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import sys

import pytest

from qtetra import coherent, pbw, qoscr, tetra, ybr


def _reports(*reps):
    ok = all(r.passed for r in reps)
    detail = "; ".join(f"{r.name} checked={r.checked} failures={r.failure_count}" for r in reps)
    return ok, detail


def involution():
    return _reports(qoscr.verify_involution(8))


def symmetry():
    return _reports(qoscr.verify_symmetry(6))


def intertwining():
    rep = qoscr.verify_intertwining(5)
    labels = {label for label, _, _ in qoscr.intertwining_relations()}
    ok, detail = _reports(rep)
    return ok and len(labels) == 6, detail


def tetrahedron():
    const = tetra.verify_tetrahedron(4)
    spectral = tetra.verify_spectral_reduction(3, 3, seed=0)
    ok, detail = _reports(const, spectral)
    return ok and const.checked == 210 and len(spectral.params["draws"]) >= 3, detail


def decomposition():
    return _reports(pbw.verify_b2_decomposition(5))


def rules():
    rep = pbw.certify_rules()
    samples = [int(n.split(": ")[1].split()[0]) for n in rep.notes]
    ok, detail = _reports(rep)
    return ok and rep.checked == 4 and min(samples) >= 3, f"{detail}; samples={samples}"


def b3():
    return _reports(pbw.verify_t1_t2(4), pbw.verify_b3_against_oracle(3))


def recursion():
    return _reports(pbw.verify_recursion(5))


def yang_baxter():
    reps = []
    for spin in ("1/2", "1"):
        for q, u, v in ((0.3, 0.2, 0.4), (0.5, 0.1, 0.3)):
            reps.append(ybr.verify_ybe(spin, spin, spin, q, u, v, tol=1e-9))
    worst = max(r.residual for r in reps)
    conserved = True
    for q, u in ((0.3, 0.2), (0.5, 0.1)):
        R = ybr.yb_build("1/2", "1/2", q, u)
        conserved &= ybr.conservation_violations(R) == []
        # every off-sector entry is structurally zero, not just small
        conserved &= all(k1 + k2 == l1 + l2 for k1, k2, l1, l2 in R.entries)
    ok = all(r.passed for r in reps) and worst < 1e-9 and conserved
    return ok, f"max residual {worst:.2e}; six-vertex conservation {conserved}"


def coherent_identities():
    return _reports(coherent.verify_psi_identity(12), coherent.verify_master_identity(4))


CRITERIA = [
    (1, "involution r^2 = 1 to degree 8", involution),
    (2, "symmetry to degree 6", symmetry),
    (3, "six intertwining identities to degree 5", intertwining),
    (4, "tetrahedron: constant to 4, spectral 3 draws to 3", tetrahedron),
    (5, "PBW decomposition equals r to degree 5", decomposition),
    (6, "straightening rules certified by the oracle", rules),
    (7, "B3: T1 = T2 to 4, oracle to 3", b3),
    (8, "scalar recursion and operator form to degree 5", recursion),
    (9, "Yang-Baxter residual < 1e-9, six-vertex pattern", yang_baxter),
    (10, "psi identity to 12, master identity to 4", coherent_identities),
]


def _line(num, title, ok, detail):
    return f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[c[2].__name__ for c in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, title, ok, detail), flush=True)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(_line(num, title, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
