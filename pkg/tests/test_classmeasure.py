import json
from fractions import Fraction
from itertools import product

import pytest

from kummerdens.characters import FIXING_DETS
from kummerdens.classmeasure import (H_LIST, ClassMeasureTable, Constraint, brute_force_measure, class_fraction,
                                     eps, fix_ratio, fixes, measure_class, measure_class_char, mod_ell_char_count,
                                     mod_ell_char_counts, psi_eps, psi_sign, two_adic_table)
from kummerdens.modmat import class_det_histogram, enumerate_gl2, gl2_order, kernel_class


def legendre(a, p):
    if a % p == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def exact_class(a, b):
    """Predicate for an unsaturated class (a, b) at the enumeration level."""
    return lambda kc: not kc.saturated and (kc.a, kc.b) == (a, b)


def psi_of_det_class(kc):
    return -1 if kc.divisors[0] == 0 and kc.divisors[1] >= 1 else 1


def two_adic_predicate(c):
    if c.kind == "psi":
        return lambda kc, d: psi_of_det_class(kc) == c.sign
    fix = lambda d: d % 8 in FIXING_DETS[c.z]
    if c.kind == "fixes":
        return lambda kc, d: fix(d) == (c.sign == 1)
    eps_z = lambda d: 1 if fix(d) else -1
    return lambda kc, d: psi_of_det_class(kc) * eps_z(d) == c.sign


def test_table_examples():
    assert measure_class(2, 0, 0) == Fraction(1, 3)
    assert measure_class(2, 1, 1) == Fraction(3, 64)
    assert measure_class(2, 1, 0) == Fraction(1, 16) == Fraction(1, 6) * Fraction(1, 16) * 2 * 1 * 3


@pytest.mark.parametrize("a,b", list(product(range(7), repeat=2)))
def test_general_formula_matches_two_adic_table(a, b):
    assert measure_class(2, a, b) == two_adic_table(a, b)


def test_h_list_from_enumeration():
    hist = class_det_histogram(2, 3)
    for (s, t), row in H_LIST.items():
        for d, cnt in row.items():
            got = sum(c for (kc, dd), c in hist.items() if kc.divisors == (s, t) and dd == d)
            assert got == cnt, (s, t, d)
    assert sum(sum(r.values()) for r in H_LIST.values()) == gl2_order(2, 3)


def test_fix_ratio_examples():
    assert fix_ratio(1, 0, -1) == Fraction(2, 3)
    for b in range(1, 5):
        assert fix_ratio(2, b, 2) == fix_ratio(2, b, -2) == Fraction(1, 3)
    for a in range(2, 6):
        assert fix_ratio(a, 0, -1) == 1
    for a in range(3, 6):
        assert fix_ratio(a, 0, 2) == fix_ratio(a, 0, -2) == 1


@pytest.mark.parametrize("a,b", [(a, b) for a in range(3) for b in range(3) if a + b <= 2])
def test_two_adic_brute_force(a, b):
    cls = exact_class(a, b)
    assert brute_force_measure(2, 3, lambda kc, d: cls(kc)) == measure_class(2, a, b)
    for c in (psi_sign(1), psi_sign(-1), *(f(z, s) for f in (fixes, psi_eps) for z in (-1, 2, -2) for s in (1, -1))):
        pred = two_adic_predicate(c)
        got = brute_force_measure(2, 3, lambda kc, d: cls(kc) and pred(kc, d))
        assert got == measure_class_char(2, a, b, c), (a, b, c)


@pytest.mark.parametrize("ell,n,classes", [
    (3, 2, [(0, 0), (0, 1), (1, 0)]),
    (3, 3, [(0, 2), (1, 1), (2, 0)]),
    (5, 2, [(0, 0), (0, 1), (1, 0)]),
])
def test_odd_brute_force(ell, n, classes):
    for a, b in classes:
        cls = exact_class(a, b)
        assert brute_force_measure(ell, n, lambda kc, d: cls(kc)) == measure_class(ell, a, b)
        for s in (1, -1):
            got = brute_force_measure(ell, n, lambda kc, d: cls(kc) and legendre(d, ell) == s)
            assert got == measure_class_char(ell, a, b, eps(s)), (ell, a, b, s)


@pytest.mark.parametrize("ell", [3, 5, 7])
def test_lemma_counts_mod_ell(ell):
    counts = {k: 0 for k in product((1, -1), (True, False))}
    for M in enumerate_gl2(ell, 1):
        if M.entries == (1, 0, 0, 1):
            continue
        a, b, c, d = M.entries
        eig1 = ((a - 1) * (d - 1) - b * c) % ell == 0
        counts[(legendre(M.det(), ell), eig1)] += 1
    assert counts == mod_ell_char_counts(ell)
    assert sum(counts.values()) + 1 == gl2_order(ell)
    if ell == 3:
        assert [counts[k] for k in ((1, True), (1, False), (-1, True), (-1, False))] == [8, 15, 12, 12]


def test_lemma_counts_level_two_ell_three():
    # each mod-3 case pulls back to 3^4 times as many matrices mod 9
    pulled = {k: 0 for k in product((1, -1), (True, False))}
    for M in enumerate_gl2(3, 2):
        r = M.reduce(1)
        if r.entries == (1, 0, 0, 1):
            continue
        kc = kernel_class(r)
        pulled[(legendre(M.det() % 3, 3), kc.divisors != (0, 0))] += 1
    assert pulled == {k: v * 81 for k, v in mod_ell_char_counts(3).items()}


def test_ell_43_cases():
    assert mod_ell_char_count(43, -1, True) == Fraction(1, 84)
    assert mod_ell_char_count(43, -1, False) == Fraction(41, 84)
    with pytest.raises(ValueError):
        mod_ell_char_counts(2)


def test_no_eigenvalue_one_mod_3():
    assert brute_force_measure(3, 1, lambda kc, d: kc.divisors == (0, 0)) == Fraction(27, 48)
    assert brute_force_measure(2, 1, lambda kc, d: True) == 1


def test_ell_43_restricted_zero_b():
    for b in range(1, 6):
        assert measure_class_char(43, 0, b, eps(-1)) == Fraction(1, 2) * Fraction(1, 43**b)


def test_psi_plus_vanishes_on_zero_b():
    for b in range(1, 6):
        assert measure_class_char(2, 0, b, psi_sign(1)) == 0


@pytest.mark.parametrize("ell", [3, 5, 43])
def test_odd_a_positive_is_all_plus(ell):
    for a, b in product(range(1, 4), range(4)):
        assert measure_class_char(ell, a, b, eps(-1)) == 0


def _constraints(ell):
    if ell != 2:
        return [eps(1)]
    return [psi_sign(1), *(f(z, 1) for f in (fixes, psi_eps) for z in (-1, 2, -2))]


@pytest.mark.parametrize("ell", [2, 3, 5, 43])
def test_sign_split_additivity(ell):
    for a, b in product(range(6), repeat=2):
        for c in _constraints(ell):
            total = measure_class_char(ell, a, b, c) + measure_class_char(ell, a, b, c.flipped())
            assert total == measure_class(ell, a, b)


def _closed_total(ell):
    g = gl2_order(ell)
    base00 = 1 - Fraction(ell**3 - 2 * ell, g)
    base0b = Fraction(ell**3 - 2 * ell - 1, g)
    a_sum = Fraction(1, ell**4 - 1)
    b_sum = Fraction(1, ell - 1)
    return (base00 + base0b * (ell - 1) * b_sum
            + Fraction(1, g) * ell * (ell - 1) ** 2 * (ell + 1) * a_sum
            + Fraction(1, g) * (ell - 1) ** 2 * (ell + 1) ** 2 * a_sum * b_sum)


@pytest.mark.parametrize("ell", [2, 3, 5, 7, 43])
def test_normalisation(ell):
    assert _closed_total(ell) == 1
    prev = Fraction(0)
    for B in range(12):
        S = sum(measure_class(ell, a, B0 - a) for B0 in range(B + 1) for a in range(B0 + 1))
        assert prev < S < 1
        assert 1 - S <= Fraction(1, ell**B)
        prev = S


def test_unsupported_constraints():
    with pytest.raises(ValueError):
        class_fraction(2, 0, 0, eps(1))
    with pytest.raises(ValueError):
        class_fraction(3, 0, 0, psi_sign(1))
    with pytest.raises(ValueError):
        Constraint("other", 1)
    with pytest.raises(ValueError):
        Constraint("fixes", 1, 3)


def test_table_json():
    t = ClassMeasureTable.build(2, 2, constraints=(None, psi_sign(-1)))
    data = json.loads(t.to_json())
    assert data["ell"] == 2
    rows = {(e["a"], e["b"], e["constraint"]): Fraction(int(e["num"]), int(e["den"])) for e in data["entries"]}
    assert rows[(0, 0, None)] == Fraction(1, 3)
    assert rows[(0, 1, "psi=-1")] == Fraction(1, 4)
    assert all(0 <= v <= 1 for v in rows.values())
