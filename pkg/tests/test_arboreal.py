from fractions import Fraction
from itertools import product

import pytest

from kummerdens.arboreal import (ArborealLevelGroup, KummerAssumptions, build_full_arboreal, coset_integrate,
                                 direct_integrate, finite_level_density, finite_level_integral, kummer_constant,
                                 w_fiber, w_level)
from kummerdens.characters import psi
from kummerdens.modmat import EnumerationBoundError, ResidueMatrix, enumerate_gl2, gl2_order


def in_image(A, t, q):
    """Brute force: is t = (A - I) v for some v in (Z/q)^2?"""
    a, b, c, d = A
    return any(((a - 1) * x + b * y - t[0]) % q == 0 and (c * x + (d - 1) * y - t[1]) % q == 0
               for x in range(q) for y in range(q))


def brute_density(G):
    hits = sum(1 for t, M in G if all(in_image(A, v, q) for A, v, q in zip(M, t, G.moduli)))
    return Fraction(hits, len(G))


def legendre3(d):
    return 1 if d % 3 == 1 else -1


def mat_mul(A, B, q):
    a, b, c, d = A
    e, f, g, h = B
    return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)


def kernel_count(A, q):
    return sum(1 for x in range(q) for y in range(q) if _fixed(A, (x, y), q))


def _fixed(A, v, q):
    a, b, c, d = A
    return (a * v[0] + b * v[1]) % q == v[0] and (c * v[0] + d * v[1]) % q == v[1]


def test_full_group_sizes():
    assert len(build_full_arboreal(2, 1)) == 24
    assert len(build_full_arboreal(6, 1)) == 36 * gl2_order(2) * gl2_order(3)
    assert kummer_constant(build_full_arboreal(6, 1)) == 1
    assert kummer_constant(build_full_arboreal(3, 2, kummer=KummerAssumptions({3: 1}))) == 9


@pytest.mark.parametrize("m,n,k", [(2, 1, {}), (2, 2, {2: 1}), (3, 1, {})])
def test_closure(m, n, k):
    G = build_full_arboreal(m, n, kummer=KummerAssumptions(k))
    assert G.is_closed()


def test_generated_group_is_closed():
    g1 = (((0, 0),), ((1, 1, 0, 1),))
    g2 = (((2, 0),), ((1, 0, 0, 1),))
    G = ArborealLevelGroup.from_generators(2, 2, [g1, g2])
    assert G.is_closed()
    # the unipotent generator has order 4 and conjugates (2, 0) to itself
    assert len(G) == 8


def test_bound_guard():
    with pytest.raises(EnumerationBoundError):
        build_full_arboreal(6, 2)
    with pytest.raises(ValueError):
        build_full_arboreal(2, 1, kummer=KummerAssumptions({2: 3}))


def test_w_full_group_is_one():
    G = build_full_arboreal(6, 1)
    assert all(w_level(G, M) == 1 for M in G.matrices)


def test_w_identity_under_kummer_failure():
    G = build_full_arboreal(3, 2, kummer=KummerAssumptions({3: 1}))
    assert w_level(G, ResidueMatrix.identity(3, 2)) == 1
    with pytest.raises(ValueError):
        w_level(G, ResidueMatrix(3, 2, (3, 0, 0, 1)))


def test_w_level_against_definition():
    G = build_full_arboreal(2, 2, kummer=KummerAssumptions({2: 1}))
    for M, ts in G.fibers.items():
        (A,), q = M, 4
        image = {t for t in product(range(q), repeat=2) if in_image(A, t, q)}
        hit = sum(1 for (t,) in ts if t in image)
        assert w_level(G, M) == Fraction(hit, len(image))
        assert (w_level(G, M) * len(image)).denominator == 1


def _product_group(G2, G3):
    fibers = {}
    for (M2, T2), (M3, T3) in product(G2.fibers.items(), G3.fibers.items()):
        fibers[(M2[0], M3[0])] = {(t2[0], t3[0]) for t2 in T2 for t3 in T3}
    return ArborealLevelGroup(6, 1, fibers)


def _toy_factors():
    # all of GL_2(F_2) with no translations, and SL_2(F_3) with Kummer failure
    G2 = ArborealLevelGroup.from_generators(2, 1, [(((0, 0),), ((1, 1, 0, 1),)), (((0, 0),), ((0, 1, 1, 1),))])
    G3 = build_full_arboreal(3, 1, H=[(A.entries,) for A in enumerate_gl2(3, 1) if A.det() == 1],
                             kummer=KummerAssumptions({3: 1}))
    return G2, G3


def test_w_product_formula():
    G2, G3 = _toy_factors()
    G = _product_group(G2, G3)
    assert G.is_closed()
    assert {w_level(G2, M) for M in G2.matrices} == {Fraction(1, 4), Fraction(1, 2), 1}
    assert {w_level(G3, M) for M in G3.matrices} == {Fraction(1, 9), Fraction(1, 3), 1}
    for M in G.matrices:
        assert w_level(G, M) == w_level(G2, (M[0],)) * w_level(G3, (M[1],))


def test_w_fiber_on_product_group():
    G2, G3 = _toy_factors()
    G = _product_group(G2, G3)
    for M in G.matrices:
        assert w_fiber(G, M, 2, M[0]) == w_level(G2, (M[0],))
        assert w_fiber(G, M, 3, M[1]) == w_level(G3, (M[1],))
    with pytest.raises(ValueError):
        w_fiber(G, ((1, 0, 0, 1), (2, 0, 0, 1)), 3, (2, 0, 0, 1))


def test_finite_density_double_loop():
    for G in (build_full_arboreal(2, 1), build_full_arboreal(3, 1),
              build_full_arboreal(2, 2, kummer=KummerAssumptions({2: 1})), _product_group(*_toy_factors())):
        assert finite_level_density(G) == brute_density(G)
    assert finite_level_density(build_full_arboreal(2, 1)) == Fraction(5, 8)


def test_trivial_group_density():
    G = ArborealLevelGroup(2, 1, {((1, 0, 0, 1),): {((0, 0),)}})
    assert finite_level_density(G) == 1


def test_density_monotone_in_level():
    vals = [finite_level_density(build_full_arboreal(2, n)) for n in (1, 2, 3)]
    assert vals[0] >= vals[1] >= vals[2]


def test_integral_equals_count():
    for G in (build_full_arboreal(2, 2), build_full_arboreal(3, 1),
              build_full_arboreal(2, 2, kummer=KummerAssumptions({2: 1})),
              build_full_arboreal(6, 1, kummer=KummerAssumptions({3: 1}))):
        assert finite_level_integral(G) == finite_level_density(G)


def test_coset_integrate_constant():
    elts = [(a,) for a in range(4)]
    add = lambda x, y: ((x[0] + y[0]) % 4,)
    assert coset_integrate(elts, lambda h: h[0] % 2 == 0, add, lambda x, i, c: 1) == 1


def test_coset_integrate_diagonal():
    H = [(0, 0), (1, 1)]
    mul = lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2)
    f = lambda h: Fraction(h[0] * h[1])
    got = coset_integrate(H, lambda h: h == (0, 0), mul, lambda x, i, c: c, f=f)
    assert got == direct_integrate(H, f) == Fraction(1, 2)


def _serre_toy(q2):
    """{(M2, M3) : psi(M2 mod 2) = (det M3 / 3)} inside GL_2(Z/q2) x GL_2(F_3)."""
    n2 = q2.bit_length() - 1
    two = list(enumerate_gl2(2, n2))
    three = list(enumerate_gl2(3, 1))
    H = [(A.entries, B.entries) for A in two for B in three if psi(A) == legendre3(B.det())]
    sign2 = {A.entries: psi(A) for A in two}
    sign3 = {B.entries: legendre3(B.det()) for B in three}
    mul = lambda x, y: (mat_mul(x[0], y[0], q2), mat_mul(x[1], y[1], 3))
    sub = lambda h: sign2[h[0]] == 1 and sign3[h[1]] == 1
    return H, mul, sub


@pytest.mark.parametrize("q2", [2, 4])
def test_coset_integrate_serre_toy(q2):
    H, mul, sub = _serre_toy(q2)
    assert len(H) == gl2_order(2, q2.bit_length() - 1) * gl2_order(3) // 2
    ker = {}

    def factor(x, i, c):
        q = (q2, 3)[i]
        if (c, q) not in ker:
            ker[(c, q)] = kernel_count(c, q)
        return Fraction(1, ker[(c, q)])

    f = lambda h: factor(None, 0, h[0]) * factor(None, 1, h[1])
    assert coset_integrate(H, sub, mul, factor, f=f) == direct_integrate(H, f)


def test_coset_integrate_rejects_non_subgroup():
    elts = [(a,) for a in range(4)]
    add = lambda x, y: ((x[0] + y[0]) % 4,)
    with pytest.raises(ValueError):
        coset_integrate(elts, lambda h: h[0] in (0, 1), add, lambda x, i, c: 1)
    with pytest.raises(ValueError):
        coset_integrate(elts, lambda h: h[0] == 0, add, lambda x, i, c: 1, f=lambda h: 2)


def test_json_round_trip():
    G2, G3 = _toy_factors()
    for G in (G2, _product_group(G2, G3), build_full_arboreal(3, 2, kummer=KummerAssumptions({3: 1}))):
        back = ArborealLevelGroup.from_json(G.to_json())
        assert (back.m, back.level) == (G.m, G.level)
        assert back.fibers == G.fibers


def test_json_generator_form():
    text = '{"mod": 4, "generators": [{"t": [1, 0], "M": [[1, 1], [0, 1]]}, {"t": [0, 1], "M": [[0, 1], [1, 0]]}]}'
    G = ArborealLevelGroup.from_json(text)
    ref = ArborealLevelGroup.from_generators(2, 2, [(((1, 0),), ((1, 1, 0, 1),)), (((0, 1),), ((0, 1, 1, 0),))])
    assert G.fibers == ref.fibers
    with pytest.raises(ValueError):
        ArborealLevelGroup.from_json('[{"t": [0, 0], "M": [[1, 0], [0, 1]], "mod": 12}]')
