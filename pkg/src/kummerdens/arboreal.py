"""Finite-level model of the arboreal representation.

A Galois element acts on the m^n-division points of alpha through a pair
(t, M): M is its action on the m^n-torsion and t = sigma(beta) - beta for a
fixed division point beta.  The image is a subgroup of (Z/m^n)^2 x| GL_2(Z/m^n)
with law (t1, M1)(t2, M2) = (t1 + M1 t2, M1 M2).

Everything is stored per prime (CRT components).  A group is kept as a map
from its matrices to the fibre of translations {t : (t, M) in group}, which
is what the w-functions and the density count need.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import prod
from typing import Callable, Iterable, Mapping, Sequence

from sympy import factorint

from .density import prime_factors
from .modmat import EnumerationBoundError, ResidueMatrix, enumerate_gl2, gl2_order

DEFAULT_GROUP_BOUND = 2**20

Mat = tuple[int, int, int, int]
Vec = tuple[int, int]


def _mat_mul(A: Mat, B: Mat, q: int) -> Mat:
    a, b, c, d = A
    e, f, g, h = B
    return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)


def _apply(A: Mat, v: Vec, q: int) -> Vec:
    a, b, c, d = A
    return ((a * v[0] + b * v[1]) % q, (c * v[0] + d * v[1]) % q)


@lru_cache(maxsize=None)
def image_minus_identity(A: Mat, q: int) -> frozenset:
    """im(A - I) on (Z/q)^2."""
    a, b, c, d = A
    a, d = a - 1, d - 1
    return frozenset(((a * x + b * y) % q, (c * x + d * y) % q) for x in range(q) for y in range(q))


@dataclass(frozen=True)
class KummerAssumptions:
    """Kummer data at level n: for each prime, either a maximal tower or the
    exponent k such that the translations over the identity form l^k (Z/l^n)^2.

    ``stable_from`` is the level from which the constant C_m no longer moves.
    """

    failure_exponent: Mapping[int, int] = field(default_factory=dict)
    stable_from: int = 1

    def is_maximal(self, ell: int) -> bool:
        return self.failure_exponent.get(ell, 0) == 0

    def constant(self, primes: Iterable[int]) -> Fraction:
        """C_m = m^(2n) / [Kummer degree]."""
        return Fraction(prod(ell ** (2 * self.failure_exponent.get(ell, 0)) for ell in primes))


class ArborealLevelGroup:
    def __init__(self, m: int, level: int, fibers: Mapping[tuple, Iterable[tuple]],
                 generators: Sequence | None = None, bound: int | None = None):
        self.m = m
        self.level = level
        self.primes = tuple(prime_factors(m))
        self.moduli = tuple(ell**level for ell in self.primes)
        self.fibers = {M: frozenset(ts) for M, ts in fibers.items()}
        self.generators = list(generators) if generators is not None else None
        limit = DEFAULT_GROUP_BOUND if bound is None else bound
        if len(self) > limit:
            raise EnumerationBoundError(f"group has {len(self)} elements, bound is {limit}")

    def __len__(self) -> int:
        return sum(len(ts) for ts in self.fibers.values())

    def __contains__(self, elt) -> bool:
        t, M = elt
        return t in self.fibers.get(M, ())

    def __iter__(self):
        for M, ts in self.fibers.items():
            for t in ts:
                yield t, M

    @property
    def matrices(self):
        return self.fibers.keys()

    @property
    def identity(self):
        return tuple((0, 0) for _ in self.primes), tuple((1, 0, 0, 1) for _ in self.primes)

    def mul(self, x, y):
        (t1, M1), (t2, M2) = x, y
        t = tuple(((u[0] + v[0]) % q, (u[1] + v[1]) % q)
                  for u, v, q in zip(t1, (_apply(A, w, q) for A, w, q in zip(M1, t2, self.moduli)), self.moduli))
        M = tuple(_mat_mul(A, B, q) for A, B, q in zip(M1, M2, self.moduli))
        return t, M

    def inverse(self, x):
        t, M = x
        Minv = tuple(ResidueMatrix(ell, self.level, A).inverse().entries for ell, A in zip(self.primes, M))
        tinv = tuple(((-w[0]) % q, (-w[1]) % q)
                     for w, q in zip((_apply(A, v, q) for A, v, q in zip(Minv, t, self.moduli)), self.moduli))
        return tinv, Minv

    def is_closed(self) -> bool:
        """Check closure under the product and inverses, and that the identity is present."""
        elts = list(self)
        if self.identity not in self:
            return False
        return all(self.mul(x, y) in self for x in elts for y in elts) and all(self.inverse(x) in self for x in elts)

    def component(self, M, ell: int) -> ResidueMatrix:
        i = self.primes.index(ell)
        return ResidueMatrix(ell, self.level, M[i])

    def key(self, M) -> tuple:
        """Normalise a matrix given as ResidueMatrix components or raw tuples."""
        if isinstance(M, ResidueMatrix):
            M = [M]
        out = []
        for A, q in zip(M, self.moduli):
            ent = A.entries if isinstance(A, ResidueMatrix) else A
            out.append(tuple(int(e) % q for e in ent))
        if len(out) != len(self.primes):
            raise ValueError("matrix has the wrong number of prime components")
        return tuple(out)

    @classmethod
    def from_elements(cls, m: int, level: int, elements: Iterable, **kw) -> "ArborealLevelGroup":
        fibers: dict = {}
        for t, M in elements:
            fibers.setdefault(M, set()).add(t)
        return cls(m, level, fibers, **kw)

    @classmethod
    def from_generators(cls, m: int, level: int, generators: Sequence, bound: int | None = None) -> "ArborealLevelGroup":
        """Subgroup generated by ``generators`` (each a pair (t, M) of per-prime tuples)."""
        limit = DEFAULT_GROUP_BOUND if bound is None else bound
        probe = cls(m, level, {}, bound=limit)
        gens = [(tuple(tuple(v) for v in t), tuple(tuple(A) for A in M)) for t, M in generators]
        start = probe.identity
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = probe.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > limit:
                            raise EnumerationBoundError(f"generated group exceeds {limit} elements")
            frontier = nxt
        return cls.from_elements(m, level, seen, generators=gens, bound=limit)

    def restrict(self, predicate: Callable[[tuple], bool]) -> "ArborealLevelGroup":
        """Elements whose matrix satisfies ``predicate``; a subgroup when the predicate cuts one."""
        return ArborealLevelGroup(self.m, self.level, {M: ts for M, ts in self.fibers.items() if predicate(M)})

    def to_json(self) -> str:
        mod = self.m**self.level
        out = []
        for t, M in sorted(self):
            tt = [_crt([v[i] for v in t], self.moduli) for i in range(2)]
            MM = [_crt([A[i] for A in M], self.moduli) for i in range(4)]
            out.append({"t": tt, "M": [MM[:2], MM[2:]], "mod": mod})
        return json.dumps(out)

    @classmethod
    def from_json(cls, text: str, bound: int | None = None) -> "ArborealLevelGroup":
        data = json.loads(text)
        if isinstance(data, dict) and "generators" in data:
            mod = int(data["mod"])
            m, n = _split_modulus(mod)
            gens = [_element_from_json(g, m, n) for g in data["generators"]]
            return cls.from_generators(m, n, gens, bound=bound)
        items = data["elements"] if isinstance(data, dict) else data
        if not items:
            raise ValueError("empty group file")
        mods = {int(item["mod"]) for item in items}
        if len(mods) != 1:
            raise ValueError("group file mixes moduli")
        m, n = _split_modulus(mods.pop())
        return cls.from_elements(m, n, (_element_from_json(item, m, n) for item in items), bound=bound)


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, mod = 0, 1
    for r, q in zip(residues, moduli):
        k = ((r - x) * pow(mod, -1, q)) % q
        x, mod = x + mod * k, mod * q
    return x % mod


def _split_modulus(mod: int) -> tuple[int, int]:
    primes = sorted(factorint(mod))
    m = prod(primes)
    n = 0
    while m**n < mod:
        n += 1
    if m**n != mod:
        raise ValueError(f"modulus {mod} is not of the form m^n with m square-free")
    return m, n


def _element_from_json(item: Mapping, m: int, n: int):
    primes = prime_factors(m)
    moduli = [ell**n for ell in primes]
    t1, t2 = item["t"]
    (a, b), (c, d) = item["M"]
    t = tuple((t1 % q, t2 % q) for q in moduli)
    M = tuple((a % q, b % q, c % q, d % q) for q in moduli)
    return t, M


def full_matrix_group(m: int, n: int, bound: int | None = None) -> list[tuple]:
    """All of prod_l GL_2(Z/l^n) as per-prime tuples."""
    per_prime = [[A.entries for A in enumerate_gl2(ell, n, bound)] for ell in prime_factors(m)]
    return list(product(*per_prime))


def build_full_arboreal(m: int, n: int, H: Iterable | None = None,
                        kummer: KummerAssumptions | None = None, bound: int | None = None) -> ArborealLevelGroup:
    """(T x| H) where T = prod_l l^k_l (Z/l^n)^2, k_l the Kummer failure exponent (0 if maximal)."""
    kummer = kummer or KummerAssumptions()
    primes = prime_factors(m)
    limit = DEFAULT_GROUP_BOUND if bound is None else bound
    mats = list(H) if H is not None else None
    n_mats = len(mats) if mats is not None else prod(gl2_order(ell, n) for ell in primes)
    trans = []
    for ell in primes:
        k = kummer.failure_exponent.get(ell, 0)
        if not 0 <= k <= n:
            raise ValueError(f"Kummer failure exponent {k} at {ell} is outside [0, {n}]")
        q, step = ell**n, ell**k
        trans.append([(x, y) for x in range(0, q, step) for y in range(0, q, step)])
    size = n_mats * prod(len(ts) for ts in trans)
    if size > limit:
        raise EnumerationBoundError(f"arboreal group would have {size} elements, bound is {limit}")
    if mats is None:
        mats = full_matrix_group(m, n)
    T = frozenset(product(*trans))
    return ArborealLevelGroup(m, n, {tuple(M): T for M in mats}, bound=limit)


def w_level(G: ArborealLevelGroup, M) -> Fraction:
    """#(im(M - I) intersected with W(M)) / #im(M - I), W(M) = {t : (t, M) in G}."""
    M = G.key(M)
    if M not in G.fibers:
        raise ValueError("matrix is not in the projection of the group")
    images = [image_minus_identity(A, q) for A, q in zip(M, G.moduli)]
    hit = sum(1 for t in G.fibers[M] if all(v in im for v, im in zip(t, images)))
    return Fraction(hit, prod(len(im) for im in images))


def w_fiber(G: ArborealLevelGroup, x, ell: int, V) -> Fraction:
    """w_{x, l^n}(V): translations tau at l paired with V over the mod-m class x.

    ``x`` gives the matrix mod m as per-prime 4-tuples mod l.  The image of G in
    (A[l^n] x| G(l^n)) x G(m) is read off directly from the stored elements.
    """
    i = G.primes.index(ell)
    q = G.moduli[i]
    V = tuple(int(e) % q for e in (V.entries if isinstance(V, ResidueMatrix) else V))
    x = tuple(tuple(int(e) % p for e in comp) for comp, p in zip(x, G.primes))
    taus = set()
    for M, ts in G.fibers.items():
        if M[i] != V:
            continue
        if tuple(tuple(e % p for e in A) for A, p in zip(M, G.primes)) != x:
            continue
        taus.update(t[i] for t in ts)
    if not taus:
        raise ValueError("no element of the group lies over (V, x)")
    im = image_minus_identity(V, q)
    return Fraction(len(im & taus), len(im))


def kummer_constant(G: ArborealLevelGroup) -> Fraction:
    """m^(2n) / #{t : (t, I) in G}."""
    _, I = G.identity
    return Fraction((G.m**G.level) ** 2, len(G.fibers[I]))


def kernel_size_level(M: tuple, moduli: Sequence[int]) -> int:
    return prod(q * q // len(image_minus_identity(A, q)) for A, q in zip(M, moduli))


def finite_level_density(G: ArborealLevelGroup) -> Fraction:
    """#{(t, M) in G : t in im(M - I)} / #G."""
    hits = 0
    for M, ts in G.fibers.items():
        images = [image_minus_identity(A, q) for A, q in zip(M, G.moduli)]
        hits += sum(1 for t in ts if all(v in im for v, im in zip(t, images)))
    return Fraction(hits, len(G))


def finite_level_integral(G: ArborealLevelGroup) -> Fraction:
    """C_m / #G(m^n) * sum over matrices of w(M) / #ker(M - I)."""
    C = kummer_constant(G)
    total = sum((w_level(G, M) / kernel_size_level(M, G.moduli) for M in G.fibers), Fraction(0))
    return C * total / len(G.fibers)


def _decompose(elements, sub: Callable[[tuple], bool], mul):
    Hs = set(elements)
    Hp = [h for h in Hs if sub(h)]
    if not Hp:
        raise ValueError("H' is empty")
    Hp_set = set(Hp)
    for x in Hp:
        for y in Hp:
            if mul(x, y) not in Hp_set:
                raise ValueError("H' is not closed under the group law")
    cosets = []
    left = set(Hs)
    while left:
        h = min(left)
        coset = {mul(h, k) for k in Hp}
        if not coset <= left:
            raise ValueError("cosets of H' do not partition H")
        left -= coset
        cosets.append((h, coset))
    return cosets


def coset_integrate(elements: Iterable[tuple], sub: Callable[[tuple], bool], mul: Callable,
                    factor: Callable[[tuple, int, object], Fraction],
                    f: Callable[[tuple], Fraction] | None = None) -> Fraction:
    """Integrate over a finite group H inside a product over primes, coset by coset.

    ``elements`` are tuples with one component per prime; ``sub`` tests
    membership of the product subgroup G' (so H' = H & G'); ``factor(x, i, h_i)``
    is the i-th factor of the integrand on the coset with representative x.
    Each coset x H' is a product of its projections, so the integral is
    (1/(H:H')) * sum_x prod_i mean over the i-th projection of factor(x, i, .).
    When ``f`` is given, it is checked against the product of the factors.
    """
    cosets = _decompose(elements, sub, mul)
    total = Fraction(0)
    for x, coset in cosets:
        width = len(x)
        projections = [{h[i] for h in coset} for i in range(width)]
        if prod(len(p) for p in projections) != len(coset):
            raise ValueError("a coset of H' is not a product of its prime components")
        if f is not None:
            for h in coset:
                if f(h) != prod((Fraction(factor(x, i, h[i])) for i in range(width)), start=Fraction(1)):
                    raise ValueError("integrand does not factor over the coset")
        term = Fraction(1)
        for i, proj in enumerate(projections):
            term *= sum((Fraction(factor(x, i, c)) for c in proj), Fraction(0)) / len(proj)
        total += term
    return total / len(cosets)


def direct_integrate(elements: Iterable[tuple], f: Callable[[tuple], Fraction]) -> Fraction:
    """Normalised counting integral sum_h f(h) / #H."""
    elts = list(elements)
    return sum((Fraction(f(h)) for h in elts), Fraction(0)) / len(elts)
