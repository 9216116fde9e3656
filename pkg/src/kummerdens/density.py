"""Exact densities of primes at which a point reduces to order coprime to m.

For a prime l with surjective l-adic image and maximal Kummer tower, the
density for the point l^e * alpha is the class series

    sum over (a, b) of  mu(M_l(a, b)) * l^-(2a + b) * l^(min(e, a) + min(e, a + b)),

i.e. each class contributes its measure divided by #(l^e ker(M - I)).
Restricting the measure to one side of a character gives the signed
contributions used to combine primes on a Serre curve.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import product
from math import prod
from typing import Callable, Iterable, Mapping

from sympy import factorint

from .characters import QuadraticFieldData
from .classmeasure import Constraint, eps, measure_class, measure_class_char, psi_eps


def class_weight(ell: int, e: int, a: int, b: int) -> Fraction:
    """1 / #(l^e ker(M - I)) for M in M_l(a, b)."""
    return Fraction(1, ell ** (max(0, a - e) + max(0, a + b - e)))


def _series(ell: int, e: int, measure: Callable[[int, int], Fraction]) -> Fraction:
    # Beyond A = B = max(e, 3) + 1 every ingredient is geometric: stepping a
    # multiplies the term by l^-6, stepping b by l^-2 (measure l^-4 or l^-1,
    # weight l^-2 or l^-1, character ratios frozen).
    A = B = max(e, 3) + 1
    ra, rb = Fraction(1, ell**6), Fraction(1, ell**2)

    def term(a, b):
        return measure(a, b) * class_weight(ell, e, a, b)

    total = sum((term(a, b) for a in range(A) for b in range(B)), Fraction(0))
    total += sum((term(a, B) for a in range(A)), Fraction(0)) / (1 - rb)
    total += sum((term(A, b) for b in range(B)), Fraction(0)) / (1 - ra)
    total += term(A, B) / ((1 - ra) * (1 - rb))
    return total


def dens_ell_maximal(ell: int, e: int = 0) -> Fraction:
    """Density for l^e * alpha when the l-adic image and Kummer tower are maximal."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return _series(ell, e, lambda a, b: measure_class(ell, a, b))


def dens_ell_char(ell: int, e: int, constraint: Constraint) -> Fraction:
    """Contribution to :func:`dens_ell_maximal` from matrices satisfying ``constraint``."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    measure_class_char(ell, 0, 0, constraint)  # rejects unsupported combinations early
    return _series(ell, e, lambda a, b: measure_class_char(ell, a, b, constraint))


def dens_product(factors: Iterable[Fraction]) -> Fraction:
    """Density for m when the l-parts are linearly disjoint."""
    out = Fraction(1)
    for f in factors:
        f = Fraction(f)
        if not 0 <= f <= 1:
            raise ValueError(f"density factor {f} outside [0, 1]")
        out *= f
    return out


def dens_truncated_bounds(ell: int, e: int, cutoff: int) -> tuple[Fraction, Fraction]:
    """Rigorous enclosure of :func:`dens_ell_maximal` from classes with a + b <= cutoff.

    The classes left out have total measure 1 - (partial measure) and weight at
    most l^-max(0, cutoff + 1 - e).
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    lower = Fraction(0)
    mass = Fraction(0)
    for a in range(cutoff + 1):
        for b in range(cutoff + 1 - a):
            mu = measure_class(ell, a, b)
            mass += mu
            lower += mu * class_weight(ell, e, a, b)
    upper = lower + (1 - mass) * Fraction(1, ell ** max(0, cutoff + 1 - e))
    return lower, upper


def to_decimal(x: Fraction, digits: int = 10) -> str:
    """Round-to-nearest decimal string with ``digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(+(Decimal(x.numerator) / Decimal(x.denominator)))


def prime_factors(m: int) -> list[int]:
    fac = factorint(m)
    if any(k > 1 for k in fac.values()):
        raise ValueError(f"m = {m} is not square-free")
    return sorted(fac)


@dataclass
class SerreDensityInput:
    """Data needed to evaluate the density for a point on a (Serre) curve.

    ``discriminant`` may be None when no curve is attached; the primes are then
    treated as independent.  ``exponents[l]`` is v_l of the multiplier of the
    generator.  ``overrides`` supply per-prime densities for primes where the
    maximal closed form does not apply; ``kummer_maximal`` records the
    maximality assumption for the rest.
    """

    m: int
    discriminant: Fraction | None = None
    exponents: Mapping[int, int] = field(default_factory=dict)
    overrides: Mapping[int, Fraction] = field(default_factory=dict)
    kummer_maximal: Mapping[int, bool] = field(default_factory=dict)
    serre_curve: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        self.primes = prime_factors(self.m)
        extra = set(self.exponents) - set(self.primes)
        if extra:
            raise ValueError(f"exponents given for primes {sorted(extra)} not dividing m")
        self.overrides = {int(k): Fraction(v) for k, v in self.overrides.items()}
        if set(self.overrides) - set(self.primes):
            raise ValueError("override given for a prime not dividing m")
        self.field = None if self.discriminant is None else QuadraticFieldData.from_discriminant(self.discriminant)

    def exponent(self, ell: int) -> int:
        return int(self.exponents.get(ell, 0))

    @property
    def entangled(self) -> bool:
        """True when the m-adic image is the index-2 subgroup cut out by psi * eps_z = eps_u."""
        if self.field is None or not self.serre_curve:
            return False
        u = self.field.u
        return self.m % 2 == 0 and self.m != 2 and self.m % u == 0 and abs(u) > 1


@dataclass
class DensityBreakdown:
    m: int
    exponents: dict[int, int]
    entangled: bool
    contributions: list[tuple[int, int | None, Fraction]]
    density: Fraction

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "exponents": {str(k): v for k, v in self.exponents.items()},
            "entangled": self.entangled,
            "contributions": [{"ell": ell, "sign": sign, "num": str(v.numerator), "den": str(v.denominator)}
                              for ell, sign, v in self.contributions],
            "density": {"num": str(self.density.numerator), "den": str(self.density.denominator),
                        "decimal": to_decimal(self.density)},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def __str__(self) -> str:
        pct = to_decimal(self.density * 100, 8)
        return f"{self.density} = {pct}%"


def _plain_factor(inp: SerreDensityInput, ell: int) -> Fraction:
    if ell in inp.overrides:
        return inp.overrides[ell]
    if not inp.kummer_maximal.get(ell, True):
        raise ValueError(f"prime {ell}: Kummer tower not maximal and no override supplied")
    return dens_ell_maximal(ell, inp.exponent(ell))


def dens_serre_composite(inp: SerreDensityInput) -> DensityBreakdown:
    """Density for m, combining primes through the Serre entanglement when present."""
    exps = {ell: inp.exponent(ell) for ell in inp.primes}
    if not inp.entangled:
        factors = [(ell, None, _plain_factor(inp, ell)) for ell in inp.primes]
        return DensityBreakdown(inp.m, exps, False, factors, dens_product(f for _, _, f in factors))

    q = inp.field
    odd = q.odd_primes
    for ell in (2,) + odd:
        if ell in inp.overrides:
            raise ValueError(f"prime {ell} takes part in the entanglement; overrides cannot be split by sign")
        if not inp.kummer_maximal.get(ell, True):
            raise ValueError(f"prime {ell}: entangled combination needs a maximal Kummer tower")
    contributions = []
    two = {}
    for s in (1, -1):
        two[s] = dens_ell_char(2, exps[2], psi_eps(q.z, s))
        contributions.append((2, s, two[s]))
    signed = {}
    for ell in odd:
        for s in (1, -1):
            signed[(ell, s)] = dens_ell_char(ell, exps[ell], eps(s))
            contributions.append((ell, s, signed[(ell, s)]))

    def odd_part(s: int) -> Fraction:
        total = Fraction(0)
        for signs in product((1, -1), repeat=len(odd)):
            if prod(signs) == s:
                total += prod((signed[(ell, t)] for ell, t in zip(odd, signs)), start=Fraction(1))
        return total

    rest = [ell for ell in inp.primes if ell != 2 and ell not in odd]
    others = Fraction(1)
    for ell in rest:
        f = _plain_factor(inp, ell)
        contributions.append((ell, None, f))
        others *= f
    value = 2 * (two[1] * odd_part(1) + two[-1] * odd_part(-1)) * others
    return DensityBreakdown(inp.m, exps, True, contributions, value)
