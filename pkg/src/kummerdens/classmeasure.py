"""Haar measures of the kernel-class sets M_l(a, b) in GL_2(Z_l).

M_l(a, b) is the set of matrices whose fixed points on (Q_l/Z_l)^2 form
Z/l^a x Z/l^(a+b).  Every measure here is an exact :class:`~fractions.Fraction`
produced by closed forms; enumeration lives in :func:`brute_force_measure`
and is only meant as a cross-check.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .characters import FIXING_DETS
from .modmat import KernelClass, count_by_class_and_det, gl2_order


@dataclass(frozen=True)
class Constraint:
    """A character condition cutting a class in two.

    kind is one of
      ``"eps"``      eps_l(det) = sign, l odd (Legendre symbol of det mod l);
      ``"fixes"``    l = 2, sqrt(z) fixed (sign +1) or moved (sign -1);
      ``"psi"``      l = 2, psi = sign;
      ``"psi_eps"``  l = 2, psi * eps_z = sign.
    """

    kind: str
    sign: int
    z: int = 1

    def __post_init__(self):
        if self.kind not in ("eps", "fixes", "psi", "psi_eps"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.z not in FIXING_DETS:
            raise ValueError(f"z must be one of 1, -1, 2, -2, got {self.z}")

    def flipped(self) -> "Constraint":
        return Constraint(self.kind, -self.sign, self.z)

    def label(self) -> str:
        s = "+" if self.sign > 0 else "-"
        return {"eps": f"eps={s}1", "fixes": f"fixes(sqrt({self.z}))={s}1",
                "psi": f"psi={s}1", "psi_eps": f"psi*eps_{self.z}={s}1"}[self.kind]


def eps(sign: int) -> Constraint:
    return Constraint("eps", sign)


def psi_sign(sign: int) -> Constraint:
    return Constraint("psi", sign)


def fixes(z: int, sign: int = 1) -> Constraint:
    return Constraint("fixes", sign, z)


def psi_eps(z: int, sign: int) -> Constraint:
    return Constraint("psi_eps", sign, z)


# h(s, t, d): number of M in GL_2(Z/8) with det M = d and ker(M - I) of type
# Z/2^s x Z/2^t.  Rows with t = 3 are saturated at level 3.
H_LIST = {
    (0, 0): {1: 128, 3: 128, 5: 128, 7: 128},
    (0, 1): {1: 96, 3: 96, 5: 96, 7: 96},
    (0, 2): {1: 48, 3: 48, 5: 48, 7: 48},
    (0, 3): {1: 48, 3: 48, 5: 48, 7: 48},
    (1, 1): {1: 32, 3: 16, 5: 32, 7: 16},
    (1, 2): {1: 12, 3: 24, 5: 12, 7: 24},
    (1, 3): {1: 12, 3: 24, 5: 12, 7: 24},
    (2, 2): {1: 4, 3: 0, 5: 2, 7: 0},
    (2, 3): {1: 3, 3: 0, 5: 6, 7: 0},
    (3, 3): {1: 1, 3: 0, 5: 0, 7: 0},
}


def level3_divisors(a: int, b: int) -> tuple[int, int]:
    """Elementary-divisor exponents at level 3 of matrices in M_2(a, b)."""
    return min(a, 3), min(a + b, 3)


def fix_ratio(a: int, b: int, z: int, h: dict = H_LIST) -> Fraction:
    """mu(matrices in M_2(a, b) fixing sqrt(z)) / mu(M_2(a, b)), read off mod 8."""
    row = h[level3_divisors(a, b)]
    fixing = sum(cnt for d, cnt in row.items() if d in FIXING_DETS[z])
    return Fraction(fixing, sum(row.values()))


def psi_of_class(a: int, b: int) -> int:
    """psi is constant on M_2(a, b): -1 exactly when a = 0 and b >= 1."""
    return -1 if a == 0 and b >= 1 else 1


def mod_ell_char_counts(ell: int) -> dict[tuple[int, bool], int]:
    """Counts in GL_2(F_l) minus the identity, keyed by (eps sign, has eigenvalue 1)."""
    if ell == 2:
        raise ValueError("the eps/eigenvalue split is for odd l")
    return {
        (1, True): (ell + 1) ** 2 * (ell - 2) // 2,
        (1, False): ell * (ell**3 - 2 * ell**2 - ell + 4) // 2,
        (-1, True): ell * (ell**2 - 1) // 2,
        (-1, False): ell * (ell**2 - 1) * (ell - 2) // 2,
    }


def mod_ell_char_count(ell: int, sign: int, has_eigenvalue_one: bool) -> Fraction:
    """Counting measure in GL_2(F_l) of the non-identity matrices with eps = sign
    and (not) having 1 as an eigenvalue."""
    return Fraction(mod_ell_char_counts(ell)[(sign, has_eigenvalue_one)], gl2_order(ell))


def lift_multiplier(ell: int, a: int, b: int) -> Fraction:
    """Ratio mu(N) / mu(N mod l) for N inside M_l(a, b) cut out mod l."""
    L = Fraction(ell)
    if a == 0 and b == 0:
        return Fraction(1)
    if a == 0:
        return L**-b * (ell - 1)
    if b == 0:
        return L ** (-4 * a) * ell * (ell - 1) ** 2 * (ell + 1)
    return L ** (-4 * a - b) * (ell - 1) ** 2 * (ell + 1) ** 2


def mod_ell_base(ell: int, a: int, b: int) -> Fraction:
    """Counting measure mod l of the reduction of M_l(a, b)."""
    g = gl2_order(ell)
    if a == 0 and b == 0:
        return 1 - Fraction(ell**3 - 2 * ell, g)
    if a == 0:
        return Fraction(ell**3 - 2 * ell - 1, g)
    return Fraction(1, g)


def measure_class(ell: int, a: int, b: int) -> Fraction:
    """mu(M_l(a, b)) in GL_2(Z_l)."""
    if a < 0 or b < 0:
        raise ValueError("class exponents must be non-negative")
    return mod_ell_base(ell, a, b) * lift_multiplier(ell, a, b)


def two_adic_table(a: int, b: int) -> Fraction:
    """Closed form of mu(M_2(a, b)) as tabulated for l = 2."""
    if a == 0 and b == 0:
        return Fraction(1, 3)
    if a == 0:
        return Fraction(1, 2) * Fraction(1, 2**b)
    if b == 0:
        return Fraction(1, 2 ** (4 * a))
    return Fraction(3, 2) * Fraction(1, 2 ** (4 * a + b))


def class_fraction(ell: int, a: int, b: int, constraint: Constraint) -> Fraction:
    """Share of M_l(a, b) satisfying the constraint."""
    kind, sign = constraint.kind, constraint.sign
    if ell == 2:
        if kind == "eps":
            raise ValueError("eps constraints need an odd prime; use psi/fixes at 2")
        if kind == "psi":
            return Fraction(int(psi_of_class(a, b) == sign))
        r = fix_ratio(a, b, constraint.z)
        if kind == "fixes":
            want_fix = sign == 1
        else:
            # psi * eps_z = sign with psi constant on the class
            want_fix = psi_of_class(a, b) == sign
        return r if want_fix else 1 - r
    if kind != "eps":
        raise ValueError(f"constraint {kind!r} is only defined at l = 2")
    if a >= 1:
        # det = 1 mod l, a square
        return Fraction(int(sign == 1))
    base = mod_ell_base(ell, a, b)
    count = mod_ell_char_count(ell, sign, b >= 1)
    return count / base


def measure_class_char(ell: int, a: int, b: int, constraint: Constraint) -> Fraction:
    """mu(M_l(a, b) intersected with the constraint)."""
    return measure_class(ell, a, b) * class_fraction(ell, a, b, constraint)


def brute_force_measure(ell: int, n: int, predicate: Callable[[KernelClass, int], bool],
                        bound: int | None = None) -> Fraction:
    """Normalised counting measure in GL_2(Z/l^nZ) of {M : predicate(class(M), det(M))}."""
    return Fraction(count_by_class_and_det(ell, n, predicate, bound), gl2_order(ell, n))


@dataclass
class ClassMeasureTable:
    ell: int
    entries: dict[tuple[int, int, Constraint | None], Fraction] = field(default_factory=dict)

    @classmethod
    def build(cls, ell: int, max_sum: int, constraints=(None,)) -> "ClassMeasureTable":
        table = cls(ell)
        for a in range(max_sum + 1):
            for b in range(max_sum + 1 - a):
                for c in constraints:
                    table.entries[(a, b, c)] = (measure_class(ell, a, b) if c is None
                                                else measure_class_char(ell, a, b, c))
        return table

    def to_json(self) -> str:
        rows = [{"a": a, "b": b, "constraint": None if c is None else c.label(),
                 "num": str(v.numerator), "den": str(v.denominator)}
                for (a, b, c), v in self.entries.items()]
        return json.dumps({"ell": self.ell, "entries": rows}, indent=2)
