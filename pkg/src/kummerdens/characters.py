"""Quadratic characters attached to discriminants.

Characters are evaluated on determinant residues: an automorphism of a
cyclotomic field sending a root of unity to its a-th power is identified with
the residue a, and a matrix acts through its determinant.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable

from sympy import factorint

from .modmat import ResidueMatrix


def _squarefree_int(n: int) -> int:
    sign = -1 if n < 0 else 1
    return sign * prod(p for p, e in factorint(abs(n)).items() if e % 2)


def squarefree_part(d) -> int:
    """The square-free integer d_sf with d / d_sf a rational square."""
    d = Fraction(d)
    if d == 0:
        raise ValueError("square-free part of 0 is undefined")
    # num/den and num*den differ by the square den^2
    return _squarefree_int(d.numerator * d.denominator)


def conductor(d) -> int:
    """Conductor of Q(sqrt(d))."""
    dsf = squarefree_part(d)
    return abs(dsf) if dsf % 4 == 1 else 4 * abs(dsf)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class QuadraticFieldData:
    """Invariants of Q(sqrt(d)): d_sf = z * u with z in {1, -1, 2, -2} and u
    an odd fundamental discriminant (u = 1 allowed)."""

    d: Fraction
    d_sf: int
    m_d: int
    z: int
    u: int

    @classmethod
    def from_discriminant(cls, d) -> "QuadraticFieldData":
        d = Fraction(d)
        dsf = squarefree_part(d)
        odd = abs(dsf)
        if odd % 2 == 0:
            odd //= 2
        u = odd if odd % 4 == 1 else -odd
        return cls(d, dsf, conductor(d), dsf // u, u)

    @property
    def odd_primes(self) -> tuple[int, ...]:
        """Primes dividing u."""
        return tuple(sorted(factorint(abs(self.u))))


def epsilon_residue(d_sf: int, m_d: int, a: int) -> int:
    """Value of eps_d at the residue a in (Z/m_d)^*.

    Uses the Jacobi symbol (d_sf / a') for an odd positive representative a'
    of a mod m_d; such a representative exists since an even a forces m_d odd.
    """
    a %= m_d
    if m_d > 1 and a % 2 == 0:
        a += m_d
    if a == 0:
        a = 1
    value = jacobi(d_sf, a)
    if value == 0:
        raise ValueError(f"{a} is not a unit modulo {m_d}")
    return value


def crt_det(components: Iterable[ResidueMatrix]) -> tuple[int, int]:
    """Determinant of a matrix given by per-prime components, as (residue, modulus)."""
    res, mod = 0, 1
    for M in components:
        q = M.modulus
        if mod % M.ell == 0:
            raise ValueError("components must be for distinct primes")
        # x = res mod `mod`, x = det mod q
        k = ((M.det() - res) * pow(mod, -1, q)) % q
        res, mod = res + mod * k, mod * q
    return res % mod, mod


def epsilon_d(q: QuadraticFieldData, M) -> int:
    """eps_d evaluated on the determinant of M.

    ``M`` is a :class:`ResidueMatrix` or an iterable of per-prime components;
    its modulus must be divisible by m_d.
    """
    comps = [M] if isinstance(M, ResidueMatrix) else list(M)
    residue, modulus = crt_det(comps)
    if modulus % q.m_d:
        raise ValueError(f"modulus {modulus} is not divisible by the conductor {q.m_d}")
    return epsilon_residue(q.d_sf, q.m_d, residue)


# det residues mod 8 that fix sqrt(z), z in {-1, 2, -2}
FIXING_DETS = {1: frozenset({1, 3, 5, 7}), -1: frozenset({1, 5}), 2: frozenset({1, 7}), -2: frozenset({1, 3})}


def fixes_sqrt(z: int, det_mod8: int) -> bool:
    """Whether an element with this determinant mod 8 fixes sqrt(z)."""
    return det_mod8 % 8 in FIXING_DETS[z]


_NONZERO_F2 = ((1, 0), (0, 1), (1, 1))


def psi(M: ResidueMatrix) -> int:
    """Sign of the permutation M induces on the three nonzero vectors of F_2^2."""
    if M.ell != 2:
        raise ValueError("psi is defined on matrices mod 2")
    M = M.reduce(1)
    if not M.is_invertible():
        raise ValueError("psi needs an invertible matrix")
    perm = [_NONZERO_F2.index(M.apply(v)) for v in _NONZERO_F2]
    inversions = sum(perm[i] > perm[j] for i in range(3) for j in range(i + 1, 3))
    return -1 if inversions % 2 else 1
