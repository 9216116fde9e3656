"""2x2 matrices over Z/l^nZ: arithmetic, kernel classes of M - I, and
exhaustive enumeration of GL_2(Z/l^nZ).

Composite moduli are never handled as a single ring here; callers keep one
:class:`ResidueMatrix` per prime and combine results themselves.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

DEFAULT_ENUM_BOUND = 2**25


class EnumerationBoundError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the configured guard."""


def enum_bound() -> int:
    """Current enumeration guard; ``KUMMERDENS_ENUM_BOUND`` overrides the default."""
    raw = os.environ.get("KUMMERDENS_ENUM_BOUND")
    return int(raw) if raw else DEFAULT_ENUM_BOUND


def valuation(x: int, ell: int) -> int:
    """l-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


def gl2_order(ell: int, n: int = 1) -> int:
    return ell ** (4 * (n - 1)) * (ell * ell - 1) * (ell * ell - ell)


@dataclass(frozen=True)
class KernelClass:
    """Type Z/l^a x Z/l^(a+b) of ker(M - I).

    When ``saturated`` is set, the larger elementary divisor reached the level,
    so only ``a`` (if ``a < level``) and the lower bound ``a + b >= level`` are
    known; the stable class needs a higher level to resolve.
    """

    a: int
    b: int
    saturated: bool

    @property
    def divisors(self) -> tuple[int, int]:
        """Exponents (s, t) of the elementary divisors of the kernel."""
        return self.a, self.a + self.b


@dataclass(frozen=True)
class ResidueMatrix:
    """A 2x2 matrix [[a, b], [c, d]] over Z/l^nZ."""

    ell: int
    level: int
    entries: tuple[int, int, int, int]

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        q = self.ell**self.level
        object.__setattr__(self, "entries", tuple(int(e) % q for e in self.entries))

    @classmethod
    def from_rows(cls, rows, ell: int, level: int) -> "ResidueMatrix":
        (a, b), (c, d) = rows
        return cls(ell, level, (a, b, c, d))

    @classmethod
    def identity(cls, ell: int, level: int) -> "ResidueMatrix":
        return cls(ell, level, (1, 0, 0, 1))

    @property
    def modulus(self) -> int:
        return self.ell**self.level

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        a, b, c, d = self.entries
        return (a, b), (c, d)

    def det(self) -> int:
        a, b, c, d = self.entries
        return (a * d - b * c) % self.modulus

    def is_invertible(self) -> bool:
        return self.det() % self.ell != 0

    def _check_compatible(self, other: "ResidueMatrix") -> None:
        if (self.ell, self.level) != (other.ell, other.level):
            raise ValueError("matrices live over different rings")

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check_compatible(other)
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return ResidueMatrix(self.ell, self.level, (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))

    def __sub__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check_compatible(other)
        return ResidueMatrix(self.ell, self.level, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def apply(self, v: tuple[int, int]) -> tuple[int, int]:
        a, b, c, d = self.entries
        q = self.modulus
        return (a * v[0] + b * v[1]) % q, (c * v[0] + d * v[1]) % q

    def reduce(self, level: int) -> "ResidueMatrix":
        if level > self.level:
            raise ValueError("cannot reduce to a higher level")
        return ResidueMatrix(self.ell, level, self.entries)

    def inverse(self) -> "ResidueMatrix":
        a, b, c, d = self.entries
        inv = pow(self.det(), -1, self.modulus)
        return ResidueMatrix(self.ell, self.level, (d * inv, -b * inv, -c * inv, a * inv))

    def lifts(self) -> Iterator["ResidueMatrix"]:
        """All l^4 lifts of this matrix to level + 1."""
        q = self.modulus
        r = range(self.ell)
        a, b, c, d = self.entries
        for i in r:
            for j in r:
                for k in r:
                    for m in r:
                        yield ResidueMatrix(self.ell, self.level + 1, (a + q * i, b + q * j, c + q * k, d + q * m))


def det(M: ResidueMatrix) -> int:
    return M.det()


def smith_exponents(M: ResidueMatrix) -> tuple[int, int]:
    """Exponents (s, t) with s <= t <= n of the Smith form diag(l^s, l^t) of M.

    Elimination uses a pivot of minimal valuation, which is a unit times l^s
    and divides every other entry.
    """
    ell, n, q = M.ell, M.level, M.modulus
    ent = M.entries
    if all(e == 0 for e in ent):
        return n, n
    vals = [valuation(e, ell) if e else n for e in ent]
    k = min(range(4), key=vals.__getitem__)
    s = vals[k]
    # move the pivot to position (0, 0) by swapping rows and/or columns
    a, b, c, d = ent
    if k == 1:
        a, b, c, d = b, a, d, c
    elif k == 2:
        a, b, c, d = c, d, a, b
    elif k == 3:
        a, b, c, d = d, c, b, a
    unit = (a // ell**s) % q
    rest = (d - (c // ell**s) * pow(unit, -1, q) * b) % q
    t = min(valuation(rest, ell), n) if rest else n
    return s, t


def kernel_class(M: ResidueMatrix) -> KernelClass:
    """Kernel class of M - I on (Z/l^nZ)^2."""
    if not M.is_invertible():
        raise ValueError("kernel_class needs an invertible matrix")
    s, t = smith_exponents(M - ResidueMatrix.identity(M.ell, M.level))
    return KernelClass(s, t - s, t == M.level)


def kernel_size(M: ResidueMatrix) -> int:
    """#ker(M - I) on (Z/l^nZ)^2."""
    s, t = smith_exponents(M - ResidueMatrix.identity(M.ell, M.level))
    return M.ell ** (s + t)


def image_size(M: ResidueMatrix) -> int:
    """#im(M - I) on (Z/l^nZ)^2."""
    return M.modulus**2 // kernel_size(M)


def _check_bound(ell: int, n: int, bound: int | None) -> None:
    size = ell ** (4 * n)
    limit = enum_bound() if bound is None else bound
    if size > limit:
        raise EnumerationBoundError(f"enumerating (Z/{ell}^{n})^4 needs {size} > {limit} elements")


@lru_cache(maxsize=16)
def _gl2_arrays(ell: int, n: int) -> tuple[np.ndarray, ...]:
    q = ell**n
    grid = np.indices((q, q, q, q), dtype=np.int64).reshape(4, -1)
    a, b, c, d = grid
    dt = (a * d - b * c) % q
    keep = dt % ell != 0
    a, b, c, d, dt = a[keep], b[keep], c[keep], d[keep], dt[keep]
    for arr in (a, b, c, d, dt):
        arr.setflags(write=False)
    return a, b, c, d, dt


def _vec_valuation(x: np.ndarray, ell: int, cap: int) -> np.ndarray:
    """Elementwise l-adic valuation capped at ``cap`` (0 maps to ``cap``)."""
    v = np.zeros(x.shape, dtype=np.int64)
    x = x.copy()
    for _ in range(cap):
        hit = (x % ell == 0) & (v < cap)
        if not hit.any():
            break
        v[hit] += 1
        x[hit] //= ell
    v[x == 0] = cap
    return np.minimum(v, cap)


@lru_cache(maxsize=16)
def gl2_class_data(ell: int, n: int, bound: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays (s, t, det) over every element of GL_2(Z/l^nZ).

    The smaller exponent s is the minimal entry valuation of M - I; the larger
    one is min(v(det(M - I)) - s, n), computed from integer representatives.
    That minimum does not depend on the lift because changing an entry by a
    multiple of l^n moves the determinant by a multiple of l^(n + s).
    """
    _check_bound(ell, n, bound)
    q = ell**n
    a, b, c, d, dt = _gl2_arrays(ell, n)
    a1, d1 = a - 1, d - 1
    s = np.minimum.reduce([_vec_valuation(x % q, ell, n) for x in (a1, b, c, d1)])
    big = ell ** (2 * n)
    dm = (a1 * d1 - b * c) % big
    vdet = _vec_valuation(dm, ell, 2 * n)
    t = np.minimum(vdet - s, n)
    t[s == n] = n
    return s, t, dt


def enumerate_gl2(ell: int, n: int, bound: int | None = None) -> Iterator[ResidueMatrix]:
    _check_bound(ell, n, bound)
    a, b, c, d, _ = _gl2_arrays(ell, n)
    for entries in zip(a.tolist(), b.tolist(), c.tolist(), d.tolist()):
        yield ResidueMatrix(ell, n, entries)


def class_det_histogram(ell: int, n: int, bound: int | None = None) -> dict[tuple[KernelClass, int], int]:
    """Multiplicity of each (kernel class, determinant) pair in GL_2(Z/l^nZ)."""
    s, t, dt = gl2_class_data(ell, n, bound)
    keys, counts = np.unique(np.stack([s, t, dt]), axis=1, return_counts=True)
    hist = {}
    for (si, ti, di), cnt in zip(keys.T.tolist(), counts.tolist()):
        hist[(KernelClass(si, ti - si, ti == n), di)] = cnt
    return hist


def count_by_class_and_det(ell: int, n: int, predicate: Callable[[KernelClass, int], bool],
                           bound: int | None = None) -> int:
    """Number of invertible matrices mod l^n whose (class, det) satisfies ``predicate``."""
    return sum(cnt for (kc, dt), cnt in class_det_histogram(ell, n, bound).items() if predicate(kc, dt))


def _consistent(kc: KernelClass, n: int, a: int, b: int) -> bool:
    if not kc.saturated:
        return (kc.a, kc.b) == (a, b)
    if kc.a < n:
        return a == kc.a and a + b >= n
    return a >= n


def lift_count(M: ResidueMatrix, a: int, b: int) -> int:
    """How many of the l^4 lifts of M to level n + 1 have stable kernel class (a, b).

    The target must be resolvable at level n + 1, i.e. a + b <= n.
    """
    n = M.level
    if not _consistent(kernel_class(M), n, a, b):
        raise ValueError(f"class ({a}, {b}) is inconsistent with {M}")
    if a + b > n:
        raise ValueError(f"class ({a}, {b}) is not resolved at level {n + 1}")
    count = 0
    for lift in M.lifts():
        kc = kernel_class(lift)
        if not kc.saturated and (kc.a, kc.b) == (a, b):
            count += 1
    return count
