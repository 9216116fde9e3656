"""Empirical densities: reduce a rational point modulo every good prime up to a
bound, find its exact order with baby-step/giant-step in the Hasse interval,
and count how often that order is coprime to m.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from sympy import factorint

Point = tuple[int, int] | None  # None is the point at infinity


# -- sieve ------------------------------------------------------------------

def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_in_range(lo: int, hi: int, segment: int = 1 << 20) -> np.ndarray:
    """Primes p with lo <= p <= hi, by a segmented sieve."""
    lo = max(lo, 2)
    if hi < lo:
        return np.array([], dtype=np.int64)
    base = _small_primes(math.isqrt(hi))
    chunks = []
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        mark = np.ones(stop - start, dtype=bool)
        for p in base.tolist():
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            mark[first - start::p] = False
        chunks.append(np.flatnonzero(mark).astype(np.int64) + start)
        start = stop
    return np.concatenate(chunks) if chunks else np.array([], dtype=np.int64)


def primes_up_to(limit: int) -> np.ndarray:
    return primes_in_range(2, limit)


def smallest_prime_factors(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in _small_primes(math.isqrt(limit)).tolist():
        view = spf[p * p::p]
        view[view == 0] = p
    idx = np.arange(limit + 1)
    free = spf == 0
    spf[free] = idx[free]
    return spf


def _factor(n: int, spf: np.ndarray | None) -> list[int]:
    if spf is None or n >= len(spf):
        return sorted(factorint(n))
    out = []
    while n > 1:
        q = int(spf[n])
        out.append(q)
        while n % q == 0:
            n //= q
    return out


# -- curves over Q ----------------------------------------------------------

@dataclass(frozen=True)
class CurveOverQ:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular curve")

    @classmethod
    def from_list(cls, a: Sequence[int]) -> "CurveOverQ":
        return cls(*(int(x) for x in a))

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return self.a1, self.a2, self.a3, self.a4, self.a6

    @property
    def discriminant(self) -> int:
        a1, a2, a3, a4, a6 = self.coefficients
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def contains(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        a1, a2, a3, a4, a6 = self.coefficients
        return y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6

    def add(self, P, Q):
        """Group law on rational points (coordinates as Fractions)."""
        return _add(self.coefficients, P, Q, lambda u: 1 / Fraction(u), None)

    def mul(self, k: int, P):
        return _mul(self.coefficients, P, k, lambda u: 1 / Fraction(u), None)


@dataclass(frozen=True)
class RationalPoint:
    x: Fraction
    y: Fraction

    @classmethod
    def parse(cls, x, y) -> "RationalPoint":
        return cls(Fraction(x), Fraction(y))

    def as_tuple(self):
        return self.x, self.y


def check_point(curve: CurveOverQ, P: RationalPoint) -> RationalPoint:
    if not curve.contains(P.as_tuple()):
        raise ValueError(f"{P} is not on {curve}")
    return P


def multiple(curve: CurveOverQ, P: RationalPoint, k: int) -> RationalPoint | None:
    Q = curve.mul(k, P.as_tuple())
    return None if Q is None else RationalPoint(*Q)


# -- group law, shared by Q and F_p ----------------------------------------

def _add(a, P, Q, inv, p):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = a
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        s = y1 + y2 + a1 * x2 + a3
        if (s % p if p else s) == 0:
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * inv(2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) * inv(x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    if p:
        return x3 % p, y3 % p
    return x3, y3


def _neg(a, P, p):
    if P is None:
        return None
    x, y = P
    y = -y - a[0] * x - a[2]
    return (x, y % p) if p else (x, y)


def _mul(a, P, k, inv, p):
    if k < 0:
        return _mul(a, _neg(a, P, p), -k, inv, p)
    R = None
    while k:
        if k & 1:
            R = _add(a, R, P, inv, p)
        P = _add(a, P, P, inv, p)
        k >>= 1
    return R


class CurveModP:
    """Reduction of a curve modulo a prime of good reduction."""

    def __init__(self, curve: CurveOverQ, p: int):
        if curve.discriminant % p == 0:
            raise ValueError(f"{p} divides the discriminant")
        self.p = p
        self.a = tuple(c % p for c in curve.coefficients)
        self._inv = lambda u: pow(u, -1, p)

    def contains(self, P: Point) -> bool:
        if P is None:
            return True
        x, y = P
        a1, a2, a3, a4, a6 = self.a
        return (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % self.p == 0

    def add(self, P: Point, Q: Point) -> Point:
        return _add(self.a, P, Q, self._inv, self.p)

    def neg(self, P: Point) -> Point:
        return _neg(self.a, P, self.p)

    def points(self) -> list[Point]:
        """Every point, by brute force (small p only)."""
        p = self.p
        return [None] + [(x, y) for x in range(p) for y in range(p) if self.contains((x, y))]


def scalar_mul(E: CurveModP, P: Point, k: int) -> Point:
    """k * P by double-and-add."""
    return _mul(E.a, P, k, E._inv, E.p)


def naive_order(E: CurveModP, P: Point) -> int:
    n, Q = 1, P
    while Q is not None:
        Q = E.add(Q, P)
        n += 1
    return n


def hasse_interval(p: int) -> tuple[int, int]:
    w = math.isqrt(4 * p)
    return max(1, p + 1 - w), p + 1 + w


def annihilator(E: CurveModP, P: Point) -> int:
    """Some N in the Hasse interval with N * P = O, by baby-step/giant-step."""
    lo, hi = hasse_interval(E.p)
    s = math.isqrt(hi - lo) + 1
    baby = {}
    R = None
    for j in range(s):
        baby.setdefault(R, j)
        R = E.add(R, P)
    step = R  # s * P
    G = scalar_mul(E, P, lo)
    for i in range((hi - lo) // s + 1):
        j = baby.get(E.neg(G))
        if j is not None:
            return lo + i * s + j
        G = E.add(G, step)
    raise ArithmeticError(f"no annihilator of {P} in the Hasse interval for p = {E.p}")


def point_order(E: CurveModP, P: Point, spf: np.ndarray | None = None) -> int:
    """Exact order of P: strip prime factors off an annihilator while it still kills P."""
    if P is None:
        raise ValueError("the identity has no point order to search for")
    N = annihilator(E, P)
    for q in _factor(N, spf):
        while N % q == 0 and scalar_mul(E, P, N // q) is None:
            N //= q
    return N


# -- reduction --------------------------------------------------------------

class Reduction(NamedTuple):
    kind: str  # "affine", "identity" or "skip"
    point: Point = None


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def reduce_point(curve: CurveOverQ, P: RationalPoint, p: int) -> Reduction:
    """Reduce P modulo p on the given (integral) model."""
    if curve.discriminant % p == 0:
        return Reduction("skip")
    vx = _vp(P.x.denominator, p)
    vy = _vp(P.y.denominator, p)
    if vx:
        if vx % 2 or vy * 2 != vx * 3:
            raise ArithmeticError(f"denominators of {P} at {p} do not have the shape (p^2k, p^3k)")
        return Reduction("identity")
    if vy:
        raise ArithmeticError(f"{P} has integral x but non-integral y at {p}")
    x = P.x.numerator * pow(P.x.denominator, -1, p) % p
    y = P.y.numerator * pow(P.y.denominator, -1, p) % p
    return Reduction("affine", (x, y))


# -- density estimates ------------------------------------------------------

def _orders_chunk(args) -> list[tuple[int, int]]:
    coeffs, x, y, lo, hi, spf_limit = args
    curve = CurveOverQ(*coeffs)
    P = RationalPoint(x, y)
    spf = smallest_prime_factors(spf_limit) if spf_limit else None
    disc = curve.discriminant
    out = []
    for p in primes_in_range(lo, hi).tolist():
        if disc % p == 0:
            continue
        red = reduce_point(curve, P, p)
        if red.kind == "identity":
            out.append((p, 1))
        else:
            out.append((p, point_order(CurveModP(curve, p), red.point, spf)))
    return out


def point_orders(curve: CurveOverQ, P: RationalPoint, limit: int, workers: int = 1) -> list[tuple[int, int]]:
    """(p, order of P mod p) for every prime p <= limit of good reduction."""
    check_point(curve, P)
    spf_limit = limit + 2 * math.isqrt(limit) + 3
    pieces = max(1, workers) * 4 if workers > 1 else 1
    bounds = np.linspace(2, limit + 1, pieces + 1).astype(int).tolist()
    tasks = [(curve.coefficients, P.x, P.y, lo, hi - 1, spf_limit) for lo, hi in zip(bounds, bounds[1:])]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_orders_chunk, tasks))
    else:
        chunks = [_orders_chunk(t) for t in tasks]
    return [item for chunk in chunks for item in chunk]


@dataclass
class EmpiricalReport:
    m: int
    limit: int
    good_primes: int
    coprime: int
    label: str = ""
    exact: Fraction | None = None

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.coprime, self.good_primes) if self.good_primes else Fraction(0)

    @property
    def deviation(self) -> float | None:
        return None if self.exact is None else abs(float(self.estimate - self.exact))

    def as_dict(self) -> dict:
        out = {"label": self.label, "m": self.m, "limit": self.limit, "good_primes": self.good_primes,
               "coprime": self.coprime, "estimate": f"{float(self.estimate):.6f}",
               "percent": f"{100 * float(self.estimate):.3f}"}
        if self.exact is not None:
            out["exact"] = {"num": str(self.exact.numerator), "den": str(self.exact.denominator)}
            out["deviation"] = f"{self.deviation:.6f}"
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def table_row(self) -> str:
        exact = "" if self.exact is None else f"{str(self.exact):>24} {100 * float(self.exact):8.3f}%"
        return (f"{self.label:<12} m={self.m:<4} {self.coprime:>7}/{self.good_primes:<7} "
                f"{100 * float(self.estimate):8.3f}%  {exact}")


def report_from_orders(orders: Iterable[tuple[int, int]], m: int, limit: int, k: int = 1,
                       label: str = "", exact: Fraction | None = None) -> EmpiricalReport:
    """Tally orders of k * P, given orders of P at each good prime."""
    good = coprime = 0
    for _, n in orders:
        good += 1
        if math.gcd(n // math.gcd(n, k), m) == 1:
            coprime += 1
    return EmpiricalReport(m, limit, good, coprime, label, exact)


def estimate_density(curve: CurveOverQ, P: RationalPoint, m: int, limit: int, workers: int = 1,
                     label: str = "", exact: Fraction | None = None) -> EmpiricalReport:
    """Fraction of good primes p <= limit at which P mod p has order coprime to m."""
    if limit < 3:
        raise ValueError("limit must be at least 3")
    return report_from_orders(point_orders(curve, P, limit, workers), m, limit, label=label, exact=exact)


def estimate_density_multiples(curve: CurveOverQ, P: RationalPoint, ks: Sequence[int], m: int, limit: int,
                               workers: int = 1) -> dict[int, EmpiricalReport]:
    """Reports for several multiples k * P from one sweep: ord(kP) = ord(P) / gcd(ord(P), k)."""
    orders = point_orders(curve, P, limit, workers)
    return {k: report_from_orders(orders, m, limit, k=k, label=f"{k}P") for k in ks}


# -- config files -----------------------------------------------------------

@dataclass(frozen=True)
class CurveConfig:
    curve: CurveOverQ
    point: RationalPoint
    label: str = ""


def load_curve_config(path: str | Path) -> CurveConfig:
    """Read {"a": [a1, a2, a3, a4, a6], "point": {"x": "num/den", "y": ...}, "label": ...}."""
    data = json.loads(Path(path).read_text())
    curve = CurveOverQ.from_list(data["a"])
    pt = data["point"]
    point = check_point(curve, RationalPoint.parse(str(pt["x"]), str(pt["y"])))
    return CurveConfig(curve, point, data.get("label", ""))


def dump_curve_config(cfg: CurveConfig) -> str:
    return json.dumps({"a": list(cfg.curve.coefficients),
                       "point": {"x": str(cfg.point.x), "y": str(cfg.point.y)},
                       "label": cfg.label})


CURVE_43A1 = CurveConfig(CurveOverQ(0, 1, 1, 0, 0), RationalPoint(Fraction(0), Fraction(0)), "43.a1")
CURVE_153B2 = CurveConfig(CurveOverQ(0, 0, 1, 6, 27), RationalPoint(Fraction(5), Fraction(13)), "153.b2")
