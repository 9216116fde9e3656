"""Check the library against a file of reference values."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from sympy import multiplicity

from .classmeasure import Constraint, fix_ratio, measure_class, mod_ell_char_count
from .density import SerreDensityInput, dens_ell_char, dens_ell_maximal, dens_serre_composite, prime_factors
from .empirical import CURVE_43A1, CURVE_153B2, point_orders, report_from_orders
from .modmat import class_det_histogram

CURVES = {"43.a1": CURVE_43A1, "153.b2": CURVE_153B2}

# percentage points allowed against the quoted values (limit 10^6), and
# against the exact fraction for smaller limits
QUOTED_TOLERANCE_PP = 0.03
FAST_TOLERANCE_PP = 1.0


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name} {self.detail}".rstrip()


def load_golden(path: str | Path | None = None) -> dict:
    if path is None:
        return json.loads(resources.files("kummerdens").joinpath("golden.json").read_text())
    return json.loads(Path(path).read_text())


def _cmp(name: str, got, want) -> Check:
    return Check(name, got == want, f"got {got}, expected {want}")


def density_input(entry: dict) -> SerreDensityInput:
    cfg = CURVES[entry["curve"]]
    m, k = entry["m"], entry["k"]
    exps = {ell: multiplicity(ell, k) for ell in prime_factors(m)}
    overrides = {int(ell): Fraction(v) for ell, v in entry.get("overrides", {}).items()}
    return SerreDensityInput(m, Fraction(cfg.curve.discriminant), exps, overrides)


def exact_checks(golden: dict) -> list[Check]:
    out = []
    for g in golden.get("measure", []):
        out.append(_cmp(f"measure l={g['ell']} ({g['a']},{g['b']})",
                        measure_class(g["ell"], g["a"], g["b"]), Fraction(g["value"])))
    if golden.get("h_list"):
        hist = class_det_histogram(2, 3)
        counts = {(kc.a, kc.a + kc.b, d): c for (kc, d), c in hist.items()}
        for g in golden["h_list"]:
            out.append(_cmp(f"h(s={g['s']},t={g['t']},d={g['d']})",
                            counts.get((g["s"], g["t"], g["d"]), 0), g["count"]))
    for g in golden.get("fix_ratio", []):
        out.append(_cmp(f"fix ratio ({g['a']},{g['b']}) z={g['z']}",
                        fix_ratio(g["a"], g["b"], g["z"]), Fraction(g["value"])))
    for g in golden.get("mod_ell_measure", []):
        out.append(_cmp(f"mod-l measure l={g['ell']} eps={g['sign']} eig1={g['eigenvalue_one']}",
                        mod_ell_char_count(g["ell"], g["sign"], g["eigenvalue_one"]), Fraction(g["value"])))
    for g in golden.get("dens_ell", []):
        out.append(_cmp(f"Dens_{g['ell']} e={g['e']}", dens_ell_maximal(g["ell"], g["e"]), Fraction(g["value"])))
    for g in golden.get("dens_char", []):
        c = Constraint(g["kind"], g["sign"])
        out.append(_cmp(f"Dens_{g['ell']} e={g['e']} {c.label()}",
                        dens_ell_char(g["ell"], g["e"], c), Fraction(g["value"])))
    for g in golden.get("density", []):
        got = dens_serre_composite(density_input(g)).density
        out.append(_cmp(f"Dens_{g['m']}({g['k']}P) on {g['curve']}", got, Fraction(g["value"])))
    return out


def empirical_checks(golden: dict, limit: int = 10**6, workers: int = 1) -> list[Check]:
    out = []
    orders = {}
    for g in golden.get("density", []):
        if g["curve"] not in orders:
            cfg = CURVES[g["curve"]]
            orders[g["curve"]] = point_orders(cfg.curve, cfg.point, limit, workers)
        rep = report_from_orders(orders[g["curve"]], g["m"], limit, k=g["k"])
        pct = 100 * float(rep.estimate)
        if limit >= 10**6:
            target, tol = g["percent"], QUOTED_TOLERANCE_PP
        else:
            target, tol = 100 * float(Fraction(g["value"])), FAST_TOLERANCE_PP
        out.append(Check(f"empirical {g['k']}P on {g['curve']} m={g['m']} limit={limit}",
                         abs(pct - target) <= tol, f"got {pct:.3f}%, target {target:.3f}% +/- {tol}"))
    return out


def verify_paper(golden_path=None, skip_empirical: bool = False, limit: int = 10**6, workers: int = 1) -> list[Check]:
    golden = load_golden(golden_path)
    checks = exact_checks(golden)
    if not skip_empirical:
        checks += empirical_checks(golden, limit, workers)
    return checks
