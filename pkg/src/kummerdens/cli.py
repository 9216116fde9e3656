"""Command-line entry point: ``kummerdens <subcommand> ...``.

Exit codes: 0 on success, 1 when a requested check fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from sympy import multiplicity

from . import arboreal, classmeasure, density, empirical, verify


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _override(text: str) -> tuple[int, Fraction]:
    ell, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected ELL=FRACTION, got {text!r}")
    return int(ell), _fraction(value)


def _curve(text: str) -> empirical.CurveConfig:
    if text in verify.CURVES:
        return verify.CURVES[text]
    return empirical.load_curve_config(text)


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if args.format == "json" else text)


def cmd_measure(args) -> int:
    chosen = [c for c in (args.eps, args.psi, args.fixes, args.psi_eps) if c is not None]
    if len(chosen) > 1:
        raise UsageError("give at most one of --eps, --psi, --fixes, --psi-eps")
    whole = classmeasure.measure_class(args.ell, args.a, args.b)
    if not chosen:
        _emit(args, {"ell": args.ell, "a": args.a, "b": args.b, "num": str(whole.numerator),
                     "den": str(whole.denominator)}, str(whole))
        return 0
    if args.eps is not None:
        c = classmeasure.eps(args.eps)
    elif args.psi is not None:
        c = classmeasure.psi_sign(args.psi)
    elif args.fixes is not None:
        c = classmeasure.fixes(args.fixes, args.sign)
    else:
        c = classmeasure.psi_eps(args.psi_eps, args.sign)
    try:
        part = classmeasure.measure_class_char(args.ell, args.a, args.b, c)
        ratio = classmeasure.class_fraction(args.ell, args.a, args.b, c)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, {"ell": args.ell, "a": args.a, "b": args.b, "constraint": c.label(),
                 "ratio": str(ratio), "num": str(part.numerator), "den": str(part.denominator)},
          f"{part}  ({ratio} of class, {c.label()})")
    return 0


def _density_input(args) -> density.SerreDensityInput:
    disc = None
    if args.curve is not None:
        disc = Fraction(_curve(args.curve).curve.discriminant)
    primes = density.prime_factors(args.m)
    exps = {ell: multiplicity(ell, args.mult) for ell in primes}
    overrides = dict(args.override or [])
    return density.SerreDensityInput(args.m, disc, exps, overrides)


def cmd_density(args) -> int:
    try:
        res = density.dens_serre_composite(_density_input(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lines = [str(res)]
    for ell, sign, v in res.contributions:
        tag = "" if sign is None else f" sign {sign:+d}"
        lines.append(f"  l={ell}{tag}: {v}")
    if res.entangled:
        lines.append("  (entangled: combined over psi*eps_z = eps_u)")
    _emit(args, res.as_dict(), "\n".join(lines))
    return 0


def cmd_empirical(args) -> int:
    if args.curve is None:
        raise UsageError("--curve is required")
    cfg = _curve(args.curve)
    if args.limit < 3:
        raise UsageError("--limit must be at least 3")
    orders = empirical.point_orders(cfg.curve, cfg.point, args.limit, args.workers)
    rep = empirical.report_from_orders(orders, args.m, args.limit, k=args.mult,
                                       label=f"{cfg.label} {args.mult}P")
    _emit(args, rep.as_dict(), rep.table_row())
    return 0


def cmd_arboreal(args) -> int:
    kummer = arboreal.KummerAssumptions(dict(args.kummer or []))
    if args.group:
        with open(args.group) as fh:
            G = arboreal.ArborealLevelGroup.from_json(fh.read())
    else:
        G = arboreal.build_full_arboreal(args.m, args.n, kummer=kummer)
    value = arboreal.finite_level_density(G)
    payload = {"m": G.m, "level": G.level, "order": len(G), "C_m": str(arboreal.kummer_constant(G)),
               "density": {"num": str(value.numerator), "den": str(value.denominator),
                           "decimal": density.to_decimal(value)}}
    _emit(args, payload, f"m={G.m} n={G.level} #G={len(G)} C_m={payload['C_m']} density={value}"
                         f" = {density.to_decimal(value)}")
    return 0


def cmd_verify_paper(args) -> int:
    checks = verify.verify_paper(args.golden, args.skip_empirical, args.limit, args.workers)
    if args.format == "json":
        print(json.dumps([{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks], indent=2))
    else:
        for c in checks:
            print(c.line())
        print(f"{sum(c.ok for c in checks)}/{len(checks)} checks passed")
    return 0 if all(c.ok for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kummerdens", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--workers", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[common], help="Haar measure of a kernel class")
    m.add_argument("--ell", type=int, required=True)
    m.add_argument("--a", type=int, required=True)
    m.add_argument("--b", type=int, required=True)
    m.add_argument("--eps", type=int, choices=(1, -1))
    m.add_argument("--psi", type=int, choices=(1, -1))
    m.add_argument("--fixes", type=int, choices=(-1, 2, -2), help="restrict to matrices fixing sqrt(z)")
    m.add_argument("--psi-eps", type=int, choices=(1, -1, 2, -2), metavar="Z")
    m.add_argument("--sign", type=int, choices=(1, -1), default=1)
    m.set_defaults(func=cmd_measure)

    for name, func, hlp in (("density", cmd_density, "exact density"),
                            ("empirical", cmd_empirical, "prime-sieve estimate")):
        d = sub.add_parser(name, parents=[common], help=hlp)
        d.add_argument("--curve", help="curve/point JSON file or a built-in label (43.a1, 153.b2)")
        d.add_argument("--m", type=int, required=True)
        d.add_argument("--mult", type=int, default=1, help="use the point mult * P")
        d.add_argument("--override", type=_override, action="append", metavar="ELL=FRACTION")
        d.add_argument("--limit", type=int, default=10**6)
        d.set_defaults(func=func)

    a = sub.add_parser("arboreal", parents=[common], help="finite-level density of an arboreal group")
    a.add_argument("--m", type=int, default=2)
    a.add_argument("--n", type=int, default=1)
    a.add_argument("--kummer", type=_override_int, action="append", metavar="ELL=K",
                   help="translations over the identity form l^K (Z/l^n)^2")
    a.add_argument("--group", help="group JSON file (elements or generators)")
    a.set_defaults(func=cmd_arboreal)

    v = sub.add_parser("verify-paper", parents=[common], help="check every reference value")
    v.add_argument("--skip-empirical", action="store_true")
    v.add_argument("--limit", type=int, default=10**6)
    v.add_argument("--golden", help="alternative reference-value file")
    v.set_defaults(func=cmd_verify_paper)
    return p


def _override_int(text: str) -> tuple[int, int]:
    ell, value = _override(text)
    if value.denominator != 1:
        raise argparse.ArgumentTypeError("Kummer exponent must be an integer")
    return ell, int(value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"kummerdens: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
