"""
Counting primes
===============

Reduce the point modulo every prime up to a bound, find its order by
baby-step/giant-step, and compare the share of orders prime to m with the
exact density.
"""
import sys
import time

from kummerdens.empirical import CURVE_43A1, CURVE_153B2, point_orders, report_from_orders
from kummerdens.verify import density_input, load_golden
from kummerdens.density import dens_serre_composite

limit = int(sys.argv[1]) if len(sys.argv) > 1 else 10**5
golden = load_golden()["density"]

for cfg in (CURVE_153B2, CURVE_43A1):
    t0 = time.perf_counter()
    orders = point_orders(cfg.curve, cfg.point, limit)
    print(f"{cfg.label}: {len(orders)} good primes below {limit} in {time.perf_counter() - t0:.1f}s")
    for g in golden:
        if g["curve"] != cfg.label:
            continue
        exact = dens_serre_composite(density_input(g)).density
        rep = report_from_orders(orders, g["m"], limit, k=g["k"], label=f"{g['k']}P", exact=exact)
        print("  " + rep.table_row())
