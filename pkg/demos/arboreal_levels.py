"""
Finite levels of the arboreal representation
============================================

Pairs (t, M) act on the 2^n-division points of a point.  The share of pairs
with t in the image of M - I can only drop as n grows, and the closed-form
density 11/21 sits below all of them.
"""
from kummerdens.arboreal import KummerAssumptions, build_full_arboreal, finite_level_density, kummer_constant, w_level
from kummerdens.density import dens_ell_maximal

for n in (1, 2, 3):
    G = build_full_arboreal(2, n)
    v = finite_level_density(G)
    print(f"n={n}: #G={len(G):6d}  density={v} = {float(v):.5f}")
print("limit", dens_ell_maximal(2), "=", float(dens_ell_maximal(2)))

# a Kummer tower that fails by a factor 3^2 at level 2
G = build_full_arboreal(3, 2, kummer=KummerAssumptions({3: 1}))
print("C_3 =", kummer_constant(G), " w values:", sorted({w_level(G, M) for M in G.matrices}))
print("density", finite_level_density(G))
