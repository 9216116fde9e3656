"""
Density for y^2 + y = x^3 + x^2 and m = 86
==========================================

The curve 43.a1 is a Serre curve with discriminant -43, so psi and the
Legendre character at 43 are tied together and the density is not a plain
product over 2 and 43.
"""
from fractions import Fraction

from kummerdens.density import SerreDensityInput, dens_ell_maximal, dens_product, dens_serre_composite

for k, e2 in ((1, 0), (2, 1), (4, 2)):
    res = dens_serre_composite(SerreDensityInput(86, Fraction(-43), {2: e2, 43: 0}))
    naive = dens_product([dens_ell_maximal(2, e2), dens_ell_maximal(43)])
    print(f"{k}P: {res}   (independent primes would give {float(naive):.5%})")

print(dens_serre_composite(SerreDensityInput(86, Fraction(-43))).to_json())
