"""
Haar measure of the kernel classes
==================================

mu(M_l(a, b)) in closed form, checked against counting at a finite level.
"""
from fractions import Fraction

from kummerdens.classmeasure import ClassMeasureTable, brute_force_measure, eps, measure_class, measure_class_char

for a in range(3):
    print([str(measure_class(2, a, b)) for b in range(4)])

# the same numbers by counting mod 8 (classes with a + b < 3 are decided there)
for a, b in ((0, 0), (0, 1), (1, 1)):
    counted = brute_force_measure(2, 3, lambda kc, d: not kc.saturated and (kc.a, kc.b) == (a, b))
    print((a, b), counted, counted == measure_class(2, a, b))

# at 43 the eps = -1 part of the (0, b) classes
print([measure_class_char(43, 0, b, eps(-1)) == Fraction(1, 2 * 43**b) for b in range(1, 5)])

print(ClassMeasureTable.build(3, 1, constraints=(None, eps(1), eps(-1))).to_json()[:300], "...")
