"""
Kernel classes of M - I in GL_2(Z/8)
====================================

Every invertible matrix mod 8 is sorted by the group of vectors it fixes
and by its determinant.  The resulting table is the raw data behind the
2-adic measures.
"""
from kummerdens.modmat import ResidueMatrix, class_det_histogram, gl2_order, kernel_class

M = ResidueMatrix.from_rows([[3, 0], [0, 3]], ell=2, level=3)
print(M, kernel_class(M))  # M - I = 2I, fixed vectors (Z/2)^2

hist = class_det_histogram(2, 3)
print(f"{'s':>2} {'t':>2}  det=1  det=3  det=5  det=7")
rows = sorted({kc.divisors for kc, _ in hist})
for s, t in rows:
    counts = [sum(c for (kc, d), c in hist.items() if kc.divisors == (s, t) and d == dd) for dd in (1, 3, 5, 7)]
    print(f"{s:>2} {t:>2}  " + "  ".join(f"{c:5d}" for c in counts))

# t = 3 rows are saturated: the class is not decided mod 8
print("total", sum(hist.values()), "=", gl2_order(2, 3))
