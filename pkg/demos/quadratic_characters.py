"""
Quadratic characters through the determinant
=============================================

A quadratic field Q(sqrt d) is seen by GL_2 only through det mod m_d.
"""
from kummerdens.characters import QuadraticFieldData, epsilon_residue, jacobi

for d in (-43, -(3**9) * 17, -1, 2, -2, 6):
    q = QuadraticFieldData.from_discriminant(d)
    print(f"d={d}: square-free {q.d_sf}, conductor {q.m_d}, z={q.z}, u={q.u}")

# which determinants mod 8 fix sqrt(-1), sqrt(2), sqrt(-2)
for z in (-1, 2, -2):
    fixed = [a for a in (1, 3, 5, 7) if epsilon_residue(z, 8, a) == 1]
    print(f"sqrt({z}) fixed by det in {fixed}")

print("(2/15) =", jacobi(2, 15))
