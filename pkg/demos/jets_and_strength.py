"""Jets on a three-point chain, 1-forms, and a flow prolonged along X x X.

Run with ``python demos/jets_and_strength.py``.
"""

from fibcat.finset import FinFamilyBundle
from fibcat.jets import NeighborhoodRelation, PointedBundle, jet_object, omega1
from fibcat.strength import all_vector_fields, builtin_strengths, power_elements, prolong_field
from fibcat.vect import tangent_from_omega

R = NeighborhoodRelation.chain(3)
X = FinFamilyBundle((2, 2, 2))
J = jet_object(R, X)
print("neighbourhoods:", [R.neighbors(b) for b in range(3)])
print("jet fibres:", J.bundle.fibers, "(a section picks one point over each neighbour)")

E = PointedBundle(X, (0, 0, 0))
print("1-forms pointed at 0:", omega1(R, E).bundle.fibers)
T = tangent_from_omega(R, 2)
print("over F_2: cotangent dims", T.cotangent.dims, "tangent dims", T.tangent.dims)

sq = builtin_strengths()["square"]
D, M = 2, 2
paths = power_elements(M, D)
xi = next(f for f in all_vector_fields(D, M) if f.values != tuple(range(0, M**D, M + 1)))
print("\nvector field on 2 points (m -> path):", {m: paths[xi(m)] for m in range(M)})
pro = prolong_field(sq, D, M, xi)
pairs = power_elements(M * M, D)
for x in range(M * M):
    print(f"  prolonged at {divmod(x, M)}: path {[divmod(p, M) for p in pairs[pro(x)]]}")
