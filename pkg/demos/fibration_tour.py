"""A walk through the small fibration over the walking arrow.

Run with ``python demos/fibration_tour.py``.
"""

from fibcat import fixtures as fx
from fibcat.cartesian import is_cartesian, is_fibration, make_cleavage, vh_factorize
from fibcat.dual import build_dual, classify_dual_arrow, double_dual_iso

pi = fx.fixture_fibration()
E, W = pi.source, pi.target

print("Arrows of E and whether they are Cartesian over W2:")
for f in range(E.n_arrows):
    v = is_cartesian(pi, f)
    note = "" if v else f"  (fails at {v.witness})"
    print(f"  {E.arrow_name(f):>6} over {W.arrow_name(pi.arr_map[f]):<5} {bool(v)}{note}")

print("\nfibration:", bool(is_fibration(pi)))
c = make_cleavage(pi)
print("every arrow splits as vertical then chosen lift:")
for f in range(E.n_arrows):
    p = vh_factorize(pi, c, f)
    print(f"  {E.arrow_name(f)} = {E.arrow_name(p.vertical)} . {E.arrow_name(p.horizontal)}")

dual = build_dual(pi)
D = dual.category
print(f"\nThe dual total category has {D.n_objects} objects and {D.n_arrows} arrows:")
for g in range(D.n_arrows):
    print(f"  {D.arrow_name(g)}: {D.object_name(D.dom(g))} -> {D.object_name(D.cod(g))}  [{classify_dual_arrow(dual, g)}]")

dd = double_dual_iso(pi)
print("\nE -> E** is an isomorphism over W2:", dd.ok)
for a, b in dd.arrow_table():
    print(f"  {a} |-> {b}")
