"""Restrict a functor to fibres and Cartesian arrows, then glue it back.

Run with ``python demos/gluing.py``.
"""

import dataclasses
import random

from fibcat.cartesian import make_cleavage
from fibcat.generators import random_fibration, random_functor
from fibcat.glue import glue_functor, restrict, verify_glue_conditions

rng = random.Random(5)
pi = random_fibration(rng, max_arrows=20)
F = None
while F is None:
    F = random_functor(pi.source, pi.source, rng)
print(f"total category: {pi.source.n_objects} objects, {pi.source.n_arrows} arrows")

data = restrict(F, pi)
print("conditions hold:", verify_glue_conditions(data).ok)
for prefer in ("lowest", "highest"):
    G = glue_functor(data, make_cleavage(pi, prefer))
    print(f"glued with the {prefer} cleavage reproduces F:", G.arr_map == F.arr_map)

T = data.target
for h, g in data.cartesian_functor.items():
    others = [x for x in T.hom(*T.arrows[g]) if x != g]
    if others:
        bad = dataclasses.replace(data, cartesian_functor={**data.cartesian_functor, h: others[0]})
        report = verify_glue_conditions(bad)
        print(f"moving the value on {pi.source.arrow_name(h)} to {T.arrow_name(others[0])}:", "ok" if report.ok else report.first.message)
        break
