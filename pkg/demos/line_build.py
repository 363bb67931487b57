"""Build a solution for {+-e1^ej} in R^5, audit it, and save the mesh.

Run: python demos/line_build.py [epsilon] [out.json]
"""
import json
import sys
import time
from fractions import Fraction

from curlset.builder import build_line_solution
from curlset.catalog import line_set
from curlset.verifier import verify

eps = Fraction(sys.argv[1]) if len(sys.argv) > 1 else Fraction(1, 20)
out = sys.argv[2] if len(sys.argv) > 2 else None

E = line_set(5)
t0 = time.perf_counter()
sol = build_line_solution(E, epsilon=eps)
t1 = time.perf_counter()
rep = verify(sol.field, E, require_nonzero_integral=True)
t2 = time.perf_counter()

print(f"{len(sol.placements)} placements, {len(sol.field.cells)} cells, built in {t1 - t0:.2f}s")
print("notes:", *sol.field.notes)
print(f"verdict {rep.verdict} in {t2 - t1:.2f}s, covered volume {rep.covered_volume}")
for e, m in zip(E, rep.measures):
    print(f"  {e!r:>14}  measure {m}")
print("integral of eta:", [str(x) for x in rep.integral])

if out:
    with open(out, "w") as fh:
        json.dump(sol.field.to_json(), fh)
    print("mesh written to", out)
