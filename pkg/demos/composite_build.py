"""Two line-solvable halves glued along x1 = 1/2 in R^4.

E spans R^4^e1 + R^4^e2, which no single line covers; the cover (E1, E2)
puts E1 on the left half of the cube and E2 on the right.
"""
import time
from fractions import Fraction

from curlset.builder import construct
from curlset.catalog import two_line_set
from curlset.setlab import classify
from curlset.verifier import verify

E, hint = two_line_set(4)
report = classify(E, hint)
print("verdict:", report.verdict.value, "lines:", [[str(x) for x in b] for b in report.part_lines])

t0 = time.perf_counter()
sol = construct(E, epsilon=Fraction(1, 50), partition_hint=hint)
rep = verify(sol.field, E)
print(f"{len(sol.field.cells)} cells, {rep.verdict}, covered {rep.covered_volume}, {time.perf_counter() - t0:.1f}s")
print("measures:", [str(m) for m in rep.measures])
# the two halves carry multiples of e1 and e2; they need not cancel
print("integral:", [str(x) for x in rep.integral])
