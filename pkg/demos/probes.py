"""The span dimension of {x ^ f(x)} for a few maps.

Vector-valued f with f(0) != 0 never reaches dimension n once n >= 4, but
the shifted projection on R^3 does reach 3. For forms of degree n-2 the
span can have dimension 3 = n - (n-2) + 1.
"""
from curlset.problab import MapSpec, isotropy_probe, vector_probe, stabilized_span_dim, form_probe

res = stabilized_span_dim(MapSpec.shifted_projection(), seed=1)
print("R^3, f(x) = x1 e1 + e2:", res.trajectory, "->", res.final_dim)
for n in (4, 5, 6):
    res = stabilized_span_dim(MapSpec.codim_two(n), seed=n)
    print(f"R^{n}, degree {n - 2} map:", res.trajectory, "->", res.final_dim)

for n in (4, 5):
    out = vector_probe(n, trials=30, seed=42)
    print(f"random affine maps on R^{n}: dims {out['histogram']}, forbidden {n}")
out = form_probe(6, 2, trials=10, seed=1)
print(f"2-form valued maps on R^6: dims {out['histogram']}, forbidden {out['forbidden_dim']}")
print("rank-difference families on R^4:", isotropy_probe(100, seed=3)["histogram"])
