"""Classify the named instances and print one row per set."""
from curlset.catalog import full_span_set, line_set, shifted_fan_set, three_plane_set, two_line_set
from curlset.setlab import classify

E2, hint = two_line_set(4)
cases = [
    ("three planes, n=4", three_plane_set(4), None),
    ("shifted fan, n=5", shifted_fan_set(5), None),
    ("line set, n=5", line_set(5), None),
    ("full span, n=4", full_span_set(), None),
    ("two lines with cover, n=4", E2, hint),
]

print(f"{'set':28} {'dim':>3} {'wedge0':>6} {'rk<=2':>5} {'line':>14}  verdict")
for name, E, h in cases:
    r = classify(E, h)
    line = "-" if r.common_line is None else "(" + ",".join(str(x) for x in r.common_line) + ")"
    print(f"{name:28} {r.span_dim:>3} {str(r.pairwise_wedge_zero):>6} {str(r.pairwise_rank_diff_le2):>5} {line:>14}  {r.verdict.value}")
    for note in r.notes:
        print("    " + note)
