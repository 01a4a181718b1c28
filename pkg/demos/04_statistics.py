"""
Comparing success rates honestly
================================

Two strategy/model cells rarely score identically; the question is whether
the gap is signal.  This library answers with the pooled two-proportion
z-test (with continuity correction), reports the effect size as an
arcsine-transformed h, and attaches the power the design had to see that
effect.  pass@k estimates the chance that at least one of k samples
succeeds, computed with the unbiased product form.
"""

import numpy as np

from interoplab import (
    TSV_HEADER,
    compare_counts,
    format_p_value,
    pass_at_k,
    power_two_prop,
    two_prop_test,
)

# ---------------------------------------------------------------------------
# pass@k.  With 596 successes out of 666 attempts, pass@1 is the raw rate;
# pass@k rises toward 1 as k grows because only 70 attempts failed.
# ---------------------------------------------------------------------------

n, c = 666, 596
for k in (1, 2, 3, 5, 10):
    print(f"pass@{k:<2} at {c}/{n}: {pass_at_k(n, c, k):.5f}")

# ---------------------------------------------------------------------------
# Two cells with a visible gap: 620/666 vs 597/666.  The corrected z-test
# calls it significant at alpha=0.05, and h puts a size on it.
# ---------------------------------------------------------------------------

result = compare_counts("cell-a vs cell-b", 620, 666, 597, 666)
print()
print(TSV_HEADER)
print(result.tsv_row())

# ---------------------------------------------------------------------------
# A grid of pairwise comparisons, formatted the way the command line prints
# them.  Counts near the ceiling are statistically indistinguishable; a
# floor-level cell is different beyond the reporting floor of 2.2e-16.
# ---------------------------------------------------------------------------

cells = {"m1": 664, "m2": 663, "m3": 666, "m4": 0}
names = list(cells)
print("\npairwise p-values (666 attempts each):")
for i, a in enumerate(names):
    for b in names[i + 1:]:
        _, p = two_prop_test(cells[a], 666, cells[b], 666)
        print(f"  {a} vs {b}: {format_p_value(p)}")

# ---------------------------------------------------------------------------
# Power: how large a gap this design could even see.  Tiny effects slip
# through at n=666; by h ~ 0.25 the test is nearly certain to flag them.
# ---------------------------------------------------------------------------

print("\npower at n=666 per group:")
for h in np.arange(0.05, 0.45, 0.05):
    bar = "#" * int(40 * power_two_prop(h, 666))
    print(f"  h={h:.2f}  {power_two_prop(h, 666):.3f} {bar}")
