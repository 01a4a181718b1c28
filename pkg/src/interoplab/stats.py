"""Pass@k, corrected two-proportion tests, effect size, and power."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

# Below this the two-sided p-value is reported as "< 2.2e-16".
P_VALUE_FLOOR = 2.2e-16


def pass_at_k(n: int, c: int, k: int) -> float:
    """Chance that at least one of k drawn attempts passes, given c of n do.

    Uses the numerically stable product form of 1 - C(n-c, k)/C(n, k); for
    k = 1 this is exactly c/n.
    """
    if n <= 0 or not 0 <= c <= n or not 1 <= k <= n:
        raise ValueError(f"invalid pass@k arguments: n={n} c={c} k={k}")
    if k == 1:
        return c / n
    if n - c < k:
        return 1.0
    return float(1.0 - np.prod(1.0 - k / np.arange(n - c + 1, n + 1)))


def _check_counts(successes: int, trials: int) -> None:
    if trials <= 0 or not 0 <= successes <= trials:
        raise ValueError(f"invalid counts: {successes}/{trials}")


def two_prop_test(
    c1: int, n1: int, c2: int, n2: int, corrected: bool = True
) -> tuple[float, float]:
    """Pooled two-proportion z-test, two-sided, with optional continuity correction.

    The correction shrinks |p1 - p2| by (1/n1 + 1/n2)/2, floored at zero.  A
    degenerate pooled proportion (0 or 1) yields z = 0, p = 1.
    """
    _check_counts(c1, n1)
    _check_counts(c2, n2)
    p1, p2 = c1 / n1, c2 / n2
    pooled = (c1 + c2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return 0.0, 1.0
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    numerator = abs(p1 - p2)
    if corrected:
        numerator = max(0.0, numerator - (1.0 / n1 + 1.0 / n2) / 2.0)
    z = math.copysign(numerator / se, p1 - p2) if numerator > 0.0 else 0.0
    p_value = 2.0 * float(norm.sf(abs(z)))
    return z, min(p_value, 1.0)


def cohens_h(p1: float, p2: float) -> float:
    """Arcsine-transformed effect size between two proportions."""
    for p in (p1, p2):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"proportion out of range: {p}")
    return 2.0 * math.asin(math.sqrt(p1)) - 2.0 * math.asin(math.sqrt(p2))


def power_two_prop(h: float, n: float, alpha: float = 0.05) -> float:
    """Power of the two-sided two-proportion test at effect |h| and per-group n."""
    if n <= 0:
        raise ValueError("n must be positive")
    z_crit = float(norm.ppf(1.0 - alpha / 2.0))
    shift = abs(h) * math.sqrt(n / 2.0)
    return float(norm.cdf(shift - z_crit) + norm.cdf(-shift - z_crit))


def format_p_value(p: float) -> str:
    if p < P_VALUE_FLOOR:
        return "< 2.2e-16"
    return f"{p:.4g}"


@dataclass(slots=True)
class ComparisonResult:
    """One two-proportion comparison with its effect size and achieved power."""

    label: str
    c1: int
    n1: int
    c2: int
    n2: int
    z: float
    p_value: float
    h: float
    power: float
    alpha: float
    corrected: bool

    @property
    def reject_h0(self) -> bool:
        return self.p_value < self.alpha

    def tsv_row(self) -> str:
        return "\t".join(
            (
                self.label,
                f"{self.z:.4f}",
                format_p_value(self.p_value),
                f"{self.h:.4f}",
                f"{self.power:.4f}",
                "true" if self.reject_h0 else "false",
            )
        )


TSV_HEADER = "comparison\tz\tp_value\th\tpower\treject_H0"


def compare_counts(
    label: str,
    c1: int,
    n1: int,
    c2: int,
    n2: int,
    alpha: float = 0.05,
    corrected: bool = True,
) -> ComparisonResult:
    z, p_value = two_prop_test(c1, n1, c2, n2, corrected=corrected)
    h = cohens_h(c1 / n1, c2 / n2)
    # harmonic-mean group size; equals n for the usual equal-n design
    n_power = 2.0 / (1.0 / n1 + 1.0 / n2)
    power = power_two_prop(h, n_power, alpha)
    return ComparisonResult(
        label=label,
        c1=c1,
        n1=n1,
        c2=c2,
        n2=n2,
        z=z,
        p_value=p_value,
        h=h,
        power=power,
        alpha=alpha,
        corrected=corrected,
    )


def compare_cells(summary_a, summary_b, alpha: float = 0.05, corrected: bool = True) -> ComparisonResult:
    """Compare two cells on their pooled success counts across runs.

    Accepts any objects exposing total_successes, total_attempts, and a label()
    (the harness CellSummary does).
    """
    return compare_counts(
        f"{summary_a.label()} vs {summary_b.label()}",
        summary_a.total_successes,
        summary_a.total_attempts,
        summary_b.total_successes,
        summary_b.total_attempts,
        alpha=alpha,
        corrected=corrected,
    )


def compare_runs(summary, run_a: int, run_b: int, alpha: float = 0.05, corrected: bool = True) -> ComparisonResult:
    """Compare two runs inside one cell on their per-run counts."""
    ca, na = summary.run_counts[run_a]
    cb, nb = summary.run_counts[run_b]
    return compare_counts(
        f"{summary.label()}@run{run_a} vs @run{run_b}",
        ca,
        na,
        cb,
        nb,
        alpha=alpha,
        corrected=corrected,
    )
