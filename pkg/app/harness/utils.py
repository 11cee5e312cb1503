import math
from typing import Iterable, Optional, Sequence

import numpy as np

from app.harness.schemas import Aggregate, Check, Verdict


def aggregate(n: int, column: str, values: Sequence[float]) -> Aggregate:
    """
    Mean, sample standard deviation and standard error of one column at one size.
    SE = sd / sqrt(count); a single value has sd 0.
    """
    data = np.asarray(values, dtype=np.float64)
    count = int(data.size)
    mean = float(data.mean()) if count else math.nan
    sd = float(data.std(ddof=1)) if count > 1 else 0.0
    return Aggregate(n=n, column=column, count=count, mean=mean, sd=sd, se=sd / math.sqrt(count) if count else math.nan)


def _verdict(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL


def upper_bound_check(name: str, agg: Aggregate, bound: float, k: float) -> Check:
    """Pass when mean <= bound + k * SE."""
    return Check(
        name=name, rule=f"mean <= bound + {k:g} SE", n=agg.n, statistic=agg.column,
        mean=agg.mean, se=agg.se, bound=bound, verdict=_verdict(agg.mean <= bound + k * agg.se),
    )


def lower_bound_check(name: str, agg: Aggregate, bound: float, strict: bool = True) -> Check:
    ok = agg.mean > bound if strict else agg.mean >= bound
    return Check(
        name=name, rule="mean > bound" if strict else "mean >= bound", n=agg.n,
        statistic=agg.column, mean=agg.mean, se=agg.se, bound=bound, verdict=_verdict(ok),
    )


def exact_check(name: str, agg: Aggregate, exact: float, k: float) -> Check:
    """Pass when |mean - exact| <= k * SE."""
    return Check(
        name=name, rule=f"|mean - exact| <= {k:g} SE", n=agg.n, statistic=agg.column,
        mean=agg.mean, se=agg.se, bound=exact, verdict=_verdict(abs(agg.mean - exact) <= k * agg.se),
    )


def zero_check(name: str, column: str, count: float, n: Optional[int] = None) -> Check:
    return Check(
        name=name, rule="zero occurrences", n=n, statistic=column, value=float(count),
        verdict=_verdict(count == 0),
    )


def report_only(name: str, agg: Optional[Aggregate] = None, bound: Optional[float] = None, **extra) -> Check:
    fields = dict(n=agg.n, statistic=agg.column, mean=agg.mean, se=agg.se) if agg else {}
    fields.update(extra)
    return Check(name=name, rule="descriptive", bound=bound, verdict=Verdict.REPORT_ONLY, **fields)


def trend_check(name: str, points: Sequence[Aggregate], rule: str, floor: float = 0.05) -> Check:
    """
    Across a sweep ordered by n:
    - "decreasing": mean at every size strictly below the mean at the previous size
    - "floor": mean at every size at least `floor`
    Fewer than two sizes gives report-only for "decreasing".
    """
    points = sorted(points, key=lambda agg: agg.n)
    means = [agg.mean for agg in points]
    statistic = points[0].column if points else None
    if rule == "decreasing":
        if len(points) < 2:
            return Check(name=name, rule=rule, statistic=statistic, verdict=Verdict.REPORT_ONLY)
        ok = all(b < a for a, b in zip(means, means[1:]))
        return Check(name=name, rule=rule, statistic=statistic, value=means[-1] - means[0], verdict=_verdict(ok))
    if rule == "floor":
        if not points:
            return Check(name=name, rule=rule, verdict=Verdict.REPORT_ONLY)
        return Check(
            name=name, rule=f"mean >= {floor:g} at every size", statistic=statistic,
            value=min(means), bound=floor, verdict=_verdict(min(means) >= floor),
        )
    raise ValueError(f"unknown trend rule '{rule}'")


def overall(checks: Iterable[Check]) -> Verdict:
    verdicts = {check.verdict for check in checks}
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.PASS in verdicts:
        return Verdict.PASS
    return Verdict.REPORT_ONLY


def log_frequency_slope(sizes: Sequence[int]) -> Optional[float]:
    """Least-squares slope of ln(frequency) against block size; None with fewer than two sizes."""
    values, counts = np.unique(np.asarray(sizes, dtype=np.int64), return_counts=True)
    if values.size < 2:
        return None
    slope, _ = np.polyfit(values.astype(np.float64), np.log(counts / counts.sum()), 1)
    return float(slope)
