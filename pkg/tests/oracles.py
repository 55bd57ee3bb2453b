"""Independent reference implementations used as test oracles.

These are deliberately naive: exact rational arithmetic, explicit loops and
no shared code with the package.
"""
from __future__ import annotations

from decimal import Decimal, getcontext
from fractions import Fraction

getcontext().prec = 50


def frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def union_length(intervals, lo, hi) -> Fraction:
    """Length of [lo, hi) covered by the union of intervals, by a sorted sweep."""
    clipped = sorted((max(a, lo), min(b, hi)) for a, b in intervals if min(b, hi) > max(a, lo))
    total = Fraction(0)
    cur_a = cur_b = None
    for a, b in clipped:
        if cur_b is None or a > cur_b:
            if cur_b is not None:
                total += cur_b - cur_a
            cur_a, cur_b = a, b
        else:
            cur_b = max(cur_b, b)
    if cur_b is not None:
        total += cur_b - cur_a
    return total


def counts(dets, gts, rho_dtc=Fraction(7, 10), rho_gtc=Fraction(7, 10), duration=None):
    """(tp, fp) of one clip and class; intervals given as (onset, offset) pairs."""
    dets = [(frac(a), frac(b)) for a, b in dets]
    gts = [(frac(a), frac(b)) for a, b in gts]
    if duration is not None:
        d = frac(duration)
        dets = [(max(a, 0), min(b, d)) for a, b in dets]
        dets = [(a, b) for a, b in dets if b > a]
    passed, fp = [], 0
    for a, b in dets:
        inter = sum(max(Fraction(0), min(b, gb) - max(a, ga)) for ga, gb in gts)
        if inter >= rho_dtc * (b - a):
            passed.append((a, b))
        else:
            fp += 1
    tp = sum(union_length(passed, ga, gb) >= rho_gtc * (gb - ga) for ga, gb in gts)
    return tp, fp


def threshold_runs(values, boundaries, lam):
    """Legacy events as (onset, offset) pairs by a frame-by-frame loop."""
    out, start = [], None
    for n, v in enumerate(values):
        if v > lam and start is None:
            start = n
        if not v > lam and start is not None:
            out.append((boundaries[start], boundaries[n]))
            start = None
    if start is not None:
        out.append((boundaries[start], boundaries[len(values)]))
    return out


def _dsqrt(x: Fraction) -> Decimal:
    return (Decimal(x.numerator) / Decimal(x.denominator)).sqrt()


def psds_value(curves, e_max, alpha=1, population=True) -> Decimal:
    """Normalized area under max(0, mean - alpha * std) of staircases.

    ``curves`` maps class to a list of (x, y) steps with the first x at 0;
    values are exact rationals. The result is a 50-digit Decimal.
    """
    e_max = frac(e_max)
    alpha = frac(alpha)
    steps = {k: [(frac(x), frac(y)) for x, y in v] for k, v in curves.items()}
    cuts = sorted({x for v in steps.values() for x, _ in v if x < e_max} | {Fraction(0), e_max})
    n = len(steps)
    area = Decimal(0)
    for left, right in zip(cuts[:-1], cuts[1:]):
        ys = []
        for v in steps.values():
            y = Fraction(0)
            for x, yy in v:
                if x <= left:
                    y = yy
            ys.append(y)
        mean = sum(ys) / n
        ss = sum((y - mean) ** 2 for y in ys)
        if population:
            var = ss / n
        else:
            var = ss / (n - 1) if n > 1 else Fraction(0)
        mu = Decimal(mean.numerator) / Decimal(mean.denominator) - Decimal(alpha.numerator) / Decimal(alpha.denominator) * _dsqrt(var)
        if mu > 0:
            width = right - left
            area += Decimal(width.numerator) / Decimal(width.denominator) * mu
    return area / (Decimal(e_max.numerator) / Decimal(e_max.denominator))


def collar_tp(dets, gts, onset_collar=0.2, floor=0.2, frac_=0.2):
    """Greedy collar matching written out with index bookkeeping."""
    dets = sorted(dets)
    gts = sorted(gts)
    used = set()
    tp = 0
    for ga, gb in gts:
        off_collar = max(floor, frac_ * (gb - ga))
        for i, (da, db) in enumerate(dets):
            if i in used:
                continue
            if abs(da - ga) <= onset_collar + 1e-9 and abs(db - gb) <= off_collar + 1e-9:
                used.add(i)
                tp += 1
                break
    return tp
