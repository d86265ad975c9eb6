"""Decides (lambda, eps)-quasigeodesicity of words against sound distance
oracles, with exact rational arithmetic in every verdict."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .metric import BudgetExceeded, MetricCache
from .words import Word

CERTIFIED = "certified"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

#: Marker returned by min_lambda when some nontrivial subword is a loop.
INFINITE = math.inf


@dataclass(frozen=True)
class Violation:
    """A concrete witness subword with its exact distance."""

    start: int
    end: int
    subword_length: int
    distance_bound: int


@dataclass
class QGReport:
    """Outcome of a quasigeodesicity check.

    ``oracle_used`` maps each inspected subword span to the oracle that
    settled it; summaries aggregate it for serialization.
    """

    verdict: str
    lam: Fraction
    eps: Fraction
    violation: Optional[Violation] = None
    min_lambda: Optional[Fraction] = None
    oracle_used: dict[tuple[int, int], str] = field(default_factory=dict)

    def oracle_summary(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for name in self.oracle_used.values():
            counts[name] = counts.get(name, 0) + 1
        return counts

    def to_lines(self) -> list[str]:
        lines = [
            f"verdict={self.verdict}",
            f"lambda={self.lam}",
            f"eps={self.eps}",
        ]
        if self.violation is not None:
            v = self.violation
            lines += [
                f"violation_start={v.start}",
                f"violation_end={v.end}",
                f"violation_length={v.subword_length}",
                f"violation_distance={v.distance_bound}",
            ]
        if self.min_lambda is not None:
            lines.append(f"min_lambda={self.min_lambda}")
        summary = ",".join(f"{k}:{v}" for k, v in sorted(self.oracle_summary().items()))
        if summary:
            lines.append(f"oracles={summary}")
        return lines


def _spans(n: int):
    """Deterministic scan order: start ascending, end descending.

    The first violation in this order is the longest one at the earliest
    start, so a word that is itself a loop is cited in full.
    """
    for start in range(n):
        for end in range(n, start, -1):
            yield start, end


def _prefix_elements(word: Word, model) -> list:
    prefixes = [model.identity()]
    g = prefixes[0]
    for i in word.letters:
        g = model.apply_letter(g, i)
        prefixes.append(g)
    return prefixes


def check(
    word: Word,
    lam: Fraction | int,
    eps: Fraction | int = 0,
    *,
    model,
    cache: Optional[MetricCache] = None,
    radius_cap: Optional[int] = None,
) -> QGReport:
    """Verify |u| <= lam * d(u) + eps for every contiguous subword u.

    Certified verdicts rest on sound lower bounds for d; Violated verdicts
    cite a subword whose exact distance is known.  Budget exhaustion yields
    Inconclusive, never a wrong verdict.
    """
    lam = Fraction(lam)
    eps = Fraction(eps)
    if lam < 1 or eps < 0:
        raise ValueError("need lambda >= 1 and eps >= 0")
    cache = cache or MetricCache(model)
    identity = model.identity()
    prefixes = _prefix_elements(word, model)
    inverse = model.inverse
    multiply = model.multiply

    report = QGReport(CERTIFIED, lam, eps)
    saw_inconclusive = False
    n = len(word)
    for start in range(n):
        for end in range(n, start, -1):
            length = end - start
            if length <= eps:
                break  # every shorter span at this start holds trivially
            g = multiply(inverse(prefixes[start]), prefixes[end])
            span = (start, end)
            if g == identity:
                report.oracle_used[span] = "identity"
                report.verdict = VIOLATED
                report.violation = Violation(start, end, length, 0)
                return report
            lower = cache.lower_bound(g)
            if length <= lam * lower + eps:
                report.oracle_used[span] = "lower-bound"
                continue
            d = cache.exact_distance(g, radius_cap=radius_cap)
            if d is None:
                floor = max(Fraction(cache.search_floor(g)), lower)
                if length <= lam * floor + eps:
                    report.oracle_used[span] = "search-floor"
                    continue
                report.oracle_used[span] = "inconclusive"
                saw_inconclusive = True
                continue
            report.oracle_used[span] = "exact"
            if length > lam * d + eps:
                report.verdict = VIOLATED
                report.violation = Violation(start, end, length, d)
                return report
    if saw_inconclusive:
        report.verdict = INCONCLUSIVE
    return report


def min_lambda(
    word: Word,
    eps: Fraction | int = 0,
    *,
    model,
    cache: Optional[MetricCache] = None,
    radius_cap: Optional[int] = None,
    allow_lower_bounds: bool = False,
) -> Fraction | float:
    """Least lambda (>= 1) such that the word is (lambda, eps)-quasigeodesic.

    Exact when every subword distance is exactly computable; with
    ``allow_lower_bounds`` unreachable distances fall back to sound lower
    bounds, making the result a certified upper estimate of the true
    constant.  Returns INFINITE when some subword longer than eps is a loop.
    """
    eps = Fraction(eps)
    cache = cache or MetricCache(model)
    identity = model.identity()
    prefixes = _prefix_elements(word, model)
    inverse = model.inverse
    multiply = model.multiply

    best = Fraction(1)
    for start, end in _spans(len(word)):
        length = end - start
        if length <= eps:
            continue
        g = multiply(inverse(prefixes[start]), prefixes[end])
        if g == identity:
            return INFINITE
        excess = Fraction(length) - eps
        lower = cache.lower_bound(g)
        if lower > 0 and excess / lower <= best:
            continue  # cannot raise the maximum, skip the exact search
        d = cache.exact_distance(g, radius_cap=radius_cap)
        if d is not None:
            ratio = excess / d
        elif allow_lower_bounds:
            floor = max(Fraction(cache.search_floor(g)), lower)
            if floor <= 0:
                raise BudgetExceeded(
                    f"no positive bound for subword [{start}:{end}]"
                )
            ratio = excess / floor
        else:
            raise BudgetExceeded(
                f"exact distance for subword [{start}:{end}] out of reach"
            )
        if ratio > best:
            best = ratio
    return best
