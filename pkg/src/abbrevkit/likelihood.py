"""Binomial two-hypothesis machinery for with-period usage shares.

A word form observed N times, n of them immediately followed by a period,
is modelled as n ~ Binomial(N, p).  Two hypotheses compete: the form is a
common word (p = p0, low with-period share) or an abbreviation (p = p1,
high share).  This module provides the probability mass function, the
likelihood ratio between the hypotheses, the closed-form count threshold
eta solving L(eta) = C, the type I/II error probabilities of the
resulting decision rule, the minimum sample size meeting error targets,
and estimation of p0/p1 from labelled seed word lists.

Everything is evaluated in log space so corpus-scale N does not overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .ingest import WordProfile

__all__ = [
    "HypothesisParams",
    "DecisionRecord",
    "ShareEstimate",
    "MinUsageResult",
    "SearchExhaustedError",
    "EstimationError",
    "VERDICT_ABBREVIATION",
    "VERDICT_COMMON",
    "METHOD_LRT",
    "METHOD_MEDIAN",
    "binomial_pmf",
    "log_binomial_pmf",
    "likelihood_ratio",
    "log_likelihood_ratio",
    "solve_threshold",
    "alpha_error",
    "beta_error",
    "min_usage_for_error",
    "estimate_share_params",
]

VERDICT_ABBREVIATION = "abbreviation"
VERDICT_COMMON = "common-word"
METHOD_LRT = "lrt"
METHOD_MEDIAN = "median-threshold"


class SearchExhaustedError(RuntimeError):
    """No sample size within the configured cap meets the error targets."""


class EstimationError(ValueError):
    """Share estimation is impossible (e.g. no usable seed words)."""


@dataclass(frozen=True)
class HypothesisParams:
    """Operating point of the test: shares under both hypotheses plus the
    likelihood-ratio decision threshold C.

    p0 is the with-period share of a common word, p1 that of an
    abbreviation.  Normal use requires p0 < p1; equality is tolerated at
    construction (it makes the ratio degenerate to 1) but rejected by
    every operation that needs a unique threshold.
    """

    p0: float
    p1: float
    c: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.p0 < 1.0):
            raise ValueError(f"p0 must be in (0,1), got {self.p0}")
        if not (0.0 < self.p1 < 1.0):
            raise ValueError(f"p1 must be in (0,1), got {self.p1}")
        if self.p0 > self.p1:
            raise ValueError(f"p0 must not exceed p1, got p0={self.p0} > p1={self.p1}")
        if not self.c > 0.0:
            raise ValueError(f"decision threshold C must be positive, got {self.c}")


@dataclass(frozen=True)
class DecisionRecord:
    """Outcome of classifying one word form.

    For the likelihood-ratio method all statistics are filled in; for the
    median-share method eta, likelihood, alpha and beta stay None.
    """

    word: str
    n: int
    total: int
    verdict: str
    method: str
    eta: float | None = None
    likelihood: float | None = None
    alpha: float | None = None
    beta: float | None = None

    @property
    def is_abbreviation(self) -> bool:
        return self.verdict == VERDICT_ABBREVIATION


def log_binomial_pmf(total: int, successes: int, p: float) -> float:
    """Natural log of C(total, successes) * p^successes * (1-p)^rest.

    Requires 0 < p < 1; the p = 0/1 edge cases are handled by
    binomial_pmf, where the mass collapses to a single point.
    """
    return (
        math.lgamma(total + 1)
        - math.lgamma(successes + 1)
        - math.lgamma(total - successes + 1)
        + successes * math.log(p)
        + (total - successes) * math.log1p(-p)
    )


def binomial_pmf(total: int, successes: int, p: float) -> float:
    """Probability of exactly `successes` hits in `total` trials at rate p.

    Evaluated via log-gamma so it stays finite for corpus-scale totals.
    Relative accuracy is much better than 1e-10 against exact rational
    arithmetic for totals up to the thousands.
    """
    if total < 0:
        raise ValueError(f"total must be >= 0, got {total}")
    if not 0 <= successes <= total:
        raise ValueError(f"successes must be in [0, {total}], got {successes}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    if p == 0.0:
        return 1.0 if successes == 0 else 0.0
    if p == 1.0:
        return 1.0 if successes == total else 0.0
    return math.exp(log_binomial_pmf(total, successes, p))


def log_likelihood_ratio(n: float, total: int, params: HypothesisParams) -> float:
    """Log of P(n | abbreviation) / P(n | common word).

    The binomial coefficients cancel, leaving
        n * ln(p1(1-p0) / (p0(1-p1))) + total * ln((1-p1)/(1-p0)),
    which is defined for any real n and strictly increasing in n
    whenever p1 > p0.
    """
    p0, p1 = params.p0, params.p1
    slope = math.log(p1) + math.log1p(-p0) - math.log(p0) - math.log1p(-p1)
    offset = math.log1p(-p1) - math.log1p(-p0)
    return n * slope + total * offset


def likelihood_ratio(n: float, total: int, params: HypothesisParams) -> float:
    """Likelihood ratio L(n); overflow saturates to +inf."""
    log_l = log_likelihood_ratio(n, total, params)
    try:
        return math.exp(log_l)
    except OverflowError:
        return math.inf


def solve_threshold(total: int, params: HypothesisParams) -> float:
    """Count threshold eta with L(eta) = C, as a real number.

    Closed form:
        eta = (ln C + total * ln((1-p0)/(1-p1))) / ln(p1(1-p0)/(p0(1-p1)))
    Observing n > eta favours the abbreviation hypothesis.  eta is not
    clamped to [0, total]; extreme C can push it outside the support.
    """
    if total < 0:
        raise ValueError(f"total must be >= 0, got {total}")
    p0, p1 = params.p0, params.p1
    if not p1 > p0:
        raise ValueError(f"threshold needs p1 > p0, got p0={p0}, p1={p1}")
    slope = math.log(p1) + math.log1p(-p0) - math.log(p0) - math.log1p(-p1)
    numer = math.log(params.c) + total * (math.log1p(-p0) - math.log1p(-p1))
    return numer / slope


def alpha_error(eta: float, total: int, p0: float) -> float:
    """Probability of flagging a common word: P(n >= eta | share p0).

    Summed over integer n in [0, total] with n >= eta, i.e. from
    ceil(eta); eta at or below zero covers the whole support.
    """
    if total < 0:
        raise ValueError(f"total must be >= 0, got {total}")
    lo = max(0, math.ceil(eta))
    if lo > total:
        return 0.0
    if lo == 0:
        return 1.0
    return min(1.0, math.fsum(binomial_pmf(total, n, p0) for n in range(lo, total + 1)))


def beta_error(eta: float, total: int, p1: float) -> float:
    """Probability of missing an abbreviation: P(n < eta | share p1).

    Complement of alpha_error over the same split of the support, so
    alpha_error(eta, N, p) + beta_error(eta, N, p) == 1 for any p.
    """
    if total < 0:
        raise ValueError(f"total must be >= 0, got {total}")
    hi = min(total, math.ceil(eta) - 1)
    if hi < 0:
        return 0.0
    if hi >= total:
        return 1.0
    return min(1.0, math.fsum(binomial_pmf(total, n, p1) for n in range(0, hi + 1)))


@dataclass(frozen=True)
class MinUsageResult:
    """Smallest usage count meeting the error targets, with its witness."""

    total: int
    eta: int
    alpha: float
    beta: float


def min_usage_for_error(
    params: HypothesisParams,
    alpha_target: float,
    beta_target: float,
    total_cap: int = 10000,
) -> MinUsageResult:
    """Smallest N admitting an integer threshold eta in [0, N] with
    alpha_error(eta) <= alpha_target and beta_error(eta) <= beta_target.

    Scans N upward; per N it takes the smallest eta meeting the alpha
    target (alpha falls and beta rises with eta, so that eta is the only
    candidate worth checking).  Deterministic; raises
    SearchExhaustedError beyond total_cap.
    """
    if not (0.0 < alpha_target < 1.0 and 0.0 < beta_target < 1.0):
        raise ValueError("error targets must lie strictly between 0 and 1")
    if not params.p1 > params.p0:
        raise ValueError("min usage search needs p1 > p0")
    for total in range(0, total_cap + 1):
        pmf0 = [binomial_pmf(total, n, params.p0) for n in range(total + 1)]
        # suffix sums: tail[eta] = P(n >= eta | p0)
        tail = 0.0
        eta_a = None
        tails = [0.0] * (total + 2)
        for n in range(total, -1, -1):
            tail += pmf0[n]
            tails[n] = tail
        for eta in range(0, total + 1):
            if tails[eta] <= alpha_target:
                eta_a = eta
                break
        if eta_a is None:
            continue
        beta = beta_error(eta_a, total, params.p1)
        if beta <= beta_target:
            return MinUsageResult(
                total=total, eta=eta_a, alpha=tails[eta_a], beta=beta
            )
    raise SearchExhaustedError(
        f"no N <= {total_cap} reaches alpha <= {alpha_target} and beta <= {beta_target}"
    )


@dataclass
class ShareEstimate:
    """Per-year with-period shares pooled over seed lists, plus window means."""

    p1_by_year: dict[int, float] = field(default_factory=dict)
    p0_by_year: dict[int, float] = field(default_factory=dict)
    mean_p1: float | None = None
    mean_p0: float | None = None
    mean_window: tuple[int, int] = (1998, 2008)
    warnings: list[str] = field(default_factory=list)


def _pool_shares(
    profiles: Mapping[str, "WordProfile"],
    seeds: Sequence[str],
    years: Iterable[int],
    pooled: bool,
) -> dict[int, float]:
    shares: dict[int, float] = {}
    for year in years:
        if pooled:
            n_sum = 0
            t_sum = 0
            for word in seeds:
                usage = profiles[word].series.get(year)
                if usage is not None:
                    n_sum += usage.with_period
                    t_sum += usage.total
            if t_sum > 0:
                shares[year] = n_sum / t_sum
        else:
            ratios = []
            for word in seeds:
                usage = profiles[word].series.get(year)
                if usage is not None and usage.total > 0:
                    ratios.append(usage.with_period / usage.total)
            if ratios:
                shares[year] = sum(ratios) / len(ratios)
    return shares


def estimate_share_params(
    profiles: Mapping[str, "WordProfile"],
    seed_abbrevs: Sequence[str],
    seed_commons: Sequence[str],
    window: tuple[int, int] | None = None,
    mean_window: tuple[int, int] = (1998, 2008),
    pooled: bool = True,
) -> ShareEstimate:
    """Estimate p1 (from seed abbreviations) and p0 (from seed common
    words) per year, plus their means over `mean_window`.

    Pooled mode divides summed with-period counts by summed totals within
    each year; the macro alternative averages per-word ratios.  Seed
    words absent from the aggregate are reported in `warnings` and
    skipped; an empty effective list raises EstimationError.
    """
    overlap = set(seed_abbrevs) & set(seed_commons)
    if overlap:
        raise ValueError(f"seed lists must be disjoint, both contain: {sorted(overlap)}")

    est = ShareEstimate(mean_window=mean_window)

    def usable(seeds: Sequence[str], label: str) -> list[str]:
        kept = []
        for word in seeds:
            profile = profiles.get(word)
            if profile is None:
                est.warnings.append(f"{label} seed not in aggregate: {word}")
            elif profile.active_years < 1:
                est.warnings.append(f"{label} seed has no active years: {word}")
            else:
                kept.append(word)
        if not kept:
            raise EstimationError(f"no usable {label} seed words")
        return kept

    abbrevs = usable(seed_abbrevs, "abbreviation")
    commons = usable(seed_commons, "common")

    if window is None:
        window = profiles[abbrevs[0]].window
    years = range(window[0], window[1] + 1)
    est.p1_by_year = _pool_shares(profiles, abbrevs, years, pooled)
    est.p0_by_year = _pool_shares(profiles, commons, years, pooled)

    def window_mean(series: dict[int, float]) -> float | None:
        values = [v for y, v in series.items() if mean_window[0] <= y <= mean_window[1]]
        return sum(values) / len(values) if values else None

    est.mean_p1 = window_mean(est.p1_by_year)
    est.mean_p0 = window_mean(est.p0_by_year)
    return est
