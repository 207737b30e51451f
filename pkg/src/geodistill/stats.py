"""Paired-sample significance testing.

The two-sided tail probability of Student's t comes from the regularized
incomplete beta function:

    p(t, df) = I_x(df/2, 1/2),   x = df / (df + t^2)

evaluated with the modified-Lentz continued fraction. The leading factor
x^a (1-x)^b / B(a,b) is assembled in log space so extreme |t| values produce
tiny-but-correct probabilities instead of intermediate under/overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import mean, stdev

from geodistill.errors import GeodistillError

_CF_EPS = 1e-16          # continued-fraction convergence; well under the 1e-10 target
_CF_MAX_ITER = 500
_CF_TINY = 1e-300


class ZeroVariance(GeodistillError):
    """All paired differences identical: t is undefined."""


class TooFewSamples(GeodistillError):
    pass


@dataclass(frozen=True)
class PairedSample:
    """Per-item differences d_i = tuned_i - base_i, matched by item id."""

    differences: tuple[float, ...]

    def __post_init__(self):
        if len(self.differences) < 2:
            raise TooFewSamples(f"need >= 2 paired differences, got {len(self.differences)}")


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz evaluation of the continued fraction for I_x(a, b)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + coeff / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + coeff / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return h  # converged to float precision in practice long before this


def log_regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """ln I_x(a, b) for 0 < x < 1, via whichever tail converges fast."""
    log_front = (
        a * math.log(x)
        + b * math.log1p(-x)
        - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return log_front + math.log(_beta_continued_fraction(a, b, x) / a)
    other = math.exp(log_front) * _beta_continued_fraction(b, a, 1.0 - x) / b
    return math.log1p(-other) if other < 1.0 else -math.inf


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x == 0.5 and a == b:
        return 0.5  # exact by symmetry of the beta density
    return math.exp(log_regularized_incomplete_beta(a, b, x))


def student_t_two_sided_p(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def student_t_two_sided_log10_p(t: float, df: int) -> float:
    """log10 of the two-sided p-value; stays finite where p itself would
    underflow, so reports can always render scientific notation."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if t == 0.0:
        return 0.0
    x = df / (df + t * t)
    if x >= 1.0:
        return 0.0
    if x == 0.5 and df == 1:
        return math.log10(0.5)
    return log_regularized_incomplete_beta(df / 2.0, 0.5, x) / math.log(10.0)


def paired_t_test(sample: PairedSample) -> tuple[float, int, float]:
    """(t, df, p) for mean(d) != 0: t = mean(d) / (sd(d)/sqrt(n)), sd unbiased,
    df = n - 1, p two-sided."""
    d = sample.differences
    n = len(d)
    sd = stdev(d)
    if sd == 0.0:
        raise ZeroVariance("all paired differences are identical")
    t = mean(d) / (sd / math.sqrt(n))
    df = n - 1
    return t, df, student_t_two_sided_p(t, df)


def format_p_value(p: float, log10_p: float | None = None) -> str:
    """Scientific-notation rendering that survives p-values below float range."""
    if log10_p is None:
        log10_p = math.log10(p) if p > 0 else -math.inf
    if not math.isfinite(log10_p):
        return "0"
    if log10_p > -4:
        return f"{p:.4g}" if p > 0 else f"{10 ** log10_p:.4g}"
    exponent = math.floor(log10_p)
    mantissa = 10 ** (log10_p - exponent)
    return f"{mantissa:.4f}e{exponent:+d}"
