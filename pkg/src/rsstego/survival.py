"""Probability that enough embedded bits survive an attack.

With n embedded bits of which k carry the message, decoding needs at least
ceil((n + k) / 2) bits to survive.  If each bit is corrupted independently
with probability p, the survivor count is Binomial(n, 1 - p) and

    P(success) = sum_{i >= tau} C(n, i) (1-p)^i p^(n-i)

which for p = 1/2 reduces to sum_{i >= tau} C(n, i) / 2^n.  The number of
ways to place n bits among the carrier's 3MN sample positions, C(3MN, n), is
reported separately as a log2 count; multiplying it into the probability
would push the result far above 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidQuery, ShapeMismatch
from .lsb import PixelImage

EXACT_LIMIT = 10_000


@dataclass(frozen=True)
class SurvivalQuery:
    n: int
    k: int
    capacity: int
    flip_prob: float = 0.5

    def __post_init__(self):
        if not (0 <= self.k <= self.n <= self.capacity):
            raise InvalidQuery(
                f"need 0 <= k <= n <= capacity, got k={self.k}, n={self.n}, capacity={self.capacity}"
            )
        if not (0.0 <= self.flip_prob <= 1.0):
            raise InvalidQuery(f"flip probability must lie in [0, 1], got {self.flip_prob}")

    @property
    def threshold(self) -> int:
        return -(-(self.n + self.k) // 2)


def _log_factorials(n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    if n:
        out[1:] = np.cumsum(np.log(np.arange(1, n + 1, dtype=np.float64)))
    return out


def _exact_tail(n: int, tau: int, q: float) -> float:
    """P(X >= tau) for X ~ Binomial(n, q), summed in log space."""
    if tau <= 0:
        return 1.0
    if tau > n:
        return 0.0
    if q == 0.0:
        return 0.0
    if q == 1.0:
        return 1.0
    lf = _log_factorials(n)
    i = np.arange(tau, n + 1)
    log_terms = lf[n] - lf[i] - lf[n - i] + i * math.log(q) + (n - i) * math.log1p(-q)
    top = log_terms.max()
    return float(min(1.0, math.exp(top) * np.exp(log_terms - top).sum()))


def _half_tail(n: int, tau: int) -> float:
    """P(X >= tau) for X ~ Binomial(n, 1/2), as a correctly rounded integer ratio."""
    if tau <= 0:
        return 1.0
    if tau > n:
        return 0.0
    c = math.comb(n, tau)
    total = 0
    for i in range(tau, n + 1):
        total += c
        c = c * (n - i) // (i + 1)
    return total / (1 << n)


def _normal_tail(n: int, tau: int, q: float) -> float:
    if tau <= 0:
        return 1.0
    if tau > n:
        return 0.0
    mean = n * q
    sd = math.sqrt(n * q * (1.0 - q))
    if sd == 0.0:
        return 1.0 if mean >= tau else 0.0
    z = (tau - 0.5 - mean) / sd
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def survival_probability(query: SurvivalQuery, method: str = "auto") -> float:
    """P(at least ``threshold`` of the n bits survive).

    ``method`` is ``"exact"``, ``"normal"`` (continuity-corrected), or
    ``"auto"`` (exact up to n = 10_000).  At p = 1/2 the exact method sums
    integer binomial coefficients, so k = n gives exactly 2^-n.
    """
    if method == "auto":
        method = "exact" if query.n <= EXACT_LIMIT else "normal"
    survive = 1.0 - query.flip_prob
    if method == "exact" and survive == 0.5:
        p = _half_tail(query.n, query.threshold)
    elif method == "exact":
        p = _exact_tail(query.n, query.threshold, survive)
    elif method == "normal":
        p = _normal_tail(query.n, query.threshold, survive)
    else:
        raise InvalidQuery(f"unknown method {method!r}")
    return min(1.0, max(0.0, p))


def log2_carrier_multiplicity(query: SurvivalQuery) -> float:
    """log2 C(capacity, n), the position-count factor left out of the probability."""
    c, n = query.capacity, query.n
    return (math.lgamma(c + 1) - math.lgamma(n + 1) - math.lgamma(c - n + 1)) / math.log(2)


def corruption_budget(n: int, k: int) -> int:
    if not 0 <= k <= n:
        raise InvalidQuery(f"need 0 <= k <= n, got k={k}, n={n}")
    return (n - k) // 2


def budget_feasible(flip_prob: float, n: int, k: int) -> bool:
    """Whether the expected corruption p*n stays within the budget."""
    if not 0.0 <= flip_prob <= 1.0:
        raise InvalidQuery(f"flip probability must lie in [0, 1], got {flip_prob}")
    return flip_prob * n <= corruption_budget(n, k)


@dataclass(frozen=True)
class ParityCheck:
    survivor_count: int
    threshold: int
    necessary_condition_met: bool


def parity_consistency_check(cover: PixelImage, attacked: PixelImage, n: int, k: int) -> ParityCheck:
    """Count the first n embedded positions whose LSB survived the attack."""
    if cover.shape != attacked.shape:
        raise ShapeMismatch(f"cannot compare images of shape {cover.shape} and {attacked.shape}")
    query = SurvivalQuery(n, k, cover.flat().size)
    same = ((cover.flat()[:n] ^ attacked.flat()[:n]) & 1) == 0
    survivors = int(np.count_nonzero(same))
    return ParityCheck(survivors, query.threshold, survivors >= query.threshold)
