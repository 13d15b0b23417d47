"""Probability-vector arithmetic and Renyi information measures.

All entropies and divergences are in nats. Alpha orders live in [0, +inf];
alpha = 1 is the Shannon limit and alpha = +inf the min-entropy limit, both
handled explicitly rather than by naive evaluation of the generic formula.
"""

from __future__ import annotations

import math

import numpy as np

# Posterior entries are floored at this value (then renormalized) so that
# ratios p^alpha / q^(alpha-1) in the momentum and divergence formulas stay
# finite.
PROB_FLOOR = 1e-12

# |alpha - 1| below this routes to the Shannon limit; alpha above
# MIN_ENTROPY_CUTOFF (or math.inf) routes to the min-entropy limit.
SHANNON_WINDOW = 1e-9
MIN_ENTROPY_CUTOFF = 1e9

_SUM_TOL = 1e-12


class InvalidDistributionError(ValueError):
    """Raised when a vector is not a valid probability distribution."""


class InvalidAlphaError(ValueError):
    """Raised when an entropy order is negative or otherwise unusable."""


class SupportMismatchError(ValueError):
    """Raised when q vanishes on the support of p for an order > 1 divergence."""


def as_distribution(values, *, check: bool = True) -> np.ndarray:
    """Coerce ``values`` to a float64 array, validating simplex membership."""
    p = np.asarray(values, dtype=np.float64)
    if check:
        if p.ndim != 1 or p.size < 2:
            raise InvalidDistributionError(
                f"need a 1-d vector with at least 2 entries, got shape {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise InvalidDistributionError("non-finite entries")
        if np.any(p < 0):
            raise InvalidDistributionError("negative entries")
        total = float(p.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise InvalidDistributionError(f"entries sum to {total!r}, not 1")
    return p


def floor_normalize(values) -> np.ndarray:
    """Floor entries at PROB_FLOOR and renormalize to sum 1."""
    p = np.maximum(np.asarray(values, dtype=np.float64), PROB_FLOOR)
    return p / p.sum()


def is_shannon_order(alpha: float) -> bool:
    return abs(alpha - 1.0) < SHANNON_WINDOW


def is_min_entropy_order(alpha: float) -> bool:
    return math.isinf(alpha) or alpha > MIN_ENTROPY_CUTOFF


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if math.isnan(alpha) or alpha < 0:
        raise InvalidAlphaError(f"alpha must be >= 0, got {alpha!r}")
    return alpha


def renyi_entropy(p, alpha: float) -> float:
    """Order-alpha Renyi entropy of ``p`` in nats.

    Conventions: alpha=0 gives log(support size), alpha=1 the Shannon
    entropy, alpha=inf the min-entropy -log(max p). Zero entries contribute
    nothing for alpha > 0.
    """
    alpha = _check_alpha(alpha)
    p = as_distribution(p)
    pos = p[p > 0]
    if alpha == 0.0:
        return float(np.log(pos.size))
    if is_shannon_order(alpha):
        return float(-np.sum(pos * np.log(pos)))
    if is_min_entropy_order(alpha):
        return float(-np.log(pos.max()))
    # factor out the largest term so p^alpha never under/overflows for large alpha
    pmax = pos.max()
    log_sum = alpha * math.log(pmax) + math.log(float(np.sum((pos / pmax) ** alpha)))
    return float(log_sum / (1.0 - alpha))


def renyi_divergence(p, q, alpha: float) -> float:
    """Order-alpha Renyi divergence D_alpha(p || q) in nats.

    alpha=1 is the Kullback-Leibler limit. For alpha > 1 the support of p
    must be contained in the support of q (guaranteed after flooring).
    """
    alpha = _check_alpha(alpha)
    p = as_distribution(p)
    q = as_distribution(q)
    if p.size != q.size:
        raise InvalidDistributionError("dimension mismatch")
    mask = p > 0
    ps, qs = p[mask], q[mask]
    if np.any(qs == 0) and alpha >= 1.0:
        raise SupportMismatchError("q vanishes on the support of p")
    if alpha == 0.0:
        return float(-np.log(qs.sum()))
    if is_shannon_order(alpha):
        return float(np.sum(ps * np.log(ps / qs)))
    if is_min_entropy_order(alpha):
        return float(np.log(np.max(ps / qs)))
    if alpha > 1.0:
        # write the sum as q (p/q)^alpha and factor out the largest ratio
        ratio = ps / qs
        rmax = ratio.max()
        log_sum = alpha * math.log(rmax) + math.log(float(np.sum(qs * (ratio / rmax) ** alpha)))
        return float(log_sum / (alpha - 1.0))
    return float(np.log(np.sum(ps**alpha * qs ** (1.0 - alpha))) / (alpha - 1.0))


def argmax_state(p) -> int:
    """Index of the maximal entry; ties break toward the lowest index."""
    p = as_distribution(p)
    return int(np.argmax(p))
