"""Simplex geometry of posterior trajectories and decision boundaries.

Single-query Bayes updates move the belief along the line through the
queried vertex; confidence and entropy thresholds carve feasible regions of
the simplex whose boundaries meet at the midpoint of the confidence line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .probability import as_distribution, renyi_entropy
from .objectives import normalize_alpha


@dataclass(frozen=True)
class BoundarySpec:
    tau: float
    n: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("state-space cardinality must be > 1")
        if not 1.0 / self.n <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [1/{self.n}, 1]")
        normalize_alpha(self.alpha)


def vertex(phi: int, n: int) -> np.ndarray:
    """One-hot vertex of the |A|-simplex."""
    v = np.zeros(n)
    v[phi] = 1.0
    return v


def collinearity_residual(p_prev, p_next, phi: int) -> float:
    """Norm of the step component orthogonal to the line toward vertex phi.

    Zero (within roundoff) for every single-query Bayes update: the prior,
    the posterior, and the queried vertex are collinear.
    """
    p_prev = as_distribution(p_prev)
    p_next = as_distribution(p_next)
    step = p_next - p_prev
    if not np.any(step):
        return 0.0
    axis = vertex(phi, p_prev.size) - p_prev
    coeff = float(np.dot(step, axis) / np.dot(axis, axis))
    return float(np.linalg.norm(step - coeff * axis))


def tau_double_prime(b: BoundarySpec) -> float:
    """Entropy level at which the confidence and entropy boundaries meet.

    Closed form -tau log tau - (1-tau) log((1-tau)/(n-1)); equals the
    Shannon entropy of the midpoint of the line p(a) = tau.
    """
    tau, n = b.tau, b.n
    if tau == 1.0:
        return 0.0
    return float(-tau * math.log(tau) - (1.0 - tau) * math.log((1.0 - tau) / (n - 1)))


def midpoint(b: BoundarySpec) -> np.ndarray:
    """Midpoint of the line p(a) = tau: tau at the vertex, uniform elsewhere."""
    p = np.full(b.n, (1.0 - b.tau) / (b.n - 1))
    p[0] = b.tau
    return p


def boundary_points(b: BoundarySpec) -> tuple[np.ndarray, np.ndarray]:
    """The extreme points of the confidence line: (midpoint v, edge point w)."""
    v = midpoint(b)
    w = np.zeros(b.n)
    w[0] = b.tau
    w[1] = 1.0 - b.tau
    return v, w


def entropy_gap(b: BoundarySpec) -> float:
    """H_alpha(v) - H_alpha(w), computed from the constructed points.

    Nonnegative; equals (1-tau) log(n-1) at alpha=1 and vanishes in the
    min-entropy limit where both points share maximal coordinate tau.
    """
    v, w = boundary_points(b)
    return renyi_entropy(v, b.alpha) - renyi_entropy(w, b.alpha)


def find_tilde_tau(b: BoundarySpec) -> float | None:
    """Solve H_alpha(w_n(t)) = H_alpha(v_n(tau)) for t in [1/2, 1).

    H_alpha(w_n(t)) is monotone decreasing on the bracket, so bisection
    finds the unique root when one exists; returns None when the target
    entropy exceeds log 2 (the contour never touches the w edge).
    """
    target = renyi_entropy(midpoint(b), b.alpha)

    def h_w(t: float) -> float:
        w = np.zeros(b.n)
        w[0] = t
        w[1] = 1.0 - t
        return renyi_entropy(w, b.alpha)

    lo, hi = 0.5, 1.0 - 1e-12
    f_lo = h_w(lo) - target
    f_hi = h_w(hi) - target
    if f_lo < 0 or f_hi > 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-10:
            break
        if h_w(mid) - target >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def feasible(p, rule: str, *, tau: float | None = None, alpha: float = 1.0, tau_prime: float | None = None) -> bool:
    """Feasible-set membership under a confidence or entropy threshold.

    rule="posterior-threshold": some coordinate reaches tau.
    rule="entropy-threshold": H_alpha(p) <= tau_prime (boundary inclusive).
    """
    p = as_distribution(p)
    if rule == "posterior-threshold":
        if tau is None:
            raise ValueError("posterior-threshold needs tau")
        return bool(np.max(p) >= tau)
    if rule == "entropy-threshold":
        if tau_prime is None:
            raise ValueError("entropy-threshold needs tau_prime")
        return renyi_entropy(p, alpha) <= tau_prime
    raise ValueError(f"unknown rule {rule!r}")


def barycentric_xy(p) -> tuple[float, float]:
    """Planar coordinates of a 3-state belief for trajectory export."""
    p = as_distribution(p)
    if p.size != 3:
        raise ValueError("barycentric export needs exactly 3 states")
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    xy = p @ corners
    return float(xy[0]), float(xy[1])
