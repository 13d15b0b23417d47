"""Query-selection scores and stopping rules.

The unified objective scores a candidate query as the negated expected
posterior Renyi entropy plus a momentum bonus computed from the realized
posterior trajectory; the stopping rule relaxes a Renyi-entropy threshold by
the averaged divergence between consecutive posteriors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .inference import EvidenceModel, History, trial_likelihoods
from .probability import (
    InvalidAlphaError,
    is_min_entropy_order,
    is_shannon_order,
    renyi_divergence,
    renyi_entropy,
)

POLICY_KINDS = (
    "unified-renyi",
    "mmi-shannon",
    "renyi-entropy-only",
    "posterior-max",
    "random",
    "epsilon-random",
)
MOMENTUM_VARIANTS = ("realized-trajectory", "counterfactual-reupdate")


def normalize_alpha(alpha: float) -> float:
    """Map an order onto its canonical value (exact 1.0 / inf for the limits)."""
    alpha = float(alpha)
    if math.isnan(alpha) or alpha < 0:
        raise InvalidAlphaError(f"alpha must be >= 0, got {alpha!r}")
    if is_shannon_order(alpha):
        return 1.0
    if is_min_entropy_order(alpha):
        return math.inf
    return alpha


@dataclass(frozen=True)
class QuadratureSpec:
    """Deterministic trapezoid rule on the scalar evidence axis."""

    points: int = 513
    tail_sigmas: float = 8.0

    def __post_init__(self):
        if self.points < 33:
            raise ValueError("quadrature needs at least 33 points")

    def grid(self, E: EvidenceModel) -> tuple[np.ndarray, np.ndarray]:
        """Evidence grid and trapezoid weights covering both densities."""
        sd = max(E.target_std, E.nontarget_std)
        lo = min(E.target_mean, E.nontarget_mean) - self.tail_sigmas * sd
        hi = max(E.target_mean, E.nontarget_mean) + self.tail_sigmas * sd
        x = np.linspace(lo, hi, self.points)
        w = np.full(self.points, x[1] - x[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return x, w


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class PolicyConfig:
    kind: str = "unified-renyi"
    alpha2: float = 1.0
    lambda2_init: float = 0.0
    lambda2_min: float = 0.0
    anneal_rate: float = 1.0
    momentum_variant: str = "realized-trajectory"
    epsilon_mix: float = 0.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.momentum_variant not in MOMENTUM_VARIANTS:
            raise ValueError(f"unknown momentum variant {self.momentum_variant!r}")
        normalize_alpha(self.alpha2)
        if self.lambda2_init < 0 or self.lambda2_min < 0:
            raise ValueError("lambda2 values must be >= 0")
        if self.lambda2_min > self.lambda2_init:
            raise ValueError("lambda2_min must not exceed lambda2_init")
        if not 0 < self.anneal_rate <= 1:
            raise ValueError("anneal_rate must lie in (0, 1]")
        if not 0 <= self.epsilon_mix <= 1:
            raise ValueError("epsilon_mix must lie in [0, 1]")


@dataclass(frozen=True)
class StoppingConfig:
    alpha1: float = math.inf
    lambda1: float = 0.0
    tau_prime: float = 0.1

    def __post_init__(self):
        normalize_alpha(self.alpha1)
        if self.lambda1 < 0:
            raise ValueError("lambda1 must be >= 0")
        if not math.isfinite(self.tau_prime):
            raise ValueError("tau_prime must be finite")


def conditional_entropy_scores(
    p: np.ndarray,
    candidates,
    L: np.ndarray,
    E: EvidenceModel,
    alpha2: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Expected posterior Renyi entropy for each candidate query."""
    alpha2 = normalize_alpha(alpha2)
    x, w = quad.grid(E)
    ft = E.target_pdf(x)
    fnt = E.nontarget_pdf(x)
    like_w = np.ascontiguousarray(L[:, list(candidates)].T, dtype=np.float64)
    p = np.ascontiguousarray(p, dtype=np.float64)
    return np.asarray(kernels.conditional_entropy_scores(p, like_w, ft, fnt, w, alpha2))


def conditional_renyi_entropy(
    p,
    phi: int,
    L: np.ndarray,
    E: EvidenceModel,
    alpha2: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Expected Renyi entropy of the single-trial posterior for query ``phi``."""
    p = np.asarray(p, dtype=np.float64)
    return float(conditional_entropy_scores(p, [phi], L, E, alpha2, quad)[0])


def shannon_conditional_entropy(
    p,
    phi: int,
    L: np.ndarray,
    E: EvidenceModel,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Expected Shannon posterior entropy for query ``phi``.

    Deliberately a separate code path from the Renyi kernel: it backs the
    MMI baseline and serves as an independent oracle for the alpha2=1
    reduction identity.
    """
    p = np.asarray(p, dtype=np.float64)
    x, w = quad.grid(E)
    lw = L[:, phi]
    like = lw[None, :] * E.target_pdf(x)[:, None] + (1.0 - lw[None, :]) * E.nontarget_pdf(x)[:, None]
    joint = p[None, :] * like  # (m, n)
    marg = joint.sum(axis=1)
    post = joint / marg[:, None]
    h = -np.sum(np.where(post > 0, post * np.log(np.where(post > 0, post, 1.0)), 0.0), axis=1)
    wm = w * marg
    return float(np.sum(wm * h) / np.sum(wm))


def _momentum_term(p_next: np.ndarray, p_prev: np.ndarray, weights: np.ndarray, alpha: float) -> float:
    """One summand (1/(alpha-1)) log sum_s w_s p_next^alpha / p_prev^(alpha-1).

    ``weights`` is the label-probability column for the candidate query
    (all ones for the stopping-side divergence). Returns -inf when no state
    carries weight. The alpha=1 limit is taken as the weight-restricted
    KL-style sum (exact KL when the weights are all ones).
    """
    mask = (weights > 0) & (p_next > 0)
    if not np.any(mask):
        return -math.inf
    pn, pp, ws = p_next[mask], p_prev[mask], weights[mask]
    if alpha == 1.0:
        return float(np.sum(ws * pn * np.log(pn / pp)))
    if math.isinf(alpha):
        return float(np.log(np.max(pn / pp)))
    if alpha == 0.0:
        return float(-np.log(np.sum(ws * pp)))
    return float(np.log(np.sum(ws * pn**alpha * pp ** (1.0 - alpha))) / (alpha - 1.0))


def q_momentum(
    phi: int,
    h: History,
    L: np.ndarray,
    alpha: float,
    variant: str = "realized-trajectory",
    E: EvidenceModel | None = None,
) -> float:
    """Average query momentum for candidate ``phi`` over the history.

    realized-trajectory uses the stored posterior at each step;
    counterfactual-reupdate instead re-updates each step's belief with the
    candidate query and the realized first-trial evidence of the next
    sequence. Returns 0 for an empty history.
    """
    if variant not in MOMENTUM_VARIANTS:
        raise ValueError(f"unknown momentum variant {variant!r}")
    if h.s == 0:
        return 0.0
    alpha = normalize_alpha(alpha)
    weights = L[:, phi]
    traj = h.posteriors()
    total = 0.0
    for n in range(h.s):
        p_prev = traj[n]
        if variant == "realized-trajectory":
            p_next = traj[n + 1]
        else:
            if E is None:
                raise ValueError("counterfactual momentum needs the evidence model")
            like = trial_likelihoods(float(h.records[n].evidence[0]), phi, L, E)
            p_next = p_prev * like
            p_next = p_next / p_next.sum()
        total += _momentum_term(p_next, p_prev, weights, alpha)
    return total / h.s


def q_momentum_all(
    h: History,
    L: np.ndarray,
    alpha: float,
    variant: str = "realized-trajectory",
    E: EvidenceModel | None = None,
) -> np.ndarray:
    """Vectorized q_momentum over every query; needs E for the counterfactual variant."""
    n = L.shape[0]
    if h.s == 0:
        return np.zeros(n)
    alpha = normalize_alpha(alpha)
    traj = h.posteriors()
    out = np.zeros(n)
    for step in range(h.s):
        p_prev = traj[step]
        if variant == "realized-trajectory":
            terms = _momentum_terms_all(traj[step + 1], p_prev, L, alpha)
        else:
            if E is None:
                raise ValueError("counterfactual momentum needs the evidence model")
            eps = float(h.records[step].evidence[0])
            terms = np.empty(n)
            for phi in range(n):
                like = trial_likelihoods(eps, phi, L, E)
                p_next = p_prev * like
                p_next = p_next / p_next.sum()
                terms[phi] = _momentum_term(p_next, p_prev, L[:, phi], alpha)
        out = out + terms
    return out / h.s


def _momentum_terms_all(p_next: np.ndarray, p_prev: np.ndarray, L: np.ndarray, alpha: float) -> np.ndarray:
    """Momentum summand for every query at one trajectory step."""
    if alpha == 1.0:
        inner = p_next * np.log(np.where(p_next > 0, p_next / p_prev, 1.0))
        return inner @ L
    if math.isinf(alpha):
        ratio = np.where(p_next > 0, p_next / p_prev, 0.0)
        out = np.empty(L.shape[1])
        for phi in range(L.shape[1]):
            sup = ratio[(L[:, phi] > 0) & (p_next > 0)]
            out[phi] = np.log(sup.max()) if sup.size else -math.inf
        return out
    if alpha == 0.0:
        sums = np.where(p_next > 0, p_prev, 0.0) @ L
        with np.errstate(divide="ignore"):
            return np.where(sums > 0, -np.log(np.where(sums > 0, sums, 1.0)), -math.inf)
    body = np.where(p_next > 0, p_next**alpha * p_prev ** (1.0 - alpha), 0.0)
    sums = body @ L
    with np.errstate(divide="ignore"):
        logs = np.where(sums > 0, np.log(np.where(sums > 0, sums, 1.0)), -math.inf)
    return logs / (alpha - 1.0)


def i_momentum(h: History, alpha: float) -> float:
    """Average Renyi divergence between consecutive posteriors; 0 for empty history."""
    if h.s == 0:
        return 0.0
    alpha = normalize_alpha(alpha)
    traj = h.posteriors()
    return sum(renyi_divergence(traj[n + 1], traj[n], alpha) for n in range(h.s)) / h.s


def unified_query_score(
    phi: int,
    h: History,
    L: np.ndarray,
    E: EvidenceModel,
    cfg: PolicyConfig,
    lambda2_now: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """-H_alpha2(query) + lambda2 * momentum(query)."""
    score = -conditional_renyi_entropy(h.current(), phi, L, E, cfg.alpha2, quad)
    if lambda2_now != 0.0:
        score += lambda2_now * q_momentum(phi, h, L, cfg.alpha2, cfg.momentum_variant, E)
    return score


def _scores_for_policy(
    h: History,
    L: np.ndarray,
    E: EvidenceModel,
    cfg: PolicyConfig,
    lambda2_now: float,
    quad: QuadratureSpec,
) -> np.ndarray:
    n = L.shape[0]
    p = h.current()
    if cfg.kind == "mmi-shannon":
        return np.array([-shannon_conditional_entropy(p, phi, L, E, quad) for phi in range(n)])
    scores = -conditional_entropy_scores(p, range(n), L, E, cfg.alpha2, quad)
    if cfg.kind == "unified-renyi" and lambda2_now != 0.0 and h.s > 0:
        scores = scores + lambda2_now * q_momentum_all(h, L, cfg.alpha2, cfg.momentum_variant, E)
    return scores


def _top_k(scores: np.ndarray, k: int) -> list[int]:
    """k best indices, ordering by (score desc, index asc); -inf sorts last."""
    order = sorted(range(scores.size), key=lambda i: (-scores[i], i))
    return order[:k]


def greedy_batch_select(
    h: History,
    L: np.ndarray,
    E: EvidenceModel,
    cfg: PolicyConfig,
    n_queries: int,
    rng: np.random.Generator,
    lambda2_now: float = 0.0,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[int, ...]:
    """Select ``n_queries`` distinct queries under the configured policy.

    Score-based policies condition every pick on the current history, so the
    greedy argmax-and-remove loop reduces to taking the top-N scores (ties
    toward the lowest index).
    """
    n = L.shape[0]
    if not 1 <= n_queries <= n:
        raise ValueError("batch size must lie in [1, |Q|]")
    p = h.current()
    if cfg.kind == "random":
        return tuple(int(i) for i in rng.choice(n, size=n_queries, replace=False))
    if cfg.kind == "posterior-max":
        return tuple(_top_k(p, n_queries))
    if cfg.kind == "epsilon-random":
        pool = list(range(n))
        picks: list[int] = []
        for _ in range(n_queries):
            if rng.random() < cfg.epsilon_mix:
                choice = pool[int(rng.integers(len(pool)))]
            else:
                choice = max(pool, key=lambda i: (p[i], -i))
            picks.append(choice)
            pool.remove(choice)
        return tuple(picks)
    scores = _scores_for_policy(h, L, E, cfg, lambda2_now, quad)
    return tuple(_top_k(scores, n_queries))


def stopping_value(h: History, scfg: StoppingConfig) -> float:
    """H_alpha1(posterior) - lambda1 * average divergence; stop when < tau_prime."""
    value = renyi_entropy(h.current(), scfg.alpha1)
    if scfg.lambda1 != 0.0:
        value -= scfg.lambda1 * i_momentum(h, scfg.alpha1)
    return value


def should_stop(h: History, scfg: StoppingConfig) -> bool:
    """At least one sequence must run before the rule can fire."""
    if h.s == 0:
        return False
    return stopping_value(h, scfg) < scfg.tau_prime


def anneal_lambda(lambda2_init: float, anneal_rate: float, lambda2_min: float, s: int) -> float:
    """Geometric decay of the exploration weight, clamped at the floor."""
    return max(lambda2_min, lambda2_init * anneal_rate**s)
