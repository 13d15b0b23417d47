"""Recursive Bayesian state estimator.

States and queries share one index set (Q = A). Binary relevance labels
connect queries to states through a likelihood matrix L[sigma][phi] =
p(label=1 | sigma, phi); evidence is a scalar drawn from one of two
class-conditional Gaussian densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .probability import as_distribution, floor_normalize

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class EvidenceModel:
    """Scalar class-conditional evidence densities for the two labels."""

    target_mean: float = 0.0
    target_std: float = 1.0
    nontarget_mean: float = 3.0
    nontarget_std: float = 1.5

    def __post_init__(self):
        if self.target_std <= 0 or self.nontarget_std <= 0:
            raise ValueError("standard deviations must be positive")

    def target_pdf(self, x):
        z = (np.asarray(x, dtype=np.float64) - self.target_mean) / self.target_std
        return np.exp(-0.5 * z * z) / (self.target_std * _SQRT_2PI)

    def nontarget_pdf(self, x):
        z = (np.asarray(x, dtype=np.float64) - self.nontarget_mean) / self.nontarget_std
        return np.exp(-0.5 * z * z) / (self.nontarget_std * _SQRT_2PI)


def one_hot_likelihood(n: int) -> np.ndarray:
    """L[sigma][phi] = 1(sigma == phi)."""
    if n < 2:
        raise ValueError("need at least 2 states")
    return np.eye(n, dtype=np.float64)


def validate_likelihood(L) -> np.ndarray:
    L = np.asarray(L, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] < 2:
        raise ValueError(f"likelihood matrix must be square with n >= 2, got {L.shape}")
    if np.any(L < 0) or np.any(L > 1):
        raise ValueError("likelihood entries must lie in [0, 1]")
    return L


@dataclass
class SequenceRecord:
    """One completed sequence: its query batch, evidence, and resulting posterior."""

    batch: tuple[int, ...]
    evidence: np.ndarray
    posterior_after: np.ndarray


@dataclass
class History:
    """Prior plus the per-sequence records accumulated so far."""

    prior: np.ndarray
    records: list[SequenceRecord] = field(default_factory=list)

    def __post_init__(self):
        self.prior = as_distribution(self.prior)

    @property
    def s(self) -> int:
        return len(self.records)

    def current(self) -> np.ndarray:
        return self.records[-1].posterior_after if self.records else self.prior

    def posteriors(self) -> list[np.ndarray]:
        """Trajectory [prior, posterior_1, ..., posterior_s]."""
        return [self.prior] + [r.posterior_after for r in self.records]


def trial_likelihoods(epsilon: float, phi: int, L: np.ndarray, E: EvidenceModel) -> np.ndarray:
    """p(epsilon | sigma, phi) for every sigma, marginalized over the label."""
    w = L[:, phi]
    return w * E.target_pdf(epsilon) + (1.0 - w) * E.nontarget_pdf(epsilon)


def evidence_likelihood(epsilon: float, sigma: int, phi: int, L: np.ndarray, E: EvidenceModel) -> float:
    """p(epsilon | sigma, phi) = L[sigma][phi] f_t(eps) + (1 - L[sigma][phi]) f_nt(eps)."""
    w = L[sigma, phi]
    return float(w * E.target_pdf(epsilon) + (1.0 - w) * E.nontarget_pdf(epsilon))


def evidence_marginal(epsilon: float, phi: int, p, L: np.ndarray, E: EvidenceModel) -> float:
    """p(epsilon | phi, belief p), the belief-weighted mixture density."""
    p = as_distribution(p)
    return float(np.dot(p, trial_likelihoods(epsilon, phi, L, E)))


def posterior_update(
    h: History,
    batch,
    evidence,
    L: np.ndarray,
    E: EvidenceModel,
    *,
    freeze_marginal: bool = False,
) -> np.ndarray:
    """Apply one sequence of trials to the history and return the new posterior.

    Trials are conditionally independent given labels, so the per-trial
    likelihood products commute; the posterior is floored and renormalized
    once at the end of the sequence. With ``freeze_marginal`` the running
    normalization is deferred to the end of the sequence (the evidence
    marginal is taken against the sequence-start belief); the final
    posterior is identical either way since normalization cancels.
    """
    batch = tuple(int(b) for b in batch)
    evidence = np.asarray(evidence, dtype=np.float64)
    if evidence.ndim != 1 or evidence.size != len(batch):
        raise ValueError("evidence length must match batch length")
    if not np.all(np.isfinite(evidence)):
        raise ValueError("non-finite evidence")

    p = h.current().copy()
    for phi, eps in zip(batch, evidence):
        p = p * trial_likelihoods(eps, phi, L, E)
        if not freeze_marginal:
            p = p / p.sum()
    p = floor_normalize(p)
    h.records.append(SequenceRecord(batch=batch, evidence=evidence, posterior_after=p))
    return p


def map_estimate(h: History) -> int:
    """MAP decision on the current posterior (ties to the lowest index)."""
    return int(np.argmax(h.current()))
