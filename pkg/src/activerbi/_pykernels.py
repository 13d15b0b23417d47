"""Pure-numpy implementation of the query-scoring hot kernel.

Used as the fallback when the compiled extension is unavailable (or when
RBI_PURE_PYTHON is set). Semantics must match ``_ckernels`` to within
floating-point reassociation.
"""

from __future__ import annotations

import math

import numpy as np


def conditional_entropy_scores(
    p: np.ndarray,
    like_w: np.ndarray,
    ft: np.ndarray,
    fnt: np.ndarray,
    weights: np.ndarray,
    alpha: float,
) -> np.ndarray:
    """Expected posterior Renyi entropy per candidate query, by quadrature.

    p        : (n,) current belief
    like_w   : (c, n) label probabilities L[sigma][phi] for each candidate phi
    ft, fnt  : (m,) target / nontarget densities on the evidence grid
    weights  : (m,) quadrature weights
    alpha    : entropy order; pass exactly 1.0, 0.0 or math.inf for the limits

    Returns (c,) expectation of H_alpha(posterior | evidence) under the
    belief-weighted evidence marginal, normalized by the quadrature mass.
    """
    dens = like_w[:, None, :] * ft[None, :, None] + (1.0 - like_w[:, None, :]) * fnt[None, :, None]
    mix = p[None, None, :] * dens  # (c, m, n)
    marg = mix.sum(axis=2)  # (c, m)
    post = mix / marg[:, :, None]
    if alpha == 1.0:
        g = -np.sum(np.where(post > 0, post * np.log(np.where(post > 0, post, 1.0)), 0.0), axis=2)
    elif math.isinf(alpha):
        g = -np.log(post.max(axis=2))
    elif alpha == 0.0:
        g = np.log((post > 0).sum(axis=2))
    else:
        g = np.log(np.sum(post**alpha, axis=2)) / (1.0 - alpha)
    wm = weights[None, :] * marg
    return (wm * g).sum(axis=1) / wm.sum(axis=1)
