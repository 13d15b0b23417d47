"""Compare the compiled scoring kernel against the numpy fallback.

Times the expected-posterior-entropy scorer on the default simulation
workload (30 states, all 30 candidate queries, 513 quadrature points) across
representative entropy orders.

Usage: python benchmarks/bench_kernels.py [--states N] [--repeats R]
"""

import argparse
import math
import timeit

import numpy as np

from activerbi import _pykernels
from activerbi.inference import EvidenceModel
from activerbi.objectives import QuadratureSpec

try:
    from activerbi import _ckernels
except ImportError:
    _ckernels = None


def workload(n_states: int):
    rng = np.random.default_rng(0)
    p = rng.dirichlet(np.ones(n_states))
    L = np.eye(n_states)
    like_w = np.ascontiguousarray(L.T)
    E = EvidenceModel()
    x, w = QuadratureSpec().grid(E)
    return p, like_w, E.target_pdf(x), E.nontarget_pdf(x), w


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--states", type=int, default=30)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    p, like_w, ft, fnt, w = workload(args.states)
    print(f"states={args.states} candidates={like_w.shape[0]} grid={w.size} repeats={args.repeats}")
    print(f"{'alpha':>8} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for alpha in (0.5, 1.0, 2.0, 5.0, math.inf):
        t_py = timeit.timeit(
            lambda: _pykernels.conditional_entropy_scores(p, like_w, ft, fnt, w, alpha),
            number=args.repeats,
        ) / args.repeats
        if _ckernels is None:
            print(f"{alpha:>8} {t_py * 1e3:>12.3f} {'n/a':>12} {'n/a':>8}")
            continue
        t_cy = timeit.timeit(
            lambda: _ckernels.conditional_entropy_scores(p, like_w, ft, fnt, w, alpha),
            number=args.repeats,
        ) / args.repeats
        a = np.asarray(_pykernels.conditional_entropy_scores(p, like_w, ft, fnt, w, alpha))
        b = np.asarray(_ckernels.conditional_entropy_scores(p, like_w, ft, fnt, w, alpha))
        assert np.allclose(a, b, atol=1e-12), "backends disagree"
        print(f"{alpha:>8} {t_py * 1e3:>12.3f} {t_cy * 1e3:>12.3f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
