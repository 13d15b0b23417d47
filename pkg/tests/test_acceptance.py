"""Acceptance gate: exact identities, property suites, and directional
simulation checks, one test per criterion with its runtime budget.

Each test prints a single machine-greppable verdict line of the form
``[acceptance] <name>: PASS|FAIL (<detail>)`` before asserting.
"""

import json
import math
import os
import time
from dataclasses import replace

import numpy as np
import pytest

from activerbi.cli import main
from activerbi.geometry import (
    BoundarySpec,
    collinearity_residual,
    entropy_gap,
    find_tilde_tau,
    midpoint,
    tau_double_prime,
)
from activerbi.harness import (
    ScenarioConfig,
    prop1_harness,
    prop1_proof_step_check,
    run_experiment,
)
from activerbi.inference import (
    EvidenceModel,
    History,
    SequenceRecord,
    one_hot_likelihood,
    posterior_update,
)
from activerbi.objectives import (
    PolicyConfig,
    StoppingConfig,
    conditional_renyi_entropy,
    greedy_batch_select,
    shannon_conditional_entropy,
    should_stop,
)
from activerbi.probability import renyi_divergence, renyi_entropy
from conftest import random_simplex

THREADS = os.cpu_count() or 1
TAU_N_GRID = [(tau, n) for tau in (0.5, 0.7, 0.9) for n in (3, 10, 30)]


def _verdict(name, ok, detail):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def _budget(name, t0, limit):
    elapsed = time.perf_counter() - t0
    assert elapsed < limit, f"{name} exceeded runtime budget: {elapsed:.1f}s >= {limit}s"
    return elapsed


def _random_evidence_model(rng):
    return EvidenceModel(
        target_mean=float(rng.uniform(-1, 1)),
        target_std=float(rng.uniform(0.5, 2.0)),
        nontarget_mean=float(rng.uniform(1.5, 5.0)),
        nontarget_std=float(rng.uniform(0.5, 2.0)),
    )


def _history_with_posterior(p):
    h = History(prior=np.full(p.size, 1.0 / p.size))
    h.records.append(SequenceRecord(batch=(0,), evidence=np.array([0.0]), posterior_after=p))
    return h


def test_criterion_1_reduction_identity():
    """Unified selection at (alpha2=1, lambda2=0) == Shannon MMI; stopping at
    (alpha1=inf, lambda1=0, tau'=-log tau) == the posterior-threshold rule."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    unified = PolicyConfig(kind="unified-renyi", alpha2=1.0, lambda2_init=0.0)

    select_matches = 0
    for _ in range(200):
        n = int(rng.integers(3, 15))
        p = random_simplex(rng, n)
        L = rng.uniform(size=(n, n))
        E = _random_evidence_model(rng)
        pick = greedy_batch_select(History(prior=p), L, E, unified, 1, rng)[0]
        # independent oracle: plain Shannon conditional-entropy argmin
        scores = [shannon_conditional_entropy(p, phi, L, E) for phi in range(n)]
        oracle = min(range(n), key=lambda i: (scores[i], i))
        select_matches += pick == oracle

    stop_matches = 0
    for _ in range(200):
        n = int(rng.integers(2, 15))
        p = random_simplex(rng, n)
        tau = float(rng.uniform(0.2, 0.95))
        scfg = StoppingConfig(alpha1=math.inf, lambda1=0.0, tau_prime=-math.log(tau))
        stop_matches += should_stop(_history_with_posterior(p), scfg) == (float(p.max()) > tau)

    elapsed = _budget("criterion-1", t0, 30.0)
    ok = select_matches == 200 and stop_matches == 200
    _verdict(
        "criterion-1 reduction identity", ok,
        f"selection {select_matches}/200, stopping {stop_matches}/200, {elapsed:.1f}s",
    )


def test_criterion_2_renyi_measure_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    orders = [0.0, 0.3, 0.7, 1.0, 2.0, 5.0, 20.0, math.inf]
    bounds = monotone = limits = nonneg = zero_iff = 0
    for _ in range(1000):
        n = int(rng.integers(2, 32))
        p = random_simplex(rng, n)
        q = random_simplex(rng, n)
        hs = [renyi_entropy(p, a) for a in orders]
        bounds += all(-1e-12 <= h <= math.log(n) + 1e-12 for h in hs)
        monotone += all(a >= b - 1e-12 for a, b in zip(hs, hs[1:]))
        near_shannon = abs(renyi_entropy(p, 1.0 + 1e-5) - renyi_entropy(p, 1.0)) < 1e-4
        near_min = abs(renyi_entropy(p, 1e8) - renyi_entropy(p, math.inf)) < 1e-4
        limits += near_shannon and near_min
        ds = [renyi_divergence(p, q, a) for a in (0.5, 1.0, 2.0, math.inf)]
        nonneg += all(d >= -1e-12 for d in ds)
        zero_iff += abs(renyi_divergence(p, p, 2.0)) < 1e-12 and (
            np.allclose(p, q) or renyi_divergence(p, q, 2.0) > 0
        )
    elapsed = _budget("criterion-2", t0, 10.0)
    counts = (bounds, monotone, limits, nonneg, zero_iff)
    ok = all(c == 1000 for c in counts)
    _verdict("criterion-2 renyi measure suite", ok, f"checks {counts} of 1000 each, {elapsed:.1f}s")


def test_criterion_3_collinearity_residual():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    E = EvidenceModel()
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(3, 10))
        h = History(prior=random_simplex(rng, n))
        phi = int(rng.integers(n))
        eps = float(rng.normal(1.5, 2.5))
        posterior_update(h, (phi,), [eps], one_hot_likelihood(n), E)
        worst = max(worst, collinearity_residual(h.prior, h.current(), phi))
    elapsed = _budget("criterion-3", t0, 10.0)
    _verdict(
        "criterion-3 single-query collinearity", worst <= 1e-9,
        f"max residual {worst:.2e} over 10000 updates, {elapsed:.1f}s",
    )


def test_criterion_4_max_entropy_midpoint():
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    ok = True
    details = []
    for tau, n in TAU_N_GRID:
        spec = BoundarySpec(tau=tau, n=n)
        mid_h = renyi_entropy(midpoint(spec), 1.0)
        if abs(mid_h - tau_double_prime(spec)) > 1e-12:
            ok = False
            details.append(f"closed-form mismatch at ({tau},{n})")
        # grid of the line p(a)=tau: independent vectorized Shannon oracle
        rest = rng.dirichlet(np.ones(n - 1), size=10_000) * (1 - tau)
        pts = np.column_stack([np.full(10_000, tau), rest])
        pos = np.where(pts > 0, pts, 1.0)
        grid_h = -np.sum(pos * np.log(pos), axis=1)
        if grid_h.max() > mid_h + 1e-9:
            ok = False
            details.append(f"midpoint not maximal at ({tau},{n})")
    elapsed = _budget("criterion-4", t0, 5.0)
    _verdict(
        "criterion-4 entropy-maximizing midpoint", ok,
        (";".join(details) or "9/9 cells") + f", {elapsed:.1f}s",
    )


def test_criterion_5_entropy_gap_anchor():
    anchored = all(
        abs(entropy_gap(BoundarySpec(tau=tau, n=n, alpha=1.0)) - (1 - tau) * math.log(n - 1)) <= 1e-9
        for tau, n in TAU_N_GRID
    )
    high_order = all(
        entropy_gap(BoundarySpec(tau=tau, n=n, alpha=1e6)) <= 1e-4 for tau, n in TAU_N_GRID
    )
    round_trips = True
    found_root = 0
    for alpha in (0.5, 1.0, 2.0, math.inf):
        for tau, n in TAU_N_GRID:
            spec = BoundarySpec(tau=tau, n=n, alpha=alpha)
            root = find_tilde_tau(spec)
            if root is None:
                continue
            found_root += 1
            w = np.zeros(n)
            w[0], w[1] = root, 1 - root
            gap = abs(renyi_entropy(w, alpha) - renyi_entropy(midpoint(spec), alpha))
            round_trips = round_trips and gap <= 1e-9
    ok = anchored and high_order and round_trips and found_root > 0
    _verdict(
        "criterion-5 gap anchor", ok,
        f"shannon anchor {anchored}, high-order {high_order}, {found_root} round-trips ok {round_trips}",
    )


def test_criterion_6_quadrature_vs_monte_carlo():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    alphas = (0.5, 1.0, 2.0)
    worst = 0.0
    for i in range(20):
        alpha = alphas[i % 3]
        n = int(rng.integers(3, 12))
        p = random_simplex(rng, n)
        L = one_hot_likelihood(n) if i % 2 == 0 else rng.uniform(size=(n, n))
        E = _random_evidence_model(rng)
        phi = int(rng.integers(n))
        quad = conditional_renyi_entropy(p, phi, L, E, alpha)

        # Monte-Carlo oracle sampling the full generative chain
        m = 100_000
        states = rng.choice(n, size=m, p=p)
        labels = rng.random(m) < L[states, phi]
        eps = np.where(
            labels,
            rng.normal(E.target_mean, E.target_std, m),
            rng.normal(E.nontarget_mean, E.nontarget_std, m),
        )
        lw = L[:, phi]
        like = lw[None, :] * E.target_pdf(eps)[:, None] + (1 - lw[None, :]) * E.nontarget_pdf(eps)[:, None]
        post = p[None, :] * like
        post /= post.sum(axis=1, keepdims=True)
        if alpha == 1.0:
            hvals = -np.sum(np.where(post > 0, post * np.log(np.where(post > 0, post, 1)), 0), axis=1)
        else:
            hvals = np.log(np.sum(post**alpha, axis=1)) / (1 - alpha)
        worst = max(worst, abs(quad - float(hvals.mean())))
    elapsed = _budget("criterion-6", t0, 60.0)
    _verdict(
        "criterion-6 quadrature vs monte carlo", worst <= 1e-2,
        f"max |quad - mc| = {worst:.2e} nats over 20 fixtures, {elapsed:.1f}s",
    )


def test_criterion_7_exploration_ordering():
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    report = prop1_harness((0.5, 2.0, 5.0), (0.5, 1.0), 4000, rng)
    cells_ok = all(c["pass"] and c["draws"] >= 2000 for c in report["cells"])
    proof = prop1_proof_step_check()
    elapsed = _budget("criterion-7", t0, 60.0)
    worst = min(c["difference"] for c in report["cells"])
    ok = cells_ok and proof["pass"]
    _verdict(
        "criterion-7 exploration ordering", ok,
        f"{len(report['cells'])} cells, min lhs-rhs {worst:+.3f}, "
        f"proof grid {proof['checked']} checked / {proof['violations']} violations, {elapsed:.1f}s",
    )


def test_criterion_8_adversarial_simulation():
    t0 = time.perf_counter()
    stopping = StoppingConfig(alpha1=math.inf, lambda1=0.0, tau_prime=0.105)
    base = ScenarioConfig(
        n_states=30,
        true_target=7,
        prior_condition="adversarial",
        prior_sharpness=3.0,
        trials_per_sequence=8,
        max_sequences=50,
        stopping=stopping,
        seed=7,
        num_runs=500,
    )
    unified = PolicyConfig(kind="unified-renyi", alpha2=2.0, lambda2_init=1.0, anneal_rate=0.5)
    mmi = PolicyConfig(kind="mmi-shannon")

    def pair(sc):
        u = run_experiment(replace(sc, policy=unified), threads=THREADS)
        m = run_experiment(replace(sc, policy=mmi), threads=THREADS)
        return u, m

    u_adv, m_adv = pair(base)
    speed_ok = u_adv.mean_sequences <= m_adv.mean_sequences
    acc_ok = u_adv.accuracy >= m_adv.accuracy - 0.02

    similar = {}
    for cond in ("uniform", "supportive"):
        u, m = pair(replace(base, prior_condition=cond))
        similar[cond] = abs(u.accuracy - m.accuracy)
    similar_ok = all(v <= 0.03 for v in similar.values())

    elapsed = _budget("criterion-8", t0, 120.0)
    ok = speed_ok and acc_ok and similar_ok
    _verdict(
        "criterion-8 adversarial simulation", ok,
        f"adversarial seq {u_adv.mean_sequences:.2f} vs {m_adv.mean_sequences:.2f}, "
        f"acc {u_adv.accuracy:.3f} vs {m_adv.accuracy:.3f}, "
        f"uniform gap {similar['uniform']:.3f}, supportive gap {similar['supportive']:.3f}, {elapsed:.0f}s",
    )


def test_criterion_9_cli_byte_determinism(tmp_path):
    config = {
        "n_states": 10,
        "true_target": 3,
        "prior_condition": "adversarial",
        "trials_per_sequence": 4,
        "max_sequences": 25,
        "stopping": {"alpha1": "inf", "lambda1": 0.0, "tau_prime": 0.105},
        "policy": {"kind": "unified-renyi", "alpha2": 2.0, "lambda2_init": 1.0, "anneal_rate": 0.5},
        "seed": 9,
        "num_runs": 40,
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))

    sim_outputs = []
    for label, threads in (("s1", "1"), ("s2", "4"), ("s3", "1")):
        out = tmp_path / label
        assert main(["simulate", "--config", str(cfg), "--out", str(out), "--threads", threads]) == 0
        sim_outputs.append(
            (out / "runs.csv").read_bytes()
            + (out / "summary.json").read_bytes()
            + (out / "manifest.json").read_bytes()
        )
    sim_ok = sim_outputs[0] == sim_outputs[1] == sim_outputs[2]

    sweep_outputs = []
    for label, threads in (("w1", "1"), ("w2", "4")):
        out = tmp_path / label
        args = [
            "sweep", "--config", str(cfg), "--out", str(out),
            "--alphas", "1,2", "--lambdas", "0,1", "--threads", threads, "--runs", "20",
        ]
        assert main(args) == 0
        sweep_outputs.append((out / "sweep.csv").read_bytes())
    sweep_ok = sweep_outputs[0] == sweep_outputs[1]

    ok = sim_ok and sweep_ok
    _verdict("criterion-9 cli determinism", ok, f"simulate stable {sim_ok}, sweep stable {sweep_ok}")
