"""Command-line front end: simulate, sweep, geometry, trajectory, prop1-harness.

Configuration is a single strict JSON document; unknown keys are hard
errors. All emitted floats use Python's shortest round-trip repr so output
files are byte-stable under reruns. Exit codes: 0 success, 1 runtime
failure, 2 configuration/parameter error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import BoundarySpec, barycentric_xy, boundary_points, collinearity_residual, entropy_gap, find_tilde_tau, tau_double_prime
from .harness import ScenarioConfig, prop1_harness, run_experiment, run_trial, run_rng
from .inference import EvidenceModel
from .objectives import PolicyConfig, StoppingConfig

RUNS_CSV_HEADER = "run_id,decided_state,true_target,correct,num_sequences,stopped_by"
SWEEP_CSV_HEADER = "alpha,lambda,accuracy,mean_sequences,speed"


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _alpha_value(raw, fieldname: str) -> float:
    if raw == "inf":
        return math.inf
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    raise ConfigError(f"{fieldname}: expected a number or \"inf\", got {raw!r}")


def _take(d: dict, key: str, default, where: str):
    return d.pop(key, default)


def _reject_unknown(d: dict, where: str):
    if d:
        raise ConfigError(f"{where}: unknown key(s) {sorted(d)}")


def load_scenario(path: str) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config parse error at line {e.lineno}: {e.msg}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    raw = dict(raw)
    ev = dict(_take(raw, "evidence", {}, "config"))
    evidence = EvidenceModel(
        target_mean=float(_take(ev, "target_mean", 0.0, "evidence")),
        target_std=float(_take(ev, "target_std", 1.0, "evidence")),
        nontarget_mean=float(_take(ev, "nontarget_mean", 3.0, "evidence")),
        nontarget_std=float(_take(ev, "nontarget_std", 1.5, "evidence")),
    )
    _reject_unknown(ev, "evidence")

    pol = dict(_take(raw, "policy", {}, "config"))
    try:
        policy = PolicyConfig(
            kind=str(_take(pol, "kind", "unified-renyi", "policy")),
            alpha2=_alpha_value(_take(pol, "alpha2", 1.0, "policy"), "policy.alpha2"),
            lambda2_init=float(_take(pol, "lambda2_init", 0.0, "policy")),
            lambda2_min=float(_take(pol, "lambda2_min", 0.0, "policy")),
            anneal_rate=float(_take(pol, "anneal_rate", 1.0, "policy")),
            momentum_variant=str(_take(pol, "momentum_variant", "realized-trajectory", "policy")),
            epsilon_mix=float(_take(pol, "epsilon_mix", 0.0, "policy")),
        )
    except ValueError as e:
        raise ConfigError(f"policy: {e}")
    _reject_unknown(pol, "policy")

    stop = dict(_take(raw, "stopping", {}, "config"))
    try:
        stopping = StoppingConfig(
            alpha1=_alpha_value(_take(stop, "alpha1", "inf", "stopping"), "stopping.alpha1"),
            lambda1=float(_take(stop, "lambda1", 0.0, "stopping")),
            tau_prime=float(_take(stop, "tau_prime", 0.1, "stopping")),
        )
    except ValueError as e:
        raise ConfigError(f"stopping: {e}")
    _reject_unknown(stop, "stopping")

    likelihood = _take(raw, "likelihood", "one-hot", "config")
    if likelihood == "one-hot":
        L = None
    else:
        L = np.asarray(likelihood, dtype=np.float64)

    try:
        sc = ScenarioConfig(
            n_states=int(_take(raw, "n_states", 30, "config")),
            true_target=int(_take(raw, "true_target", 0, "config")),
            prior_condition=str(_take(raw, "prior_condition", "uniform", "config")),
            prior_sharpness=float(_take(raw, "prior_sharpness", 4.0, "config")),
            evidence=evidence,
            trials_per_sequence=int(_take(raw, "trials_per_sequence", 8, "config")),
            max_sequences=int(_take(raw, "max_sequences", 50, "config")),
            stopping=stopping,
            policy=policy,
            seed=int(_take(raw, "seed", 0, "config")),
            num_runs=int(_take(raw, "num_runs", 500, "config")),
            store_trajectory=bool(_take(raw, "store_trajectory", False, "config")),
            likelihood=L,
        )
    except ValueError as e:
        raise ConfigError(f"config: {e}")
    _reject_unknown(raw, "config")
    return sc


def scenario_to_dict(sc: ScenarioConfig) -> dict:
    return {
        "n_states": sc.n_states,
        "true_target": sc.true_target,
        "prior_condition": sc.prior_condition,
        "prior_sharpness": sc.prior_sharpness,
        "evidence": {
            "target_mean": sc.evidence.target_mean,
            "target_std": sc.evidence.target_std,
            "nontarget_mean": sc.evidence.nontarget_mean,
            "nontarget_std": sc.evidence.nontarget_std,
        },
        "trials_per_sequence": sc.trials_per_sequence,
        "max_sequences": sc.max_sequences,
        "stopping": {
            "alpha1": "inf" if math.isinf(sc.stopping.alpha1) else sc.stopping.alpha1,
            "lambda1": sc.stopping.lambda1,
            "tau_prime": sc.stopping.tau_prime,
        },
        "policy": {
            "kind": sc.policy.kind,
            "alpha2": "inf" if math.isinf(sc.policy.alpha2) else sc.policy.alpha2,
            "lambda2_init": sc.policy.lambda2_init,
            "lambda2_min": sc.policy.lambda2_min,
            "anneal_rate": sc.policy.anneal_rate,
            "momentum_variant": sc.policy.momentum_variant,
            "epsilon_mix": sc.policy.epsilon_mix,
        },
        "seed": sc.seed,
        "num_runs": sc.num_runs,
        "store_trajectory": sc.store_trajectory,
        "likelihood": "one-hot" if sc.likelihood is None else sc.likelihood.tolist(),
    }


def write_manifest(out_dir: Path, sc_dict: dict, outputs: list[str], extra: dict | None = None):
    """The manifest is always the first file written into an output directory."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"tool": "rbi", "version": __version__, "config": sc_dict, "outputs": outputs}
    if extra:
        manifest.update(extra)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _threads(args) -> int:
    t = args.threads if args.threads is not None else int(os.environ.get("RBI_THREADS", "0"))
    if t <= 0:
        t = os.cpu_count() or 1
    return t


def _apply_overrides(sc: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "seed", None) is not None:
        sc = replace(sc, seed=args.seed)
    if getattr(args, "runs", None) is not None:
        sc = replace(sc, num_runs=args.runs)
    return sc


def cmd_simulate(args) -> int:
    sc = _apply_overrides(load_scenario(args.config), args)
    out = Path(args.out)
    outputs = ["runs.csv", "summary.json"]
    if sc.store_trajectory:
        outputs.append("trajectories.json")
    write_manifest(out, scenario_to_dict(sc), outputs)

    if args.interactive:
        summary = _interactive_experiment(sc)
    else:
        summary = run_experiment(sc, threads=_threads(args))

    lines = [RUNS_CSV_HEADER]
    for i, r in enumerate(summary.results):
        lines.append(
            f"{i},{r.decided_state},{sc.true_target},{_fmt(r.correct)},{r.num_sequences},{r.stopped_by}"
        )
    (out / "runs.csv").write_text("\n".join(lines) + "\n")
    (out / "summary.json").write_text(
        json.dumps(
            {
                "accuracy": summary.accuracy,
                "mean_sequences": summary.mean_sequences,
                "speed": summary.speed,
                "mean_queries": summary.mean_queries,
                "num_runs": len(summary.results),
            },
            indent=2,
        )
        + "\n"
    )
    if sc.store_trajectory:
        (out / "trajectories.json").write_text(json.dumps(_trajectory_payload(sc, summary.results), indent=2) + "\n")
    return 0


def _interactive_experiment(sc: ScenarioConfig):
    """Human responder: y maps to the target-density mode, n to the nontarget mode."""
    from .harness import summarize

    def source(batch):
        values = []
        for phi in batch:
            answer = ""
            while answer not in ("y", "n"):
                print(f"query state {phi}: target? [y/n] ", end="", flush=True)
                answer = sys.stdin.readline().strip().lower()
            values.append(sc.evidence.target_mean if answer == "y" else sc.evidence.nontarget_mean)
        return values

    results = [run_trial(sc, run_rng(sc.seed, i), evidence_source=source) for i in range(sc.num_runs)]
    return summarize(results, sc.trials_per_sequence)


def _trajectory_payload(sc: ScenarioConfig, results) -> list[dict]:
    payload = []
    for i, r in enumerate(results):
        steps = []
        for s, batch in enumerate(r.batches):
            p_prev, p_next = r.trajectory[s], r.trajectory[s + 1]
            step = {
                "sequence": s + 1,
                "batch": list(batch),
                "evidence": [float(e) for e in r.evidence[s]],
                "posterior": [float(v) for v in p_next],
                "stopping_value": r.stopping_values[s],
            }
            if len(batch) == 1:
                step["collinearity_residual"] = collinearity_residual(p_prev, p_next, batch[0])
            if sc.n_states == 3:
                step["barycentric_xy"] = list(barycentric_xy(p_next))
            steps.append(step)
        payload.append(
            {
                "run_id": i,
                "prior": [float(v) for v in r.trajectory[0]],
                "decided_state": r.decided_state,
                "stopped_by": r.stopped_by,
                "steps": steps,
            }
        )
    return payload


def cmd_sweep(args) -> int:
    from .harness import sweep as run_sweep

    sc = _apply_overrides(load_scenario(args.config), args)
    alphas = [math.inf if a == "inf" else float(a) for a in _parse_grid(args.alphas)]
    lambdas = [float(x) for x in _parse_grid(args.lambdas)]
    if not alphas or not lambdas:
        raise ConfigError("sweep grids must be non-empty")
    out = Path(args.out)
    write_manifest(out, scenario_to_dict(sc), ["sweep.csv"], extra={"which": args.which})
    rows = run_sweep(sc, alphas, lambdas, args.which, threads=_threads(args))
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(_fmt(row[k]) for k in ("alpha", "lambda", "accuracy", "mean_sequences", "speed"))
        )
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return 0


def _parse_grid(text: str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    out = []
    for t in items:
        out.append("inf" if t == "inf" else float(t))
    return out


def cmd_geometry(args) -> int:
    alpha = math.inf if args.alpha == "inf" else float(args.alpha)
    lines: list[str] = []
    if args.subquery == "tau-double-prime":
        spec = BoundarySpec(tau=args.tau, n=args.n, alpha=alpha)
        lines = ["tau,n,tau_double_prime", f"{_fmt(args.tau)},{args.n},{_fmt(tau_double_prime(spec))}"]
    elif args.subquery == "gap-curve":
        lines = ["tau,n,alpha,gap"]
        for tau in _tau_range(args):
            spec = BoundarySpec(tau=tau, n=args.n, alpha=alpha)
            lines.append(f"{_fmt(tau)},{args.n},{_fmt(alpha)},{_fmt(entropy_gap(spec))}")
    elif args.subquery == "tilde-tau-curve":
        lines = ["tau,n,alpha,tilde_tau"]
        for tau in _tau_range(args):
            spec = BoundarySpec(tau=tau, n=args.n, alpha=alpha)
            root = find_tilde_tau(spec)
            lines.append(f"{_fmt(tau)},{args.n},{_fmt(alpha)},{'' if root is None else _fmt(root)}")
    elif args.subquery == "boundary-points":
        spec = BoundarySpec(tau=args.tau, n=args.n, alpha=alpha)
        v, w = boundary_points(spec)
        lines = ["point,coordinates", f"v,{';'.join(_fmt(float(x)) for x in v)}", f"w,{';'.join(_fmt(float(x)) for x in w)}"]
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "geometry.csv").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _tau_range(args) -> list[float]:
    if args.tau_stop is None:
        return [args.tau]
    count = int(round((args.tau_stop - args.tau) / args.tau_step)) + 1
    taus = [args.tau + i * args.tau_step for i in range(count)]
    if not taus:
        raise ConfigError("empty tau range")
    return taus


def cmd_trajectory(args) -> int:
    sc = _apply_overrides(load_scenario(args.config), args)
    sc = replace(sc, store_trajectory=True)
    if sc.max_sequences < 1:
        raise ConfigError("config: max_sequences must be >= 1")
    out_path = Path(args.output)
    results = [run_trial(sc, run_rng(sc.seed, i)) for i in range(sc.num_runs)]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(_trajectory_payload(sc, results), indent=2) + "\n")
    return 0


def cmd_prop1(args) -> int:
    rng = run_rng(args.seed, 0)
    alphas = [math.inf if a == "inf" else float(a) for a in _parse_grid(args.alphas)]
    lambdas = [float(x) for x in _parse_grid(args.lambdas)]
    report = prop1_harness(alphas, lambdas, args.draws, rng)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "prop1.json").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rbi", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo experiment from a JSON config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--runs", type=int)
    sim.add_argument("--threads", type=int)
    sim.add_argument("--interactive", action="store_true", help="human responder on stdin")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="alpha/lambda grid sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--alphas", required=True, help="comma-separated, 'inf' allowed")
    sw.add_argument("--lambdas", required=True)
    sw.add_argument("--which", choices=("query-params", "stopping-params"), default="query-params")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--runs", type=int)
    sw.add_argument("--threads", type=int)
    sw.set_defaults(func=cmd_sweep)

    geo = sub.add_parser("geometry", help="decision-boundary curves and points")
    geo.add_argument("subquery", choices=("tau-double-prime", "gap-curve", "tilde-tau-curve", "boundary-points"))
    geo.add_argument("--tau", type=float, required=True)
    geo.add_argument("--tau-stop", type=float)
    geo.add_argument("--tau-step", type=float, default=0.05)
    geo.add_argument("--n", type=int, required=True)
    geo.add_argument("--alpha", default="1")
    geo.add_argument("--out")
    geo.set_defaults(func=cmd_geometry)

    tr = sub.add_parser("trajectory", help="export posterior trajectories as JSON")
    tr.add_argument("--config", required=True)
    tr.add_argument("--output", required=True)
    tr.add_argument("--seed", type=int)
    tr.add_argument("--runs", type=int)
    tr.set_defaults(func=cmd_trajectory)

    p1 = sub.add_parser("prop1-harness", help="exploration-ordering frequency report")
    p1.add_argument("--alphas", default="0.5,2,5")
    p1.add_argument("--lambdas", default="0.5,1")
    p1.add_argument("--draws", type=int, default=2000)
    p1.add_argument("--seed", type=int, default=0)
    p1.add_argument("--out")
    p1.set_defaults(func=cmd_prop1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
