"""Command-line entry point.

Exit codes: 0 success or pass, 1 theorem violation, 2 inconclusive, 3 input error.
"""

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds, certify, harness
from .decoders import decode_alternating, decode_noiseless_l1, decode_noisy_l1, decode_sigma_k
from .errors import PhaselessError
from .io import read_matrix, read_observation, read_signal, write_matrix, write_observation
from .measurements import add_noise, phaseless_measure, sample_gaussian

EXIT_INPUT = 3


def to_jsonable(obj):
    """Recursively convert reports to JSON-safe values (non-finite floats become strings)."""
    if obj is bounds.BOUNDARY_DEGENERATE:
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_json"):
            return to_jsonable(obj.to_json())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


def _emit(payload, out=None):
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen_matrix(a):
    A = sample_gaussian(a.m, a.N, a.seed)
    write_matrix(a.out, A)
    return 0


def cmd_measure(a):
    A = read_matrix(a.matrix)
    x = read_signal(a.signal)
    obs = phaseless_measure(A, x)
    if a.noise_model == "adversarial":
        obs = add_noise(obs, "adversarial", e=read_signal(a.e))
    elif a.magnitude > 0:
        obs = add_noise(obs, a.noise_model, a.magnitude, a.seed)
    write_observation(a.out, obs)
    return 0


def cmd_decode(a):
    A = read_matrix(a.matrix)
    obs = read_observation(a.obs)
    if a.method == "noiseless":
        res = decode_noiseless_l1(A, obs)
    elif a.method == "noisy":
        res = decode_noisy_l1(A, obs, a.eps)
    elif a.method == "sigma-k":
        res = decode_sigma_k(A, obs, a.k)
    else:
        res = decode_alternating(A, obs, a.eps, a.max_iters, a.restarts, a.seed)
    _emit(res, a.out)
    return 0


def cmd_certify(a):
    A = read_matrix(a.matrix).entries
    order = a.order if a.order is not None else a.k
    if a.property == "rip":
        rep = certify.rip_constant(A, order)
    elif a.property == "srip":
        rep = certify.srip_bounds(A, order)
    elif a.property == "nsp":
        rep = certify.nsp_constant(A, order)
    elif a.property == "snsp":
        rep = certify.snsp_constant(A, order)
    elif a.property == "phaseless-io":
        rep = certify.phaseless_io_condition_estimate(A, a.k, a.budget, a.seed)
    else:
        rep = certify.mixed_nsp_check(A, a.k, a.p, a.q, a.C, a.budget, a.seed)
    _emit(rep, a.out)
    return 0


def cmd_bounds(a):
    try:
        params = json.loads(a.params)
    except json.JSONDecodeError as exc:
        print(f"error: --params is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_INPUT
    fn = bounds.FORMULAS[a.formula]
    try:
        value = fn(params)
    except KeyError as exc:
        _emit({"formula": a.formula, "ok": False, "error": f"missing parameter {exc}"})
        return EXIT_INPUT
    except PhaselessError as exc:
        _emit({"formula": a.formula, "ok": False, "error": str(exc), "params": params})
        return EXIT_INPUT
    _emit({"formula": a.formula, "ok": True, "params": params, "value": value})
    return 0


def _load_config(path, overrides):
    base = json.loads(Path(path).read_text()) if path else {}
    base.update({k: v for k, v in overrides.items() if v is not None})
    return harness.ExperimentConfig.from_dict(base)


def cmd_experiment(a):
    cfg = _load_config(a.config, {"workers": a.workers})
    _, summary = harness.run_experiment(cfg, a.out)
    _emit(summary)
    return harness.EXIT_CODES[summary["status"]] if cfg.theorem != "none" else 0


def cmd_verify(a):
    which = ["stability", "io"] if a.theorem == "all" else [a.theorem]
    overrides = {"trials": a.trials, "master_seed": a.seed, "workers": a.workers}
    results = {}
    for th in which:
        if a.config:
            cfg = _load_config(a.config, overrides)
        else:
            default = harness.DEFAULT_STABILITY if th == "stability" else harness.DEFAULT_IO
            cfg = harness.ExperimentConfig.from_dict(
                {**dataclasses.asdict(default), **{k: v for k, v in overrides.items() if v is not None}})
        out = Path(a.out) / th if a.out else None
        fn = harness.verify_stability_theorem if th == "stability" else harness.verify_io_theorem
        results[th] = fn(cfg, out)
    _emit(results)
    statuses = [r["status"] for r in results.values()]
    if harness.FAIL in statuses:
        return 1
    if harness.INCONCLUSIVE in statuses:
        return 2
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="phaseless", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-matrix", help="sample a Gaussian measurement matrix")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_matrix)

    g = sub.add_parser("measure", help="phaseless measurements of a signal, optionally noisy")
    g.add_argument("--matrix", required=True)
    g.add_argument("--signal", required=True)
    g.add_argument("--noise-model", choices=["gaussian", "uniform", "adversarial"], default="gaussian")
    g.add_argument("--magnitude", type=float, default=0.0)
    g.add_argument("--e", help="noise vector file for the adversarial model")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_measure)

    g = sub.add_parser("decode", help="recover a signal from phaseless measurements")
    g.add_argument("--matrix", required=True)
    g.add_argument("--obs", required=True)
    g.add_argument("--method", choices=["noiseless", "noisy", "sigma-k", "alternating"], default="noisy")
    g.add_argument("--eps", type=float, default=0.0)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--restarts", type=int, default=10)
    g.add_argument("--max-iters", type=int, default=50)
    g.add_argument("--out")
    g.set_defaults(func=cmd_decode)

    g = sub.add_parser("certify", help="compute RIP, S-RIP, NSP or S-NSP constants")
    g.add_argument("--matrix", required=True)
    g.add_argument("--property", required=True,
                   choices=["rip", "srip", "nsp", "snsp", "phaseless-io", "mixed-nsp"])
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--order", type=int, help="sparsity order (defaults to k)")
    g.add_argument("--budget", type=int, default=200)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p", type=float, default=1.0)
    g.add_argument("--q", type=float, default=1.0)
    g.add_argument("--C", type=float, default=math.inf)
    g.add_argument("--out")
    g.set_defaults(func=cmd_certify)

    g = sub.add_parser("bounds", help="evaluate a constant formula")
    g.add_argument("--formula", required=True, choices=sorted(bounds.FORMULAS))
    g.add_argument("--params", required=True, help="JSON object of parameters")
    g.set_defaults(func=cmd_bounds)

    g = sub.add_parser("experiment", help="run a randomized experiment from a JSON config")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--workers", type=int)
    g.set_defaults(func=cmd_experiment)

    g = sub.add_parser("verify", help="check a theorem on certified random instances")
    g.add_argument("theorem", choices=["stability", "io", "all"])
    g.add_argument("--config")
    g.add_argument("--trials", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        return args.func(args)
    except (PhaselessError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
