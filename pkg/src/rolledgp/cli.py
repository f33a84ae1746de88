"""Command line interface.

Exit codes: 0 success, 1 computation or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .bundle import CurveBundle, align_quaternions, dump_json, load_bundle, save_bundle
from .estimate import METHODS, FitConfig, fit
from .exceptions import RolledGPError
from .experiments import METRICS, TABLE1, convergence_rows, median_rows, strictly_decreasing
from .frechet import frechet_mean
from .inference import permutation_test
from .manifolds import get_manifold
from .model import MNParams, RGPModel, simulate
from .presets import PRESETS, get_preset

__all__ = ["main", "cmd_simulate", "cmd_fit", "cmd_convergence", "cmd_test2", "align_quaternions", "load_model"]


class UsageError(Exception):
    pass


def load_model(path):
    """Model JSON: ``{manifold, M_w, U_w, V_w, base_point, frame, r}``."""
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    try:
        desc = d["manifold"]
        m = get_manifold(desc["kind"], desc.get("d"), desc.get("q"))
        params = MNParams(np.array(d["M_w"], float), np.array(d["U_w"], float), np.array(d["V_w"], float))
        return RGPModel(m, params, d["base_point"], d["frame"], int(d.get("r", 100)))
    except KeyError as exc:
        raise ValueError(f"model file is missing {exc}") from None


def cmd_simulate(out, n, seed=None, preset=None, model=None, strict=False, groups=1, shift=0.0, r=100):
    """Write a bundle of ``n`` curves per group. Group ``g`` shifts the second mean row by ``g * shift``."""
    if (preset is None) == (model is None):
        raise UsageError("give exactly one of --preset or --model")
    if n < 0 or groups < 1:
        raise UsageError("--n must be nonnegative and --groups positive")
    base = get_preset(preset, r=r) if preset is not None else load_model(model)
    children = np.random.default_rng(seed).spawn(groups)
    curves, labels = [], []
    for g, child in enumerate(children):
        mdl = base
        if g and shift:
            M = base.params.M.copy()
            M[min(1, M.shape[0] - 1)] += g * shift
            mdl = RGPModel(base.manifold, MNParams(M, base.params.U, base.params.V), base.b, base.frame, base.r)
        curves.append(simulate(mdl, n, child, strict=strict))
        labels += [g] * n
    x = np.concatenate(curves)
    bundle = CurveBundle(base.manifold, x, base.times, labels if groups > 1 else None, base.b, base.frame)
    save_bundle(bundle, out)
    return bundle


def _base_and_frame(bundle):
    m = bundle.manifold
    if bundle.base_point is not None and bundle.frame is not None:
        return bundle.base_point, bundle.frame
    b = frechet_mean(m, bundle.curves[:, 0])
    return b, m.frame(b)


def fit_report(res, m, b, frame, k):
    p = res.params
    return {
        "manifold": m.descriptor,
        "method": res.method,
        "k": int(k),
        "M_w": p.M.tolist(),
        "U_w": p.U.tolist(),
        "V_w": p.V.tolist(),
        "gamma_hat": np.asarray(res.gamma_hat).tolist(),
        "base_point": np.asarray(b).tolist(),
        "frame": np.asarray(frame).tolist(),
        "loglik": float(res.loglik),
        "iterations": int(res.iterations),
    }


def cmd_fit(inp, out, method="fre", k=10, seed=None):
    """Fit a bundle and write a JSON report. All estimators are deterministic; ``seed`` is recorded only."""
    bundle = load_bundle(inp)
    if bundle.n == 0:
        raise ValueError("cannot fit an empty bundle")
    b, frame = _base_and_frame(bundle)
    res = fit(bundle.manifold, bundle.curves, k, b, frame, FitConfig(method=method))
    report = fit_report(res, bundle.manifold, b, frame, k)
    report["seed"] = seed
    dump_json(report, out)
    return report


def cmd_convergence(out, n_list=(10, 25, 50, 100, 500), seeds=10, preset="spd-demo", seed0=0, method="fre"):
    """Write per-seed and median metric rows to CSV; returns ``(rows, medians, decreasing)``."""
    rows = convergence_rows(preset, n_list, seeds, seed0, method)
    medians = median_rows(rows)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=["n", "seed", *METRICS])
        w.writeheader()
        for row in rows + medians:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return rows, medians, strictly_decreasing(medians)


def cmd_test2(inp, out, R=200, seed=None, k=10, inp2=None, hist=None, bootstrap=False):
    """Two-sample test of equal mean curves from one labelled bundle or two bundles."""
    b1 = load_bundle(inp)
    if inp2 is not None:
        b2 = load_bundle(inp2)
        if b1.manifold != b2.manifold:
            raise UsageError("the two bundles live on different manifolds")
        s1, s2 = b1.curves, b2.curves
    else:
        if b1.labels is None:
            raise UsageError("bundle has no labels; pass --in2 or a labelled bundle")
        groups = b1.groups()
        if len(groups) != 2:
            raise UsageError(f"need exactly two label groups, found {len(groups)}")
        s1, s2 = groups.values()
    if len(s1) == 0 or len(s2) == 0:
        raise UsageError("both groups must be nonempty")
    m = b1.manifold
    pooled = np.concatenate([s1, s2])
    b = frechet_mean(m, pooled[:, 0])
    frame = m.frame(b)
    res = permutation_test(m, s1, s2, k, b, frame, R=R, seed=seed, bootstrap=bootstrap)
    report = {
        "J_observed": res.J_observed,
        "p_value": res.p_value,
        "R": res.R,
        "seed": res.seed,
        "method": res.method,
        "n1": len(s1),
        "n2": len(s2),
        "J_resampled": res.J_resampled.tolist(),
    }
    dump_json(report, out)
    if hist is not None:
        _write_histogram(res.J_resampled, res.J_observed, hist)
    return report


def _write_histogram(values, j_obs, path, bins=20):
    counts, edges = np.histogram(values, bins=bins)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "count", "J_observed"])
        for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
            w.writerow([repr(float(lo)), repr(float(hi)), int(c), repr(float(j_obs))])


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="rolledgp", description="Rolled Gaussian processes for manifold-valued curves.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a curve bundle")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--model", help="model JSON file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--r", type=int, default=100, help="time points (presets only)")
    s.add_argument("--strict", action="store_true", help="fail if a curve leaves the injectivity radius")
    s.add_argument("--groups", type=int, default=1)
    s.add_argument("--shift", type=float, default=0.0)

    f = sub.add_parser("fit", help="fit a model to a bundle")
    f.add_argument("--in", dest="inp", required=True)
    f.add_argument("--method", choices=METHODS, default="fre")
    f.add_argument("--k", type=int, default=10)
    f.add_argument("--seed", type=int)
    f.add_argument("--out", required=True)

    c = sub.add_parser("convergence", help="estimator convergence table")
    c.add_argument("--preset", choices=sorted(PRESETS), default="spd-demo")
    c.add_argument("--n-list", type=_int_list, default=list(TABLE1["n"]))
    c.add_argument("--seeds", type=int, default=10)
    c.add_argument("--seed", type=int, default=0, help="first seed")
    c.add_argument("--method", choices=METHODS, default="fre")
    c.add_argument("--out", required=True)

    t = sub.add_parser("test2", help="two-sample test of equal mean curves")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--in2")
    t.add_argument("--R", type=int, default=200)
    t.add_argument("--seed", type=int)
    t.add_argument("--k", type=int, default=10)
    t.add_argument("--bootstrap", action="store_true")
    t.add_argument("--out", required=True)
    t.add_argument("--hist", help="null histogram CSV")
    return p


def _run(args):
    if args.command == "simulate":
        bundle = cmd_simulate(args.out, args.n, args.seed, args.preset, args.model, args.strict, args.groups, args.shift, args.r)
        print(f"wrote {bundle.n} curves to {args.out}")
    elif args.command == "fit":
        rep = cmd_fit(args.inp, args.out, args.method, args.k, args.seed)
        print(f"{rep['method']}: loglik {rep['loglik']:.6g} after {rep['iterations']} iterations")
    elif args.command == "convergence":
        _, medians, dec = cmd_convergence(args.out, args.n_list, args.seeds, args.preset, args.seed, args.method)
        for row in medians:
            print(f"n={row['n']:>5}  " + "  ".join(f"{k}={row[k]:.4g}" for k in METRICS))
        print("strictly decreasing medians: " + ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in dec.items()))
    elif args.command == "test2":
        if args.R < 1:
            raise UsageError("--R must be positive")
        rep = cmd_test2(args.inp, args.out, args.R, args.seed, args.k, args.in2, args.hist, args.bootstrap)
        print(f"J = {rep['J_observed']:.6g}, p = {rep['p_value']:.6g} (R = {rep['R']})")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with code 2 on bad usage
    try:
        _run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rolledgp: error: {exc}", file=sys.stderr)
        return 2
    except (RolledGPError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"rolledgp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
