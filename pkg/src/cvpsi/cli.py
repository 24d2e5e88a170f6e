"""Command line entry point: ``cvpsi <command> ...`` (or ``python3 -m cvpsi``)."""

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import bandwidth, competitors, cv_core, extensions, harness, mixtures, oracle
from .exceptions import InvalidArgumentError


def read_column(path):
    """One column of reals; a non-numeric first row is taken as a header."""
    fh = sys.stdin if path == "-" else open(path, newline="")
    try:
        vals = []
        for i, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            try:
                vals.append(float(row[0]))
            except ValueError:
                if i == 0:
                    continue
                raise InvalidArgumentError(f"{path}: line {i + 1}: not a number: {row[0]!r}")
    finally:
        if fh is not sys.stdin:
            fh.close()
    return np.asarray(vals)


def _emit_json(obj):
    print(json.dumps(obj, sort_keys=True))


def _emit_csv(header, rows):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def cmd_difficulty(a):
    ids = harness.parse_int_list(a.density)
    _emit_csv(("id", "Q"), [(d, mixtures.q_difficulty(mixtures.catalog(d))) for d in ids])


def cmd_estimate(a):
    x = read_column(a.input)
    m = a.method
    if m == "circular":
        if np.any((x < 0) | (x >= 2 * math.pi)):
            raise InvalidArgumentError("circular input must lie in [0, 2*pi)")
        r = extensions.circular_psi_hat(x)
        _emit_json({"estimate": r.estimate, "nu_cv": r.parameter, "n": int(x.size)})
        return
    if m == "ct":
        r = cv_core.psi_hat(x)
        _emit_json({"estimate": r.estimate, "g_cv": r.g_cv, "n": int(x.size)})
    elif m == "entropy":
        r = extensions.entropy_hat(x)
        _emit_json({"estimate": r.estimate, "g_cv": r.parameter, "n": int(x.size)})
    elif m in ("theta1", "theta2"):
        r = extensions.theta_r_hat(x, int(m[-1]))
        _emit_json({"estimate": r.estimate, "g_cv": r.parameter, "n": int(x.size)})
    else:
        est, trace = (competitors.psi_js if m == "js" else competitors.psi_shd)(x)
        out = {"estimate": est, "g": trace.bandwidths["g0"], "n": int(x.size)}
        if a.verbose:
            out["trace"] = trace.to_dict()
        _emit_json(out)


def cmd_curves(a):
    f = mixtures.catalog(a.density)
    if a.kind == "mse":
        grid = np.exp(np.linspace(math.log(a.g_min), math.log(a.g_max), a.points))
        rows = []
        for g in grid:
            b, v = oracle.exact_bias(f, a.n, g), oracle.exact_variance(f, a.n, g)
            rows.append((g, b, v, b * b + v, oracle.exact_mise(f, a.n, g)))
        _emit_csv(("g", "bias", "variance", "mse", "mise"), rows)
        return
    s = mixtures.sample(f, a.n, a.seed, density=a.density)
    if a.kind == "cv":
        curve = cv_core.psi_hat(s).curve
        rows = [(g, v, oracle.exact_mise(f, a.n, g), oracle.exact_mse(f, a.n, g))
                for g, v in zip(curve.params, curve.values)]
        _emit_csv(("g", "cv", "mise_exact", "mse_exact"), rows)
    else:
        curve = bandwidth.h_hat(s).curve
        rows = [(h, v, oracle.exact_mise(f, a.n, h)) for h, v in zip(curve.params, curve.values)]
        _emit_csv(("h", "m_hat", "mise_exact"), rows)


def cmd_bandwidth(a):
    x = read_column(a.input)
    if a.method == "scv":
        r = bandwidth.h_hat(x)
        p, v = r.bandwidth, r.curve.value
    elif a.method == "histcv":
        est, p = bandwidth.hist_psi_breve(x)
        v = -est
    else:
        r = bandwidth.hist_scv_binwidth(x)
        p, v = r.bandwidth, r.curve.value
    _emit_json({"parameter": p, "criterion_min": v, "n": int(x.size)})


def cmd_equivalence(a):
    f = mixtures.catalog(a.density)
    ns = harness.parse_int_list(a.n) if a.n else (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)
    _emit_csv(("n", "g_mse", "g_mise", "ratio", "scaled_gap"), oracle.equivalence_table(f, ns))


def cmd_simulate(a):
    m = {}
    if a.config:
        m.update(harness.read_config_file(a.config))
    for key in ("densities", "n", "B", "seed", "workers", "estimators"):
        v = getattr(a, key)
        if v is not None:
            m[key] = v
    cfg = harness.ExperimentConfig.from_mapping(m)
    res = harness.run(cfg)
    paths = harness.export(res, a.out, json_mirror=a.json)
    for row in res.summary():
        print(",".join(str(v) if not isinstance(v, float) else f"{v:.3f}" for v in row))
    print(f"wrote {', '.join(sorted(paths.values()))}", file=sys.stderr)


def build_parser():
    p = argparse.ArgumentParser(prog="cvpsi", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("difficulty", help="Q(f) for catalog densities")
    q.add_argument("--density", required=True, help="id or list, e.g. 1-16")
    q.set_defaults(func=cmd_difficulty)

    e = sub.add_parser("estimate", help="estimate a functional from a one-column CSV")
    e.add_argument("--input", required=True, help="CSV path or - for stdin")
    e.add_argument("--method", default="ct",
                   choices=("ct", "entropy", "circular", "theta1", "theta2", "js", "shd"))
    e.add_argument("--verbose", action="store_true", help="include the plug-in trace")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("curves", help="criterion and exact error curves")
    c.add_argument("--kind", default="cv", choices=("cv", "mse", "bandwidth"))
    c.add_argument("--density", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--g-min", type=float, default=0.01)
    c.add_argument("--g-max", type=float, default=3.0)
    c.add_argument("--points", type=int, default=100)
    c.set_defaults(func=cmd_curves)

    b = sub.add_parser("bandwidth", help="bandwidth or binwidth selection")
    b.add_argument("--input", required=True)
    b.add_argument("--method", default="scv", choices=("scv", "histcv", "histscv"))
    b.set_defaults(func=cmd_bandwidth)

    q = sub.add_parser("equivalence", help="g_MSE / g_MISE ratio table")
    q.add_argument("--density", type=int, default=1)
    q.add_argument("--n", default=None, help="comma list of sample sizes")
    q.set_defaults(func=cmd_equivalence)

    s = sub.add_parser("simulate", help="Monte Carlo comparison of CT, SHD and JS")
    s.add_argument("--config", help="flat key=value file; flags override it")
    s.add_argument("--densities")
    s.add_argument("--n")
    s.add_argument("--B", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--estimators")
    s.add_argument("--out", required=True)
    s.add_argument("--json", action="store_true", help="also write results.json")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (InvalidArgumentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
