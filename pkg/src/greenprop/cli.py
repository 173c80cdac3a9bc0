"""Command-line experiment harness.

Subcommands: lattice-info, symbol-check, oracle-compare, lemma22, simulate,
decay-report.  Every output directory receives exactly one JSON-lines
manifest (config echo + versions + seeds) before any results; exit codes
encode pass/fail so acceptance runs are shell-scriptable.  The env var
GREENPROP_THREADS caps the FFT worker count; results are identical
regardless.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .config import load_config
from .diagnostics import THEORY_RATES, build_decay_report
from .errors import GreenpropError
from .kernels import (
    NormSeries,
    fit_decay,
    kernel_on_box,
    radial_norm_series,
    singular_operator_ratios,
    symbol_sup_norm,
)
from .params import ViscosityParams
from .propagator import (
    expm_oracle,
    operator_two_norms,
    symbol,
    symbol_parts,
)
from .spectral import build_lattice
from .stepping import phi1_matrix, run_simulation

MANIFEST_NAME = "manifest.jsonl"
SERIES_NAME = "series.csv"
SERIES_HEADER = "label,t,value,pipeline,truncation_quality"


def _fmt(x):
    return format(float(x), ".17g")


def _write_manifest(outdir, command, payload):
    os.makedirs(outdir, exist_ok=True)
    import scipy

    record = {
        "kind": "manifest",
        "command": command,
        "versions": {
            "greenprop": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    record.update(payload)
    path = os.path.join(outdir, MANIFEST_NAME)
    with open(path, "w") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return path


def _append_manifest(outdir, record):
    with open(os.path.join(outdir, MANIFEST_NAME), "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def _write_series(outdir, rows, name=SERIES_NAME):
    path = os.path.join(outdir, name)
    with open(path, "w") as fh:
        fh.write(SERIES_HEADER + "\n")
        for label, t, value, pipeline, quality in rows:
            q = "" if quality is None else _fmt(quality)
            fh.write(f"{label},{_fmt(t)},{_fmt(value)},{pipeline},{q}\n")
    return path


def _random_params(rng):
    mu = rng.uniform(0.05, 3.0)
    lam = rng.uniform(-2.0 * mu / 3.0, 3.0)
    return ViscosityParams(
        mu=mu, lambda_bulk=lam, alpha=rng.uniform(0.5, 1.5), gamma=rng.uniform(1.1, 2.0)
    )


def _unit(rng):
    d = rng.standard_normal(3)
    return d / np.linalg.norm(d)


def cmd_lattice_info(args):
    lattice = build_lattice(args.n, args.box_length)
    spacing = 2.0 * np.pi / lattice.length
    info = {
        "n": lattice.n,
        "box_length": lattice.length,
        "mode_spacing": spacing,
        "nyquist": np.pi * lattice.n / lattice.length,
        "dealias_cutoff": (lattice.n / 3.0) * spacing,
        "kept_modes": int(np.count_nonzero(lattice.dealias_mask)),
        "total_modes": lattice.n**3,
        "cell_volume": lattice.cell_volume,
    }
    if args.output:
        _write_manifest(args.output, "lattice-info", {"args": vars(args) | {"output": None}})
        with open(os.path.join(args.output, "lattice.csv"), "w") as fh:
            fh.write("key,value\n")
            for key, value in info.items():
                fh.write(f"{key},{_fmt(value) if isinstance(value, float) else value}\n")
    for key, value in info.items():
        print(f"{key}: {value}")
    return 0


def cmd_symbol_check(args):
    _write_manifest(
        args.output,
        "symbol-check",
        {"samples": args.samples, "confluent_samples": args.confluent_samples, "seed": args.seed},
    )
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        p = _random_params(rng)
        t = rng.uniform(0.0, 5.0)
        xi = rng.uniform(0.0, 10.0) * _unit(rng)
        err = float(np.max(np.abs(symbol(t, xi, p) - expm_oracle(t, xi, p))))
        worst = max(worst, err)
    for _ in range(args.confluent_samples):
        p = _random_params(rng)
        r = 2.0 / p.nu + rng.uniform(-1e-4, 1e-4)
        t = rng.uniform(0.0, 5.0)
        xi = r * _unit(rng)
        err = float(np.max(np.abs(symbol(t, xi, p) - expm_oracle(t, xi, p))))
        worst = max(worst, err)
    passed = worst <= args.threshold
    with open(os.path.join(args.output, "symbol_check.csv"), "w") as fh:
        fh.write("check,value,threshold,pass\n")
        fh.write(f"oracle_agreement,{_fmt(worst)},{_fmt(args.threshold)},{passed}\n")
    print(f"max |symbol - expm_oracle| = {worst:.3e} (threshold {args.threshold:g})")
    return 0 if passed else 1


def cmd_oracle_compare(args):
    _write_manifest(args.output, "oracle-compare", {"samples": args.samples, "seed": args.seed})
    rng = np.random.default_rng(args.seed)
    contraction = semigroup = reality = part_sum = phi_identity = 0.0
    for _ in range(args.samples):
        p = _random_params(rng)
        t, s = rng.uniform(0.0, 2.0, size=2)
        xi = rng.uniform(0.0, 10.0) * _unit(rng)
        G_t = symbol(t, xi, p)
        contraction = max(contraction, float(operator_two_norms(G_t)) - 1.0)
        semigroup = max(
            semigroup,
            float(np.linalg.norm(symbol(t + s, xi, p) - G_t @ symbol(s, xi, p))),
        )
        reality = max(
            reality, float(np.max(np.abs(symbol(t, -xi, p) - np.conj(G_t))))
        )
        low, hr, hs = symbol_parts(t, xi, p)
        part_sum = max(part_sum, float(np.max(np.abs(low + hr + hs - G_t))))
        dt = rng.uniform(1e-3, 0.5)
        from .propagator import linear_symbol

        L = linear_symbol(xi, p)
        residual = dt * L @ phi1_matrix(dt, xi, p) + expm_oracle(dt, xi, p) - np.eye(4)
        phi_identity = max(phi_identity, float(np.max(np.abs(residual))))
    checks = [
        ("contraction_excess", contraction, 1e-10),
        ("semigroup", semigroup, 1e-10),
        ("reality", reality, 1e-12),
        ("part_sum", part_sum, 1e-12),
        ("phi1_identity", phi_identity, 1e-10),
    ]
    all_ok = True
    with open(os.path.join(args.output, "oracle_compare.csv"), "w") as fh:
        fh.write("check,value,threshold,pass\n")
        for name, value, threshold in checks:
            ok = value <= threshold
            all_ok &= ok
            fh.write(f"{name},{_fmt(value)},{_fmt(threshold)},{ok}\n")
            print(f"{name}: {value:.3e} (threshold {threshold:g}) {'OK' if ok else 'FAIL'}")
    return 0 if all_ok else 1


def _lemma22_low(args, params):
    times = np.arange(args.tmin, args.tmax + 1e-9, args.tstep)
    quality = None
    if args.p == "2":
        series = radial_norm_series(times, "low", args.k, "L2_kernel", params)
        theory = 0.75 + args.k / 2.0
        pipeline = "radial"
    elif args.p == "inf":
        series = radial_norm_series(times, "low", args.k, "L1_symbol", params)
        theory = 1.5 + args.k / 2.0
        pipeline = "radial"
    else:
        p_val = float(args.p) if args.p != "4/3" else 4.0 / 3.0
        lattice = build_lattice(args.n, args.box_length)
        values, quality = [], []
        for t in times:
            box = kernel_on_box(t, "low", lattice, params, k=args.k)
            values.append(box.norms[p_val])
            quality.append(box.truncation_quality)
        series = NormSeries(times, values, label=f"low:k={args.k}:L{args.p}")
        theory = 1.5 * (1.0 - 1.0 / p_val) + args.k / 2.0
        pipeline = "box"
        if min(quality) < 0.999:
            print(f"warning: truncation quality {min(quality):.6f} < 0.999")
    fit = fit_decay(series, "algebraic", (args.tmin, args.tmax), theory, args.tolerance)
    return series, fit, pipeline, quality


def cmd_lemma22(args):
    params = ViscosityParams(
        mu=args.mu, lambda_bulk=args.lambda_bulk, alpha=args.alpha, gamma=args.gamma
    )
    _write_manifest(
        args.output,
        "lemma22",
        {"part": args.part, "p": args.p, "k": args.k, "window": [args.tmin, args.tmax],
         "params": {"mu": args.mu, "lambda": args.lambda_bulk, "alpha": args.alpha,
                    "gamma": args.gamma}, "seed": args.seed},
    )
    times = np.arange(args.tmin, args.tmax + 1e-9, args.tstep)
    rows = []
    qualities = {}
    if args.part == "L":
        series, fit, pipeline, quality = _lemma22_low(args, params)
        rows.append((series, fit, pipeline))
        if quality is not None:
            qualities[series.label] = quality
    elif args.part == "HR":
        sup = NormSeries(
            times,
            [symbol_sup_norm(t, "high_regular", args.k, params) for t in times],
            label=f"high_regular:k={args.k}:sup",
        )
        l2 = radial_norm_series(
            times, "high_regular", args.k, "L2_kernel", params,
            label=f"high_regular:k={args.k}:L2",
        )
        for series in (sup, l2):
            fit = fit_decay(series, "exponential", (args.tmin, args.tmax), 0.0,
                            np.inf, one_sided=True)
            fit.passed = bool(fit.fitted_rate > 0 and fit.r_squared >= 0.98)
            rows.append((series, fit, "radial"))
    else:  # HS
        lattice = build_lattice(args.n, min(args.box_length, 2.0 * np.pi))
        ratio_series = singular_operator_ratios(
            times, lattice, params, seed=args.seed, n_fields=args.fields
        )
        target = 1.0 / params.nu
        for idx, series in enumerate(ratio_series):
            series.label = f"high_singular:op:field{idx}"
            fit = fit_decay(series, "exponential", (args.tmin, args.tmax), target,
                            0.2 * target)
            rows.append((series, fit, "operator"))

    series_rows = []
    for series, fit, pipeline in rows:
        quality = qualities.get(series.label)
        for i, (t, v) in enumerate(zip(series.times, series.values)):
            q = quality[i] if quality is not None else None
            series_rows.append((series.label, t, v, pipeline, q))
    _write_series(args.output, series_rows)
    all_ok = True
    with open(os.path.join(args.output, "fits.csv"), "w") as fh:
        fh.write("label,model,fitted,theory,tolerance,r2,pass\n")
        for series, fit, _ in rows:
            all_ok &= fit.passed
            fh.write(
                f"{series.label},{fit.model},{_fmt(fit.fitted_rate)},{_fmt(fit.theory_rate)},"
                f"{_fmt(fit.tolerance) if np.isfinite(fit.tolerance) else 'inf'},"
                f"{_fmt(fit.r_squared)},{fit.passed}\n"
            )
            print(
                f"{series.label}: fitted {fit.fitted_rate:.4f} "
                f"(theory {fit.theory_rate:g}) r2={fit.r_squared:.4f} "
                f"{'PASS' if fit.passed else 'FAIL'}"
            )
    return 0 if all_ok else 1


def cmd_simulate(args):
    cfg = load_config(args.config)
    outdir = cfg.output_directory
    _write_manifest(outdir, "simulate", {"config": cfg.raw, "seed": cfg.seed})
    lattice = cfg.build_lattice()
    initial = cfg.build_initial(lattice)
    record = run_simulation(initial, cfg.scheme_config(), cfg.params, lattice)
    rows = []
    for label in sorted(record.norms):
        values = record.norms[label]
        for t, v in zip(record.times, values):
            rows.append((label, t, v, "simulation", None))
    _write_series(outdir, rows)
    _append_manifest(
        outdir,
        {
            "kind": "outcome",
            "termination": record.termination,
            "termination_step": record.termination_step,
            "samples": int(record.times.size),
            "monitors_ok": record.monitors_ok,
        },
    )
    if not args.no_state_dump:
        from .spectral import is_half, to_physical, to_physical_half

        coeffs = record.final_coeffs
        if is_half(coeffs, lattice):
            fields = to_physical_half(coeffs, lattice)
        else:
            fields = to_physical(coeffs, lattice)
        n = lattice.n
        with open(os.path.join(outdir, "final_state.csv"), "w") as fh:
            fh.write("i,j,k,rho,u1,u2,u3\n")
            flat = fields.reshape(4, -1)
            idx = np.indices((n, n, n)).reshape(3, -1)
            for col in range(flat.shape[1]):
                i, j, kk = idx[0, col], idx[1, col], idx[2, col]
                fh.write(
                    f"{i},{j},{kk},{_fmt(flat[0, col])},{_fmt(flat[1, col])},"
                    f"{_fmt(flat[2, col])},{_fmt(flat[3, col])}\n"
                )
    print(f"termination: {record.termination} after {record.times[-1]:g} time units")
    return 0 if record.termination == "completed" else 1


def _read_manifest(indir):
    path = os.path.join(indir, MANIFEST_NAME)
    if not os.path.exists(path):
        raise GreenpropError(f"no manifest in {indir!r}; refusing to fit unprovenanced data")
    records = [json.loads(line) for line in open(path) if line.strip()]
    manifests = [r for r in records if r.get("kind") == "manifest"]
    if len(manifests) != 1:
        raise GreenpropError(f"expected exactly one manifest record, found {len(manifests)}")
    return manifests[0], records


def cmd_decay_report(args):
    manifest, _ = _read_manifest(args.input)
    series_path = os.path.join(args.input, SERIES_NAME)
    if not os.path.exists(series_path):
        raise GreenpropError(f"no {SERIES_NAME} in {args.input!r}")
    times = {}
    values = {}
    with open(series_path) as fh:
        header = fh.readline().strip()
        if header != SERIES_HEADER:
            raise GreenpropError(f"unexpected series header {header!r}")
        for line in fh:
            label, t, v, pipeline, _quality = line.rstrip("\n").split(",")
            times.setdefault(label, []).append(float(t))
            values.setdefault(label, []).append(float(v))
    quantities = [q for q in THEORY_RATES if q in values]
    if not quantities:
        raise GreenpropError("series.csv holds no fit-able quantities")
    t_ref = np.asarray(times[quantities[0]])

    window = (args.window_lo, args.window_hi)
    if args.window_hi is None:
        cfg = manifest.get("config", {})
        grid = cfg.get("grid", {})
        prm = cfg.get("params", {})
        if grid and prm:
            nu = 2.0 * prm["mu"] + prm["lambda"]
            cap = 0.3 * (grid["box_length"] / (2.0 * np.pi)) ** 2 * 2.0 / nu
            window = (args.window_lo, min(float(t_ref[-1]), cap))
        else:
            window = (args.window_lo, float(t_ref[-1]))

    # drop leading zeros (e.g. an initially quiescent quantity)
    norms = {q: np.asarray(values[q]) for q in quantities}
    report = build_decay_report(
        t_ref, norms, window=window, tolerance=args.tolerance, one_sided=args.one_sided
    )
    out = args.output or args.input
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "decay_report.csv"), "w") as fh:
        fh.write(report.to_csv())
    for row in report.rows:
        f = row.fit
        print(
            f"{row.quantity}: fitted {f.fitted_rate:.4f} (theory {f.theory_rate:g},"
            f" {'one' if f.one_sided else 'two'}-sided tol {f.tolerance:g})"
            f" r2={f.r_squared:.4f} {'PASS' if f.passed else 'FAIL'}"
        )
    return 0 if report.all_passed else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="greenprop",
        description="Spectral propagator and decay-rate verification harness "
        "for the linearized compressible Navier-Stokes system.",
        epilog="GREENPROP_THREADS caps FFT workers (results identical regardless).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice-info", help="print lattice facts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--box-length", type=float, required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_lattice_info)

    p = sub.add_parser("symbol-check", help="symbol vs matrix-exponential oracle")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--confluent-samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_symbol_check)

    p = sub.add_parser("oracle-compare", help="structural invariants and phi oracle")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=11)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("lemma22", help="kernel decay-rate checks")
    p.add_argument("--part", choices=("L", "HR", "HS"), required=True)
    p.add_argument("--p", choices=("1", "4/3", "2", "inf"), default="2")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--tmin", type=float, default=5.0)
    p.add_argument("--tmax", type=float, default=500.0)
    p.add_argument("--tstep", type=float, default=None)
    p.add_argument("--tolerance", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--lambda", dest="lambda_bulk", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.4)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--box-length", type=float, default=2.0 * np.pi)
    p.add_argument("--seed", type=int, default=3)
    p.add_argument("--fields", type=int, default=20)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_lemma22)

    p = sub.add_parser("simulate", help="run a configured simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--no-state-dump", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decay-report", help="fit recorded norm series")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--tolerance", type=float, default=0.25)
    p.add_argument("--one-sided", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--window-lo", type=float, default=5.0)
    p.add_argument("--window-hi", type=float, default=None)
    p.set_defaults(func=cmd_decay_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tstep", None) is None and args.command == "lemma22":
        args.tstep = max((args.tmax - args.tmin) / 40.0, 1e-3)
    try:
        return args.func(args)
    except GreenpropError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
