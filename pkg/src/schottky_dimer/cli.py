"""Command-line front end.

Subcommands: weights, verify, degenerate, series, theta-eval, abel-eval.
Every command reads the same INI config (see config.py) and writes its
reports under --out.  Exit codes: 0 success, 1 residual over tolerance,
2 bad configuration or input, 3 numerical non-convergence.

Reports are deterministic: a fixed evaluation order, seeded sampling and
a single-threaded reduction make repeated runs byte-identical, whatever
the worker count.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import build_curve, build_graph, build_group, load_config
from .curve import Curve
from .degeneration import (
    LimitScan,
    geometric_schedule,
    kernel_order1,
    limit_scan,
    subgroup_reference,
    weight_order1,
    write_scan_csv,
)
from .errors import (
    AdmissibilityError,
    ConfigError,
    GraphError,
    PoleCollisionError,
    QuadratureError,
    SchottkyDimerError,
    TruncationError,
)
from .fock import POLE_TOL, FockWeights, write_weights_csv
from .schottky import INFINITY, SchottkyGroup

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SUITES = ("periods", "theta", "kernel", "identity35", "inverse", "kasteleyn")
QUANTITIES = ("weights", "theta", "prime-form", "period")


# -- plumbing ------------------------------------------------------------------------


def _parallel_map(fn, items, threads):
    """Map preserving order; the reduction happens later, single-threaded."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _write_text(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as handle:
        handle.write(text)
    os.replace(tmp, path)


def _write_json(path, payload):
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _out_dir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _load(args, need_graph=True):
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        config.threads = args.threads
    if config.threads < 1:
        raise ConfigError("threads must be at least 1")
    curve = build_curve(config)
    graph = build_graph(config) if need_graph else None
    return config, curve, graph


def _parse_complex(text, what):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError("cannot parse %r as a complex number for %s" % (text, what))


def _pick_edge(graph, index):
    if not 0 <= index < len(graph.edges):
        raise ConfigError(
            "edge index %d out of range (graph has %d edges)" % (index, len(graph.edges))
        )
    return graph.edges[index]


def _random_point(rng, angles):
    lo = min(angles) - 1.5 if angles else -1.5
    hi = max(angles) + 1.5 if angles else 1.5
    for _ in range(100):
        u = complex(rng.uniform(lo, hi), rng.uniform(0.4, 2.5))
        if all(abs(u - a) > 10 * POLE_TOL for a in angles):
            return u
    raise ConfigError("could not sample a point clear of the poles")


# -- weights -------------------------------------------------------------------------


def cmd_weights(args):
    config, curve, graph = _load(args)
    weights = FockWeights(curve, graph, t=config.t)
    out = _out_dir(args)
    path = os.path.join(out, "weights.csv")
    tmp = path + ".tmp"
    write_weights_csv(weights, tmp)
    os.replace(tmp, path)
    print("wrote %s (%d edges, genus %d)" % (path, len(graph.edges), curve.genus))
    if not args.no_plot:
        from . import plots

        figure = plots.weight_map(weights, os.path.join(out, "weights.png"))
        if figure:
            print("wrote %s" % figure)
    return EXIT_OK


# -- verify --------------------------------------------------------------------------


def _suite_periods(config, curve):
    residuals, checks, samples = {}, {}, []
    g = curve.genus
    if g == 0:
        checks["genus_zero_trivial"] = True
        return residuals, checks, samples
    ab = curve.abelian
    q_imag = q_asym = omega_real = 0.0
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            raw = ab._q_entry(i, j, config.word_length)
            q_imag = max(q_imag, abs(raw.imag))
            omega_real = max(omega_real, abs(np.angle(raw)) / (2.0 * math.pi))
            if j > i:
                q_asym = max(q_asym, abs(raw - ab._q_entry(j, i, config.word_length)))
            samples.append(abs(raw.imag))
    residuals["q_imag"] = q_imag
    residuals["q_asymmetry"] = q_asym
    residuals["omega_real_part"] = omega_real
    if g == 1:
        residuals["q11_vs_multiplier"] = abs(
            float(curve.periods[0, 0]) - config.multipliers[0]
        )
    checks["diagonal_in_unit_interval"] = bool(
        all(0.0 < curve.periods[k, k] < 1.0 for k in range(g))
    )
    return residuals, checks, samples


def _suite_theta(config, curve, rng, threads, count=100):
    zs = [rng.uniform(0.0, 1.0, size=curve.genus) for _ in range(count)]
    values = _parallel_map(lambda z: complex(curve.theta(z)), zs, threads)
    scale = max(abs(v) for v in values)
    residuals = {"theta_imag_over_scale": max(abs(v.imag) for v in values) / scale}
    checks = {"theta_positive_on_real_points": bool(min(v.real for v in values) > 0.0)}
    samples = [abs(v.imag) / scale for v in values]
    return residuals, checks, samples


def _suite_kernel(fw, rng, threads, points=20):
    angles = fw.finite_angles()
    us = [_random_point(rng, angles) for _ in range(points)]

    def residual_at(u):
        right, left = fw.kernel_residuals(u)
        rows = list(right.values()) + list(left.values())
        return max(rows) if rows else 0.0

    samples = _parallel_map(residual_at, us, threads)
    residuals = {"kernel_row_residual": max(samples) if samples else 0.0}
    return residuals, {}, samples


def _suite_identity35(fw, rng, threads, pairs=20):
    angles = fw.finite_angles()
    picks = [
        (fw.graph.edges[int(k)], _random_point(rng, angles))
        for k in rng.integers(0, len(fw.graph.edges), size=pairs)
    ]
    samples = _parallel_map(lambda p: fw.identity_residual(p[0], p[1]), picks, threads)
    residuals = {"local_identity_residual": max(samples) if samples else 0.0}
    return residuals, {}, samples


def _inverse_products(fw, rows, u_c, tol, threads):
    """K A on rows x rows, entries integrated in a fixed parallel order."""
    needed = sorted(
        {(e.black, col) for col in rows for row in rows for e in fw.graph.edges_at_white(row)},
        key=str,
    )
    values = _parallel_map(
        lambda pair: fw.inverse_entry(pair[0], pair[1], u_c=u_c, tol=tol),
        needed,
        threads,
    )
    entries = dict(zip(needed, values))
    product = {}
    for row in rows:
        for col in rows:
            product[(row, col)] = sum(
                fw.weights[e.index] * entries[(e.black, col)]
                for e in fw.graph.edges_at_white(row)
            )
    return product


def _suite_inverse(fw, quad_tol, threads, u_c=None):
    rows = fw.graph.interior_whites()
    if not rows:
        raise ConfigError("patch has no interior white vertices; enlarge it")
    product = _inverse_products(fw, rows, u_c, quad_tol, threads)
    samples = []
    worst = 0.0
    for (row, col), value in sorted(product.items(), key=str):
        target = 1.0 if row == col else 0.0
        dev = abs(value - target)
        samples.append(dev)
        worst = max(worst, dev)
    residuals = {"inverse_identity": worst}
    return residuals, {}, samples


def _suite_kasteleyn(fw, tol):
    report = fw.kasteleyn_report(tol=tol)
    residuals = {"kasteleyn_phase_mismatch": report["max_phase_mismatch"]}
    checks = {"all_faces_flat": bool(report["ok"])}
    samples = [report["faces"][k] for k in sorted(report["faces"])]
    return residuals, checks, samples


def cmd_verify(args):
    need_graph = args.suite not in ("periods", "theta")
    config, curve, graph = _load(args, need_graph=need_graph)
    rng = np.random.default_rng(config.seed)
    if args.suite == "periods":
        residuals, checks, samples = _suite_periods(config, curve)
    elif args.suite == "theta":
        residuals, checks, samples = _suite_theta(config, curve, rng, config.threads)
    else:
        fw = FockWeights(curve, graph, t=config.t)
        if args.suite == "kernel":
            residuals, checks, samples = _suite_kernel(fw, rng, config.threads)
        elif args.suite == "identity35":
            residuals, checks, samples = _suite_identity35(fw, rng, config.threads)
        elif args.suite == "inverse":
            residuals, checks, samples = _suite_inverse(
                fw, config.quad_tol, config.threads, u_c=args.u_c
            )
        else:
            residuals, checks, samples = _suite_kasteleyn(fw, args.tol)

    passed = all(v <= args.tol for v in residuals.values()) and all(checks.values())
    payload = {
        "schema": "schottky-dimer-report/1",
        "suite": args.suite,
        "config": os.path.basename(args.config),
        "genus": curve.genus,
        "seed": config.seed,
        "tol": args.tol,
        "residuals": dict(sorted(residuals.items())),
        "checks": dict(sorted(checks.items())),
        "samples": samples,
        "pass": passed,
    }
    out = _out_dir(args)
    path = os.path.join(out, "verify-%s.json" % args.suite)
    _write_json(path, payload)
    if not args.no_plot and samples:
        from . import plots

        plots.residual_histogram(
            samples, os.path.join(out, "verify-%s.png" % args.suite), label=args.suite
        )
    worst = max(residuals.values()) if residuals else 0.0
    print(
        "suite %s: max residual %.3e (tol %.1e) -> %s"
        % (args.suite, worst, args.tol, "pass" if passed else "FAIL")
    )
    return EXIT_OK if passed else EXIT_RESIDUAL


# -- degenerate ----------------------------------------------------------------------


def _parse_handles(raw, genus):
    text = (raw or "").strip().lower()
    if text in ("", "none"):
        return []
    if text == "all":
        return list(range(1, genus + 1))
    indices = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            indices.append(int(item))
        except ValueError:
            raise ConfigError("handle list needs integers, got %r" % item)
    if len(set(indices)) != len(indices):
        raise ConfigError("handle list repeats an index")
    for i in indices:
        if not 1 <= i <= genus:
            raise ConfigError("handle %d out of range for genus %d" % (i, genus))
    return sorted(indices)


def _closing_family(config, indices):
    """Curve family driving the chosen multipliers to a common value s."""
    group = build_group(config)
    sub, kept = subgroup_reference(group, indices)

    def make(s):
        if s == 0.0:
            return Curve(sub, word_length=config.word_length, eps=config.theta_eps)
        mults = list(config.multipliers)
        for i in indices:
            mults[i - 1] = s
        return Curve(
            SchottkyGroup(config.centers, mults),
            word_length=config.word_length,
            eps=config.theta_eps,
        )

    return make, kept


def cmd_degenerate(args):
    config, curve, graph = _load(args)
    indices = _parse_handles(args.handles, config.genus)
    quantity = args.quantity
    out = _out_dir(args)
    path = os.path.join(out, "degenerate-%s.csv" % quantity)

    if quantity == "weights":
        edge = _pick_edge(graph, args.edge)
    angles = sorted(
        {t.angle for t in graph.tracks.values() if math.isfinite(t.angle)}
    )
    if quantity == "prime-form" and len(angles) < 2:
        raise ConfigError("prime-form scan needs two finite track angles")

    if not indices:
        # nothing closes: a single-row table of the configured value
        if quantity == "weights":
            value = FockWeights(curve, graph, t=config.t).weight(edge)
        elif quantity == "theta":
            value = complex(curve.theta(config.t))
        elif quantity == "prime-form":
            value = complex(curve.prime_form(angles[0], angles[-1]))
        else:
            if config.genus == 0:
                raise ConfigError("period scan needs at least one handle")
            value = complex(curve.periods[0, 0])
        scan = LimitScan(
            quantity=quantity,
            s_values=[0.0],
            values=[complex(value)],
            limit=complex(value),
            diffs=[0.0],
            order=0.0,
            residual=0.0,
            conclusive=True,
            note="no handles closed",
        )
        write_scan_csv(scan, path)
        print("wrote %s (no handles closed, single row)" % path)
        return EXIT_OK

    family, kept = _closing_family(config, indices)
    t_kept = config.t[[k - 1 for k in kept]] if kept else np.zeros(0)
    schedule = geometric_schedule(args.s0, args.steps)
    sub = family(0.0)

    if quantity == "weights":
        limit = FockWeights(sub, graph, t=t_kept).weight(edge)
        fn = lambda s: FockWeights(family(s), graph, t=config.t).weight(edge)
    elif quantity == "theta":
        limit = complex(sub.theta(t_kept))
        fn = lambda s: complex(family(s).theta(config.t))
    elif quantity == "prime-form":
        x, y = angles[0], angles[-1]
        limit = complex(sub.prime_form(x, y))
        fn = lambda s: complex(family(s).prime_form(x, y))
    else:
        if not kept:
            raise ConfigError("period scan needs an open handle; close fewer")
        j = kept[0] - 1
        limit = complex(sub.periods[0, 0])
        fn = lambda s: complex(family(s).periods[j, j])

    scan = limit_scan(fn, schedule, limit, quantity=quantity)
    write_scan_csv(scan, path)
    if not args.no_plot:
        from . import plots

        plots.convergence(scan, os.path.join(out, "degenerate-%s.png" % quantity))
    closing = ",".join(str(i) for i in indices)
    print(
        "quantity %s closing [%s]: fitted order %.3f (fit residual %.3f, %d steps)"
        % (quantity, closing, scan.order, scan.residual, len(schedule))
    )
    if not scan.conclusive:
        print("fit inconclusive: %s" % scan.note, file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# -- series --------------------------------------------------------------------------


def cmd_series(args):
    config, curve, graph = _load(args)
    fw = FockWeights(curve, graph, t=config.t)
    u = None
    if args.u is not None:
        u = _parse_complex(args.u, "--u")
        for a in fw.finite_angles():
            if abs(u - a) < POLE_TOL:
                raise ConfigError("u = %s collides with the pole at angle %r" % (u, a))

    expansions = _parallel_map(
        lambda e: weight_order1(fw, e), graph.edges, config.threads
    )
    edges_payload = []
    for e, exp in zip(graph.edges, expansions):
        entry = {
            "edge": e.index,
            "white": e.white,
            "black": e.black,
            "constant": _pair(exp.constant),
            "sqrt_coefficients": [_pair(c) for c in exp.coefficients],
        }
        if u is not None:
            kexp = kernel_order1(fw, e, u)
            entry["kernel_constant"] = _pair(kexp.constant)
            entry["kernel_sqrt_coefficients"] = [_pair(c) for c in kexp.coefficients]
        edges_payload.append(entry)

    payload = {
        "schema": "schottky-dimer-series/1",
        "config": os.path.basename(args.config),
        "genus": curve.genus,
        "point": _pair(u) if u is not None else None,
        "edges": edges_payload,
    }
    out = _out_dir(args)
    path = os.path.join(out, "series.json")
    _write_json(path, payload)
    print("wrote %s (%d edges, genus %d)" % (path, len(graph.edges), curve.genus))
    return EXIT_OK


# -- point evaluators ----------------------------------------------------------------


def cmd_theta_eval(args):
    config, curve, _ = _load(args, need_graph=False)
    items = [_parse_complex(part, "--z") for part in args.z.split(",") if part.strip()]
    if len(items) != curve.genus:
        raise ConfigError(
            "z needs %d components for genus %d, got %d"
            % (curve.genus, curve.genus, len(items))
        )
    value = complex(curve.theta(np.asarray(items, dtype=complex)))
    payload = {
        "schema": "schottky-dimer-report/1",
        "kind": "theta",
        "z": [_pair(item) for item in items],
        "value": _pair(value),
    }
    _write_json(os.path.join(_out_dir(args), "theta-eval.json"), payload)
    print("theta = %r" % value)
    return EXIT_OK


def _parse_divisor(raw):
    points = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            ptxt, mtxt = item.rsplit(":", 1)
            try:
                mult = int(mtxt)
            except ValueError:
                raise ConfigError("bad multiplicity %r in divisor" % mtxt)
        else:
            ptxt, mult = item, 1
        ptxt = ptxt.strip()
        if ptxt.lower() in ("inf", "oo"):
            point = INFINITY
        else:
            point = _parse_complex(ptxt, "--divisor")
        points.append((point, mult))
    if not points:
        raise ConfigError("divisor is empty")
    return points


def cmd_abel_eval(args):
    config, curve, _ = _load(args, need_graph=False)
    divisor = _parse_divisor(args.divisor)
    vec = curve.abel(divisor)
    payload = {
        "schema": "schottky-dimer-report/1",
        "kind": "abel",
        "divisor": [
            ["inf" if not np.isfinite(p) else _pair(p), m] for p, m in divisor
        ],
        "vector": [_pair(v) for v in vec],
    }
    _write_json(os.path.join(_out_dir(args), "abel-eval.json"), payload)
    print("abel = %s" % np.array2string(vec, precision=12))
    return EXIT_OK


# -- wiring --------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="schottky-dimer",
        description="Dimer weights and kernel checks on uniformized curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tol", type=float, default=1e-6, help="pass tolerance")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument(
            "--threads", type=int, default=None, help="override config threads"
        )
        p.add_argument("--no-plot", action="store_true", help="skip figures")
        return p

    common(sub.add_parser("weights", help="edge weight table"))

    verify = common(sub.add_parser("verify", help="residual suites"))
    verify.add_argument("--suite", choices=SUITES, required=True)
    verify.add_argument(
        "--u-c",
        dest="u_c",
        type=float,
        default=None,
        help="contour crossing point for suite=inverse",
    )

    degen = common(sub.add_parser("degenerate", help="handle-closing scans"))
    degen.add_argument(
        "--handles",
        default="all",
        help="comma list of 1-based handles, or all / none",
    )
    degen.add_argument("--quantity", choices=QUANTITIES, default="weights")
    degen.add_argument("--steps", type=int, default=6)
    degen.add_argument("--s0", type=float, default=0.04)
    degen.add_argument("--edge", type=int, default=0, help="edge for quantity=weights")

    series = common(sub.add_parser("series", help="first-order expansions"))
    series.add_argument("--u", default=None, help="also expand the kernel step at u")

    theta_eval = common(sub.add_parser("theta-eval", help="evaluate theta once"))
    theta_eval.add_argument("--z", required=True, help="comma-separated components")

    abel_eval = common(sub.add_parser("abel-eval", help="evaluate an Abel vector"))
    abel_eval.add_argument(
        "--divisor", required=True, help="point:mult list, e.g. 1:1,0:-1 or inf:1"
    )
    return parser


_HANDLERS = {
    "weights": cmd_weights,
    "verify": cmd_verify,
    "degenerate": cmd_degenerate,
    "series": cmd_series,
    "theta-eval": cmd_theta_eval,
    "abel-eval": cmd_abel_eval,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        return _HANDLERS[args.command](args)
    except (QuadratureError, TruncationError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except (SchottkyDimerError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
