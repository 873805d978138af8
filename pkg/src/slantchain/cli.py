"""Command-line surface: build chains, emit gallery curves, verify, export.

Commands
    build    construct an I- or J-chain from a seed and write it out
    gallery  evaluate a closed-form reference curve
    verify   run named checks against a stored curve or chain
    export   convert a stored curve/chain between JSON and CSV
    report   build + verify + render figures and delimited residuals

Exit codes: 0 success, 1 a verification check failed, 2 usage error. Data
files are deterministic for a given configuration (fixed field order, no
timestamps); report metadata carries a timestamp. All numbers are written in
shortest round-trip decimal form.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import gallery, verify
from .curve_core import QuadratureConfig, SampledCurve, resample, sampled_to_curve
from .errors import CurveError
from .slant_ops import MAX_DEPTH, PhaseVector, chain_I, chain_J

_GALLERY_NAMES = ("circle", "spherical-helix", "circular-helix", "constant-precession", "j3-series")
_CHECK_HEADS = (
    "spherical",
    "unit-speed",
    "kslant",
    "characterization",
    "hyperboloid",
    "prime",
    "nk-magnetic",
)


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".slantchain-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        _atomic_write(out, text)


def _parse_range(text: str | None, default):
    if text is None:
        return default
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise CurveError(f"range must look like lo:hi, got {text!r}") from exc
    if hi <= lo:
        raise CurveError("range must have positive length")
    return (lo, hi)


def _parse_seed(spec: str, op: str, domain_text: str | None):
    kind, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise CurveError(f"bad seed parameter {item!r}")
            params[key.strip()] = float(value)
    if kind != "circle":
        raise CurveError(f"unknown seed kind {kind!r}; supported: circle")
    r = params.get("r", 1.0)
    if op == "I":
        a = params.get("a", 0.0)
        domain = _parse_range(domain_text, (0.0, 2.0 * np.pi * r))
        return gallery.circle((0.0, 0.0, a), r, mode="spherical", domain=domain)
    domain = _parse_range(domain_text, (0.0, 2.0 * np.pi * r))
    return gallery.circle((0.0, 0.0, 0.0), r, mode="planar", domain=domain)


def _quad_config(args) -> QuadratureConfig:
    return QuadratureConfig(
        rule=args.quad_rule,
        panels=args.quad_panels,
        nodes=args.quad_nodes,
        richardson=args.richardson,
    )


def _chain_to_json(levels, samples: int) -> str:
    out = []
    for lvl in levels:
        sc = resample(lvl.curve, samples)
        meta = dict(sc.meta)
        meta["level"] = lvl.level
        meta["operator"] = lvl.operator
        if lvl.curve.meta.get("theta") is not None:
            meta["theta"] = lvl.curve.meta.get("theta")
        meta["cusps"] = [float(c) for c in lvl.cusps]
        out.append(SampledCurve(sc.grid, sc.points, meta).to_json_dict())
    return json.dumps(out)


def _load_curves(path: str):
    with open(path) as handle:
        text = handle.read()
    if path.endswith(".csv"):
        return [SampledCurve.from_csv(text)]
    data = json.loads(text)
    if isinstance(data, list):
        return [SampledCurve.from_json_dict(d) for d in data]
    return [SampledCurve.from_json_dict(data)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_build(args) -> int:
    depth = args.depth
    if depth > MAX_DEPTH and not args.unsafe_depth:
        raise CurveError(f"depth {depth} needs --unsafe-depth (error budget caps at {MAX_DEPTH})")
    phases = PhaseVector.of([float(x) for x in args.phases.split(",")] if args.phases else None, depth)
    seed = _parse_seed(args.seed, args.op, args.range)
    cfg = _quad_config(args)
    if args.op == "I":
        levels = chain_I(seed, depth, phases, cfg, max_depth=max(depth, MAX_DEPTH))
    else:
        levels = chain_J(seed, depth, phases, cfg, max_depth=max(depth, MAX_DEPTH))
    if args.format == "json":
        _emit(_chain_to_json(levels, args.samples), args.out)
    else:
        _emit(resample(levels[-1].curve, args.samples).to_csv(), args.out)
    return 0


def _cmd_gallery(args) -> int:
    name = args.name
    if name not in _GALLERY_NAMES:
        raise CurveError(f"unknown gallery curve {name!r}; choose from {', '.join(_GALLERY_NAMES)}")
    domain = _parse_range(args.range, None)
    if name == "circle":
        curve = gallery.circle((0.0, 0.0, args.a), args.r, domain=domain)
    elif name == "spherical-helix":
        curve = gallery.spherical_helix(args.a, args.r, args.theta0, domain=domain)
    elif name == "circular-helix":
        curve = gallery.circular_helix(args.a, args.b, args.w, domain=domain)
    elif name == "constant-precession":
        curve = gallery.constant_precession(args.a, args.b, args.w, args.epsilon, domain=domain)
    else:
        params = gallery.GalleryParams(a=args.a, b=args.b, w=args.w, epsilon=args.epsilon)
        curve = gallery.j3_curve(params, args.terms, domain=domain or (0.0, 1.0))
    sc = resample(curve, args.samples)
    if args.format == "json":
        _emit(json.dumps(sc.to_json_dict()), args.out)
    else:
        _emit(sc.to_csv(), args.out)
    return 0


def _split_checks(spec: str) -> list[str]:
    tokens = spec.split(",")
    checks: list[str] = []
    for token in tokens:
        head = token.split(":", 1)[0]
        if head in _CHECK_HEADS:
            checks.append(token)
        elif checks:
            checks[-1] += "," + token  # continuation of e.g. axis=0,0,1
        else:
            raise CurveError(f"unknown check {token!r}")
    return checks


def _parse_axis(text: str):
    vals = [float(x) for x in text.split(",")]
    if len(vals) != 3:
        raise CurveError(f"axis needs three components, got {text!r}")
    return np.array(vals)


def _run_checks(curve, meta, checks_spec: str, tol: float | None, samples: int):
    named = []
    exclude = tuple(meta.get("cusps", ()))
    for token in _split_checks(checks_spec):
        parts = token.split(":")
        head = parts[0]
        if head == "spherical":
            named.append((token, lambda tol=tol: verify.check_spherical(
                curve, center=(0.0, 0.0, 0.0), radius=1.0, tol=tol or 1e-8,
                n=samples, exclude=exclude)))
        elif head == "unit-speed":
            named.append((token, lambda tol=tol: verify.check_unit_speed(
                curve, tol=tol or 1e-8, n=samples, exclude=exclude)))
        elif head == "kslant":
            k = int(parts[1])
            axis = np.array([0.0, 0.0, 1.0])
            for extra in parts[2:]:
                key, _, value = extra.partition("=")
                if key == "axis":
                    axis = _parse_axis(value)
                else:
                    raise CurveError(f"unknown kslant option {extra!r}")
            named.append((token, lambda k=k, axis=axis, tol=tol: verify.check_k_slant(
                curve, k, axis, tol=tol or 1e-6, n=samples, exclude=exclude, name=f"kslant-{k}")))
        elif head == "characterization":
            named.append((token, lambda tol=tol: verify.check_spherical_characterization(
                curve, tol=tol or 1e-4, n=samples, exclude=exclude)))
        elif head == "hyperboloid":
            if len(parts) != 4:
                raise CurveError("hyperboloid check needs hyperboloid:a:b:w")
            a, b, w = (float(x) for x in parts[1:])
            named.append((token, lambda a=a, b=b, w=w, tol=tol: verify.check_hyperboloid(
                curve, a, b, w, tol=tol or 1e-10, n=samples)))
        elif head == "prime":
            named.append((token, lambda: verify.check_prime(curve, n=max(samples, 1024))))
        elif head == "nk-magnetic":
            if len(parts) != 3:
                raise CurveError("nk-magnetic check needs nk-magnetic:k:omega")
            k, omega = int(parts[1]), float(parts[2])
            named.append((token, lambda k=k, omega=omega, tol=tol: verify.check_Nk_magnetic(
                curve, k, omega, tol=tol or 1e-5, n=samples, exclude=exclude)))
    return verify.run_report(named, curve_meta=meta)


def _cmd_verify(args) -> int:
    curves = _load_curves(args.infile)
    sc = curves[args.level if args.level is not None else -1]
    curve = sampled_to_curve(sc)
    # evaluate exactly on the stored grid so stencil derivatives and
    # positions stay consistent
    report = _run_checks(curve, sc.meta, args.checks, args.tol, len(sc.grid))
    sys.stdout.write(report.table() + "\n")
    if args.out:
        _atomic_write(args.out, report.to_json())
    return 0 if report.passed else 1


def _cmd_export(args) -> int:
    curves = _load_curves(args.infile)
    if args.format == "csv":
        sc = curves[args.level if args.level is not None else -1]
        if args.frames:
            text = _frames_csv(sc)
        else:
            text = sc.to_csv()
        _emit(text, args.out)
    else:
        payload = [c.to_json_dict() for c in curves]
        _emit(json.dumps(payload if len(payload) > 1 else payload[0]), args.out)
    return 0


def _frames_csv(sc: SampledCurve) -> str:
    from .frames import frenet_samples

    curve = sampled_to_curve(sc)
    margin = 3  # FD stencils shift near the edges; keep interior rows only
    ts = sc.grid[margin:-margin]
    data = frenet_samples(curve, ts)
    pts = curve(ts)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    name = sc.meta.get("param", "t")
    writer.writerow(
        [name, "x", "y", "z", "T_x", "T_y", "T_z", "N_x", "N_y", "N_z", "B_x", "B_y", "B_z", "kappa", "tau"]
    )
    for i, t in enumerate(ts):
        row = [t, *pts[i], *data["T"][i], *data["N"][i], *data["B"][i], data["kappa"][i], data["tau"][i]]
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _cmd_report(args) -> int:
    from . import report as figs

    os.makedirs(args.out_dir, exist_ok=True)
    depth = args.depth
    if depth > MAX_DEPTH and not args.unsafe_depth:
        raise CurveError(f"depth {depth} needs --unsafe-depth (error budget caps at {MAX_DEPTH})")
    phases = PhaseVector.of([float(x) for x in args.phases.split(",")] if args.phases else None, depth)
    seed = _parse_seed(args.seed, args.op, args.range)
    cfg = _quad_config(args)
    builder = chain_I if args.op == "I" else chain_J
    levels = builder(seed, depth, phases, cfg, max_depth=max(depth, MAX_DEPTH))
    top = levels[-1]

    named = []
    if args.op == "I":
        named.append(("spherical", lambda: verify.check_spherical(
            top.curve, center=(0.0, 0.0, 0.0), radius=1.0,
            tol=verify.chain_tolerance(top.level), n=args.samples, exclude=top.cusps)))
    else:
        named.append(("unit-speed", lambda: verify.check_unit_speed(
            top.curve, tol=1e-8, n=args.samples, exclude=top.cusps)))
        named.append(("mannheim", lambda: verify.check_mannheim(top)))
    if depth >= 1:
        named.append((f"kslant-{depth - 1}", lambda: verify.check_k_slant(
            top.curve, depth - 1, (0.0, 0.0, 1.0), n=min(args.samples, 256), exclude=top.cusps)))
        named.append(("frame-vs-quadrature", lambda: verify.check_frame_vs_quadrature(top, cfg)))
    report = verify.run_report(named, curve_meta=dict(top.curve.meta))
    report.curve_meta["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())

    ts = np.linspace(seed.t_min, seed.t_max, args.samples)
    _atomic_write(os.path.join(args.out_dir, "report.json"), report.to_json())
    _atomic_write(os.path.join(args.out_dir, "curve.csv"), resample(top.curve, args.samples).to_csv())
    rows = ["name,residual,tolerance,passed"]
    rows += [f"{c.name},{repr(c.residual)},{repr(c.tolerance)},{c.passed}" for c in report.checks]
    _atomic_write(os.path.join(args.out_dir, "residuals.csv"), "\n".join(rows) + "\n")
    figs.curve_figure(levels, ts, os.path.join(args.out_dir, "curve3d.png"))
    figs.weight_figure(levels, ts, os.path.join(args.out_dir, "weights.png"))
    figs.residual_figure(report, os.path.join(args.out_dir, "residuals.png"))
    sys.stdout.write(report.table() + "\n")
    sys.stdout.write(f"report written to {args.out_dir}\n")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_quad_options(p):
    p.add_argument("--quad-rule", default="gauss-legendre", choices=["gauss-legendre", "simpson"])
    p.add_argument("--quad-panels", type=int, default=64, help="panels per unit parameter length")
    p.add_argument("--quad-nodes", type=int, default=10)
    p.add_argument("--richardson", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slantchain",
        description="Construct and verify spherical and Euclidean slant-curve chains.",
    )
    parser.add_argument("--config", help="JSON file of option defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a chain from a seed circle")
    b.add_argument("--seed", required=True, help="e.g. circle:a=0.6,r=0.8 (I) or circle:r=1 (J)")
    b.add_argument("--op", required=True, choices=["I", "J"])
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--phases", default=None, help="comma-separated lift phases, length = depth")
    b.add_argument("--samples", type=int, default=1024)
    b.add_argument("--range", default=None, help="parameter range lo:hi")
    b.add_argument("--format", default="json", choices=["json", "csv"])
    b.add_argument("--out", default=None)
    b.add_argument("--unsafe-depth", action="store_true")
    _add_quad_options(b)
    b.set_defaults(func=_cmd_build)

    g = sub.add_parser("gallery", help="emit a closed-form reference curve")
    g.add_argument("--name", required=True, choices=list(_GALLERY_NAMES))
    g.add_argument("--a", type=float, default=0.6)
    g.add_argument("--r", type=float, default=0.8)
    g.add_argument("--b", type=float, default=0.8)
    g.add_argument("--w", type=float, default=None)
    g.add_argument("--epsilon", type=int, default=1)
    g.add_argument("--theta0", type=float, default=0.0)
    g.add_argument("--terms", type=int, default=30)
    g.add_argument("--samples", type=int, default=1024)
    g.add_argument("--range", default=None)
    g.add_argument("--format", default="json", choices=["json", "csv"])
    g.add_argument("--out", default=None)
    g.set_defaults(func=_cmd_gallery)

    v = sub.add_parser("verify", help="run checks against a stored curve or chain")
    v.add_argument("--in", dest="infile", required=True)
    v.add_argument("--checks", required=True,
                   help="comma-separated, e.g. spherical,kslant:1:axis=0,0,1")
    v.add_argument("--tol", type=float, default=None, help="tolerance override for all checks")
    v.add_argument("--samples", type=int, default=512)
    v.add_argument("--level", type=int, default=None, help="chain level to verify (default: top)")
    v.add_argument("--out", default=None, help="write the JSON report here")
    v.set_defaults(func=_cmd_verify)

    e = sub.add_parser("export", help="convert stored curves between formats")
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--format", required=True, choices=["json", "csv"])
    e.add_argument("--out", default=None)
    e.add_argument("--level", type=int, default=None)
    e.add_argument("--frames", action="store_true", help="append Frenet columns to CSV")
    e.set_defaults(func=_cmd_export)

    r = sub.add_parser("report", help="build, verify and render figures")
    r.add_argument("--seed", required=True)
    r.add_argument("--op", required=True, choices=["I", "J"])
    r.add_argument("--depth", type=int, required=True)
    r.add_argument("--phases", default=None)
    r.add_argument("--samples", type=int, default=1024)
    r.add_argument("--range", default=None)
    r.add_argument("--out-dir", required=True)
    r.add_argument("--unsafe-depth", action="store_true")
    _add_quad_options(r)
    r.set_defaults(func=_cmd_report)

    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # two-phase parse so --config can supply defaults that explicit flags override
    config_path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif token.startswith("--config="):
            config_path = token.split("=", 1)[1]
    if config_path:
        try:
            with open(config_path) as handle:
                defaults = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            sys.stderr.write(f"slantchain: bad config file: {exc}\n")
            return 2
        for action in parser._subparsers._group_actions[0].choices.values():  # noqa: SLF001
            known = {a.dest for a in action._actions}  # noqa: SLF001
            action.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()
                                   if k.replace("-", "_") in known})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CurveError as exc:
        sys.stderr.write(f"slantchain: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"slantchain: {exc}\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
