"""Command-line driver: build artifacts, verify invariants, emit reports.

Exit codes: 0 all checks pass, 1 domain or verification failure, 2 usage
error.  All floats are serialized at a fixed 17 significant digits so that
identical configurations produce byte-identical JSON and CSV output.  The
default output directory comes from the NEEDLETS_OUT environment variable
(falling back to the current directory).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__, besov, cubature, frames, lattice, manifold, spectral

ENV_OUT = "NEEDLETS_OUT"


def fmt_float(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        # match the spellings the json module parses
        return "NaN" if np.isnan(x) else ("Infinity" if x > 0 else "-Infinity")
    return format(x, ".17g")


def _encode(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_encode(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_encode(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent)
    return json.dumps(obj)


def write_json(path: str, obj) -> str:
    with open(path, "w") as fh:
        fh.write(_encode(obj) + "\n")
    return path


def write_csv(path: str, header: list[str], rows) -> str:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def file_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class Check:
    """One named verification check: value against bound."""

    def __init__(self, name: str, value: float, bound: float, lower: bool = False):
        self.name = name
        self.value = float(value)
        self.bound = float(bound)
        self.passed = bool(value >= bound) if lower else bool(value <= bound)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "bound": self.bound, "pass": self.passed}


def make_report(command: str, seed: int, checks: list[Check], inputs: dict | None = None, extra: dict | None = None) -> dict:
    report = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "checks": [c.to_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }
    if inputs:
        report["inputs"] = inputs
    if extra:
        report.update(extra)
    return report


def finish(report: dict, out_dir: str, name: str) -> int:
    path = write_json(os.path.join(out_dir, name), report)
    verdict = "pass" if report["passed"] else "FAIL"
    print(f"{report['command']}: {verdict} ({path})")
    for c in report["checks"]:
        mark = "ok " if c["pass"] else "BAD"
        print(f"  [{mark}] {c['name']}: {fmt_float(c['value'])} vs {fmt_float(c['bound'])}")
    return 0 if report["passed"] else 1


def _out_dir(args) -> str:
    out = args.out or os.environ.get(ENV_OUT) or "."
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_manifold_info(args) -> int:
    M = manifold.make_manifold(args.manifold)
    info = {
        "kind": M.kind,
        "dimension": M.n,
        "group_dimension": M.d,
        "volume": M.volume,
        "lambda1": M.lambda1,
        "diameter": M.diameter,
    }
    if args.omega is not None:
        basis = manifold.eigen_basis(M, args.omega)
        info["omega"] = args.omega
        info["dim_E_omega"] = len(basis)
        info["weyl_count"] = manifold.weyl_count(M, args.omega)
        info["max_degree"] = manifold.max_degree(M, args.omega)
    print(_encode(info))
    return 0


def cmd_lattice_build(args) -> int:
    M = manifold.make_manifold(args.manifold)
    out = _out_dir(args)
    lat = lattice.build_lattice(M, args.rho, args.seed)
    rep = lattice.validate_lattice(M, lat)
    write_json(os.path.join(out, "lattice.json"), lat.to_dict())
    checks = [
        Check("separation >= rho/2", rep.min_separation, lat.rho / 2.0 - 1e-12, lower=True),
        Check("covering <= rho/2", rep.covering_radius, lat.rho / 2.0 + 1e-12),
    ]
    extra = {"cardinality": rep.cardinality, "multiplicity": rep.multiplicity, "rho": lat.rho}
    return finish(make_report("lattice build", args.seed, checks, extra=extra), out, "lattice_report.json")


def cmd_cubature_build(args) -> int:
    M = manifold.make_manifold(args.manifold)
    out = _out_dir(args)
    if args.rho is not None:
        lat = lattice.build_lattice(M, args.rho, args.seed)
        cub = cubature.build_cubature(M, args.omega, lat)
    else:
        _, _, cub = cubature.auto_rho(M, args.omega, seed=args.seed)
        lat = cub.lattice
    A = cubature.sampling_matrix(manifold.eigen_basis(M, args.omega), lat)
    c1, c2, _, _ = cubature.plancherel_polya_bounds(A, lat.rho, M.n)
    scale = lat.rho**M.n
    write_json(os.path.join(out, "cubature.json"), cub.to_dict())
    checks = [
        Check("exactness residual", cub.residual, 1e-9 * args.tol),
        Check("min weight > 0", cub.weights.min(), 0.0, lower=True),
        Check("pp ratio c2/c1 <= 10", c2 / c1, 10.0 * args.tol),
    ]
    extra = {
        "a0": cub.a0,
        "rho": lat.rho,
        "cardinality": len(cub),
        "weights_over_rho_n": {"min": cub.weights.min() / scale, "max": cub.weights.max() / scale},
        "pp_bounds": {"c1": c1, "c2": c2},
    }
    if args.plot:
        from . import plotting

        plotting.plot_weights(cub, os.path.join(out, "cubature_weights.png"))
    return finish(make_report("cubature build", args.seed, checks, extra=extra), out, "cubature_report.json")


def _frame_checks(F: frames.NeedletFrame, seed: int, tol: float, draws: int = 10) -> list[Check]:
    M = F.manifold
    checks = [
        Check(
            "window partition deviation",
            frames.partition_deviation(F.window, np.geomspace(1e-3, 1e6, 400)),
            1e-12 * tol,
        ),
        Check("all frame weights positive", min(lv.weights.min() for lv in F.levels), 0.0, lower=True),
    ]
    rng = np.random.default_rng(seed)
    omega = F.a ** (2 * F.j_max)
    pars, recs = [], []
    with np.errstate(invalid="ignore"):
        for _ in range(draws):
            f = spectral.random_function(M, omega, rng, zero_mean=True)
            pars.append(frames.parseval_residual(F, f))
            g = frames.synthesize(F, frames.analyze(F, f))
            diff = g.coeffs[: len(f.coeffs)] - f.coeffs
            err = np.sqrt(float(diff @ diff) + float(g.coeffs[len(f.coeffs):] @ g.coeffs[len(f.coeffs):]))
            recs.append(err / f.l2_norm())
    # np.max propagates NaN, so a corrupt archive cannot masquerade as a pass
    checks.append(Check(f"parseval residual ({draws} draws)", np.max(pars), 1e-8 * tol))
    checks.append(Check(f"reconstruction error ({draws} draws)", np.max(recs), 1e-8 * tol))
    spread = 0.0
    per_level = {j: frames.localization_constants(F, j, 0, (1, 2, 3)) for j in frames.scaling_levels(F)}
    for N in (1, 2, 3):
        vals = [per_level[j][N] for j in per_level]
        spread = max(spread, max(vals) / min(vals))
    checks.append(Check("localization spread across levels", spread, 4.0 * tol))
    return checks


def cmd_frame_build(args) -> int:
    M = manifold.make_manifold(args.manifold)
    out = _out_dir(args)
    F = frames.build_frame(M, args.a, args.jmax, seed=args.seed)
    write_json(os.path.join(out, "frame.json"), F.to_dict())
    checks = _frame_checks(F, args.seed, args.tol)
    extra = {"levels": [{"j": lv.j, "rho": lv.rho, "points": len(lv)} for lv in F.levels]}
    if args.plot:
        from . import plotting

        plotting.plot_window(F.window, os.path.join(out, "frame_window.png"))
        plotting.plot_frame_points(F, os.path.join(out, "frame_levels.png"))
    return finish(make_report("frame build", args.seed, checks, extra=extra), out, "frame_report.json")


def _load_frame(path: str) -> frames.NeedletFrame:
    with open(path) as fh:
        return frames.NeedletFrame.from_dict(json.load(fh))


def cmd_frame_verify(args) -> int:
    out = _out_dir(args)
    F = _load_frame(args.archive)
    checks = _frame_checks(F, args.seed, args.tol)
    inputs = {args.archive: file_digest(args.archive)}
    return finish(make_report("frame verify", args.seed, checks, inputs=inputs), out, "frame_verify_report.json")


def _load_function(path: str) -> spectral.BandlimitedFunction:
    with open(path) as fh:
        return spectral.BandlimitedFunction.from_dict(json.load(fh))


def cmd_frame_analyze(args) -> int:
    out = _out_dir(args)
    F = _load_frame(args.archive)
    f = _load_function(args.input)
    coeffs = frames.analyze(F, f)
    path = write_csv(os.path.join(out, "coefficients.csv"), ["j", "k", "value"], coeffs.iter_rows())
    print(f"frame analyze: {sum(len(s) for s in coeffs.levels)} coefficients ({path})")
    return 0


def cmd_frame_synthesize(args) -> int:
    out = _out_dir(args)
    F = _load_frame(args.archive)
    by_level: dict[int, dict[int, float]] = {}
    with open(args.coeffs) as fh:
        for row in csv.DictReader(fh):
            by_level.setdefault(int(row["j"]), {})[int(row["k"])] = float(row["value"])
    levels = []
    for lv in F.levels:
        vals = by_level.get(lv.j, {})
        levels.append(np.array([vals.get(k, 0.0) for k in range(len(lv))]))
    g = frames.synthesize(F, frames.FrameCoefficients(F, levels))
    path = write_json(os.path.join(out, "function.json"), g.to_dict())
    print(f"frame synthesize: bandwidth {fmt_float(g.omega)} ({path})")
    return 0


def cmd_frame_localization(args) -> int:
    out = _out_dir(args)
    F = _load_frame(args.archive)
    n_list = tuple(args.n)
    per_level = {j: frames.localization_constants(F, j, args.element, n_list) for j in frames.scaling_levels(F)}
    spread = max(
        max(per_level[j][N] for j in per_level) / min(per_level[j][N] for j in per_level) for N in n_list
    )
    checks = [Check("localization spread across levels", spread, 4.0 * args.tol)]
    extra = {"constants": {str(j): per_level[j] for j in per_level}}
    if args.plot:
        from . import plotting

        plotting.plot_localization(per_level, os.path.join(out, "localization.png"))
    return finish(make_report("frame localization", args.seed, checks, extra=extra), out, "localization_report.json")


# ---------------------------------------------------------------------------
# besov families


def _decay_function(M, alpha: float, omega: float, seed: int) -> spectral.BandlimitedFunction:
    """Circle-style Fourier decay |c| = (1+k)^-(alpha+1/2) with random signs."""
    basis = manifold.eigen_basis(M, omega)
    rng = np.random.default_rng(seed)
    c = np.zeros(len(basis))
    freqs = np.sqrt(basis.eigenvalues)
    for i in range(1, len(basis)):
        c[i] = (1.0 + freqs[i]) ** (-(alpha + 0.5)) * rng.choice([-1.0, 1.0])
    return spectral.BandlimitedFunction(basis, c)


def _dilation_function(M, a: float, J: int, omega: float, seed: int) -> spectral.BandlimitedFunction:
    """Random unit-norm coefficients on the level-J band [a^{2(J-1)}, a^{2(J+1)})."""
    basis = manifold.eigen_basis(M, omega)
    rng = np.random.default_rng(seed)
    lam = basis.eigenvalues
    mask = (lam >= a ** (2 * (J - 1))) & (lam < a ** (2 * (J + 1)))
    if not np.any(mask):
        raise ValueError(f"level-{J} band holds no eigenvalues below omega={omega}")
    c = np.where(mask, rng.standard_normal(len(basis)), 0.0)
    c[0] = 0.0
    return spectral.BandlimitedFunction(basis, c / np.linalg.norm(c))


def _random_function(M, omega: float, seed: int) -> spectral.BandlimitedFunction:
    return spectral.random_function(M, omega, np.random.default_rng(seed), zero_mean=True)


def cmd_besov_compare(args) -> int:
    M = manifold.make_manifold(args.manifold)
    out = _out_dir(args)
    for q in args.q:
        if np.isinf(q):
            print(
                "q = inf refused: the approximation-norm characterization needs a finite "
                "summability exponent; use a finite q or the sequence norm alone",
                file=sys.stderr,
            )
            return 2
    F = frames.build_frame(M, args.a, args.jmax, seed=args.seed)
    omega = F.a ** (2 * F.j_max)
    rows = []
    reports = []
    checks = []
    scales = list(range(1, F.j_max + 1))
    for alpha in args.alpha:
        for q in args.q:
            params = besov.BesovParams(alpha=alpha, p=args.p, q=q, a=F.a, n=M.n)
            fams = {
                "dilation": [(J, _dilation_function(M, F.a, J, omega, args.seed + J)) for J in scales],
                "decay": [(J, _decay_function(M, alpha, F.a ** (2 * J), args.seed)) for J in scales if J >= 2],
                "random": [(J, _random_function(M, F.a ** (2 * J), args.seed + J)) for J in scales if J >= 2],
            }
            for fam, cases in fams.items():
                ratios = {"sequence/approx": [], "sequence/lp": [], "approx/lp": []}
                for scale, f in cases:
                    cmp = besov.norm_comparison(f, params, F)
                    for kind, val in (("sequence", cmp.sequence), ("approx", cmp.approx), ("lp", cmp.lp)):
                        rows.append(
                            {"family": fam, "scale": scale, "alpha": alpha, "p": args.p, "q": q,
                             "norm_kind": kind, "value": val}
                        )
                    for key in ratios:
                        ratios[key].append(cmp.ratios[key])
                spread = max(max(r) / min(r) for r in ratios.values() if min(r) > 0)
                checks.append(Check(f"{fam} ratio spread (alpha={alpha:g}, q={q:g})", spread, 10.0 * args.tol))
        f = _decay_function(M, alpha, omega, args.seed)
        est = besov.smoothness_estimate(frames.analyze(F, f), args.p)
        params = besov.BesovParams(alpha=alpha, p=args.p, q=args.q[0], a=F.a, n=M.n)
        cmp = besov.norm_comparison(f, params, F)
        reports.append(
            {
                "alpha": alpha,
                "norms": {"sequence": cmp.sequence, "approx": cmp.approx, "lp": cmp.lp},
                "ratios": cmp.ratios,
                "alpha_estimate": {"alpha": est.alpha, "stderr": est.stderr, "slope": est.slope},
            }
        )
        checks.append(Check(f"alpha estimate error (alpha={alpha:g})", abs(est.alpha - alpha), 0.25 * args.tol))
    write_csv(
        os.path.join(out, "besov_sweep.csv"),
        ["family", "scale", "alpha", "p", "q", "norm_kind", "value"],
        ([r[k] for k in ("family", "scale", "alpha", "p", "q", "norm_kind", "value")] for r in rows),
    )
    if args.plot:
        from . import plotting

        plotting.plot_besov_sweep(rows, os.path.join(out, "besov_sweep.png"))
    return finish(
        make_report("besov compare", args.seed, checks, extra={"families": reports}), out, "besov_report.json"
    )


def cmd_besov_estimate(args) -> int:
    M = manifold.make_manifold(args.manifold)
    out = _out_dir(args)
    F = frames.build_frame(M, args.a, args.jmax, seed=args.seed)
    omega = F.a ** (2 * F.j_max)
    checks, results = [], []
    for alpha in args.alpha:
        f = _decay_function(M, alpha, omega, args.seed)
        est = besov.smoothness_estimate(frames.analyze(F, f), args.p)
        results.append({"alpha": alpha, "estimate": est.alpha, "stderr": est.stderr, "slope": est.slope})
        checks.append(Check(f"estimate error (alpha={alpha:g})", abs(est.alpha - alpha), 0.25 * args.tol))
    return finish(
        make_report("besov estimate", args.seed, checks, extra={"estimates": results}), out, "besov_estimate_report.json"
    )


# ---------------------------------------------------------------------------
# parser


def _positive_float(text: str) -> float:
    val = float(text)
    if val <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return val


def _q_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return np.inf
    return _positive_float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="needlets", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", default=None, help=f"output directory (default ${ENV_OUT} or .)")
        p.add_argument("--tol", type=_positive_float, default=1.0, help="tolerance multiplier")
        p.add_argument("--plot", action="store_true", help="render PNG figures next to the data files")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p_manifold = sub.add_parser("manifold", help="manifold metadata").add_subparsers(dest="action", required=True)
    p = p_manifold.add_parser("info")
    p.add_argument("--manifold", required=True, choices=manifold.KINDS)
    p.add_argument("--omega", type=_positive_float, default=None)
    p.set_defaults(func=cmd_manifold_info)

    p_lat = sub.add_parser("lattice", help="metric lattices").add_subparsers(dest="action", required=True)
    p = p_lat.add_parser("build")
    p.add_argument("--manifold", required=True, choices=manifold.KINDS)
    p.add_argument("--rho", type=_positive_float, required=True)
    common(p)
    p.set_defaults(func=cmd_lattice_build)

    p_cub = sub.add_parser("cubature", help="exact positive-weight cubature").add_subparsers(dest="action", required=True)
    p = p_cub.add_parser("build")
    p.add_argument("--manifold", required=True, choices=manifold.KINDS)
    p.add_argument("--omega", type=_positive_float, required=True)
    p.add_argument("--rho", type=_positive_float, default=None)
    common(p)
    p.set_defaults(func=cmd_cubature_build)

    p_frame = sub.add_parser("frame", help="needlet frames").add_subparsers(dest="action", required=True)
    p = p_frame.add_parser("build")
    p.add_argument("--manifold", required=True, choices=manifold.KINDS)
    p.add_argument("--a", type=_positive_float, default=2.0)
    p.add_argument("--jmax", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_frame_build)
    p = p_frame.add_parser("verify")
    p.add_argument("--archive", required=True)
    common(p)
    p.set_defaults(func=cmd_frame_verify)
    p = p_frame.add_parser("analyze")
    p.add_argument("--archive", required=True)
    p.add_argument("--input", required=True, help="band-limited function JSON")
    common(p)
    p.set_defaults(func=cmd_frame_analyze)
    p = p_frame.add_parser("synthesize")
    p.add_argument("--archive", required=True)
    p.add_argument("--coeffs", required=True, help="coefficients CSV (j,k,value)")
    common(p)
    p.set_defaults(func=cmd_frame_synthesize)
    p = p_frame.add_parser("localization")
    p.add_argument("--archive", required=True)
    p.add_argument("--element", type=int, default=0, help="lattice index k of the probed element")
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    common(p)
    p.set_defaults(func=cmd_frame_localization)

    p_bes = sub.add_parser("besov", help="Besov quasi-norms").add_subparsers(dest="action", required=True)
    p = p_bes.add_parser("compare")
    p.add_argument("--manifold", default="circle", choices=manifold.KINDS)
    p.add_argument("--a", type=_positive_float, default=2.0)
    p.add_argument("--jmax", type=int, default=7)
    p.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--p", type=_positive_float, default=2.0)
    p.add_argument("--q", type=_q_value, nargs="+", default=[1.0, 2.0])
    common(p)
    p.set_defaults(func=cmd_besov_compare)
    p = p_bes.add_parser("estimate")
    p.add_argument("--manifold", default="circle", choices=manifold.KINDS)
    p.add_argument("--a", type=_positive_float, default=2.0)
    p.add_argument("--jmax", type=int, default=7)
    p.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    p.add_argument("--p", type=_positive_float, default=2.0)
    common(p)
    p.set_defaults(func=cmd_besov_estimate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
