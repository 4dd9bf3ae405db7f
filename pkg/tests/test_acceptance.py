"""End-to-end acceptance checks, one printed verdict line per criterion.

Each test exercises one numbered claim about the construction at desk scale
and prints ``criterion NN <name>: PASS/FAIL`` with the measured quantity, so
a full run yields a twelve-line scoreboard.
"""

import time

import numpy as np
import pytest

from needlets import (
    analyze,
    apply_L_power,
    auto_rho,
    build_frame,
    eigen_basis,
    evaluate,
    localization_constants,
    make_manifold,
    make_window,
    multiply,
    norm_comparison,
    parseval_residual,
    partition_deviation,
    plancherel_polya_bounds,
    random_function,
    sampling_matrix,
    smoothness_estimate,
    synthesize,
    weyl_count,
)
from needlets.besov import BesovParams
from needlets.cli import _dilation_function, main as cli_main
from needlets.frames import scaling_levels
from tests.conftest import decay_function

SWEEP_OMEGAS = (16.0, 64.0, 256.0)
TOP_OMEGA = {"circle": 4096.0, "torus2": 256.0, "sphere2": 768.0}


@pytest.fixture
def verdict(capsys):
    def emit(num, name, passed, detail):
        with capsys.disabled():
            print(f"criterion {num:02d} {name}: {'PASS' if passed else 'FAIL'} ({detail})")
        assert passed, f"criterion {num:02d} {name}: {detail}"

    return emit


@pytest.fixture(scope="session")
def auto_sweep():
    """auto_rho results for every manifold over the omega sweep."""
    out = {}
    for kind in ("circle", "torus2", "sphere2"):
        M = make_manifold(kind)
        for omega in SWEEP_OMEGAS:
            out[kind, omega] = auto_rho(M, omega, seed=0)
    return out


def test_criterion_01_window_partition(verdict):
    start = time.perf_counter()
    worst = max(
        partition_deviation(make_window(a), np.geomspace(1e-4, 1e8, 1000)) for a in (1.5, 2.0, 3.0)
    )
    elapsed = time.perf_counter() - start
    verdict(1, "window partition of unity", worst <= 1e-12 and elapsed < 1.0,
            f"max deviation {worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_cubature_exactness(verdict):
    worst_res, worst_ratio = 0.0, 0.0
    for kind, omega in TOP_OMEGA.items():
        M = make_manifold(kind)
        rho, _, cub = auto_rho(M, omega, seed=0)
        assert cub.weights.min() > 0
        scaled = cub.weights / rho**M.n
        worst_res = max(worst_res, cub.residual)
        worst_ratio = max(worst_ratio, scaled.max() / scaled.min())
    verdict(2, "cubature exactness", worst_res <= 1e-9 and worst_ratio <= 20.0,
            f"max residual {worst_res:.2e}, weight ratio {worst_ratio:.2f}")


def test_criterion_03_a0_stability(verdict, auto_sweep):
    worst = 0.0
    for kind in ("circle", "torus2", "sphere2"):
        a0s = [auto_sweep[kind, omega][1] for omega in SWEEP_OMEGAS]
        worst = max(worst, max(a0s) / min(a0s))
    verdict(3, "a0 stability across omega", worst <= 1.5, f"max a0 spread {worst:.3f}")


def test_criterion_04_plancherel_polya(verdict, auto_sweep):
    worst_ratio, worst_slack = 0.0, 0.0
    for kind in ("circle", "torus2", "sphere2"):
        M = make_manifold(kind)
        for omega in SWEEP_OMEGAS:
            rho, _, cub = auto_sweep[kind, omega]
            A = sampling_matrix(eigen_basis(M, omega), cub.lattice)
            c1, c2, _, _ = plancherel_polya_bounds(A, rho, M.n)
            worst_ratio = max(worst_ratio, c2 / c1)
        rho, _, cub = auto_sweep[kind, 64.0]
        A = sampling_matrix(eigen_basis(M, 64.0), cub.lattice)
        c1, c2, _, _ = plancherel_polya_bounds(A, rho, M.n)
        rng = np.random.default_rng(1)
        scale = rho ** (-M.n / 2.0)
        for _ in range(100):
            f = random_function(M, 64.0, rng)
            samples = np.linalg.norm(evaluate(f, cub.lattice.points))
            mid = scale * f.l2_norm()
            worst_slack = max(worst_slack, c1 * samples - mid, mid - c2 * samples)
    verdict(4, "plancherel-polya bounds", worst_ratio <= 10.0 and worst_slack <= 1e-10,
            f"max c2/c1 {worst_ratio:.2f}, max slack {worst_slack:.2e}")


def test_criterion_05_lattice_cardinality(verdict, auto_sweep):
    worst_lat, worst_weyl = 0.0, 0.0
    for kind in ("circle", "torus2", "sphere2"):
        M = make_manifold(kind)
        lat_ratios = [len(auto_sweep[kind, w][2].lattice) / w ** (M.n / 2.0) for w in SWEEP_OMEGAS]
        weyl_ratios = [weyl_count(M, w) / w ** (M.n / 2.0) for w in SWEEP_OMEGAS]
        worst_lat = max(worst_lat, max(lat_ratios) / min(lat_ratios))
        worst_weyl = max(worst_weyl, max(weyl_ratios) / min(weyl_ratios))
    verdict(5, "cardinality tracks weyl count", worst_lat <= 4.0 and worst_weyl <= 4.0,
            f"lattice band {worst_lat:.2f}, weyl band {worst_weyl:.2f}")


def test_criterion_06_product_bandlimit(verdict):
    worst = 0.0
    for kind, omega in (("circle", 32.0), ("torus2", 16.0), ("sphere2", 12.0)):
        M = make_manifold(kind)
        rng = np.random.default_rng(2)
        for _ in range(200):
            f = random_function(M, omega, rng)
            g = random_function(M, omega, rng)
            prod, residual = multiply(f, g)
            worst = max(worst, residual / prod.l2_norm() ** 2)
    verdict(6, "product stays band-limited", worst <= 1e-10, f"max relative leak {worst:.2e}")


def _parseval_and_reconstruction(frame, draws=100, seed=3):
    rng = np.random.default_rng(seed)
    omega = frame.a ** (2 * frame.j_max)
    worst_pars, worst_rec = 0.0, 0.0
    for _ in range(draws):
        f = random_function(frame.manifold, omega, rng, zero_mean=True)
        worst_pars = max(worst_pars, parseval_residual(frame, f))
        g = synthesize(frame, analyze(frame, f))
        m = len(f.coeffs)
        err = np.sqrt(
            float((g.coeffs[:m] - f.coeffs) @ (g.coeffs[:m] - f.coeffs))
            + float(g.coeffs[m:] @ g.coeffs[m:])
        )
        worst_rec = max(worst_rec, err / f.l2_norm())
    return worst_pars, worst_rec


@pytest.fixture(scope="module")
def frame_residuals(circle_frame, sphere_frame):
    return {
        "circle": _parseval_and_reconstruction(circle_frame),
        "sphere2": _parseval_and_reconstruction(sphere_frame),
    }


def test_criterion_07_parseval(verdict, frame_residuals):
    worst = max(v[0] for v in frame_residuals.values())
    verdict(7, "parseval identity", worst <= 1e-8, f"max residual {worst:.2e} over 100 draws each")


def test_criterion_08_reconstruction(verdict, frame_residuals):
    worst = max(v[1] for v in frame_residuals.values())
    verdict(8, "reconstruction", worst <= 1e-8, f"max relative error {worst:.2e}")


def test_criterion_09_localization(verdict, circle_frame, sphere_frame):
    worst = 0.0
    for frame in (circle_frame, sphere_frame):
        per = {j: localization_constants(frame, j, 0, (1, 2, 3)) for j in scaling_levels(frame)}
        for N in (1, 2, 3):
            vals = [per[j][N] for j in per]
            worst = max(worst, max(vals) / min(vals))
    verdict(9, "kernel localization uniform in level", worst <= 4.0, f"max C_N spread {worst:.2f}")


def test_criterion_10_besov_equivalence(verdict, circle, circle_frame_deep):
    F = circle_frame_deep
    omega = F.a ** (2 * F.j_max)
    worst_spread = 0.0
    for alpha in (0.5, 1.0, 2.0):
        for q in (1.0, 2.0):
            params = BesovParams(alpha=alpha, p=2.0, q=q, a=F.a, n=1)
            families = {
                "dilation": [_dilation_function(circle, F.a, J, omega, seed=10 + J) for J in range(1, 6)],
                "decay": [decay_function(circle, alpha, F.a ** (2 * J), seed=1) for J in range(2, 7)],
            }
            for fns in families.values():
                ratios = {k: [] for k in ("sequence/approx", "sequence/lp", "approx/lp")}
                for f in fns:
                    cmp = norm_comparison(f, params, F)
                    for key in ratios:
                        ratios[key].append(cmp.ratios[key])
                worst_spread = max(worst_spread, max(max(r) / min(r) for r in ratios.values()))
    worst_err = 0.0
    for alpha in (0.5, 1.0, 1.5, 2.0):
        f = decay_function(circle, alpha, omega, seed=1)
        est = smoothness_estimate(analyze(F, f), 2.0)
        worst_err = max(worst_err, abs(est.alpha - alpha))
    verdict(10, "besov norm equivalence", worst_spread <= 10.0 and worst_err <= 0.25,
            f"max ratio spread {worst_spread:.2f}, max alpha error {worst_err:.3f}")


def test_criterion_11_bernstein(verdict):
    violations = 0
    total = 0
    for kind in ("circle", "torus2", "sphere2"):
        M = make_manifold(kind)
        rng = np.random.default_rng(4)
        for _ in range(50):
            f = random_function(M, 64.0, rng)
            for k in range(6):
                total += 1
                if apply_L_power(f, k).l2_norm() > 64.0**k * f.l2_norm():
                    violations += 1
    verdict(11, "bernstein inequality", violations == 0, f"{violations} violations in {total} checks")


def test_criterion_12_determinism(verdict, tmp_path):
    commands = [
        ["lattice", "build", "--manifold", "circle", "--rho", "0.3927", "--seed", "1"],
        ["cubature", "build", "--manifold", "torus2", "--omega", "9", "--seed", "3"],
        ["frame", "build", "--manifold", "circle", "--a", "2", "--jmax", "2", "--seed", "7"],
    ]
    dirs = (tmp_path / "one", tmp_path / "two")
    for out in dirs:
        for cmd in commands:
            assert cli_main(cmd + ["--out", str(out)]) == 0
    names = sorted(p.name for p in dirs[0].iterdir())
    identical = all((dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes() for n in names)
    verdict(12, "deterministic reports", identical, f"{len(names)} artifacts byte-compared")


@pytest.mark.extended
def test_criterion_07_extended_sphere_j2(verdict):
    M = make_manifold("sphere2")
    frame = build_frame(M, 2.0, 2, seed=7)
    worst_pars, worst_rec = _parseval_and_reconstruction(frame, draws=100, seed=5)
    verdict(7, "parseval identity (sphere j_max=2)", worst_pars <= 1e-8 and worst_rec <= 1e-8,
            f"parseval {worst_pars:.2e}, reconstruction {worst_rec:.2e}")
