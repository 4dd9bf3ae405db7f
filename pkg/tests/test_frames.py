import numpy as np
import pytest

from needlets import (
    BandlimitedFunction,
    NeedletFrame,
    analyze,
    build_frame,
    eigen_basis,
    evaluate_at,
    frame_element,
    kernel_eval,
    localization_constants,
    lowest_level,
    make_manifold,
    make_window,
    parseval_residual,
    partition_deviation,
    random_function,
    synthesize,
)
from needlets.frames import scaling_levels


@pytest.mark.parametrize("a", [1.5, 2.0, 3.0])
def test_window_partition_of_unity(a):
    w = make_window(a)
    assert partition_deviation(w, np.geomspace(1e-4, 1e8, 1000)) < 1e-12


def test_window_support():
    w = make_window(2.0)
    lo, hi = w.support
    assert w(lo * 0.99) == 0.0
    assert w(hi * 1.01) == 0.0
    assert w(1.0) > 0.0


def test_window_requires_a_above_one():
    with pytest.raises(ValueError):
        make_window(1.0)


def test_lowest_level_values():
    assert lowest_level(make_manifold("circle"), 2.0) == -1
    assert lowest_level(make_manifold("sphere2"), 2.0) == -1


def test_frame_element_matches_kernel(circle_frame):
    F = circle_frame
    j, k = 2, 3
    lv = F.level(j)
    phi = frame_element(F, j, k)
    x = np.array([0.7])
    t = F.a ** (-j)
    expected = np.sqrt(lv.weights[k]) * kernel_eval(lv.basis, F.window, t, x, lv.points[k])
    assert evaluate_at(phi, x) == pytest.approx(expected, rel=1e-12)


def test_analyze_matches_inner_products(circle_frame):
    F = circle_frame
    f = random_function(F.manifold, 16.0, np.random.default_rng(0), zero_mean=True)
    coeffs = analyze(F, f)
    for j, k in [(0, 1), (1, 4), (2, 0)]:
        phi = frame_element(F, j, k)
        m = len(f.coeffs)
        inner = float(phi.coeffs[:m] @ f.coeffs)
        assert coeffs.level(j)[k] == pytest.approx(inner, abs=1e-12)


def test_parseval_identity(circle_frame):
    F = circle_frame
    rng = np.random.default_rng(1)
    omega = F.a ** (2 * F.j_max)
    for _ in range(10):
        f = random_function(F.manifold, omega, rng, zero_mean=True)
        assert parseval_residual(F, f) < 1e-8


def test_reconstruction(circle_frame):
    F = circle_frame
    f = random_function(F.manifold, F.a ** (2 * F.j_max), np.random.default_rng(2), zero_mean=True)
    g = synthesize(F, analyze(F, f))
    m = len(f.coeffs)
    err = np.linalg.norm(g.coeffs[:m] - f.coeffs) + np.linalg.norm(g.coeffs[m:])
    assert err < 1e-8 * f.l2_norm()


def test_torus_parseval():
    M = make_manifold("torus2")
    F = build_frame(M, 2.0, 1, seed=3)
    f = random_function(M, F.a ** (2 * F.j_max), np.random.default_rng(4), zero_mean=True)
    assert parseval_residual(F, f) < 1e-8


def test_out_of_band_analysis_warns(circle_frame):
    F = circle_frame
    f = random_function(F.manifold, 4.0 * F.covered_band, np.random.default_rng(5), zero_mean=True)
    with pytest.warns(UserWarning, match="covered band"):
        analyze(F, f)


def test_parseval_needs_nonconstant(circle_frame):
    basis = eigen_basis(circle_frame.manifold, 4.0)
    c = np.zeros(len(basis))
    c[0] = 1.0
    with pytest.raises(ValueError):
        parseval_residual(circle_frame, BandlimitedFunction(basis, c))


def test_localization_constants_decrease_in_n(circle_frame):
    consts = localization_constants(circle_frame, 2, 0, (0, 1, 2, 3))
    assert all(consts[N] > 0 for N in consts)
    assert consts[0] <= consts[1] <= consts[2] <= consts[3]


def test_scaling_levels_excludes_clipped(circle_frame):
    js = scaling_levels(circle_frame)
    assert js == [1, 2, 3, 4]


def test_archive_roundtrip(circle_frame):
    F = circle_frame
    back = NeedletFrame.from_dict(F.to_dict())
    assert back.omega_low == F.omega_low
    assert back.j_max == F.j_max
    f = random_function(F.manifold, 16.0, np.random.default_rng(6), zero_mean=True)
    a = analyze(F, f)
    b = analyze(back, f)
    for sa, sb in zip(a.levels, b.levels):
        assert np.allclose(sa, sb, atol=1e-12)


def test_level_index_errors(circle_frame):
    with pytest.raises(IndexError):
        circle_frame.level(circle_frame.j_max + 1)
    with pytest.raises(IndexError):
        frame_element(circle_frame, 0, 10**6)
