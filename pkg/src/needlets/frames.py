"""Band-limited localized Parseval frames.

A smooth window partitions the spectrum into dyadic-like bands; each band is
discretized by an exact positive-weight cubature, and the resulting kernels
sampled at the cubature points form a Parseval frame for the zero-mean part
of L2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .cubature import Cubature, auto_rho
from .manifold import ManifoldSpec, SpectralBasis, as_points, dense_grid, eigen_basis
from .spectral import BandlimitedFunction


@dataclass(frozen=True)
class WindowFunction:
    """Square-root partition window f(t) = sqrt(Phi(t/a^2) - Phi(t)).

    Phi is a C-infinity nonincreasing step, identically 1 on [0, a^-2] and 0
    on [a^2, inf), built from the exp(-1/u) smooth step in log_a coordinates.
    The dilates f(a^{-2j} s)^2 telescope to 1 for every s > 0, and the support
    of f is contained in [a^-2, a^4].
    """

    a: float

    def phi(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        lo, hi = self.a**-2.0, self.a**2.0
        out[t <= lo] = 1.0
        mid = (t > lo) & (t < hi)
        if np.any(mid):
            u = (np.log(t[mid]) / np.log(self.a) + 2.0) / 4.0
            out[mid] = _smooth_step(1.0 - u)
        return out

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        val = self.phi(t / self.a**2) - self.phi(t)
        return np.sqrt(np.clip(val, 0.0, None))

    @property
    def support(self) -> tuple[float, float]:
        return self.a**-2.0, self.a**4.0


def _smooth_step(u) -> np.ndarray:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, g(u)/(g(u)+g(1-u)) between."""
    u = np.asarray(u, dtype=float)

    def g(v):
        out = np.zeros(v.shape)
        pos = v > 0
        out[pos] = np.exp(-1.0 / v[pos])
        return out

    gu = g(u)
    g1u = g(1.0 - u)
    with np.errstate(invalid="ignore"):
        out = np.where(gu + g1u > 0, gu / (gu + g1u), 0.0)
    out[u >= 1.0] = 1.0
    out[u <= 0.0] = 0.0
    return out


def make_window(a: float) -> WindowFunction:
    if a <= 1.0:
        raise ValueError(f"dilation base must exceed 1, got {a}")
    return WindowFunction(float(a))


def partition_deviation(w: WindowFunction, s_values) -> float:
    """Max deviation of sum_j f(a^{-2j} s)^2 from 1 over the given s > 0."""
    s_values = np.asarray(s_values, dtype=float)
    lo, hi = w.support
    dev = 0.0
    for s in s_values:
        jmin = int(np.floor(np.log(s / hi) / (2.0 * np.log(w.a)))) - 1
        jmax = int(np.ceil(np.log(s / lo) / (2.0 * np.log(w.a)))) + 1
        js = np.arange(jmin, jmax + 1)
        total = float((w(w.a ** (-2.0 * js) * s) ** 2).sum())
        dev = max(dev, abs(total - 1.0))
    return dev


def kernel_eval(basis: SpectralBasis, w: WindowFunction, t: float, x, y) -> float:
    """K_t(x, y) = sum_m f(t^2 lambda_m) u_m(x) u_m(y)."""
    needed = w.support[1] / t**2
    if basis.omega < needed * (1.0 - 1e-12):
        raise ValueError(f"basis bandwidth {basis.omega} < a^4/t^2 = {needed}: kernel would be truncated")
    mult = w(t**2 * basis.eigenvalues)
    ux = basis.matrix(as_points(basis.manifold, x))[0]
    uy = basis.matrix(as_points(basis.manifold, y))[0]
    return float((mult * ux * uy).sum())


@dataclass
class FrameLevel:
    """One spectral band of the frame, with its cubature discretization."""

    j: int
    band_top: float            # analysis band a^{2j+4}: window support at this level
    cubature_bandwidth: float  # 4 d a^{2j+4}: exactness needed for |f_j F|^2
    rho: float
    a0: float
    points: np.ndarray
    weights: np.ndarray        # b^j_k
    basis: SpectralBasis       # E_{band_top}
    samples: np.ndarray = field(repr=False)  # u_m(x^j_k), shape (N_j, len(basis))

    def __len__(self) -> int:
        return len(self.weights)


@dataclass
class NeedletFrame:
    manifold: ManifoldSpec
    window: WindowFunction
    omega_low: int             # lowest nonvacuous level Omega
    j_max: int
    levels: list[FrameLevel]

    @property
    def a(self) -> float:
        return self.window.a

    @property
    def covered_band(self) -> float:
        return self.a ** (2 * self.j_max + 4)

    def level(self, j: int) -> FrameLevel:
        if not self.omega_low <= j <= self.j_max:
            raise IndexError(f"level {j} outside [{self.omega_low}, {self.j_max}]")
        return self.levels[j - self.omega_low]

    def multiplier(self, j: int, eigenvalues: np.ndarray) -> np.ndarray:
        return self.window(self.a ** (-2.0 * j) * eigenvalues)

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold.kind,
            "a": self.a,
            "a0": self.levels[-1].a0,
            "omega_low": self.omega_low,
            "levels": [
                {
                    "j": lv.j,
                    "rho": lv.rho,
                    "bandwidth": lv.cubature_bandwidth,
                    "points": lv.points.tolist(),
                    "weights": lv.weights.tolist(),
                }
                for lv in self.levels
            ],
            "window": {"a": self.a, "transition": "exp-step"},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NeedletFrame":
        from .manifold import make_manifold

        M = make_manifold(data["manifold"])
        w = make_window(float(data["a"]))
        levels = []
        for lv in data["levels"]:
            j = int(lv["j"])
            band_top = w.a ** (2 * j + 4)
            basis = eigen_basis(M, band_top)
            points = np.asarray(lv["points"], dtype=float)
            rho = float(lv["rho"])
            levels.append(
                FrameLevel(
                    j=j,
                    band_top=band_top,
                    cubature_bandwidth=float(lv["bandwidth"]),
                    rho=rho,
                    a0=rho * np.sqrt(float(lv["bandwidth"]) + 1.0),
                    points=points,
                    weights=np.asarray(lv["weights"], dtype=float),
                    basis=basis,
                    samples=basis.matrix(points),
                )
            )
        omega_low = levels[0].j
        return cls(M, w, omega_low, levels[-1].j, levels)


def lowest_level(M: ManifoldSpec, a: float) -> int:
    """Largest j with an empty band below it: floor(log_a(lambda_1)/2 - 1)."""
    return int(np.floor(np.log(M.lambda1) / np.log(a) / 2.0 - 1.0))


def build_frame(M: ManifoldSpec, a: float, j_max: int, seed: int = 0) -> NeedletFrame:
    """Construct the frame up to level j_max.

    Each level's lattice radius comes from the cubature search at bandwidth
    4 d a^{2j+4}, which guarantees the per-level quadrature identity used by
    the Parseval property.
    """
    w = make_window(a)
    omega_low = lowest_level(M, a)
    if j_max < omega_low:
        raise ValueError(f"j_max {j_max} below lowest nonvacuous level {omega_low}")
    levels = []
    for j in range(omega_low, j_max + 1):
        band_top = a ** (2 * j + 4)
        cub_bw = 4.0 * M.d * band_top
        rho, a0, cub = auto_rho(M, cub_bw, seed=seed + (j - omega_low))
        basis = eigen_basis(M, band_top)
        levels.append(
            FrameLevel(
                j=j,
                band_top=band_top,
                cubature_bandwidth=cub_bw,
                rho=rho,
                a0=a0,
                points=cub.points,
                weights=cub.weights,
                basis=basis,
                samples=basis.matrix(cub.points),
            )
        )
    return NeedletFrame(M, w, omega_low, j_max, levels)


@dataclass
class FrameCoefficients:
    """Analysis coefficients s[j][k] = <F, phi^j_k>, level-indexed."""

    frame: NeedletFrame
    levels: list[np.ndarray]
    truncated: bool = False

    @property
    def j_low(self) -> int:
        return self.frame.omega_low

    def level(self, j: int) -> np.ndarray:
        return self.levels[j - self.j_low]

    def total_energy(self) -> float:
        return float(sum(float(s @ s) for s in self.levels))

    def unweighted(self) -> list[np.ndarray]:
        """Coefficients of the unnormalized kernels: s^j_k / sqrt(b^j_k)."""
        return [s / np.sqrt(lv.weights) for s, lv in zip(self.levels, self.frame.levels)]

    def iter_rows(self):
        for lv, s in zip(self.frame.levels, self.levels):
            for k, val in enumerate(s):
                yield lv.j, k, float(val)


def frame_element(F: NeedletFrame, j: int, k: int) -> BandlimitedFunction:
    """phi^j_k as a coefficient vector: sqrt(b) f(a^{-2j} lambda_m) u_m(x^j_k)."""
    lv = F.level(j)
    if not 0 <= k < len(lv):
        raise IndexError(f"element index {k} out of range [0, {len(lv)}) at level {j}")
    mult = F.multiplier(j, lv.basis.eigenvalues)
    coeffs = np.sqrt(lv.weights[k]) * mult * lv.samples[k]
    return BandlimitedFunction(lv.basis, coeffs)


def analyze(F: NeedletFrame, f: BandlimitedFunction) -> FrameCoefficients:
    """Frame coefficients via the multiplier-then-sample identity.

    s^j_k = sqrt(b^j_k) * [f_window(a^{-2j} L) f](x^j_k), equal to the inner
    product <f, phi^j_k>.
    """
    if f.manifold.kind != F.manifold.kind:
        raise ValueError("function and frame live on different manifolds")
    truncated = f.omega > F.covered_band
    if truncated:
        warnings.warn(
            f"input bandwidth {f.omega} exceeds the frame's covered band {F.covered_band}; "
            "coefficients above the top level are dropped",
            stacklevel=2,
        )
    out = []
    for lv in F.levels:
        m = min(len(f.coeffs), lv.samples.shape[1])
        mult = F.multiplier(lv.j, f.basis.eigenvalues[:m])
        filtered = mult * f.coeffs[:m]
        out.append(np.sqrt(lv.weights) * (lv.samples[:, :m] @ filtered))
    return FrameCoefficients(F, out, truncated=truncated)


def synthesize(F: NeedletFrame, coeffs: FrameCoefficients) -> BandlimitedFunction:
    """sum_{j,k} s^j_k phi^j_k over the union band E_{a^{2 j_max + 4}}."""
    if coeffs.frame is not F and [len(s) for s in coeffs.levels] != [len(lv) for lv in F.levels]:
        raise ValueError("coefficient shapes do not match the frame")
    top = F.levels[-1].basis
    out = np.zeros(len(top))
    for lv, s in zip(F.levels, coeffs.levels):
        if len(s) != len(lv):
            raise ValueError(f"level {lv.j}: expected {len(lv)} coefficients, got {len(s)}")
        m = lv.samples.shape[1]
        mult = F.multiplier(lv.j, lv.basis.eigenvalues)
        out[:m] += mult * (lv.samples.T @ (np.sqrt(lv.weights) * s))
    return BandlimitedFunction(top, out)


def parseval_residual(F: NeedletFrame, f: BandlimitedFunction) -> float:
    """| sum |s|^2 - ||f - mean||^2 | / ||f - mean||^2."""
    target = float(f.coeffs[1:] @ f.coeffs[1:])
    if target == 0.0:
        raise ValueError("parseval_residual needs a function with nonzero zero-mean part")
    energy = analyze(F, f).total_energy()
    return abs(energy - target) / target


def scaling_levels(F: NeedletFrame) -> list[int]:
    """Levels whose spectral band is fully populated: a^{2j-2} >= lambda_1.

    Below that threshold part of the window's support holds no spectrum, so
    the kernel is clipped and its localization constants do not follow the
    scale-uniform regime.  Falls back to all levels when fewer than two
    qualify (shallow frames).
    """
    js = [lv.j for lv in F.levels if F.a ** (2 * lv.j - 2) >= F.manifold.lambda1]
    if len(js) < 2:
        js = [lv.j for lv in F.levels]
    return js


def localization_constants(F: NeedletFrame, j: int, k: int, n_list, grid_spacing: float | None = None) -> dict:
    """Fitted constants C_N = max_y t^n |K_t(x^j_k, y)| (1 + d(x,y)/t)^N, t = a^{-j}.

    Finite for every N because the kernel decays faster than any polynomial
    away from the diagonal; comparing the fit across levels probes the
    t-uniformity of the bound.
    """
    from .manifold import cross_distance

    lv = F.level(j)
    if not 0 <= k < len(lv):
        raise IndexError(f"element index {k} out of range at level {j}")
    t = F.a ** (-float(j))
    if grid_spacing is None:
        grid_spacing = max(t / 8.0, F.manifold.diameter / 400.0)
    grid, _ = dense_grid(F.manifold, grid_spacing)
    mult = F.multiplier(j, lv.basis.eigenvalues)
    kvals = lv.basis.matrix(grid) @ (mult * lv.samples[k])
    dist = cross_distance(F.manifold, lv.points[k : k + 1], grid)[0]
    scaled = t**F.manifold.n * np.abs(kvals)
    return {int(N): float((scaled * (1.0 + dist / t) ** N).max()) for N in n_list}
