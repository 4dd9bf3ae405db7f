"""Band-limited functions as coefficient vectors over the eigenbasis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifold import (
    ManifoldSpec,
    SpectralBasis,
    as_points,
    eigen_basis,
    max_degree,
    quadrature_grid,
    reference_quadrature,
)


@dataclass
class BandlimitedFunction:
    """Function in E_omega, stored as real coefficients over the canonical basis."""

    basis: SpectralBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if len(self.coeffs) != len(self.basis):
            raise ValueError(f"coefficient length {len(self.coeffs)} != basis size {len(self.basis)}")

    @property
    def manifold(self) -> ManifoldSpec:
        return self.basis.manifold

    @property
    def omega(self) -> float:
        return self.basis.omega

    def l2_norm(self) -> float:
        """Parseval: the L2 norm is the Euclidean norm of the coefficients."""
        return float(np.linalg.norm(self.coeffs))

    def mean(self) -> float:
        """Average value over the manifold (constant-mode coefficient, rescaled)."""
        return float(self.coeffs[0] / np.sqrt(self.manifold.volume))

    def integral(self) -> float:
        return float(self.coeffs[0] * np.sqrt(self.manifold.volume))

    def to_dict(self) -> dict:
        return {"manifold": self.manifold.kind, "omega": self.omega, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "BandlimitedFunction":
        from .manifold import make_manifold

        basis = eigen_basis(make_manifold(data["manifold"]), float(data["omega"]))
        return cls(basis, np.asarray(data["coeffs"], dtype=float))


def evaluate(f: BandlimitedFunction, points) -> np.ndarray:
    """Pointwise values sum_m c_m u_m(x); vectorized over points."""
    return f.basis.matrix(points) @ f.coeffs


def evaluate_at(f: BandlimitedFunction, x) -> float:
    return float(evaluate(f, as_points(f.manifold, x))[0])


def project(sample_provider, M: ManifoldSpec, omega: float) -> BandlimitedFunction:
    """Project a callable onto E_omega via the oracle quadrature.

    Exact (to rounding) when the callable is already band-limited to omega.
    """
    basis = eigen_basis(M, omega)
    pts, wts = reference_quadrature(M, omega)
    vals = np.asarray(sample_provider(pts), dtype=float)
    coeffs = basis.matrix(pts).T @ (wts * vals)
    return BandlimitedFunction(basis, coeffs)


def apply_L_power(f: BandlimitedFunction, k: int) -> BandlimitedFunction:
    """Apply the k-th power of the Laplace operator: c_m -> lambda_m^k c_m."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    if k == 0:
        return BandlimitedFunction(f.basis, f.coeffs.copy())
    return BandlimitedFunction(f.basis, f.basis.eigenvalues**k * f.coeffs)


def multiply(f: BandlimitedFunction, g: BandlimitedFunction, residual_tol: float = 1e-10):
    """Pointwise product, projected onto E_{4 d omega}.

    The product of two functions in E_omega lies in E_{4 d omega} (d = group
    dimension); the squared L2 mass the projection leaves behind is returned
    alongside and should be at rounding level.

    Returns (product, residual_mass) with residual_mass = ||fg||_2^2 - sum c^2.
    """
    if f.manifold.kind != g.manifold.kind:
        raise ValueError("operands live on different manifolds")
    M = f.manifold
    omega = max(f.omega, g.omega)
    target = 4.0 * M.d * omega
    basis = eigen_basis(M, target)
    # grid exact for (f*g) * u_m with u_m up to the target bandwidth
    degree = 2 * max_degree(M, omega) + max_degree(M, target)
    pts, wts = quadrature_grid(M, degree)
    A = basis.matrix(pts)
    nf, ng = len(f.coeffs), len(g.coeffs)
    vals = (A[:, :nf] @ f.coeffs) * (A[:, :ng] @ g.coeffs)
    coeffs = A.T @ (wts * vals)
    total_sq = float(wts @ vals**2)
    residual_mass = max(0.0, total_sq - float(coeffs @ coeffs))
    return BandlimitedFunction(basis, coeffs), residual_mass


def lp_norm(f: BandlimitedFunction, p: float) -> float:
    """L_p norm; exact for p = 2, quadrature-based otherwise.

    For p < infinity the integrand |f|^p is handled by the oracle quadrature
    (approximate for non-even p); p = infinity refines a dense grid by
    doubling until two refinements agree to 1e-6.
    """
    if p == 2:
        return f.l2_norm()
    M = f.manifold
    if np.isinf(p):
        degree = max(2 * max_degree(M, f.omega), 8)
        prev = None
        for _ in range(12):
            pts, _ = quadrature_grid(M, degree)
            cur = float(np.abs(evaluate(f, pts)).max())
            if prev is not None and abs(cur - prev) <= 1e-6 * max(1.0, cur):
                return max(cur, prev)
            prev = cur
            degree *= 2
        return prev
    if p < 1:
        raise ValueError("function-space norms need p >= 1 (or infinity)")
    # |f|^p has roughly p-fold spectral spread; pad the rule accordingly
    degree = int(np.ceil(max(2.0, p + 1) * max_degree(M, f.omega))) + 2
    pts, wts = quadrature_grid(M, degree)
    vals = np.abs(evaluate(f, pts))
    return float((wts @ vals**p) ** (1.0 / p))


def nikolski_check(f: BandlimitedFunction, p: float, q: float, k: int) -> float:
    """Ratio ||L^k f||_q / (omega^{k + n/(2p) - n/(2q)} ||f||_p).

    The exponent is in eigenvalue units (bandwidth omega bounds the
    eigenvalue); the sup-norm convention with sqrt(omega) doubles it.
    Bounded by a manifold constant uniformly over f and omega.
    """
    if q < p:
        raise ValueError("need q >= p")
    norm_f = lp_norm(f, p)
    if norm_f == 0.0:
        raise ValueError("nikolski_check needs a nonzero function")
    n = f.manifold.n
    exponent = k + n / (2.0 * p) - (0.0 if np.isinf(q) else n / (2.0 * q))
    if np.isinf(p):
        exponent = k - (0.0 if np.isinf(q) else n / (2.0 * q))
    return lp_norm(apply_L_power(f, k), q) / (f.omega**exponent * norm_f)


def random_function(M: ManifoldSpec, omega: float, rng: np.random.Generator, zero_mean: bool = False) -> BandlimitedFunction:
    """Standard-normal coefficients over E_omega; reproducible via the rng."""
    basis = eigen_basis(M, omega)
    coeffs = rng.standard_normal(len(basis))
    if zero_mean:
        coeffs[0] = 0.0
    return BandlimitedFunction(basis, coeffs)
