"""Exact positive-weight cubature on band-limited spaces.

The construction corrects the Voronoi-measure Riemann sum by a least-squares
term so that the rule becomes exact on E_omega while the weights stay close
to the cell measures, hence positive when rho*sqrt(omega+1) is small enough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigvalsh

from .lattice import Lattice, build_lattice, rho_cap
from .manifold import ManifoldSpec, SpectralBasis, eigen_basis
from .spectral import BandlimitedFunction, evaluate

#: condition number of A^T A beyond which the lattice is declared non-sampling
COND_LIMIT = 1e12


class NotSamplingSetError(RuntimeError):
    """The lattice does not determine band-limited functions (rank-deficient)."""


class RhoTooLargeError(RuntimeError):
    """Exact weights exist but are not all positive at this rho/omega pair."""


def sampling_matrix(basis: SpectralBasis, lat: Lattice) -> np.ndarray:
    """A[k, i] = u_i(x_k) for lattice points x_k."""
    if basis.manifold.kind != lat.manifold.kind:
        raise ValueError("basis and lattice live on different manifolds")
    return basis.matrix(lat.points)


def plancherel_polya_bounds(A: np.ndarray, rho: float, n: int):
    """Two-sided sampling constants from the extreme singular values of A.

    Returns (c1, c2, sigma_min, sigma_max) such that
    c1 * ||f(x_k)||_2 <= rho^{-n/2} ||f||_2 <= c2 * ||f(x_k)||_2
    for every f in the sampled band-limited space.
    """
    if not np.any(A):
        raise ValueError("sampling matrix is zero")
    gram_eigs = eigvalsh(A.T @ A)
    sigma_min = float(np.sqrt(max(gram_eigs[0], 0.0)))
    sigma_max = float(np.sqrt(gram_eigs[-1]))
    if sigma_min == 0.0:
        raise NotSamplingSetError("sigma_min = 0: lattice is not a sampling set (rho too large)")
    scale = rho ** (-n / 2.0)
    return scale / sigma_max, scale / sigma_min, sigma_min, sigma_max


def riemann_error(f: BandlimitedFunction, lat: Lattice) -> float:
    """|sum_k mu_k f(x_k) - integral of f| with the exact spectral integral."""
    if lat.measures is None:
        raise ValueError("lattice carries no Voronoi measures")
    samples = evaluate(f, lat.points)
    return float(abs(lat.measures @ samples - f.integral()))


@dataclass
class Cubature:
    lattice: Lattice
    omega: float
    weights: np.ndarray
    a0: float
    residual: float            # ||A^T lambda - c||_inf
    correction_norm: float     # ||lambda - w||_2

    @property
    def points(self) -> np.ndarray:
        return self.lattice.points

    def __len__(self) -> int:
        return len(self.weights)

    def to_dict(self) -> dict:
        return {
            "manifold": self.lattice.manifold.kind,
            "omega": self.omega,
            "rho": self.lattice.rho,
            "a0": self.a0,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }


def integrate(cub: Cubature, samples) -> float:
    """sum_k lambda_k * samples_k; exact on E_omega."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != cub.weights.shape:
        raise ValueError(f"sample vector length {samples.shape} != weight count {cub.weights.shape}")
    return float(cub.weights @ samples)


def build_cubature(M: ManifoldSpec, omega: float, lat: Lattice, exactness_tol: float | None = None) -> Cubature:
    """Positive weights exact on E_omega for a validated lattice.

    lambda = w + A (A^T A)^{-1} (c - A^T w) with w the Voronoi measures and
    c the exact integrals of the basis functions.
    """
    if lat.measures is None:
        raise ValueError("lattice carries no Voronoi measures")
    basis = eigen_basis(M, omega)
    A = sampling_matrix(basis, lat)
    gram = A.T @ A
    gram_eigs = eigvalsh(gram)
    if gram_eigs[0] <= 0.0 or gram_eigs[-1] / gram_eigs[0] > COND_LIMIT:
        raise NotSamplingSetError(
            f"not a sampling set: cond(A^T A) > {COND_LIMIT:.0e} at omega={omega}, rho={lat.rho}"
        )
    w = lat.measures
    c = np.zeros(len(basis))
    c[0] = np.sqrt(M.volume)
    chol = cho_factor(gram)
    weights = w + A @ cho_solve(chol, c - A.T @ w)
    residual = float(np.abs(A.T @ weights - c).max())
    if exactness_tol is None:
        exactness_tol = 1e-8 * max(1.0, np.sqrt(len(lat)))
    if residual > exactness_tol:
        raise NotSamplingSetError(f"exactness residual {residual:.3e} exceeds {exactness_tol:.3e}")
    if weights.min() <= 0.0:
        raise RhoTooLargeError(f"rho too large for omega: min weight {weights.min():.3e} <= 0")
    return Cubature(
        lattice=lat,
        omega=float(omega),
        weights=weights,
        a0=float(lat.rho * np.sqrt(omega + 1.0)),
        residual=residual,
        correction_norm=float(np.linalg.norm(weights - w)),
    )


def auto_rho(M: ManifoldSpec, omega: float, seed: int = 0, positivity_margin: float = 0.1):
    """Search downward from rho = (omega+1)^{-1/2} until the cubature succeeds.

    Success means positive weights with min >= positivity_margin * median.
    Returns (rho, a0, cubature).
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    rho_start = min((omega + 1.0) ** -0.5, 0.99 * rho_cap(M))
    rho = rho_start
    while rho >= 1e-3 * rho_start:
        try:
            lat = build_lattice(M, rho, seed)
            cub = build_cubature(M, omega, lat)
        except (NotSamplingSetError, RhoTooLargeError):
            rho *= 0.8
            continue
        if cub.weights.min() >= positivity_margin * np.median(cub.weights):
            return rho, cub.a0, cub
        rho *= 0.8
    raise RhoTooLargeError(f"auto_rho search floor reached for omega={omega} on {M.kind}")
