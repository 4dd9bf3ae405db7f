"""Metric rho-lattices and their Voronoi partitions.

A rho-lattice is a point set whose pairwise separation is at least rho/2
and whose covering radius is below rho/2.  Greedy farthest-point selection
over a dense candidate grid produces such a set by construction; the same
grid certifies the covering radius and carries the quadrature weights used
for the Voronoi cell measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .manifold import ManifoldSpec, NearestNeighbors, as_points, cross_distance, dense_grid

#: candidate/certification grid spacing as a fraction of rho (must stay < 1/8)
GRID_FRACTION = 1.0 / 8.5


class GridTooCoarseError(ValueError):
    """Oracle grid spacing is not fine enough relative to rho."""


@dataclass
class Lattice:
    manifold: ManifoldSpec
    rho: float
    points: np.ndarray
    measures: np.ndarray = field(default=None)
    seed: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold.kind,
            "rho": self.rho,
            "seed": self.seed,
            "points": self.points.tolist(),
            "measures": None if self.measures is None else self.measures.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        from .manifold import make_manifold

        M = make_manifold(data["manifold"])
        measures = data.get("measures")
        return cls(
            M,
            float(data["rho"]),
            np.asarray(data["points"], dtype=float),
            None if measures is None else np.asarray(measures, dtype=float),
            int(data["seed"]),
        )


def rho_cap(M: ManifoldSpec) -> float:
    """Largest admissible rho (injectivity-scale guard)."""
    return np.pi / 2.0 if M.kind == "sphere2" else np.pi


def candidate_grid(M: ManifoldSpec, rho: float, seed: int):
    """Jittered dense grid shared by construction, certification and measures."""
    rng = np.random.default_rng(seed)
    return dense_grid(M, GRID_FRACTION * rho, rng=rng)


def build_lattice(M: ManifoldSpec, rho: float, seed: int = 0) -> Lattice:
    """Greedy maximal rho/2-separated set on a seeded dense candidate grid.

    Points are added farthest-first until the covering radius over the grid
    drops below rho/2; the result is deterministic given (manifold, rho, seed).
    """
    if not 0.0 < rho < rho_cap(M):
        raise ValueError(f"rho must lie in (0, {rho_cap(M):.6g}) on {M.kind}, got {rho}")
    cand, _ = candidate_grid(M, rho, seed)
    rng = np.random.default_rng(seed + 1)
    start = int(rng.integers(len(cand)))

    tree = NearestNeighbors(M, cand)
    min_dist = cross_distance(M, cand[start : start + 1], cand)[0]
    chosen = [start]
    target = rho / 2.0
    while True:
        idx = int(np.argmax(min_dist))
        radius = min_dist[idx]
        if radius < target:
            break
        chosen.append(idx)
        # only candidates within the current covering radius of the new point
        # can see their nearest-center distance shrink
        near = tree.query_ball(cand[idx], radius)
        d = cross_distance(M, cand[idx : idx + 1], cand[near])[0]
        np.minimum.at(min_dist, near, d)
    points = cand[np.array(chosen)]
    lat = Lattice(M, float(rho), points, seed=seed)
    lat.measures = voronoi_measures(M, lat)
    return lat


def voronoi_measures(M: ManifoldSpec, lat: Lattice) -> np.ndarray:
    """Masses of the nearest-point cells, from the dense quadrature grid.

    Ties in the nearest-point assignment go to the lowest lattice index, so
    the measures are deterministic.
    """
    grid, wts = candidate_grid(M, lat.rho, lat.seed)
    spacing = GRID_FRACTION * lat.rho
    if spacing >= lat.rho / 8.0:
        raise GridTooCoarseError(f"grid spacing {spacing} must be below rho/8 = {lat.rho / 8.0}")
    nn = NearestNeighbors(M, lat.points)
    owner = nn.nearest_index(grid)
    measures = np.bincount(owner, weights=wts, minlength=len(lat.points))
    return measures


@dataclass
class LatticeReport:
    cardinality: int
    min_separation: float
    covering_radius: float
    multiplicity: int
    separation_ok: bool
    covering_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "cardinality": self.cardinality,
            "min_separation": self.min_separation,
            "covering_radius": self.covering_radius,
            "multiplicity": self.multiplicity,
            "separation_ok": self.separation_ok,
            "covering_ok": self.covering_ok,
            "passed": self.passed,
        }


def validate_lattice(M: ManifoldSpec, lat: Lattice) -> LatticeReport:
    """Check the separation, covering and multiplicity invariants."""
    pts = as_points(M, lat.points)
    if len(pts) == 1:
        min_sep = np.inf
    else:
        nn = NearestNeighbors(M, pts)
        d, _ = nn.query(pts, k=2)
        min_sep = float(d[:, 1].min())
    grid, _ = candidate_grid(M, lat.rho, lat.seed)
    nn_grid = NearestNeighbors(M, pts)
    dist_to_set, _ = nn_grid.query(grid, k=1)
    covering = float(np.asarray(dist_to_set).max())
    # multiplicity of the rho-ball cover: max over grid nodes of the number of
    # lattice points within rho
    k_probe = min(len(pts), 64)
    d_many, _ = nn_grid.query(grid, k=k_probe)
    d_many = np.atleast_2d(d_many)
    multiplicity = int((d_many <= lat.rho).sum(axis=1).max())
    sep_ok = bool(min_sep >= lat.rho / 2.0 - 1e-12)
    cov_ok = bool(covering <= lat.rho / 2.0 + 1e-12)
    return LatticeReport(
        cardinality=len(pts),
        min_separation=min_sep,
        covering_radius=covering,
        multiplicity=multiplicity,
        separation_ok=sep_ok,
        covering_ok=cov_ok,
        passed=sep_ok and cov_ok,
    )


def cardinality_bounds(M: ManifoldSpec, omega: float, a0: float, seed: int = 0):
    """Build the rho(omega)-lattice with rho = a0 / sqrt(omega) and report
    (count, count / omega^{n/2})."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    rho = min(a0 * omega**-0.5, 0.99 * rho_cap(M))
    lat = build_lattice(M, rho, seed)
    ratio = len(lat) / omega ** (M.n / 2.0)
    return len(lat), ratio
