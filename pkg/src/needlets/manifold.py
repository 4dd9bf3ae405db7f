"""Concrete homogeneous manifolds: circle, flat 2-torus, round 2-sphere.

Each manifold comes with a closed-form geodesic distance, the invariant
measure, and the explicit eigendata of the Laplace operator, so that the
band-limited spaces used everywhere else in the package can be built
without any numerical eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2.0 * np.pi

KINDS = ("circle", "torus2", "sphere2")

#: hard ceiling on the number of basis entries (dense solves are O(m^3))
DEFAULT_BASIS_CAP = 20_000


class BasisSizeError(RuntimeError):
    """Requested spectral bound would exceed the basis size cap."""


@dataclass(frozen=True)
class ManifoldSpec:
    """Constant data of one supported manifold.

    ``n`` is the manifold dimension, ``d`` the dimension of the transitive
    group (3 for the sphere: the three rotation generators), ``volume`` the
    total invariant measure and ``lambda1`` the smallest nonzero eigenvalue
    of the Laplace operator.
    """

    kind: str
    n: int
    d: int
    volume: float
    lambda1: float

    @property
    def coord_dim(self) -> int:
        return {"circle": 1, "torus2": 2, "sphere2": 3}[self.kind]

    @property
    def diameter(self) -> float:
        if self.kind == "circle":
            return np.pi
        if self.kind == "torus2":
            return np.pi * np.sqrt(2.0)
        return np.pi


_SPECS = {
    "circle": ManifoldSpec("circle", 1, 1, TWO_PI, 1.0),
    "torus2": ManifoldSpec("torus2", 2, 2, TWO_PI**2, 1.0),
    "sphere2": ManifoldSpec("sphere2", 2, 3, 4.0 * np.pi, 2.0),
}


def make_manifold(kind: str) -> ManifoldSpec:
    """Return the constant table for one of ``circle|torus2|sphere2``."""
    try:
        return _SPECS[kind]
    except KeyError:
        raise ValueError(f"unsupported manifold kind {kind!r}; expected one of {KINDS}")


def as_points(M: ManifoldSpec, x) -> np.ndarray:
    """Coerce to an (N, coord_dim) float array of points on M."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1 and M.coord_dim == 1:
        pts = pts[:, None]
    pts = np.atleast_2d(pts)
    if pts.shape[1] != M.coord_dim:
        raise ValueError(f"points on {M.kind} need {M.coord_dim} coordinates, got shape {pts.shape}")
    if M.kind == "sphere2":
        norms = np.linalg.norm(pts, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-12):
            raise ValueError("sphere2 points must be unit 3-vectors (|x| = 1 within 1e-12)")
    return pts


def _wrap(angles: np.ndarray) -> np.ndarray:
    return np.mod(angles, TWO_PI)


def geodesic_distance(M: ManifoldSpec, x, y) -> float:
    """Geodesic distance between two points."""
    return float(cross_distance(M, x, y)[0, 0])


def cross_distance(M: ManifoldSpec, X, Y) -> np.ndarray:
    """All pairwise geodesic distances, shape (len(X), len(Y))."""
    X = as_points(M, X)
    Y = as_points(M, Y)
    if M.kind == "sphere2":
        dots = np.clip(X @ Y.T, -1.0, 1.0)
        return np.arccos(dots)
    diff = np.abs(_wrap(X)[:, None, :] - _wrap(Y)[None, :, :])
    diff = np.minimum(diff, TWO_PI - diff)
    if M.kind == "circle":
        return diff[:, :, 0]
    return np.sqrt((diff**2).sum(axis=2))


class NearestNeighbors:
    """Exact geodesic nearest-neighbor queries against a fixed point set.

    Flat manifolds use a periodic KD-tree (Euclidean distance in the box is
    the geodesic distance); the sphere uses chordal distance, which is a
    monotone function of the geodesic one.
    """

    def __init__(self, M: ManifoldSpec, points):
        self.M = M
        self.points = as_points(M, points)
        if M.kind == "sphere2":
            self._tree = cKDTree(self.points)
        else:
            eps = 1e-12  # keep wrapped coords strictly inside the box
            self._tree = cKDTree(np.clip(_wrap(self.points), 0.0, TWO_PI - eps), boxsize=TWO_PI)

    def _to_geodesic(self, d: np.ndarray) -> np.ndarray:
        if self.M.kind == "sphere2":
            return 2.0 * np.arcsin(np.clip(d / 2.0, -1.0, 1.0))
        return d

    def _ball_radius(self, r: float) -> float:
        if self.M.kind == "sphere2":
            return 2.0 * np.sin(min(r, np.pi) / 2.0) + 1e-12
        return r

    def query(self, X, k: int = 1):
        """Geodesic distances and indices of the k nearest reference points."""
        X = as_points(self.M, X)
        if self.M.kind != "sphere2":
            X = np.clip(_wrap(X), 0.0, TWO_PI - 1e-12)
        d, idx = self._tree.query(X, k=k)
        return self._to_geodesic(np.asarray(d)), np.asarray(idx)

    def nearest_index(self, X, tie_tol: float = 1e-12) -> np.ndarray:
        """Index of nearest reference point; exact ties go to the lowest index."""
        if len(self.points) == 1:
            return np.zeros(len(as_points(self.M, X)), dtype=int)
        d, idx = self.query(X, k=2)
        out = idx[:, 0].copy()
        tied = d[:, 1] - d[:, 0] <= tie_tol
        out[tied] = np.minimum(idx[tied, 0], idx[tied, 1])
        return out

    def query_ball(self, x, r: float) -> np.ndarray:
        """Indices of reference points within geodesic distance r of x."""
        x = as_points(self.M, x)[0]
        if self.M.kind != "sphere2":
            x = np.clip(_wrap(x), 0.0, TWO_PI - 1e-12)
        return np.asarray(self._tree.query_ball_point(x, self._ball_radius(r)), dtype=int)


# ---------------------------------------------------------------------------
# Spectral basis


def _circle_labels(omega: float):
    labels = [("const", 0)]
    eigs = [0.0]
    k = 1
    while k * k <= omega:
        labels.append(("cos", k))
        eigs.append(float(k * k))
        labels.append(("sin", k))
        eigs.append(float(k * k))
        k += 1
    return labels, eigs


_FACTOR_ORDER = {"const": 0, "cos": 1, "sin": 2}


def _torus_labels(omega: float):
    kmax = int(np.floor(np.sqrt(max(omega, 0.0))))

    def factors(k):
        if k == 0:
            return [("const", 0)]
        return [("cos", k), ("sin", k)]

    entries = []
    for kx in range(kmax + 1):
        for ky in range(kmax + 1):
            lam = float(kx * kx + ky * ky)
            if lam > omega:
                continue
            for fx in factors(kx):
                for fy in factors(ky):
                    entries.append((lam, kx, ky, _FACTOR_ORDER[fx[0]], _FACTOR_ORDER[fy[0]], (fx, fy)))
    entries.sort(key=lambda e: e[:5])
    labels = [e[5] for e in entries]
    eigs = [e[0] for e in entries]
    return labels, eigs


def _sphere_lmax(omega: float) -> int:
    if omega < 0:
        return -1
    return int(np.floor((-1.0 + np.sqrt(1.0 + 4.0 * omega)) / 2.0 + 1e-12))


def _sphere_labels(omega: float):
    lmax = _sphere_lmax(omega)
    labels = []
    eigs = []
    for ell in range(lmax + 1):
        for m in range(-ell, ell + 1):
            labels.append((ell, m))
            eigs.append(float(ell * (ell + 1)))
    return labels, eigs


@dataclass
class SpectralBasis:
    """Ordered real orthonormal eigenbasis of the Laplace operator up to bandwidth omega.

    The enumeration is canonical: sorted by eigenvalue with a deterministic
    secondary key, so the basis for a smaller bandwidth is always a prefix of
    the one for a larger bandwidth.
    """

    manifold: ManifoldSpec
    omega: float
    eigenvalues: np.ndarray
    labels: list = field(repr=False)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def matrix(self, points) -> np.ndarray:
        """Evaluate every basis function at every point: shape (npoints, nbasis)."""
        pts = as_points(self.manifold, points)
        kind = self.manifold.kind
        if kind == "circle":
            return self._circle_matrix(pts[:, 0])
        if kind == "torus2":
            return self._torus_matrix(pts)
        return self._sphere_matrix(pts)

    def evaluate(self, m: int, x) -> float:
        if not 0 <= m < len(self):
            raise IndexError(f"basis index {m} out of range [0, {len(self)})")
        return float(self.matrix(x)[0, m])

    # per-manifold evaluators -------------------------------------------------

    def _circle_matrix(self, theta: np.ndarray) -> np.ndarray:
        out = np.empty((len(theta), len(self)))
        inv_sqrt_pi = 1.0 / np.sqrt(np.pi)
        for i, (tag, k) in enumerate(self.labels):
            if tag == "const":
                out[:, i] = 1.0 / np.sqrt(TWO_PI)
            elif tag == "cos":
                out[:, i] = np.cos(k * theta) * inv_sqrt_pi
            else:
                out[:, i] = np.sin(k * theta) * inv_sqrt_pi
        return out

    def _torus_matrix(self, pts: np.ndarray) -> np.ndarray:
        def factor(tag, k, coord):
            if tag == "const":
                return np.full(len(pts), 1.0 / np.sqrt(TWO_PI))
            if tag == "cos":
                return np.cos(k * coord) / np.sqrt(np.pi)
            return np.sin(k * coord) / np.sqrt(np.pi)

        cache: dict = {}
        out = np.empty((len(pts), len(self)))
        for i, (fx, fy) in enumerate(self.labels):
            for axis, f in ((0, fx), (1, fy)):
                key = (axis,) + f
                if key not in cache:
                    cache[key] = factor(f[0], f[1], pts[:, axis])
            out[:, i] = cache[(0,) + fx] * cache[(1,) + fy]
        return out

    def _sphere_matrix(self, pts: np.ndarray) -> np.ndarray:
        lmax = self.labels[-1][0] if self.labels else -1
        ct = np.clip(pts[:, 2], -1.0, 1.0)
        st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        npts = len(pts)
        out = np.empty((npts, (lmax + 1) ** 2))

        def col(ell, m_signed):
            return ell * ell + (m_signed + ell)

        # fully normalized associated Legendre values via stable recurrence;
        # pmm carries P^m_m as m increases, p_prev/p_curr roll up in l
        pmm = np.full(npts, np.sqrt(1.0 / (4.0 * np.pi)))
        for m in range(lmax + 1):
            if m > 0:
                pmm = pmm * st * np.sqrt((2.0 * m + 1.0) / (2.0 * m))
            if m == 0:
                cos_m = np.ones(npts)
                sin_m = np.zeros(npts)
            else:
                cos_m = np.cos(m * phi)
                sin_m = np.sin(m * phi)

            def write(ell, plm):
                if m == 0:
                    out[:, col(ell, 0)] = plm
                else:
                    root2 = np.sqrt(2.0)
                    out[:, col(ell, m)] = root2 * plm * cos_m
                    out[:, col(ell, -m)] = root2 * plm * sin_m

            p_prev = pmm
            write(m, p_prev)
            if m == lmax:
                break
            p_curr = np.sqrt(2.0 * m + 3.0) * ct * pmm
            write(m + 1, p_curr)
            for ell in range(m + 2, lmax + 1):
                a_lm = np.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
                b_lm = np.sqrt(
                    (2.0 * ell + 1.0)
                    * (ell - 1.0 + m)
                    * (ell - 1.0 - m)
                    / ((2.0 * ell - 3.0) * (ell * ell - m * m))
                )
                p_next = a_lm * ct * p_curr - b_lm * p_prev
                write(ell, p_next)
                p_prev, p_curr = p_curr, p_next
        return out[:, : len(self)]


def eigen_basis(M: ManifoldSpec, omega: float, max_size: int = DEFAULT_BASIS_CAP) -> SpectralBasis:
    """All eigenfunctions with eigenvalue <= omega, in canonical order."""
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    count = weyl_count(M, omega)
    if count > max_size:
        raise BasisSizeError(f"basis for omega={omega} on {M.kind} has {count} entries (cap {max_size})")
    if M.kind == "circle":
        labels, eigs = _circle_labels(omega)
    elif M.kind == "torus2":
        labels, eigs = _torus_labels(omega)
    else:
        labels, eigs = _sphere_labels(omega)
    return SpectralBasis(M, float(omega), np.asarray(eigs), labels)


def weyl_count(M: ManifoldSpec, omega: float) -> int:
    """Exact dimension of the band-limited space at bandwidth omega."""
    if omega < 0:
        return 0
    if M.kind == "circle":
        return 1 + 2 * int(np.floor(np.sqrt(omega)))
    if M.kind == "sphere2":
        return (_sphere_lmax(omega) + 1) ** 2
    kmax = int(np.floor(np.sqrt(omega)))
    total = 0
    for kx in range(-kmax, kmax + 1):
        rem = omega - kx * kx
        if rem < 0:
            continue
        total += 2 * int(np.floor(np.sqrt(rem))) + 1
    return total


# ---------------------------------------------------------------------------
# Quadrature grids


def max_degree(M: ManifoldSpec, omega: float) -> int:
    """Top frequency (circle/torus) or harmonic degree (sphere) present in E_omega."""
    if M.kind == "sphere2":
        return max(_sphere_lmax(omega), 0)
    return int(np.floor(np.sqrt(max(omega, 0.0))))


def quadrature_grid(M: ManifoldSpec, degree: int, rng: np.random.Generator | None = None):
    """Positive-weight rule exact on all eigenfunctions of degree <= ``degree``.

    An optional rng jitters the rule (rotation / phase shift), which preserves
    exactness on the invariant spectral spaces.
    Returns (points, weights) with weights summing to the volume.
    """
    degree = max(int(degree), 0)
    if M.kind == "circle":
        nn = max(8, degree + 2)
        offset = rng.uniform(0.0, TWO_PI / nn) if rng is not None else 0.0
        pts = (offset + TWO_PI * np.arange(nn) / nn)[:, None]
        wts = np.full(nn, TWO_PI / nn)
        return pts, wts
    if M.kind == "torus2":
        nn = max(8, degree + 2)
        off = rng.uniform(0.0, TWO_PI / nn, size=2) if rng is not None else np.zeros(2)
        axis = TWO_PI * np.arange(nn) / nn
        gx, gy = np.meshgrid(off[0] + axis, off[1] + axis, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        wts = np.full(nn * nn, (TWO_PI / nn) ** 2)
        return pts, wts
    # sphere2: Gauss-Legendre in colatitude x equispaced longitude
    ntheta = max(4, (degree + 1) // 2 + 1)
    nphi = max(8, degree + 2)
    nodes, gl_wts = np.polynomial.legendre.leggauss(ntheta)
    phi = TWO_PI * np.arange(nphi) / nphi
    ct = np.repeat(nodes, nphi)
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    pp = np.tile(phi, ntheta)
    pts = np.column_stack([st * np.cos(pp), st * np.sin(pp), ct])
    wts = np.repeat(gl_wts, nphi) * (TWO_PI / nphi)
    if rng is not None:
        from scipy.spatial.transform import Rotation

        pts = pts @ Rotation.random(random_state=int(rng.integers(2**31))).as_matrix().T
    return pts, wts


def reference_quadrature(M: ManifoldSpec, omega: float, max_size: int = 4_000_000):
    """Oracle rule exact (to rounding) on products of pairs from E_omega."""
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    degree = 2 * max_degree(M, omega)
    pts, wts = quadrature_grid(M, degree)
    if len(wts) > max_size:
        raise BasisSizeError(f"reference quadrature for omega={omega} needs {len(wts)} nodes (cap {max_size})")
    return pts, wts


def dense_grid(M: ManifoldSpec, h: float, rng: np.random.Generator | None = None, max_size: int = 12_000_000):
    """Quadrature grid whose mesh norm (max spacing) is below h.

    Doubles as the candidate pool for lattice construction and the node set
    for Voronoi cell measures, so it carries valid quadrature weights.
    """
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    degree = int(np.ceil(TWO_PI / h)) + 2
    pts, wts = quadrature_grid(M, degree, rng=rng)
    if len(wts) > max_size:
        raise BasisSizeError(f"dense grid at spacing {h} needs {len(wts)} nodes (cap {max_size})")
    return pts, wts
