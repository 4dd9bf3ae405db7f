"""Three computable Besov quasi-norms and their cross-comparison.

The frame-coefficient sequence norm, the best-approximation norm and the
Littlewood-Paley norm all characterize the same smoothness scale; the module
computes each one and reports their pairwise ratios, plus a regression-based
smoothness estimator that inverts the sequence-norm weight convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .frames import FrameCoefficients, NeedletFrame, analyze, make_window
from .spectral import BandlimitedFunction, lp_norm


@dataclass(frozen=True)
class BesovParams:
    alpha: float
    p: float
    q: float
    a: float = 2.0
    n: int = 1

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")


def _level_lp(values: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(np.abs(values).max()) if len(values) else 0.0
    return float((np.abs(values) ** p).sum() ** (1.0 / p))


def sequence_quasinorm(coeffs, params: BesovParams, j_low: int | None = None) -> float:
    """(sum_j a^{jq(alpha - n/p)} (sum_k |s^j_k|^p)^{q/p})^{1/q}.

    Accepts FrameCoefficients or a plain list of per-level arrays with an
    explicit lowest level; p or q may be infinite (sup) or below 1.
    """
    if isinstance(coeffs, FrameCoefficients):
        levels = coeffs.levels
        j_low = coeffs.j_low
    else:
        levels = list(coeffs)
        if j_low is None:
            raise ValueError("j_low is required for raw coefficient lists")
    np_over_p = 0.0 if np.isinf(params.p) else params.n / params.p
    terms = []
    for offset, s in enumerate(levels):
        j = j_low + offset
        terms.append(params.a ** (j * (params.alpha - np_over_p)) * _level_lp(np.asarray(s, dtype=float), params.p))
    terms = np.asarray(terms)
    if np.isinf(params.q):
        return float(terms.max()) if len(terms) else 0.0
    return float((terms**params.q).sum() ** (1.0 / params.q))


def best_approx_error(f: BandlimitedFunction, omega: float, p: float) -> float:
    """Distance in L_p from f to the band-limited space E_omega.

    Exact for p = 2 (coefficient tail); otherwise the spectral-truncation
    proxy ||f - Pi_omega f||_p, an upper bound on the true infimum.
    """
    if p < 1:
        raise ValueError("best approximation needs p >= 1")
    tail = f.basis.eigenvalues > omega
    if p == 2:
        return float(np.sqrt(f.coeffs[tail] @ f.coeffs[tail]))
    if not np.any(tail):
        return 0.0
    coeffs = np.where(tail, f.coeffs, 0.0)
    return lp_norm(BandlimitedFunction(f.basis, coeffs), p)


class ApproxNorm(NamedTuple):
    value: float
    tail: float       # last included term, bounds what the truncation misses
    upper_bound: bool  # True when the p != 2 truncation proxy was used


def approx_norm(f: BandlimitedFunction, params: BesovParams, J: int | None = None) -> ApproxNorm:
    """||f||_p + (sum_{j=0}^{J} (2^{alpha j} E(f, 2^{2j}, p))^q)^{1/q}.

    The dyadic base is fixed at 2; J defaults to the first level whose band
    already contains f, which makes the truncation exact for band-limited
    input.
    """
    if params.p < 1:
        raise ValueError("approx_norm needs p >= 1")
    if np.isinf(params.q):
        raise ValueError("approx_norm is not defined for q = infinity")
    if J is None:
        J = max(1, int(np.ceil(np.log2(max(f.omega, 1.0)) / 2.0)) + 1)
    terms = np.array([2.0 ** (params.alpha * j) * best_approx_error(f, 4.0**j, params.p) for j in range(J + 1)])
    value = lp_norm(f, params.p) + float((terms**params.q).sum() ** (1.0 / params.q))
    return ApproxNorm(value=value, tail=float(terms[-1]), upper_bound=params.p != 2)


_BETA_WINDOW = make_window(2.0)  # support (1/4, 16), squares telescope to 1


def beta_multiplier(nu: int, eigenvalues: np.ndarray) -> np.ndarray:
    """Littlewood-Paley band function beta_nu evaluated on eigenvalues.

    beta_nu(s) = beta_0(2^{-2 nu} s) for nu >= 0; beta_{-1} is the low-pass
    remainder sqrt(Phi), so the squares sum to 1 for every s.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if nu >= 0:
        return _BETA_WINDOW(4.0**-nu * lam)
    if nu == -1:
        return np.sqrt(np.clip(_BETA_WINDOW.phi(lam), 0.0, None))
    raise ValueError("nu must be >= -1")


def littlewood_paley_norm(f: BandlimitedFunction, params: BesovParams) -> float:
    """l^q norm of {2^{nu alpha} ||beta_nu(L) f||_p}, nu >= -1."""
    if params.p < 1:
        raise ValueError("function-space norms need p >= 1")
    lam = f.basis.eigenvalues
    nu_max = max(0, int(np.ceil(np.log2(max(f.omega, 1.0)) / 2.0)) + 1)
    terms = []
    for nu in range(-1, nu_max + 1):
        piece = beta_multiplier(nu, lam) * f.coeffs
        if not np.any(piece):
            terms.append(0.0)
            continue
        terms.append(2.0 ** (nu * params.alpha) * lp_norm(BandlimitedFunction(f.basis, piece), params.p))
    terms = np.asarray(terms)
    if np.isinf(params.q):
        return float(terms.max())
    return float((terms**params.q).sum() ** (1.0 / params.q))


@dataclass
class NormComparison:
    sequence: float
    approx: float
    lp: float
    ratios: dict

    def to_dict(self) -> dict:
        return {
            "norms": {"sequence": self.sequence, "approx": self.approx, "lp": self.lp},
            "ratios": self.ratios,
        }


def norm_comparison(f: BandlimitedFunction, params: BesovParams, frame: NeedletFrame) -> NormComparison:
    """All three quasi-norms of a zero-mean in-band function, with ratios.

    The sequence norm follows the frame-characterization convention: it is
    applied to the coefficients of the unnormalized kernels (the analysis
    output divided by sqrt of the cubature weights).
    """
    coeffs = analyze(frame, f)
    seq = sequence_quasinorm(coeffs.unweighted(), params, j_low=coeffs.j_low)
    app = approx_norm(f, params).value
    lp_val = littlewood_paley_norm(f, params)
    ratios = {}
    for name_a, va, name_b, vb in [
        ("sequence", seq, "approx", app),
        ("sequence", seq, "lp", lp_val),
        ("approx", app, "lp", lp_val),
    ]:
        ratios[f"{name_a}/{name_b}"] = va / vb if vb > 0 else np.inf
    return NormComparison(sequence=seq, approx=app, lp=lp_val, ratios=ratios)


class SmoothnessEstimate(NamedTuple):
    alpha: float
    stderr: float
    slope: float


def smoothness_estimate(coeffs, p: float, a: float | None = None, n: int | None = None,
                        j_low: int | None = None, max_levels: int = 6) -> SmoothnessEstimate:
    """Recover alpha from the level decay of the coefficient l^p norms.

    Fits log_a (sum_k |s^j_k|^p)^{1/p} against j by least squares and inverts
    the a^{j(alpha - n/p)} weight convention: alpha = n/p - slope.

    When the coefficients include the frame's lowest level, that level is
    excluded from the fit (if at least 3 others remain): it sits at the
    spectral cut-off, where the window only catches its rising edge, so its
    norm does not follow the level-decay law.  The fit then keeps only the
    deepest max_levels levels; shallow levels carry few coefficients and
    their norms are still pre-asymptotic.
    """
    if isinstance(coeffs, FrameCoefficients):
        levels = coeffs.unweighted()
        j_low = coeffs.j_low
        a = coeffs.frame.a
        n = coeffs.frame.manifold.n
        if j_low == coeffs.frame.omega_low and len(levels) >= 4:
            levels = levels[1:]
            j_low += 1
        if len(levels) > max_levels:
            j_low += len(levels) - max_levels
            levels = levels[-max_levels:]
    else:
        levels = [np.asarray(s, dtype=float) for s in coeffs]
        if a is None or n is None or j_low is None:
            raise ValueError("raw coefficient lists need explicit a, n and j_low")
    js, ys = [], []
    for offset, s in enumerate(levels):
        norm = _level_lp(s, p)
        if norm > 0:
            js.append(j_low + offset)
            ys.append(np.log(norm) / np.log(a))
    if len(js) < 3:
        raise ValueError(f"smoothness_estimate needs at least 3 nonvacuous levels, got {len(js)}")
    js = np.asarray(js, dtype=float)
    ys = np.asarray(ys)
    (slope, intercept), cov = np.polyfit(js, ys, 1, cov=True)
    np_over_p = 0.0 if np.isinf(p) else n / p
    return SmoothnessEstimate(alpha=float(np_over_p - slope), stderr=float(np.sqrt(cov[0, 0])), slope=float(slope))
