"""Hyperbolic p-sums of h-convex domains, 1/2 <= p <= 2.

On support functions the sum is phi_out^p = a phi_K^p + b phi_L^p with
a + b >= 1.  The pointwise picture combines two-point balls B(p, t):
their union over t in [0, 1] for p > 1, a single ball for p = 1, and
their intersection over the open interval for p < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lorentz
from .hconvex import SupportField, boundary_data, convexity, support_of_point
from .sphere_grid import Grid

__all__ = [
    "TwoPointBall",
    "DilatesReport",
    "p_sum",
    "p_dilate",
    "two_point_ball",
    "two_point_sum",
    "compatibility_check",
    "dilates_check",
    "COEFF_SLACK",
    "DILATE_TOL",
]

COEFF_SLACK = 1e-12
DILATE_TOL = 1e-8


@dataclass
class TwoPointBall:
    """Geodesic ball from the two-point construction.

    radius may be +inf (the whole space, imposing no constraint on an
    intersection); empty means the construction yields no ball (R < 1).
    """

    center: np.ndarray | None
    radius: float
    empty: bool


@dataclass
class DilatesReport:
    is_dilate: bool
    ratio_variation: float


def _check_p(p: float) -> None:
    if not (0.5 <= p <= 2.0):
        raise ValueError(f"p must lie in [1/2, 2], got {p}")


def _check_coeffs(a: float, b: float) -> None:
    if a < 0.0 or b < 0.0:
        raise ValueError(f"coefficients must be nonnegative, got a={a}, b={b}")
    if a + b < 1.0 - COEFF_SLACK:
        raise ValueError(f"coefficient sum a+b must be at least 1, got {a + b}")


def p_sum(a: float, K: SupportField, p: float, b: float, L: SupportField) -> SupportField:
    """Support field of a*K +_p b*L on the common grid."""
    _check_p(p)
    _check_coeffs(a, b)
    if K.grid != L.grid:
        raise ValueError("p_sum requires both fields on the same grid")
    phi = (a * K.phi**p + b * L.phi**p) ** (1.0 / p)
    out = SupportField(K.grid, phi)
    report = convexity(out)
    if report.classification == "not-h-convex":
        raise ValueError(
            f"p-sum output failed the convexity check: min eig A = {report.min_eigenvalue}"
        )
    return out


def p_dilate(a: float, p: float, K: SupportField) -> SupportField:
    """p-dilation a . K: phi -> a^{1/p} phi, an outer parallel set at
    distance log(a)/p.  Requires a >= 1 and p > 0."""
    if a < 1.0:
        raise ValueError(f"p-dilation needs a >= 1, got {a}")
    if p <= 0.0:
        raise ValueError(f"p-dilation needs p > 0, got {p}")
    return SupportField(K.grid, a ** (1.0 / p) * K.phi)


def _pow(t: float, e: float) -> float:
    """t**e with the convention 0**negative = +inf (p < 1 endpoints)."""
    if t == 0.0 and e < 0.0:
        return math.inf
    return t**e


def two_point_ball(p: float, t: float, a: float, X, b: float, Y) -> TwoPointBall:
    """Ball B(p, t; a, X, b, Y) of the two-point construction.

    T = (1-t)^{1/q} a^{1/p} X + t^{1/q} b^{1/p} Y with 1/p + 1/q = 1;
    the ball has center T/N(T) and radius log N(T), empty when N(T) < 1.
    """
    _check_p(p)
    _check_coeffs(a, b)
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must lie in [0, 1], got {t}")
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    lorentz.validate_hpoint(X)
    lorentz.validate_hpoint(Y)
    if p == 1.0:
        ca, cb = a, b
    else:
        inv_q = (p - 1.0) / p
        ca = 0.0 if a == 0.0 else _pow(1.0 - t, inv_q) * a ** (1.0 / p)
        cb = 0.0 if b == 0.0 else _pow(t, inv_q) * b ** (1.0 / p)
    if math.isinf(ca) or math.isinf(cb):
        # Degenerate endpoint of the p < 1 family: the whole space.
        center = X if math.isinf(ca) else Y
        return TwoPointBall(center.copy(), math.inf, False)
    if ca == 0.0 and cb == 0.0:
        return TwoPointBall(None, -math.inf, True)
    coshd = -lorentz.inner(X, Y)
    R_sq = ca * ca + cb * cb + 2.0 * ca * cb * coshd
    R = math.sqrt(R_sq)
    T = ca * X + cb * Y
    return TwoPointBall(T / R, math.log(R), R < 1.0)


def two_point_sum(grid: Grid, p: float, a: float, X, b: float, Y) -> SupportField:
    """Support field of the p-sum of two points a*{X} +_p b*{Y}."""
    _check_p(p)
    _check_coeffs(a, b)
    fX = support_of_point(grid, X)
    fY = support_of_point(grid, Y)
    phi = (a * fX.phi**p + b * fY.phi**p) ** (1.0 / p)
    return SupportField(grid, phi)


def _refine_extremum(vals: np.ndarray, j: int, minimize: bool) -> float:
    """Parabolic vertex through three samples around index j."""
    if j == 0 or j == vals.shape[0] - 1:
        return float(vals[j])
    f0, f1, f2 = vals[j - 1], vals[j], vals[j + 1]
    denom = f0 - 2.0 * f1 + f2
    if denom == 0.0 or (minimize and denom < 0.0) or (not minimize and denom > 0.0):
        return float(f1)
    return float(f1 - (f2 - f0) ** 2 / (8.0 * denom))


def compatibility_check(
    grid: Grid, p: float, a: float, X, b: float, Y, samples: int = 200
) -> float:
    """Worst distance defect between the support-function p-sum of two
    points and the two-point ball family.

    Boundary points recovered from the summed support field are tested
    against the union (p > 1), single ball (p = 1), or intersection
    (p < 1, open t-interval) of the ball family; returns the sup of the
    refined |defect| in geodesic distance.
    """
    if samples < 3:
        raise ValueError("samples must be at least 3")
    field = two_point_sum(grid, p, a, X, b, Y)
    bd = boundary_data(field)
    pts = bd.X
    if p == 1.0:
        ball = two_point_ball(p, 0.5, a, X, b, Y)
        d = np.arccosh(np.maximum(-_inner_many(pts, ball.center[None, :]), 1.0))
        return float(np.max(np.abs(d[:, 0] - ball.radius)))
    if p > 1.0:
        ts = np.linspace(0.0, 1.0, samples)
    else:
        ts = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    centers, radii = [], []
    for t in ts:
        ball = two_point_ball(p, float(t), a, X, b, Y)
        if ball.empty or math.isinf(ball.radius):
            continue
        centers.append(ball.center)
        radii.append(ball.radius)
    centers = np.asarray(centers)
    radii = np.asarray(radii)
    d = np.arccosh(np.maximum(-_inner_many(pts, centers), 1.0))
    defect = d - radii[None, :]
    worst = 0.0
    minimize = p > 1.0
    best_j = np.argmin(defect, axis=1) if minimize else np.argmax(defect, axis=1)
    for i in range(pts.shape[0]):
        v = _refine_extremum(defect[i], int(best_j[i]), minimize)
        worst = max(worst, abs(v))
    return worst


def _inner_many(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise Lorentz inner products, shape (len(A), len(B))."""
    return A[:, :-1] @ B[:, :-1].T - np.outer(A[:, -1], B[:, -1])


def dilates_check(K: SupportField, L: SupportField) -> DilatesReport:
    """Whether L is a p-dilation of K: phi_L / phi_K constant."""
    if K.grid != L.grid:
        raise ValueError("dilates_check requires a common grid")
    ratio = L.phi / K.phi
    mean = float(np.mean(ratio))
    variation = float(np.max(np.abs(ratio - mean)) / abs(mean))
    return DilatesReport(variation <= DILATE_TOL, variation)
