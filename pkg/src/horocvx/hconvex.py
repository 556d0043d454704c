"""Horospherically convex domains via their horospherical support function.

A domain is the intersection of the horo-balls {B_z(u(z))} over all unit
directions z; we store phi = e^u at grid nodes.  The shifted second
fundamental form A[phi] decides convexity: A > 0 is uniform h-convexity.
Boundary position and normal are recovered pointwise from phi and its
first two frame derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lorentz
from .sphere_grid import (
    Grid,
    frame_vectors,
    gradient,
    hessian,
    resample,
)

__all__ = [
    "SupportField",
    "ConvexityReport",
    "BoundaryData",
    "support_of_point",
    "support_of_ball",
    "a_tensor",
    "a_eigenvalues",
    "convexity",
    "boundary_data",
    "apply_isometry_field",
    "UNIFORM_TOL_SCALE",
]

UNIFORM_TOL_SCALE = 1e-8


@dataclass
class SupportField:
    """phi = e^u sampled at grid nodes; positive everywhere."""

    grid: Grid
    phi: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if self.phi.shape != (self.grid.size,):
            raise ValueError(
                f"support field has {self.phi.shape} values, grid has {self.grid.size} nodes"
            )
        if np.any(self.phi <= 0.0):
            raise ValueError("support field phi must be positive")

    @property
    def u(self) -> np.ndarray:
        return np.log(self.phi)


@dataclass
class ConvexityReport:
    classification: str  # uniformly-h-convex | h-convex | not-h-convex
    min_eigenvalue: float
    argmin_node: int
    tol: float


@dataclass
class BoundaryData:
    """Pointwise boundary quantities indexed by grid node.

    X, nu: boundary point and outward unit normal in R^{n+1,1};
    lambda_tilde = phi * eig(A[phi]) are the shifted principal radii;
    area_density is det A[phi], the density of d(mu) against d(sigma).
    """

    X: np.ndarray
    nu: np.ndarray
    coshr: np.ndarray
    u_tilde: np.ndarray
    lambda_tilde: np.ndarray
    area_density: np.ndarray


def support_of_point(grid: Grid, X) -> SupportField:
    """Support field of a single point: phi(z) = x_{n+1} - <x, z>."""
    X = np.asarray(X, dtype=float)
    lorentz.validate_hpoint(X)
    phi = X[-1] - grid.nodes @ X[:-1]
    return SupportField(grid, phi)


def support_of_ball(grid: Grid, X, r: float) -> SupportField:
    """Support field of the geodesic ball B(X, r), r >= 0."""
    if r < 0.0:
        raise ValueError(f"ball radius must be nonnegative, got {r}")
    point = support_of_point(grid, X)
    return SupportField(grid, math.exp(r) * point.phi)


def _parts(K: SupportField):
    """One spectral pass: gradient, q = |Dphi|^2 / (2 phi), and A[phi]."""
    phi = K.phi
    g = gradient(K.grid, phi)
    q = 0.5 * np.sum(g * g, axis=1) / phi
    A = hessian(K.grid, phi)
    shift = -q + 0.5 * (phi - 1.0 / phi)
    idx = np.arange(K.grid.n)
    A[:, idx, idx] += shift[:, None]
    return g, q, A


def a_tensor(K: SupportField) -> np.ndarray:
    """Shifted second fundamental form A[phi] in the orthonormal frame."""
    return _parts(K)[2]


def a_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Eigenvalues of the pointwise symmetric forms, ascending."""
    if A.shape[1] == 1:
        return A[:, :, 0].copy()
    a, b, d = A[:, 0, 0], A[:, 0, 1], A[:, 1, 1]
    mean = 0.5 * (a + d)
    rad = np.sqrt((0.5 * (a - d)) ** 2 + b * b)
    return np.stack([mean - rad, mean + rad], axis=1)


def _classify(K: SupportField, eigs: np.ndarray, tol: float | None) -> ConvexityReport:
    if tol is None:
        tol = UNIFORM_TOL_SCALE * (1.0 + float(np.max(K.phi)))
    node = int(np.argmin(eigs[:, 0]))
    min_eig = float(eigs[node, 0])
    if min_eig > tol:
        cls = "uniformly-h-convex"
    elif min_eig >= -tol:
        cls = "h-convex"
    else:
        cls = "not-h-convex"
    return ConvexityReport(cls, min_eig, node, tol)


def convexity(K: SupportField, tol: float | None = None) -> ConvexityReport:
    """Classify by the minimum eigenvalue of A[phi] over the grid."""
    return _classify(K, a_eigenvalues(a_tensor(K)), tol)


def boundary_data(K: SupportField, tol: float | None = None) -> BoundaryData:
    """Recover boundary points, normals and curvature data from phi.

    Requires at least h-convexity; raises ValueError otherwise.
    """
    g, q, A = _parts(K)
    eigs = a_eigenvalues(A)
    report = _classify(K, eigs, tol)
    if report.classification == "not-h-convex":
        raise ValueError(
            f"field is not h-convex: min eig A = {report.min_eigenvalue} "
            f"at node {report.argmin_node}"
        )
    grid, phi = K.grid, K.phi
    frames = frame_vectors(grid)
    grad_ambient = np.einsum("ia,iac->ic", g, frames)
    z = grid.nodes
    half_minus = 0.5 * (phi - 1.0 / phi)
    half_plus = 0.5 * (phi + 1.0 / phi)
    X = np.empty((grid.size, grid.n + 2))
    nu = np.empty_like(X)
    X[:, :-1] = (q - half_minus)[:, None] * z - grad_ambient
    X[:, -1] = q + half_plus
    nu[:, :-1] = (q - half_plus)[:, None] * z - grad_ambient
    nu[:, -1] = q + half_minus
    lam = phi[:, None] * eigs
    if grid.n == 1:
        density = A[:, 0, 0].copy()
    else:
        density = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] ** 2
    return BoundaryData(
        X=X,
        nu=nu,
        coshr=q + half_plus,
        u_tilde=q + half_minus,
        lambda_tilde=lam,
        area_density=density,
    )


def apply_isometry_field(K: SupportField, F) -> SupportField:
    """Support field of the image domain under a Lorentz isometry.

    The new field at direction z~ is chi * phi(z), where (z, 1) is the
    normalized pullback of (z~, 1) under F^{-1} and chi is the pullback's
    height.  Resampling is band-limited synthesis on the source field.
    """
    lorentz.validate_isometry(np.asarray(F, dtype=float))
    Finv = lorentz.inverse_isometry(F)
    grid = K.grid
    null = np.concatenate([grid.nodes, np.ones((grid.size, 1))], axis=1)
    W = null @ Finv.T
    chi = W[:, -1]
    src = W[:, :-1] / chi[:, None]
    src = src / np.linalg.norm(src, axis=1, keepdims=True)
    phi_new = chi * resample(grid, K.phi, src)
    return SupportField(grid, phi_new)
