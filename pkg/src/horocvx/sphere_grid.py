"""Discrete spheres S^1 and S^2 with spectral calculus.

A Grid carries quadrature nodes and weights together with the antipodal
involution and the maximal exactly-representable degree (band_limit).
Scalar fields are plain value arrays in node order.  Differentiation is
spectral: FFT on S^1, per-order associated Legendre transforms combined
with an azimuthal FFT on S^2.  Gradients and Hessians are expressed in
the orthonormal frame {d_theta, (1/sin theta) d_phi}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "Grid",
    "ScalarField",
    "make_grid",
    "sphere_area",
    "integrate",
    "gradient",
    "hessian",
    "laplacian",
    "frame_vectors",
    "antipodal",
    "even_error",
    "even_project",
    "band_project",
    "resample",
    "refine",
    "grid_to_json_dict",
    "grid_from_json_dict",
    "field_to_json_dict",
    "field_from_json_dict",
    "save_field",
    "load_field",
]


@dataclass
class Grid:
    """Quadrature grid on S^n, n in {1, 2}.

    n=1: resolution (N,), nodes theta_j = 2 pi j / N, weights 2 pi / N.
    n=2: resolution (L, M) with M = 2 L; Gauss-Legendre in cos(polar)
    times uniform azimuth, node order row-major polar-major.
    """

    n: int
    resolution: tuple[int, ...]
    nodes: np.ndarray
    weights: np.ndarray
    antipodal_index: np.ndarray
    band_limit: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.resolution == other.resolution
        )

    def __hash__(self) -> int:
        return hash((self.n, self.resolution))


@dataclass
class ScalarField:
    """Values of a scalar function at the nodes of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError(
                f"field has {self.values.shape} values, grid has {self.grid.size} nodes"
            )


def sphere_area(n: int) -> float:
    """Surface area of the unit n-sphere, n in {1, 2}."""
    if n == 1:
        return 2.0 * math.pi
    if n == 2:
        return 4.0 * math.pi
    raise ValueError(f"n must be 1 or 2, got {n}")


def make_grid(n: int, resolution) -> Grid:
    """Build the standard grid on S^n.

    For n=1, resolution is the even node count N >= 4.  For n=2 it is the
    polar count L >= 2; the azimuth count is fixed at M = 2 L and the band
    limit at L - 1.
    """
    if n == 1:
        N = int(resolution)
        if N <= 0 or N % 2 != 0 or N < 4:
            raise ValueError(f"n=1 grid needs an even node count >= 4, got {resolution}")
        theta = 2.0 * math.pi * np.arange(N) / N
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = np.full(N, 2.0 * math.pi / N)
        anti = (np.arange(N) + N // 2) % N
        g = Grid(1, (N,), nodes, weights, anti, N // 2 - 1)
        g._cache["theta"] = theta
        return g
    if n == 2:
        L = int(resolution)
        if L < 2:
            raise ValueError(f"n=2 grid needs a polar count >= 2, got {resolution}")
        M = 2 * L
        x, wx = roots_legendre(L)
        # Symmetrize so the antipodal map is exact in floating point.
        x = 0.5 * (x - x[::-1])
        wx = 0.5 * (wx + wx[::-1])
        order = np.argsort(-x)  # theta ascending from the north pole
        x = x[order]
        wx = wx[order]
        theta = np.arccos(np.clip(x, -1.0, 1.0))
        phi = 2.0 * math.pi * np.arange(M) / M
        s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
        st, ct = s[:, None], x[:, None]
        cp, sp = np.cos(phi)[None, :], np.sin(phi)[None, :]
        nodes = np.stack(
            [
                (st * cp).ravel(),
                (st * sp).ravel(),
                np.broadcast_to(ct, (L, M)).ravel(),
            ],
            axis=1,
        )
        weights = (wx[:, None] * (2.0 * math.pi / M)).repeat(M).reshape(L, M).ravel()
        ii, jj = np.meshgrid(np.arange(L), np.arange(M), indexing="ij")
        anti = ((L - 1 - ii) * M + (jj + M // 2) % M).ravel()
        g = Grid(2, (L, M), nodes, weights, anti, L - 1)
        g._cache.update(theta=theta, phi=phi, x=x, wx=wx, s=s)
        return g
    raise ValueError(f"n must be 1 or 2, got {n}")


def refine(grid: Grid) -> Grid:
    """Grid of the same family at doubled resolution."""
    if grid.n == 1:
        return make_grid(1, 2 * grid.resolution[0])
    return make_grid(2, 2 * grid.resolution[0])


def integrate(grid: Grid, values: np.ndarray) -> float:
    """Quadrature of a node field, deterministic compensated summation."""
    v = np.asarray(values, dtype=float)
    return math.fsum((grid.weights * v).tolist())


def antipodal(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Pull a field back through the antipodal map z -> -z."""
    return np.asarray(values)[grid.antipodal_index]


def even_error(grid: Grid, values: np.ndarray) -> float:
    """Sup-norm deviation from antipodal evenness."""
    v = np.asarray(values, dtype=float)
    return float(np.max(np.abs(v - v[grid.antipodal_index])))


def even_project(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Even part (f + f o antipodal) / 2."""
    v = np.asarray(values, dtype=float)
    return 0.5 * (v + v[grid.antipodal_index])


def band_project(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Projection onto the grid's derivative-resolved band.

    Node values can carry components the spectral derivatives do not see
    (the Nyquist bin on S^1, everything above the Legendre band on S^2).
    Evolution driven by pointwise terms can pump those components, so
    time steppers project each accepted state back onto the band.
    """
    v = np.asarray(values, dtype=float)
    if grid.n == 1:
        c = np.fft.rfft(v)
        c[grid.resolution[0] // 2] = 0.0
        return np.fft.irfft(c, n=grid.size)
    coeffs = _s2_analyze(grid, v)
    P, _, _ = _s2_tables(grid)
    profiles = [[P[m] @ coeffs[m] for m in range(grid.band_limit + 1)]]
    return _s2_synth_many(grid, profiles)[0]


# ---------------------------------------------------------------------------
# S^1 spectral calculus


def _s1_coeffs(grid: Grid, values: np.ndarray) -> np.ndarray:
    return np.fft.rfft(np.asarray(values, dtype=float)) / grid.resolution[0]


def _s1_synth(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    N = grid.resolution[0]
    return np.fft.irfft(coeffs * N, n=N)


def _s1_derivative_multipliers(grid: Grid, order: int) -> np.ndarray:
    N = grid.resolution[0]
    k = np.arange(N // 2 + 1, dtype=float)
    mult = (1j * k) ** order
    mult[-1] = 0.0  # Nyquist mode carries no derivative information
    return mult


# ---------------------------------------------------------------------------
# S^2 spectral calculus


def _legendre_columns(m: int, lmax: int, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre P_l^m(x) for l = m..lmax.

    Normalized so that 2 pi * int_{-1}^{1} P_l^m P_l'^m dx = delta_{l l'}.
    Returns shape (len(x), lmax - m + 1).
    """
    npts = x.shape[0]
    out = np.empty((npts, lmax - m + 1))
    pmm = np.full(npts, 1.0 / math.sqrt(4.0 * math.pi))
    for mm in range(1, m + 1):
        pmm = -math.sqrt((2 * mm + 1) / (2 * mm)) * s * pmm
    out[:, 0] = pmm
    if lmax > m:
        out[:, 1] = math.sqrt(2 * m + 3) * x * pmm
    for l in range(m + 2, lmax + 1):
        a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
        b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
        out[:, l - m] = a * (x * out[:, l - m - 1] - b * out[:, l - m - 2])
    return out


def _legendre_theta_derivative(
    m: int, lmax: int, x: np.ndarray, s: np.ndarray, P: np.ndarray
) -> np.ndarray:
    """d/dtheta of the columns of P, via the degree-lowering recurrence."""
    out = np.empty_like(P)
    ls = np.arange(m, lmax + 1)
    for idx, l in enumerate(ls):
        if l == m:
            out[:, idx] = l * x * P[:, idx] / s
        else:
            c = math.sqrt((2 * l + 1) * (l * l - m * m) / (2 * l - 1))
            out[:, idx] = (l * x * P[:, idx] - c * P[:, idx - 1]) / s
    return out


def _s2_tables(grid: Grid):
    """Per-order Legendre matrices at the grid's polar nodes, cached."""
    tab = grid._cache.get("s2_tables")
    if tab is None:
        x = grid._cache["x"]
        s = grid._cache["s"]
        B = grid.band_limit
        P, dP, ll1 = [], [], []
        for m in range(B + 1):
            Pm = _legendre_columns(m, B, x, s)
            P.append(Pm)
            dP.append(_legendre_theta_derivative(m, B, x, s, Pm))
            ls = np.arange(m, B + 1, dtype=float)
            ll1.append(ls * (ls + 1.0))
        tab = (P, dP, ll1)
        grid._cache["s2_tables"] = tab
    return tab


def _s2_analyze(grid: Grid, values: np.ndarray) -> list[np.ndarray]:
    """Band-limited coefficients a_m[l] for m = 0..band_limit."""
    L, M = grid.resolution
    P, _, _ = _s2_tables(grid)
    wx = grid._cache["wx"]
    G = np.fft.rfft(np.asarray(values, dtype=float).reshape(L, M), axis=1) / M
    return [
        2.0 * math.pi * (P[m].T @ (wx * G[:, m])) for m in range(grid.band_limit + 1)
    ]


def _s2_synth_many(grid: Grid, per_m_columns: list[list[np.ndarray]]) -> list[np.ndarray]:
    """Synthesize several fields given their per-m polar profiles."""
    L, M = grid.resolution
    nfields = len(per_m_columns)
    Gs = [np.zeros((L, M // 2 + 1), dtype=complex) for _ in range(nfields)]
    for m in range(grid.band_limit + 1):
        for k in range(nfields):
            Gs[k][:, m] = per_m_columns[k][m]
    return [np.fft.irfft(G * M, n=M, axis=1).ravel() for G in Gs]


# ---------------------------------------------------------------------------
# public spectral operators


def gradient(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Gradient in the orthonormal frame, shape (size, n)."""
    if grid.n == 1:
        c = _s1_coeffs(grid, values)
        d1 = _s1_synth(grid, c * _s1_derivative_multipliers(grid, 1))
        return d1[:, None]
    P, dP, _ = _s2_tables(grid)
    a = _s2_analyze(grid, values)
    B = grid.band_limit
    cols_ft = [dP[m] @ a[m] for m in range(B + 1)]
    cols_fp = [(1j * m) * (P[m] @ a[m]) for m in range(B + 1)]
    ft, fp = _s2_synth_many(grid, [cols_ft, cols_fp])
    L, M = grid.resolution
    inv_s = np.repeat(1.0 / grid._cache["s"], M)
    return np.stack([ft, fp * inv_s], axis=1)


def hessian(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Covariant Hessian in the orthonormal frame, shape (size, n, n)."""
    if grid.n == 1:
        c = _s1_coeffs(grid, values)
        d2 = _s1_synth(grid, c * _s1_derivative_multipliers(grid, 2))
        return d2[:, None, None]
    P, dP, ll1 = _s2_tables(grid)
    a = _s2_analyze(grid, values)
    B = grid.band_limit
    L, M = grid.resolution
    cols_v = [P[m] @ a[m] for m in range(B + 1)]
    cols_vt = [dP[m] @ a[m] for m in range(B + 1)]
    cols_lap = [P[m] @ (ll1[m] * a[m]) for m in range(B + 1)]
    cols_fp = [(1j * m) * cols_v[m] for m in range(B + 1)]
    cols_ftp = [(1j * m) * cols_vt[m] for m in range(B + 1)]
    cols_fpp = [-(m * m) * cols_v[m] for m in range(B + 1)]
    v, vt, lap, fp, ftp, fpp = _s2_synth_many(
        grid, [cols_v, cols_vt, cols_lap, cols_fp, cols_ftp, cols_fpp]
    )
    s = np.repeat(grid._cache["s"], M)
    x = np.repeat(grid._cache["x"], M)
    # theta-theta from the associated Legendre ODE; mixed and azimuthal
    # entries carry the Christoffel corrections of the orthonormal frame.
    ftt = -(x / s) * vt - lap - fpp / (s * s)
    H = np.empty((grid.size, 2, 2))
    H[:, 0, 0] = ftt
    H[:, 0, 1] = ftp / s - (x / (s * s)) * fp
    H[:, 1, 0] = H[:, 0, 1]
    H[:, 1, 1] = fpp / (s * s) + (x / s) * vt
    return H


def laplacian(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Laplace-Beltrami operator applied spectrally."""
    if grid.n == 1:
        c = _s1_coeffs(grid, values)
        return _s1_synth(grid, c * _s1_derivative_multipliers(grid, 2))
    P, _, ll1 = _s2_tables(grid)
    a = _s2_analyze(grid, values)
    cols = [P[m] @ (-ll1[m] * a[m]) for m in range(grid.band_limit + 1)]
    (out,) = _s2_synth_many(grid, [cols])
    return out


def frame_vectors(grid: Grid) -> np.ndarray:
    """Ambient coordinates of the orthonormal frame, shape (size, n, n+1)."""
    if grid.n == 1:
        theta = grid._cache["theta"]
        e = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
        return e[:, None, :]
    L, M = grid.resolution
    theta = np.repeat(grid._cache["theta"], M)
    phi = np.tile(grid._cache["phi"], L)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    e_theta = np.stack([ct * cp, ct * sp, -st], axis=1)
    e_phi = np.stack([-sp, cp, np.zeros_like(cp)], axis=1)
    return np.stack([e_theta, e_phi], axis=1)


def resample(grid: Grid, values: np.ndarray, targets) -> np.ndarray:
    """Band-limited synthesis of a grid field at arbitrary directions.

    targets may be a Grid (its nodes are used) or an array of unit
    directions with shape (T, n+1).
    """
    if isinstance(targets, Grid):
        if targets.n != grid.n:
            raise ValueError("target grid lives on a different sphere")
        pts = targets.nodes
    else:
        pts = np.asarray(targets, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
    if pts.shape[1] != grid.n + 1:
        raise ValueError(f"targets must have {grid.n + 1} components")
    if grid.n == 1:
        c = _s1_coeffs(grid, values)
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        N = grid.resolution[0]
        out = np.full(theta.shape, c[0].real)
        for k in range(1, N // 2):
            out += 2.0 * (
                c[k].real * np.cos(k * theta) - c[k].imag * np.sin(k * theta)
            )
        out += c[N // 2].real * np.cos((N // 2) * theta)
        return out
    a = _s2_analyze(grid, values)
    x = np.clip(pts[:, 2], -1.0, 1.0)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    B = grid.band_limit
    out = np.zeros(pts.shape[0])
    for m in range(B + 1):
        Pm = _legendre_columns(m, B, x, s)
        contrib = Pm @ a[m]
        if m == 0:
            out += contrib.real
        else:
            e = np.exp(1j * m * phi)
            out += 2.0 * (contrib * e).real
    return out


# ---------------------------------------------------------------------------
# serialization


def grid_to_json_dict(grid: Grid) -> dict:
    if grid.n == 1:
        return {"type": "uniform_s1", "nodes": grid.resolution[0]}
    return {"type": "gl_product", "polar": grid.resolution[0], "azimuth": grid.resolution[1]}


def grid_from_json_dict(n: int, d: dict) -> Grid:
    if d["type"] == "uniform_s1":
        if n != 1:
            raise ValueError("uniform_s1 grids live on S^1")
        return make_grid(1, d["nodes"])
    if d["type"] == "gl_product":
        if n != 2:
            raise ValueError("gl_product grids live on S^2")
        polar = int(d["polar"])
        if int(d.get("azimuth", 2 * polar)) != 2 * polar:
            raise ValueError("gl_product grids require azimuth = 2 * polar")
        return make_grid(2, polar)
    raise ValueError(f"unknown grid type {d.get('type')!r}")


def field_to_json_dict(grid: Grid, values: np.ndarray, kind: str | None = None) -> dict:
    d = {
        "n": grid.n,
        "grid": grid_to_json_dict(grid),
        "values": [float(v) for v in np.asarray(values, dtype=float)],
    }
    if kind is not None:
        d["kind"] = kind
    return d


def field_from_json_dict(d: dict) -> tuple[Grid, np.ndarray, str | None]:
    grid = grid_from_json_dict(int(d["n"]), d["grid"])
    values = np.asarray(d["values"], dtype=float)
    if values.shape != (grid.size,):
        raise ValueError(
            f"field has {values.shape[0]} values, grid has {grid.size} nodes"
        )
    return grid, values, d.get("kind")


def save_field(path, grid: Grid, values: np.ndarray, kind: str | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(field_to_json_dict(grid, values, kind), fh, indent=1)
        fh.write("\n")


def load_field(path) -> tuple[Grid, np.ndarray, str | None]:
    with open(path) as fh:
        return field_from_json_dict(json.load(fh))
