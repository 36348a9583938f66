"""Truncated irreducible representations of H1 in a scaled Hermite basis.

The fixed Schrodinger model on L^2(R) is

    pi_lam(x, y, t) phi(u) = exp(i lam (t + y u + x y / 2)) phi(u + x),

an exact homomorphism for the group law of :mod:`hgmdm.group`.  Matrices are
taken in the Hermite basis scaled by sqrt(|lam|),

    h_n^lam(u) = |lam|^(1/4) h_n(|lam|^(1/2) u),

which diagonalises the positive sub-Laplacian -(X^2 + Y^2) with eigenvalues
|lam| (2n + 1).  Group elements are integrated with Gauss-Hermite quadrature
recentered at the displacement midpoint so the dual dilation covariance

    pi_{r^2 lam}(g) = pi_lam(D_r g)

holds exactly for the computed matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite

from . import group
from .errors import (
    ConfigurationError,
    DegenerateRepresentationError,
    DomainError,
    TailContaminationError,
)
from .group import GroupPoint

FORMAL_DEGREE_LAMBDA1 = 1.0 / (2.0 * math.pi)


@dataclass(frozen=True)
class RepPoint:
    """Representation parameter lam != 0 with Hermite truncation n_modes."""

    lam: float
    n_modes: int
    n_quad: int | None = None

    def __post_init__(self):
        if self.lam == 0:
            raise DegenerateRepresentationError(
                "lambda = 0 labels the degenerate character family, not pi_lambda"
            )
        if self.n_modes < 1:
            raise ConfigurationError("n_modes must be >= 1")
        if self.n_quad is not None and self.n_quad < 2 * self.n_modes:
            raise ConfigurationError(
                f"n_quad = {self.n_quad} below 2 * n_modes = {2 * self.n_modes}"
            )

    @property
    def quad_nodes(self) -> int:
        return self.n_quad if self.n_quad is not None else 2 * self.n_modes + 16

    @property
    def scale(self) -> float:
        return math.sqrt(abs(self.lam))


def dilate_rep(r: float, rp: RepPoint) -> RepPoint:
    """Dual dilation r . pi_lam = pi_{r^2 lam}."""
    if r <= 0:
        raise DomainError(f"dilation parameter must be positive, got {r}")
    return replace(rp, lam=r * r * rp.lam)


@lru_cache(maxsize=64)
def _gh_rule(n: int):
    nodes, weights = roots_hermite(n)
    # fold the exp(+s^2) compensation in; integrands carry their own decay
    return nodes, weights * np.exp(nodes**2)


def hermite_functions(n_max: int, z: np.ndarray) -> np.ndarray:
    """L^2-normalised Hermite functions h_0..h_{n_max-1} at the points z.

    Returns an array of shape (n_max,) + z.shape.  The recurrence
    h_{n+1} = sqrt(2/(n+1)) z h_n - sqrt(n/(n+1)) h_{n-1} is stable and keeps
    the Gaussian factor inside, so no overflow occurs for large z.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((n_max,) + z.shape, dtype=float)
    h0 = math.pi**-0.25 * np.exp(-0.5 * z * z)
    out[0] = h0
    if n_max > 1:
        out[1] = math.sqrt(2.0) * z * h0
    for n in range(1, n_max - 1):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * z * out[n]
            - math.sqrt(n / (n + 1)) * out[n - 1]
        )
    return out


def rep_matrix(rp: RepPoint, g: GroupPoint) -> np.ndarray:
    """Matrix of pi_lam(g) in the scaled Hermite basis.

    Entry (m, n) equals the Gauss-Hermite quadrature of
    conj(h_m^lam(u)) exp(i lam (t + y u + x y / 2)) h_n^lam(u + x).
    """
    lam = rp.lam
    s = rp.scale
    xi = s * g.x   # displacement in scaled units
    beta = math.copysign(s, lam) * g.y
    nodes, weights = _gh_rule(rp.quad_nodes)
    # symmetric recentering: u_scaled = sigma - xi/2
    left = hermite_functions(rp.n_modes, nodes - 0.5 * xi)
    right = hermite_functions(rp.n_modes, nodes + 0.5 * xi)
    phase = np.exp(1j * beta * nodes) * weights
    mat = (left * phase) @ right.T
    prefactor = np.exp(1j * (lam * (g.t + 0.5 * g.x * g.y) - 0.5 * beta * xi))
    return prefactor * mat


def _ladder(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    idx = np.arange(1, n)
    a[idx - 1, idx] = np.sqrt(idx)
    return a


def infinitesimal(rp: RepPoint, which: str) -> np.ndarray:
    """Matrix of the infinitesimal action of X, Y or T.

    In the fixed model pi(X) = d/du, pi(Y) = i lam u, pi(T) = i lam, assembled
    from ladder operators in the scaled basis.
    """
    n = rp.n_modes
    s = rp.scale
    a = _ladder(n)
    if which == "X":
        return s / math.sqrt(2.0) * (a - a.T) + 0j
    if which == "Y":
        return 1j * math.copysign(s, rp.lam) / math.sqrt(2.0) * (a + a.T)
    if which == "T":
        return 1j * rp.lam * np.eye(n)
    raise DomainError(f"unknown generator {which!r}")


def sublaplacian_eigenvalues(rp: RepPoint) -> np.ndarray:
    return abs(rp.lam) * (2.0 * np.arange(rp.n_modes) + 1.0)


def sublaplacian_symbol(rp: RepPoint) -> np.ndarray:
    """pi_lam of the positive sub-Laplacian -(X^2 + Y^2): diag(|lam|(2n+1))."""
    return np.diag(sublaplacian_eigenvalues(rp)) + 0j


def laguerre_coefficient(rp: RepPoint, ell: int, g: GroupPoint) -> complex:
    """Closed form exp(i lam t) L_ell(|lam| rho^2 / 2) exp(-|lam| rho^2 / 4).

    rho^2 = x^2 + y^2; the diagonal matrix coefficient of the fixed model.
    """
    r = abs(rp.lam) * (g.x**2 + g.y**2) / 2.0
    lag = np.polynomial.laguerre.lagval(r, np.eye(ell + 1)[ell])
    return complex(np.exp(1j * rp.lam * g.t) * math.exp(-0.5 * r) * lag)


def matrix_coefficient(
    rp: RepPoint, ell: int, g: GroupPoint, margin: int = 2
) -> complex:
    """(pi_lam(g) h_ell, h_ell) via the quadrature route.

    Requires ell to sit at least ``margin`` modes below the truncation so the
    displaced state is not contaminated by the missing tail.
    """
    if ell < 0:
        raise DomainError("mode index must be nonnegative")
    if ell >= rp.n_modes - margin:
        raise TailContaminationError(
            f"mode {ell} within {margin} of truncation {rp.n_modes}"
        )
    lam = rp.lam
    s = rp.scale
    xi = s * g.x
    beta = math.copysign(s, lam) * g.y
    nodes, weights = _gh_rule(rp.quad_nodes)
    h_left = hermite_functions(ell + 1, nodes - 0.5 * xi)[ell]
    h_right = hermite_functions(ell + 1, nodes + 0.5 * xi)[ell]
    val = np.sum(weights * h_left * h_right * np.exp(1j * beta * nodes))
    prefactor = np.exp(1j * (lam * (g.t + 0.5 * g.x * g.y) - 0.5 * beta * xi))
    return complex(prefactor * val)


def coefficient_grid(rp: RepPoint, ell: int, xs: np.ndarray, ys: np.ndarray):
    """(pi_lam(x, y, 0) h_ell, h_ell) on a tensor grid, quadrature route.

    Vectorised over both axes; the t = 0 slice is the one entering the formal
    degree.  Returns an array of shape (len(xs), len(ys)).
    """
    s = rp.scale
    nodes, weights = _gh_rule(rp.quad_nodes)
    xi = s * np.asarray(xs)                      # displacements
    beta = math.copysign(s, rp.lam) * np.asarray(ys)
    h_left = hermite_functions(ell + 1, nodes[None, :] - 0.5 * xi[:, None])[ell]
    h_right = hermite_functions(ell + 1, nodes[None, :] + 0.5 * xi[:, None])[ell]
    phases = np.exp(1j * beta[:, None] * nodes[None, :])
    # the t = 0 prefactor exp(i(lam x y / 2 - beta xi / 2)) is identically 1
    return np.einsum("xi,yi->xy", weights * h_left * h_right, phases)


def formal_degree(
    rp: RepPoint,
    ell: int = 0,
    half_width: float = 14.0,
    n_nodes: int = 240,
    via: str = "matrix",
) -> float:
    """Formal degree from the square-integrability of the matrix coefficient.

    d = 1 / integral over R^2 of |(pi_lam(x, y, 0) h_ell, h_ell)|^2; computed
    with a tensor Gauss-Legendre rule.  The quadrature box scales with
    1/sqrt(|lam|) to track the coefficient's Gaussian-Laguerre decay.  The
    ``via`` switch selects the quadrature-route coefficient ("matrix") or the
    Laguerre closed form ("closed").
    """
    L = half_width / rp.scale
    xi, wi = np.polynomial.legendre.leggauss(n_nodes)
    xs = L * xi
    ws = L * wi
    if via == "matrix":
        vals = np.abs(coefficient_grid(rp, ell, xs, xs)) ** 2
    elif via == "closed":
        r = abs(rp.lam) * (xs[:, None] ** 2 + xs[None, :] ** 2) / 2.0
        lag = np.polynomial.laguerre.lagval(r, np.eye(ell + 1)[ell])
        vals = np.exp(-r) * lag**2
    else:
        raise DomainError(f"unknown route {via!r}")
    mass = float(np.einsum("i,j,ij->", ws, ws, vals))
    return 1.0 / mass


# ---------------------------------------------------------------------------
# matrix helpers


def hs_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat))


def op_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat, 2))


def leading_block_dim(rp: RepPoint, g_norm: float) -> int:
    """Modes unaffected by truncation leakage for group elements of this size."""
    buffer = 2 * math.ceil(g_norm * math.sqrt(abs(rp.lam) * rp.n_modes))
    return max(1, rp.n_modes - buffer)

def unitarity_defect(mat: np.ndarray, block: int) -> float:
    """|| (M* M - I) ||_op restricted to the leading block."""
    gram = mat.conj().T @ mat
    sub = gram[:block, :block] - np.eye(block)
    return op_norm(sub)


def matrix_to_json(mat: np.ndarray) -> dict:
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigurationError("operator matrices must be square")
    return {
        "dim": m.shape[0],
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float).reshape(dim, dim)
        im = np.asarray(obj["im"], dtype=float).reshape(dim, dim)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad operator matrix record: {exc}") from exc
    return re + 1j * im
