"""The first Heisenberg group as a homogeneous Lie group.

Points are triples (x, y, t) with the product

    (x, y, t) (x', y', t') = (x + x', y + y', t + t' + (x y' - x' y) / 2),

anisotropic dilations D_r(x, y, t) = (r x, r y, r^2 t) and homogeneous
dimension Q = 4.  The module also provides the fixed quasi-norm
((x^2 + y^2)^2 + t^2)^(1/4), tensor-product quadrature of the Haar
(= Lebesgue) measure, the left-invariant frame X, Y, T and a polar
decomposition against the unit quasi-sphere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, UnderresolvedDomainWarning


class GroupPoint(NamedTuple):
    x: float
    y: float
    t: float


IDENTITY = GroupPoint(0.0, 0.0, 0.0)

#: dilation weights of the coordinates (x, y, t)
WEIGHTS = (1, 1, 2)


@dataclass(frozen=True)
class HomogeneousStructure:
    """Weights and homogeneous dimensions of the grading."""

    weights: tuple = WEIGHTS
    q: int = 4
    q_prime: int = 2

    def __post_init__(self):
        if self.q != sum(self.weights):
            raise ConfigurationError("q must equal the sum of the weights")
        if self.q_prime != sum(self.weights[:2]):
            raise ConfigurationError("q_prime must equal the non-central weight sum")


HOMOGENEOUS = HomogeneousStructure()
Q = HOMOGENEOUS.q
Q_PRIME = HOMOGENEOUS.q_prime


def multiply(g1: GroupPoint, g2: GroupPoint) -> GroupPoint:
    """Group product of two points."""
    x1, y1, t1 = g1
    x2, y2, t2 = g2
    return GroupPoint(x1 + x2, y1 + y2, t1 + t2 + 0.5 * (x1 * y2 - x2 * y1))


def inverse(g: GroupPoint) -> GroupPoint:
    return GroupPoint(-g.x, -g.y, -g.t)


def dilate(r: float, g: GroupPoint) -> GroupPoint:
    """Anisotropic dilation D_r with weights (1, 1, 2); requires r > 0."""
    if r <= 0:
        raise DomainError(f"dilation parameter must be positive, got {r}")
    return GroupPoint(r * g.x, r * g.y, r * r * g.t)


def quasi_norm(g) -> float:
    """Homogeneous quasi-norm ((x^2 + y^2)^2 + t^2)^(1/4).

    Accepts a GroupPoint or arrays (x, y, t) and is exactly 1-homogeneous
    under ``dilate``.
    """
    x, y, t = g
    return ((np.asarray(x) ** 2 + np.asarray(y) ** 2) ** 2 + np.asarray(t) ** 2) ** 0.25


# ---------------------------------------------------------------------------
# spatial quadrature


def _axis_rule(half_width: float, count: int, rule: str):
    if count < 2:
        raise ConfigurationError("each axis needs at least 2 nodes")
    if rule == "trapezoid":
        nodes = np.linspace(-half_width, half_width, count)
        w = np.full(count, nodes[1] - nodes[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return nodes, w
    if rule == "gauss":
        xi, wi = np.polynomial.legendre.leggauss(count)
        return half_width * xi, half_width * wi
    raise ConfigurationError(f"unknown quadrature rule {rule!r}")


@dataclass(frozen=True)
class SpatialGrid:
    """Tensor-product quadrature box [-Lx,Lx] x [-Ly,Ly] x [-Lt,Lt]."""

    half_widths: tuple
    counts: tuple
    rule: str = "trapezoid"

    def __post_init__(self):
        if len(self.half_widths) != 3 or len(self.counts) != 3:
            raise ConfigurationError("half_widths and counts must have length 3")
        if any(L <= 0 for L in self.half_widths):
            raise ConfigurationError("half widths must be positive")
        # fail early on a bad rule
        _axis_rule(self.half_widths[0], self.counts[0], self.rule)

    def axis(self, i: int):
        return _axis_rule(self.half_widths[i], self.counts[i], self.rule)

    @property
    def volume(self) -> float:
        return 8.0 * self.half_widths[0] * self.half_widths[1] * self.half_widths[2]

    def nyquist_frequency(self, i: int) -> float:
        """Largest phase frequency the axis resolves, pi / spacing."""
        nodes, _ = self.axis(i)
        return math.pi / (nodes[1] - nodes[0])

    def to_json(self) -> dict:
        return {
            "half_widths": list(self.half_widths),
            "counts": list(self.counts),
            "rule": self.rule,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpatialGrid":
        try:
            return cls(
                half_widths=tuple(float(v) for v in obj["half_widths"]),
                counts=tuple(int(v) for v in obj["counts"]),
                rule=obj.get("rule", "trapezoid"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad spatial grid spec: {exc}") from exc


def haar_integrate(
    f: Callable,
    grid: SpatialGrid,
    tail_threshold: float = 1e-8,
) -> complex:
    """Quadrature of ``f(x, y, t)`` against the Haar (Lebesgue) measure.

    ``f`` must broadcast over coordinate arrays.  If the boundary values
    exceed ``tail_threshold`` times the interior maximum, the box is too
    small for ``f`` and an UnderresolvedDomainWarning is emitted.
    """
    xs, wx = grid.axis(0)
    ys, wy = grid.axis(1)
    ts, wt = grid.axis(2)
    vals = np.asarray(f(xs[:, None, None], ys[None, :, None], ts[None, None, :]))
    vals = vals + np.zeros((len(xs), len(ys), len(ts)))
    peak = np.abs(vals).max()
    if peak > 0:
        boundary = max(
            np.abs(vals[0]).max(),
            np.abs(vals[-1]).max(),
            np.abs(vals[:, 0]).max(),
            np.abs(vals[:, -1]).max(),
            np.abs(vals[:, :, 0]).max(),
            np.abs(vals[:, :, -1]).max(),
        )
        if boundary > tail_threshold * peak:
            warnings.warn(
                f"integrand boundary mass {boundary:.2e} exceeds "
                f"{tail_threshold:.0e} x peak {peak:.2e}; enlarge the box",
                UnderresolvedDomainWarning,
                stacklevel=2,
            )
    return complex(np.einsum("i,j,k,ijk->", wx, wy, wt, vals))


# ---------------------------------------------------------------------------
# left-invariant frame

_FD_STEP = float(np.cbrt(np.finfo(float).eps))  # ~ 6.06e-6, central differences


def left_field(which: str, f: Callable, g: GroupPoint, step: float | None = None):
    """Left-invariant vector field applied to ``f`` at ``g``.

    X = d/dx - (y/2) d/dt,  Y = d/dy + (x/2) d/dt,  T = d/dt for the fixed
    group law; implemented as the derivative of s -> f(g exp(s V)) by central
    differences with step ``cbrt(eps) * scale`` unless ``f`` exposes an
    analytic ``left_field`` method.
    """
    if which not in ("X", "Y", "T"):
        raise DomainError(f"unknown field {which!r}")
    if hasattr(f, "left_field"):
        return f.left_field(which, g)
    h = step if step is not None else _FD_STEP * max(1.0, quasi_norm(g))
    direction = {
        "X": GroupPoint(1.0, 0.0, 0.0),
        "Y": GroupPoint(0.0, 1.0, 0.0),
        "T": GroupPoint(0.0, 0.0, 1.0),
    }[which]

    def at(s):
        gp = multiply(g, GroupPoint(s * direction.x, s * direction.y, s * direction.t))
        return f(gp.x, gp.y, gp.t)

    return (at(h) - at(-h)) / (2.0 * h)


# ---------------------------------------------------------------------------
# polar decomposition on the group

# The unit quasi-sphere {((x^2+y^2)^2 + t^2)^(1/4) = 1} is parametrised by
#   x = sqrt(cos(phi)) cos(theta), y = sqrt(cos(phi)) sin(theta),
#   t = +/- sin(phi),   theta in [0, 2 pi), phi in [0, pi/2],
# and the pullback of Lebesgue measure through (r, point) -> r . point is
# r^(Q-1) dr dtheta dphi.  Total sigma-measure of the sphere: 2 pi^2.

SPHERE_MEASURE = 2.0 * math.pi**2


def sphere_quadrature(n_theta: int = 64, n_phi: int = 32):
    """Nodes (x, y, t) on the unit quasi-sphere and sigma-weights."""
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    w_theta = np.full(n_theta, 2.0 * math.pi / n_theta)
    xi, wi = np.polynomial.legendre.leggauss(n_phi)
    phi = 0.25 * math.pi * (xi + 1.0)
    w_phi = 0.25 * math.pi * wi

    rho = np.sqrt(np.cos(phi))
    pts = []
    wts = []
    for sgn in (+1.0, -1.0):
        x = rho[None, :] * np.cos(theta)[:, None]
        y = rho[None, :] * np.sin(theta)[:, None]
        t = sgn * np.sin(phi)[None, :] * np.ones((n_theta, 1))
        pts.append(np.stack([x.ravel(), y.ravel(), t.ravel()], axis=1))
        wts.append((w_theta[:, None] * w_phi[None, :]).ravel())
    return np.concatenate(pts), np.concatenate(wts)


def polar_check_G(
    f: Callable,
    grid: SpatialGrid,
    r_max: float = 8.0,
    n_r: int = 400,
    n_theta: int = 64,
    n_phi: int = 32,
):
    """Direct Haar integral of ``f`` and its polar-coordinates value.

    Returns ``(lhs, rhs)`` where lhs is the tensor-grid quadrature and rhs is
    the integral of f(r . y) r^(Q-1) over (0, r_max] x sphere.
    """
    lhs = haar_integrate(f, grid)

    pts, wts = sphere_quadrature(n_theta, n_phi)
    xi, wi = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * r_max * (xi + 1.0)
    wr = 0.5 * r_max * wi

    # f on the (radius, sphere-node) mesh, dilation applied per weight
    x = r[:, None] * pts[None, :, 0]
    y = r[:, None] * pts[None, :, 1]
    t = (r[:, None] ** 2) * pts[None, :, 2]
    vals = np.asarray(f(x, y, t)) + np.zeros_like(x)
    rhs = np.einsum("i,j,ij->", wr * r ** (Q - 1), wts, vals)
    return complex(lhs), complex(rhs)


def shell_volume(a: float, b: float) -> float:
    """Haar volume of the shell a <= |g| <= b for the fixed quasi-norm."""
    return SPHERE_MEASURE * (b**4 - a**4) / 4.0


def mean_value_defect(f: Callable, g: GroupPoint, sup_fields: Sequence[float]) -> float:
    """Ratio |f(g) - f(0)| / sum_j |g|^(nu_j) sup|X_j f|.

    The mean-value inequality bounds this by a constant depending only on the
    quasi-norm; the constant is calibrated empirically in the tests.
    """
    num = abs(f(g.x, g.y, g.t) - f(0.0, 0.0, 0.0))
    gn = quasi_norm(g)
    den = sum(gn**w * s for w, s in zip(WEIGHTS, sup_fields))
    return float(num / den) if den > 0 else 0.0
