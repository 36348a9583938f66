"""Group Fourier transform as operator-matrix fields over a dual quadrature.

The transform of an integrable profile is f^(pi) = integral f(g) pi(g)* dg.
For the fixed Schrodinger model this reduces to an integral operator on
L^2(R) whose kernel is the Euclidean Fourier transform of f in (y, t),

    K_lam(u, v) = g^(u - v, lam (u + v) / 2, lam),
    g^(x, eta, tau) = integral f(x, y, t) exp(-i (y eta + t tau)) dy dt,

and the matrix in the scaled Hermite basis is computed per profile term with
a rotated Gauss-Hermite rule whose nodes are matched to the kernel ridge, so
accuracy is uniform across the lambda window.  The Plancherel measure on the
dual is c_P |lam| d lam with c_P = (2 pi)^(-2); with this density the grid
Plancherel sum reproduces L^2 norms, and the two-atom polar decomposition
carries weight 1 / (2 pi^2) per sign of lambda.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateRepresentationError,
    DomainError,
    NotIntegrableError,
)
from .group import GroupPoint, Q
from .profiles import Profile, Wavepacket1D
from .reps import RepPoint, _gh_rule, hermite_functions, rep_matrix

#: density of the Plancherel measure c_P |lam| d lam
PLANCHEREL_DENSITY = (2.0 * math.pi) ** -2

#: weight of each sign atom in the dual polar decomposition
DUAL_ATOM_WEIGHT = 1.0 / (2.0 * math.pi**2)


def _thread_count() -> int:
    raw = os.environ.get("HGMDM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_ordered(fn: Callable, items: Sequence):
    """Map preserving order; parallel when HGMDM_THREADS > 1.

    Reductions downstream always run in item order, so results do not depend
    on the thread count.
    """
    n = _thread_count()
    if n == 1 or len(items) < 4:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# dual quadrature grid


@dataclass(frozen=True)
class PlancherelGrid:
    """Signed log-spaced lambda nodes with d-lambda weights.

    ``lambdas`` run from -lambda_max up to -lambda_min and then lambda_min to
    lambda_max; ``dlam`` are plain d-lambda quadrature weights per node.  The
    measure weights c_P |lam| dlam are exposed separately.
    """

    lambdas: np.ndarray
    dlam: np.ndarray
    n_modes: int
    lambda_min: float
    lambda_max: float
    nodes_per_sign: int
    rule: str = "trapezoid"

    @classmethod
    def make(
        cls,
        lambda_min: float,
        lambda_max: float,
        nodes_per_sign: int,
        n_modes: int,
        rule: str = "trapezoid",
    ) -> "PlancherelGrid":
        if not (0 < lambda_min < lambda_max):
            raise ConfigurationError("need 0 < lambda_min < lambda_max")
        if nodes_per_sign < 2:
            raise ConfigurationError("need at least 2 nodes per sign")
        if n_modes < 1:
            raise ConfigurationError("n_modes must be >= 1")
        s0, s1 = math.log(lambda_min), math.log(lambda_max)
        if rule == "trapezoid":
            s = np.linspace(s0, s1, nodes_per_sign)
            ws = np.full(nodes_per_sign, s[1] - s[0])
            ws[0] *= 0.5
            ws[-1] *= 0.5
        elif rule == "gl":
            xi, wi = np.polynomial.legendre.leggauss(nodes_per_sign)
            s = 0.5 * (s1 - s0) * xi + 0.5 * (s1 + s0)
            ws = 0.5 * (s1 - s0) * wi
        else:
            raise ConfigurationError(f"unknown dual grid rule {rule!r}")
        lam_pos = np.exp(s)
        w_pos = ws * lam_pos  # d lambda = lambda d(log lambda)
        lambdas = np.concatenate([-lam_pos[::-1], lam_pos])
        dlam = np.concatenate([w_pos[::-1], w_pos])
        return cls(
            lambdas=lambdas,
            dlam=dlam,
            n_modes=n_modes,
            lambda_min=lambda_min,
            lambda_max=lambda_max,
            nodes_per_sign=nodes_per_sign,
            rule=rule,
        )

    def __len__(self) -> int:
        return len(self.lambdas)

    @property
    def measure_weights(self) -> np.ndarray:
        return PLANCHEREL_DENSITY * np.abs(self.lambdas) * self.dlam

    def rep_points(self) -> list[RepPoint]:
        return [RepPoint(lam, self.n_modes) for lam in self.lambdas]

    def scaled(self, factor: float) -> "PlancherelGrid":
        """Grid with the node map lam -> factor * lam (factor > 0)."""
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        return replace(
            self,
            lambdas=self.lambdas * factor,
            dlam=self.dlam * factor,
            lambda_min=self.lambda_min * factor,
            lambda_max=self.lambda_max * factor,
        )

    def to_json(self) -> dict:
        return {
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "nodes_per_sign": self.nodes_per_sign,
            "spacing": "log",
            "n_modes": self.n_modes,
            "rule": self.rule,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PlancherelGrid":
        try:
            if obj.get("spacing", "log") != "log":
                raise ConfigurationError("only log spacing is supported")
            return cls.make(
                lambda_min=float(obj["lambda_min"]),
                lambda_max=float(obj["lambda_max"]),
                nodes_per_sign=int(obj["nodes_per_sign"]),
                n_modes=int(obj["n_modes"]),
                rule=obj.get("rule", "trapezoid"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad dual grid spec: {exc}") from exc


@dataclass
class DualField:
    """One operator matrix per lambda node of a PlancherelGrid."""

    grid: PlancherelGrid
    mats: np.ndarray  # (n_nodes, N, N) complex

    def __post_init__(self):
        n = len(self.grid)
        if self.mats.shape != (n, self.grid.n_modes, self.grid.n_modes):
            raise ConfigurationError(
                f"field shape {self.mats.shape} does not match grid "
                f"({n} nodes, {self.grid.n_modes} modes)"
            )

    def adjoint(self) -> "DualField":
        return DualField(self.grid, np.conj(np.swapaxes(self.mats, 1, 2)))

    def __matmul__(self, other: "DualField") -> "DualField":
        return DualField(self.grid, np.einsum("nij,njk->nik", self.mats, other.mats))

    def scaled(self, c) -> "DualField":
        return DualField(self.grid, c * self.mats)

    def __add__(self, other: "DualField") -> "DualField":
        return DualField(self.grid, self.mats + other.mats)

    def hs_sq_nodes(self) -> np.ndarray:
        return np.einsum("nij,nij->n", self.mats, np.conj(self.mats)).real

    def integrate_hs_sq(self) -> float:
        return float(self.grid.measure_weights @ self.hs_sq_nodes())

    def integrate_trace(self) -> complex:
        traces = np.einsum("nii->n", self.mats)
        return complex(self.grid.measure_weights @ traces)


# ---------------------------------------------------------------------------
# kernel-route transform


def _term_ft_factors(term):
    """Cache-free closed-form FT factors of one profile term."""
    return term.wy, term.wt


def _transform_term(term, rp: RepPoint, n_quad: int) -> np.ndarray:
    """Kernel-route matrix of a single separable wavepacket term."""
    lam = rp.lam
    al = abs(lam)
    s = rp.scale
    sgn = math.copysign(1.0, lam)
    N = rp.n_modes

    wt_val = term.wt.ft(lam)
    if wt_val == 0:
        return np.zeros((N, N), dtype=complex)

    nodes, weights = _gh_rule(n_quad)

    # ridge-matched affine node maps in the rotated frame (a, b) = (s-r, s+r)
    ax = term.wx.decay
    pa = 0.5 + ax / al
    mu_a = term.wx.center * ax / (s * pa)
    a_nodes = mu_a + nodes * math.sqrt(2.0 / pa)

    ay = term.wy.decay
    pb = 0.5 + al / (4.0 * ay)
    mu_b = sgn * s * term.wy.freq / (2.0 * ay * pb)
    b_nodes = mu_b + nodes * math.sqrt(2.0 / pb)

    wx_vals = term.wx(a_nodes / s)
    wy_vals = term.wy.ft(sgn * s * b_nodes / 2.0)

    za = a_nodes[:, None]
    zb = b_nodes[None, :]
    h_plus = hermite_functions(N, 0.5 * (zb + za))   # (N, na, nb)
    h_minus = hermite_functions(N, 0.5 * (zb - za))

    w2 = np.outer(weights * wx_vals, weights * wy_vals)
    scale = wt_val / (2.0 * s) * math.sqrt(2.0 / pa) * math.sqrt(2.0 / pb)
    t_block = (h_plus * w2[None, :, :]).reshape(N, -1)
    return scale * (t_block @ h_minus.reshape(N, -1).T)


def transform(f: Profile, rp: RepPoint, n_quad: int | None = None) -> np.ndarray:
    """Group Fourier transform matrix of ``f`` at the representation ``rp``.

    Kernel route: 2D Euclidean FT in (y, t) in closed form per term, then a
    rotated scale-matched Gauss-Hermite quadrature in the Hermite variables.
    Every term must decay in y and t (positive Gaussian width).
    """
    if rp.lam == 0:
        raise DegenerateRepresentationError("transform needs lambda != 0")
    nq = n_quad if n_quad is not None else rp.n_modes + 32
    total = np.zeros((rp.n_modes, rp.n_modes), dtype=complex)
    for term in f.terms:
        if term.wy.decay <= 0 or term.wt.decay <= 0:
            raise NotIntegrableError(
                "transform requires Gaussian decay in y and t for every term"
            )
        total += term.coeff * _transform_term(term, rp, nq)
    return total


def transform_field(f: Profile, grid: PlancherelGrid, n_quad=None) -> DualField:
    reps = grid.rep_points()
    mats = map_ordered(lambda rp: transform(f, rp, n_quad), reps)
    return DualField(grid, np.asarray(mats))


def transform_direct(f: Profile, rp: RepPoint, spatial_grid) -> np.ndarray:
    """Slow direct-quadrature transform used for cross-validation.

    Integrates f(g) pi(g)* over a 3D tensor grid.  The central coordinate
    factors through exp(-i lam t), so the t-line is integrated first and the
    representation matrices are assembled on the (x, y) sheet only.
    """
    xs, wx = spatial_grid.axis(0)
    ys, wy = spatial_grid.axis(1)
    ts, wt = spatial_grid.axis(2)
    # F(x, y) = integral f(x, y, t) exp(-i lam t) dt
    vals = f(xs[:, None, None], ys[None, :, None], ts[None, None, :])
    f_sheet = np.einsum("k,xyk->xy", wt * np.exp(-1j * rp.lam * ts), vals + 0j)

    total = np.zeros((rp.n_modes, rp.n_modes), dtype=complex)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if abs(f_sheet[i, j]) == 0:
                continue
            mat = rep_matrix(rp, GroupPoint(x, y, 0.0))
            # pi(g)* with the central phase already integrated out
            total += wx[i] * wy[j] * f_sheet[i, j] * mat.conj().T
    return total


# ---------------------------------------------------------------------------
# Plancherel, Parseval, inversion


def _ft_packets_y(w: Wavepacket1D):
    return w.ft_as_packets()


def _pair_profile_density(f1: Profile, f2: Profile, lam: np.ndarray) -> np.ndarray:
    """c_P * integral over (a, b) of g1^(a, b, lam) conj(g2^(a, b, lam)).

    This equals the integrand of the Parseval pairing with respect to
    d lambda without any Hermite truncation; used for out-of-window tails.
    """
    lam = np.asarray(lam, dtype=float)
    total = np.zeros(lam.shape, dtype=complex)
    for t1 in f1.terms:
        for t2 in f2.terms:
            ax = t2.wx.pair_integral(t1.wx)
            by = 0.0 + 0.0j
            for c1, p1 in _ft_packets_y(t1.wy):
                for c2, p2 in _ft_packets_y(t2.wy):
                    by += c1 * np.conj(c2) * p2.pair_integral(p1)
            tt = t1.wt.ft(lam) * np.conj(t2.wt.ft(lam))
            total += t1.coeff * np.conj(t2.coeff) * ax * by * tt
    return PLANCHEREL_DENSITY * total


def window_tail(
    f1: Profile,
    f2: Profile | None,
    lambda_min: float,
    lambda_max: float,
    n_nodes: int = 32,
    cap_factor: float = 8.0,
) -> complex:
    """Parseval mass outside [lambda_min, lambda_max] (both signs).

    Computed from the 2-variable Euclidean route, which is free of Hermite
    truncation, on small Gauss-Legendre panels.
    """
    f2 = f1 if f2 is None else f2
    xi, wi = np.polynomial.legendre.leggauss(n_nodes)
    total = 0.0 + 0.0j
    for sign in (+1.0, -1.0):
        lo = sign * 0.5 * lambda_min * (xi + 1.0)
        w_lo = 0.5 * lambda_min * wi
        total += np.sum(w_lo * _pair_profile_density(f1, f2, lo))
        hi_cap = lambda_max * cap_factor
        mid = 0.5 * (hi_cap - lambda_max)
        hi = sign * (mid * (xi + 1.0) + lambda_max)
        total += np.sum(mid * wi * _pair_profile_density(f1, f2, hi))
    return complex(total)


def plancherel_norm(
    f: Profile,
    grid: PlancherelGrid,
    n_quad=None,
    include_tail: bool = True,
    field: DualField | None = None,
):
    """Squared Plancherel norm of ``f`` over the dual grid.

    Returns ``(value, parts)`` where parts records the in-window grid sum and
    the compensated out-of-window mass (reported per the truncation contract;
    set ``include_tail=False`` for the bare windowed quadrature).
    """
    fld = field if field is not None else transform_field(f, grid, n_quad)
    grid_part = fld.integrate_hs_sq()
    tail = 0.0
    if include_tail:
        tail = float(
            np.real(window_tail(f, None, grid.lambda_min, grid.lambda_max))
        )
    return grid_part + tail, {"grid": grid_part, "window_tail": tail}


def parseval(
    f1: Profile,
    f2: Profile,
    grid: PlancherelGrid,
    n_quad=None,
    include_tail: bool = True,
) -> complex:
    """Parseval pairing integral tr(f1^ f2^*) d mu over the grid window."""
    fld1 = transform_field(f1, grid, n_quad)
    fld2 = transform_field(f2, grid, n_quad)
    traces = np.einsum("nij,nij->n", fld1.mats, np.conj(fld2.mats))
    val = complex(grid.measure_weights @ traces)
    if include_tail:
        val += window_tail(f1, f2, grid.lambda_min, grid.lambda_max)
    return val


def invert(field: DualField, g: GroupPoint, trace_bound: float = 1e9) -> complex:
    """Fourier inversion integral tr(pi(g) field(pi)) d mu at the point g."""
    traces = np.empty(len(field.grid), dtype=complex)
    for i, rp in enumerate(field.grid.rep_points()):
        traces[i] = np.trace(rep_matrix(rp, g) @ field.mats[i])
    total_abs = float(field.grid.measure_weights @ np.abs(traces))
    if not np.isfinite(total_abs) or total_abs > trace_bound:
        raise NotIntegrableError(
            f"trace sum {total_abs:.3e} exceeds the integrability threshold"
        )
    return complex(field.grid.measure_weights @ traces)


def diff_profile(f: Profile, alpha: tuple) -> Profile:
    """The profile x^alpha f realising the difference operator on transforms."""
    if len(alpha) != 3 or any(a < 0 for a in alpha):
        raise DomainError("alpha must be a nonnegative multi-index over (x, y, t)")
    out = f
    for axis, power in enumerate(alpha):
        if power:
            out = out.mul_coord(axis, power)
    return out


def weighted_degree(alpha: tuple) -> int:
    return alpha[0] + alpha[1] + 2 * alpha[2]


def difference_op(
    f: Profile, alpha: tuple, grid: PlancherelGrid, n_quad=None
) -> DualField:
    """Difference operator Delta^alpha f^ = (x^alpha f)^ over the grid."""
    return transform_field(diff_profile(f, alpha), grid, n_quad)


@dataclass
class PolarResult:
    total: complex
    atom_totals: dict
    direct_total: complex

    @property
    def mismatch(self) -> float:
        scale = max(abs(self.direct_total), 1e-300)
        return abs(self.total - self.direct_total) / scale


def polar_dual(
    F: Callable[[float], complex],
    grid: PlancherelGrid,
    n_radial: int = 96,
) -> PolarResult:
    """Two-atom polar decomposition of the dual integral of F.

    Compares sum over signs of (1/(2 pi^2)) integral F(sign r^2) r^3 dr on an
    independent log-radial Gauss-Legendre rule with the direct grid quadrature
    sum_i w_i c_P |lam_i| F(lam_i).
    """
    direct_vals = np.array([F(lam) for lam in grid.lambdas])
    direct = complex(grid.measure_weights @ direct_vals)

    s0 = 0.5 * math.log(grid.lambda_min)
    s1 = 0.5 * math.log(grid.lambda_max)
    xi, wi = np.polynomial.legendre.leggauss(n_radial)
    s = 0.5 * (s1 - s0) * xi + 0.5 * (s1 + s0)
    ws = 0.5 * (s1 - s0) * wi
    r = np.exp(s)
    atom_totals = {}
    for sign in (+1.0, -1.0):
        vals = np.array([F(sign * ri * ri) for ri in r])
        atom_totals[sign] = complex(DUAL_ATOM_WEIGHT * np.sum(ws * r**Q * vals))
    total = atom_totals[+1.0] + atom_totals[-1.0]
    return PolarResult(total=total, atom_totals=atom_totals, direct_total=direct)
