"""Pseudodifferential quantization Op(sigma) and its quadratic forms.

All quadratic forms are computed in the dual domain through the Parseval
pairing

    (Op(sigma) u, v) = sum_i c_i integral tr(tau_i(pi) u^(pi) W_i^(pi)*) dmu,
    W_i = F(conj(phi_i) v),

for separable symbols sum_i c_i phi_i(x) tau_i(pi).  A spatial route through
pointwise application and 3D quadrature exists for cross-validation at small
sizes.  Low-frequency spectral cut-offs psi(pi(R)) are threaded explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .fourier import DualField, PlancherelGrid, invert, transform_field
from .group import GroupPoint, SpatialGrid
from .profiles import Profile
from .reps import RepPoint
from .symbols import (
    DualFactor,
    SeparableSymbol,
    SpectralMultiplier,
    smooth_cutoff,
)

DEFAULT_CUTOFF = (0.25, 1.0)


@dataclass
class QuantizationContext:
    """Shared grids, cut-off and transform caches for quadratic forms."""

    plancherel_grid: PlancherelGrid
    spatial_grid: SpatialGrid | None = None
    cutoff: SpectralMultiplier = None
    n_quad: int | None = None
    _field_cache: dict = field(default_factory=dict, repr=False)
    _factor_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.cutoff is None:
            self.cutoff = smooth_cutoff(*DEFAULT_CUTOFF)

    @property
    def n_modes(self) -> int:
        return self.plancherel_grid.n_modes

    def field_of(self, profile: Profile) -> DualField:
        key = profile.key()
        if key not in self._field_cache:
            self._field_cache[key] = transform_field(
                profile, self.plancherel_grid, self.n_quad
            )
        return self._field_cache[key]

    def factor_field(self, factor: DualFactor) -> np.ndarray:
        """(n_nodes, N, N) evaluation of an invariant dual factor."""
        key = factor.key()
        if key not in self._factor_cache:
            mats = np.stack(
                [factor.eval(rp) for rp in self.plancherel_grid.rep_points()]
            )
            self._factor_cache[key] = mats
        return self._factor_cache[key]

    def cutoff_diag(self) -> np.ndarray:
        """(n_nodes, N) diagonal of psi(pi(R)) across the grid."""
        key = ("cutoff-diag", self.cutoff.key())
        if key not in self._factor_cache:
            vals = np.stack(
                [
                    self.cutoff.eval_diag(rp)
                    for rp in self.plancherel_grid.rep_points()
                ]
            ).astype(float)
            self._factor_cache[key] = vals
        return self._factor_cache[key]


def quadratic_form(
    ctx: QuantizationContext,
    sym: SeparableSymbol,
    u: Profile,
    v: Profile | None = None,
    with_cutoff: bool = True,
) -> complex:
    """(Op(sigma psi) u, v) by the Parseval route; psi optional."""
    vv = u if v is None else v
    u_field = ctx.field_of(u)
    u_mats = u_field.mats
    if with_cutoff:
        u_mats = ctx.cutoff_diag()[:, :, None] * u_mats
    w = ctx.plancherel_grid.measure_weights
    total = 0.0 + 0.0j
    for term in sym.terms:
        if term.spatial is None:
            w_field = ctx.field_of(vv)
        else:
            w_field = ctx.field_of(term.spatial.conj() * vv)
        d_mats = ctx.factor_field(term.dual)
        node_vals = np.einsum(
            "nij,njk,nik->n", d_mats, u_mats, np.conj(w_field.mats)
        )
        total += term.coeff * complex(w @ node_vals)
    return complex(total)


def apply(
    ctx: QuantizationContext,
    sym: SeparableSymbol,
    f: Profile,
    g: GroupPoint,
    with_cutoff: bool = False,
) -> complex:
    """Pointwise Op(sigma) f (g) through Fourier inversion per term."""
    f_field = ctx.field_of(f)
    mats = f_field.mats
    if with_cutoff:
        mats = ctx.cutoff_diag()[:, :, None] * mats
    total = 0.0 + 0.0j
    for term in sym.terms:
        d_mats = ctx.factor_field(term.dual)
        filtered = DualField(
            ctx.plancherel_grid, np.einsum("nij,njk->nik", d_mats, mats)
        )
        val = invert(filtered, g)
        c = term.coeff
        if term.spatial is not None:
            c = c * complex(term.spatial(g.x, g.y, g.t))
        total += c * val
    return complex(total)


def apply_on_grid(
    ctx: QuantizationContext,
    sym: SeparableSymbol,
    f: Profile,
    with_cutoff: bool = False,
) -> np.ndarray:
    """Op(sigma) f on the whole spatial box, shape (nx, ny, nt).

    The central coordinate enters the inversion integral only through the
    phase exp(i lam t), so trace sheets over (x, y) are assembled once per
    lambda node and the t-axis is an outer product.
    """
    if ctx.spatial_grid is None:
        raise ConfigurationError("spatial route needs a spatial grid in the context")
    from .reps import rep_matrix

    xs, _ = ctx.spatial_grid.axis(0)
    ys, _ = ctx.spatial_grid.axis(1)
    ts, _ = ctx.spatial_grid.axis(2)
    f_field = ctx.field_of(f)
    mats = f_field.mats
    if with_cutoff:
        mats = ctx.cutoff_diag()[:, :, None] * mats
    w = ctx.plancherel_grid.measure_weights
    reps = ctx.plancherel_grid.rep_points()

    out = np.zeros((len(xs), len(ys), len(ts)), dtype=complex)
    for term in sym.terms:
        d_mats = ctx.factor_field(term.dual)
        filtered = np.einsum("nij,njk->nik", d_mats, mats)
        sheets = np.zeros((len(reps), len(xs), len(ys)), dtype=complex)
        for n, rp in enumerate(reps):
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    sheets[n, i, j] = np.trace(
                        rep_matrix(rp, GroupPoint(x, y, 0.0)) @ filtered[n]
                    )
        phases = np.exp(1j * np.outer(ctx.plancherel_grid.lambdas, ts))
        vals = np.einsum("n,nxy,nt->xyt", w, sheets, phases)
        if term.spatial is not None:
            vals = vals * term.spatial(
                xs[:, None, None], ys[None, :, None], ts[None, None, :]
            )
        out += term.coeff * vals
    return out


def quadratic_form_spatial(
    ctx: QuantizationContext,
    sym: SeparableSymbol,
    u: Profile,
    v: Profile | None = None,
    with_cutoff: bool = False,
) -> complex:
    """Cross-validation route: integral of Op(sigma)u times conj(v) on the box."""
    vv = u if v is None else v
    vals = apply_on_grid(ctx, sym, u, with_cutoff=with_cutoff)
    xs, wx = ctx.spatial_grid.axis(0)
    ys, wy = ctx.spatial_grid.axis(1)
    ts, wt = ctx.spatial_grid.axis(2)
    vvals = np.conj(vv(xs[:, None, None], ys[None, :, None], ts[None, None, :]) + 0j)
    return complex(np.einsum("i,j,k,ijk->", wx, wy, wt, vals * vvals))


def positivity_probe(
    ctx: QuantizationContext,
    tau: SeparableSymbol,
    u: Profile,
    psi: SpectralMultiplier | None = None,
) -> float:
    """Real part of the form with symbol tau* tau psi; nonnegative in the limit."""
    sigma = tau.adjoint().multiply(tau)
    if psi is not None:
        saved = ctx.cutoff
        ctx.cutoff = psi
        try:
            val = quadratic_form(ctx, sigma, u)
        finally:
            ctx.cutoff = saved
    else:
        val = quadratic_form(ctx, sigma, u)
    return float(np.real(val))
