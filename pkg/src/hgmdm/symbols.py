"""Separable operator symbols on the dual of H1.

A computational symbol is a finite sum of terms

    c * phi(x) * tau(pi),

where phi is a wavepacket profile on the group (or absent) and tau is a dual
factor: a 0-homogeneous two-point symbol (one matrix per sign of lambda), a
spectral multiplier psi(pi(R)) of the positive sub-Laplacian R, a power of
pi(R), an ordered word in the infinitesimal generators, or a product of
those.  The two-point form realises 0-homogeneous invariant symbols exactly:
the dual sphere of H1 has just the two atoms sgn(lambda) = +/- 1.

The module also provides the smooth spectral cut-off with exact 0/1 plateaus,
principal parts of differential operators, and the symbolic coefficient
tables of the Leibniz rule for difference operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy

from .errors import ConfigurationError, DomainError, InvalidSymbolError
from .group import GroupPoint, WEIGHTS
from .profiles import Profile
from .reps import RepPoint, infinitesimal, sublaplacian_eigenvalues


# ---------------------------------------------------------------------------
# dual factors


class DualFactor:
    """Field of operator matrices pi -> tau(pi), invariant in x."""

    homogeneous_order: float | None = None

    def eval(self, rp: RepPoint) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self) -> "DualFactor":
        raise NotImplementedError

    def key(self):
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityFactor(DualFactor):
    homogeneous_order = 0.0

    def eval(self, rp):
        return np.eye(rp.n_modes, dtype=complex)

    def adjoint(self):
        return self

    def key(self):
        return ("id",)


@dataclass(frozen=True)
class ModeProjector(DualFactor):
    """Rank-one projector onto the Hermite mode j, both signs of lambda."""

    j: int
    homogeneous_order = 0.0

    def __post_init__(self):
        if self.j < 0:
            raise DomainError("mode index must be nonnegative")

    def eval(self, rp):
        if self.j >= rp.n_modes:
            raise ConfigurationError(
                f"projector mode {self.j} outside truncation {rp.n_modes}"
            )
        mat = np.zeros((rp.n_modes, rp.n_modes), dtype=complex)
        mat[self.j, self.j] = 1.0
        return mat

    def adjoint(self):
        return self

    def key(self):
        return ("proj", self.j)


@dataclass(frozen=True)
class SignFactor(DualFactor):
    """sgn(lambda) times the identity; 0-homogeneous and self-adjoint."""

    homogeneous_order = 0.0

    def eval(self, rp):
        return math.copysign(1.0, rp.lam) * np.eye(rp.n_modes, dtype=complex)

    def adjoint(self):
        return self

    def key(self):
        return ("sign",)


class TwoPointSymbol(DualFactor):
    """Invariant 0-homogeneous symbol: one matrix per dual sphere atom."""

    homogeneous_order = 0.0

    def __init__(self, mat_plus: np.ndarray, mat_minus: np.ndarray | None = None):
        self.mat_plus = np.asarray(mat_plus, dtype=complex)
        self.mat_minus = (
            self.mat_plus if mat_minus is None else np.asarray(mat_minus, complex)
        )
        for m in (self.mat_plus, self.mat_minus):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ConfigurationError("two-point symbol matrices must be square")
        if self.mat_plus.shape != self.mat_minus.shape:
            raise ConfigurationError("sign atoms must share one dimension")

    def eval(self, rp):
        mat = self.mat_plus if rp.lam > 0 else self.mat_minus
        if mat.shape[0] != rp.n_modes:
            raise ConfigurationError(
                f"symbol dimension {mat.shape[0]} != truncation {rp.n_modes}"
            )
        return mat

    def adjoint(self):
        return TwoPointSymbol(self.mat_plus.conj().T, self.mat_minus.conj().T)

    def key(self):
        return ("twopoint", self.mat_plus.tobytes(), self.mat_minus.tobytes())


@dataclass(frozen=True)
class SpectralMultiplier(DualFactor):
    """psi(pi(R)) = diag(psi(|lam| (2n + 1))) for a scalar function psi."""

    fn: Callable
    label: str = "multiplier"

    def eval(self, rp):
        return np.diag(self.fn(sublaplacian_eigenvalues(rp)).astype(complex))

    def eval_diag(self, rp) -> np.ndarray:
        return self.fn(sublaplacian_eigenvalues(rp))

    def adjoint(self):
        return SpectralMultiplier(lambda v, f=self.fn: np.conj(f(v)), f"conj {self.label}")

    def key(self):
        return ("mult", self.label)


@dataclass(frozen=True)
class RocklandPower(DualFactor):
    """pi(R)^p, diagonal with entries (|lam| (2n + 1))^p; 2p-homogeneous."""

    p: float

    @property
    def homogeneous_order(self):
        return 2.0 * self.p

    def eval(self, rp):
        return np.diag(sublaplacian_eigenvalues(rp) ** self.p).astype(complex)

    def adjoint(self):
        return self

    def key(self):
        return ("rpow", self.p)


@dataclass(frozen=True)
class InfinitesimalWord(DualFactor):
    """Ordered product pi(X)^ax pi(Y)^ay pi(T)^at for a multi-index alpha."""

    alpha: tuple

    def __post_init__(self):
        if len(self.alpha) != 3 or any(a < 0 for a in self.alpha):
            raise DomainError("alpha must be a nonnegative multi-index (ax, ay, at)")

    @property
    def homogeneous_order(self):
        return float(sum(w * a for w, a in zip(WEIGHTS, self.alpha)))

    def eval(self, rp):
        mat = np.eye(rp.n_modes, dtype=complex)
        for gen, count in zip("XYT", self.alpha):
            g = infinitesimal(rp, gen)
            for _ in range(count):
                mat = mat @ g
        return mat

    def adjoint(self):
        # reversal of the adjoint word is not expressible as a single
        # ordered monomial in general; wrap in a product
        factors = []
        for gen, count in reversed(list(zip("XYT", self.alpha))):
            base = {"X": (1, 0, 0), "Y": (0, 1, 0), "T": (0, 0, 1)}[gen]
            for _ in range(count):
                factors.append(ScaledFactor(-1.0, InfinitesimalWord(base)))
        if not factors:
            return IdentityFactor()
        return FactorProduct(tuple(factors))

    def key(self):
        return ("xword", self.alpha)


@dataclass(frozen=True)
class ScaledFactor(DualFactor):
    c: complex
    inner: DualFactor

    @property
    def homogeneous_order(self):
        return self.inner.homogeneous_order

    def eval(self, rp):
        return self.c * self.inner.eval(rp)

    def adjoint(self):
        return ScaledFactor(np.conj(self.c), self.inner.adjoint())

    def key(self):
        return ("scaled", self.c, self.inner.key())


@dataclass(frozen=True)
class FactorProduct(DualFactor):
    factors: tuple

    @property
    def homogeneous_order(self):
        total = 0.0
        for f in self.factors:
            if f.homogeneous_order is None:
                return None
            total += f.homogeneous_order
        return total

    def eval(self, rp):
        mat = np.eye(rp.n_modes, dtype=complex)
        for f in self.factors:
            mat = mat @ f.eval(rp)
        return mat

    def adjoint(self):
        return FactorProduct(tuple(f.adjoint() for f in reversed(self.factors)))

    def key(self):
        return ("prod",) + tuple(f.key() for f in self.factors)


def factor_product(*factors: DualFactor) -> DualFactor:
    flat = []
    for f in factors:
        if isinstance(f, FactorProduct):
            flat.extend(f.factors)
        elif not isinstance(f, IdentityFactor):
            flat.append(f)
    if not flat:
        return IdentityFactor()
    if len(flat) == 1:
        return flat[0]
    return FactorProduct(tuple(flat))


# ---------------------------------------------------------------------------
# smooth spectral cut-off


def _ramp(s: np.ndarray) -> np.ndarray:
    """C-infinity ramp, exactly 0 for s <= 0 and exactly 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    lower = np.where(s > 0.0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
    upper = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    out = np.where(s <= 0.0, 0.0, np.where(s >= 1.0, 1.0, lower / (lower + upper)))
    return out


def smooth_cutoff(lam_low: float, lam_high: float) -> SpectralMultiplier:
    """Smooth bump: 0 on [0, lam_low], 1 on [lam_high, inf), smooth between."""
    if not (0 < lam_low < lam_high):
        raise DomainError("need 0 < lam_low < lam_high")

    def psi(v, lo=lam_low, hi=lam_high):
        return _ramp((np.asarray(v, float) - lo) / (hi - lo))

    return SpectralMultiplier(psi, f"bump[{lam_low:g},{lam_high:g}]")


# ---------------------------------------------------------------------------
# separable symbols


@dataclass(frozen=True)
class SymbolTerm:
    coeff: complex
    spatial: Profile | None
    dual: DualFactor


class SeparableSymbol:
    """Finite sum of (spatial factor) x (invariant dual factor) terms."""

    def __init__(self, terms: Sequence[SymbolTerm]):
        self.terms = tuple(terms)

    @classmethod
    def identity(cls) -> "SeparableSymbol":
        return cls([SymbolTerm(1.0 + 0j, None, IdentityFactor())])

    @classmethod
    def from_dual(cls, factor: DualFactor, coeff=1.0) -> "SeparableSymbol":
        return cls([SymbolTerm(complex(coeff), None, factor)])

    @classmethod
    def spatial(cls, phi: Profile, factor: DualFactor | None = None) -> "SeparableSymbol":
        return cls([SymbolTerm(1.0 + 0j, phi, factor or IdentityFactor())])

    def eval(self, g: GroupPoint, rp: RepPoint) -> np.ndarray:
        total = np.zeros((rp.n_modes, rp.n_modes), dtype=complex)
        for term in self.terms:
            c = term.coeff
            if term.spatial is not None:
                c = c * complex(term.spatial(g.x, g.y, g.t))
            mat = term.dual.eval(rp)
            if mat.shape != total.shape:
                raise ConfigurationError(
                    f"term dimension {mat.shape} mismatches truncation {rp.n_modes}"
                )
            total += c * mat
        return total

    def multiply(self, other: "SeparableSymbol") -> "SeparableSymbol":
        out = []
        for t1 in self.terms:
            for t2 in other.terms:
                if t1.spatial is None:
                    phi = t2.spatial
                elif t2.spatial is None:
                    phi = t1.spatial
                else:
                    phi = t1.spatial * t2.spatial
                out.append(
                    SymbolTerm(
                        t1.coeff * t2.coeff, phi, factor_product(t1.dual, t2.dual)
                    )
                )
        return SeparableSymbol(out)

    def adjoint(self) -> "SeparableSymbol":
        return SeparableSymbol(
            [
                SymbolTerm(
                    np.conj(t.coeff),
                    None if t.spatial is None else t.spatial.conj(),
                    t.dual.adjoint(),
                )
            for t in self.terms
            ]
        )

    def with_multiplier(self, mult: DualFactor) -> "SeparableSymbol":
        """Right-multiply every dual factor, e.g. by a spectral cut-off."""
        return SeparableSymbol(
            [
                SymbolTerm(t.coeff, t.spatial, factor_product(t.dual, mult))
                for t in self.terms
            ]
        )

    def scaled(self, c) -> "SeparableSymbol":
        return SeparableSymbol(
            [SymbolTerm(t.coeff * c, t.spatial, t.dual) for t in self.terms]
        )

    def __add__(self, other: "SeparableSymbol") -> "SeparableSymbol":
        return SeparableSymbol(self.terms + other.terms)

    @property
    def is_invariant(self) -> bool:
        return all(t.spatial is None for t in self.terms)

    def dual_orders(self) -> list:
        return [t.dual.homogeneous_order for t in self.terms]


# ---------------------------------------------------------------------------
# differential operators and principal parts


@dataclass(frozen=True)
class DiffOpDescriptor:
    """Sum of c_alpha(x) X^alpha with weighted multi-indices over (X, Y, T)."""

    terms: tuple  # ((coeff: complex | Profile, alpha: (ax, ay, at)), ...)

    def __post_init__(self):
        if not self.terms:
            raise DomainError("differential operator descriptor must be nonempty")
        for _, alpha in self.terms:
            if len(alpha) != 3 or any(a < 0 for a in alpha):
                raise DomainError("bad multi-index in descriptor")

    @property
    def order(self) -> int:
        return max(
            sum(w * a for w, a in zip(WEIGHTS, alpha)) for _, alpha in self.terms
        )


def principal_symbol(d: DiffOpDescriptor) -> SeparableSymbol:
    """Top weighted-degree part of the operator as a separable symbol."""
    m = d.order
    terms = []
    for coeff, alpha in d.terms:
        if sum(w * a for w, a in zip(WEIGHTS, alpha)) != m:
            continue
        if isinstance(coeff, Profile):
            terms.append(SymbolTerm(1.0 + 0j, coeff, InfinitesimalWord(tuple(alpha))))
        else:
            terms.append(
                SymbolTerm(complex(coeff), None, InfinitesimalWord(tuple(alpha)))
            )
    return SeparableSymbol(terms)


# ---------------------------------------------------------------------------
# Leibniz coefficients for difference operators


def compute_leibniz_coefficients(alpha: tuple, max_weight: int = 4) -> dict:
    """Coefficients c with (g1 g2)^alpha = sum c[(a1, a2)] g1^a1 g2^a2.

    Exact rational expansion of the product coordinates under the fixed group
    law; keys are pairs of multi-indices over (x, y, t).
    """
    if len(alpha) != 3 or any(a < 0 for a in alpha):
        raise DomainError("alpha must be a nonnegative multi-index over (x, y, t)")
    if sum(w * a for w, a in zip(WEIGHTS, alpha)) > max_weight:
        raise DomainError(
            f"weighted degree of {alpha} exceeds the configured cap {max_weight}"
        )
    x1, y1, t1, x2, y2, t2 = sympy.symbols("x1 y1 t1 x2 y2 t2")
    coords = (
        x1 + x2,
        y1 + y2,
        t1 + t2 + sympy.Rational(1, 2) * (x1 * y2 - x2 * y1),
    )
    expr = sympy.expand(coords[0] ** alpha[0] * coords[1] ** alpha[1] * coords[2] ** alpha[2])
    poly = sympy.Poly(expr, x1, y1, t1, x2, y2, t2)
    table = {}
    for monom, coeff in poly.terms():
        a1 = tuple(monom[:3])
        a2 = tuple(monom[3:])
        table[(a1, a2)] = Fraction(sympy.Rational(coeff).p, sympy.Rational(coeff).q)
    return table


def leibniz_expand(table: dict, g1: GroupPoint, g2: GroupPoint) -> Fraction | float:
    """Evaluate the table expansion at a pair of points (polynomial identity)."""
    total = 0.0
    for (a1, a2), c in table.items():
        v1 = g1.x ** a1[0] * g1.y ** a1[1] * g1.t ** a1[2]
        v2 = g2.x ** a2[0] * g2.y ** a2[1] * g2.t ** a2[2]
        total += float(c) * v1 * v2
    return total


# ---------------------------------------------------------------------------
# audits and the CLI symbol grammar


def homogeneity_audit(factor: DualFactor, r: float, grid) -> float:
    """Max deviation ||tau(lam) - tau(r^2 lam)|| over sign-matched nodes."""
    if r <= 0:
        raise DomainError("r must be positive")
    worst = 0.0
    for lam in grid.lambdas:
        a = factor.eval(RepPoint(lam, grid.n_modes))
        b = factor.eval(RepPoint(r * r * lam, grid.n_modes))
        worst = max(worst, float(np.linalg.norm(a - b, 2)))
    return worst


def parse_symbol_spec(spec: str, profile_lookup: Callable | None = None) -> SeparableSymbol:
    """Build a symbol from the CLI grammar.

    spec := [<profile-name> "*"] <dual>
    dual := "id" | "proj:<j>" | "sign" | "mult:bump:<lo>:<hi>"
    """
    spec = spec.strip()
    phi = None
    dual_spec = spec
    if "*" in spec:
        name, dual_spec = spec.split("*", 1)
        if profile_lookup is None:
            raise ConfigurationError("no profile registry supplied for spatial factor")
        phi = profile_lookup(name.strip())
    parts = dual_spec.strip().split(":")
    try:
        if parts[0] == "id" and len(parts) == 1:
            dual: DualFactor = IdentityFactor()
        elif parts[0] == "proj" and len(parts) == 2:
            dual = ModeProjector(int(parts[1]))
        elif parts[0] == "sign" and len(parts) == 1:
            dual = SignFactor()
        elif parts[0] == "mult" and len(parts) == 4 and parts[1] == "bump":
            dual = smooth_cutoff(float(parts[2]), float(parts[3]))
        else:
            raise ValueError(f"unrecognised dual spec {dual_spec!r}")
    except (ValueError, IndexError) as exc:
        raise ConfigurationError(f"bad symbol spec {spec!r}: {exc}") from exc
    if phi is None:
        return SeparableSymbol.from_dual(dual)
    return SeparableSymbol([SymbolTerm(1.0 + 0j, phi, dual)])


def symbol_dictionary(n_proj: int = 4) -> dict:
    """The invariant test dictionary: projectors, identity, sign, bump."""
    out = {"id": SeparableSymbol.identity(), "sign": SeparableSymbol.from_dual(SignFactor())}
    for j in range(n_proj):
        out[f"proj:{j}"] = SeparableSymbol.from_dual(ModeProjector(j))
    out["mult:bump:0.5:2"] = SeparableSymbol.from_dual(smooth_cutoff(0.5, 2.0))
    return out
