"""Gaussian wavepacket profiles with closed-form Fourier data.

The resolvable function class used everywhere in the package: finite sums of
separable terms

    c * wx(x) * wy(y) * wt(t),    w(s) = s^p exp(-a (s - s0)^2 / 2) exp(i w s),

with integer power p >= 0, decay a >= 0 and real center/frequency.  The class
is closed under products, coordinate multiplication, conjugation, reflection
and dilation, and every 1D factor has a closed-form Fourier transform and
closed-form pair integrals.  Concentrating and oscillating test sequences,
spatial symbol factors and all registered test profiles live in this class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, NotIntegrableError

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def gauss_moments(a: float, mu, pmax: int):
    """Moments E[s^p], p = 0..pmax, of the Gaussian with mean mu, variance 1/a.

    Valid for complex (array) mu; standard two-term recurrence.
    """
    mu = np.asarray(mu, dtype=complex)
    out = np.empty((pmax + 1,) + mu.shape, dtype=complex)
    out[0] = 1.0
    if pmax >= 1:
        out[1] = mu
    for p in range(2, pmax + 1):
        out[p] = mu * out[p - 1] + ((p - 1) / a) * out[p - 2]
    return out


def _moment_poly_coeffs(a: float, p: int) -> np.ndarray:
    """Coefficients c[j] with E[s^p] = sum_j c[j] mu^j for variance 1/a."""
    # m_p(mu) = mu m_{p-1}(mu) + ((p-1)/a) m_{p-2}(mu)
    polys = [np.array([1.0 + 0j])]
    if p >= 1:
        polys.append(np.array([0.0, 1.0 + 0j]))
    for n in range(2, p + 1):
        shifted = np.concatenate([[0.0], polys[n - 1]])
        lower = np.concatenate([polys[n - 2], [0.0, 0.0]])
        polys.append(shifted + ((n - 1) / a) * lower[: n + 1])
    return polys[p]


@dataclass(frozen=True)
class Wavepacket1D:
    """s^power * exp(-decay (s - center)^2 / 2) * exp(i freq s)."""

    power: int = 0
    decay: float = 0.0
    center: float = 0.0
    freq: float = 0.0

    def __post_init__(self):
        if self.power < 0:
            raise DomainError("power must be a nonnegative integer")
        if self.decay < 0:
            raise DomainError("decay must be nonnegative")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        val = np.exp(-0.5 * self.decay * (s - self.center) ** 2 + 1j * self.freq * s)
        if self.power:
            val = val * s**self.power
        return val

    # -- algebra ----------------------------------------------------------

    def conj(self) -> "Wavepacket1D":
        return Wavepacket1D(self.power, self.decay, self.center, -self.freq)

    def reflected(self):
        """(-1)^power factor and the packet of s -> w(-s)."""
        sign = -1.0 if self.power % 2 else 1.0
        return sign, Wavepacket1D(self.power, self.decay, -self.center, -self.freq)

    def dilated(self, c: float):
        """Scalar factor and packet of s -> w(c s), c > 0."""
        if c <= 0:
            raise DomainError("dilation factor must be positive")
        return c**self.power, Wavepacket1D(
            self.power, self.decay * c * c, self.center / c, self.freq * c
        )

    def times_power(self, q: int) -> "Wavepacket1D":
        return Wavepacket1D(self.power + q, self.decay, self.center, self.freq)

    def product(self, other: "Wavepacket1D"):
        """Scalar factor and packet of the pointwise product."""
        a = self.decay + other.decay
        if a == 0:
            c_new = 0.0
            const = 1.0
        else:
            c_new = (self.decay * self.center + other.decay * other.center) / a
            const = math.exp(
                -0.5
                * (self.decay * self.center**2 + other.decay * other.center**2)
                + 0.5 * a * c_new**2
            )
        return const, Wavepacket1D(
            self.power + other.power, a, c_new, self.freq + other.freq
        )

    def derivative_terms(self):
        """(coeff, packet) terms of d/ds w."""
        out = []
        if self.power:
            out.append((complex(self.power), self.times_power(-1)))
        if self.decay:
            out.append((complex(-self.decay), self.times_power(1)))
        c0 = self.decay * self.center + 1j * self.freq
        if c0 != 0:
            out.append((c0, self))
        return out

    # -- analysis ---------------------------------------------------------

    def ft(self, k):
        """Fourier transform  integral w(s) exp(-i k s) ds  (needs decay > 0)."""
        a = self.decay
        if a <= 0:
            raise NotIntegrableError("Fourier transform requires positive decay")
        k = np.asarray(k, dtype=float)
        mu = self.center + 1j * (self.freq - k) / a
        mom = gauss_moments(a, mu, self.power)[self.power]
        phase = np.exp(
            -((k - self.freq) ** 2) / (2.0 * a)
            + 1j * self.center * (self.freq - k)
        )
        return SQRT_TWO_PI / math.sqrt(a) * phase * mom

    def ft_as_packets(self):
        """Exact expansion of ``ft`` as a list of (coeff, Wavepacket1D) in k."""
        a = self.decay
        if a <= 0:
            raise NotIntegrableError("Fourier transform requires positive decay")
        base = SQRT_TWO_PI / math.sqrt(a) * np.exp(1j * self.center * self.freq)
        # E[s^p] with mu(k) = (center + i freq / a) - (i / a) k : expand in k
        cpoly = _moment_poly_coeffs(a, self.power)
        mu0 = self.center + 1j * self.freq / a
        slope = -1j / a
        kcoef = np.zeros(self.power + 1, dtype=complex)
        for j, cj in enumerate(cpoly):
            if cj == 0:
                continue
            for l in range(j + 1):
                kcoef[l] += cj * math.comb(j, l) * mu0 ** (j - l) * slope**l
        out = []
        for l, cl in enumerate(kcoef):
            if cl == 0 and l > 0:
                continue
            out.append(
                (
                    base * cl,
                    Wavepacket1D(l, 1.0 / a, self.freq, -self.center),
                )
            )
        return out

    def pair_integral(self, other: "Wavepacket1D") -> complex:
        """integral conj(self)(s) other(s) ds in closed form."""
        a = self.decay + other.decay
        if a <= 0:
            raise NotIntegrableError("pair integral requires positive total decay")
        p = self.power + other.power
        b = (
            self.decay * self.center
            + other.decay * other.center
            + 1j * (other.freq - self.freq)
        )
        const = math.exp(
            -0.5 * (self.decay * self.center**2 + other.decay * other.center**2)
        )
        mu = b / a
        mom = gauss_moments(a, mu, p)[p]
        return complex(
            const * SQRT_TWO_PI / math.sqrt(a) * np.exp(b * b / (2.0 * a)) * mom
        )

    def integral(self) -> complex:
        return self.pair_integral(Wavepacket1D())

    def key(self):
        return (self.power, self.decay, self.center, self.freq)


CONST_1D = Wavepacket1D()


@dataclass(frozen=True)
class Term:
    coeff: complex
    wx: Wavepacket1D
    wy: Wavepacket1D
    wt: Wavepacket1D


class Profile:
    """Finite sum of separable wavepacket terms on the group."""

    def __init__(self, terms: Iterable[Term]):
        self.terms = tuple(terms)

    # -- construction -------------------------------------------------

    @classmethod
    def gaussian(cls, widths=(1.0, 1.0, 1.0), center=(0.0, 0.0, 0.0),
                 phases=(0.0, 0.0, 0.0), powers=(0, 0, 0), coeff=1.0):
        """Single-term profile; ``widths`` are the Gaussian std deviations."""
        packs = [
            Wavepacket1D(p, 1.0 / s**2, c, w)
            for p, s, c, w in zip(powers, widths, center, phases)
        ]
        return cls([Term(complex(coeff), *packs)])

    @classmethod
    def separable(cls, wx, wy, wt, coeff=1.0):
        return cls([Term(complex(coeff), wx, wy, wt)])

    def key(self):
        return tuple((t.coeff, t.wx.key(), t.wy.key(), t.wt.key()) for t in self.terms)

    # -- evaluation -----------------------------------------------------

    def __call__(self, x, y, t):
        x, y, t = np.asarray(x, float), np.asarray(y, float), np.asarray(t, float)
        total = 0.0
        for term in self.terms:
            total = total + term.coeff * term.wx(x) * term.wy(y) * term.wt(t)
        return total

    # -- linear / multiplicative algebra ---------------------------------

    def __add__(self, other: "Profile") -> "Profile":
        return Profile(self.terms + other.terms)

    def scaled(self, c) -> "Profile":
        return Profile([Term(t.coeff * c, t.wx, t.wy, t.wt) for t in self.terms])

    def __mul__(self, other: "Profile") -> "Profile":
        out = []
        for t1 in self.terms:
            for t2 in other.terms:
                cx, wx = t1.wx.product(t2.wx)
                cy, wy = t1.wy.product(t2.wy)
                ct, wt = t1.wt.product(t2.wt)
                out.append(Term(t1.coeff * t2.coeff * cx * cy * ct, wx, wy, wt))
        return Profile(out)

    def conj(self) -> "Profile":
        return Profile(
            [
                Term(np.conj(t.coeff), t.wx.conj(), t.wy.conj(), t.wt.conj())
                for t in self.terms
            ]
        )

    def compose_inverse(self) -> "Profile":
        """Profile of g -> f(g^{-1}); coordinates of g^{-1} are negated."""
        out = []
        for t in self.terms:
            sx, wx = t.wx.reflected()
            sy, wy = t.wy.reflected()
            st, wt = t.wt.reflected()
            out.append(Term(t.coeff * sx * sy * st, wx, wy, wt))
        return Profile(out)

    def dilate_arg(self, r: float) -> "Profile":
        """Profile of g -> f(D_r g)."""
        out = []
        for t in self.terms:
            cx, wx = t.wx.dilated(r)
            cy, wy = t.wy.dilated(r)
            ct, wt = t.wt.dilated(r * r)
            out.append(Term(t.coeff * cx * cy * ct, wx, wy, wt))
        return Profile(out)

    def l2_dilated(self, r: float) -> "Profile":
        """f_(r) = r^{-Q} f o D_{1/r}, the L1-normalised dilation."""
        return self.dilate_arg(1.0 / r).scaled(r**-4)

    def concentrated(self, k: float) -> "Profile":
        """k^{Q/2} f o D_k, the L2-normalised concentration at scale k."""
        return self.dilate_arg(k).scaled(k**2)

    def mul_coord(self, axis: int, power: int = 1) -> "Profile":
        """Multiply by x^power, y^power or t^power (axis 0, 1, 2)."""
        out = []
        for t in self.terms:
            packs = [t.wx, t.wy, t.wt]
            packs[axis] = packs[axis].times_power(power)
            out.append(Term(t.coeff, *packs))
        return Profile(out)

    def partial(self, axis: int) -> "Profile":
        """Coordinate partial derivative along the given axis."""
        out = []
        for t in self.terms:
            packs = [t.wx, t.wy, t.wt]
            for c, dp in packs[axis].derivative_terms():
                new = list(packs)
                new[axis] = dp
                out.append(Term(t.coeff * c, *new))
        return Profile(out)

    def left_field(self, which: str, g) -> complex:
        """Analytic left-invariant derivative at a point (protocol hook)."""
        x, y, t = g
        if which == "X":
            val = self.partial(0)(x, y, t) - 0.5 * y * self.partial(2)(x, y, t)
        elif which == "Y":
            val = self.partial(1)(x, y, t) + 0.5 * x * self.partial(2)(x, y, t)
        elif which == "T":
            val = self.partial(2)(x, y, t)
        else:
            raise DomainError(f"unknown field {which!r}")
        return complex(val)

    # -- integrals --------------------------------------------------------

    def l2_inner(self, other: "Profile") -> complex:
        """(self, other)_{L^2} = integral self conj(other), in closed form."""
        total = 0.0 + 0.0j
        for t1 in self.terms:
            for t2 in other.terms:
                # per axis: integral w1 conj(w2) = pair_integral(conj by w2)
                total += (
                    t1.coeff
                    * np.conj(t2.coeff)
                    * t2.wx.pair_integral(t1.wx)
                    * t2.wy.pair_integral(t1.wy)
                    * t2.wt.pair_integral(t1.wt)
                )
        return complex(total)

    def l2_norm2(self) -> float:
        return float(np.real(self.l2_inner(self)))

    def integral(self) -> complex:
        total = 0.0 + 0.0j
        for t in self.terms:
            total += t.coeff * t.wx.integral() * t.wy.integral() * t.wt.integral()
        return complex(total)

    # -- resolution metadata ----------------------------------------------

    def t_frequency_bound(self) -> float:
        return max(abs(t.wt.freq) for t in self.terms)

    def min_decay(self, axis: int) -> float:
        packs = {0: "wx", 1: "wy", 2: "wt"}[axis]
        return min(getattr(t, packs).decay for t in self.terms)


# ---------------------------------------------------------------------------
# registered test profiles


def _registry() -> dict[str, Callable[[], Profile]]:
    return {
        # L2 test profiles for the Plancherel / Parseval suites
        "gaussian": lambda: Profile.gaussian(),
        "gaussian_x": lambda: Profile.gaussian(powers=(1, 0, 0)),
        "gaussian_tphase": lambda: Profile.gaussian(phases=(0.0, 0.0, 3.0)),
        "laguerre0": lambda: Profile.gaussian(
            widths=(math.sqrt(2.0), math.sqrt(2.0), 1.0), phases=(0.0, 0.0, 1.0)
        ),
        "shifted_gaussian": lambda: Profile.gaussian(center=(0.6, -0.4, 0.8)),
        # spatial symbol factors (value 1 at the origin, slowly varying)
        "phi_gauss": lambda: Profile.gaussian(widths=(2.0, 2.0, 2.0)),
        "phi_t": lambda: Profile.separable(
            CONST_1D, CONST_1D, Wavepacket1D(0, 0.25, 0.0, 0.0)
        ),
    }


PROFILE_REGISTRY = _registry()


def named_profile(name: str) -> Profile:
    try:
        return PROFILE_REGISTRY[name]()
    except KeyError:
        raise DomainError(
            f"unknown profile {name!r}; known: {sorted(PROFILE_REGISTRY)}"
        ) from None
