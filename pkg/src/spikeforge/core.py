"""Domain types shared by every solver: exponent pairs, radial coefficient
fields, and annulus/ball domains.

Coefficient fields form a closed symbolic family (constants, powers of the
radius, and products of those) instead of arbitrary callbacks, so values,
gradients and bounds are exact and reproducible.  Every field in the closed
family collapses to a single monomial ``S * |x|**E``, which is what makes
per-domain bounds and boundary log-derivatives trivial to compute.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


# --------------------------------------------------------------------------
# errors
# --------------------------------------------------------------------------

class SpikeforgeError(Exception):
    """Base class for all package errors."""


class RangeViolation(SpikeforgeError):
    """Exponents outside p, q > 1 or dimension below 3."""


class SubcriticalViolation(SpikeforgeError):
    """(p, q) pair on or above the critical hyperbola for dimension n."""


class SingularPoint(SpikeforgeError):
    """Field evaluation at a point where the form is singular (|x| = 0)."""


class NotOnBoundary(SpikeforgeError):
    """Point not on any boundary component of the domain."""


class BadResolution(SpikeforgeError):
    """Grid resolution below the supported minimum."""


class ShootingFailure(SpikeforgeError):
    """Bisection bracket for the shooting parameter could not be found."""


class NewtonDivergence(SpikeforgeError):
    """Damped Newton failed to reach the residual tolerance."""


class NonPositive(SpikeforgeError):
    """Iterate left the positive cone and projection failed."""


class CollapsedToTrivial(SpikeforgeError):
    """Solver converged to the zero or a near-constant solution."""


class TailTooShort(SpikeforgeError):
    """Profile not decayed enough before the fit window; increase R_max."""


class InsufficientData(SpikeforgeError):
    """Not enough sweep entries for the requested fit."""


class UnsupportedDimension(SpikeforgeError):
    """Reduced dimension not one of the Hopf-fibration values {3, 5, 9}."""


class ConfigError(SpikeforgeError):
    """Malformed or unknown configuration input."""


# --------------------------------------------------------------------------
# exponents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Exponents:
    """Validated exponent pair (p, q) with ambient dimension n.

    Invariants: p, q > 1, n >= 3 integer, and the strict subcritical
    condition 1/(p+1) + 1/(q+1) > (n-2)/n.
    """

    p: float
    q: float
    n: int

    @property
    def pq_minus_1(self) -> float:
        return self.p * self.q - 1.0

    @property
    def hyperbola_margin(self) -> float:
        """1/(p+1) + 1/(q+1) - (n-2)/n; positive iff strictly subcritical."""
        return 1.0 / (self.p + 1.0) + 1.0 / (self.q + 1.0) - (self.n - 2.0) / self.n


def validate_exponents(p: float, q: float, n: int) -> Exponents:
    """Validate (p, q, n) against the strict subcritical condition.

    Raises RangeViolation when p <= 1, q <= 1 or n < 3, and
    SubcriticalViolation when 1/(p+1) + 1/(q+1) is not strictly greater
    than (n-2)/n.  No tolerance is applied: borderline pairs are rejected.
    """
    if int(n) != n:
        raise RangeViolation(f"dimension n must be an integer, got {n!r}")
    n = int(n)
    if p <= 1.0 or q <= 1.0:
        raise RangeViolation(f"exponents must satisfy p, q > 1, got p={p}, q={q}")
    if n < 3:
        raise RangeViolation(f"dimension must satisfy n >= 3, got n={n}")
    exp = Exponents(float(p), float(q), n)
    if not (exp.hyperbola_margin > 0.0):
        raise SubcriticalViolation(
            f"(p, q)=({p}, {q}) fails the strict subcritical condition at n={n}: "
            f"1/(p+1)+1/(q+1) = {1/(p+1)+1/(q+1):.6g} is not > (n-2)/n = {(n-2)/n:.6g}"
        )
    if not (exp.pq_minus_1 > 0.0):
        # implied by p, q > 1; checked because it divides every derived exponent
        raise RangeViolation(f"pq - 1 must be positive, got {exp.pq_minus_1}")
    return exp


# --------------------------------------------------------------------------
# coefficient fields
# --------------------------------------------------------------------------

_SINGULAR_RADIUS = 1e-300


@dataclass(frozen=True)
class CoefficientField:
    """Base class of the closed family of radial coefficient fields."""

    def value(self, x: np.ndarray) -> float:
        return self.value_radial(float(np.linalg.norm(x)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value_radial(self, r: float) -> float:
        raise NotImplementedError

    def as_monomial(self) -> tuple[float, float]:
        """Collapse the form to (S, E) with value = S * r**E."""
        raise NotImplementedError

    def dlog_dr(self, r: float) -> float:
        """d/dr log(value) at radius r; equals E/r for the monomial S*r^E."""
        _, e = self.as_monomial()
        if e == 0.0:
            return 0.0
        if r <= _SINGULAR_RADIUS:
            raise SingularPoint("log-derivative requested at |x| = 0")
        return e / r

    def bounds_on(self, r_min: float, r_max: float) -> tuple[float, float]:
        """Exact (K1, K2) over radii [r_min, r_max]; monomials are monotone."""
        s, e = self.as_monomial()
        if e < 0.0 and r_min <= 0.0:
            raise SingularPoint("negative radius exponent with domain touching |x| = 0")
        lo = self.value_radial(max(r_min, _SINGULAR_RADIUS) if e < 0 else r_min)
        hi = self.value_radial(r_max)
        k1, k2 = min(lo, hi), max(lo, hi)
        if not (k1 > 0.0 and np.isfinite(k2)):
            raise SingularPoint(f"field not positive and finite on [{r_min}, {r_max}]")
        return k1, k2


@dataclass(frozen=True)
class Constant(CoefficientField):
    k: float

    def __post_init__(self):
        if not (self.k > 0.0 and np.isfinite(self.k)):
            raise SingularPoint(f"constant field must be positive and finite, got {self.k}")

    def value_radial(self, r: float) -> float:
        return self.k

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

    def as_monomial(self) -> tuple[float, float]:
        return self.k, 0.0


@dataclass(frozen=True)
class PowerOfRadius(CoefficientField):
    """s * |x|**e with s > 0."""

    s: float
    e: float

    def __post_init__(self):
        if not (self.s > 0.0 and np.isfinite(self.s)):
            raise SingularPoint(f"power field scale must be positive, got {self.s}")

    def value_radial(self, r: float) -> float:
        if self.e == 0.0:
            return self.s
        if r <= _SINGULAR_RADIUS and self.e < 0.0:
            raise SingularPoint(f"|x|^{self.e} evaluated at |x| = 0")
        return self.s * r ** self.e

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.e == 0.0:
            return np.zeros_like(x)
        r = float(np.linalg.norm(x))
        if r <= _SINGULAR_RADIUS:
            if self.e >= 2.0:
                return np.zeros_like(x)
            raise SingularPoint(f"gradient of |x|^{self.e} singular at |x| = 0")
        return self.s * self.e * r ** (self.e - 2.0) * x

    def as_monomial(self) -> tuple[float, float]:
        return self.s, self.e


@dataclass(frozen=True)
class Product(CoefficientField):
    left: CoefficientField
    right: CoefficientField

    def value_radial(self, r: float) -> float:
        return self.left.value_radial(r) * self.right.value_radial(r)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (self.left.gradient(x) * self.right.value(x)
                + self.left.value(x) * self.right.gradient(x))

    def as_monomial(self) -> tuple[float, float]:
        s1, e1 = self.left.as_monomial()
        s2, e2 = self.right.as_monomial()
        return s1 * s2, e1 + e2


def evaluate_field(coeff: CoefficientField, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Evaluate (value, gradient) of a coefficient field at a point."""
    x = np.asarray(x, dtype=float)
    val = coeff.value(x)
    if not (val > 0.0 and np.isfinite(val)):
        raise SingularPoint(f"field value {val} not positive/finite at {x}")
    return val, coeff.gradient(x)


def scaled_power(base_scale: float, s: float, e: float) -> CoefficientField:
    """Field (base_scale * |x|)**e scaled by s, i.e. s * base_scale**e * |x|**e."""
    return PowerOfRadius(s * base_scale ** e, e)


# --------------------------------------------------------------------------
# domains
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryComponent:
    """One sphere of the domain boundary.

    ``inner_normal_sign`` is +1 when the unit normal pointing into the domain
    is the outward radial direction (inner sphere of an annulus) and -1 when
    it points toward the origin (outer sphere of an annulus, or a ball).
    """

    name: str
    radius: float
    inner_normal_sign: int


@dataclass(frozen=True)
class DomainSpec:
    """Annulus(a_r, b_r) or Ball(R) in dimension n."""

    shape: str                    # "annulus" | "ball"
    n: int
    radii: tuple[float, ...]      # (a_r, b_r) or (R,)

    def __post_init__(self):
        if self.shape not in ("annulus", "ball"):
            raise ConfigError(f"unknown domain shape {self.shape!r}")
        if self.shape == "annulus":
            a, b = self.radii
            if not (0.0 < a < b):
                raise ConfigError(f"annulus needs 0 < a_r < b_r, got {self.radii}")
        else:
            (rr,) = self.radii
            if not rr > 0.0:
                raise ConfigError(f"ball needs R > 0, got {self.radii}")
        if self.n < 3:
            raise RangeViolation(f"domain dimension must be >= 3, got {self.n}")

    @property
    def r_min(self) -> float:
        return self.radii[0] if self.shape == "annulus" else 0.0

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    def boundary_components(self) -> list[BoundaryComponent]:
        if self.shape == "annulus":
            a, b = self.radii
            return [BoundaryComponent("inner", a, +1),
                    BoundaryComponent("outer", b, -1)]
        return [BoundaryComponent("outer", self.radii[0], -1)]

    def component_at(self, radius: float, tol: float = 1e-9) -> BoundaryComponent:
        for comp in self.boundary_components():
            if abs(radius - comp.radius) <= tol * max(1.0, comp.radius):
                return comp
        raise NotOnBoundary(f"radius {radius} is not on the boundary of {self}")


def annulus(a_r: float, b_r: float, n: int) -> DomainSpec:
    return DomainSpec("annulus", n, (float(a_r), float(b_r)))


def ball(radius: float, n: int) -> DomainSpec:
    return DomainSpec("ball", n, (float(radius),))
