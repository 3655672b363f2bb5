"""Anisotropic (beta) distance, beta-balls and the beta-spherical chart."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError


@dataclass(frozen=True)
class BetaParams:
    """Exponent vector of the beta-distance with its derived constants.

    ``abs_beta`` is the sum of the exponents, ``a = 2|beta|/n`` is the scale
    that turns Euclidean-style kernel powers into beta-distance powers, and
    ``k`` is the quasi-triangle constant.
    """

    beta: tuple[float, ...]
    n: int = field(init=False)
    abs_beta: float = field(init=False)
    a: float = field(init=False)
    beta_min: float = field(init=False)
    log2_k: float = field(init=False)

    def __post_init__(self) -> None:
        beta = tuple(float(b) for b in self.beta)
        if len(beta) < 1:
            raise ContractError("beta must have at least one component")
        if any(not math.isfinite(b) or b < 0.5 for b in beta):
            raise ContractError(f"every beta_i must be >= 1/2, got {beta}")
        n = len(beta)
        abs_beta = math.fsum(beta)
        beta_min = min(beta)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "abs_beta", abs_beta)
        object.__setattr__(self, "a", 2.0 * abs_beta / n)
        object.__setattr__(self, "beta_min", beta_min)
        # k = 2 ** e with e = (1 + 1/beta_min) ** (|beta|/n); keep e, k may overflow
        object.__setattr__(
            self, "log2_k", math.exp((abs_beta / n) * math.log1p(1.0 / beta_min))
        )

    @classmethod
    def isotropic(cls, n: int) -> BetaParams:
        return cls((0.5,) * n)

    @property
    def k(self) -> float:
        if self.log2_k > 1023:
            return math.inf
        return 2.0**self.log2_k

    @property
    def is_isotropic(self) -> bool:
        return all(b == 0.5 for b in self.beta)

    @property
    def beta_array(self) -> np.ndarray:
        return np.asarray(self.beta)

    def kernel_exponent(self, p: float) -> float:
        """Power of the beta-distance in the order-p fractional kernel, (n-p)a."""
        return (self.n - p) * self.a


def _as_points(x, bp: BetaParams) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (bp.n,):
        raise ContractError(
            f"point dimension {arr.shape[-1] if arr.ndim else 0} does not match n={bp.n}"
        )
    return arr


def beta_norm(x, bp: BetaParams) -> np.ndarray | float:
    """|x|_beta, vectorised over the leading axes of ``x``."""
    arr = _as_points(x, bp)
    inv = 1.0 / bp.beta_array
    s = np.sum(np.abs(arr) ** inv, axis=-1)
    out = s ** (bp.abs_beta / bp.n)
    return float(out) if np.ndim(out) == 0 else out


def beta_distance(x, y, bp: BetaParams) -> np.ndarray | float:
    """The beta-distance (sum_i |x_i - y_i|^{1/beta_i})^{|beta|/n}."""
    xa = _as_points(x, bp)
    ya = _as_points(y, bp)
    return beta_norm(xa - ya, bp)


def quasi_triangle_constant(bp: BetaParams) -> float:
    """k = 2^{(1 + 1/beta_min)^{|beta|/n}}; ``inf`` when it overflows a double."""
    return bp.k


def homogeneity_scale(x, t, bp: BetaParams) -> np.ndarray:
    """Anisotropic dilation x -> (t^{beta_1} x_1, ..., t^{beta_n} x_n); ``t`` broadcasts over points."""
    t = np.asarray(t, dtype=float)
    if not np.all(t > 0):
        raise DomainError(f"dilation factor must be positive, got {t.min() if t.size else t}")
    arr = _as_points(x, bp)
    return arr * t[..., None] ** bp.beta_array


def in_ball(x, center, r: float, bp: BetaParams) -> np.ndarray | bool:
    """Membership in the open ball B_beta(center, r)."""
    if not r > 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    d = beta_distance(x, center, bp)
    out = np.asarray(d) < r
    return bool(out) if out.ndim == 0 else out


def ball_volume_exact(r: float, bp: BetaParams) -> float:
    """Lebesgue volume of B_beta(0, r) via the Dirichlet integral.

    vol = 2^n prod Gamma(1 + beta_i) / Gamma(1 + |beta|) * r^n.
    """
    logv = bp.n * math.log(2.0)
    logv += sum(math.lgamma(1.0 + b) for b in bp.beta) - math.lgamma(1.0 + bp.abs_beta)
    return math.exp(logv) * r**bp.n


def angular_constant_exact(bp: BetaParams) -> float:
    """C such that the integral of g(|y|_beta) over R^n is C * int t^{n-1} g(t) dt."""
    return bp.n * ball_volume_exact(1.0, bp)


def bounding_half_widths(r: float, bp: BetaParams) -> np.ndarray:
    """Half side lengths of the smallest box containing B_beta(0, r)."""
    return r ** (2.0 * bp.beta_array / bp.a)


# -- beta-spherical chart -----------------------------------------------------


@dataclass(frozen=True)
class BetaSphericalCoord:
    """Chart point: radial parameter, n-1 angles, orthant sign vector.

    Angles are restricted to [0, pi/2] so every directional factor is
    nonnegative; the orthant is chosen by ``signs``.
    """

    rho: float
    angles: tuple[float, ...] = ()
    signs: tuple[int, ...] | None = None

    def validate(self, bp: BetaParams) -> None:
        if self.rho < 0:
            raise DomainError(f"rho must be >= 0, got {self.rho}")
        if len(self.angles) != bp.n - 1:
            raise ContractError(f"expected {bp.n - 1} angles, got {len(self.angles)}")
        for i, phi in enumerate(self.angles):
            hi = math.pi if i < bp.n - 2 else 2 * math.pi
            if not 0.0 <= phi <= hi:
                raise DomainError(f"angle {i} = {phi} outside [0, {hi}]")
        if self.signs is not None:
            if len(self.signs) != bp.n or any(s not in (1, -1) for s in self.signs):
                raise ContractError(f"signs must be n values in {{+1,-1}}, got {self.signs}")


def direction_factors(angles: Sequence[float] | np.ndarray, n: int) -> np.ndarray:
    """Standard spherical direction components omega_i(phi), vectorised.

    ``angles`` has shape (..., n-1); the result has shape (..., n).
    """
    ang = np.asarray(angles, dtype=float)
    if n == 1:
        return np.ones(ang.shape[:-1] + (1,))
    lead = ang.shape[:-1]
    out = np.empty(lead + (n,))
    sin_prod = np.ones(lead)
    for i in range(n - 1):
        out[..., i] = sin_prod * np.cos(ang[..., i])
        sin_prod = sin_prod * np.sin(ang[..., i])
    out[..., n - 1] = sin_prod
    return out


def angular_density(angles, n: int) -> np.ndarray:
    """Standard spherical surface density prod_j sin^{n-1-j}(phi_j)."""
    ang = np.asarray(angles, dtype=float)
    dens = np.ones(ang.shape[:-1]) if n > 1 else np.ones(())
    for j in range(n - 2):
        dens = dens * np.sin(ang[..., j]) ** (n - 2 - j)
    return dens


def beta_sphere_map(c: BetaSphericalCoord, bp: BetaParams) -> np.ndarray:
    """x_i = sign_i * (rho * omega_i)^{2 beta_i}; |x|_beta = rho^{2|beta|/n}."""
    c.validate(bp)
    omega = direction_factors(np.asarray(c.angles, dtype=float), bp.n)
    if np.any(omega < 0):
        bad = [i for i, w in enumerate(omega) if w < 0 and (2 * bp.beta[i]) % 1 != 0]
        if bad:
            raise DomainError(
                "negative directional factor raised to a non-integer power; "
                "use angles in [0, pi/2] and the signs vector"
            )
    signs = np.ones(bp.n) if c.signs is None else np.asarray(c.signs, dtype=float)
    mag = (c.rho * np.abs(omega)) ** (2.0 * bp.beta_array)
    # an integer power of a negative factor keeps its own sign
    own_sign = np.where(omega < 0, (-1.0) ** np.round(2.0 * bp.beta_array), 1.0)
    return signs * own_sign * mag


def beta_sphere_jacobian(c: BetaSphericalCoord, bp: BetaParams) -> float:
    """|det dx/d(rho, phi)| for the chart, per orthant.

    rho^{2|beta|-1} * prod_i 2 beta_i omega_i^{2 beta_i - 1} * angular density.
    Each beta_i >= 1/2, so the factors stay bounded at omega_i = 0.
    """
    c.validate(bp)
    omega = np.abs(direction_factors(np.asarray(c.angles, dtype=float), bp.n))
    chain = np.prod(2.0 * bp.beta_array * omega ** (2.0 * bp.beta_array - 1.0))
    dens = angular_density(np.asarray(c.angles, dtype=float), bp.n) if bp.n > 1 else 1.0
    return float(c.rho ** (2.0 * bp.abs_beta - 1.0) * chain * dens)
