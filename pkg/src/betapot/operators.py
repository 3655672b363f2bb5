"""Fractional integrals, the mu bound, and the growth functions Phi, psi, G.

I_p^beta(f)(x) = int |f(y)| / |x-y|_beta^{s} dy with s = (n-p)a (generalized
convention) or s = n-p (paper-literal convention); I_{p,h}^beta divides the
kernel by h(|x-y|_beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ContractError, DivergenceError, DomainError
from .fields import ScalarField, WeightFunction
from .metric import BetaParams, beta_norm, bounding_half_widths
from .quadrature import (
    QuadratureConfig,
    RadialKernel,
    angular_constant,
    integrate_singular,
    ladder_edges,
    radial_integral,
    sphere_rule,
)
from .spaces import ModulusCurve, doubling_constant, kernel_exponent

BRACKET = (1e-12, 1e12)
INVERT_TOL = 1e-10


# -- fractional integrals -----------------------------------------------------


def covering_radius(f: ScalarField, x, bp: BetaParams) -> float:
    """Radius of a beta-ball centred at x that contains the support of f."""
    if f.support is None:
        raise ContractError(f"field {f.name!r} has no declared support; pass an explicit radius")
    c, R = np.asarray(f.support[0], float), float(f.support[1])
    xa = np.asarray(x, float)
    if np.allclose(c, xa, rtol=0, atol=1e-14):
        return R
    h = bounding_half_widths(R, bp)
    corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * bp.n, indexing="ij")).reshape(bp.n, -1).T
    d = beta_norm(c + corners * h - xa, bp)
    return float(np.max(d)) * (1 + 1e-9)


def _check_order(p: float, bp: BetaParams, convention: str) -> float:
    if not p >= 1:
        raise ContractError(f"fractional order p must be >= 1, got {p}")
    s = kernel_exponent(p, bp, convention)
    if s < 0:
        raise ContractError(f"order p={p} gives a negative kernel exponent in dimension {bp.n}")
    return s


def gen_frac_integral(
    f: ScalarField,
    p: float,
    h: WeightFunction | None,
    x,
    bp: BetaParams,
    cfg: QuadratureConfig | None = None,
    convention: str = "generalized",
    radius: float | None = None,
) -> float:
    """I_{p,h}^beta(f)(x), truncated to a ball around x that covers the support of f."""
    cfg = cfg or QuadratureConfig()
    s = _check_order(p, bp, convention)
    if f.is_zero:
        return 0.0
    R = covering_radius(f, x, bp) if radius is None else float(radius)
    return integrate_singular(f.power(1.0), s, x, R, bp, cfg, weight=h).value


def frac_integral(
    f: ScalarField,
    p: float,
    x,
    bp: BetaParams,
    cfg: QuadratureConfig | None = None,
    convention: str = "generalized",
    radius: float | None = None,
) -> float:
    """I_p^beta(f)(x)."""
    return gen_frac_integral(f, p, None, x, bp, cfg, convention, radius)


@lru_cache(maxsize=256)
def _kernel_core(ker: RadialKernel, t_core: float, n: int) -> tuple[float, float]:
    return radial_integral(ker, t_core, n)


def frac_integral_points(
    f: ScalarField,
    s: float,
    xs: np.ndarray,
    bp: BetaParams,
    radius: float,
    weight: WeightFunction | None = None,
    J: int = 12,
    radial_order: int = 16,
    angular_order: int = 8,
    chunk: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised int_{B(x, radius)} f(y) / (|x-y|^s weight(|x-y|)) dy at many x.

    Returns (values, error estimates); the error is the difference to the
    rule with halved orders. The core below radius 2^{-(J+1)} uses f(x).
    """
    xs = np.atleast_2d(np.asarray(xs, float))
    ker = RadialKernel(s, weight)
    edges = ladder_edges(radius, J)

    def offsets(ro: int, ao: int) -> tuple[np.ndarray, np.ndarray]:
        dirs, wang = sphere_rule(bp, ao)
        g, wg = np.polynomial.legendre.leggauss(ro)
        expo = 2.0 * bp.beta_array / bp.a
        pts, wts = [], []
        for k in range(J + 1):
            ul, uh = math.log(edges[k + 1]), math.log(edges[k])
            half = 0.5 * (uh - ul)
            t = np.exp(0.5 * (uh + ul) + half * g)
            rw = half * wg * t**bp.n / bp.a * ker(t)
            pts.append(((t[:, None] ** expo)[:, None, :] * dirs[None]).reshape(-1, bp.n))
            wts.append((rw[:, None] * wang[None]).ravel())
        return np.concatenate(pts), np.concatenate(wts)

    fine = offsets(radial_order, angular_order)
    coarse = offsets(max(2, radial_order // 2), max(2, angular_order // 2))
    core_v, core_e = _kernel_core(ker, float(edges[-1]), bp.n)
    C = angular_constant(bp, angular_order)
    vals = np.empty(len(xs))
    errs = np.empty(len(xs))
    for i0 in range(0, len(xs), chunk):
        xc = xs[i0 : i0 + chunk]
        fv = f(xc[:, None, :] + fine[0][None]) @ fine[1]
        cv = f(xc[:, None, :] + coarse[0][None]) @ coarse[1]
        f0 = f(xc)
        vals[i0 : i0 + chunk] = fv + C * core_v * f0
        errs[i0 : i0 + chunk] = np.abs(fv - cv) + C * core_e * np.abs(f0)
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("fractional integral is not finite at some evaluation point")
    return vals, errs


# -- Lemma 3 bound ------------------------------------------------------------


def mu_curve(eta: ModulusCurve, gamma: float, C: float) -> ModulusCurve:
    """mu(r) = (2/C) int_0^r t^{-1} eta^{1-gamma}(t) dt on the ladder of ``eta``.

    ``values`` is the direct integral of the log-log interpolated curve;
    ``meta`` carries the dyadic sandwich [lower, upper] built from
    log 2 * eta^{1-gamma} at the inner and outer rung of each shell. Below
    the ladder both use the fitted tail model.
    """
    if not 0 < gamma < 1:
        raise ContractError(f"need 0 < gamma < 1, got {gamma}")
    if not C > 0:
        raise ContractError("C must be positive")
    q = 1.0 - gamma
    r, v = eta.radii, eta.values
    if np.all(v == 0):
        z = np.zeros_like(r)
        return ModulusCurve(r, z, "mu", meta={"lower": z, "upper": z, "tail": 0.0, "gamma": gamma, "C": C})
    if np.any(v <= 0):
        raise DomainError("eta must be positive on the ladder (or identically zero)")
    tail = eta.tail()
    T = tail.log_integral(q)
    if not math.isfinite(T):
        raise DivergenceError(
            "int_0^1 t^{-1} eta^{1-gamma} dt diverges: the eta tail decays too slowly",
            trace={"tail": tail.kind, "exponent": tail.exponent},
        )
    L2 = math.log(2.0)
    lo_shell = L2 * v[1:] ** q
    hi_shell = L2 * v[:-1] ** q
    # exact integral of the log-log linear interpolant over each shell
    lv = np.log(v)
    direct = np.empty(len(r) - 1)
    for j in range(len(r) - 1):
        slope = (lv[j] - lv[j + 1]) / L2 * q
        a0 = v[j + 1] ** q
        direct[j] = a0 * L2 if abs(slope) < 1e-12 else a0 * np.expm1(slope * L2) / slope
    def cum(shells):
        out = np.zeros(len(r))
        out[:-1] = np.cumsum(shells[::-1])[::-1]
        return out + T

    scale = 2.0 / C
    lower, upper, value = scale * cum(lo_shell), scale * cum(hi_shell), scale * cum(direct)
    return ModulusCurve(
        r, value, "mu",
        meta={"lower": lower, "upper": upper, "tail": scale * T, "tail_model": tail.kind, "gamma": gamma, "C": C},
    )


def lemma3_C(eta: ModulusCurve, doubling_as_c: bool = False) -> float:
    """The constant C in mu = (2/C) int: 1/C_d (closes the proof chain), or C_d literally."""
    Cd = doubling_constant(eta)
    return Cd if doubling_as_c else 1.0 / Cd


# -- monotone inversion and growth functions ------------------------------------


def invert_monotone(
    F: Callable[[np.ndarray], np.ndarray],
    y,
    bracket: tuple[float, float] = BRACKET,
    tol: float = INVERT_TOL,
) -> np.ndarray:
    """Solve F(x) = y for increasing F by bisection in log x, vectorised over y."""
    y = np.asarray(y, float)
    lo = np.full(y.shape, math.log(bracket[0]))
    hi = np.full(y.shape, math.log(bracket[1]))
    Flo, Fhi = F(np.exp(lo)), F(np.exp(hi))
    if np.any(y < Flo) or np.any(y > Fhi):
        bad = y[(y < Flo) | (y > Fhi)]
        raise DomainError(
            f"value {bad.flat[0]:.6g} outside the range [{float(np.min(Flo)):.3g}, {float(np.max(Fhi)):.3g}] "
            f"of the function on the bracket {bracket}"
        )
    iters = int(math.ceil(math.log2((hi.flat[0] - lo.flat[0]) / tol))) + 1
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = F(np.exp(mid)) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.exp(0.5 * (lo + hi))


@dataclass
class GrowthFunctions:
    """Phi(e) = e^s phi(e), H(e) = e^s phi^sigma(e) (or e^s delta(e)), psi, and G = psi^{-1}."""

    phi: WeightFunction
    sigma: float
    s: float
    delta: WeightFunction | None = None
    bracket: tuple[float, float] = BRACKET
    tol: float = INVERT_TOL
    meta: dict = field(default_factory=dict)

    def Phi(self, e) -> np.ndarray:
        e = np.asarray(e, float)
        return e**self.s * self.phi(e)

    def H(self, e) -> np.ndarray:
        e = np.asarray(e, float)
        if self.delta is not None:
            return e**self.s * self.delta(e)
        return e**self.s * self.phi(e) ** self.sigma

    def Phi_inv(self, y) -> np.ndarray:
        return invert_monotone(self.Phi, y, self.bracket, self.tol)

    def H_inv(self, y) -> np.ndarray:
        return invert_monotone(self.H, y, self.bracket, self.tol)

    def psi(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        return 2.0 / self.H(self.Phi_inv(1.0 / t))

    def G(self, y) -> np.ndarray:
        """psi^{-1}(y) = 1 / Phi(H^{-1}(2/y)); G(0) = 0."""
        y = np.asarray(y, float)
        out = np.zeros(y.shape)
        pos = y > 0
        if np.any(pos):
            out[pos] = 1.0 / self.Phi(self.H_inv(2.0 / y[pos]))
        return out

    def G_safe(self, y) -> np.ndarray:
        """G with arguments below the invertible range mapped to G(y_min) >= G(y) (monotone)."""
        y = np.asarray(y, float)
        y_min = 2.0 / float(self.H(np.asarray(self.bracket[1]))) * (1 + 1e-9)
        y_max = 2.0 / float(self.H(np.asarray(self.bracket[0])))
        if np.any(y > y_max):
            raise DomainError(f"G argument {float(np.max(y)):.6g} above the invertible range")
        return self.G(np.where((y > 0) & (y < y_min), y_min, y))


def build_growth_function(
    phi: WeightFunction,
    sigma: float,
    p: float,
    bp: BetaParams,
    delta: WeightFunction | None = None,
    bracket: tuple[float, float] = BRACKET,
    convention: str = "generalized",
    verify: bool = True,
) -> GrowthFunctions:
    """Construct Phi, psi and G from phi; checks phi monotone and the round trip G(psi(t)) = t."""
    if not 0 < sigma < 1:
        raise ContractError(f"need 0 < sigma < 1, got {sigma}")
    if not 1 < p < bp.n and convention == "generalized":
        raise ContractError(f"need 1 < p < n, got p={p}")
    t = np.geomspace(bracket[0], bracket[1], 400)
    pv = phi(t)
    if np.any(~np.isfinite(pv)) or np.any(pv <= 0):
        raise ContractError(f"phi {phi.name!r} must be positive and finite on the bracket")
    if np.any(np.diff(pv) < -1e-12 * np.abs(pv[1:])):
        raise ContractError(f"phi {phi.name!r} is not non-decreasing on the sample ladder")
    if delta is not None:
        ratio = pv / delta(t)
        if np.any(np.diff(ratio) < -1e-12 * np.abs(ratio[1:])):
            raise ContractError("phi/delta must be non-decreasing")
    s = kernel_exponent(p, bp, convention)
    gf = GrowthFunctions(phi, sigma, s, delta, bracket)
    if verify:
        lad = np.geomspace(1e-2, 1e2, 50)
        back = gf.G(gf.psi(lad))
        err = float(np.max(np.abs(back / lad - 1.0)))
        gf.meta["round_trip_error"] = err
        if err > 1e-8:
            raise DomainError(f"growth-function round trip error {err:.3g} exceeds 1e-8")
    return gf


def balance_terms(gf: GrowthFunctions, I_phi: float, norm_p: float) -> tuple[float, float, float]:
    """At e = Phi^{-1}(||f||^p / I_phi): (e, phi^{1-sigma}(e) I_phi, ||f||^p / H(e))."""
    if not (I_phi > 0 and norm_p > 0):
        raise DomainError("balance needs positive I_phi and ||f||_p^p")
    e = float(gf.Phi_inv(np.asarray(norm_p / I_phi)))
    t1 = float(gf.phi(np.asarray(e))) ** (1.0 - gf.sigma) * I_phi
    t2 = norm_p / float(gf.H(np.asarray(e)))
    return e, t1, t2


def prop1_gamma(sigma: float, p: float, literal: bool = False) -> float:
    """gamma = 1/(sigma p'/p + 1); ``literal`` gives 1/(sigma + 1)."""
    if literal:
        return 1.0 / (sigma + 1.0)
    pprime = p / (p - 1.0)
    return 1.0 / (sigma * pprime / p + 1.0)
