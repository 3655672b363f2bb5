"""Integration over beta-balls and beta-annuli.

Integrals are computed in the beta-spherical chart re-parametrised by the
beta-radius t = rho^a, where the volume element becomes (1/a) t^{n-1} dt
times an angular density. Balls are cut into dyadic shells
[r/2^{k+1}, r/2^k); Gauss-Legendre runs in log t inside each shell and in
every angle of each orthant. The innermost core below the ladder is done
as a one-dimensional radial integral, so no node touches the centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ContractError, DivergenceError, DomainError, QuadratureError
from .fields import ScalarField, WeightFunction
from .metric import BetaParams, angular_density, bounding_half_widths, direction_factors, in_ball


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-4
    abs_tol: float = 1e-12
    ladder_depth: int = 20
    angular_order: int = 32
    radial_order: int = 64
    mc_budget: int = 1_000_000
    seed: int = 0
    max_refinements: int = 2

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ContractError("tolerances must be positive")
        if self.angular_order < 2 or self.radial_order < 2:
            raise ContractError("quadrature orders must be >= 2")
        if self.ladder_depth < 1:
            raise ContractError("ladder depth J must be >= 1")
        if self.mc_budget < 1:
            raise ContractError("Monte Carlo budget must be positive")

    def coarse(self) -> QuadratureConfig:
        return replace(
            self,
            angular_order=max(2, self.angular_order // 2),
            radial_order=max(2, self.radial_order // 2),
        )

    def refined(self) -> QuadratureConfig:
        return replace(self, angular_order=2 * self.angular_order, radial_order=2 * self.radial_order)

    def as_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "ladder_depth": self.ladder_depth,
            "angular_order": self.angular_order,
            "radial_order": self.radial_order,
            "mc_budget": self.mc_budget,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    method: str
    annuli_used: int


@dataclass(frozen=True)
class RadialKernel:
    """k(t) = t^{-s} / weight(t) as a function of the beta-distance t."""

    s: float = 0.0
    weight: WeightFunction | None = None

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out = t ** (-self.s) if self.s else np.ones(t.shape)
            if self.weight is not None:
                out = out / self.weight(t)
        return out


# -- angular rule -------------------------------------------------------------


@lru_cache(maxsize=64)
def _sphere_rule_cached(beta: tuple[float, ...], order: int) -> tuple[np.ndarray, np.ndarray]:
    bp = BetaParams(beta)
    n = bp.n
    b = bp.beta_array
    signs = np.array(list(product((1.0, -1.0), repeat=n)))
    if n == 1:
        dirs = signs.copy()
        w = np.full(2, 2.0 * b[0])
        return dirs, w
    x, wx = np.polynomial.legendre.leggauss(order)
    nodes = 0.25 * math.pi * (x + 1.0)
    wts = 0.25 * math.pi * wx
    grids = np.meshgrid(*([nodes] * (n - 1)), indexing="ij")
    ang = np.stack([g.ravel() for g in grids], axis=-1)
    wang = np.ones(len(ang))
    for g in np.meshgrid(*([wts] * (n - 1)), indexing="ij"):
        wang = wang * g.ravel()
    omega = direction_factors(ang, n)
    chain = np.prod(2.0 * b * omega ** (2.0 * b - 1.0), axis=-1)
    base_w = wang * chain * angular_density(ang, n)
    base_dir = omega ** (2.0 * b)
    dirs = (signs[:, None, :] * base_dir[None, :, :]).reshape(-1, n)
    w = np.tile(base_w, len(signs))
    return dirs, w


def sphere_rule(bp: BetaParams, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Points u with |u|_beta = 1 and weights summing to the angular constant.

    The integral of f over R^n equals (1/a) int t^{n-1} sum_m w_m f(t^{2beta/a} u_m) dt.
    """
    return _sphere_rule_cached(bp.beta, int(order))


def angular_constant(bp: BetaParams, order: int = 32) -> float:
    """Quadrature value of the chart constant A/a (compare metric.angular_constant_exact)."""
    _, w = sphere_rule(bp, order)
    return float(np.sum(w)) / bp.a


# -- radial one-dimensional integrals ------------------------------------------


def radial_integral(h: Callable[[np.ndarray], np.ndarray], t_hi: float, n: int, t_lo: float = 0.0) -> tuple[float, float]:
    """int_{t_lo}^{t_hi} t^{n-1} h(t) dt, computed in log t.

    Returns (value, abserr). Raises DivergenceError when the integrand does
    not decay toward t = 0.
    """
    if t_hi <= t_lo:
        return 0.0, 0.0
    u_hi = math.log(t_hi)

    def integrand(u: float) -> float:
        t = math.exp(u)
        if t == 0.0:
            return 0.0
        with np.errstate(all="ignore"):
            v = float(t**n * h(np.asarray([t]))[0])
        if not math.isfinite(v):
            # 0 * inf from under/overflow far below the probed range; decay already checked
            return 0.0 if u < u_hi - 200.0 else math.inf
        return v

    if t_lo > 0:
        val, err = integrate.quad(integrand, math.log(t_lo), u_hi, limit=200)
        return val, err
    # probe decay of the log-variable integrand toward -inf
    probes = [integrand(u_hi - d) for d in (20.0, 80.0, 190.0)]
    if not all(math.isfinite(p) for p in probes) or (
        abs(probes[2]) > 0 and abs(probes[2]) >= abs(probes[1]) * 0.999 and abs(probes[1]) >= abs(probes[0]) * 0.999
    ):
        raise DivergenceError(
            "radial integrand does not decay at t -> 0 (kernel too singular)",
            trace={"probes": probes},
        )
    with np.errstate(all="ignore"):
        val, err = integrate.quad(integrand, -math.inf, u_hi, limit=400)
    if not math.isfinite(val):
        raise DivergenceError("radial integral is infinite")
    return val, err


# -- shell sweeps -------------------------------------------------------------


def ladder_edges(r_max: float, J: int) -> np.ndarray:
    """r_max * 2^{-j}, j = 0..J+1: J+1 dyadic shells and the core radius."""
    return r_max * 2.0 ** (-np.arange(J + 2, dtype=float))


def _intervals(edges: np.ndarray, breaks: Sequence[float]) -> list[tuple[int, float, float]]:
    out = []
    for k in range(len(edges) - 1):
        hi, lo = float(edges[k]), float(edges[k + 1])
        cuts = sorted(b for b in breaks if lo < b < hi)
        pts = [lo, *cuts, hi]
        for a, b in zip(pts[:-1], pts[1:]):
            out.append((k, a, b))
    return out


def _shell_values(
    f: ScalarField,
    center: np.ndarray,
    edges: np.ndarray,
    kernels: Sequence[RadialKernel],
    bp: BetaParams,
    radial_order: int,
    angular_order: int,
) -> np.ndarray:
    """Integrals of k(|y-c|) f(y) over each shell [edges[k+1], edges[k]); shape (K, shells)."""
    dirs, wang = sphere_rule(bp, angular_order)
    x, wx = np.polynomial.legendre.leggauss(radial_order)
    expo = 2.0 * bp.beta_array / bp.a
    prof = f.radial_about(center)
    breaks = list(prof.breaks) if prof is not None else []
    if f.support is not None and np.allclose(f.support[0], center, rtol=0, atol=1e-14):
        breaks.append(f.support[1])
    out = np.zeros((len(kernels), len(edges) - 1))
    for k, lo, hi in _intervals(edges, breaks):
        ul, uh = math.log(lo), math.log(hi)
        half = 0.5 * (uh - ul)
        u = 0.5 * (uh + ul) + half * x
        t = np.exp(u)
        rw = half * wx * t**bp.n / bp.a
        pts = center + (t[:, None] ** expo)[:, None, :] * dirs[None, :, :]
        vals = f(pts)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("field evaluated to a non-finite value at a quadrature node", math.nan, math.inf)
        F = vals @ wang
        for i, ker in enumerate(kernels):
            out[i, k] += float(np.sum(rw * ker(t) * F))
    return out


def _core_values(
    f: ScalarField,
    center: np.ndarray,
    t_core: float,
    kernels: Sequence[RadialKernel],
    bp: BetaParams,
    angular_order: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Core ball B(center, t_core): exact radial integral or local-value bound."""
    C = angular_constant(bp, angular_order)
    prof = f.radial_about(center)
    vals = np.zeros(len(kernels))
    errs = np.zeros(len(kernels))
    if prof is not None:
        for i, ker in enumerate(kernels):
            v, e = radial_integral(lambda t, ker=ker: ker(t) * prof.g(t), t_core, bp.n)
            vals[i], errs[i] = C * v, C * e
        return vals, errs
    for s in f.singularities:
        if np.allclose(np.asarray(s), center, rtol=0, atol=1e-14):
            raise DomainError(
                f"field {f.name!r} is singular at the centre but declares no radial profile"
            )
    f0 = float(f(center))
    # local variation over the innermost core sphere bounds the error of the constant model
    dirs, _ = sphere_rule(bp, max(2, min(angular_order, 8)))
    ring = center + (t_core ** (2.0 * bp.beta_array / bp.a)) * dirs
    spread = float(np.max(np.abs(f(ring) - f0))) if len(dirs) else 0.0
    for i, ker in enumerate(kernels):
        v, e = radial_integral(ker, t_core, bp.n)
        vals[i] = C * f0 * v
        errs[i] = C * (abs(f0) * e + spread * abs(v))
    return vals, errs


@dataclass
class LadderIntegrals:
    """Per-shell integrals of several radial kernels around one centre."""

    radii: np.ndarray  # r_0 > r_1 > ... > r_J
    shells: np.ndarray  # (K, J+1)
    shell_err: np.ndarray  # (K, J+1)
    core: np.ndarray  # (K,)
    core_err: np.ndarray  # (K,)

    def cumulative(self) -> tuple[np.ndarray, np.ndarray]:
        """Ball integrals at every rung, with summed error estimates; shape (K, J+1)."""
        tail = np.cumsum(self.shells[:, ::-1], axis=1)[:, ::-1]
        etail = np.cumsum(self.shell_err[:, ::-1], axis=1)[:, ::-1]
        return tail + self.core[:, None], etail + self.core_err[:, None]


def ladder_integrals(
    f: ScalarField,
    center,
    r_max: float,
    J: int,
    kernels: Sequence[RadialKernel],
    bp: BetaParams,
    cfg: QuadratureConfig,
    estimate_error: bool = True,
) -> LadderIntegrals:
    """Sweep the dyadic ladder r_max 2^{-j} once for all ``kernels``."""
    c = np.asarray(center, dtype=float)
    if c.shape != (bp.n,):
        raise ContractError(f"centre must have {bp.n} coordinates")
    if not r_max > 0:
        raise DomainError("ladder top radius must be positive")
    edges = ladder_edges(r_max, J)
    if f.is_zero:
        z = np.zeros((len(kernels), J + 1))
        return LadderIntegrals(edges[:-1], z, z.copy(), np.zeros(len(kernels)), np.zeros(len(kernels)))
    fine = _shell_values(f, c, edges, kernels, bp, cfg.radial_order, cfg.angular_order)
    if estimate_error:
        co = cfg.coarse()
        coarse = _shell_values(f, c, edges, kernels, bp, co.radial_order, co.angular_order)
        err = np.abs(fine - coarse)
    else:
        err = np.zeros_like(fine)
    core, core_err = _core_values(f, c, float(edges[-1]), kernels, bp, cfg.angular_order)
    return LadderIntegrals(edges[:-1], fine, err, core, core_err)


def _converged(li: LadderIntegrals, cfg: QuadratureConfig) -> tuple[bool, float]:
    total = float(li.shells[0].sum() + li.core[0])
    err = li.shell_err[0]
    J = err.shape[0]
    alloc = 6.0 / (math.pi**2 * (np.arange(J) + 1.0) ** 2)
    budget = np.maximum(cfg.abs_tol * alloc, cfg.rel_tol * abs(total) * alloc)
    achieved = float(err.sum() + li.core_err[0])
    ok = bool(np.all(err <= budget)) and li.core_err[0] <= max(cfg.abs_tol, cfg.rel_tol * abs(total))
    return ok, achieved


def _strict_ladder(f, center, r, kernel, bp, cfg, strict: bool) -> IntegralResult:
    cur = cfg
    li = None
    for _ in range(cfg.max_refinements + 1):
        li = ladder_integrals(f, center, r, cur.ladder_depth, [kernel], bp, cur)
        ok, achieved = _converged(li, cur)
        if ok:
            break
        cur = cur.refined()
    value = float(li.shells[0].sum() + li.core[0])
    achieved = float(li.shell_err[0].sum() + li.core_err[0])
    if strict and not ok:
        raise QuadratureError("tensor-chart quadrature did not converge", value, achieved)
    return IntegralResult(value, achieved, "tensor-chart", cur.ladder_depth + 1)


def integrate_ball(
    f: ScalarField,
    center,
    r: float,
    bp: BetaParams,
    cfg: QuadratureConfig | None = None,
    method: str = "auto",
    strict: bool = False,
) -> IntegralResult:
    """int over B_beta(center, r) of f."""
    cfg = cfg or QuadratureConfig()
    if not r > 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    if method == "auto":
        method = "tensor-chart" if bp.n <= 4 else "monte-carlo"
    if method == "monte-carlo":
        return integrate_ball_mc(f, center, r, bp, cfg.mc_budget, cfg.seed)
    return _strict_ladder(f, center, r, RadialKernel(), bp, cfg, strict)


def integrate_singular(
    f: ScalarField,
    s: float,
    center,
    r: float,
    bp: BetaParams,
    cfg: QuadratureConfig | None = None,
    weight: WeightFunction | None = None,
    strict: bool = False,
) -> IntegralResult:
    """int over B_beta(center, r) of f(y) / (|y - center|_beta^s weight(|y - center|_beta))."""
    cfg = cfg or QuadratureConfig()
    if s < 0:
        raise DomainError(f"kernel exponent must be >= 0, got {s}")
    if not r > 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    if weight is None and bp.n - s <= 0 and not f.is_zero:
        prof = f.radial_about(center)
        local = float(abs(prof.g(np.asarray([1e-300]))[0])) if prof is not None else abs(float(f(np.asarray(center, float))))
        if local > 0:
            raise DivergenceError(
                f"kernel |y|^-{s:g} is not integrable in dimension {bp.n} (radial exponent {bp.n - 1 - s:g} <= -1)"
            )
    return _strict_ladder(f, center, r, RadialKernel(s, weight), bp, cfg, strict)


def integrate_annulus(
    f: ScalarField,
    center,
    r_in: float,
    r_out: float,
    bp: BetaParams,
    cfg: QuadratureConfig | None = None,
    kernel: RadialKernel | None = None,
) -> IntegralResult:
    """int over {r_in <= |y - center|_beta < r_out} of f (times an optional radial kernel)."""
    cfg = cfg or QuadratureConfig()
    if not 0 <= r_in < r_out:
        raise DomainError(f"need 0 <= r_in < r_out, got {r_in}, {r_out}")
    kernel = kernel or RadialKernel()
    if r_in == 0:
        return _strict_ladder(f, center, r_out, kernel, bp, cfg, strict=False)
    c = np.asarray(center, float)
    nshell = max(1, math.ceil(math.log2(r_out / r_in) - 1e-12))
    edges = np.geomspace(r_out, r_in, nshell + 1)
    fine = _shell_values(f, c, edges, [kernel], bp, cfg.radial_order, cfg.angular_order)
    co = cfg.coarse()
    coarse = _shell_values(f, c, edges, [kernel], bp, co.radial_order, co.angular_order)
    return IntegralResult(float(fine.sum()), float(np.abs(fine - coarse).sum()), "tensor-chart", nshell)


# -- nodes for outer integrals -------------------------------------------------


@dataclass(frozen=True)
class BallNodes:
    points: np.ndarray  # (N, n)
    weights: np.ndarray  # (N,)
    core_radius: float


def ball_nodes(center, r: float, bp: BetaParams, J: int, radial_order: int, angular_order: int) -> BallNodes:
    """Quadrature nodes for the shells of B(center, r) down to r/2^{J+1}; the core is left out."""
    c = np.asarray(center, float)
    dirs, wang = sphere_rule(bp, angular_order)
    x, wx = np.polynomial.legendre.leggauss(radial_order)
    expo = 2.0 * bp.beta_array / bp.a
    edges = ladder_edges(r, J)
    pts, wts = [], []
    for k in range(J + 1):
        ul, uh = math.log(edges[k + 1]), math.log(edges[k])
        half = 0.5 * (uh - ul)
        t = np.exp(0.5 * (uh + ul) + half * x)
        rw = half * wx * t**bp.n / bp.a
        p = c + (t[:, None] ** expo)[:, None, :] * dirs[None, :, :]
        pts.append(p.reshape(-1, bp.n))
        wts.append((rw[:, None] * wang[None, :]).ravel())
    return BallNodes(np.concatenate(pts), np.concatenate(wts), float(edges[-1]))


# -- Monte Carlo ---------------------------------------------------------------


def integrate_ball_mc(
    f: ScalarField,
    center,
    r: float,
    bp: BetaParams,
    n_samples: int = 1_000_000,
    seed: int = 0,
    chunk: int = 250_000,
) -> IntegralResult:
    """Rejection sampling from the bounding box of B_beta(center, r).

    ``error_estimate`` is the standard error of the mean.
    """
    if not r > 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    c = np.asarray(center, float)
    h = bounding_half_widths(r, bp)
    box_vol = float(np.prod(2.0 * h))
    rng = np.random.default_rng(seed)
    s1 = 0.0
    s2 = 0.0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        y = c + (2.0 * rng.random((m, bp.n)) - 1.0) * h
        inside = in_ball(y, c, r, bp)
        v = np.where(inside, f(y), 0.0)
        s1 += float(v.sum())
        s2 += float((v * v).sum())
        done += m
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0)
    return IntegralResult(box_vol * mean, box_vol * math.sqrt(var / n_samples), "monte-carlo", 0)
