"""Morrey and Stummel estimators over dyadic ladders, Lemma 1 and Lemma 2 checks.

Every sup over x in R^n is taken over a finite :class:`CenterGrid`, so the
reported values are lower bounds of the true suprema.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ContractError, DivergenceError, DomainError
from .fields import ScalarField, WeightFunction
from .metric import BetaParams, bounding_half_widths
from .quadrature import QuadratureConfig, RadialKernel, ladder_integrals
from .report import Constant, VerificationEntry, entry_from_comparison, fmt

CURVE_KINDS = ("eta", "xi", "mu", "morrey-quotient")
CONVENTIONS = ("generalized", "paper-literal")


def kernel_exponent(p: float, bp: BetaParams, convention: str = "generalized") -> float:
    """(n-p)a for the generalized kernel, n-p for the paper-literal one."""
    if convention == "generalized":
        return (bp.n - p) * bp.a
    if convention == "paper-literal":
        return float(bp.n - p)
    raise ContractError(f"unknown exponent convention {convention!r}")


def morrey_exponent(lam: float, bp: BetaParams, convention: str = "generalized") -> float:
    if convention == "generalized":
        return lam * bp.a
    if convention == "paper-literal":
        return float(lam)
    raise ContractError(f"unknown exponent convention {convention!r}")


# -- curves -------------------------------------------------------------------


@dataclass(frozen=True)
class TailModel:
    """Extrapolation of a curve below its smallest rung, anchored at that rung."""

    kind: str  # "power" (v ~ r^alpha) or "logpower" (v ~ (-log r)^{-m})
    exponent: float
    r0: float
    v0: float
    residual: float

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        if self.kind == "power":
            return self.v0 * (r / self.r0) ** self.exponent
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.v0 * (np.log(r) / math.log(self.r0)) ** (-self.exponent)

    def log_integral(self, q: float) -> float:
        """int_0^{r0} t^{-1} v(t)^q dt; inf when it diverges."""
        if self.v0 == 0:
            return 0.0
        if self.kind == "power":
            rate = self.exponent * q
            return self.v0**q / rate if rate > 0 else math.inf
        rate = self.exponent * q
        L = -math.log(self.r0)
        return self.v0**q * L / (rate - 1.0) if rate > 1 else math.inf


def fit_tail(radii: np.ndarray, values: np.ndarray, window: int = 8) -> TailModel:
    """Best of a power law and a log-power law over the last ``window`` rungs."""
    r = np.asarray(radii, float)[-window:]
    v = np.asarray(values, float)[-window:]
    r0, v0 = float(r[-1]), float(v[-1])
    if v0 <= 0 or np.any(v <= 0) or len(r) < 2:
        return TailModel("power", 1.0, r0, max(v0, 0.0), 0.0)
    y = np.log(v)
    cands = []
    A = np.vstack([np.log(r), np.ones_like(r)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    cands.append(TailModel("power", float(coef[0]), r0, v0, res))
    if np.all(r < 1):
        B = np.vstack([np.log(-np.log(r)), np.ones_like(r)]).T
        coef2, *_ = np.linalg.lstsq(B, y, rcond=None)
        res2 = float(np.sqrt(np.mean((B @ coef2 - y) ** 2)))
        cands.append(TailModel("logpower", float(-coef2[0]), r0, v0, res2))
    return min(cands, key=lambda m: m.residual)


@dataclass
class ModulusCurve:
    """Values sampled on the ladder r_j = r_max 2^{-j}, j = 0..J (radii decreasing)."""

    radii: np.ndarray
    values: np.ndarray
    kind: str
    argmax: np.ndarray | None = None
    errors: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.radii = np.asarray(self.radii, float)
        self.values = np.asarray(self.values, float)
        if self.kind not in CURVE_KINDS:
            raise ContractError(f"curve kind must be one of {CURVE_KINDS}")
        if self.radii.shape != self.values.shape:
            raise ContractError("radii and values must have equal length")
        if np.any(np.diff(self.radii) >= 0):
            raise ContractError("curve radii must be strictly decreasing")
        if np.any(~np.isfinite(self.values)) or np.any(self.values < 0):
            raise ContractError("curve values must be finite and >= 0")
        if self.argmax is None:
            self.argmax = np.zeros(len(self.radii), dtype=int)
        if self.errors is None:
            self.errors = np.zeros(len(self.radii))

    def __len__(self) -> int:
        return len(self.radii)

    def is_monotone(self, rtol: float = 1e-9) -> bool:
        """Non-decreasing in r (values shrink down the ladder)."""
        v = self.values
        return bool(np.all(v[1:] <= v[:-1] * (1 + rtol) + 1e-300))

    def tail(self, window: int = 8) -> TailModel:
        return fit_tail(self.radii, self.values, window)

    def __call__(self, r) -> np.ndarray:
        """Log-log interpolation inside the ladder, tail model below it, constant above."""
        r = np.asarray(r, float)
        rr = self.radii[::-1]
        vv = self.values[::-1]
        out = np.empty(r.shape)
        above = r >= rr[-1]
        below = r < rr[0]
        mid = ~(above | below)
        out[above] = vv[-1]
        if np.any(below):
            out[below] = self.tail()(r[below])
        if np.any(mid):
            if np.all(vv > 0):
                out[mid] = np.exp(np.interp(np.log(r[mid]), np.log(rr), np.log(vv)))
            else:
                out[mid] = np.interp(r[mid], rr, vv)
        return out

    def as_weight(self, gamma: float = 1.0) -> WeightFunction:
        curve = self
        return WeightFunction(
            name=f"{self.kind}^{gamma:g}",
            func=lambda t: curve(t) ** gamma,
            monotone=self.is_monotone(),
            limit_zero=True,
            params={"gamma": gamma, "kind": self.kind},
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# kind={self.kind}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["radius", "value", "center_argmax_index"])
        for r, v, i in zip(self.radii, self.values, self.argmax):
            w.writerow([fmt(r), fmt(v), int(i)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def read_csv(cls, path) -> ModulusCurve:
        kind = "eta"
        rows = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "kind":
                    kind = val.strip()
                continue
            if not line.strip() or line.startswith("radius"):
                continue
            rows.append(line.split(","))
        arr = np.asarray([[float(a), float(b), float(c)] for a, b, c in rows])
        return cls(arr[:, 0], arr[:, 1], kind, argmax=arr[:, 2].astype(int))


# -- centre grids -------------------------------------------------------------


@dataclass(frozen=True)
class CenterGrid:
    centers: tuple[tuple[float, ...], ...]

    def __len__(self) -> int:
        return len(self.centers)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.centers, float)


def make_center_grid(
    f: ScalarField, bp: BetaParams, per_axis: int = 3, box: tuple | None = None
) -> CenterGrid:
    """Singularities first, then the support centre, then a lattice over the support box."""
    pts: list[tuple[float, ...]] = []

    def add(p):
        q = tuple(float(v) for v in p)
        if all(not np.allclose(q, o, rtol=0, atol=1e-14) for o in pts):
            pts.append(q)

    for s in f.singularities:
        add(s)
    if f.support is not None:
        add(f.support[0])
    if box is None:
        bb = f.bounding_box(bp)
        box = bb if bb is not None else (-0.5 * np.ones(bp.n), 0.5 * np.ones(bp.n))
    if per_axis > 0:
        lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
        axes = [np.linspace(l, h, per_axis) if per_axis > 1 else np.array([(l + h) / 2]) for l, h in zip(lo, hi)]
        for p in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, bp.n):
            add(p)
    if not pts:
        add(np.zeros(bp.n))
    return CenterGrid(tuple(pts))


# -- sweeps -------------------------------------------------------------------


@dataclass
class SweepResult:
    radii: np.ndarray
    values: np.ndarray  # (K, J+1) sup over centres
    errors: np.ndarray  # (K, J+1) error at the argmax centre
    argmax: np.ndarray  # (K, J+1)
    per_center: np.ndarray  # (C, K, J+1)


def sweep(
    f: ScalarField,
    kernels: Sequence[RadialKernel],
    bp: BetaParams,
    grid: CenterGrid,
    r_max: float,
    J: int,
    cfg: QuadratureConfig,
) -> SweepResult:
    if not r_max > 0:
        raise DomainError("r_max must be positive")
    g = f if f.nonnegative else f.power(1.0)
    per, perr = [], []
    radii = None
    for c in grid.centers:
        try:
            li = ladder_integrals(g, c, r_max, J, kernels, bp, cfg)
        except DivergenceError as exc:
            raise DivergenceError(f"{exc} at centre {c}", trace={"center": c}) from exc
        vals, errs = li.cumulative()
        per.append(vals)
        perr.append(errs)
        radii = li.radii
    per_c = np.asarray(per)
    err_c = np.asarray(perr)
    arg = np.argmax(per_c, axis=0)
    vals = np.take_along_axis(per_c, arg[None], 0)[0]
    errs = np.take_along_axis(err_c, arg[None], 0)[0]
    return SweepResult(radii, np.maximum(vals, 0.0), errs, arg, per_c)


def stummel_modulus(
    f: ScalarField,
    p: float,
    bp: BetaParams,
    grid: CenterGrid | None = None,
    r_max: float = 1.0,
    J: int = 20,
    cfg: QuadratureConfig | None = None,
    weight: WeightFunction | None = None,
    convention: str = "generalized",
) -> ModulusCurve:
    """eta(r_j) (or xi with a weight): sup over centres of int_{B(x,r_j)} |f| / (t^s w(t))."""
    cfg = cfg or QuadratureConfig()
    if not p > 1:
        raise ContractError(f"need p > 1, got {p}")
    s = kernel_exponent(p, bp, convention)
    if s < 0:
        raise ContractError(f"p={p} gives a negative kernel exponent")
    grid = grid or make_center_grid(f, bp)
    res = sweep(f, [RadialKernel(s, weight)], bp, grid, r_max, J, cfg)
    kind = "eta" if weight is None else "xi"
    return ModulusCurve(
        res.radii, res.values[0], kind, argmax=res.argmax[0], errors=res.errors[0],
        meta={"p": p, "s": s, "centers": len(grid), "convention": convention},
    )


@dataclass
class MorreyEstimate:
    value: float
    curve: ModulusCurve
    status: str  # "bounded-on-ladder" or "growing"
    growth_exponent: float
    center: tuple[float, ...]

    @property
    def bounded(self) -> bool:
        return self.status == "bounded-on-ladder"


def classify_growth(curve: ModulusCurve, window: int = 8) -> tuple[str, float]:
    """'growing' when the quotient rises monotonically over the last rungs with a positive fitted rate.

    The rate is the growth exponent g in q ~ r^{-g} over the window.
    """
    v = curve.values[-window:]
    r = curve.radii[-window:]
    if len(v) < 3 or np.any(v <= 0):
        return "bounded-on-ladder", 0.0
    g = -float(np.polyfit(np.log(r), np.log(v), 1)[0])
    rising = bool(np.all(np.diff(v) > 0))
    if rising and g > 1e-3:
        return "growing", g
    return "bounded-on-ladder", g


def _morrey_from(radii, ball_vals, ball_errs, arg, lam, bp, convention, centers):
    e = morrey_exponent(lam, bp, convention)
    q = ball_vals / radii**e
    curve = ModulusCurve(radii, q, "morrey-quotient", argmax=arg, errors=ball_errs / radii**e,
                         meta={"lambda": lam, "convention": convention})
    status, g = classify_growth(curve)
    j = int(np.argmax(q))
    return MorreyEstimate(float(q[j]), curve, status, g, tuple(centers[int(arg[j])]))


def morrey_norm(
    f: ScalarField,
    lam: float,
    bp: BetaParams,
    grid: CenterGrid | None = None,
    r_max: float = 1.0,
    J: int = 20,
    cfg: QuadratureConfig | None = None,
    convention: str = "generalized",
) -> MorreyEstimate:
    """Max over centres and ladder radii of r^{-a lambda} int_{B(x,r)} |f|; a lower bound of the norm."""
    cfg = cfg or QuadratureConfig()
    if not 0 < lam < bp.n:
        raise ContractError(f"need 0 < lambda < n, got {lam}")
    grid = grid or make_center_grid(f, bp)
    res = sweep(f, [RadialKernel()], bp, grid, r_max, J, cfg)
    return _morrey_from(res.radii, res.values[0], res.errors[0], res.argmax[0], lam, bp, convention, grid.centers)


# -- Lemma 1 ------------------------------------------------------------------


def lemma1_constant(n: int, p: float, lam: float, bp: BetaParams) -> float:
    """2^{(n-p)a} / (1 - 2^{-a(lambda-(n-p))}), the geometric-series constant."""
    if n != bp.n:
        raise ContractError("n must match beta")
    if not 1 < p < n:
        raise ContractError(f"need 1 < p < n, got p={p}")
    gap = lam - (n - p)
    if gap <= 0:
        raise DivergenceError(f"lambda={lam} <= n-p={n - p}: the dyadic series diverges")
    a = bp.a
    return 2.0 ** ((n - p) * a) / (-math.expm1(-a * gap * math.log(2.0)))


def check_lemma1(
    f: ScalarField,
    p: float,
    lam: float,
    bp: BetaParams,
    grid: CenterGrid | None = None,
    r_max: float = 1.0,
    J: int = 20,
    cfg: QuadratureConfig | None = None,
    tol_factor: float = 2.0,
    extra_rungs: int = 12,
    claim_id: str = "lemma1",
) -> tuple[VerificationEntry, ModulusCurve, MorreyEstimate]:
    """eta(r_j) <= C r_j^{(lambda-(n-p))a} ||f||_{L_{1,lambda}} at every rung.

    The dyadic sum behind the bound at r_j uses Morrey quotients at every
    r_j 2^{-k}, so the norm is measured on a ladder reaching ``extra_rungs``
    below the compared rungs.
    """
    cfg = cfg or QuadratureConfig()
    C = lemma1_constant(bp.n, p, lam, bp)
    s = kernel_exponent(p, bp)
    grid = grid or make_center_grid(f, bp)
    full = sweep(f, [RadialKernel(s), RadialKernel()], bp, grid, r_max, J + extra_rungs, cfg)
    keep = slice(0, J + 1)
    res = SweepResult(full.radii[keep], full.values[:, keep], full.errors[:, keep], full.argmax[:, keep],
                      full.per_center[:, :, keep])
    eta = ModulusCurve(res.radii, res.values[0], "eta", argmax=res.argmax[0], errors=res.errors[0],
                       meta={"p": p, "s": s})
    mor = _morrey_from(full.radii, full.values[1], full.errors[1], full.argmax[1], lam, bp, "generalized",
                       grid.centers)
    # error of the Morrey maximum at its rung
    jm = int(np.argmax(mor.curve.values))
    M, M_err = mor.value, float(mor.curve.errors[jm])
    scale = C * res.radii ** ((lam - (bp.n - p)) * bp.a)
    rhs = scale * M
    tol = tol_factor * (eta.errors + scale * M_err)
    entry = entry_from_comparison(
        claim_id,
        eta.values,
        rhs,
        tol,
        witness_labels={"radius": res.radii, "center_index": eta.argmax},
        constants={
            "C(n,p,lambda,beta)": Constant(C, "closed form of the dyadic geometric series"),
            "morrey_norm": Constant(M, f"maximum over {len(grid)} centres and {J + extra_rungs + 1} rungs (lower bound)"),
        },
        details={"field": f.name, "p": p, "lambda": lam, "beta": bp.beta, "membership": mor.status,
                 "growth_exponent": mor.growth_exponent},
        seed=cfg.seed,
    )
    return entry, eta, mor


def check_lemma1_converse(
    f: ScalarField,
    p: float,
    alpha: float | None,
    bp: BetaParams,
    grid: CenterGrid | None = None,
    r_max: float = 1.0,
    J: int = 20,
    cfg: QuadratureConfig | None = None,
    tol_factor: float = 2.0,
    claim_id: str = "lemma1.converse",
) -> VerificationEntry:
    """eta ~ r^{alpha a} implies int_{B(x,r)} |f| <= r^{(n-p)a} eta(r), so f is Morrey with lambda = n-p+alpha."""
    cfg = cfg or QuadratureConfig()
    s = kernel_exponent(p, bp)
    grid = grid or make_center_grid(f, bp)
    res = sweep(f, [RadialKernel(s), RadialKernel()], bp, grid, r_max, J, cfg)
    eta, ball = res.values[0], res.values[1]
    if np.all(eta == 0):
        return VerificationEntry(claim_id, "pass", lhs=ball.tolist(), rhs=eta.tolist(), max_ratio=0.0,
                                 details={"note": "zero field"}, seed=cfg.seed)
    slope = float(np.polyfit(np.log(res.radii), np.log(eta), 1)[0])
    fitted_alpha = slope / bp.a
    if alpha is None:
        alpha = fitted_alpha
    consistent = abs(slope - alpha * bp.a) <= 0.1 * abs(alpha * bp.a)
    lam = bp.n - p + alpha
    bound = res.radii**s * eta
    entry = entry_from_comparison(
        claim_id,
        ball,
        bound,
        tol_factor * (res.errors[1] + res.radii**s * res.errors[0]),
        witness_labels={"radius": res.radii},
        constants={"alpha": Constant(alpha, "fitted log-log slope of eta / a" if alpha == fitted_alpha else "supplied")},
        details={"field": f.name, "p": p, "lambda": lam, "fitted_alpha": fitted_alpha},
        seed=cfg.seed,
    )
    q = ball / res.radii ** (lam * bp.a)
    curve = ModulusCurve(res.radii, q, "morrey-quotient")
    status, g = classify_growth(curve)
    entry.details.update({"membership": status, "growth_exponent": g, "morrey_max": float(q.max())})
    if not consistent:
        entry.status = "inconclusive"
        entry.details["reason"] = f"fitted slope {slope:.4g} differs from alpha*a={alpha * bp.a:.4g} by > 10%"
    elif status != "bounded-on-ladder" and entry.status == "pass":
        entry.status = "fail"
        entry.details["reason"] = "Morrey quotient grows on the ladder"
    return entry


# -- Lemma 2 ------------------------------------------------------------------


def doubling_constant(curve: ModulusCurve) -> float:
    """max_j eta(r_j) / eta(r_{j+1}) over the ladder (empirical C_d)."""
    if len(curve) < 3:
        raise ContractError("doubling constant needs a ladder with J >= 2")
    v = curve.values
    best = 1.0
    for j in range(len(v) - 1):
        num, den = v[j], v[j + 1]
        if den == 0:
            if num == 0:
                continue
            raise DomainError(f"curve vanishes at r={curve.radii[j + 1]:.3g} but not at r={curve.radii[j]:.3g}")
        best = max(best, num / den)
    if not math.isfinite(best):
        raise DomainError("doubling ratio is not finite")
    return float(best)
