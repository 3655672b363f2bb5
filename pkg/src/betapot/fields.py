"""Scalar fields and radial weight functions consumed by the integrators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import ContractError, DomainError, SingularPointError
from .metric import BetaParams, beta_norm, bounding_half_widths

ArrayFn = Callable[[np.ndarray], np.ndarray]

EXAMPLE1_RADIUS = math.exp(-3.0)


@dataclass(frozen=True)
class RadialProfile:
    """Declares f(center + x) = g(|x|_beta); lets integrators treat the core exactly."""

    center: tuple[float, ...]
    g: Callable[[np.ndarray], np.ndarray]
    breaks: tuple[float, ...] = ()


@dataclass(frozen=True)
class ScalarField:
    """An evaluable function on R^n.

    ``func`` maps an array of shape (..., n) to values of shape (...). The
    support is the beta-ball ``support`` = (center, radius) or ``None`` when
    unbounded. Singularities are declared, never detected.
    """

    name: str
    n: int
    func: ArrayFn
    grad: ArrayFn | None = None
    support: tuple[tuple[float, ...], float] | None = None
    singularities: tuple[tuple[float, ...], ...] = ()
    radial: RadialProfile | None = None
    nonnegative: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape[-1:] != (self.n,):
            raise ContractError(f"field {self.name!r} expects points of dimension {self.n}")
        return self.func(arr)

    def value(self, x) -> float:
        """Evaluate at one point, refusing declared singularities."""
        pt = np.asarray(x, dtype=float)
        for s in self.singularities:
            if np.array_equal(pt, np.asarray(s)):
                raise SingularPointError(f"field {self.name!r} is singular at {tuple(pt)}")
        return float(self(pt))

    @property
    def is_zero(self) -> bool:
        return bool(self.params.get("identically_zero", False))

    def radial_about(self, center) -> RadialProfile | None:
        if self.radial is None:
            return None
        if np.allclose(np.asarray(self.radial.center), np.asarray(center), rtol=0, atol=1e-14):
            return self.radial
        return None

    def shifted(self, offset) -> ScalarField:
        """The translate x -> f(x - offset)."""
        off = np.asarray(offset, dtype=float)
        f, g = self.func, self.grad
        sup = None
        if self.support is not None:
            sup = (tuple(np.asarray(self.support[0]) + off), self.support[1])
        rad = None
        if self.radial is not None:
            rad = replace(self.radial, center=tuple(np.asarray(self.radial.center) + off))
        return replace(
            self,
            name=f"{self.name}@shift",
            func=lambda x: f(x - off),
            grad=None if g is None else (lambda x: g(x - off)),
            support=sup,
            singularities=tuple(tuple(np.asarray(s) + off) for s in self.singularities),
            radial=rad,
        )

    def power(self, q: float) -> ScalarField:
        """|f|^q, keeping support, singularities and radial structure."""
        f = self.func
        rad = None
        if self.radial is not None:
            g0 = self.radial.g
            rad = replace(self.radial, g=lambda t: np.abs(g0(t)) ** q)
        return replace(
            self,
            name=f"|{self.name}|^{q:g}",
            func=lambda x: np.abs(f(x)) ** q,
            grad=None,
            radial=rad,
            nonnegative=True,
        )

    def scaled(self, c: float) -> ScalarField:
        f, g = self.func, self.grad
        rad = None
        if self.radial is not None:
            g0 = self.radial.g
            rad = replace(self.radial, g=lambda t: c * g0(t))
        params = dict(self.params)
        if c == 0:
            params["identically_zero"] = True
        return replace(
            self,
            name=f"{c:g}*{self.name}",
            func=lambda x: c * f(x),
            grad=None if g is None else (lambda x: c * g(x)),
            radial=rad,
            nonnegative=self.nonnegative and c >= 0,
            params=params,
        )

    def bounding_box(self, bp: BetaParams) -> tuple[np.ndarray, np.ndarray] | None:
        if self.support is None:
            return None
        c = np.asarray(self.support[0], dtype=float)
        h = bounding_half_widths(self.support[1], bp)
        return c - h, c + h


def gradient_magnitude(u: ScalarField, x) -> float | np.ndarray:
    """Euclidean norm of the gradient of ``u`` at ``x``."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        for s in u.singularities:
            if np.array_equal(pts, np.asarray(s)):
                raise SingularPointError(f"gradient requested at singularity {tuple(pts)}")
    if u.grad is None:
        raise ContractError(f"field {u.name!r} has no registered gradient")
    g = u.grad(pts)
    out = np.sqrt(np.sum(g * g, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def gradient_field(u: ScalarField) -> ScalarField:
    """|grad u| as a field on the same support."""
    if u.grad is None:
        raise ContractError(f"field {u.name!r} has no registered gradient")
    g = u.grad
    return ScalarField(
        name=f"|grad {u.name}|",
        n=u.n,
        func=lambda x: np.sqrt(np.sum(g(x) ** 2, axis=-1)),
        support=u.support,
        singularities=u.singularities,
    )


# -- registry -----------------------------------------------------------------


def _center(center, n: int) -> np.ndarray:
    if center is None:
        return np.zeros(n)
    c = np.asarray(center, dtype=float).reshape(-1)
    if c.size == 1 and n > 1:
        c = np.full(n, float(c[0]))
    if c.shape != (n,):
        raise ContractError(f"center must have {n} coordinates")
    return c


def _box_ball_radius(half, bp: BetaParams) -> float:
    """beta-radius of the ball centred at the origin that contains the box [-half, half]."""
    return float(beta_norm(np.broadcast_to(np.asarray(half, float), (bp.n,)), bp)) * (1 + 1e-12)


def const_field(bp: BetaParams, value: float = 1.0, half_width: float | None = None) -> ScalarField:
    """Constant ``value``; with ``half_width`` it is truncated to the box [-h, h]^n."""
    n = bp.n
    if half_width is None:
        func = lambda x: np.full(x.shape[:-1], float(value))
        return ScalarField(
            name="const",
            n=n,
            func=func,
            grad=lambda x: np.zeros(x.shape),
            radial=RadialProfile(tuple(np.zeros(n)), lambda t: np.full(np.shape(t), float(value))),
            params={"value": value, "identically_zero": value == 0},
        )
    h = float(half_width)

    def func(x):
        inside = np.all(np.abs(x) < h, axis=-1)
        return np.where(inside, float(value), 0.0)

    return ScalarField(
        name="const",
        n=n,
        func=func,
        support=(tuple(np.zeros(n)), _box_ball_radius(h, bp)),
        params={"value": value, "half_width": h, "identically_zero": value == 0},
    )


def gaussian_field(
    bp: BetaParams, amplitude: float = 1.0, width: float = 0.3, center=None
) -> ScalarField:
    """Euclidean Gaussian bump A exp(-|x - c|^2 / (2 w^2))."""
    c = _center(center, bp.n)
    w2 = 2.0 * width * width

    def func(x):
        d = x - c
        return amplitude * np.exp(-np.sum(d * d, axis=-1) / w2)

    def grad(x):
        d = x - c
        return (-2.0 / w2) * d * func(x)[..., None]

    return ScalarField(
        name="gaussian",
        n=bp.n,
        func=func,
        grad=grad,
        params={"amplitude": amplitude, "width": width, "center": tuple(c)},
    )


def power_field(bp: BetaParams, s: float = 0.25, center=None, radius: float | None = None) -> ScalarField:
    """|x - c|_beta^{-s}, optionally cut off outside B_beta(c, radius)."""
    if s < 0:
        raise ContractError("power field exponent s must be >= 0")
    c = _center(center, bp.n)
    rad_cut = math.inf if radius is None else float(radius)

    def g(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            v = t ** (-s)
        return np.where(t < rad_cut, v, 0.0)

    def func(x):
        return g(beta_norm(x - c, bp))

    return ScalarField(
        name="power",
        n=bp.n,
        func=func,
        support=None if radius is None else (tuple(c), rad_cut),
        singularities=(tuple(c),) if s > 0 else (),
        radial=RadialProfile(tuple(c), g, breaks=() if radius is None else (rad_cut,)),
        params={"s": s, "center": tuple(c), "radius": radius},
    )


def example1_profile(t, n: int = 2, convention: str = "paper-literal", a: float = 1.0):
    """Radial profile of the Example-1 field.

    paper-literal: 1 / (t^2 |log t|^6); generalized: the power is n - (n-2)a
    so that kernel times field keeps the t^{-n} balance.
    """
    t = np.asarray(t, dtype=float)
    if convention == "paper-literal":
        q = 2.0
    elif convention == "generalized":
        q = n - (n - 2) * a
    else:
        raise ContractError(f"unknown exponent convention {convention!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = 1.0 / (t**q * np.abs(np.log(t)) ** 6)
    return np.where((t > 0) & (t < EXAMPLE1_RADIUS), v, np.where(t == 0, np.inf, 0.0))


def make_example1_field(bp: BetaParams, convention: str = "paper-literal") -> ScalarField:
    """chi_B(x) / (|x|_beta^2 |log |x|_beta|^6) on B = B_beta(0, e^{-3})."""
    if bp.n < 2:
        raise ContractError("Example 1 needs n >= 2")
    n, a = bp.n, bp.a
    g = lambda t: example1_profile(t, n, convention, a)
    origin = tuple(np.zeros(n))
    return ScalarField(
        name="example1",
        n=n,
        func=lambda x: g(beta_norm(x, bp)),
        support=(origin, EXAMPLE1_RADIUS),
        singularities=(origin,),
        radial=RadialProfile(origin, g, breaks=(EXAMPLE1_RADIUS,)),
        params={"convention": convention},
    )


def bump_field(bp: BetaParams, radius: float = 0.5, center=None, amplitude: float = 1.0) -> ScalarField:
    """Smooth compactly supported A exp(1 - 1/(1 - |x-c|^2/R^2)) (Euclidean radius R)."""
    c = _center(center, bp.n)
    R2 = float(radius) ** 2

    def func(x):
        d = x - c
        q = np.sum(d * d, axis=-1) / R2
        out = np.zeros(q.shape)
        m = q < 1.0
        out[m] = amplitude * np.exp(1.0 - 1.0 / (1.0 - q[m]))
        return out

    def grad(x):
        d = x - c
        q = np.sum(d * d, axis=-1) / R2
        fac = np.zeros(q.shape)
        m = q < 1.0
        fac[m] = -amplitude * np.exp(1.0 - 1.0 / (1.0 - q[m])) * 2.0 / (R2 * (1.0 - q[m]) ** 2)
        return fac[..., None] * d

    return ScalarField(
        name="bump",
        n=bp.n,
        func=func,
        grad=grad,
        support=(tuple(c), float(radius) * (1 + 1e-12) if bp.is_isotropic else _box_ball_radius(radius, bp)),
        params={"radius": radius, "center": tuple(c), "amplitude": amplitude},
    )


def indicator_field(bp: BetaParams, radius: float = 1.0, center=None) -> ScalarField:
    """Characteristic function of B_beta(c, radius)."""
    c = _center(center, bp.n)
    R = float(radius)
    g = lambda t: np.where(np.asarray(t) < R, 1.0, 0.0)
    return ScalarField(
        name="indicator",
        n=bp.n,
        func=lambda x: g(beta_norm(x - c, bp)),
        support=(tuple(c), R),
        radial=RadialProfile(tuple(c), g, breaks=(R,)),
        params={"radius": R, "center": tuple(c)},
    )


def quadratic_field(bp: BetaParams, center=None, scale: float = 1.0) -> ScalarField:
    """scale * |x - c|^2 (Euclidean); registered gradient 2 scale (x - c)."""
    c = _center(center, bp.n)
    return ScalarField(
        name="quadratic",
        n=bp.n,
        func=lambda x: scale * np.sum((x - c) ** 2, axis=-1),
        grad=lambda x: 2.0 * scale * (x - c),
        nonnegative=scale >= 0,
        params={"center": tuple(c), "scale": scale},
    )


def linear_field(bp: BetaParams, axis: int = 0) -> ScalarField:
    e = np.zeros(bp.n)
    e[axis] = 1.0
    return ScalarField(
        name="linear",
        n=bp.n,
        func=lambda x: x[..., axis].copy(),
        grad=lambda x: np.broadcast_to(e, x.shape).copy(),
        nonnegative=False,
        params={"axis": axis},
    )


def zero_field(bp: BetaParams) -> ScalarField:
    return ScalarField(
        name="zero",
        n=bp.n,
        func=lambda x: np.zeros(x.shape[:-1]),
        grad=lambda x: np.zeros(x.shape),
        support=(tuple(np.zeros(bp.n)), 1.0),
        radial=RadialProfile(tuple(np.zeros(bp.n)), lambda t: np.zeros(np.shape(t))),
        params={"identically_zero": True},
    )


FIELD_REGISTRY: dict[str, Callable[..., ScalarField]] = {
    "const": const_field,
    "gaussian": gaussian_field,
    "power": power_field,
    "example1": make_example1_field,
    "bump": bump_field,
    "indicator": indicator_field,
    "quadratic": quadratic_field,
    "linear": linear_field,
    "zero": zero_field,
}


def make_field(spec: str, bp: BetaParams, **params) -> ScalarField:
    """Build a field from a registry id or ``grid:<path>``."""
    if spec.startswith("grid:"):
        return read_grid_field(spec[5:], bp)
    try:
        factory = FIELD_REGISTRY[spec]
    except KeyError:
        raise ContractError(
            f"unknown field {spec!r}; choose from {sorted(FIELD_REGISTRY)} or grid:<path>"
        ) from None
    return factory(bp, **params)


# -- sampled grids ------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    dims: tuple[int, ...]

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(d) for o, h, d in zip(self.origin, self.spacing, self.dims)]


def grid_field(values: np.ndarray, grid: GridSpec, name: str = "grid") -> ScalarField:
    """Multilinear interpolant of ``values`` on ``grid``; zero outside it."""
    vals = np.asarray(values, dtype=float)
    if vals.shape != tuple(grid.dims):
        raise ContractError(f"grid values shape {vals.shape} != dims {grid.dims}")
    n = len(grid.dims)
    axes = grid.axes()
    interp = RegularGridInterpolator(axes, vals, method="linear", bounds_error=False, fill_value=0.0)
    # gradient: central differences on the nodes, then the same interpolation
    grads = np.gradient(vals, *grid.spacing, edge_order=2) if n > 1 else [np.gradient(vals, grid.spacing[0], edge_order=2)]
    ginterp = [
        RegularGridInterpolator(axes, g, method="linear", bounds_error=False, fill_value=0.0)
        for g in grads
    ]

    def func(x):
        shp = x.shape[:-1]
        return interp(x.reshape(-1, n)).reshape(shp)

    def grad(x):
        shp = x.shape
        flat = x.reshape(-1, n)
        return np.stack([gi(flat) for gi in ginterp], axis=-1).reshape(shp)

    lo = np.asarray(grid.origin, float)
    hi = lo + np.asarray(grid.spacing) * (np.asarray(grid.dims) - 1)
    return ScalarField(
        name=name,
        n=n,
        func=func,
        grad=grad,
        nonnegative=bool(np.all(vals >= 0)),
        params={"grid": grid, "lo": tuple(lo), "hi": tuple(hi), "values": vals},
    )


def _attach_grid_support(f: ScalarField, bp: BetaParams) -> ScalarField:
    lo = np.asarray(f.params["lo"])
    hi = np.asarray(f.params["hi"])
    c = 0.5 * (lo + hi)
    return replace(f, support=(tuple(c), _box_ball_radius(0.5 * (hi - lo), bp)))


def sample_to_grid(f: ScalarField, lo, hi, points: int | tuple[int, ...]) -> tuple[np.ndarray, GridSpec]:
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    dims = (points,) * f.n if isinstance(points, int) else tuple(points)
    spacing = tuple((h - l) / (d - 1) for l, h, d in zip(lo, hi, dims))
    grid = GridSpec(tuple(lo), spacing, dims)
    mesh = np.stack(np.meshgrid(*grid.axes(), indexing="ij"), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = f(mesh)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return vals, grid


def write_grid(path, values: np.ndarray, grid: GridSpec) -> None:
    """Header lines ``# key=value`` (n, dims, origin, spacing), then row-major values."""
    vals = np.asarray(values, dtype=float)
    lines = [
        f"# n={len(grid.dims)}",
        "# dims=" + ",".join(str(d) for d in grid.dims),
        "# origin=" + ",".join(f"{v:.17g}" for v in grid.origin),
        "# spacing=" + ",".join(f"{v:.17g}" for v in grid.spacing),
    ]
    lines += [f"{v:.17g}" for v in vals.ravel(order="C")]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_grid(path) -> tuple[np.ndarray, GridSpec]:
    header: dict[str, str] = {}
    data: list[float] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            header[key.strip()] = val.strip()
            continue
        data.extend(float(tok) for tok in line.replace(";", ",").split(",") if tok.strip())
    try:
        n = int(header["n"])
        dims = tuple(int(v) for v in header["dims"].split(","))
        origin = tuple(float(v) for v in header["origin"].split(","))
        spacing = tuple(float(v) for v in header["spacing"].split(","))
    except KeyError as exc:
        raise ContractError(f"grid file {path} lacks header field {exc}") from None
    if not (len(dims) == len(origin) == len(spacing) == n):
        raise ContractError(f"grid file {path}: header lengths disagree with n={n}")
    if len(data) != int(np.prod(dims)):
        raise ContractError(f"grid file {path}: expected {int(np.prod(dims))} values, got {len(data)}")
    return np.asarray(data).reshape(dims), GridSpec(origin, spacing, dims)


def read_grid_field(path, bp: BetaParams) -> ScalarField:
    vals, grid = read_grid(path)
    if len(grid.dims) != bp.n:
        raise ContractError(f"grid dimension {len(grid.dims)} does not match beta (n={bp.n})")
    return _attach_grid_support(grid_field(vals, grid, name=f"grid:{path}"), bp)


def field_from_grid(values: np.ndarray, grid: GridSpec, bp: BetaParams) -> ScalarField:
    return _attach_grid_support(grid_field(values, grid), bp)


# -- weight functions ---------------------------------------------------------


@dataclass(frozen=True)
class WeightFunction:
    """Positive function of the beta-radius, used to divide kernels."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    monotone: bool = True
    limit_zero: bool = False
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, t) -> np.ndarray:
        return self.func(np.asarray(t, dtype=float))

    def pow(self, q: float) -> WeightFunction:
        f = self.func
        return WeightFunction(
            name=f"{self.name}^{q:g}",
            func=lambda t: f(t) ** q,
            monotone=self.monotone if q > 0 else False,
            limit_zero=self.limit_zero and q > 0,
            params={**self.params, "pow": q},
        )

    def check_monotone(self, lo: float = 1e-12, hi: float = 1e6, num: int = 400) -> bool:
        t = np.geomspace(lo, hi, num)
        v = self(t)
        if np.any(~np.isfinite(v)) or np.any(v <= 0):
            return False
        return bool(np.all(np.diff(v) >= -1e-12 * np.abs(v[1:])))


def one_weight() -> WeightFunction:
    return WeightFunction("one", lambda t: np.ones(np.shape(t)), monotone=True, limit_zero=False)


def const_weight(c: float = 1.0) -> WeightFunction:
    if not c > 0:
        raise DomainError("constant weight must be positive")
    return WeightFunction("const", lambda t: np.full(np.shape(t), float(c)), params={"c": c})


def power_weight(alpha: float = 1.0) -> WeightFunction:
    """t^alpha."""
    return WeightFunction(
        "power",
        lambda t: np.asarray(t, float) ** alpha,
        monotone=alpha >= 0,
        limit_zero=alpha > 0,
        params={"alpha": alpha},
    )


def logpower_weight(m: float = 1.0, t0: float = EXAMPLE1_RADIUS) -> WeightFunction:
    """(log t0 / log t)^m below t0, 1 above: non-decreasing, tends to 0 at 0."""
    lt0 = -math.log(t0)

    def func(t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore"):
            L = -np.log(np.minimum(t, t0))
        return np.where(t > 0, (lt0 / L) ** m, 0.0)

    return WeightFunction("logpower", func, monotone=True, limit_zero=m > 0, params={"m": m, "t0": t0})


WEIGHT_REGISTRY: dict[str, Callable[..., WeightFunction]] = {
    "one": one_weight,
    "const": const_weight,
    "power": power_weight,
    "logpower": logpower_weight,
}


def make_weight(spec: str, **params) -> WeightFunction:
    """Registry id, or ``curve:<csv>`` for a curve exported by the CLI."""
    if spec.startswith("curve:"):
        from .spaces import ModulusCurve

        curve = ModulusCurve.read_csv(spec[6:])
        gamma = float(params.pop("gamma", 1.0))
        return curve.as_weight(gamma=gamma)
    try:
        factory = WEIGHT_REGISTRY[spec]
    except KeyError:
        raise ContractError(
            f"unknown weight {spec!r}; choose from {sorted(WEIGHT_REGISTRY)} or curve:<csv>"
        ) from None
    return factory(**params)
